"""Three-mode model: a bosonized atomic ensemble coupled to cavity 1.

The ensemble is treated as an exact boson mode ``b`` (low-excitation limit)
with collective coupling ``eta`` and decay ``gamma_b``.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional

import numpy as np

from .dark import DarkSolution, SymmetricDesign, dark_phase_cavity1, dark_solution
from .dynamics import checked_determinant, drift_three
from .errors import InfeasibleDesignError
from .params import SteadyState, ThreeModeParams, TwoModeParams, check

DARK_OCCUPATION_TOL = 1e-24


def closed_form_amplitudes_atoms(params: ThreeModeParams, phi=None):
    """Fixed point ``(alpha1, alpha2, beta)``; ``phi`` may be an array.

    The ensemble response enters through ``c = i delta_b + gamma_b/2``;
    cavity 2 picks up the extra ``i |l2| eta^2`` term from the ensemble's
    back-action on cavity 1. The determinant is taken from the assembled
    3x3 drift matrix.
    """
    p, q = params.base, params
    phi = p.phi if phi is None else np.asarray(phi, dtype=float)
    det = checked_determinant(drift_three(q).M)
    l1, l2, J = p.lambda1_mag, p.lambda2_mag, p.J
    c = 1j * q.delta_b + q.gamma_b / 2
    cos, sin = np.cos(phi), np.sin(phi)
    R1 = l2 * J * cos - l1 * p.delta2
    I1 = l1 * p.gamma2 / 2 + l2 * J * sin
    R2 = l1 * J * cos - l2 * p.delta1
    I2 = l2 * p.gamma1 / 2 - l1 * J * sin
    alpha1 = np.exp(-1j * phi) * c * (R1 + 1j * I1) / det
    alpha2 = (c * (R2 + 1j * I2) + 1j * l2 * q.eta ** 2) / det
    beta = -1j * q.eta * alpha1 / c
    return alpha1, alpha2, beta


def steady_state_closed_form_atoms(params: ThreeModeParams) -> SteadyState:
    check(params)
    return SteadyState(*(complex(v) for v in closed_form_amplitudes_atoms(params)))


@dataclass(frozen=True)
class AtomDarkSolution(DarkSolution):
    """Dark solution plus the three-mode steady state at ``phi`` (if feasible)."""
    state: Optional[SteadyState] = None


def _attach_state(sol: DarkSolution, params: ThreeModeParams) -> AtomDarkSolution:
    state = steady_state_closed_form_atoms(params.with_phi(sol.phi)) if sol.feasible else None
    return AtomDarkSolution(sol.cavity, sol.phi, sol.feasibility_residual,
                            sol.cos_phi, sol.sin_phi, state)


def dark_phase_cavity1_atoms(params: ThreeModeParams) -> AtomDarkSolution:
    """Cavity-1 dark phase; identical to the atom-free condition.

    With ``alpha1 = 0`` the ensemble is not driven either, which is checked
    on the returned state.
    """
    check(params)
    sol = _attach_state(dark_phase_cavity1(params.base), params)
    if sol.state is not None and sol.state.nb > DARK_OCCUPATION_TOL:
        raise ArithmeticError(f"ensemble excited at the cavity-1 dark phase: nb = {sol.state.nb}")
    return sol


def dressed_cavity1(params: ThreeModeParams) -> tuple:
    """Cavity-1 detuning and decay dressed by the ensemble.

    Returns ``(delta_eff, gamma_eff)`` with the ensemble's dispersive shift
    subtracted and its absorption added.
    """
    p, q = params.base, params
    D = q.delta_b ** 2 + q.gamma_b ** 2 / 4
    return p.delta1 - q.delta_b * q.eta ** 2 / D, p.gamma1 + q.gamma_b * q.eta ** 2 / D


def dark_phase_cavity2_atoms(params: ThreeModeParams) -> AtomDarkSolution:
    check(params)
    p = params.base
    delta_eff, gamma_eff = dressed_cavity1(params)
    sol = dark_solution(2, p.lambda1_mag, p.lambda2_mag, p.J, delta_eff, gamma_eff)
    return _attach_state(sol, params)


def design_symmetric_atoms(delta: float, gamma: float, lam: float) -> SymmetricDesign:
    """Equal detunings/decays for all three modes and equal drives.

    ``J = sqrt(delta^2 + gamma^2/4)`` and ``eta = sqrt(2 (delta^2 - gamma^2/4))``
    make both cavities dark-capable at once. Needs ``delta > gamma/2``.
    """
    if not gamma > 0 or not lam > 0:
        raise ValueError("design needs gamma > 0 and lambda > 0")
    if not delta > gamma / 2:
        raise InfeasibleDesignError(
            f"design with atoms needs delta > gamma/2 = {gamma / 2:g} (got delta = {delta:g}); "
            "otherwise eta^2 = 2 (delta^2 - gamma^2/4) <= 0"
        )
    J = math.sqrt(delta ** 2 + gamma ** 2 / 4)
    eta = math.sqrt(2 * (delta ** 2 - gamma ** 2 / 4))
    q = ThreeModeParams(TwoModeParams(delta, delta, gamma, gamma, J, lam, lam),
                        delta_b=delta, gamma_b=gamma, eta=eta)
    return SymmetricDesign(q, dark_phase_cavity1_atoms(q).phi, dark_phase_cavity2_atoms(q).phi)
