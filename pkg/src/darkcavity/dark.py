"""Phases at which one cavity's mean field vanishes, and related diagnostics."""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional

from .dynamics import drift_two, singular_threshold, determinant, stability
from .errors import DriveOffError
from .params import TwoModeParams, check

FEASIBILITY_TOL = 1e-10


@dataclass(frozen=True)
class DarkSolution:
    """Candidate dark phase for one cavity.

    ``cos_phi`` and ``sin_phi`` are the raw components demanded by the
    vanishing of that cavity's amplitude; ``phi`` is their atan2 even when
    they do not lie on the unit circle. ``feasibility_residual`` is the
    magnitude-constraint violation divided by ``J^2 (|l1|^2 + |l2|^2)``.
    """
    cavity: int
    phi: float
    feasibility_residual: float
    cos_phi: float
    sin_phi: float

    @property
    def feasible(self) -> bool:
        return self.feasibility_residual < FEASIBILITY_TOL

    @property
    def phi_over_pi(self) -> float:
        return self.phi / math.pi


def _require_drives(l1: float, l2: float) -> None:
    if l1 == 0 or l2 == 0:
        raise DriveOffError(
            "both drives must be on: with one drive off there is no closed "
            "cyclic transition and the phase has no effect"
        )


def dark_solution(cavity: int, l1: float, l2: float, J: float,
                  eff_delta: float, eff_gamma: float) -> DarkSolution:
    """Shared solver for cavity-``k`` darkness.

    ``eff_delta``/``eff_gamma`` are the detuning and decay of the *other*
    cavity (possibly dressed by an ensemble). Cavity 1 is dark when
    ``e^{-i phi}`` matches the ratio set by cavity 2, and vice versa with
    the sine sign flipped.
    """
    _require_drives(l1, l2)
    if cavity == 1:
        drive_ratio = l1 / (l2 * J)
        cos_phi = drive_ratio * eff_delta
        sin_phi = -drive_ratio * eff_gamma / 2
        lhs, rhs = l2 ** 2 * J ** 2, l1 ** 2
    elif cavity == 2:
        drive_ratio = l2 / (l1 * J)
        cos_phi = drive_ratio * eff_delta
        sin_phi = drive_ratio * eff_gamma / 2
        lhs, rhs = l1 ** 2 * J ** 2, l2 ** 2
    else:
        raise ValueError(f"cavity must be 1 or 2, got {cavity}")
    rhs *= eff_delta ** 2 + eff_gamma ** 2 / 4
    residual = abs(lhs - rhs) / (J ** 2 * (l1 ** 2 + l2 ** 2))
    return DarkSolution(cavity, math.atan2(sin_phi, cos_phi), residual, cos_phi, sin_phi)


def dark_phase_cavity1(params: TwoModeParams) -> DarkSolution:
    p = check(params)
    return dark_solution(1, p.lambda1_mag, p.lambda2_mag, p.J, p.delta2, p.gamma2)


def dark_phase_cavity2(params: TwoModeParams) -> DarkSolution:
    p = check(params)
    return dark_solution(2, p.lambda1_mag, p.lambda2_mag, p.J, p.delta1, p.gamma1)


@dataclass(frozen=True)
class ExclusionReport:
    cavity1: DarkSolution
    cavity2: DarkSolution
    sign_argument_applies: bool
    simultaneous_possible: Optional[bool]
    note: str = ""

    @property
    def sin_sign_cavity1(self) -> int:
        return int(math.copysign(1, self.cavity1.sin_phi)) if self.cavity1.sin_phi else 0

    @property
    def sin_sign_cavity2(self) -> int:
        return int(math.copysign(1, self.cavity2.sin_phi)) if self.cavity2.sin_phi else 0


def mutual_exclusion(params: TwoModeParams) -> ExclusionReport:
    """Check whether both cavities could be dark at one phase.

    For positive decay rates cavity-1 darkness needs sin(phi) < 0 and
    cavity-2 darkness sin(phi) > 0, so the answer is always no. With gain
    the sign argument fails and ``simultaneous_possible`` is left ``None``.
    """
    c1, c2 = dark_phase_cavity1(params), dark_phase_cavity2(params)
    if params.gamma1 > 0 and params.gamma2 > 0:
        assert c1.sin_phi < 0 < c2.sin_phi
        return ExclusionReport(c1, c2, True, False,
                               f"cavity 1 needs sin(phi) = {c1.sin_phi:.6g} < 0, "
                               f"cavity 2 needs sin(phi) = {c2.sin_phi:.6g} > 0")
    return ExclusionReport(c1, c2, False, None,
                           "non-positive decay rate: sign argument does not apply, "
                           "see gain_diagnostic")


@dataclass(frozen=True)
class GainReport:
    det_M: complex
    singular: bool
    is_stable: bool
    degeneracy_predicted: bool

    @property
    def has_steady_state(self) -> bool:
        return not self.singular and self.is_stable


def gain_diagnostic(params: TwoModeParams) -> GainReport:
    """Determinant and stability of a (possibly) gain-loss configuration.

    When ``gamma1 == -gamma2`` and one phase makes both cavities dark at
    once, the drift matrix is necessarily singular; this is checked.
    """
    p = check(params)
    system = drift_two(p)
    det = determinant(system.M)
    singular = abs(det) < singular_threshold(system.M)
    predicted = False
    if p.lambda1_mag > 0 and p.lambda2_mag > 0 and math.isclose(p.gamma1, -p.gamma2):
        c1, c2 = dark_phase_cavity1(p), dark_phase_cavity2(p)
        predicted = (c1.feasible and c2.feasible
                     and math.isclose(c1.cos_phi, c2.cos_phi, abs_tol=1e-9)
                     and math.isclose(c1.sin_phi, c2.sin_phi, abs_tol=1e-9))
    if predicted and not singular:
        raise ArithmeticError(f"balanced gain/loss dark point with det(M) = {det} != 0")
    return GainReport(det, singular, stability(system).is_stable, predicted)


@dataclass(frozen=True)
class SymmetricDesign:
    params: object
    phi_dark_1: float
    phi_dark_2: float


def design_symmetric(delta: float, gamma: float, lam: float) -> SymmetricDesign:
    """Equal cavities and drives with ``J = sqrt(delta^2 + gamma^2/4)``.

    This coupling satisfies both magnitude conditions at once, so the dark
    cavity can be switched by the phase alone.
    """
    if not gamma > 0 or not lam > 0:
        raise ValueError("design needs gamma > 0 and lambda > 0")
    J = math.sqrt(delta ** 2 + gamma ** 2 / 4)
    p = TwoModeParams(delta, delta, gamma, gamma, J, lam, lam)
    return SymmetricDesign(p, dark_phase_cavity1(p).phi, dark_phase_cavity2(p).phi)
