"""Mean-field linear dynamics dA/dt = M A + B.

Covers drift-system construction for two and three modes, the fixed point
(closed form and generic solve), spectral stability, and fixed-step RK4
integration under a time-dependent drive phase.
"""
from __future__ import annotations

import cmath
import itertools
import math
from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np

from .errors import SingularSystemError, StepSizeError
from .params import Params, SteadyState, ThreeModeParams, TwoModeParams, check

SINGULAR_RTOL = 1e-12
MAX_STEP_STIFFNESS = 0.1


def _frozen(a) -> np.ndarray:
    a = np.array(a, dtype=complex)
    a.setflags(write=False)
    return a


@dataclass(frozen=True)
class DriftSystem:
    """Complex drift matrix ``M`` (symmetric, not Hermitian) and drive ``B``."""
    M: np.ndarray
    B: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "M", _frozen(self.M))
        object.__setattr__(self, "B", _frozen(self.B))
        if self.M.shape != (self.dim, self.dim) or self.dim not in (2, 3):
            raise ValueError(f"bad drift system shapes {self.M.shape}, {self.B.shape}")

    @property
    def dim(self) -> int:
        return self.B.shape[0]


def drive_vector(params: Params, phi=None) -> np.ndarray:
    """``-i (|l1| e^{-i phi}, |l2| [, 0])``; ``phi`` overrides ``params.phi``."""
    base = params.base if isinstance(params, ThreeModeParams) else params
    phi = base.phi if phi is None else phi
    B = [-1j * base.lambda1_mag * cmath.exp(-1j * phi), -1j * base.lambda2_mag]
    if isinstance(params, ThreeModeParams):
        B.append(0j)
    return np.array(B, dtype=complex)


def drift_two(params: TwoModeParams) -> DriftSystem:
    check(params)
    p = params
    M = [[-(1j * p.delta1 + p.gamma1 / 2), -1j * p.J],
         [-1j * p.J, -(1j * p.delta2 + p.gamma2 / 2)]]
    return DriftSystem(M, drive_vector(p))


def drift_three(params: ThreeModeParams) -> DriftSystem:
    check(params)
    p, q = params.base, params
    M = [[-(1j * p.delta1 + p.gamma1 / 2), -1j * p.J, -1j * q.eta],
         [-1j * p.J, -(1j * p.delta2 + p.gamma2 / 2), 0],
         [-1j * q.eta, 0, -(1j * q.delta_b + q.gamma_b / 2)]]
    return DriftSystem(M, drive_vector(q))


def drift(params: Params) -> DriftSystem:
    if isinstance(params, ThreeModeParams):
        return drift_three(params)
    return drift_two(params)


def determinant(M) -> complex:
    """Leibniz expansion; the matrices here are at most 3x3."""
    M = np.asarray(M)
    n = M.shape[0]
    total = 0j
    for perm in itertools.permutations(range(n)):
        inversions = sum(perm[i] > perm[j] for i in range(n) for j in range(i + 1, n))
        term = complex(-1 if inversions % 2 else 1)
        for row, col in enumerate(perm):
            term *= M[row, col]
        total += term
    return total


def singular_threshold(M) -> float:
    row_norm = float(np.abs(np.asarray(M)).sum(axis=1).max())
    return SINGULAR_RTOL * row_norm ** 2


def checked_determinant(M) -> complex:
    """Determinant of ``M``; raises ``SingularSystemError`` below tolerance."""
    det = determinant(M)
    threshold = singular_threshold(M)
    if abs(det) < threshold:
        raise SingularSystemError(det, threshold)
    return det


def closed_form_amplitudes(params: TwoModeParams, phi=None):
    """Two-mode fixed point from the R/I decomposition.

    ``phi`` may be an array, in which case both amplitudes are arrays of the
    same shape. Returns ``(alpha1, alpha2)``.
    """
    p = params
    phi = p.phi if phi is None else np.asarray(phi, dtype=float)
    M = [[-(1j * p.delta1 + p.gamma1 / 2), -1j * p.J],
         [-1j * p.J, -(1j * p.delta2 + p.gamma2 / 2)]]
    det = checked_determinant(np.array(M))
    l1, l2, J = p.lambda1_mag, p.lambda2_mag, p.J
    c, s = np.cos(phi), np.sin(phi)
    R1 = l2 * J * c - l1 * p.delta2
    I1 = l1 * p.gamma2 / 2 + l2 * J * s
    R2 = l1 * J * c - l2 * p.delta1
    I2 = l2 * p.gamma1 / 2 - l1 * J * s
    alpha1 = -np.exp(-1j * phi) * (R1 + 1j * I1) / det
    alpha2 = -(R2 + 1j * I2) / det
    return alpha1, alpha2


def steady_state_closed_form(params: TwoModeParams) -> SteadyState:
    check(params)
    a1, a2 = closed_form_amplitudes(params)
    return SteadyState(complex(a1), complex(a2))


def solve_fixed_point(system: DriftSystem) -> np.ndarray:
    checked_determinant(system.M)
    return np.linalg.solve(system.M, -system.B)


def steady_state_solve(system: DriftSystem) -> SteadyState:
    """Fixed point of the drift system by direct linear solve of ``M A = -B``."""
    A = solve_fixed_point(system)
    return SteadyState(*(complex(a) for a in A))


@dataclass(frozen=True)
class Stability:
    eigenvalues: np.ndarray
    is_stable: bool

    @property
    def max_real(self) -> float:
        return float(np.max(self.eigenvalues.real))

    @property
    def spectral_radius(self) -> float:
        return float(np.max(np.abs(self.eigenvalues)))


def eigenvalues(M) -> np.ndarray:
    M = np.asarray(M, dtype=complex)
    if M.shape == (2, 2):
        half_tr = (M[0, 0] + M[1, 1]) / 2
        disc = cmath.sqrt(half_tr ** 2 - (M[0, 0] * M[1, 1] - M[0, 1] * M[1, 0]))
        return np.array([half_tr + disc, half_tr - disc])
    return np.linalg.eigvals(M)


def stability(system: DriftSystem) -> Stability:
    ev = eigenvalues(system.M)
    return Stability(_frozen(ev), bool(np.max(ev.real) < 0))


# --- time integration -------------------------------------------------------

@dataclass(frozen=True)
class PhaseSchedule:
    """Piecewise-linear phase program, held constant outside its knots."""
    times: tuple
    phis: tuple

    def __post_init__(self):
        if len(self.times) != len(self.phis) or not self.times:
            raise ValueError("schedule needs matching, non-empty times and phases")
        if any(b <= a for a, b in zip(self.times, self.times[1:])):
            raise ValueError("schedule knot times must be strictly increasing")

    @classmethod
    def constant(cls, phi: float) -> "PhaseSchedule":
        return cls((0.0,), (float(phi),))

    @classmethod
    def ramp(cls, phi0: float, phi1: float, t0: float, t1: float) -> "PhaseSchedule":
        return cls((float(t0), float(t1)), (float(phi0), float(phi1)))

    @classmethod
    def piecewise(cls, knots: Sequence) -> "PhaseSchedule":
        """From ``[(t, phi), ...]`` knots."""
        ts, ps = zip(*knots)
        return cls(tuple(map(float, ts)), tuple(map(float, ps)))

    def __call__(self, t):
        return np.interp(t, self.times, self.phis)

    @property
    def final_phi(self) -> float:
        return self.phis[-1]


@dataclass(frozen=True)
class Trajectory:
    times: np.ndarray
    amplitudes: np.ndarray
    phi_of_t: np.ndarray

    def __post_init__(self):
        for name in ("times", "amplitudes", "phi_of_t"):
            a = np.array(getattr(self, name))
            a.setflags(write=False)
            object.__setattr__(self, name, a)
        if len(self.amplitudes) != len(self.times) or len(self.phi_of_t) != len(self.times):
            raise ValueError("trajectory arrays must have equal length")
        if np.any(np.diff(self.times) <= 0):
            raise ValueError("trajectory times must be strictly increasing")

    @property
    def dim(self) -> int:
        return self.amplitudes.shape[1]

    @property
    def final(self) -> np.ndarray:
        return self.amplitudes[-1]

    def csv_header(self) -> str:
        cols = ["t", "re_a1", "im_a1", "re_a2", "im_a2"]
        if self.dim == 3:
            cols += ["re_b", "im_b"]
        return ",".join(cols + ["phi"])

    def write_csv(self, fh) -> None:
        fh.write(self.csv_header() + "\n")
        for t, amp, phi in zip(self.times, self.amplitudes, self.phi_of_t):
            vals = [t] + [x for a in amp for x in (a.real, a.imag)] + [phi]
            fh.write(",".join(repr(float(v)) for v in vals) + "\n")

    def to_csv(self, path) -> None:
        with open(path, "w", encoding="utf-8", newline="") as fh:
            self.write_csv(fh)


def integrate(params: Params, initial=None, schedule: Optional[PhaseSchedule] = None,
              t_final: float = 40.0, dt: float = 0.01, record_every: int = 1) -> Trajectory:
    """Integrate the mean-field equations with classical fixed-step RK4.

    Only the drive vector depends on the phase, so ``M`` is built once. The
    last step is shortened to land exactly on ``t_final``. ``initial``
    defaults to the empty cavities and ``schedule`` to ``params.phi`` held
    constant.
    """
    if not t_final > 0 or not dt > 0:
        raise ValueError("t_final and dt must be positive")
    if record_every < 1:
        raise ValueError("record_every must be >= 1")
    system = drift(params)
    M = system.M
    radius = stability(system).spectral_radius
    if dt * radius > MAX_STEP_STIFFNESS:
        raise StepSizeError(
            f"dt * spectral radius = {dt * radius:.3g} exceeds {MAX_STEP_STIFFNESS}; "
            f"use dt <= {MAX_STEP_STIFFNESS / radius:.3g}"
        )
    if schedule is None:
        schedule = PhaseSchedule.constant(params.phi)
    A = np.zeros(system.dim, dtype=complex) if initial is None else np.array(initial, dtype=complex)
    if A.shape != (system.dim,):
        raise ValueError(f"initial state must have length {system.dim}")

    def force(t):
        return drive_vector(params, float(schedule(t)))

    n_steps = math.ceil(t_final / dt - 1e-9)
    times, states, phis = [0.0], [A.copy()], [float(schedule(0.0))]
    t = 0.0
    for k in range(1, n_steps + 1):
        h = min(dt, t_final - t) if k == n_steps else dt
        b0, bh, b1 = force(t), force(t + h / 2), force(t + h)
        k1 = M @ A + b0
        k2 = M @ (A + h / 2 * k1) + bh
        k3 = M @ (A + h / 2 * k2) + bh
        k4 = M @ (A + h * k3) + b1
        A = A + h / 6 * (k1 + 2 * k2 + 2 * k3 + k4)
        t = t_final if k == n_steps else k * dt
        if k % record_every == 0 or k == n_steps:
            times.append(t)
            states.append(A.copy())
            phis.append(float(schedule(t)))
    return Trajectory(np.array(times), np.array(states), np.array(phis))
