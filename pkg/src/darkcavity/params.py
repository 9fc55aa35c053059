"""Parameter and result types for the driven two-cavity model.

All rates are plain floats in one user-chosen unit (the test suite and the
bundled configs use gamma = 1). Detunings are taken in the frame rotating at
the common drive frequency.
"""
from __future__ import annotations

import json
import math
from dataclasses import asdict, dataclass, field, replace
from pathlib import Path
from typing import Optional, Union

from .errors import ParameterError

TWO_MODE_KEYS = ("delta1", "delta2", "gamma1", "gamma2", "J",
                 "lambda1_mag", "lambda2_mag", "phi")
ATOM_KEYS = ("delta_b", "gamma_b", "eta")


@dataclass(frozen=True)
class LabFrameSpec:
    omega1: float
    omega2: float
    omega_d: float
    omega0: Optional[float] = None


@dataclass(frozen=True)
class TwoModeParams:
    """Two coupled cavities, each driven at the same frequency.

    The cavity-2 drive is real and non-negative; ``phi`` is the phase of the
    cavity-1 drive relative to it. ``phi`` is kept exactly as given.
    """
    delta1: float
    delta2: float
    gamma1: float
    gamma2: float
    J: float
    lambda1_mag: float
    lambda2_mag: float
    phi: float = 0.0

    def with_phi(self, phi: float) -> "TwoModeParams":
        return replace(self, phi=phi)

    def with_drives(self, lambda1_mag: float, lambda2_mag: float) -> "TwoModeParams":
        return replace(self, lambda1_mag=lambda1_mag, lambda2_mag=lambda2_mag)

    @property
    def gains(self) -> bool:
        return self.gamma1 < 0 or self.gamma2 < 0

    def to_dict(self) -> dict:
        return asdict(self)


@dataclass(frozen=True)
class ThreeModeParams:
    """Two-mode model plus a bosonized atomic ensemble coupled to cavity 1."""
    base: TwoModeParams
    delta_b: float
    gamma_b: float
    eta: float

    @property
    def phi(self) -> float:
        return self.base.phi

    def with_phi(self, phi: float) -> "ThreeModeParams":
        return replace(self, base=self.base.with_phi(phi))

    def with_base(self, base: TwoModeParams) -> "ThreeModeParams":
        return replace(self, base=base)

    @property
    def gains(self) -> bool:
        return self.base.gains or self.gamma_b < 0

    def to_dict(self) -> dict:
        d = self.base.to_dict()
        d.update(delta_b=self.delta_b, gamma_b=self.gamma_b, eta=self.eta)
        return d


Params = Union[TwoModeParams, ThreeModeParams]


@dataclass(frozen=True)
class SteadyState:
    """Mean amplitudes at the fixed point. Occupations are derived on access."""
    alpha1: complex
    alpha2: complex
    beta: Optional[complex] = None

    @property
    def n1(self) -> float:
        return abs(self.alpha1) ** 2

    @property
    def n2(self) -> float:
        return abs(self.alpha2) ** 2

    @property
    def nb(self) -> Optional[float]:
        return None if self.beta is None else abs(self.beta) ** 2

    @property
    def dim(self) -> int:
        return 2 if self.beta is None else 3

    def as_vector(self) -> list:
        v = [self.alpha1, self.alpha2]
        if self.beta is not None:
            v.append(self.beta)
        return v


@dataclass(frozen=True)
class ValidationReport:
    errors: tuple = ()
    warnings: tuple = field(default=())

    @property
    def ok(self) -> bool:
        return not self.errors


def to_rotating_frame(spec: LabFrameSpec) -> tuple:
    """Detunings ``omega_k - omega_d``.

    Returns ``(delta1, delta2)``, or ``(delta1, delta2, delta_b)`` when the
    atomic transition frequency is given.
    """
    out = (spec.omega1 - spec.omega_d, spec.omega2 - spec.omega_d)
    if spec.omega0 is not None:
        out += (spec.omega0 - spec.omega_d,)
    return out


def collective_coupling(g: float, N: int) -> float:
    """Collective ensemble coupling ``g * sqrt(N)``.

    Non-integer effective couplings (for example eta = sqrt(6)/2) are not
    reachable from integer ``N`` at a fixed ``g``; set ``ThreeModeParams.eta``
    directly in that case.
    """
    if isinstance(N, bool) or int(N) != N:
        raise ValueError(f"atom number must be an integer, got {N!r}")
    if N < 1:
        raise ValueError(f"atom number must be >= 1, got {N}")
    if not g >= 0:
        raise ValueError(f"single-atom coupling must be >= 0, got {g}")
    return g * math.sqrt(N)


def validate(params: Params) -> ValidationReport:
    """List every violated invariant of ``params``.

    Negative decay rates are allowed (gain) and only produce a warning.
    """
    errors, warnings = [], []
    three = isinstance(params, ThreeModeParams)
    base = params.base if three else params

    values = base.to_dict()
    if three:
        values.update(delta_b=params.delta_b, gamma_b=params.gamma_b, eta=params.eta)
    bad = set()
    for key, v in values.items():
        if not isinstance(v, (int, float)) or isinstance(v, bool) or not math.isfinite(v):
            errors.append(f"{key} must be a finite number, got {v!r}")
            bad.add(key)

    if "J" not in bad and not base.J > 0:
        errors.append("J must be positive")
    for key in ("lambda1_mag", "lambda2_mag"):
        if key not in bad and values[key] < 0:
            errors.append(f"{key} must be non-negative")
    if three:
        if "gamma_b" not in bad and not params.gamma_b > 0:
            errors.append("gamma_b must be positive")
        if "eta" not in bad and params.eta < 0:
            errors.append("eta must be non-negative")

    gains = [k for k in ("gamma1", "gamma2") if k not in bad and values[k] < 0]
    if gains:
        warnings.append("gain mode: negative decay rate in " + ", ".join(gains))
    return ValidationReport(tuple(errors), tuple(warnings))


def check(params: Params) -> Params:
    """Raise ``ParameterError`` if ``params`` is invalid, else return it."""
    report = validate(params)
    if not report.ok:
        raise ParameterError(report.errors)
    return params


def params_from_dict(data: dict) -> Params:
    """Build parameters from a flat mapping keyed by field name.

    ``phi`` defaults to 0. The three atom keys must appear together; their
    presence selects the three-mode model.
    """
    unknown = sorted(set(data) - set(TWO_MODE_KEYS) - set(ATOM_KEYS))
    if unknown:
        raise ParameterError([f"unknown config key {k!r}" for k in unknown])
    missing = [k for k in TWO_MODE_KEYS if k not in data and k != "phi"]
    atom_present = [k for k in ATOM_KEYS if k in data]
    if atom_present and len(atom_present) != len(ATOM_KEYS):
        missing += [k for k in ATOM_KEYS if k not in data]
    if missing:
        raise ParameterError([f"missing config key {k!r}" for k in missing])

    def num(k):
        v = data[k]
        if isinstance(v, bool) or not isinstance(v, (int, float)):
            raise ParameterError([f"{k} must be a number, got {v!r}"])
        return float(v)

    base = TwoModeParams(**{k: num(k) for k in TWO_MODE_KEYS if k in data})
    if atom_present:
        params = ThreeModeParams(base, num("delta_b"), num("gamma_b"), num("eta"))
    else:
        params = base
    return check(params)


def load_config(path) -> Params:
    with open(path, encoding="utf-8") as fh:
        try:
            data = json.load(fh)
        except json.JSONDecodeError as exc:
            raise ParameterError([f"{path}: not valid JSON ({exc})"]) from exc
    if not isinstance(data, dict):
        raise ParameterError([f"{path}: config must be a JSON object"])
    return params_from_dict(data)


def save_config(params: Params, path) -> None:
    Path(path).write_text(json.dumps(params.to_dict(), indent=2) + "\n", encoding="utf-8")


def fig2_params(phi: float = 0.0) -> TwoModeParams:
    """Symmetric parameter set with both dark conditions met (gamma = 1)."""
    return TwoModeParams(delta1=1.0, delta2=1.0, gamma1=1.0, gamma2=1.0,
                         J=math.sqrt(5) / 2, lambda1_mag=0.1, lambda2_mag=0.1, phi=phi)


def fig4_params(phi: float = 0.0) -> ThreeModeParams:
    """``fig2_params`` plus an ensemble with delta_b = gamma_b = 1, eta = sqrt(6)/2."""
    return ThreeModeParams(fig2_params(phi), delta_b=1.0, gamma_b=1.0, eta=math.sqrt(6) / 2)
