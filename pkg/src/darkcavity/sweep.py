"""Occupations on a uniform grid of drive phase differences."""
from __future__ import annotations

import warnings
from dataclasses import dataclass
from typing import Optional

import numpy as np

from .atoms import closed_form_amplitudes_atoms
from .dynamics import closed_form_amplitudes
from .errors import SingularSystemError
from .params import Params, ThreeModeParams, check

MODELS = ("two-mode", "three-mode")


@dataclass(frozen=True)
class SweepSpec:
    phi_from: float = -np.pi
    phi_to: float = np.pi
    points: int = 2001
    model: str = "two-mode"

    def __post_init__(self):
        if int(self.points) != self.points or self.points < 2:
            raise ValueError("points must be an integer >= 2")
        if not self.phi_from < self.phi_to:
            raise ValueError("phi_from must be < phi_to")
        if self.model not in MODELS:
            raise ValueError(f"model must be one of {MODELS}")

    def grid(self) -> np.ndarray:
        return np.linspace(self.phi_from, self.phi_to, int(self.points))


@dataclass(frozen=True)
class SweepResult:
    phi: np.ndarray
    n1: np.ndarray
    n2: np.ndarray
    nb: Optional[np.ndarray] = None
    singular: bool = False

    def rows(self):
        cols = [self.phi, self.n1, self.n2] + ([self.nb] if self.nb is not None else [])
        return zip(*cols)

    def csv_header(self) -> str:
        return "phi,n1,n2,nb" if self.nb is not None else "phi,n1,n2"

    def write_csv(self, fh) -> None:
        fh.write(self.csv_header() + "\n")
        for row in self.rows():
            fh.write(",".join(repr(float(v)) for v in row) + "\n")

    def argmin(self, column: str) -> float:
        """Grid phase minimizing the named occupation column."""
        return float(self.phi[np.nanargmin(getattr(self, column))])


def phase_sweep(params: Params, spec: SweepSpec = None, phis=None) -> SweepResult:
    """Steady-state occupations across ``phis`` (or ``spec.grid()``).

    The drift matrix does not depend on the phase, so a singular system is
    singular everywhere: every row becomes ``nan`` and a warning is issued.
    """
    check(params)
    three = isinstance(params, ThreeModeParams)
    if spec is None:
        spec = SweepSpec(model="three-mode" if three else "two-mode")
    if (spec.model == "three-mode") != three:
        raise ValueError(f"sweep model {spec.model!r} does not match the parameters")
    phi = spec.grid() if phis is None else np.asarray(phis, dtype=float)

    try:
        if three:
            amps = closed_form_amplitudes_atoms(params, phi)
        else:
            amps = closed_form_amplitudes(params, phi)
    except SingularSystemError as exc:
        warnings.warn(f"{exc}; sweep rows set to nan", RuntimeWarning, stacklevel=2)
        nan = np.full(phi.shape, np.nan)
        return SweepResult(phi, nan, nan.copy(), nan.copy() if three else None, singular=True)
    occ = [np.broadcast_to(np.abs(a) ** 2, phi.shape).copy() for a in amps]
    return SweepResult(phi, *occ)
