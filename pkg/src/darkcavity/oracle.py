"""Truncated-Fock master-equation steady state, used as an independent check.

The Hamiltonian is assembled from the rotating-frame parameters directly in
the number basis, every mode gets a zero-temperature decay channel, and the
steady density matrix is the unit-trace null vector of the Liouvillian. For
this linear model the exact first moments obey the mean-field equations, so
the oracle's ``<a_k>`` must reproduce the closed forms up to truncation.
"""
from __future__ import annotations

import warnings
from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np
import scipy.sparse as sp
from scipy.sparse.linalg import LinearOperator, MatrixRankWarning, gmres, spsolve

from .atoms import steady_state_closed_form_atoms
from .dynamics import steady_state_closed_form
from .errors import DegenerateGeneratorError, DimensionCapError, OracleError
from .params import Params, ThreeModeParams, check

DEFAULT_DIM_CAP = 4096


@dataclass(frozen=True)
class FockConfig:
    cutoff_per_mode: int
    modes: int
    dim_cap: int = DEFAULT_DIM_CAP

    def __post_init__(self):
        if self.cutoff_per_mode < 1:
            raise ValueError("cutoff_per_mode must be >= 1")
        if self.modes not in (2, 3):
            raise ValueError("modes must be 2 or 3")
        if self.hilbert_dim > self.dim_cap:
            raise DimensionCapError(
                f"Hilbert dimension ({self.cutoff_per_mode}+1)^{self.modes} = "
                f"{self.hilbert_dim} exceeds cap {self.dim_cap}"
            )

    @property
    def hilbert_dim(self) -> int:
        return (self.cutoff_per_mode + 1) ** self.modes


@dataclass(frozen=True)
class OracleResult:
    cutoff: int
    means: np.ndarray          # <a1>, <a2>[, <b>]
    occupations: np.ndarray    # <a1^dag a1>, ...
    trace_error: float
    hermiticity_error: float
    min_eigenvalue: float
    residual: float
    rho: np.ndarray

    @property
    def mean_a1(self) -> complex:
        return complex(self.means[0])

    @property
    def mean_a2(self) -> complex:
        return complex(self.means[1])

    @property
    def mean_b(self) -> Optional[complex]:
        return complex(self.means[2]) if len(self.means) == 3 else None

    def csv_row(self) -> list:
        row = [self.cutoff]
        for m in self.means:
            row += [m.real, m.imag]
        return row + list(self.occupations) + [self.trace_error]


def csv_header(modes: int) -> str:
    if modes == 3:
        return "cutoff,re_a1,im_a1,re_a2,im_a2,re_b,im_b,n1,n2,nb,trace_error"
    return "cutoff,re_a1,im_a1,re_a2,im_a2,n1,n2,trace_error"


def mode_operators(cutoff: int, modes: int) -> list:
    """Annihilation operators for each mode on the tensor-product basis."""
    n = cutoff + 1
    a = sp.diags(np.sqrt(np.arange(1, n, dtype=float)), 1, shape=(n, n), format="csr")
    eye = sp.identity(n, format="csr")
    ops = []
    for k in range(modes):
        factors = [a if j == k else eye for j in range(modes)]
        op = factors[0]
        for f in factors[1:]:
            op = sp.kron(op, f, format="csr")
        ops.append(op.astype(complex))
    return ops


def hamiltonian(params: Params, ops: list) -> sp.csr_matrix:
    three = isinstance(params, ThreeModeParams)
    p = params.base if three else params
    a1, a2 = ops[0], ops[1]
    d1, d2 = a1.conj().T, a2.conj().T
    e = np.exp(1j * p.phi)
    H = (p.delta1 * (d1 @ a1) + p.delta2 * (d2 @ a2)
         + p.J * (d1 @ a2 + d2 @ a1)
         + p.lambda1_mag * (e * a1 + np.conj(e) * d1)
         + p.lambda2_mag * (a2 + d2))
    if three:
        b = ops[2]
        db = b.conj().T
        H = H + params.delta_b * (db @ b) + params.eta * (d1 @ b + db @ a1)
    return H.tocsr()


def decay_rates(params: Params) -> list:
    if isinstance(params, ThreeModeParams):
        return [params.base.gamma1, params.base.gamma2, params.gamma_b]
    return [params.gamma1, params.gamma2]


def liouvillian(H, jumps) -> sp.csr_matrix:
    """Row-major vectorized generator: vec(A rho B) = kron(A, B^T) vec(rho)."""
    d = H.shape[0]
    eye = sp.identity(d, dtype=complex, format="csr")
    L = -1j * (sp.kron(H, eye) - sp.kron(eye, H.T))
    for rate, c in jumps:
        cdc = (c.conj().T @ c).tocsr()
        L = L + rate * (sp.kron(c, c.conj()) - 0.5 * sp.kron(cdc, eye) - 0.5 * sp.kron(eye, cdc.T))
    return L.tocsr()


def _null_vector_direct(L, d: int) -> np.ndarray:
    """Sparse LU with one balance equation replaced by the trace condition."""
    n = d * d
    diag_idx = np.arange(d) * (d + 1)
    keep = np.ones(n)
    keep[0] = 0.0
    A = sp.diags(keep) @ L + sp.csr_matrix(
        (np.ones(d), (np.zeros(d, dtype=int), diag_idx)), shape=(n, n))
    rhs = np.zeros(n, dtype=complex)
    rhs[0] = 1.0
    with warnings.catch_warnings():
        warnings.simplefilter("error", MatrixRankWarning)
        try:
            x = spsolve(A.tocsc(), rhs)
        except MatrixRankWarning as exc:
            raise DegenerateGeneratorError("generator has no unique steady state") from exc
    if not np.all(np.isfinite(x)):
        raise DegenerateGeneratorError("generator has no unique steady state")
    return x.reshape(d, d)


def _null_vector_krylov(H, jumps, tol: float = 1e-14, max_restarts: int = 20) -> np.ndarray:
    """Unit-trace steady state by preconditioned GMRES on matrix-shaped vectors.

    Solves ``L(rho) + sigma tr(rho) = sigma`` with ``sigma`` the vacuum
    projector; the rank-one term removes the trace null space, and taking the
    trace of the equation forces ``tr(rho) = 1``. The preconditioner inverts
    ``K rho + rho K^dag - shift rho``, with ``K = -iH - sum(gamma c^dag c)/2``;
    the shift keeps it regular when the vacuum is an exact eigenvector of
    ``K`` (no drive). Only the preconditioner is approximate: convergence is
    judged on the true residual.
    """
    d = H.shape[0]
    Hd = H.toarray()
    cs = [(g, c.toarray()) for g, c in jumps]
    K = -1j * Hd - 0.5 * sum(g * (c.conj().T @ c) for g, c in cs)
    Kh = K.conj().T
    sigma = np.zeros((d, d), dtype=complex)
    sigma[0, 0] = 1.0

    lam, V = np.linalg.eig(K)
    Vinv = np.linalg.inv(V)
    shift = 0.5 * min(g for g, _ in cs)
    denom = lam[:, None] + lam.conj()[None, :] - shift

    def apply(x):
        X = x.reshape(d, d)
        Y = K @ X + X @ Kh + np.trace(X) * sigma
        for g, c in cs:
            Y += g * (c @ X @ c.conj().T)
        return Y.ravel()

    def precondition(x):
        X = Vinv @ x.reshape(d, d) @ Vinv.conj().T
        return (V @ (X / denom) @ V.conj().T).ravel()

    n = d * d
    A = LinearOperator((n, n), matvec=apply, dtype=complex)
    P = LinearOperator((n, n), matvec=precondition, dtype=complex)
    b = sigma.ravel()
    x = precondition(b)
    for _ in range(max_restarts):
        x, _info = gmres(A, b, x0=x, rtol=tol, atol=0.0, restart=60, maxiter=10, M=P)
        if np.linalg.norm(b - apply(x)) <= 10 * tol:
            break
    else:
        raise DegenerateGeneratorError(
            "steady-state solve did not converge; generator may lack a unique steady state")
    return x.reshape(d, d)


def _predicted_occupation(params: Params) -> float:
    if isinstance(params, ThreeModeParams):
        s = steady_state_closed_form_atoms(params)
        return max(s.n1, s.n2, s.nb)
    s = steady_state_closed_form(params)
    return max(s.n1, s.n2)


def liouvillian_steady_state(params: Params, fock, method: str = "krylov") -> OracleResult:
    """Steady state of the full open system on a truncated Fock space.

    ``fock`` is a ``FockConfig`` or just a per-mode cutoff. ``method`` is
    ``"krylov"`` (default) or ``"direct"``; the sparse direct solve is exact
    but slow beyond a few thousand unknowns.
    """
    check(params)
    modes = 3 if isinstance(params, ThreeModeParams) else 2
    if not isinstance(fock, FockConfig):
        fock = FockConfig(int(fock), modes)
    if fock.modes != modes:
        raise ValueError(f"FockConfig has {fock.modes} modes, parameters need {modes}")
    rates = decay_rates(params)
    if not all(g > 0 for g in rates):
        raise OracleError("oracle requires loss-only parameters (all decay rates > 0)")
    predicted = _predicted_occupation(params)
    if predicted > fock.cutoff_per_mode / 4:
        warnings.warn(f"mean-field occupation {predicted:.3g} exceeds cutoff/4; "
                      "truncation error may dominate", RuntimeWarning, stacklevel=2)

    ops = mode_operators(fock.cutoff_per_mode, modes)
    H = hamiltonian(params, ops)
    jumps = list(zip(rates, ops))
    L = liouvillian(H, jumps)
    if method == "krylov":
        rho = _null_vector_krylov(H, jumps)
    elif method == "direct":
        rho = _null_vector_direct(L, fock.hilbert_dim)
    else:
        raise ValueError(f"unknown method {method!r}")
    residual = float(np.linalg.norm(L @ rho.ravel()))

    means = np.array([(op @ rho).trace() for op in ops])
    occ = np.array([((op.conj().T @ op) @ rho).trace().real for op in ops])
    herm = rho.conj().T
    min_eig = float(np.linalg.eigvalsh((rho + herm) / 2).min())
    return OracleResult(
        cutoff=fock.cutoff_per_mode,
        means=means,
        occupations=occ,
        trace_error=float(abs(np.trace(rho) - 1)),
        hermiticity_error=float(np.abs(rho - herm).max()),
        min_eigenvalue=min_eig,
        residual=residual,
        rho=rho,
    )


@dataclass(frozen=True)
class TruncationTable:
    results: tuple
    deltas: tuple      # max |first-moment change| between successive cutoffs
    converged: bool
    monotone: bool

    @property
    def cutoffs(self) -> list:
        return [r.cutoff for r in self.results]


def truncation_sweep(params: Params, cutoffs: Sequence[int],
                     converged_tol: float = 1e-8, noise_floor: float = 1e-14) -> TruncationTable:
    """Repeat the oracle at increasing cutoffs and track first-moment changes.

    Deltas below ``noise_floor`` count as converged and are exempt from the
    monotonicity check, which covers every delta whose upper cutoff is >= 4.
    """
    cutoffs = list(cutoffs)
    if len(cutoffs) < 2 or any(b <= a for a, b in zip(cutoffs, cutoffs[1:])):
        raise ValueError("need at least two strictly increasing cutoffs")
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", RuntimeWarning)
        results = [liouvillian_steady_state(params, c) for c in cutoffs]
    deltas = tuple(float(np.abs(b.means - a.means).max()) for a, b in zip(results, results[1:]))
    tracked = [dl for dl, c in zip(deltas, cutoffs[1:]) if c >= 4]
    monotone = all(later < earlier or later < noise_floor
                   for earlier, later in zip(tracked, tracked[1:]))
    return TruncationTable(tuple(results), deltas, deltas[-1] < converged_tol, monotone)


def write_report(results: Sequence[OracleResult], fh) -> None:
    """Oracle report CSV, one row per cutoff, to an open text file."""
    modes = len(results[0].means)
    fh.write(csv_header(modes) + "\n")
    for r in results:
        row = r.csv_row()
        fh.write(",".join([str(row[0])] + [repr(float(v)) for v in row[1:]]) + "\n")
