"""Truncated Fock-basis reference implementation.

Everything here comes from dense diagonalization of the Hamiltonian in the
number basis, with no use of the closed-form series.  It is the ground truth
the rest of the package is checked against.

Basis conventions: the full model acts on span{|n, up>, |n, down>} with
index ``2 n + s`` (s = 0 for spin up).  The parity Hamiltonians
H_pm = a^dag a + g (a + a^dag) pm Delta (-1)^N act on the bare number basis.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass
from typing import Optional

import numpy as np

from .errors import DomainError
from .kernel_core import ModelParams, normalize_parity

__all__ = [
    "TruncatedOperator",
    "Spectrum",
    "parity_matrix",
    "full_matrix",
    "spectrum",
    "eigensystem",
    "hermite_state",
    "hermite_states",
    "oracle_heat_kernel",
    "oracle_partition",
    "oracle_zeta",
    "counting",
    "TruncationWarning",
]


class TruncationWarning(UserWarning):
    """The truncated basis may be too small for the requested quantity."""


@dataclass(frozen=True)
class TruncatedOperator:
    M: int
    matrix: np.ndarray
    basis: str  # "parity+", "parity-" or "full"
    params: ModelParams

    def __post_init__(self):
        if not np.all(np.isfinite(self.matrix)):
            raise ValueError("operator has non-finite entries")


@dataclass(frozen=True)
class Spectrum:
    """Ascending eigenvalues.  Only ``trusted`` of them are reliable."""

    values: np.ndarray
    parity: str
    M: int

    @property
    def trusted(self) -> int:
        return self.values.size // 2

    @property
    def trusted_values(self) -> np.ndarray:
        return self.values[: self.trusted]

    @property
    def edge(self) -> float:
        """Largest trusted eigenvalue."""
        return float(self.values[self.trusted - 1])


def parity_matrix(M: int, parity, p: ModelParams) -> TruncatedOperator:
    """Matrix of H_pm on the first M number states."""
    if M < 2:
        raise DomainError("M must be at least 2")
    sign = 1.0 if normalize_parity(parity) == "+" else -1.0
    n = np.arange(M)
    H = np.diag(n + sign * p.delta * (-1.0) ** n)
    off = p.g * np.sqrt(np.arange(1, M))
    H += np.diag(off, 1) + np.diag(off, -1)
    return TruncatedOperator(M, H, "parity" + ("+" if sign > 0 else "-"), p)


def full_matrix(M: int, p: ModelParams) -> TruncatedOperator:
    """Matrix of a^dag a + Delta sigma_z + g (a + a^dag) sigma_x, dimension 2M."""
    if M < 2:
        raise DomainError("M must be at least 2")
    n = np.arange(M)
    a = np.diag(np.sqrt(np.arange(1, M)), 1)
    X = a + a.T
    sz = np.diag([1.0, -1.0])
    sx = np.array([[0.0, 1.0], [1.0, 0.0]])
    H = np.kron(np.diag(n.astype(float)), np.eye(2)) + p.delta * np.kron(np.eye(M), sz) + p.g * np.kron(X, sx)
    return TruncatedOperator(M, H, "full", p)


def _tag(op: TruncatedOperator) -> str:
    return {"parity+": "+", "parity-": "-", "full": "full"}[op.basis]


def spectrum(op: TruncatedOperator) -> Spectrum:
    vals = np.linalg.eigvalsh(op.matrix)
    return Spectrum(vals, _tag(op), op.M)


def eigensystem(op: TruncatedOperator):
    """Ascending eigenvalues and orthonormal eigenvectors (columns)."""
    return np.linalg.eigh(op.matrix)


def hermite_states(nmax: int, x) -> np.ndarray:
    """Array ``psi[n, ...]`` of normalized oscillator eigenfunctions, n = 0..nmax.

    Uses the recurrence on the normalized functions themselves, which stays
    in floating-point range long after H_n(x) overflows.
    """
    if nmax < 0 or nmax > 2000:
        raise DomainError("n must lie in [0, 2000]")
    x = np.asarray(x, dtype=float)
    psi = np.empty((nmax + 1,) + x.shape)
    psi[0] = math.pi ** -0.25 * np.exp(-0.5 * x * x)
    if nmax >= 1:
        psi[1] = math.sqrt(2.0) * x * psi[0]
    for n in range(1, nmax):
        psi[n + 1] = math.sqrt(2.0 / (n + 1)) * x * psi[n] - math.sqrt(n / (n + 1.0)) * psi[n - 1]
    return psi


def hermite_state(n: int, x):
    """psi_n(x) = (2^n n! sqrt(pi))^(-1/2) H_n(x) exp(-x^2/2)."""
    return hermite_states(n, x)[n]


def oracle_heat_kernel(x, y, t: float, M: int, p: ModelParams, which="full", tol: float = 1e-12):
    """Spectral expansion sum_j exp(-t lambda_j) Phi_j(x) Phi_j(y)^T.

    Returns a 2x2 array for ``which="full"`` (rows and columns ordered
    spin up, spin down) and a scalar for a parity.  Emits a
    :class:`TruncationWarning` when the Boltzmann weight at the trusted
    edge exceeds ``tol``.
    """
    if not (np.isreal(t) and t > 0):
        raise DomainError("oracle heat kernel needs real t > 0")
    which = normalize_parity(which)
    op = full_matrix(M, p) if which == "full" else parity_matrix(M, which, p)
    vals, vecs = eigensystem(op)
    keep = vals.size // 2
    vals, vecs = vals[:keep], vecs[:, :keep]
    if math.exp(-t * (vals[-1] - vals[0])) > tol:
        warnings.warn("truncated spectrum too short for this t", TruncationWarning, stacklevel=2)
    weights = np.exp(-t * vals)
    if which == "full":
        hx = hermite_states(M - 1, np.array([x, y]))
        # spin-resolved position amplitudes: phi_j^s(x) = sum_n c_{2n+s, j} psi_n(x)
        up, dn = vecs[0::2], vecs[1::2]
        ax = np.stack([hx[:, 0] @ up, hx[:, 0] @ dn])  # (2, keep)
        ay = np.stack([hx[:, 1] @ up, hx[:, 1] @ dn])
        return (ax * weights) @ ay.T
    hx = hermite_states(M - 1, np.array([x, y]))
    fx = hx[:, 0] @ vecs
    fy = hx[:, 1] @ vecs
    return float(np.sum(weights * fx * fy))


def _sorted_spec(M: int, p: ModelParams, which) -> Spectrum:
    which = normalize_parity(which)
    op = full_matrix(M, p) if which == "full" else parity_matrix(M, which, p)
    return spectrum(op)


def oracle_partition(beta: float, M: int, p: ModelParams, which="full", spec: Optional[Spectrum] = None):
    """(Z, tail bound) from the trusted eigenvalues.

    The tail beyond the trusted edge is bounded by treating the remaining
    levels as at most ``mult`` per unit spacing (mult = 2 full, 1 parity),
    i.e. a geometric series starting at the edge.
    """
    spec = spec or _sorted_spec(M, p, which)
    lam = spec.trusted_values
    mult = 2.0 if spec.parity == "full" else 1.0
    z = float(np.sum(np.exp(-beta * lam)))
    tail = mult * math.exp(-beta * (spec.edge + 0.5)) / (1.0 - math.exp(-beta))
    return z, tail


def oracle_zeta(s: complex, tau: float, M: int, p: ModelParams, which="full", spec: Optional[Spectrum] = None):
    """Dirichlet sum of (lambda_j + tau)^(-s) with a Hurwitz tail correction.

    Beyond the trusted edge the levels are replaced by the asymptotic
    ladder n - g^2 (twice for the full model), whose contribution is a
    Hurwitz zeta value.  Real s only for the tail correction.
    """
    from scipy.special import zeta as hurwitz

    spec = spec or _sorted_spec(M, p, which)
    lam = spec.trusted_values
    if np.any(lam + tau <= 0):
        raise DomainError("tau must exceed minus the ground-state energy")
    head = np.sum((lam + tau) ** (-s))
    mult = 2 if spec.parity == "full" else 1
    n_next = lam.size // mult
    a = n_next - p.g**2 + tau
    tail = mult * hurwitz(float(np.real(s)), a) if np.isreal(s) else 0.0
    return complex(head + tail) if np.iscomplexobj(head) or not np.isreal(s) else float(head + tail)


def counting(T: float, spec: Spectrum) -> int:
    """Number of trusted eigenvalues <= T."""
    if T > spec.edge:
        raise DomainError(f"T={T} lies beyond the trusted range (edge {spec.edge:.3f})")
    return int(np.searchsorted(spec.values, T, side="right"))
