"""Small dense complex linear algebra: Hermitian eigensolve, Kronecker
products and the symmetric logarithmic derivative (SLD) solve.

Everything works on plain ``numpy`` arrays. Dimensions in this package never
exceed 100, so there is no sparse path.
"""

from __future__ import annotations

from typing import NamedTuple

import numpy as np

from .errors import InconsistentDerivative, InvalidInput, NonHermitian

HERMITIAN_TOL = 1e-10
EPS_NULL = 1e-12


class HermitianEig(NamedTuple):
    eigenvalues: np.ndarray
    eigenvectors: np.ndarray


def as_matrix(m) -> np.ndarray:
    a = np.asarray(m, dtype=complex)
    if a.ndim != 2:
        raise InvalidInput(f"expected a 2-d matrix, got shape {a.shape}")
    if not np.all(np.isfinite(a)):
        raise InvalidInput("matrix has non-finite entries")
    return a


def check_hermitian(m, tol: float = HERMITIAN_TOL) -> np.ndarray:
    a = as_matrix(m)
    if a.shape[0] != a.shape[1]:
        raise NonHermitian(f"matrix is not square: {a.shape}")
    asym = np.max(np.abs(a - a.conj().T)) if a.size else 0.0
    if asym > tol:
        raise NonHermitian(f"asymmetry {asym:.3e} exceeds {tol:.1e}")
    return a


def _fix_phases(vecs: np.ndarray) -> np.ndarray:
    # first component with non-negligible modulus made real positive
    vecs = vecs.copy()
    for k in range(vecs.shape[1]):
        col = vecs[:, k]
        idx = np.flatnonzero(np.abs(col) > 1e-12)
        if idx.size:
            c = col[idx[0]]
            vecs[:, k] = col * (abs(c) / c)
    return vecs


def hermitian_eig(m) -> HermitianEig:
    """Eigendecomposition of a Hermitian matrix.

    Eigenvalues come back ascending. Each eigenvector has its first
    non-negligible component rotated to be real and positive so repeated calls
    give identical output.
    """
    a = check_hermitian(m)
    a = (a + a.conj().T) / 2
    w, v = np.linalg.eigh(a)
    return HermitianEig(w, _fix_phases(v))


def kron(a, b) -> np.ndarray:
    return np.kron(as_matrix(a), as_matrix(b))


def solve_sld(rho, drho, eps_null: float = EPS_NULL) -> np.ndarray:
    """Symmetric logarithmic derivative L with (L rho + rho L)/2 = drho.

    Solved in the eigenbasis of ``rho``: ``L_ij = 2 drho_ij / (l_i + l_j)``.
    Pairs with ``l_i + l_j <= eps_null`` are set to zero, which is only
    legitimate when the corresponding derivative element also vanishes;
    otherwise the family leaves the support of ``rho`` and
    :class:`InconsistentDerivative` is raised.
    """
    rho = check_hermitian(rho)
    drho = check_hermitian(drho)
    if rho.shape != drho.shape:
        raise InvalidInput(f"shape mismatch {rho.shape} vs {drho.shape}")
    lam, vecs = hermitian_eig(rho)
    dt = vecs.conj().T @ drho @ vecs
    denom = lam[:, None] + lam[None, :]
    null = denom <= eps_null
    if np.any(np.abs(dt[null]) > eps_null):
        raise InconsistentDerivative(
            "derivative has weight outside the support of rho"
        )
    lt = np.zeros_like(dt)
    keep = ~null
    lt[keep] = 2.0 * dt[keep] / denom[keep]
    L = vecs @ lt @ vecs.conj().T
    return (L + L.conj().T) / 2
