"""Partially entangled probes.

For a probe ``sum_i psi_i |ii>`` the QFI is

    J = 1/((1-t)(t + 1/(d-1))) + d/((1-t)(1-t+d t)^2) * b^T Z^+ b

with ``b`` the lexicographic vector of ``2 psi_i psi_j`` (i < j), ``Z = J +
alpha Omega^T Omega``, ``J`` diagonal with entries ``psi_i^2 + psi_j^2``,
``alpha = d t/(1-t+d t)`` and ``Omega`` the d x d(d-1)/2 incidence-like matrix
built by :func:`build_omega`.

Two independent checks live here as well: a direct solve of the full linear
system for the score operator restricted to span{|ii>}, and the eigenvalue
structure of ``A = Omega J^{-1} Omega^T`` that bounds the formula above.

Pair indices are 0-based: pair (i, j) with i < j has rank
``i*d - i*(i+1)/2 + (j - i - 1)``.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .channels import check_theta, schmidt_vector
from .closed_form import j_o
from .errors import Divergent, InvalidInput, SingularSystem, ZeroCoefficient
from .linalg import hermitian_eig

PINV_RCOND = 1e-10


def pairs(d: int) -> list[tuple[int, int]]:
    """Lexicographically ordered index pairs (0,1), (0,2), ..., (d-2,d-1)."""
    return [(i, j) for i in range(d) for j in range(i + 1, d)]


def pair_rank(i: int, j: int, d: int) -> int:
    if not (0 <= i < j < d):
        raise InvalidInput(f"need 0 <= i < j < d, got ({i}, {j}) with d={d}")
    return i * d - i * (i + 1) // 2 + (j - i - 1)


def build_omega(psi) -> np.ndarray:
    """Omega_d built by the block recursion

        f_2(x, r)   = [[r], [x]]
        f_{d+1}(x, r) = [[r, 0], [x I_d, f_d(r)]]

    where x is the leading coefficient and r the remaining ones.
    """
    psi = np.asarray(psi, dtype=float).ravel()
    d = psi.size
    if d < 2:
        raise InvalidInput("need d >= 2")
    if d == 2:
        return np.array([[psi[1]], [psi[0]]])
    x, r = psi[0], psi[1:]
    sub = build_omega(r)
    top = np.concatenate([r, np.zeros(sub.shape[1])])[None, :]
    bottom = np.hstack([x * np.eye(d - 1), sub])
    return np.vstack([top, bottom])


@dataclass(frozen=True)
class PartialEntanglementMatrices:
    b: np.ndarray
    Jmat: np.ndarray
    Omega: np.ndarray
    Z: np.ndarray
    alpha: float


def _pair_vectors(psi):
    idx = np.array(pairs(psi.size))
    pi, pj = psi[idx[:, 0]], psi[idx[:, 1]]
    return 2 * pi * pj, pi**2 + pj**2


def build_matrices(psi, theta: float) -> PartialEntanglementMatrices:
    psi = schmidt_vector(psi)
    theta = check_theta(theta)
    d = psi.size
    b, jdiag = _pair_vectors(psi)
    omega = build_omega(psi)
    alpha = d * theta / (1 - theta + d * theta)
    Z = np.diag(jdiag) + alpha * omega.T @ omega
    return PartialEntanglementMatrices(b, np.diag(jdiag), omega, Z, alpha)


def quad_form_pinv(Z: np.ndarray, b: np.ndarray, rcond: float = PINV_RCOND) -> float:
    """b^T Z^+ b with small singular values (below rcond * max) discarded."""
    return float(b @ np.linalg.pinv(Z, rcond=rcond, hermitian=True) @ b)


def qfi_partial(psi, theta: float) -> float:
    """QFI of the depolarizing channel probed by a partially entangled pair."""
    if theta == 1.0:
        raise Divergent("QFI diverges at theta = 1")
    m = build_matrices(psi, theta)
    d = m.Omega.shape[0]
    quad = quad_form_pinv(m.Z, m.b)
    return j_o(theta, d) + d / ((1 - theta) * (1 - theta + d * theta) ** 2) * quad


def ld_x_closed(psi, theta: float) -> float:
    """Closed form of sum_i psi_i^2 <ii|L|ii> for the score restricted to span{|ii>}."""
    m = build_matrices(psi, theta)
    d = m.Omega.shape[0]
    s = 1 - theta + d * theta
    return (d - 1) / s - d * d * theta / ((1 - theta) * s * s) * quad_form_pinv(m.Z, m.b)


def score_block_system(psi, theta: float):
    """Assemble [[R, S], [S^T, T]] and right-hand side [a; b] for the score on span{|ii>}.

    Unknowns are the diagonal elements L_ii followed by the off-diagonal
    L_ij (i < j, lexicographic).
    """
    psi = schmidt_vector(psi)
    theta = check_theta(theta)
    d = psi.size
    omega = build_omega(psi)
    b, jdiag = _pair_vectors(psi)
    D = np.diag(psi**2)
    R = (1 - theta + d * theta) / d * D
    S = theta * np.diag(psi) @ omega
    T = (1 - theta) / d * np.diag(jdiag) + theta * omega.T @ omega
    a = (d - 1) / d * psi**2
    M = np.block([[R, S], [S.T, T]])
    rhs = np.concatenate([a, b])
    return M, rhs


def score_diag_oracle(psi, theta: float) -> tuple[np.ndarray, float]:
    """Diagonal of the score on span{|ii>} by a direct dense solve.

    Returns ``(x, l^T D x)`` with ``x_i = <ii|L|ii>``. Needs every Schmidt
    coefficient strictly positive, otherwise the system is singular.
    """
    psi = schmidt_vector(psi)
    if np.any(psi <= 0):
        raise SingularSystem("score system is singular when a Schmidt coefficient vanishes")
    if theta <= 0 or theta >= 1:
        raise SingularSystem(f"score system is singular at theta={theta}")
    M, rhs = score_block_system(psi, theta)
    try:
        sol = np.linalg.solve(M, rhs)
    except np.linalg.LinAlgError as exc:
        raise SingularSystem(str(exc)) from exc
    x = sol[: psi.size]
    return x, float(psi**2 @ x)


def build_a(psi) -> np.ndarray:
    """A_d with a_ii = sum_{k!=i} psi_k^2/(psi_i^2+psi_k^2), a_ij = psi_i psi_j/(psi_i^2+psi_j^2)."""
    psi = schmidt_vector(psi)
    if np.any(psi <= 0):
        raise ZeroCoefficient("A_d is undefined when a Schmidt coefficient is zero")
    sq = psi**2
    denom = sq[:, None] + sq[None, :]
    A = np.outer(psi, psi) / denom
    off = sq[None, :] / denom
    np.fill_diagonal(off, 0.0)
    np.fill_diagonal(A, off.sum(axis=1))
    return A


def verify_max_eig(psi) -> tuple[float, float]:
    """Largest eigenvalue of A_d and the relative residual of the candidate
    eigenvector (1/(psi_i psi_j))_{i<j} of J^{-1} Omega^T Omega at eigenvalue d-1."""
    A = build_a(psi)
    psi = np.asarray(psi, dtype=float)
    d = psi.size
    lam_max = float(hermitian_eig(A).eigenvalues[-1])
    b, jdiag = _pair_vectors(psi)
    omega = build_omega(psi)
    v = 2.0 / b
    resid = (omega.T @ (omega @ v)) / jdiag - (d - 1) * v
    return lam_max, float(np.max(np.abs(resid)) / np.max(np.abs(v)))


def subspace_psi(d: int, d_o: int) -> np.ndarray:
    """Maximal entanglement on the first ``d_o`` Schmidt levels, none elsewhere."""
    if not (1 <= d_o <= d):
        raise InvalidInput(f"need 1 <= d_o <= d, got d_o={d_o}, d={d}")
    psi = np.zeros(d)
    psi[:d_o] = 1 / np.sqrt(d_o)
    return psi


def qfi_subspace(theta: float, d: int, d_o: int) -> float:
    """QFI for a probe maximally entangled on a d_o-dimensional subspace."""
    return 1 / ((1 - theta) * (theta + 1 / (d * d_o - 1)))


def random_psi(d: int, rng: np.random.Generator, size: int | None = None) -> np.ndarray:
    """Schmidt vectors drawn uniformly from the positive part of the unit sphere."""
    shape = (d,) if size is None else (size, d)
    g = np.abs(rng.standard_normal(shape))
    return g / np.linalg.norm(g, axis=-1, keepdims=True)


def interpolated_psi(d: int, t: float) -> np.ndarray:
    """Path from the product state (t=0) to the maximally entangled state (t=1)."""
    v = np.full(d, t / np.sqrt(d))
    v[0] += 1 - t
    return v / np.linalg.norm(v)


def entanglement_entropy(psi) -> float:
    p = np.asarray(psi, dtype=float) ** 2
    p = p[p > 0]
    return float(-(p * np.log(p)).sum())
