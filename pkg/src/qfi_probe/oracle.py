"""Numerical cross-checks: QFI straight from the SLD, classical Fisher
information of explicit measurements, and Monte Carlo Cramer-Rao runs.

Nothing here uses the closed forms except :func:`crb_experiment`, which needs
the bound it is testing against.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .channels import ParamFamily, SchemeSpec, check_theta, family, input_state
from .closed_form import qfi_scheme
from .errors import (
    DegenerateOutcome,
    InvalidInput,
    NumericalError,
    ThetaOutOfRange,
    UnsupportedCombination,
)
from .linalg import check_hermitian, hermitian_eig, solve_sld

PROB_FLOOR = 1e-14
DPROB_FLOOR = 1e-12


class Povm:
    """Finite list of PSD operators summing to the identity."""

    def __init__(self, elements: Sequence, tol: float = 1e-10):
        elems = tuple(check_hermitian(e, tol) for e in elements)
        if not elems:
            raise InvalidInput("a POVM needs at least one element")
        dim = elems[0].shape[0]
        for e in elems:
            if e.shape != (dim, dim):
                raise InvalidInput("POVM elements differ in shape")
            if np.linalg.eigvalsh((e + e.conj().T) / 2)[0] < -tol:
                raise InvalidInput("POVM element is not positive semi-definite")
        total = sum(elems)
        if np.max(np.abs(total - np.eye(dim))) > tol:
            raise InvalidInput("POVM elements do not sum to the identity")
        self.elements = elems

    @property
    def dim(self) -> int:
        return self.elements[0].shape[0]

    def __len__(self):
        return len(self.elements)

    def probabilities(self, rho) -> np.ndarray:
        return np.array([np.trace(e @ rho).real for e in self.elements])


@dataclass(frozen=True)
class CrbReport:
    theta_true: float
    n_shots: int
    n_trials: int
    mse: float
    crb: float
    ratio: float
    bias: float = 0.0


def _check_in_domain(fam: ParamFamily, theta: float) -> float:
    lo, hi = fam.theta_domain
    theta = float(theta)
    if not (lo <= theta <= hi):
        raise ThetaOutOfRange(f"theta={theta} outside family domain [{lo}, {hi}]")
    return theta


def qfi_numeric(fam: ParamFamily, theta: float) -> float:
    """tr(rho L^2) with L the SLD solved from rho(theta) and its derivative."""
    theta = _check_in_domain(fam, theta)
    rho = fam.rho_at(theta)
    L = solve_sld(rho, fam.drho_at(theta))
    val = np.trace(rho @ L @ L)
    if abs(val.imag) > 1e-10:
        raise NumericalError(f"QFI has imaginary residue {val.imag:.3e}")
    return float(val.real)


def optimal_projectors(spec: SchemeSpec) -> Povm:
    """Two-outcome projective measurement onto the probe state and its complement."""
    if spec.kind == "Partial":
        raise UnsupportedCombination(
            "no two-outcome optimal measurement for partial entanglement; use eigenbasis_povm"
        )
    p0 = input_state(spec)
    return Povm([p0, np.eye(p0.shape[0]) - p0])


def eigenbasis_povm(rho) -> Povm:
    """Rank-one projectors onto an eigenbasis of ``rho``."""
    _, vecs = hermitian_eig(rho)
    return Povm([np.outer(v, v.conj()) for v in vecs.T])


def sld_eigenbasis_povm(fam: ParamFamily, theta: float) -> Povm:
    """Projectors onto an eigenbasis of the SLD at ``theta``.

    Its classical Fisher information equals the QFI at that theta for any
    family. For the partially entangled probe this is the attaining
    measurement; the eigenbasis of rho itself rotates with theta there and
    falls short.
    """
    theta = _check_in_domain(fam, theta)
    L = solve_sld(fam.rho_at(theta), fam.drho_at(theta))
    _, vecs = hermitian_eig(L)
    return Povm([np.outer(v, v.conj()) for v in vecs.T])


def random_povm(dim: int, n_outcomes: int, rng: np.random.Generator) -> Povm:
    """Random full-rank POVM: E_k = S^{-1/2} G_k^+ G_k S^{-1/2}, S = sum_k G_k^+ G_k."""
    g = rng.standard_normal((n_outcomes, dim, dim)) + 1j * rng.standard_normal(
        (n_outcomes, dim, dim)
    )
    pos = np.einsum("kji,kjl->kil", g.conj(), g)
    w, v = np.linalg.eigh(pos.sum(axis=0))
    s_inv_half = (v / np.sqrt(w)) @ v.conj().T
    elems = s_inv_half @ pos @ s_inv_half
    elems = (elems + np.conj(np.swapaxes(elems, 1, 2))) / 2
    return Povm(list(elems))


def classical_fisher(povm: Povm, fam: ParamFamily, theta: float) -> float:
    """Fisher information sum_k dp_k^2/p_k of the outcome distribution of ``povm``."""
    theta = _check_in_domain(fam, theta)
    p = povm.probabilities(fam.rho_at(theta))
    dp = povm.probabilities(fam.drho_at(theta))
    small = p <= PROB_FLOOR
    if np.any(small & (np.abs(dp) > DPROB_FLOOR)):
        raise DegenerateOutcome("outcome with vanishing probability has nonzero derivative")
    keep = ~small
    return float(np.sum(dp[keep] ** 2 / p[keep]))


def sample_outcomes(povm: Povm, rho, n: int, seed: int) -> np.ndarray:
    """Multinomial outcome counts of ``n`` independent measurements of ``rho``."""
    if n < 1:
        raise InvalidInput("n must be >= 1")
    p = np.clip(povm.probabilities(rho), 0.0, None)
    p = p / p.sum()
    return np.random.default_rng(seed).multinomial(n, p)


def mle_theta(counts, spec: SchemeSpec) -> float:
    """Maximum-likelihood theta from counts of the two-outcome optimal measurement.

    The first outcome has probability (1 + (D-1) h)/D, so h is estimated by
    inverting that line, clamped to [0, 1], and then theta recovered from h:
    h = theta**n (O, E), theta**(2n) (B), eta*theta (E_eta).
    """
    counts = np.asarray(counts)
    if counts.shape != (2,):
        raise InvalidInput("expected counts of a two-outcome measurement")
    total = counts.sum()
    if total <= 0:
        raise InvalidInput("no counts")
    D = spec.dim
    p0 = counts[0] / total
    h = min(max((D * p0 - 1) / (D - 1), 0.0), 1.0)
    if spec.kind == "E_eta":
        return min(h / spec.eta, 1.0) if spec.eta > 0 else 0.0
    if spec.kind == "Partial":
        raise UnsupportedCombination("MLE is only defined for the two-outcome schemes")
    power = 2 * spec.n if spec.kind == "B" else spec.n
    return float(h ** (1.0 / power))


def crb_experiment(
    spec: SchemeSpec, theta: float, n_shots: int, n_trials: int, seed: int
) -> CrbReport:
    """Empirical MSE of the MLE against the Cramer-Rao bound 1/(n_shots * J_shot).

    Trial ``k`` draws from its own generator seeded with ``seed + k``.
    """
    theta = check_theta(theta)
    if n_shots < 1 or n_trials < 1:
        raise InvalidInput("n_shots and n_trials must be positive")
    point = qfi_scheme(spec, theta)
    j_shot = point.j_per_shot
    if j_shot <= 0:
        raise InvalidInput("family carries no information at this theta")
    povm = optimal_projectors(spec)
    rho = family(spec, domain=(0.0, 1.0)).rho_at(theta)
    est = np.array(
        [mle_theta(sample_outcomes(povm, rho, n_shots, seed + k), spec) for k in range(n_trials)]
    )
    err = est - theta
    mse = float(np.mean(err**2))
    crb = 1.0 / (n_shots * j_shot)
    return CrbReport(theta, n_shots, n_trials, mse, crb, mse / crb, float(err.mean()))
