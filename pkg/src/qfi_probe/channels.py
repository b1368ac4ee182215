"""Probe states and parametric output families of the depolarizing channel.

Every scheme produces an output of the form ``(1 - h)/D * X + h * sigma`` for
some known operator ``X`` and function ``h(theta)``, so the theta-derivative is
available in closed form and no finite differencing is needed.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np

from .errors import InvalidInput, NotNormalized, ThetaOutOfRange, UnsupportedCombination
from .linalg import check_hermitian

KINDS = ("O", "E", "B", "E_eta", "Partial")
DEFAULT_DOMAIN = (0.01, 0.99)


def check_theta(theta: float, lo: float = 0.0, hi: float = 1.0) -> float:
    theta = float(theta)
    if not (lo <= theta <= hi) or not np.isfinite(theta):
        raise ThetaOutOfRange(f"theta={theta} outside [{lo}, {hi}]")
    return theta


def check_density(rho, tol: float = 1e-10) -> np.ndarray:
    """Validate a density matrix: Hermitian, unit trace, PSD (all to ``tol``)."""
    rho = check_hermitian(rho, tol)
    tr = np.trace(rho)
    if abs(tr - 1) > tol:
        raise InvalidInput(f"trace {tr.real:.12g} != 1")
    if np.linalg.eigvalsh((rho + rho.conj().T) / 2)[0] < -tol:
        raise InvalidInput("matrix is not positive semi-definite")
    return rho


def schmidt_vector(psi, tol: float = 1e-12) -> np.ndarray:
    """Validate Schmidt coefficients: nonnegative reals with unit 2-norm."""
    psi = np.asarray(psi, dtype=float).ravel()
    if psi.size < 2:
        raise InvalidInput("need at least two Schmidt coefficients")
    if np.any(psi < 0) or not np.all(np.isfinite(psi)):
        raise NotNormalized("Schmidt coefficients must be finite and nonnegative")
    norm2 = float(psi @ psi)
    if abs(norm2 - 1) > tol:
        raise NotNormalized(f"sum of squared coefficients is {norm2!r}, expected 1")
    return psi


def depolarize(sigma, theta: float, d: Optional[int] = None) -> np.ndarray:
    """Apply the d-dimensional depolarizing channel with survival probability ``theta``."""
    theta = check_theta(theta)
    sigma = check_density(sigma)
    if d is None:
        d = sigma.shape[0]
    elif d != sigma.shape[0]:
        raise InvalidInput(f"d={d} does not match state dimension {sigma.shape[0]}")
    return (1 - theta) / d * np.eye(d) + theta * sigma


def basis_state(d: int, i: int = 0) -> np.ndarray:
    rho = np.zeros((d, d), dtype=complex)
    rho[i, i] = 1
    return rho


def _pure(vec: np.ndarray) -> np.ndarray:
    vec = np.asarray(vec, dtype=complex)
    return np.outer(vec, vec.conj())


def max_entangled_state(d: int) -> np.ndarray:
    """|mu><mu| with |mu> = sum_i |ii>/sqrt(d) on C^d (x) C^d."""
    if d < 2:
        raise InvalidInput("d must be >= 2")
    return schmidt_state(np.full(d, 1 / np.sqrt(d)))


def schmidt_state(psi) -> np.ndarray:
    """|Psi><Psi| with |Psi> = sum_i psi_i |ii>."""
    psi = schmidt_vector(psi)
    d = psi.size
    vec = np.zeros(d * d)
    vec[np.arange(d) * (d + 1)] = psi
    return _pure(vec)


def partial_trace_first(rho, d: int) -> np.ndarray:
    """Trace out the first factor of a (d*d)-dimensional operator."""
    return np.einsum("iaib->ab", np.asarray(rho).reshape(d, d, d, d))


def partial_trace_second(rho, d: int) -> np.ndarray:
    return np.einsum("aibi->ab", np.asarray(rho).reshape(d, d, d, d))


@dataclass(frozen=True)
class SchemeSpec:
    """Which probing scheme, in what dimension, with how many channel passes.

    ``kind`` is one of ``O`` (unentangled probe), ``E`` (probe maximally
    entangled with a shielded ancilla), ``B`` (both halves of a maximally
    entangled pair pass the channel), ``E_eta`` (ancilla itself depolarized
    with survival ``eta``) or ``Partial`` (Schmidt coefficients ``psi``).
    """

    kind: str
    d: int
    n: int = 1
    eta: Optional[float] = None
    psi: Optional[tuple] = None

    def __post_init__(self):
        if self.kind not in KINDS:
            raise InvalidInput(f"unknown scheme kind {self.kind!r}; expected one of {KINDS}")
        if int(self.d) != self.d or self.d < 2:
            raise InvalidInput(f"d must be an integer >= 2, got {self.d}")
        if int(self.n) != self.n or self.n < 1:
            raise InvalidInput(f"n must be an integer >= 1, got {self.n}")
        if self.kind == "E_eta":
            if self.eta is None or not (0.0 <= self.eta <= 1.0):
                raise InvalidInput(f"E_eta needs eta in [0, 1], got {self.eta}")
        elif self.eta is not None:
            raise InvalidInput(f"eta is only meaningful for E_eta, not {self.kind}")
        if self.kind == "Partial":
            if self.psi is None:
                raise InvalidInput("Partial scheme needs Schmidt coefficients psi")
            psi = schmidt_vector(self.psi)
            if psi.size != self.d:
                raise InvalidInput(f"psi has {psi.size} entries but d={self.d}")
            object.__setattr__(self, "psi", tuple(float(x) for x in psi))
        elif self.psi is not None:
            raise InvalidInput(f"psi is only meaningful for Partial, not {self.kind}")
        if self.kind in ("E_eta", "Partial") and self.n != 1:
            raise UnsupportedCombination(f"scheme {self.kind} is only defined for n=1")

    @property
    def dim(self) -> int:
        """Dimension of the measured output system."""
        return self.d if self.kind == "O" else self.d * self.d

    @property
    def channel_uses(self) -> int:
        """Uses of the unknown channel consumed by one measured shot."""
        if self.kind == "B":
            return 2 * self.n
        return self.n

    def label(self) -> str:
        return self.kind


@dataclass(frozen=True)
class ParamFamily:
    """theta -> rho(theta) together with its analytic derivative."""

    rho_at: Callable[[float], np.ndarray]
    drho_at: Callable[[float], np.ndarray]
    dim: int
    theta_domain: tuple = field(default=DEFAULT_DOMAIN)


def _affine_family(sigma, mixed, h, dh, domain) -> ParamFamily:
    # rho = (1-h) * mixed + h * sigma, mixed has unit trace
    sigma = np.asarray(sigma, dtype=complex)
    mixed = np.asarray(mixed, dtype=complex)
    diff = sigma - mixed

    def rho_at(theta):
        hv = h(check_theta(theta))
        return (1 - hv) * mixed + hv * sigma

    def drho_at(theta):
        return dh(check_theta(theta)) * diff

    return ParamFamily(rho_at, drho_at, sigma.shape[0], tuple(domain))


def family(spec: SchemeSpec, domain=DEFAULT_DOMAIN) -> ParamFamily:
    """Exact channel-output family for ``spec``.

    Re-circulation uses the composition rule that n passes of the channel with
    parameter theta equal one pass with parameter theta**n.
    """
    d, n = spec.d, spec.n
    lo, hi = domain
    if not (0.0 <= lo < hi <= 1.0):
        raise InvalidInput(f"bad theta domain {domain}")
    if spec.kind == "O":
        sigma = basis_state(d)
        mixed = np.eye(d) / d
        h, dh = (lambda t: t**n), (lambda t: n * t ** (n - 1))
    elif spec.kind == "E":
        sigma = max_entangled_state(d)
        mixed = np.eye(d * d) / (d * d)
        h, dh = (lambda t: t**n), (lambda t: n * t ** (n - 1))
    elif spec.kind == "B":
        sigma = max_entangled_state(d)
        mixed = np.eye(d * d) / (d * d)
        h, dh = (lambda t: t ** (2 * n)), (lambda t: 2 * n * t ** (2 * n - 1))
    elif spec.kind == "E_eta":
        eta = spec.eta
        sigma = max_entangled_state(d)
        mixed = np.eye(d * d) / (d * d)
        h, dh = (lambda t: eta * t), (lambda t: eta)
    else:
        psi = np.asarray(spec.psi)
        sigma = schmidt_state(psi)
        # channel on the first factor: mixed part is I/d (x) D
        mixed = np.kron(np.eye(d) / d, np.diag(psi**2))
        h, dh = (lambda t: t), (lambda t: 1.0)
    return _affine_family(sigma, mixed, h, dh, (lo, hi))


def input_state(spec: SchemeSpec) -> np.ndarray:
    """The pure probe state fed into the channel(s) for ``spec``."""
    if spec.kind == "O":
        return basis_state(spec.d)
    if spec.kind == "Partial":
        return schmidt_state(spec.psi)
    return max_entangled_state(spec.d)
