"""Closed-form quantum Fisher information for the depolarizing channel.

All pure-probe schemes reduce to an output ``(1-h)/D I + h |s><s|`` on a
D-dimensional space, whose QFI is ``h'^2 / ((1-h)(h + 1/(D-1)))``. The
per-scheme functions below spell out the resulting formulas explicitly, in
information per use of the unknown channel.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.optimize import bisect

from .channels import SchemeSpec, check_theta
from .errors import (
    DegenerateDenominator,
    Divergent,
    InvalidInput,
    NoRootFound,
    UnsupportedCombination,
    ZeroEigenvalue,
)

BISECT_BRACKET = (0.3, 0.99)


@dataclass(frozen=True)
class QfiPoint:
    theta: float
    d: int
    scheme: SchemeSpec
    j_per_use: float
    channel_uses_per_shot: int

    @property
    def j_per_shot(self) -> float:
        return self.j_per_use * self.channel_uses_per_shot


def qfi_quasiclassical(lams, dlams) -> float:
    """Fisher information sum(dl_i^2 / l_i) of a theta-dependent spectrum.

    Zero eigenvalues are skipped when their derivative is zero as well.
    """
    lams = np.asarray(lams, dtype=float)
    dlams = np.asarray(dlams, dtype=float)
    if lams.shape != dlams.shape:
        raise InvalidInput("eigenvalue and derivative vectors differ in length")
    if abs(lams.sum() - 1) > 1e-10:
        raise InvalidInput(f"eigenvalues sum to {lams.sum()!r}, expected 1")
    zero = lams <= 0
    if np.any(zero & (dlams != 0)):
        raise ZeroEigenvalue("vanishing eigenvalue with nonzero derivative")
    keep = ~zero
    return float(np.sum(dlams[keep] ** 2 / lams[keep]))


def qfi_h(h: float, dh: float, theta: float, d: int) -> float:
    """QFI of a d-dimensional depolarizing-type family with survival h(theta).

    ``theta`` does not enter the formula; it is accepted so call sites read
    like ``J(theta)`` and is range-checked.
    """
    check_theta(theta)
    if not (0.0 <= h <= 1.0):
        raise InvalidInput(f"h={h} outside [0, 1]")
    if d < 2:
        raise InvalidInput("d must be >= 2")
    if h == 1.0:
        raise Divergent("QFI diverges at h = 1")
    return dh * dh / ((1 - h) * (h + 1 / (d - 1)))


def j_o(theta: float, d: int, n: int = 1) -> float:
    return n * theta ** (2 * (n - 1)) / ((1 - theta**n) * (theta**n + 1 / (d - 1)))


def j_e(theta: float, d: int, n: int = 1) -> float:
    return n * theta ** (2 * (n - 1)) / ((1 - theta**n) * (theta**n + 1 / (d * d - 1)))


def j_b(theta: float, d: int, n: int = 1) -> float:
    return (
        2 * n * theta ** (2 * (2 * n - 1))
        / ((1 - theta ** (2 * n)) * (theta ** (2 * n) + 1 / (d * d - 1)))
    )


def j_e_eta(theta: float, d: int, eta: float) -> float:
    return eta**2 / ((1 - eta * theta) * (eta * theta + 1 / (d * d - 1)))


def qfi_scheme(spec: SchemeSpec, theta: float) -> QfiPoint:
    """QFI per channel use of ``spec`` at ``theta``."""
    theta = check_theta(theta)
    d, n = spec.d, spec.n
    if spec.kind == "Partial":
        raise UnsupportedCombination("use partial.qfi_partial for partially entangled probes")
    if spec.kind == "E_eta":
        if spec.eta * theta == 1.0:
            raise Divergent("QFI diverges at eta*theta = 1")
        j = j_e_eta(theta, d, spec.eta)
    else:
        if theta == 1.0:
            raise Divergent("QFI diverges at theta = 1")
        j = {"O": j_o, "E": j_e, "B": j_b}[spec.kind](theta, d, n)
    return QfiPoint(theta, d, spec, float(j), spec.channel_uses)


def gain_e_over_o(theta: float, d: int) -> float:
    """J_E(theta) - J_O(theta), the QFI gained by a maximally entangled ancilla.

    Equal to d(d-1) / ((1-theta)(1-theta+d theta)(1-theta+d^2 theta)); it grows
    without bound as theta -> 1.
    """
    theta = check_theta(theta)
    if theta == 1.0:
        raise Divergent("gain diverges at theta = 1")
    return d * (d - 1) / ((1 - theta) * (1 - theta + d * theta) * (1 - theta + d * d * theta))


def g_eta(eta: float, d: int) -> float:
    """Crossing point above which the depolarized-ancilla scheme loses to scheme O.

    For theta > g_eta(eta, d) the ancilla-depolarized scheme carries less
    information per use than the unentangled probe.
    """
    if not (0.0 < eta <= 1.0):
        raise InvalidInput(f"eta={eta} outside (0, 1]")
    denom = eta * (1 - eta) * (d * d - 2) + eta * eta * d
    if denom <= 0:
        raise DegenerateDenominator(f"denominator {denom} is not positive")
    return (eta * eta * (d + 1) - 1) / denom


def threshold_b_vs_o(d: int, xtol: float = 1e-12) -> float:
    """theta* where schemes B and O carry equal information per use.

    Above theta* the entangled pair wins; below it the unentangled probe does.
    """
    if d < 2:
        raise InvalidInput("d must be >= 2")

    def diff(t):
        return j_b(t, d) - j_o(t, d)

    lo, hi = BISECT_BRACKET
    if diff(lo) * diff(hi) >= 0:
        raise NoRootFound(f"no sign change of J_B - J_O on [{lo}, {hi}] for d={d}")
    return float(bisect(diff, lo, hi, xtol=xtol, maxiter=200))
