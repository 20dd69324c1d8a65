"""Gaussian phase-space densities and the closed forms of free motion.

Width convention
----------------
``a`` and ``b`` are the widths that appear in the exponent,

    rho0(q, p) = exp(-(q - q0)**2 / a**2) * exp(-(p - p0)**2 / b**2) / (pi * a * b),

and are NOT standard deviations.  The variances are ``a**2 / 2`` and
``b**2 / 2``.  Every function in this package uses the same convention,
including the quantum packet widths in :mod:`funcmech.quantum_bridge`.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass

import numpy as np
from scipy.special import erf, roots_legendre

from .errors import ValidationError

SQRT_PI = math.sqrt(math.pi)


def _check_positive(name: str, value: float) -> None:
    if not (math.isfinite(value) and value > 0):
        raise ValidationError(f"{name} must be a finite positive number, got {value!r}", key=name)


def _check_finite(name: str, value: float) -> None:
    if not math.isfinite(value):
        raise ValidationError(f"{name} must be finite, got {value!r}", key=name)


@dataclass(frozen=True)
class GaussianState:
    """Parameters of the Gaussian density centred at ``(q0, p0)``."""

    q0: float = 0.0
    p0: float = 0.0
    a: float = 1.0
    b: float = 1.0

    def __post_init__(self):
        _check_finite("q0", self.q0)
        _check_finite("p0", self.p0)
        _check_positive("a", self.a)
        _check_positive("b", self.b)

    @property
    def sigma_q(self) -> float:
        return self.a / math.sqrt(2.0)

    @property
    def sigma_p(self) -> float:
        return self.b / math.sqrt(2.0)

    def __call__(self, q, p):
        return density_at(self, q, p)


class MarginalKind(str, enum.Enum):
    COORDINATE = "coordinate"
    MOMENTUM = "momentum"
    ABSOLUTE_MOMENTUM = "absolute_momentum"


@dataclass(frozen=True)
class Marginal:
    """One-dimensional marginal held as a closed-form Gaussian descriptor.

    For ``COORDINATE`` and ``MOMENTUM`` this is
    ``exp(-(x - center)**2 / width**2) / (sqrt(pi) * width)`` on the real
    line.  ``ABSOLUTE_MOMENTUM`` is the folded version on ``x > 0``: the sum
    of the Gaussians centred at ``+center`` and ``-center``.
    """

    kind: MarginalKind
    center: float
    width: float

    def __post_init__(self):
        _check_finite("center", self.center)
        _check_positive("width", self.width)

    def __call__(self, x):
        x = np.asarray(x, dtype=float)
        w = self.width
        val = np.exp(-((x - self.center) / w) ** 2) / (SQRT_PI * w)
        if self.kind is MarginalKind.ABSOLUTE_MOMENTUM:
            val = val + np.exp(-((x + self.center) / w) ** 2) / (SQRT_PI * w)
            val = np.where(x >= 0, val, 0.0)
        return val

    @property
    def squared_width(self) -> float:
        return self.width**2

    @property
    def mean(self) -> float:
        if self.kind is MarginalKind.ABSOLUTE_MOMENTUM:
            # E|X| for X ~ N(center, width**2 / 2)
            c, w = self.center, self.width
            return w / SQRT_PI * math.exp(-(c / w) ** 2) + c * math.erf(c / w)
        return self.center

    @property
    def variance(self) -> float:
        if self.kind is MarginalKind.ABSOLUTE_MOMENTUM:
            second = self.center**2 + self.width**2 / 2
            return second - self.mean**2
        return self.width**2 / 2

    def mass(self, lo: float = -np.inf, hi: float = np.inf) -> float:
        """Probability of the interval ``[lo, hi]`` (closed form)."""
        c, w = self.center, self.width

        def cdf(x, shift):
            return 0.5 * (1.0 + erf((x - shift) / w))

        if self.kind is MarginalKind.ABSOLUTE_MOMENTUM:
            lo = max(lo, 0.0)
            if hi <= lo:
                return 0.0
            return float(cdf(hi, c) - cdf(lo, c) + cdf(hi, -c) - cdf(lo, -c))
        return float(cdf(hi, c) - cdf(lo, c))


@dataclass(frozen=True)
class MomentReport:
    t: float
    mean_q: float
    mean_p: float
    var_q: float
    var_p: float
    normalization: float = 1.0


def density_at(state: GaussianState, q, p):
    """Evaluate the Gaussian density at ``(q, p)``; broadcasts over arrays."""
    q = np.asarray(q, dtype=float)
    p = np.asarray(p, dtype=float)
    return (
        np.exp(-((q - state.q0) / state.a) ** 2 - ((p - state.p0) / state.b) ** 2)
        / (math.pi * state.a * state.b)
    )


def free_evolved_density(state: GaussianState, m: float, t: float, q, p):
    """Exact free-motion solution ``rho0(q - p t / m, p)``."""
    _check_positive("mass", m)
    p = np.asarray(p, dtype=float)
    return density_at(state, np.asarray(q, dtype=float) - p * t / m, p)


def coordinate_squared_width(state: GaussianState, m: float, t: float) -> float:
    """``a**2 + b**2 t**2 / m**2``, the exponent-scale width of the q-marginal."""
    return state.a**2 + (state.b * t / m) ** 2


def free_coordinate_marginal(state: GaussianState, m: float, t: float) -> Marginal:
    _check_positive("mass", m)
    return Marginal(
        MarginalKind.COORDINATE,
        center=state.q0 + state.p0 * t / m,
        width=math.sqrt(coordinate_squared_width(state, m, t)),
    )


def free_momentum_marginal(state: GaussianState) -> Marginal:
    """Momentum marginal; free motion leaves it unchanged for all ``t``."""
    return Marginal(MarginalKind.MOMENTUM, center=state.p0, width=state.b)


def free_moments(state: GaussianState, m: float, t: float) -> MomentReport:
    _check_positive("mass", m)
    return MomentReport(
        t=t,
        mean_q=state.q0 + state.p0 * t / m,
        mean_p=state.p0,
        var_q=coordinate_squared_width(state, m, t) / 2,
        var_p=state.b**2 / 2,
        normalization=1.0,
    )


def integration_box(state: GaussianState, m: float, t: float, span: float = 8.0):
    """Rectangle ``center +- span`` standard deviations of the evolved density.

    The q-direction uses the standard deviation of the time-dependent
    coordinate marginal, so the sheared density stays inside the box.
    """
    mom = free_moments(state, m, t)
    sq, sp = math.sqrt(mom.var_q), math.sqrt(mom.var_p)
    return (
        (mom.mean_q - span * sq, mom.mean_q + span * sq),
        (mom.mean_p - span * sp, mom.mean_p + span * sp),
    )


def _legendre_rule(lo: float, hi: float, n: int):
    x, w = roots_legendre(n)
    half = 0.5 * (hi - lo)
    return lo + half * (x + 1.0), half * w


def _nodes_for(length: float, feature: float, minimum: int) -> int:
    # Gauss-Legendre mid-interval spacing is ~ pi * L / (2 n); keep it below feature / 2.
    return max(minimum, int(math.ceil(math.pi * length / feature)))


def _free_grid(state: GaussianState, m: float, t: float, nodes: int, span: float):
    (qlo, qhi), (plo, phi) = integration_box(state, m, t, span)
    nq = _nodes_for(qhi - qlo, state.a, nodes)
    p_feature = state.b if t == 0 else min(state.b, state.a * m / abs(t))
    np_ = _nodes_for(phi - plo, p_feature, nodes)
    return _legendre_rule(qlo, qhi, nq), _legendre_rule(plo, phi, np_)


def numeric_moments(
    state: GaussianState,
    m: float,
    t: float,
    nodes: int = 256,
    span: float = 8.0,
) -> MomentReport:
    """Moments of the free density by brute-force 2-D quadrature.

    The density is evaluated on a tensor Gauss-Legendre grid over
    :func:`integration_box`, marginalised over ``p`` and then integrated in
    ``q``.  It does not use any of the closed forms above and serves as
    their oracle.  ``nodes`` is a floor; the grid is refined automatically
    so that the sheared ridge of width ``a`` (in q) and ``a m / t`` (in p)
    is resolved.
    """
    _check_positive("mass", m)
    (qs, wq), (ps, wp) = _free_grid(state, m, t, nodes, span)
    rho_q = np.empty_like(qs)
    rho_p = np.zeros_like(ps)
    chunk = max(1, 4_000_000 // ps.size)
    for i in range(0, qs.size, chunk):
        block = free_evolved_density(state, m, t, qs[i : i + chunk, None], ps[None, :])
        rho_q[i : i + chunk] = block @ wp
        rho_p += wq[i : i + chunk] @ block
    norm = float(wq @ rho_q)
    mean_q = float(wq @ (qs * rho_q)) / norm
    mean_p = float(wp @ (ps * rho_p)) / norm
    var_q = float(wq @ ((qs - mean_q) ** 2 * rho_q)) / norm
    var_p = float(wp @ ((ps - mean_p) ** 2 * rho_p)) / norm
    return MomentReport(t=t, mean_q=mean_q, mean_p=mean_p, var_q=var_q, var_p=var_p, normalization=norm)


def numeric_momentum_marginal(state: GaussianState, m: float, t: float, p, nodes: int = 256, span: float = 8.0):
    """``int rho(q, p, t) dq`` by quadrature, for checking time invariance."""
    _check_positive("mass", m)
    (qs, wq), _ = _free_grid(state, m, t, nodes, span)
    p = np.atleast_1d(np.asarray(p, dtype=float))
    return wq @ free_evolved_density(state, m, t, qs[:, None], p[None, :])
