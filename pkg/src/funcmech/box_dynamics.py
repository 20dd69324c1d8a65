"""Free classical particle on [0, 1] with elastically reflecting ends.

The density is the free solution summed over mirror images,

    rho(q, p, t) = sum_n [rho0(q - p t/m + 2n, p) + rho0(-q + p t/m + 2n, -p)],

truncated to ``n = -N..N``.  Integrating an image term over ``p`` gives the
free coordinate marginal evaluated at ``q + 2n`` or ``-q + 2n``, so the
coordinate marginal is a wrapped Gaussian; integrating over ``q`` in [0, 1]
gives error functions.  No numerical quadrature is involved in either.

Image sums run from the largest ``|n|`` inward so that the small tail terms
are accumulated first.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.special import erf

from .errors import ValidationError
from .phase_density import SQRT_PI, GaussianState, Marginal, MarginalKind, coordinate_squared_width, density_at

MOMENTUM_SPAN = 6.0


def required_truncation(gaussian: GaussianState, m: float, t: float) -> int:
    """Smallest image count ``N`` whose neglected tail mass is below 1e-12."""
    if not t >= 0:
        raise ValidationError(f"t must be non-negative, got {t}", key="t")
    reach = abs(gaussian.q0) + (abs(gaussian.p0) + MOMENTUM_SPAN * gaussian.b) * t / m
    return math.ceil(reach / 2) + 2


@dataclass(frozen=True)
class BoxState:
    gaussian: GaussianState
    m: float = 1.0
    truncation: int = 3

    def __post_init__(self):
        if not 0 < self.gaussian.q0 < 1:
            raise ValidationError(f"q0 must lie inside (0, 1), got {self.gaussian.q0}", key="q0")
        if not (math.isfinite(self.m) and self.m > 0):
            raise ValidationError(f"mass must be positive, got {self.m}", key="mass")
        if int(self.truncation) != self.truncation or self.truncation < 1:
            raise ValidationError(f"truncation must be an integer >= 1, got {self.truncation}", key="trunc")

    @classmethod
    def for_time(cls, gaussian: GaussianState, m: float, t: float) -> "BoxState":
        """State with the truncation needed up to time ``t``."""
        return cls(gaussian, m, required_truncation(gaussian, m, t))

    def check_time(self, t: float) -> None:
        need = required_truncation(self.gaussian, self.m, t)
        if self.truncation < need:
            raise ValidationError(
                f"truncation {self.truncation} too small for t={t}; need N >= {need}", key="trunc"
            )

    def _images(self):
        n = self.truncation
        return sorted(range(-n, n + 1), key=lambda k: (-abs(k), k))


def _check_unit(q) -> np.ndarray:
    q = np.asarray(q, dtype=float)
    if np.any(q < 0) or np.any(q > 1) or not np.all(np.isfinite(q)):
        raise ValidationError("q must lie in [0, 1]", key="q")
    return q


def box_density(state: BoxState, q, p, t: float):
    """Truncated image series for ``rho(q, p, t)``; broadcasts over ``q`` and ``p``."""
    state.check_time(t)
    q = _check_unit(q)
    p = np.asarray(p, dtype=float)
    g = state.gaussian
    shift = p * t / state.m
    out = np.zeros(np.broadcast(q, p).shape)
    for n in state._images():
        out = out + density_at(g, q - shift + 2 * n, p) + density_at(g, -q + shift + 2 * n, -p)
    return out


def _free_marginal(state: BoxState, t: float) -> Marginal:
    g = state.gaussian
    return Marginal(
        MarginalKind.COORDINATE,
        center=g.q0 + g.p0 * t / state.m,
        width=math.sqrt(coordinate_squared_width(g, state.m, t)),
    )


def box_coordinate_marginal(state: BoxState, t: float, q):
    """``rho_c(q, t) = int rho dp``, each image integrated over ``p`` exactly."""
    state.check_time(t)
    q = _check_unit(q)
    free = _free_marginal(state, t)
    out = np.zeros_like(q)
    for n in state._images():
        out = out + free(q + 2 * n) + free(-q + 2 * n)
    return out


def box_coordinate_marginal_theta(state: BoxState, t: float, q, terms: int | None = None):
    """The same marginal from its Fourier (theta-function) series.

    Poisson summation of the wrapped Gaussian gives

        rho_c(q, t) = 1 + 2 sum_{k>=1} exp(-(pi k w / 2)**2) cos(pi k q) cos(pi k c)

    with ``w**2 = a**2 + b**2 t**2 / m**2`` and ``c = q0 + p0 t / m``.  It
    converges fastest exactly where the image sum is slowest, so the two are
    independent checks of each other.
    """
    q = _check_unit(q)
    free = _free_marginal(state, t)
    w, c = free.width, free.center
    if terms is None:
        # exp(-(pi k w / 2)**2) < 1e-18 beyond this k
        terms = max(1, math.ceil(2 * math.sqrt(18 * math.log(10)) / (math.pi * w)) + 1)
    k = np.arange(terms, 0, -1, dtype=float)
    coef = 2.0 * np.exp(-((math.pi * k * w / 2) ** 2)) * np.cos(math.pi * k * c)
    return 1.0 + np.cos(math.pi * np.multiply.outer(q, k)) @ coef


def box_momentum_marginal(state: BoxState, t: float, p):
    """``rho_m(p, t) = int_0^1 rho(q, p, t) dq`` in closed form."""
    state.check_time(t)
    p = np.asarray(p, dtype=float)
    g = state.gaussian
    shift = p * t / state.m
    direct = np.exp(-(((p - g.p0) / g.b) ** 2)) / (SQRT_PI * g.b)
    mirror = np.exp(-(((p + g.p0) / g.b) ** 2)) / (SQRT_PI * g.b)
    frac_d = np.zeros_like(p)
    frac_m = np.zeros_like(p)
    for n in state._images():
        # direct image: u = q + 2n - p t/m over q in [0, 1]
        lo = 2 * n - shift - g.q0
        frac_d = frac_d + 0.5 * (erf((lo + 1) / g.a) - erf(lo / g.a))
        # mirrored image: u = -q + 2n + p t/m over q in [0, 1]
        hi = 2 * n + shift - g.q0
        frac_m = frac_m + 0.5 * (erf(hi / g.a) - erf((hi - 1) / g.a))
    return direct * frac_d + mirror * frac_m


def box_abs_momentum_marginal(state: BoxState, t: float, p):
    """Distribution of ``|p|``: ``rho_m(p, t) + rho_m(-p, t)`` for ``p > 0``."""
    p = np.asarray(p, dtype=float)
    if np.any(p <= 0):
        raise ValidationError("p must be positive for the |p| distribution", key="p")
    return box_momentum_marginal(state, t, p) + box_momentum_marginal(state, t, -p)


@dataclass(frozen=True)
class LimitingDistributions:
    """Large-time limits: uniform in ``q`` and a two-Gaussian law in ``|p|``."""

    momentum_abs_limit: Marginal

    @staticmethod
    def coordinate_limit(q):
        return np.ones_like(_check_unit(q))


def limiting_distributions(state: BoxState) -> LimitingDistributions:
    g = state.gaussian
    return LimitingDistributions(Marginal(MarginalKind.ABSOLUTE_MOMENTUM, center=g.p0, width=g.b))


def unit_grid(n: int = 512) -> np.ndarray:
    return np.linspace(0.0, 1.0, n)


def sup_deviation_uniform(state: BoxState, t: float, n: int = 512) -> float:
    """``max_q |rho_c(q, t) - 1|`` on an ``n``-point grid of [0, 1]."""
    return float(np.max(np.abs(box_coordinate_marginal(state, t, unit_grid(n)) - 1.0)))


def maxwell_distance(state: BoxState, t: float, p_max: float | None = None, n: int = 512) -> float:
    """``max |rho_a(p, t) - limit(p)|`` over ``n`` points of ``(0, p_max]``."""
    if p_max is None:
        p_max = 5.0 * state.gaussian.b
    p = np.linspace(p_max / n, p_max, n)
    limit = limiting_distributions(state).momentum_abs_limit(p)
    return float(np.max(np.abs(box_abs_momentum_marginal(state, t, p) - limit)))
