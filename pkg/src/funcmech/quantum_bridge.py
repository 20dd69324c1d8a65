"""Quantum counterparts of the classical Gaussian dynamics.

All quantum solutions here are closed-form free Gaussian packets and their
image sums.  The packet width ``a`` uses the same exponent-scale convention
as :class:`~funcmech.phase_density.GaussianState`:
``|psi(x, 0)|**2 = exp(-(x - x0)**2 / a**2) / (sqrt(pi) a)``.  With
``b = hbar / a`` the position density, and the Wigner function, coincide
with the classical ones for all times.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np
from scipy import integrate
from scipy.special import roots_legendre

from .box_dynamics import BoxState, box_coordinate_marginal
from .errors import ValidationError
from .phase_density import GaussianState, free_coordinate_marginal, free_evolved_density

AMPLITUDE_SPAN = 8.0


@dataclass(frozen=True)
class QuantumPacket:
    x0: float = 0.0
    p0: float = 0.0
    a: float = 1.0
    hbar: float = 1.0
    m: float = 1.0

    def __post_init__(self):
        for name in ("x0", "p0"):
            if not math.isfinite(getattr(self, name)):
                raise ValidationError(f"{name} must be finite", key=name)
        for name in ("a", "hbar", "m"):
            v = getattr(self, name)
            if not (math.isfinite(v) and v > 0):
                raise ValidationError(f"{name} must be positive, got {v}", key="mass" if name == "m" else name)

    @classmethod
    def matching(cls, state: GaussianState, m: float = 1.0, hbar: float | None = None) -> "QuantumPacket":
        """Packet with the same centre and position width; ``hbar`` defaults to ``a * b``."""
        return cls(state.q0, state.p0, state.a, state.a * state.b if hbar is None else hbar, m)

    def classical_state(self) -> GaussianState:
        """Classical Gaussian satisfying ``a * b = hbar``."""
        return GaussianState(self.x0, self.p0, self.a, self.hbar / self.a)

    def squared_width(self, t: float) -> float:
        return self.a**2 + (self.hbar * t / (self.a * self.m)) ** 2


def free_packet_wavefunction(packet: QuantumPacket, x, t: float):
    """Free Gaussian solution ``psi(x, t)`` of the Schrodinger equation (complex)."""
    x = np.asarray(x, dtype=float)
    a, hb, m = packet.a, packet.hbar, packet.m
    c = 1.0 + 1j * hb * t / (m * a * a)
    xc = x - packet.x0 - packet.p0 * t / m
    phase = packet.p0 * (x - packet.x0) / hb - packet.p0**2 * t / (2 * m * hb)
    return (math.pi * a * a) ** -0.25 / np.sqrt(c) * np.exp(-(xc**2) / (2 * a * a * c) + 1j * phase)


def free_packet_density(packet: QuantumPacket, x, t: float):
    """``|psi(x, t)|**2`` in closed form: Gaussian with squared width ``a**2 + hbar**2 t**2 / (a m)**2``."""
    x = np.asarray(x, dtype=float)
    w2 = packet.squared_width(t)
    return np.exp(-((x - packet.x0 - packet.p0 * t / packet.m) ** 2) / w2) / math.sqrt(math.pi * w2)


@dataclass(frozen=True)
class CoincidenceResult:
    max_difference: float
    condition_holds: bool
    violation: float


def coincidence_check(
    gauss: GaussianState,
    m: float,
    hbar: float,
    t_grid: Sequence[float],
    x_grid: Sequence[float] | None = None,
    rel_tol: float = 1e-12,
) -> CoincidenceResult:
    """Largest gap between the quantum position density and the classical q-marginal.

    ``x_grid`` defaults to 256 points spanning 8 widths at the largest time.
    The gap is always reported; ``condition_holds`` says whether
    ``a**2 b**2 = hbar**2`` within ``rel_tol``.
    """
    packet = QuantumPacket(gauss.q0, gauss.p0, gauss.a, hbar, m)
    violation = abs(gauss.a**2 * gauss.b**2 - hbar**2)
    holds = violation <= rel_tol * hbar**2
    worst = 0.0
    for t in t_grid:
        if x_grid is None:
            marg = free_coordinate_marginal(gauss, m, t)
            w = max(marg.width, math.sqrt(packet.squared_width(t)))
            xs = np.linspace(marg.center - 8 * w, marg.center + 8 * w, 256)
        else:
            xs = np.asarray(x_grid, dtype=float)
        diff = np.abs(free_packet_density(packet, xs, t) - free_coordinate_marginal(gauss, m, t)(xs))
        worst = max(worst, float(np.max(diff)))
    return CoincidenceResult(worst, holds, violation)


def wigner_gaussian(packet: QuantumPacket, q, p, t: float):
    """Closed-form Wigner function of the free packet.

    ``W = exp(-(q - x0 - p t/m)**2 / a**2 - a**2 (p - p0)**2 / hbar**2) / (pi hbar)``,
    which is the classical density with ``b = hbar / a`` transported freely.
    """
    q = np.asarray(q, dtype=float)
    p = np.asarray(p, dtype=float)
    a, hb = packet.a, packet.hbar
    return np.exp(-(((q - packet.x0 - p * t / packet.m) / a) ** 2) - (a * (p - packet.p0) / hb) ** 2) / (math.pi * hb)


def numerical_wigner(
    wavefunction: Callable[[np.ndarray], np.ndarray],
    x: float,
    p: float,
    hbar: float,
    half_width: float,
) -> float:
    """``(1 / pi hbar) int psi*(x + y) psi(x - y) exp(2 i p y / hbar) dy`` by adaptive quadrature.

    ``half_width`` bounds the ``y`` range; the integrand must be negligible
    beyond it.
    """

    def integrand(y):
        v = np.conj(wavefunction(np.array([x + y]))) * wavefunction(np.array([x - y])) * np.exp(2j * p * y / hbar)
        return float(v.real[0])

    # the imaginary part integrates to zero by symmetry of the kernel
    re, _ = integrate.quad(integrand, -half_width, half_width, epsabs=1e-14, epsrel=1e-12, limit=400)
    return re / (math.pi * hbar)


def required_box_truncation(packet: QuantumPacket, t: float) -> int:
    """Image count whose neglected amplitudes are below ~1e-14.

    Amplitudes decay like ``exp(-d**2 / (2 w**2))``, slower than densities,
    hence the wider span than the classical rule.
    """
    if not t >= 0:
        raise ValidationError(f"t must be non-negative, got {t}", key="t")
    w = math.sqrt(packet.squared_width(t))
    reach = abs(packet.x0) + abs(packet.p0) * t / packet.m + AMPLITUDE_SPAN * w
    return math.ceil(reach / 2) + 2


def box_wavefunction(packet: QuantumPacket, x, t: float, truncation: int | None = None):
    """``phi(x, t) = sum_n [psi(x + 2n, t) - psi(-x + 2n, t)]`` on [0, 1].

    Vanishes at ``x = 0`` exactly and at ``x = 1`` up to the truncation tail.
    """
    x = np.asarray(x, dtype=float)
    if np.any(x < 0) or np.any(x > 1):
        raise ValidationError("x must lie in [0, 1]", key="x")
    need = required_box_truncation(packet, t)
    if truncation is None:
        truncation = need
    elif truncation < need:
        raise ValidationError(f"truncation {truncation} too small for t={t}; need N >= {need}", key="trunc")
    out = np.zeros(x.shape, dtype=complex)
    for n in sorted(range(-truncation, truncation + 1), key=lambda k: (-abs(k), k)):
        out = out + free_packet_wavefunction(packet, x + 2 * n, t) - free_packet_wavefunction(packet, -x + 2 * n, t)
    return out


def box_norm(packet: QuantumPacket, t: float, nodes: int = 4000) -> float:
    """``int_0^1 |phi(x, t)|**2 dx`` by Gauss-Legendre quadrature."""
    x, w = roots_legendre(nodes)
    x = 0.5 * (x + 1.0)
    return float(0.5 * w @ (np.abs(box_wavefunction(packet, x, t)) ** 2))


def gaussian_smooth(x: np.ndarray, values: np.ndarray, width: float) -> np.ndarray:
    """Convolve grid values on [0, 1] with a Gaussian of standard deviation ``width``.

    The functions are taken as zero outside the interval; trapezoid weights.
    """
    if not width > 0:
        raise ValidationError("smoothing width must be positive", key="smoothing")
    dx = np.diff(x)
    w = np.zeros_like(x)
    w[:-1] += 0.5 * dx
    w[1:] += 0.5 * dx
    kernel = np.exp(-0.5 * ((x[:, None] - x[None, :]) / width) ** 2) / (math.sqrt(2 * math.pi) * width)
    return kernel @ (values * w)


def _trapezoid(x, y) -> float:
    return float(np.sum(0.5 * (y[1:] + y[:-1]) * np.diff(x)))


def semiclassical_compare(
    packets: Sequence[QuantumPacket],
    t: float,
    smoothing: float,
    n_grid: int = 2001,
) -> list[float]:
    """Smoothed L1 distance between ``|phi(x, t)|**2`` and the classical ``rho_c``.

    Each packet is compared with the classical box state of the same centre,
    position width and mass and momentum width ``b = hbar / a``.  Returns one
    distance per packet, in input order.
    """
    hbars = [pk.hbar for pk in packets]
    if any(b >= a for a, b in zip(hbars, hbars[1:])):
        raise ValidationError("hbar values must be strictly decreasing", key="hbar")
    x = np.linspace(0.0, 1.0, n_grid)
    out = []
    for pk in packets:
        quantum = np.abs(box_wavefunction(pk, x, t)) ** 2
        classical = box_coordinate_marginal(BoxState.for_time(pk.classical_state(), pk.m, t), t, x)
        diff = gaussian_smooth(x, quantum, smoothing) - gaussian_smooth(x, classical, smoothing)
        out.append(_trapezoid(x, np.abs(diff)))
    return out


@dataclass(frozen=True)
class ContextualEnsemble:
    """Discrete distribution over one uncertain model parameter."""

    parameter_name: str
    samples: tuple[float, ...]
    weights: tuple[float, ...]

    def __post_init__(self):
        samples = tuple(float(s) for s in self.samples)
        weights = tuple(float(w) for w in self.weights)
        if not samples or len(samples) != len(weights):
            raise ValidationError("need one weight per sample and at least one sample", key="weights")
        if any(w < 0 for w in weights) or abs(math.fsum(weights) - 1.0) > 1e-12:
            raise ValidationError("weights must be non-negative and sum to 1", key="weights")
        object.__setattr__(self, "samples", samples)
        object.__setattr__(self, "weights", weights)

    @classmethod
    def uniform(cls, name: str, samples: Sequence[float]) -> "ContextualEnsemble":
        n = len(samples)
        return cls(name, tuple(samples), (1.0 / n,) * n)


def contextual_average(values: Sequence[float], ensemble: ContextualEnsemble):
    """``sum_i w_i f_i``; ``values`` may be scalars or equally shaped arrays."""
    if len(values) != len(ensemble.samples):
        raise ValidationError(
            f"got {len(values)} values for {len(ensemble.samples)} samples of {ensemble.parameter_name}", key="values"
        )
    arr = np.asarray(values, dtype=float)
    if arr.ndim == 1:
        return math.fsum(w * v for w, v in zip(ensemble.weights, arr.tolist()))
    return np.tensordot(np.asarray(ensemble.weights), arr, axes=1)


def classical_joint_density(packet: QuantumPacket, q, p, t: float):
    """Freely evolved classical density with ``b = hbar / a``, for Wigner comparisons."""
    return free_evolved_density(packet.classical_state(), packet.m, t, q, p)
