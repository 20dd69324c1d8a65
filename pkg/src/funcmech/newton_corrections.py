"""Averages under the cubic force ``-lam q**2`` and their deviation from Newton.

For a Gaussian blob of width ``eps`` around ``(q0, p0)`` the mean position
behaves, for small ``t``, ``lam`` and ``eps``, like

    <q(t)> = q_newton(t) - lam * eps**2 * t**2 / 4.

Here ``q_newton`` is the trajectory started exactly at ``(q0, p0)``.  The
averages are computed by quadrature over the flow (no symbolic expansion),
and the ``eps -> 0`` behaviour is extracted by polynomial extrapolation in
``eps**2``.  Mass is fixed to 1 and the potential is ``V = lam q**3 / 3``.
"""

from __future__ import annotations

import dataclasses
import math
from dataclasses import dataclass
from typing import Sequence, Union

import numpy as np

from .characteristic_flow import (
    FlowControls,
    HamiltonianSpec,
    PhasePoint,
    QuadratureSpec,
    _check_epsilons,
    expectation_with_error,
    expectations_at,
    flow,
    flow_arrays,
    force_observable,
    polynomial_observable,
)
from .errors import NumericalFailure, ValidationError
from .phase_density import GaussianState

# artifact choices for where the leading-order formula is trusted
REGIME_MAX_EPSILON = 0.2
REGIME_MAX_LAMBDA_Q2_T2 = 0.01


@dataclass(frozen=True)
class CubicForceSystem:
    lam: float
    q0: float
    p0: float

    def __post_init__(self):
        for name in ("lam", "q0", "p0"):
            if not math.isfinite(getattr(self, name)):
                raise ValidationError(f"{name} must be finite", key="lambda" if name == "lam" else name)

    def hamiltonian(self) -> HamiltonianSpec:
        return HamiltonianSpec.cubic(self.lam, m=1.0)

    def blob(self, epsilon: float) -> GaussianState:
        return GaussianState(self.q0, self.p0, epsilon, epsilon)

    def in_regime(self, epsilon: float, t: float) -> bool:
        return epsilon <= REGIME_MAX_EPSILON and abs(self.lam) * self.q0**2 * t**2 <= REGIME_MAX_LAMBDA_Q2_T2


@dataclass(frozen=True)
class CorrectionReport:
    t: float
    epsilon: float
    mean_q_numeric: float
    q_newton: float
    correction_numeric: float
    correction_series: float
    relative_gap: float
    in_regime: bool = True

    @property
    def ratio(self) -> float:
        """``correction_numeric / eps**2``; tends to ``-lam t**2 / 4``."""
        return self.correction_numeric / self.epsilon**2


def newton_trajectory(sys: CubicForceSystem, t: float, controls: FlowControls = FlowControls()) -> float:
    """Position at time ``t`` of the trajectory from ``(q0, p0)``."""
    return flow(sys.hamiltonian(), PhasePoint((sys.q0,), (sys.p0,)), t, controls).endpoint.q[0]


def newton_series(sys: CubicForceSystem, t: float) -> float:
    """Second-order Taylor polynomial ``q0 + p0 t - lam q0**2 t**2 / 2``."""
    return sys.q0 + sys.p0 * t - 0.5 * sys.lam * sys.q0**2 * t**2


def series_correction(sys: CubicForceSystem, epsilon: float, t: float) -> float:
    if not epsilon > 0:
        raise ValidationError(f"epsilon must be positive, got {epsilon}", key="eps")
    return -0.25 * sys.lam * epsilon**2 * t**2


def numeric_mean_q(
    sys: CubicForceSystem,
    epsilon: float,
    t: float,
    quad: QuadratureSpec = QuadratureSpec(),
    controls: FlowControls = FlowControls(),
) -> float:
    """``<q(t)>`` for the Gaussian blob of width ``epsilon``, by quadrature."""
    if not epsilon > 0:
        raise ValidationError(f"epsilon must be positive, got {epsilon}", key="eps")
    return expectation_with_error("q", sys.blob(epsilon), sys.hamiltonian(), t, quad, controls)[0]


def monte_carlo_mean_q(
    sys: CubicForceSystem,
    epsilon: float,
    t: float,
    n_samples: int = 10_000_000,
    seed: int = 12345,
    chunk: int = 1_000_000,
    controls: FlowControls = FlowControls(),
) -> tuple[float, float]:
    """Sampling estimate of ``<q(t)>`` with antithetic pairs.

    Returns ``(mean, standard_error)``.  Each draw ``z`` is paired with
    ``-z`` which removes the odd (linear) part of the flow from the
    variance, leaving only the curvature term that carries the correction.
    Chunks are processed in order so the result is reproducible for a seed.
    """
    if not epsilon > 0:
        raise ValidationError(f"epsilon must be positive, got {epsilon}", key="eps")
    rng = np.random.default_rng(seed)
    H = sys.hamiltonian()
    scale = epsilon / math.sqrt(2.0)
    pairs = n_samples // 2
    total = 0.0
    total_sq = 0.0
    done = 0
    while done < pairs:
        n = min(chunk, pairs - done)
        z = rng.standard_normal((n, 2)) * scale
        q = np.concatenate([sys.q0 + z[:, 0], sys.q0 - z[:, 0]])[:, None]
        p = np.concatenate([sys.p0 + z[:, 1], sys.p0 - z[:, 1]])[:, None]
        qt, _, _, _ = flow_arrays(H, q, p, t, controls)
        g = 0.5 * (qt[:n, 0] + qt[n:, 0])
        total += math.fsum(g.tolist())
        total_sq += math.fsum((g * g).tolist())
        done += n
    mean = total / pairs
    var = max(total_sq / pairs - mean**2, 0.0)
    return mean, math.sqrt(var / pairs)


def extrapolate_to_zero(hs: Sequence[float], values: Sequence[float]) -> float:
    """Value at ``h = 0`` of the interpolating polynomial through ``(hs, values)`` (Neville)."""
    h = [float(x) for x in hs]
    v = [float(x) for x in values]
    if len(h) != len(v) or not h:
        raise ValidationError("need matching, non-empty sequences", key="eps")
    for k in range(1, len(h)):
        for i in range(len(h) - 1, k - 1, -1):
            v[i] = (h[i - k] * v[i] - h[i] * v[i - 1]) / (h[i - k] - h[i])
    return v[-1]


def correction_study(
    sys: CubicForceSystem,
    epsilons: Sequence[float],
    t: float,
    quad: QuadratureSpec = QuadratureSpec(),
    controls: FlowControls = FlowControls(),
) -> list[CorrectionReport]:
    """Numerical versus leading-order correction for each ``eps``.

    Inputs outside the validated regime are still computed; their reports
    carry ``in_regime=False``.
    """
    eps = _check_epsilons(epsilons)
    q_newton = newton_trajectory(sys, t, controls)
    reports = []
    for e in eps:
        mean = numeric_mean_q(sys, e, t, quad, controls)
        corr = mean - q_newton
        series = series_correction(sys, e, t)
        gap = abs(corr - series) / abs(series) if series != 0 else abs(corr)
        reports.append(CorrectionReport(t, e, mean, q_newton, corr, series, gap, sys.in_regime(e, t)))
    return reports


def extrapolated_ratio(reports: Sequence[CorrectionReport]) -> float:
    """``lim_{eps -> 0} correction / eps**2`` from a study."""
    return extrapolate_to_zero([r.epsilon**2 for r in reports], [r.ratio for r in reports])


def ehrenfest_residual(
    system: Union[CubicForceSystem, HamiltonianSpec],
    state: GaussianState,
    t: float,
    fd_step: float = 1e-3,
    quad: QuadratureSpec = QuadratureSpec(),
    controls: FlowControls = FlowControls(),
) -> float:
    """``|m d^2<q>/dt^2 - <F(q)>|`` at time ``t``.

    The second derivative is a central difference over ``t - h, t, t + h``.
    The quadrature nodes are carried through those three times in one pass,
    with the integrator step capped at ``h / 8`` so that the short segments
    do not dominate the difference quotient.
    """
    if not fd_step > 0:
        raise ValidationError("fd_step must be positive", key="fd_step")
    H = system.hamiltonian() if isinstance(system, CubicForceSystem) else system
    if H.dim != 1:
        raise ValidationError("ehrenfest_residual supports one degree of freedom", key="mass")
    h = fd_step
    ctl = dataclasses.replace(controls, max_step=min(controls.max_step, h / 8))
    fs = [polynomial_observable({(1, 0): 1.0}), force_observable(H)]
    times = [t - h, t, t + h]

    def residual(order: int):
        table = expectations_at(fs, state, H, times, order, ctl)
        second = (table[2, 0] - 2 * table[1, 0] + table[0, 0]) / h**2
        return abs(H.masses[0] * second - table[1, 1]), table

    res, table = residual(quad.order)
    if quad.verify:
        _, ref = residual(2 * quad.order)
        delta = float(np.max(np.abs(ref - table)))
        if not delta <= quad.tolerance * max(1.0, float(np.max(np.abs(ref)))):
            raise NumericalFailure(f"quadrature not converged (change {delta:.3e})", achieved=delta, bound=quad.tolerance)
    return float(res)
