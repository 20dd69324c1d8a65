"""Hamiltonian phase flow on R^2N and the Liouville solution it generates.

The density at time ``t`` is the initial density pulled back along the
flow, ``rho(x, t) = rho0(phi_{-t}(x))``, and phase-space averages are
computed in the initial variables, ``<f(t)> = int f(phi_t(x)) rho0(x) dx``,
which is legitimate because the flow preserves Liouville measure.

Batched arrays have shape ``(M, N)``: ``M`` phase points, ``N`` degrees of
freedom.  User-facing callables (observables, initial densities) receive
``q`` and ``p`` squeezed to shape ``(M,)`` when ``N == 1``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import cached_property
from typing import Callable, Mapping, Sequence, Union

import numpy as np

from .errors import NumericalFailure, ValidationError
from .phase_density import GaussianState

Observable = Callable[[np.ndarray, np.ndarray], np.ndarray]
DensityLike = Union[GaussianState, Sequence[GaussianState], Callable[[np.ndarray, np.ndarray], np.ndarray]]


@dataclass(frozen=True)
class PhasePoint:
    q: tuple[float, ...]
    p: tuple[float, ...]

    def __post_init__(self):
        q = tuple(float(v) for v in np.atleast_1d(self.q))
        p = tuple(float(v) for v in np.atleast_1d(self.p))
        if len(q) != len(p) or len(q) < 1:
            raise ValidationError(f"q and p must have equal length >= 1, got {len(q)} and {len(p)}", key="q")
        if not all(math.isfinite(v) for v in q + p):
            raise ValidationError("phase point coordinates must be finite", key="q")
        object.__setattr__(self, "q", q)
        object.__setattr__(self, "p", p)

    @property
    def dim(self) -> int:
        return len(self.q)

    def arrays(self):
        return np.array([self.q]), np.array([self.p])


def _horner(c: Sequence[float], x: np.ndarray) -> np.ndarray:
    r = np.full_like(x, c[-1], dtype=float)
    for a in reversed(c[:-1]):
        r = r * x + a
    return r


def _strip(coeffs) -> tuple[float, ...]:
    c = [float(v) for v in coeffs] or [0.0]
    while len(c) > 1 and c[-1] == 0.0:
        c.pop()
    return tuple(c)


@dataclass(frozen=True)
class HamiltonianSpec:
    """``H = sum_i p_i**2 / (2 m_i) + sum_i V_i(q_i)``.

    ``potential[i]`` holds the power-series coefficients of ``V_i``
    (constant term first).  Only separable polynomial potentials are
    supported; that covers the free, harmonic and cubic-force systems used
    throughout the package.
    """

    masses: tuple[float, ...] = (1.0,)
    potential: tuple[tuple[float, ...], ...] = ((0.0,),)

    def __post_init__(self):
        masses = tuple(float(m) for m in np.atleast_1d(self.masses))
        if any(not (math.isfinite(m) and m > 0) for m in masses):
            raise ValidationError(f"masses must be positive, got {masses}", key="mass")
        pot = self.potential
        if pot and not isinstance(pot[0], (tuple, list, np.ndarray)):
            pot = (pot,)
        pot = tuple(_strip(c) for c in pot)
        if len(pot) == 1 and len(masses) > 1:
            pot = pot * len(masses)
        if len(pot) != len(masses):
            raise ValidationError("need one potential per degree of freedom", key="potential")
        if not all(math.isfinite(v) for c in pot for v in c):
            raise ValidationError("potential coefficients must be finite", key="potential")
        object.__setattr__(self, "masses", masses)
        object.__setattr__(self, "potential", pot)

    @classmethod
    def free(cls, m: float = 1.0, dim: int = 1) -> "HamiltonianSpec":
        return cls(masses=(m,) * dim, potential=((0.0,),) * dim)

    @classmethod
    def harmonic(cls, k: float = 1.0, m: float = 1.0) -> "HamiltonianSpec":
        return cls(masses=(m,), potential=((0.0, 0.0, 0.5 * k),))

    @classmethod
    def cubic(cls, lam: float, m: float = 1.0) -> "HamiltonianSpec":
        """Force ``-lam q**2``, i.e. ``V = lam q**3 / 3``."""
        return cls(masses=(m,), potential=((0.0, 0.0, 0.0, lam / 3.0),))

    @classmethod
    def polynomial(cls, coeffs: Sequence[float], m: float = 1.0) -> "HamiltonianSpec":
        return cls(masses=(m,), potential=(tuple(coeffs),))

    @property
    def dim(self) -> int:
        return len(self.masses)

    def _mass_array(self) -> np.ndarray:
        return np.asarray(self.masses)

    @cached_property
    def _force_coeffs(self) -> tuple[tuple[float, ...], ...]:
        return tuple(tuple(-np.polynomial.polynomial.polyder(c)) if len(c) > 1 else (0.0,) for c in self.potential)

    def potential_energy(self, q: np.ndarray) -> np.ndarray:
        q = np.atleast_2d(q)
        return sum(_horner(c, q[:, i]) for i, c in enumerate(self.potential))

    def force(self, q: np.ndarray) -> np.ndarray:
        """``-dV/dq`` evaluated exactly from the coefficients."""
        q = np.atleast_2d(q)
        if q.shape[1] == 1:
            return _horner(self._force_coeffs[0], q[:, 0])[:, None]
        return np.stack([_horner(c, q[:, i]) for i, c in enumerate(self._force_coeffs)], axis=1)

    def energy(self, q: np.ndarray, p: np.ndarray) -> np.ndarray:
        p = np.atleast_2d(p)
        return np.sum(p**2 / (2.0 * self._mass_array()), axis=1) + self.potential_energy(q)

    def _analytic_kind(self):
        """Per-dof ``(k, centre)`` for free (k = 0) or harmonic dofs, or None."""
        out = []
        for c in self.potential:
            if len(c) <= 1:
                out.append((0.0, 0.0))
            elif len(c) == 3 and c[2] > 0:
                out.append((2.0 * c[2], -c[1] / (2.0 * c[2])))
            else:
                return None
        return out

    @property
    def is_free(self) -> bool:
        return all(len(c) <= 1 for c in self.potential)


@dataclass(frozen=True)
class FlowControls:
    """Step-size policy for the Stormer-Verlet integrator.

    The step count starts at ``ceil(|t| / max_step)``.  Points whose
    energy drift exceeds ``drift_bound`` are re-run with a larger count,
    using the ``h**2`` scaling of the Verlet energy error to predict the
    required count (at least doubling each time).  ``max_work`` caps
    ``steps * max(batch size, 1024)`` so that a hopeless refinement fails
    fast; the floor accounts for the fixed per-step overhead.
    """

    max_step: float = 1e-3
    drift_bound: float = 1e-8
    max_steps: int = 1 << 23
    max_work: int = 2_000_000_000
    analytic: bool = True

    def __post_init__(self):
        if not (self.max_step > 0 and self.drift_bound > 0 and self.max_steps >= 1 and self.max_work >= 1):
            raise ValidationError("flow controls must be positive", key="max_step")


@dataclass(frozen=True)
class FlowResult:
    endpoint: PhasePoint
    energy_drift: float
    steps_used: int


@dataclass(frozen=True)
class QuadratureSpec:
    """Tensor Gauss-Hermite rule in the standardized initial variables.

    ``tolerance`` bounds the change of the result when ``order`` is doubled
    (relative to ``max(1, |value|)``); set ``verify=False`` to skip that check.
    ``sigma_span`` is only used by box-type fallback rules.
    """

    order: int = 40
    sigma_span: float = 8.0
    tolerance: float = 1e-9
    verify: bool = True

    def __post_init__(self):
        if int(self.order) != self.order or self.order < 2:
            raise ValidationError(f"quadrature order must be an integer >= 2, got {self.order}", key="order")
        if not self.sigma_span > 0:
            raise ValidationError("sigma_span must be positive", key="sigma_span")


def _as_batch(a, dim: int) -> np.ndarray:
    a = np.array(a, dtype=float)
    return a.reshape(-1, dim) if a.ndim < 2 else a


def _verlet(H: HamiltonianSpec, q, p, t: float, n: int):
    h = t / n
    m = H._mass_array()
    q = q.copy()
    p = p.copy()
    f = H.force(q)
    with np.errstate(over="ignore", invalid="ignore"):
        for _ in range(n):
            p += 0.5 * h * f
            q += (h / m) * p
            f = H.force(q)
            p += 0.5 * h * f
    return q, p


def _analytic(H: HamiltonianSpec, kinds, q, p, t: float):
    m = H._mass_array()
    q2 = np.empty_like(q)
    p2 = np.empty_like(p)
    for i, (k, c) in enumerate(kinds):
        if k == 0.0:
            q2[:, i] = q[:, i] + p[:, i] * t / m[i]
            p2[:, i] = p[:, i]
        else:
            w = math.sqrt(k / m[i])
            cs, sn = math.cos(w * t), math.sin(w * t)
            x = q[:, i] - c
            q2[:, i] = c + x * cs + p[:, i] / (m[i] * w) * sn
            p2[:, i] = -m[i] * w * x * sn + p[:, i] * cs
    return q2, p2


def flow_arrays(H: HamiltonianSpec, q, p, t: float, controls: FlowControls = FlowControls()):
    """Advance a batch of phase points by ``t``; returns ``(q, p, drift, steps)``.

    Negative ``t`` integrates backward with a negated step, which for the
    time-symmetric Verlet scheme is the exact inverse of the forward map up
    to roundoff.
    """
    q = _as_batch(q, H.dim)
    p = _as_batch(p, H.dim)
    if q.shape != p.shape or q.shape[1] != H.dim:
        raise ValidationError(f"phase arrays of shape {q.shape}/{p.shape} do not match dimension {H.dim}", key="q")
    if not math.isfinite(t):
        raise ValidationError("t must be finite", key="t")
    if t == 0.0:
        return q, p, 0.0, 0
    e0 = H.energy(q, p)
    kinds = H._analytic_kind() if controls.analytic else None
    if kinds is not None:
        q1, p1 = _analytic(H, kinds, q, p, t)
        return q1, p1, float(np.max(np.abs(H.energy(q1, p1) - e0))), 0
    n = min(controls.max_steps, max(1, math.ceil(abs(t) / controls.max_step)))
    q_out = np.empty_like(q)
    p_out = np.empty_like(p)
    drift_out = np.zeros(q.shape[0])
    todo = np.arange(q.shape[0])
    used = n
    blowups = 0
    # only the points still above the bound are re-run with more steps
    while True:
        with np.errstate(over="ignore", invalid="ignore"):
            q1, p1 = _verlet(H, q[todo], p[todo], t, n)
            d = np.abs(H.energy(q1, p1) - e0[todo])
        used = n
        done = d <= controls.drift_bound
        q_out[todo[done]] = q1[done]
        p_out[todo[done]] = p1[done]
        drift_out[todo[done]] = d[done]
        todo, d = todo[~done], d[~done]
        if todo.size == 0:
            return q_out, p_out, float(drift_out.max()), used
        drift = float(np.max(d))
        if not math.isfinite(drift):
            # a finer step rarely rescues an escaping trajectory
            blowups += 1
            if blowups > 3:
                raise NumericalFailure(
                    f"trajectory left the finite range before t={t} (escape in finite time?)",
                    achieved=math.inf,
                    bound=controls.drift_bound,
                )
            grow = 2.0
        else:
            grow = math.sqrt(drift / controls.drift_bound) * 1.25
        if n >= controls.max_steps or n * grow > 16 * controls.max_steps:
            break
        n = min(controls.max_steps, max(2 * n, math.ceil(n * grow)))
        if n * max(todo.size, 1024) > controls.max_work:
            raise NumericalFailure(
                f"energy drift {drift:.3e} would need {n} steps for {todo.size} points, above the work limit "
                f"{controls.max_work}; narrow the initial density or relax drift_bound",
                achieved=drift,
                bound=controls.drift_bound,
            )
    raise NumericalFailure(
        f"energy drift {drift:.3e} above bound {controls.drift_bound:.1e}; "
        f"the step limit {controls.max_steps} cannot meet it",
        achieved=drift,
        bound=controls.drift_bound,
    )


def flow(H: HamiltonianSpec, x0: PhasePoint, t: float, controls: FlowControls = FlowControls()) -> FlowResult:
    """Image of ``x0`` under the Hamiltonian flow at time ``t``."""
    if x0.dim != H.dim:
        raise ValidationError("phase point and Hamiltonian dimensions differ", key="q")
    q, p = x0.arrays()
    q1, p1, drift, steps = flow_arrays(H, q, p, t, controls)
    return FlowResult(PhasePoint(tuple(q1[0]), tuple(p1[0])), drift, steps)


def flow_through(H: HamiltonianSpec, q, p, times: Sequence[float], controls: FlowControls = FlowControls()):
    """States of a batch at each of the increasing ``times``, integrating segment by segment."""
    out = []
    t_prev = 0.0
    for t in times:
        q, p, _, _ = flow_arrays(H, q, p, t - t_prev, controls)
        out.append((q, p))
        t_prev = t
    return out


def _squeeze(a: np.ndarray) -> np.ndarray:
    return a[:, 0] if a.shape[1] == 1 else a


def _as_density(rho0: DensityLike) -> Callable:
    if isinstance(rho0, GaussianState):
        return rho0
    if isinstance(rho0, (list, tuple)) and rho0 and all(isinstance(s, GaussianState) for s in rho0):
        states = tuple(rho0)

        def product(q, p):
            q = np.asarray(q).reshape(-1, len(states))
            p = np.asarray(p).reshape(-1, len(states))
            return np.prod([s(q[:, i], p[:, i]) for i, s in enumerate(states)], axis=0)

        return product
    if callable(rho0):
        return rho0
    raise ValidationError("initial density must be a GaussianState, a sequence of them, or a callable", key="rho0")


def pullback_density(
    rho0: DensityLike,
    H: HamiltonianSpec,
    x: PhasePoint,
    t: float,
    controls: FlowControls = FlowControls(),
) -> float:
    """Liouville solution ``rho0(phi_{-t}(x))`` at a single phase point."""
    q, p = x.arrays()
    return float(pullback_density_arrays(rho0, H, q, p, t, controls)[0])


def pullback_density_arrays(rho0: DensityLike, H: HamiltonianSpec, q, p, t: float, controls: FlowControls = FlowControls()):
    qb, pb, _, _ = flow_arrays(H, q, p, -t, controls)
    return np.asarray(_as_density(rho0)(_squeeze(qb), _squeeze(pb)), dtype=float)


# --- observables -----------------------------------------------------------


def polynomial_observable(terms: Mapping[tuple[int, int], float], dof: int = 0) -> Observable:
    """``sum c * q**i * p**j`` over ``{(i, j): c}`` for one degree of freedom."""
    terms = dict(terms)

    def f(q, p):
        q = np.asarray(q)
        p = np.asarray(p)
        if q.ndim == 2:
            q, p = q[:, dof], p[:, dof]
        return sum(c * q**i * p**j for (i, j), c in terms.items()) + 0.0 * q

    return f


NAMED_OBSERVABLES: dict[str, Observable] = {
    "one": polynomial_observable({(0, 0): 1.0}),
    "q": polynomial_observable({(1, 0): 1.0}),
    "p": polynomial_observable({(0, 1): 1.0}),
    "q2": polynomial_observable({(2, 0): 1.0}),
    "p2": polynomial_observable({(0, 2): 1.0}),
    "qp": polynomial_observable({(1, 1): 1.0}),
}


def resolve_observable(f: Union[str, Observable]) -> Observable:
    if isinstance(f, str):
        try:
            return NAMED_OBSERVABLES[f]
        except KeyError:
            raise ValidationError(f"unknown observable {f!r}; known: {sorted(NAMED_OBSERVABLES)}", key="f") from None
    if not callable(f):
        raise ValidationError("observable must be a name or a callable", key="f")
    return f


def force_observable(H: HamiltonianSpec) -> Observable:
    """``F(q) = -V'(q)``, shaped like the other observables."""

    def f(q, p):
        q2 = np.asarray(q).reshape(len(q), -1)
        return _squeeze(H.force(q2))

    return f


# --- quadrature ------------------------------------------------------------


def _states_tuple(rho0) -> tuple[GaussianState, ...]:
    if isinstance(rho0, GaussianState):
        return (rho0,)
    if isinstance(rho0, (list, tuple)) and rho0 and all(isinstance(s, GaussianState) for s in rho0):
        return tuple(rho0)
    raise ValidationError("expectations need Gaussian initial data", key="rho0")


def gauss_hermite_nodes(states: Sequence[GaussianState], order: int):
    """Nodes ``(q, p)`` of shape ``(M, N)`` and weights summing to one."""
    x, w = np.polynomial.hermite.hermgauss(order)
    w = w / math.sqrt(math.pi)
    n = len(states)
    grids = np.meshgrid(*([x] * (2 * n)), indexing="ij")
    wgrid = np.ones_like(grids[0])
    for g in np.meshgrid(*([w] * (2 * n)), indexing="ij"):
        wgrid = wgrid * g
    q = np.stack([s.q0 + s.a * grids[i].ravel() for i, s in enumerate(states)], axis=1)
    p = np.stack([s.p0 + s.b * grids[n + i].ravel() for i, s in enumerate(states)], axis=1)
    return q, p, wgrid.ravel()


def _weighted_sum(w: np.ndarray, v: np.ndarray) -> float:
    return math.fsum((w * v).tolist())


def expectations_at(
    fs: Sequence[Observable],
    rho0,
    H: HamiltonianSpec,
    times: Sequence[float],
    order: int,
    controls: FlowControls = FlowControls(),
) -> np.ndarray:
    """Table ``E[k, j] = <fs[j](times[k])>`` for one quadrature order.

    All nodes travel together through the increasing ``times``, so values at
    neighbouring times share every step before the first of them.
    """
    states = _states_tuple(rho0)
    if len(states) != H.dim:
        raise ValidationError("initial state and Hamiltonian dimensions differ", key="rho0")
    q, p, w = gauss_hermite_nodes(states, order)
    order_idx = np.argsort(times, kind="stable")
    sorted_times = [float(times[i]) for i in order_idx]
    out = np.empty((len(times), len(fs)))
    for k, (qt, pt) in zip(order_idx, flow_through(H, q, p, sorted_times, controls)):
        qs, ps = _squeeze(qt), _squeeze(pt)
        for j, f in enumerate(fs):
            out[k, j] = _weighted_sum(w, np.asarray(f(qs, ps), dtype=float))
    return out


def expectation_with_error(f, rho0, H, t, quad: QuadratureSpec = QuadratureSpec(), controls: FlowControls = FlowControls()):
    """``(value, change_under_order_doubling)``; the change is NaN when unverified."""
    f = resolve_observable(f)
    val = float(expectations_at([f], rho0, H, [t], quad.order, controls)[0, 0])
    if not quad.verify:
        return val, math.nan
    ref = float(expectations_at([f], rho0, H, [t], 2 * quad.order, controls)[0, 0])
    delta = abs(ref - val)
    if not delta <= quad.tolerance * max(1.0, abs(ref)):
        raise NumericalFailure(
            f"quadrature not converged: order {quad.order} -> {2 * quad.order} changed result by {delta:.3e}",
            achieved=delta,
            bound=quad.tolerance,
        )
    return val, delta


def expectation(
    f: Union[str, Observable],
    rho0,
    H: HamiltonianSpec,
    t: float,
    quad: QuadratureSpec = QuadratureSpec(),
    controls: FlowControls = FlowControls(),
) -> float:
    """Phase-space average ``int f(phi_t(x)) rho0(x) dx`` by Gauss-Hermite quadrature.

    Parameters
    ----------
    f : str or callable
        Name from :data:`NAMED_OBSERVABLES` or ``f(q, p) -> values``.
    rho0 : GaussianState or sequence of GaussianState
        Initial density (a product of Gaussians for ``N > 1``).
    H : HamiltonianSpec
    t : float
    quad : QuadratureSpec
        Raises :class:`NumericalFailure` if doubling the order moves the
        result by more than ``quad.tolerance``.
    """
    return expectation_with_error(f, rho0, H, t, quad, controls)[0]


# --- delta-sequence limit ----------------------------------------------------


def fit_order(steps: Sequence[float], errors: Sequence[float]) -> float:
    """Least-squares slope of ``log(error)`` against ``log(step)``."""
    x = np.log(np.asarray(steps, dtype=float))
    y = np.log(np.asarray(errors, dtype=float))
    return float(np.polyfit(x, y, 1)[0])


@dataclass(frozen=True)
class DeltaLimitReport:
    epsilons: tuple[float, ...]
    values: tuple[float, ...]
    reference: float
    errors: tuple[float, ...]
    order: float
    exact: bool = field(default=False)


def _check_epsilons(epsilons) -> tuple[float, ...]:
    eps = tuple(float(e) for e in epsilons)
    if not eps or any(not (e > 0 and math.isfinite(e)) for e in eps):
        raise ValidationError("epsilons must be positive", key="eps")
    if any(b >= a for a, b in zip(eps, eps[1:])):
        raise ValidationError("epsilons must be strictly decreasing", key="eps")
    return eps


def delta_limit_probe(
    f: Union[str, Observable],
    H: HamiltonianSpec,
    q0: float,
    p0: float,
    t: float,
    epsilons: Sequence[float],
    quad: QuadratureSpec = QuadratureSpec(),
    controls: FlowControls = FlowControls(),
    floor: float = 1e-13,
) -> DeltaLimitReport:
    """Average of ``f`` over a shrinking Gaussian blob versus ``f`` on the trajectory.

    The blob is ``GaussianState(q0, p0, eps, eps)``.  Errors should vanish
    like ``eps**2``; the fitted order is the log-log slope.  When every
    error is below ``floor`` (linear flows with linear ``f``) the report is
    marked ``exact`` and the order is NaN.
    """
    eps = _check_epsilons(epsilons)
    fn = resolve_observable(f)
    x = flow(H, PhasePoint((q0,), (p0,)), t, controls).endpoint
    ref = float(np.asarray(fn(np.array(x.q), np.array(x.p))).ravel()[0])
    values = tuple(expectation(fn, GaussianState(q0, p0, e, e), H, t, quad, controls) for e in eps)
    errors = tuple(abs(v - ref) for v in values)
    usable = [(e, err) for e, err in zip(eps, errors) if err > floor * max(1.0, abs(ref))]
    if len(usable) < 2:
        return DeltaLimitReport(eps, values, ref, errors, math.nan, exact=len(usable) == 0)
    order = fit_order([u[0] for u in usable], [u[1] for u in usable])
    return DeltaLimitReport(eps, values, ref, errors, order)


# --- PDE residual ------------------------------------------------------------


def liouville_residual(
    rho0: DensityLike,
    H: HamiltonianSpec,
    x: PhasePoint,
    t: float,
    fd_step: float = 1e-4,
    controls: FlowControls = FlowControls(),
) -> float:
    """``|d rho/dt - {H, rho}|`` at ``(x, t)`` by central differences of the pullback."""
    if not fd_step > 0:
        raise ValidationError("fd_step must be positive", key="fd_step")
    h = fd_step
    q, p = x.arrays()
    n = x.dim
    # all spatial stencils share one backward flow
    qs, ps = [q], [p]
    for i in range(n):
        e = np.zeros((1, n))
        e[0, i] = h
        qs += [q + e, q - e, q, q]
        ps += [p, p, p + e, p - e]
    vals = pullback_density_arrays(rho0, H, np.vstack(qs), np.vstack(ps), t, controls)
    dt = (
        pullback_density_arrays(rho0, H, q, p, t + h, controls)[0]
        - pullback_density_arrays(rho0, H, q, p, t - h, controls)[0]
    ) / (2 * h)
    dV = -H.force(q)[0]
    m = H._mass_array()
    bracket = 0.0
    for i in range(n):
        v = vals[1 + 4 * i : 5 + 4 * i]
        drho_dq = (v[0] - v[1]) / (2 * h)
        drho_dp = (v[2] - v[3]) / (2 * h)
        bracket += dV[i] * drho_dp - p[0, i] / m[i] * drho_dq
    return float(abs(dt - bracket))
