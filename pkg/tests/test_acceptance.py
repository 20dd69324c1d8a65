"""Acceptance criteria, one test each, at the required tolerances.

Every test records a PASS/FAIL line with the achieved value, the bound and
the wall time; the lines are printed in the pytest terminal summary and
when this file is run as a script.
"""

import math
import time

import numpy as np
import pytest

from funcmech.box_dynamics import BoxState, maxwell_distance, sup_deviation_uniform
from funcmech.characteristic_flow import (
    HamiltonianSpec,
    PhasePoint,
    QuadratureSpec,
    delta_limit_probe,
    expectation,
    flow_arrays,
    liouville_residual,
)
from funcmech.newton_corrections import CubicForceSystem, correction_study, ehrenfest_residual, extrapolated_ratio
from funcmech.phase_density import GaussianState, numeric_moments
from funcmech.quantum_bridge import (
    QuantumPacket,
    box_norm,
    box_wavefunction,
    classical_joint_density,
    coincidence_check,
    free_packet_wavefunction,
    numerical_wigner,
    semiclassical_compare,
    wigner_gaussian,
)

RESULTS: list[str] = []


def record(n: int, name: str, ok: bool, detail: str, elapsed: float, limit: float) -> None:
    ok = ok and elapsed < limit
    line = f"[{'PASS' if ok else 'FAIL'}] {n:2d} {name}: {detail}; {elapsed:.2f} s (limit {limit:g} s)"
    RESULTS.append(line)
    print(line)
    assert ok, line


def test_01_dispersion_law():
    start = time.perf_counter()
    s = GaussianState(0.0, 0.0, 1.0, 1.0)
    worst = max(abs(numeric_moments(s, 1.0, t).var_q / ((1 + t * t) / 2) - 1) for t in (0, 1, 2, 5))
    record(1, "dispersion law", worst <= 1e-6, f"max rel err {worst:.2e} <= 1e-6", time.perf_counter() - start, 1)


def test_02_free_newton_for_averages():
    start = time.perf_counter()
    s = GaussianState(0.5, 1.0, 1.0, 1.0)
    err = abs(expectation("q", s, HamiltonianSpec.free(1.0), 3.0) - (0.5 + 1.0 * 3.0))
    record(2, "free mean follows q0 + p0 t/m", err <= 1e-9, f"err {err:.2e} <= 1e-9", time.perf_counter() - start, 1)


def test_03_delta_limit_order():
    start = time.perf_counter()
    rep = delta_limit_probe("q", HamiltonianSpec.cubic(0.1), 1.0, 0.0, 0.1, [0.2, 0.1, 0.05])
    ok = abs(rep.order - 2.0) <= 0.2
    record(3, "delta-limit convergence order", ok, f"order {rep.order:.6f} in 2.0 +- 0.2", time.perf_counter() - start, 10)


def test_04_newton_correction():
    start = time.perf_counter()
    reports = correction_study(CubicForceSystem(0.1, 1.0, 0.0), [0.2, 0.1, 0.05], 0.1)
    ratio = extrapolated_ratio(reports)
    rel = abs(ratio / -2.5e-4 - 1)
    record(4, "cubic correction / eps^2", rel <= 0.02, f"{ratio:.6e} vs -2.5e-4, rel {rel:.2e} <= 0.02",
           time.perf_counter() - start, 30)


def test_05_ehrenfest_identity():
    start = time.perf_counter()
    system = CubicForceSystem(0.1, 1.0, 0.0)
    cubic = ehrenfest_residual(system, system.blob(0.1), 0.1, fd_step=1e-3)
    harm = ehrenfest_residual(HamiltonianSpec.harmonic(1.0), GaussianState(1.0, 0.0, 0.1, 0.1), 0.1, fd_step=1e-3)
    ok = cubic <= 1e-4 and harm <= 1e-6
    record(5, "Ehrenfest residual", ok, f"cubic {cubic:.2e} <= 1e-4, harmonic {harm:.2e} <= 1e-6",
           time.perf_counter() - start, 10)


def test_06_box_uniformization():
    start = time.perf_counter()
    state = BoxState.for_time(GaussianState(0.5, 0.0, 0.1, 1.0), 1.0, 50.0)
    dev = sup_deviation_uniform(state, 50.0, n=512)
    record(6, "box uniformization at t=50", dev < 1e-6, f"sup dev {dev:.2e} < 1e-6", time.perf_counter() - start, 10)


def test_07_abs_momentum_limit():
    start = time.perf_counter()
    state = BoxState.for_time(GaussianState(0.5, 0.0, 0.1, 1.0), 1.0, 50.0)
    dist = maxwell_distance(state, 50.0, p_max=5.0)
    record(7, "|p| limit distribution at t=50", dist < 1e-6, f"Linf {dist:.2e} < 1e-6", time.perf_counter() - start, 10)


def test_08_coincidence():
    start = time.perf_counter()
    res = coincidence_check(GaussianState(0.0, 0.0, 1.0, 0.5), 1.0, 0.5, [0, 1, 2, 5])
    ok = res.condition_holds and res.max_difference <= 1e-10
    record(8, "quantum/classical coincidence", ok, f"max diff {res.max_difference:.2e} <= 1e-10",
           time.perf_counter() - start, 1)


def test_09_wigner_correspondence():
    start = time.perf_counter()
    rng = np.random.default_rng(2024)
    pk = QuantumPacket(0.3, -0.7, 0.8, 0.6)
    q = rng.uniform(-3, 3, 100)
    p = rng.uniform(-3, 3, 100)
    t = rng.uniform(0, 5, 100)
    closed = float(np.max(np.abs(wigner_gaussian(pk, q, p, t) - classical_joint_density(pk, q, p, t))))
    numeric = max(
        abs(numerical_wigner(lambda y: free_packet_wavefunction(pk, y, 0.0), x, k, pk.hbar, 12.0)
            - float(wigner_gaussian(pk, x, k, 0.0)))
        for x, k in zip(q[:10], p[:10])
    )
    ok = closed <= 1e-10 and numeric <= 1e-6
    record(9, "Wigner = classical joint density", ok, f"closed {closed:.2e} <= 1e-10, transform {numeric:.2e} <= 1e-6",
           time.perf_counter() - start, 60)


def test_10_quantum_box():
    start = time.perf_counter()
    pk = QuantumPacket(0.5, 1.0, 0.1, 0.1)
    ends = max(float(np.max(np.abs(box_wavefunction(pk, np.array([0.0, 1.0]), t)))) for t in (0, 1, 5))
    norms = [box_norm(pk, t) for t in (0, 1, 5)]
    spread = max(norms) - min(norms)
    ok = ends < 1e-8 and spread <= 1e-6
    record(10, "quantum box boundaries and norm", ok, f"|phi| at walls {ends:.2e} < 1e-8, norm spread {spread:.2e} <= 1e-6",
           time.perf_counter() - start, 60)


def test_11_semiclassical_monotone():
    start = time.perf_counter()
    packets = [QuantumPacket(0.5, 0.0, 0.1, h) for h in (0.1, 0.05, 0.025)]
    d = semiclassical_compare(packets, 5.0, 0.05)
    ok = all(b <= a for a, b in zip(d, d[1:]))
    record(11, "semiclassical distance non-increasing", ok, "smoothed L1 " + ", ".join(f"{v:.5f}" for v in d),
           time.perf_counter() - start, 60)


def test_12_engine_invariants():
    start = time.perf_counter()
    quartic = HamiltonianSpec.polynomial([0.0, 0.0, 0.0, 0.0, 0.25])
    cubic = HamiltonianSpec.cubic(0.1)
    rng = np.random.default_rng(7)
    q = rng.uniform(-1, 1, (64, 1))
    p = rng.uniform(-1, 1, (64, 1))
    rev, drift = 0.0, 0.0
    double_well = HamiltonianSpec.polynomial([0.0, 0.0, -0.5, 0.0, 0.25])
    # the cubic well is unbounded below, so its orbits are only taken to t = 1
    cases = [(H, t) for H in (quartic, double_well, HamiltonianSpec.harmonic(1.0)) for t in (1.0, 10.0)]
    for H, t in cases + [(cubic, 1.0)]:
            q1, p1, d1, _ = flow_arrays(H, q, p, t)
            q2, p2, d2, _ = flow_arrays(H, q1, p1, -t)
            rev = max(rev, float(np.max(np.abs(q2 - q))), float(np.max(np.abs(p2 - p))))
            drift = max(drift, d1, d2)
    s = GaussianState(0.2, 0.3, 0.25, 0.25)
    quad = QuadratureSpec(order=20)
    mass = max(abs(expectation("one", s, H, t, quad) - 1) for H in (quartic, double_well) for t in (1.0, 5.0))
    mass = max(mass, abs(expectation("one", s, cubic, 1.0, quad) - 1))
    x = PhasePoint((0.4,), (0.1,))
    pde = max(liouville_residual(s, H, x, 2.0) for H in (HamiltonianSpec.free(), quartic, cubic))
    ok = rev <= 1e-8 and drift <= 1e-8 and mass <= 1e-9 and pde <= 1e-4
    detail = f"reversal {rev:.1e}, drift {drift:.1e}, <1>-1 {mass:.1e}, Liouville {pde:.1e}"
    record(12, "engine invariants", ok, detail, time.perf_counter() - start, 60)


if __name__ == "__main__":
    for name, fn in list(globals().items()):
        if name.startswith("test_"):
            try:
                fn()
            except AssertionError:
                pass
