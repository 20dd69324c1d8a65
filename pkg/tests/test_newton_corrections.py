import math

import pytest
from hypothesis import given
from hypothesis import strategies as st

from funcmech.characteristic_flow import HamiltonianSpec
from funcmech.errors import ValidationError
from funcmech.newton_corrections import (
    CubicForceSystem,
    correction_study,
    ehrenfest_residual,
    extrapolate_to_zero,
    extrapolated_ratio,
    monte_carlo_mean_q,
    newton_series,
    newton_trajectory,
    numeric_mean_q,
    series_correction,
)
from funcmech.phase_density import GaussianState

REF = CubicForceSystem(0.1, 1.0, 0.0)
EPS = (0.2, 0.1, 0.05)


def test_series_correction_arithmetic():
    assert series_correction(REF, 0.2, 1.0) == pytest.approx(-0.001, rel=1e-15)
    assert series_correction(REF, 0.2, 0.1) == pytest.approx(-1e-5, rel=1e-15)


def test_newton_series_close_to_trajectory_for_short_time():
    assert newton_series(REF, 0.5) == pytest.approx(0.9875)
    assert newton_trajectory(REF, 0.5) == pytest.approx(0.98755186709, abs=1e-9)


def test_correction_study_frozen_values():
    reports = correction_study(REF, EPS, 0.1)
    for r in reports:
        assert r.in_regime
        assert r.ratio == pytest.approx(-2.50291540e-4, rel=1e-7)
    assert extrapolated_ratio(reports) == pytest.approx(-2.5029154e-4, rel=1e-7)


def test_out_of_regime_is_flagged_not_rejected():
    (r,) = correction_study(REF, [0.2], 1.0)
    assert not r.in_regime
    assert r.correction_series == pytest.approx(-0.001)


def test_extrapolation_recovers_polynomial():
    hs = [0.04, 0.01, 0.0025]
    vals = [3.0 + 2.0 * h - 5.0 * h * h for h in hs]
    assert extrapolate_to_zero(hs, vals) == pytest.approx(3.0, abs=1e-12)


def test_epsilon_validation():
    with pytest.raises(ValidationError):
        series_correction(REF, 0.0, 1.0)
    with pytest.raises(ValidationError):
        correction_study(REF, [0.05, 0.1], 0.1)


def test_zero_lambda_has_no_correction():
    sys0 = CubicForceSystem(0.0, 1.0, 0.5)
    assert numeric_mean_q(sys0, 0.2, 2.0) == pytest.approx(2.0, abs=1e-12)


def test_monte_carlo_agrees_with_quadrature():
    mean, err = monte_carlo_mean_q(REF, 0.2, 0.1, n_samples=200_000, seed=7)
    quad = numeric_mean_q(REF, 0.2, 0.1)
    assert abs(mean - quad) <= 5 * err + 1e-12
    assert monte_carlo_mean_q(REF, 0.2, 0.1, n_samples=2000, seed=7) == monte_carlo_mean_q(
        REF, 0.2, 0.1, n_samples=2000, seed=7
    )


@pytest.mark.slow
def test_monte_carlo_full_size():
    mean, err = monte_carlo_mean_q(REF, 0.2, 0.1)
    assert abs(mean - numeric_mean_q(REF, 0.2, 0.1)) <= 5 * err


def test_ehrenfest_residuals():
    assert ehrenfest_residual(REF, REF.blob(0.1), 0.1) <= 1e-4
    assert ehrenfest_residual(HamiltonianSpec.harmonic(1.0), GaussianState(1, 0, 0.1, 0.1), 0.1) <= 1e-6
    assert ehrenfest_residual(HamiltonianSpec.free(), GaussianState(1, 0, 0.1, 0.1), 0.1) <= 1e-12


@given(lam=st.floats(0.01, 0.5), q0=st.floats(0.5, 2.0), t=st.floats(0.02, 0.2))
def test_correction_sign_and_size(lam, q0, t):
    # the blob average lags the point trajectory along the force direction
    sysx = CubicForceSystem(lam, q0, 0.0)
    (r,) = correction_study(sysx, [0.05], t)
    assert r.correction_numeric < 0
    assert r.relative_gap < 0.05
