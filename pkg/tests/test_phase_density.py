import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from funcmech.errors import ValidationError
from funcmech.phase_density import (
    GaussianState,
    Marginal,
    MarginalKind,
    coordinate_squared_width,
    density_at,
    free_coordinate_marginal,
    free_evolved_density,
    free_moments,
    free_momentum_marginal,
    numeric_moments,
    numeric_momentum_marginal,
)

# frozen oracles: hand-evaluated closed forms
UNIT = GaussianState(0.0, 0.0, 1.0, 1.0)


def test_density_peak_value():
    assert density_at(UNIT, 0.0, 0.0) == pytest.approx(1 / math.pi, rel=1e-15)


def test_density_off_peak():
    s = GaussianState(1.0, -1.0, 2.0, 0.5)
    # exp(-(1/2)**2 - (1/0.5)**2) / (pi * 2 * 0.5)
    assert density_at(s, 2.0, 0.0) == pytest.approx(math.exp(-4.25) / math.pi, rel=1e-14)


@pytest.mark.parametrize("t,var_q", [(0, 0.5), (1, 1.0), (2, 2.5), (5, 13.0)])
def test_free_moments_dispersion(t, var_q):
    mom = free_moments(UNIT, 1.0, t)
    assert mom.var_q == pytest.approx(var_q, rel=1e-15)
    assert mom.var_p == 0.5


def test_free_mean_moves_with_velocity():
    mom = free_moments(GaussianState(1.0, 2.0, 1.0, 1.0), 4.0, 3.0)
    assert mom.mean_q == pytest.approx(2.5)
    assert mom.mean_p == 2.0


def test_squared_width_heavy_mass():
    assert coordinate_squared_width(GaussianState(0, 0, 0.5, 2.0), 2.0, 3.0) == pytest.approx(0.25 + 9.0)


def test_marginal_mass_and_moments():
    marg = free_coordinate_marginal(GaussianState(0.3, 1.0, 0.7, 0.4), 1.5, 2.0)
    assert marg.mass() == pytest.approx(1.0, abs=1e-14)
    assert marg.mean == pytest.approx(0.3 + 2.0 / 1.5)
    assert marg.variance == pytest.approx(marg.squared_width / 2)


def test_momentum_marginal_is_time_free():
    marg = free_momentum_marginal(GaussianState(0, 2.0, 1.0, 0.5))
    assert marg.kind is MarginalKind.MOMENTUM
    assert marg(2.0) == pytest.approx(1 / (math.sqrt(math.pi) * 0.5))


def test_abs_momentum_marginal_sums_both_signs():
    marg = Marginal(MarginalKind.ABSOLUTE_MOMENTUM, center=1.0, width=1.0)
    # (1 + exp(-4)) / sqrt(pi) at p = 1
    assert marg(1.0) == pytest.approx((1 + math.exp(-4)) / math.sqrt(math.pi), rel=1e-14)
    assert marg.mass(0.0, np.inf) == pytest.approx(1.0, abs=1e-12)


@pytest.mark.parametrize("a,b", [(0, 1), (-1, 1), (1, 0), (1, math.nan), (1, math.inf)])
def test_rejects_bad_widths(a, b):
    with pytest.raises(ValidationError):
        GaussianState(0.0, 0.0, a, b)


def test_rejects_negative_mass():
    with pytest.raises(ValidationError) as exc:
        free_moments(UNIT, -1.0, 1.0)
    assert exc.value.key == "mass"


@pytest.mark.parametrize("t", [0.0, 1.0, 2.0, 5.0, -3.0])
def test_numeric_moments_match_closed_form(t):
    s = GaussianState(0.2, 0.7, 1.0, 0.8)
    num = numeric_moments(s, 1.3, t)
    ref = free_moments(s, 1.3, t)
    assert num.normalization == pytest.approx(1.0, abs=1e-12)
    assert num.mean_q == pytest.approx(ref.mean_q, abs=1e-10)
    assert num.var_q == pytest.approx(ref.var_q, rel=1e-10)
    assert num.var_p == pytest.approx(ref.var_p, rel=1e-10)


def test_numeric_momentum_marginal():
    s = GaussianState(0.0, 1.0, 1.0, 1.0)
    p = np.linspace(-2, 4, 7)
    got = numeric_momentum_marginal(s, 1.0, 3.0, p)
    np.testing.assert_allclose(got, free_momentum_marginal(s)(p), atol=1e-12)


@given(
    q0=st.floats(-5, 5),
    p0=st.floats(-5, 5),
    a=st.floats(0.1, 3),
    b=st.floats(0.1, 3),
    m=st.floats(0.2, 5),
    t=st.floats(0, 20),
)
def test_dispersion_is_non_decreasing(q0, p0, a, b, m, t):
    s = GaussianState(q0, p0, a, b)
    v0 = free_moments(s, m, t).var_q
    v1 = free_moments(s, m, t + 0.5).var_q
    assert v1 >= v0 >= free_moments(s, m, 0).var_q


@given(
    q=st.floats(-3, 3),
    p=st.floats(-3, 3),
    t=st.floats(-5, 5),
    m=st.floats(0.5, 2),
)
def test_free_evolution_is_a_shear(q, p, t, m):
    s = GaussianState(0.1, -0.4, 0.9, 1.1)
    assert free_evolved_density(s, m, t, q, p) == pytest.approx(density_at(s, q - p * t / m, p), rel=1e-12, abs=1e-300)


@given(t=st.floats(0, 10), m=st.floats(0.3, 3))
def test_coordinate_marginal_normalized(t, m):
    marg = free_coordinate_marginal(GaussianState(0.5, 1.5, 0.6, 1.2), m, t)
    assert marg.mass() == pytest.approx(1.0, abs=1e-12)
