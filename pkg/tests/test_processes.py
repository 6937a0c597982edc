import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from scipy import stats

from stopped_clock import processes as proc
from stopped_clock.errors import EmptyPathError, InvalidSeriesError
from stopped_clock.processes import (
    ArmaxParams,
    BinarySeries,
    WindowRuleParams,
    armax_recursion,
    frechet_from_uniform,
    gen_armax,
    gen_iid_frechet,
    gen_u_window_rule,
    make_stream,
    max_zero_run,
    window_rule,
)

from conftest import EXAMPLE_P, ks_distance


@pytest.mark.parametrize("v, expected", [(math.exp(-1), 1.0), (math.exp(-2), 0.5)])
def test_frechet_inverse_cdf_fixed_points(v, expected):
    assert frechet_from_uniform(v) == pytest.approx(expected, rel=1e-15)


def test_open_uniform_stays_inside_unit_interval():
    v = proc.open_uniform(make_stream(1), 10**5)
    assert v.min() > 0 and v.max() < 1
    assert np.all(np.isfinite(frechet_from_uniform(v)))


def test_sample_frechet_is_positive_float():
    x = proc.sample_frechet(make_stream(3))
    assert isinstance(x, float) and 0 < x < math.inf


def test_frechet_empirical_cdf_matches():
    x = gen_iid_frechet(10**6, make_stream(11)).values
    grid = np.array([0.5, 1.0, 2.0, 10.0])
    ecdf = np.searchsorted(np.sort(x), grid, side="right") / x.size
    assert np.max(np.abs(ecdf - np.exp(-1 / grid))) < 0.005
    # scipy's invweibull(c=1) is the standard Frechet law
    assert stats.kstest(x, stats.invweibull(1).cdf).statistic < 0.005


def test_gen_iid_single_draw(monkeypatch):
    monkeypatch.setattr(proc, "open_uniform", lambda rng, size=None: np.full(size, math.exp(-1)))
    path = gen_iid_frechet(1, make_stream(0))
    assert path.values.tolist() == pytest.approx([1.0])
    assert path.marginal == proc.STANDARD_FRECHET


def test_gen_iid_rejects_empty():
    with pytest.raises(EmptyPathError):
        gen_iid_frechet(0, make_stream(0))
    with pytest.raises(EmptyPathError):
        gen_armax(ArmaxParams(0.5), 0, make_stream(0))


def test_same_seed_same_path():
    a = gen_iid_frechet(1000, make_stream(42, 3))
    b = gen_iid_frechet(1000, make_stream(42, 3))
    c = gen_iid_frechet(1000, make_stream(42, 4))
    assert np.array_equal(a.values, b.values)
    assert not np.array_equal(a.values, c.values)


def test_armax_phi_zero_is_iid_on_same_stream():
    a = gen_armax(ArmaxParams(0.0), 500, make_stream(5))
    b = gen_iid_frechet(500, make_stream(5))
    assert np.array_equal(a.values, b.values)


def test_armax_recursion_hand_value():
    # X_{n-1} = 4, Z_n = 1, phi = 0.5 -> max(2, 0.5) = 2
    assert armax_recursion([1.0], 4.0, 0.5).tolist() == [2.0]
    assert armax_recursion([1.0, 10.0], 4.0, 0.5).tolist() == [2.0, 5.0]


@pytest.mark.parametrize("phi", [0.0, 0.25, 0.5, 0.9])
def test_armax_marginal_preserved(phi):
    x = gen_armax(ArmaxParams(phi), 10**6, make_stream(17, int(phi * 100))).values
    qs = np.quantile(x, np.linspace(0.005, 0.995, 100))
    ecdf = np.searchsorted(np.sort(x), qs, side="right") / x.size
    assert np.max(np.abs(ecdf - np.exp(-1 / qs))) < 0.005
    assert ks_distance(x) < 0.005


def test_armax_params_range():
    with pytest.raises(ValueError):
        ArmaxParams(1.0)
    with pytest.raises(ValueError):
        ArmaxParams(-0.1)


def test_window_rule_p_one_gives_all_ones():
    u = gen_u_window_rule(WindowRuleParams(1.0, 3), 1000, make_stream(2))
    assert np.all(u.values == 1)


def test_window_rule_hand_cases():
    # bits (a_{t-2}, a_{t-1}, a_t)
    assert window_rule(np.array([1, 1, 0]), 3).tolist() == [0]
    assert window_rule(np.array([0, 0, 0]), 3).tolist() == [1]
    assert window_rule(np.array([0, 0, 1]), 3).tolist() == [1]
    assert window_rule(np.array([1, 0, 1]), 3).tolist() == [1]
    assert window_rule(np.array([0, 1, 0]), 3).tolist() == [0]


def test_window_rule_forces_one_after_kappa_minus_one_zeros():
    for kappa in (2, 3, 5):
        u = gen_u_window_rule(WindowRuleParams(0.3, kappa), 10**5, make_stream(8, kappa)).values
        z = np.concatenate(([0], (u == 0).astype(int)))
        csum = np.cumsum(z)
        window = csum[kappa - 1 :] - csum[: csum.size - kappa + 1]
        # wherever the previous kappa-1 values are all zero, the next one is 1
        prev_all_zero = window[:-1] == kappa - 1
        assert np.all(u[kappa - 1 :][prev_all_zero] == 1)


def test_window_rule_legality_many_series():
    rng = make_stream(99)
    for kappa in (2, 3, 5):
        params = WindowRuleParams(0.2, kappa)
        bits = (rng.random((10**4 // 3 + 1, 10**3 + kappa - 1)) < params.p).astype(np.int8)
        for row in bits:
            assert max_zero_run(window_rule(row, kappa)) <= kappa - 1


def test_window_rule_zero_frequency():
    p, kappa, n = EXAMPLE_P, 3, 10**6
    u = gen_u_window_rule(WindowRuleParams(p, kappa), n, make_stream(123)).values
    q = 1 - p - (1 - p) ** kappa
    assert abs(np.mean(u == 0) - q) < 3 * math.sqrt(q * (1 - q) / n)


def test_binary_series_rejects_long_zero_run():
    with pytest.raises(InvalidSeriesError):
        BinarySeries(np.array([1, 0, 0, 0]), 3)
    BinarySeries(np.array([1, 0, 0, 1]), 3)


def test_kappa_one_window_means_no_failures():
    u = gen_u_window_rule(WindowRuleParams(0.2, 1), 100, make_stream(0))
    assert np.all(u.values == 1)


@settings(max_examples=50, deadline=None)
@given(
    p=st.floats(0.01, 1.0),
    kappa=st.integers(1, 6),
    n=st.integers(1, 300),
    seed=st.integers(0, 2**32),
)
def test_window_rule_invariant_property(p, kappa, n, seed):
    u = gen_u_window_rule(WindowRuleParams(p, kappa), n, make_stream(seed))
    assert len(u) == n
    assert max_zero_run(u.values) <= kappa - 1
