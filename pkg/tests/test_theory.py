import itertools

import numpy as np
import pytest

from stopped_clock import estimators as est
from stopped_clock.errors import DimensionMismatchError
from stopped_clock.patterns import prob
from stopped_clock.processes import WindowRuleParams
from stopped_clock.theory import (
    TheoryInputs,
    armax_inputs,
    beta_armax,
    iid_inputs,
    lagm_pattern,
    tdc_y_lag1,
    tdc_y_lagm,
    theory_report,
    theta_y_closed_form,
    theta_y_upcrossing,
    theta_y_upper_bound,
)

from conftest import EXAMPLE_P, long_path

PHIS = (0.0, 0.25, 0.5, 0.9)
WINDOWS = [WindowRuleParams(p, k) for k in (1, 2, 3, 5) for p in (0.1, EXAMPLE_P, 0.7, 1.0)]


def traced_tdc(params, lam, m):
    """Independent oracle for the lag-m coefficient.

    Enumerates the event bits, finds which fresh record feeds Y_n and which
    feeds Y_{n+m}, and weights by 1 (same record) or lambda_X(gap).
    """
    k, p = params.kappa, params.p
    span = k + m  # U at times n-k+1 .. n+m
    total = 0.0
    for bits in itertools.product((0, 1), repeat=span + k - 1):
        u = []
        for t in range(k - 1, span + k - 1):
            u.append(1 if not any(bits[t - k + 1 : t]) else bits[t])
        n_pos = k - 1
        last_n = max(i for i in range(n_pos + 1) if u[i] == 1)
        last_nm = max(i for i in range(span) if u[i] == 1)
        coef = 1.0 if last_nm == last_n else lam(last_nm - last_n)
        ones = sum(bits)
        total += coef * p**ones * (1 - p) ** (len(bits) - ones)
    return total


@pytest.mark.parametrize("j, expected", [(0, 1.0), (1, 0.5), (2, 0.25)])
def test_beta_armax(j, expected):
    assert beta_armax(0.5, j) == expected


def test_theta_y_special_cases(example_window):
    inputs = TheoryInputs(1.0, (1.0, 0.0, 0.0), example_window)
    assert theta_y_closed_form(inputs) == pytest.approx(prob((1, 1), example_window), abs=1e-12)
    trivial = TheoryInputs(0.7, (1.0,), WindowRuleParams(0.4, 1))
    assert theta_y_closed_form(trivial) == pytest.approx(0.7, abs=1e-15)


@pytest.mark.parametrize("phi", PHIS)
def test_theta_y_armax_explicit(example_window, phi):
    w = example_window
    expected = (1 - phi) * (prob((1, 1), w) + phi * prob((1, 0, 1), w) + phi**2 * prob((1, 0, 0, 1), w))
    assert theta_y_closed_form(armax_inputs(phi, w)) == pytest.approx(expected, abs=1e-15)


def test_theta_y_frozen_value(example_window):
    # frozen from the enumeration engine, cross-checked by test_theta_y_armax_explicit
    assert theta_y_closed_form(armax_inputs(0.5, example_window)) == pytest.approx(0.23054328545472386, abs=1e-12)


def test_theta_y_dimension_mismatch(example_window):
    with pytest.raises(DimensionMismatchError):
        theta_y_closed_form(TheoryInputs(1.0, (1.0, 0.0), example_window))


def test_inputs_validation(example_window):
    with pytest.raises(ValueError):
        TheoryInputs(1.0, (0.5, 0.0, 0.0), example_window)
    with pytest.raises(ValueError):
        TheoryInputs(0.0, (1.0, 0.0, 0.0), example_window)


@pytest.mark.parametrize("window", WINDOWS, ids=str)
@pytest.mark.parametrize("phi", PHIS)
def test_order_relations_and_lag1_reduction(window, phi):
    inputs = armax_inputs(phi, window, max_lag=4)
    ty = theta_y_closed_form(inputs)
    bound = theta_y_upper_bound(inputs)
    assert ty <= bound + 1e-15
    assert bound <= inputs.theta_x + 1e-15
    assert tdc_y_lagm(inputs, 1) == pytest.approx(tdc_y_lag1(inputs), abs=1e-12)
    for m in range(1, 5):
        assert 0.0 <= tdc_y_lagm(inputs, m) <= 1.0 + 1e-12


def test_lag1_special_values(example_window):
    w = example_window
    ones = TheoryInputs(1.0, (1, 1, 1), w, {j: 1.0 for j in range(1, 8)})
    assert tdc_y_lag1(ones) == pytest.approx(1.0, abs=1e-12)
    for m in range(1, 5):
        assert tdc_y_lagm(ones, m) == pytest.approx(1.0, abs=1e-12)
    assert tdc_y_lag1(iid_inputs(w)) == pytest.approx(1 - EXAMPLE_P - (1 - EXAMPLE_P) ** 3, abs=1e-12)


def test_lag1_armax_explicit(example_window):
    w, phi = example_window, 0.5
    expected = prob((0,), w) + sum(phi ** (1 + i) * prob((1,) + (0,) * i + (1,), w) for i in range(3))
    assert tdc_y_lag1(armax_inputs(phi, w)) == pytest.approx(expected, abs=1e-15)


def test_lagm_iid(example_window):
    inputs = iid_inputs(example_window, max_lag=6)
    assert tdc_y_lagm(inputs, 1) == pytest.approx(prob((0,), example_window), abs=1e-15)
    assert tdc_y_lagm(inputs, 2) == pytest.approx(prob((0, 0), example_window), abs=1e-15)
    for m in (3, 4, 5, 6):
        assert tdc_y_lagm(inputs, m) == 0.0


def test_lagm_pattern_hand_expansion():
    # kappa = 2, m = 2: (i, i*) in {1, 2} x {0, 1}
    assert str(lagm_pattern(0, 1, 2)) == "110"
    assert str(lagm_pattern(1, 1, 2)) == "1010"
    assert str(lagm_pattern(0, 2, 2)) == "1.1"
    assert str(lagm_pattern(1, 2, 2)) == "10.1"
    # kappa = 3, m = 3, i = 1, i* = 2: times 1..3 carry 100, times 4..6 carry 100
    assert str(lagm_pattern(2, 1, 3)) == "100100"
    assert str(lagm_pattern(2, 3, 3)) == "100..1"


@pytest.mark.parametrize("kappa", [2, 3])
@pytest.mark.parametrize("m", [1, 2, 3, 4])
@pytest.mark.parametrize("phi", [0.0, 0.5, 0.8])
def test_lagm_matches_traced_oracle(kappa, m, phi):
    w = WindowRuleParams(0.35, kappa)
    inputs = armax_inputs(phi, w, max_lag=m)
    assert tdc_y_lagm(inputs, m) == pytest.approx(traced_tdc(w, lambda g: phi**g, m), abs=1e-13)


def test_lagm_frozen_values(example_window):
    inputs = armax_inputs(0.5, example_window, max_lag=4)
    frozen = [0.6139437850189274, 0.3476564613231121, 0.16145826994265824, 0.08072913497132912]
    for m, v in enumerate(frozen, start=1):
        assert tdc_y_lagm(inputs, m) == pytest.approx(v, abs=1e-12)
        assert v == pytest.approx(traced_tdc(example_window, lambda g: 0.5**g, m), abs=1e-12)


def test_missing_lambda(example_window):
    inputs = TheoryInputs(1.0, (1, 0, 0), example_window, {1: 0.0})
    with pytest.raises(DimensionMismatchError):
        tdc_y_lag1(inputs)


@pytest.mark.parametrize("lag", [1, 2, 3, 4])
def test_lagm_against_simulation(example_window, lag):
    target = tdc_y_lagm(armax_inputs(0.5, example_window, max_lag=4), lag)
    assert est.empirical_tdc(long_path(0.5), lag, 0.998).value == pytest.approx(target, abs=0.06)


def test_upcrossing_form(example_window):
    w = example_window
    iid = iid_inputs(w)
    assert theta_y_upcrossing(iid) == pytest.approx(1 - prob((0,), w), abs=1e-12)
    one = armax_inputs(0.5, WindowRuleParams(0.3, 1))
    assert theta_y_upcrossing(one) == pytest.approx(0.5)


@pytest.mark.parametrize("phi", [0.0, 0.25, 0.5])
def test_upcrossing_form_matches_simulation(example_window, phi):
    target = theta_y_upcrossing(armax_inputs(phi, example_window))
    value = est.extremal_index_intervals(long_path(phi), 0.995).value
    assert abs(value - target) <= 0.07


def test_report_shape(example_window):
    d = theory_report(armax_inputs(0.5, example_window, 4), 4).to_dict()
    assert d["spec"] == "stopped-clock/1"
    assert list(d["lambda_y"]) == ["1", "2", "3", "4"]
    assert d["theta_y"] <= d["theta_x"] * d["p1"]
    assert len(d["fresh_gap_probs"]) == 3
    assert sum(c["contribution"] for c in d["components"] if c["quantity"] == "lambda_y[2]") == pytest.approx(d["lambda_y"]["2"])
