"""Closed-form extremal index and tail dependence of the stopped clock model."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Mapping, Optional, Sequence

from .errors import DimensionMismatchError
from .patterns import BinaryPattern, fresh_gap_probs, prob
from .processes import WindowRuleParams


@dataclass(frozen=True)
class TheoryInputs:
    """Everything the closed forms need about X and U.

    Attributes
    ----------
    theta_x : float
        Extremal index of the base sequence, in (0, 1].
    betas : sequence of float
        beta_0..beta_{kappa-1}; beta_0 must be 1.
    window : WindowRuleParams
        Source of all indicator pattern probabilities (and of kappa).
    lambda_x : mapping int -> float
        Lag-j tail dependence coefficients of X.
    """

    theta_x: float
    betas: tuple
    window: WindowRuleParams
    lambda_x: Mapping[int, float] = field(default_factory=dict)

    def __post_init__(self):
        object.__setattr__(self, "betas", tuple(float(b) for b in self.betas))
        if not 0.0 < self.theta_x <= 1.0:
            raise ValueError(f"theta_x must lie in (0, 1], got {self.theta_x}")
        if self.betas and self.betas[0] != 1.0:
            raise ValueError("beta_0 must equal 1")
        for b in list(self.betas) + list(self.lambda_x.values()):
            if not 0.0 <= b <= 1.0:
                raise ValueError(f"coefficient {b} outside [0, 1]")

    @property
    def kappa(self) -> int:
        return self.window.kappa


@dataclass
class TheoryReport:
    theta_x: float
    theta_y: float
    p1: float
    fresh_gap_probs: list
    lambda_y: dict
    components: list
    theta_y_upcrossing: Optional[float] = None

    def to_dict(self) -> dict:
        return {
            "spec": "stopped-clock/1",
            "theta_x": self.theta_x,
            "theta_y": self.theta_y,
            "theta_y_upcrossing": self.theta_y_upcrossing,
            "p1": self.p1,
            "fresh_gap_probs": list(self.fresh_gap_probs),
            "lambda_y": {str(k): v for k, v in sorted(self.lambda_y.items())},
            "components": list(self.components),
        }


def beta_armax(phi: float, j: int) -> float:
    if not 0.0 <= phi < 1.0:
        raise ValueError(f"phi must lie in [0, 1), got {phi}")
    if j < 0:
        raise ValueError("j must be >= 0")
    return phi**j


def armax_inputs(phi: float, window: WindowRuleParams, max_lag: int = 1) -> TheoryInputs:
    """Inputs for an ARMAX base: theta_X = 1 - phi, beta_j = phi^j, lambda_X(j) = phi^j.

    ``lambda_x`` is filled for every lag the lag-``max_lag`` formula touches.
    ``phi = 0`` gives the i.i.d. case.
    """
    k = window.kappa
    lags = range(1, max_lag + k)
    return TheoryInputs(
        theta_x=1.0 - phi,
        betas=tuple(beta_armax(phi, j) for j in range(k)),
        window=window,
        lambda_x={j: phi**j for j in lags},
    )


def iid_inputs(window: WindowRuleParams, max_lag: int = 1) -> TheoryInputs:
    return armax_inputs(0.0, window, max_lag)


def theta_y_terms(inputs: TheoryInputs) -> list:
    """Per-gap contributions ``theta_X * P(1, 0^j, 1) * beta_j``."""
    if len(inputs.betas) != inputs.kappa:
        raise DimensionMismatchError(
            f"need {inputs.kappa} betas, got {len(inputs.betas)}"
        )
    gaps = fresh_gap_probs(inputs.window)
    return [inputs.theta_x * g * b for g, b in zip(gaps, inputs.betas)]


def theta_y_closed_form(inputs: TheoryInputs) -> float:
    return sum(theta_y_terms(inputs))


def theta_y_upper_bound(inputs: TheoryInputs) -> float:
    """``theta_X * P(U = 1)``, which the closed form never exceeds."""
    return inputs.theta_x * sum(fresh_gap_probs(inputs.window))


def theta_y_upcrossing(inputs: TheoryInputs) -> float:
    """Extremal index of Y from the upcrossing rate of Y itself.

    A cluster of Y starts when a fresh record exceeds the level while the
    record it replaces (j failures back) does not, so

        theta_Y = sum_j P(1, 0^j, 1) * (1 - lambda_X(j + 1))

    assuming Y crosses upward at most once per cluster, as for ARMAX bases.
    For i.i.d. X this is P(U = 1), which direct block maxima confirm.
    """
    gaps = fresh_gap_probs(inputs.window)
    return sum(g * (1.0 - _lambda_x(inputs, j + 1)) for j, g in enumerate(gaps))


def _lambda_x(inputs: TheoryInputs, lag: int) -> float:
    try:
        return inputs.lambda_x[lag]
    except KeyError:
        raise DimensionMismatchError(f"lambda_x missing for lag {lag}") from None


def tdc_y_lag1(inputs: TheoryInputs) -> float:
    """Lag-1 tail dependence of Y: repeat probability plus fresh-pair terms."""
    k = inputs.kappa
    w = inputs.window
    total = prob((0,), w)
    for i in range(k):
        total += _lambda_x(inputs, 1 + i) * prob((1,) + (0,) * i + (1,), w)
    return total


def lagm_pattern(i_star: int, i: int, m: int) -> BinaryPattern:
    """Indicator pattern of the (i, i*) term in the lag-m formula.

    Times ``1..i*+1`` carry ``(1, 0^{i*})`` (the record behind Y_n and its
    copies up to Y_n) and times ``i*+1+i .. i*+1+m`` carry ``(1, 0^{m-i})``
    (the record behind Y_{n+m}); times in between are free.
    """
    head = list(range(1, i_star + 2))
    tail = list(range(i_star + 1 + i, i_star + 2 + m))
    bits = [1] + [0] * i_star + [1] + [0] * (m - i)
    return BinaryPattern.on_indices(head + tail, bits)


def tdc_y_terms(inputs: TheoryInputs, m: int) -> list:
    """Itemized contributions to the lag-m coefficient, as dicts."""
    if m < 1:
        raise ValueError("lag m must be >= 1")
    k = inputs.kappa
    w = inputs.window
    terms = []
    if m <= k - 1:
        terms.append({"kind": "repeat", "pattern": "0" * m, "coefficient": 1.0,
                      "probability": prob((0,) * m, w)})
    for i in range(max(1, m - k + 1), m + 1):
        for i_star in range(k):
            pat = lagm_pattern(i_star, i, m)
            terms.append({
                "kind": "fresh",
                "pattern": str(pat),
                "coefficient": _lambda_x(inputs, i + i_star),
                "probability": prob(pat, w),
            })
    for t in terms:
        t["contribution"] = t["coefficient"] * t["probability"]
    return terms


def tdc_y_lagm(inputs: TheoryInputs, m: int) -> float:
    return sum(t["contribution"] for t in tdc_y_terms(inputs, m))


def theory_report(inputs: TheoryInputs, max_lag: int = 1) -> TheoryReport:
    gaps = fresh_gap_probs(inputs.window)
    components = [
        {"quantity": "theta_y", "pattern": "1" + "0" * j + "1", "probability": g,
         "coefficient": inputs.theta_x * b, "contribution": inputs.theta_x * g * b}
        for j, (g, b) in enumerate(zip(gaps, inputs.betas))
    ]
    lambda_y = {}
    for m in range(1, max_lag + 1):
        terms = tdc_y_terms(inputs, m)
        lambda_y[m] = sum(t["contribution"] for t in terms)
        components.extend(dict(t, quantity=f"lambda_y[{m}]") for t in terms)
    try:
        upcross = theta_y_upcrossing(inputs)
    except DimensionMismatchError:
        upcross = None
    return TheoryReport(
        theta_x=inputs.theta_x,
        theta_y=theta_y_closed_form(inputs),
        p1=sum(gaps),
        fresh_gap_probs=gaps,
        lambda_y=lambda_y,
        components=components,
        theta_y_upcrossing=upcross,
    )
