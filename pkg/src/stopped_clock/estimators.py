"""Empirical inference from an observed stopped clock path.

Repeats in Y are detected by exact float equality by default; paths built by
:mod:`stopped_clock.core` copy values, so this is legitimate.  Pass ``tol > 0``
for data that went through a lossy serialization.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .errors import SampleTooSmallError, TooFewExceedancesError

MIN_EXCEEDANCES = 10


@dataclass
class EstimateSummary:
    estimator: str
    value: float
    m: int
    q: Optional[float] = None
    auxiliary: dict = field(default_factory=dict)

    def to_dict(self) -> dict:
        return {
            "estimator": self.estimator,
            "value": self.value,
            "m": self.m,
            "q": self.q,
            "auxiliary": dict(self.auxiliary),
        }


def _values(y) -> np.ndarray:
    if hasattr(y, "y"):
        y = y.y
    return np.asarray(getattr(y, "values", y), dtype=np.float64)


def _same_as_previous(v: np.ndarray, tol: float) -> np.ndarray:
    """Boolean array e with e[i-1] = (v[i] == v[i-1]) for i = 1..m-1."""
    if tol > 0:
        return np.abs(v[1:] - v[:-1]) <= tol
    return v[1:] == v[:-1]


def estimate_change_probs(y, tol: float = 0.0) -> tuple[float, float]:
    """Return ``(p1_hat, p0_hat)``, the change and repeat frequencies.

    Both sums run over i = 2..m but are divided by m, so
    ``p1_hat + p0_hat == (m - 1) / m``.
    """
    v = _values(y)
    m = v.size
    if m < 2:
        raise SampleTooSmallError("need at least two observations")
    same = _same_as_previous(v, tol)
    n_same = int(same.sum())
    return (m - 1 - n_same) / m, n_same / m


def _run_pattern_hits(v: np.ndarray, s: int, tol: float) -> np.ndarray:
    # hit at i (1-based, i = s+2..m): Y_{i-s-1} != Y_{i-s} = ... = Y_i
    same = _same_as_previous(v, tol)  # same[k] <-> Y_{k+2} == Y_{k+1}
    m = v.size
    n = m - s - 1
    hit = ~same[:n]
    for k in range(1, s + 1):
        hit = hit & same[k : k + n]
    return hit


def estimate_run_pattern_prob(y, s: int, tol: float = 0.0) -> float:
    """Frequency of a change followed by ``s`` repeats, divided by m."""
    if s < 1:
        raise ValueError("s must be >= 1")
    v = _values(y)
    m = v.size
    if m < s + 2:
        raise SampleTooSmallError(f"need at least {s + 2} observations for s={s}")
    return int(_run_pattern_hits(v, s, tol).sum()) / m


def estimate_kappa(y, tol: float = 0.0) -> int:
    """One plus the longest repeat run that follows a change (1 if no repeats)."""
    v = _values(y)
    if v.size < 2:
        raise SampleTooSmallError("need at least two observations")
    same = _same_as_previous(v, tol)
    changes = np.flatnonzero(~same)
    if changes.size == 0:
        return 1
    # same[k] covers the pair (k, k+1) in 0-based positions; a change at k
    # starts a run at k+1 whose repeats are the following True entries
    z = np.concatenate(([False], same, [False])).astype(np.int8)
    d = np.diff(z)
    starts = np.flatnonzero(d == 1)
    ends = np.flatnonzero(d == -1)
    runs = ends - starts
    # a run only counts when a change precedes it inside the sample
    runs = runs[starts > 0]
    return 1 + int(runs.max()) if runs.size else 1


def threshold(y, q: float) -> float:
    """Order statistic of rank ``ceil(q * m)`` (no interpolation)."""
    if not 0.0 < q < 1.0:
        raise ValueError(f"q must lie in (0, 1), got {q}")
    v = _values(y)
    m = v.size
    rank = max(1, math.ceil(round(q * m, 9)))
    return float(np.partition(v, rank - 1)[rank - 1])


def _exceedances(v: np.ndarray, q: float, need: int = MIN_EXCEEDANCES):
    u = threshold(v, q)
    exc = v > u
    n_exc = int(exc.sum())
    if n_exc < need:
        raise TooFewExceedancesError(
            f"{n_exc} exceedances of the q={q} quantile (need {need})"
        )
    return u, exc, n_exc


def extremal_index_runs(y, q: float, r: int) -> EstimateSummary:
    """Runs estimator: clusters are separated by at least ``r`` non-exceedances."""
    if r < 1:
        raise ValueError("run length r must be >= 1")
    v = _values(y)
    u, exc, n_exc = _exceedances(v, q)
    pos = np.flatnonzero(exc)
    gaps = np.diff(pos) - 1
    n_clusters = 1 + int(np.sum(gaps >= r))
    theta = n_clusters / n_exc
    return EstimateSummary(
        "extremal_index_runs",
        theta,
        v.size,
        q,
        {"threshold": u, "exceedances": n_exc, "clusters": n_clusters, "r": r},
    )


def extremal_index_intervals(y, q: float) -> EstimateSummary:
    """Intervals estimator built from interexceedance times.

    Uses the bias-corrected moment ratio when some gap exceeds 2 and the
    plain ratio otherwise; the result is clipped to (0, 1].
    """
    v = _values(y)
    u, exc, n_exc = _exceedances(v, q)
    t = np.diff(np.flatnonzero(exc)).astype(np.float64)
    if t.max() <= 2:
        num = 2.0 * t.sum() ** 2
        den = (t.size) * np.sum(t**2)
    else:
        num = 2.0 * np.sum(t - 1.0) ** 2
        den = t.size * np.sum((t - 1.0) * (t - 2.0))
    theta = min(1.0, num / den) if den > 0 else 1.0
    return EstimateSummary(
        "extremal_index_intervals",
        float(theta),
        v.size,
        q,
        {"threshold": u, "exceedances": n_exc},
    )


def empirical_tdc(y, lag: int, q: float) -> EstimateSummary:
    """Lag-``lag`` tail dependence: share of exceedances followed by one ``lag`` steps on."""
    v = _values(y)
    m = v.size
    if lag < 1:
        raise ValueError("lag must be >= 1")
    if lag >= m:
        raise SampleTooSmallError(f"lag {lag} is not smaller than m={m}")
    u, exc, _ = _exceedances(v, q)
    base = exc[:-lag]
    n_base = int(base.sum())
    if n_base < MIN_EXCEEDANCES:
        raise TooFewExceedancesError(f"only {n_base} usable exceedances at lag {lag}")
    joint = int(np.sum(base & exc[lag:]))
    return EstimateSummary(
        "empirical_tdc",
        joint / n_base,
        m,
        q,
        {"threshold": u, "lag": lag, "exceedances": n_base, "joint": joint},
    )


def estimate_theta_x_from_y(y, s: int, q: float, tol: float = 0.0) -> EstimateSummary:
    """Extremal index of the unobserved X, estimated from Y.

    Among windows ``Y_0..Y_s`` where every adjacent pair differs (all records
    fresh), take the share with ``Y_1..Y_{s-1} <= u < Y_s`` and divide by the
    overall exceedance rate of ``u``.
    """
    if s < 1:
        raise ValueError("s must be >= 1")
    v = _values(y)
    m = v.size
    if m < s + 2:
        raise SampleTooSmallError(f"need at least {s + 2} observations")
    u, exc, n_exc = _exceedances(v, q)
    n = m - s  # window starts 0..m-s-1
    differ = ~_same_as_previous(v, tol)  # differ[k] <-> v[k+1] != v[k]
    cond = np.ones(n, dtype=bool)
    for k in range(s):
        cond &= differ[k : k + n]
    n_cond = int(cond.sum())
    if n_cond < MIN_EXCEEDANCES:
        raise TooFewExceedancesError(f"conditioning event seen only {n_cond} times")
    event = exc[s : s + n].copy()
    for k in range(1, s):
        event &= ~exc[k : k + n]
    hits = int(np.sum(cond & event))
    p_exc = n_exc / m
    value = (hits / n_cond) / p_exc
    return EstimateSummary(
        "theta_x_from_y",
        float(value),
        m,
        q,
        {"threshold": u, "conditioning": n_cond, "hits": hits, "exceedance_rate": p_exc, "s": s},
    )
