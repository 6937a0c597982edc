"""Seeded generators for the base sequence X and the failure indicators U.

All randomness flows through :func:`make_stream`, which builds a counter-based
Philox generator keyed by ``(seed, *key)``.  Two calls with the same key always
see the same numbers, no matter which thread or in which order they run.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import EmptyPathError, InvalidSeriesError

STANDARD_FRECHET = "standard-frechet"
UNKNOWN = "unknown"

_TWO_POW_53 = 2.0**53


def make_stream(seed: int, *key: int) -> np.random.Generator:
    """Return an independent sub-stream for ``(seed, *key)``.

    Parameters
    ----------
    seed : int
        Master seed (any non-negative integer, typically a u64).
    *key : int
        Logical series identifier, e.g. ``(replica, series_id)``.
    """
    ss = np.random.SeedSequence(int(seed), spawn_key=tuple(int(k) for k in key))
    return np.random.Generator(np.random.Philox(ss))


def open_uniform(rng: np.random.Generator, size=None):
    """Uniform draws on the open interval (0, 1).

    Values are ``(k + 0.5) / 2**53`` for integer ``k``, so neither 0 nor 1 can
    occur and ``-1/log(v)`` stays finite.
    """
    k = rng.integers(0, 2**53, size=size, dtype=np.uint64)
    return (k.astype(np.float64) + 0.5) / _TWO_POW_53


def frechet_from_uniform(v):
    """Standard Frechet inverse CDF, ``F^{-1}(v) = -1/log(v)``."""
    return -1.0 / np.log(v)


def frechet_cdf(x):
    x = np.asarray(x, dtype=np.float64)
    with np.errstate(divide="ignore"):
        return np.where(x > 0, np.exp(-1.0 / np.where(x > 0, x, 1.0)), 0.0)


@dataclass(frozen=True)
class ArmaxParams:
    phi: float

    def __post_init__(self):
        if not 0.0 <= self.phi < 1.0:
            raise ValueError(f"phi must lie in [0, 1), got {self.phi}")


@dataclass(frozen=True)
class WindowRuleParams:
    """Parameters of the window rule driving the failure indicators.

    ``p`` is the probability of the underlying event A_n and ``kappa`` the
    smallest length of an impossible zero run.  ``kappa = 1`` is accepted as
    the degenerate no-failure case (U is identically one).
    """

    p: float
    kappa: int

    def __post_init__(self):
        if not 0.0 < self.p <= 1.0:
            raise ValueError(f"p must lie in (0, 1], got {self.p}")
        if int(self.kappa) != self.kappa or self.kappa < 1:
            raise ValueError(f"kappa must be a positive integer, got {self.kappa}")


@dataclass(frozen=True, eq=False)
class SeriesPath:
    values: np.ndarray
    marginal: str = UNKNOWN

    def __post_init__(self):
        arr = np.asarray(self.values, dtype=np.float64)
        if arr.ndim != 1:
            raise InvalidSeriesError("a series path must be one-dimensional")
        if arr.size == 0:
            raise EmptyPathError("series path is empty")
        if self.marginal == STANDARD_FRECHET and not (
            np.all(np.isfinite(arr)) and np.all(arr > 0)
        ):
            raise InvalidSeriesError("standard-Frechet paths must be finite and positive")
        arr.setflags(write=False)
        object.__setattr__(self, "values", arr)

    def __len__(self) -> int:
        return self.values.size


def max_zero_run(values) -> int:
    """Length of the longest run of zeros in a 0/1 array."""
    u = np.asarray(values)
    if u.size == 0:
        return 0
    z = np.concatenate(([0], (u == 0).astype(np.int8), [0]))
    edges = np.flatnonzero(np.diff(z))
    if edges.size == 0:
        return 0
    return int((edges[1::2] - edges[0::2]).max())


@dataclass(frozen=True, eq=False)
class BinarySeries:
    """A realization of U together with its declared kappa.

    Construction fails if some zero run is longer than ``kappa - 1``.
    """

    values: np.ndarray
    kappa: int

    def __post_init__(self):
        arr = np.asarray(self.values)
        if arr.ndim != 1:
            raise InvalidSeriesError("a binary series must be one-dimensional")
        if arr.size == 0:
            raise EmptyPathError("binary series is empty")
        if not np.all((arr == 0) | (arr == 1)):
            raise InvalidSeriesError("binary series values must be 0 or 1")
        if self.kappa < 1:
            raise InvalidSeriesError("kappa must be >= 1")
        run = max_zero_run(arr)
        if run > self.kappa - 1:
            raise InvalidSeriesError(
                f"zero run of length {run} violates kappa={self.kappa}"
            )
        arr = arr.astype(np.int8)
        arr.setflags(write=False)
        object.__setattr__(self, "values", arr)

    def __len__(self) -> int:
        return self.values.size


def sample_frechet(rng: np.random.Generator) -> float:
    return float(frechet_from_uniform(open_uniform(rng)))


def gen_iid_frechet(n: int, rng: np.random.Generator) -> SeriesPath:
    if n < 1:
        raise EmptyPathError("n must be >= 1")
    return SeriesPath(frechet_from_uniform(open_uniform(rng, n)), STANDARD_FRECHET)


def armax_recursion(z: np.ndarray, x0: float, phi: float) -> np.ndarray:
    """Evaluate ``X_n = max(phi*X_{n-1}, (1-phi)*Z_n)`` from ``X_0 = x0``."""
    innov = ((1.0 - phi) * np.asarray(z, dtype=np.float64)).tolist()
    out = [0.0] * len(innov)
    prev = float(x0)
    for i, w in enumerate(innov):
        carried = phi * prev
        prev = carried if carried > w else w
        out[i] = prev
    return np.array(out)


def gen_armax(params: ArmaxParams, n: int, rng: np.random.Generator) -> SeriesPath:
    """Stationary ARMAX path of length ``n`` with standard Frechet margins.

    The innovations Z_1..Z_n are drawn first and X_0 last, so ``phi = 0``
    reproduces :func:`gen_iid_frechet` on the same stream exactly.
    """
    if n < 1:
        raise EmptyPathError("n must be >= 1")
    z = frechet_from_uniform(open_uniform(rng, n))
    x0 = sample_frechet(rng)
    return SeriesPath(armax_recursion(z, x0, params.phi), STANDARD_FRECHET)


def window_rule(bits: np.ndarray, kappa: int) -> np.ndarray:
    """Apply the window rule to event bits ``a_{2-kappa}, ..., a_n``.

    ``U_t = 1`` when the ``kappa - 1`` preceding bits are all zero, otherwise
    ``U_t = a_t``.  Returns the ``len(bits) - kappa + 1`` values U_1..U_n.
    """
    a = np.asarray(bits, dtype=np.int64)
    w = kappa - 1
    if w == 0:
        return np.ones(a.size, dtype=np.int8)
    csum = np.concatenate(([0], np.cumsum(a)))
    # events in a_{t-w} .. a_{t-1} for each t (array index j = t + w - 1)
    prev = csum[w:-1] - csum[: a.size - w]
    return np.where(prev == 0, 1, a[w:]).astype(np.int8)


def gen_u_window_rule(
    params: WindowRuleParams, n: int, rng: np.random.Generator
) -> BinarySeries:
    if n < 1:
        raise EmptyPathError("n must be >= 1")
    bits = (rng.random(n + params.kappa - 1) < params.p).astype(np.int8)
    return BinarySeries(window_rule(bits, params.kappa), params.kappa)
