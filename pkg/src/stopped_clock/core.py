"""Construction of the stopped clock sequence Y from (X, U).

Two independent builders are provided: the direct failure recursion
(:func:`build_y_failures`) and the random-index form ``Y_n = X_{N_n}``
(:func:`build_y_random_index`).  Both copy values, never recompute them, so
repeats in Y are bit-exact.
"""

from __future__ import annotations

import csv
import io
from dataclasses import dataclass
from typing import Optional, Sequence, TextIO

import numpy as np

from .errors import (
    InvalidSeriesError,
    LengthMismatchError,
    UndefinedOriginError,
)
from .processes import STANDARD_FRECHET, UNKNOWN, BinarySeries, SeriesPath, max_zero_run


@dataclass(frozen=True, eq=False)
class StoppedClockPath:
    y: SeriesPath
    kappa: int
    x: Optional[SeriesPath] = None
    u: Optional[BinarySeries] = None

    def __post_init__(self):
        m = len(self.y)
        for name, part in (("x", self.x), ("u", self.u)):
            if part is not None and len(part) != m:
                raise LengthMismatchError(f"{name} has length {len(part)}, y has {m}")
        if self.x is not None and self.u is not None:
            y, x, u = self.y.values, self.x.values, self.u.values
            fresh = u == 1
            if not np.array_equal(y[fresh], x[fresh]):
                raise InvalidSeriesError("y must equal x wherever u = 1")
            stale = np.flatnonzero(u[1:] == 0) + 1
            if not np.array_equal(y[stale], y[stale - 1]):
                raise InvalidSeriesError("y must repeat its previous value wherever u = 0")

    def __len__(self) -> int:
        return len(self.y)


@dataclass(frozen=True, eq=False)
class IndexSeries:
    """Values N_1..N_n (1-based).  Entries <= 0 point into a pre-window."""

    n_indices: np.ndarray

    def __len__(self) -> int:
        return self.n_indices.size


def _as_array(x) -> np.ndarray:
    return x.values if isinstance(x, (SeriesPath, BinarySeries)) else np.asarray(x)


def _kappa_of(u, kappa: Optional[int]) -> int:
    if kappa is not None:
        return int(kappa)
    if isinstance(u, BinarySeries):
        return u.kappa
    return max_zero_run(_as_array(u)) + 1


def _extend(x, u, pre):
    xv = np.asarray(_as_array(x), dtype=np.float64)
    uv = np.asarray(_as_array(u)).astype(np.int8)
    if xv.size != uv.size:
        raise LengthMismatchError(f"x has length {xv.size}, u has {uv.size}")
    if pre is None:
        return xv, uv, 0
    px = np.asarray(_as_array(pre[0]), dtype=np.float64)
    pu = np.asarray(_as_array(pre[1])).astype(np.int8)
    if px.size != pu.size:
        raise LengthMismatchError("pre-window x and u lengths differ")
    return np.concatenate((px, xv)), np.concatenate((pu, uv)), px.size


def _wrap(y, x, u, kappa, marginal) -> StoppedClockPath:
    return StoppedClockPath(
        y=SeriesPath(y, marginal),
        kappa=kappa,
        x=SeriesPath(x, marginal),
        u=BinarySeries(u, kappa),
    )


def _marginal(x) -> str:
    return x.marginal if isinstance(x, SeriesPath) else UNKNOWN


def build_y_failures(x, u, pre=None, kappa: Optional[int] = None) -> StoppedClockPath:
    """Build Y by the failure recursion: ``Y_n = X_n`` if ``U_n = 1`` else ``Y_{n-1}``.

    Parameters
    ----------
    x, u : SeriesPath / BinarySeries or array-like
        Base values and indicators of equal length.
    pre : tuple (x_pre, u_pre), optional
        Values immediately preceding index 1.  Needed when ``u[0] == 0``; the
        last fresh record in the pre-window supplies Y_0.
    kappa : int, optional
        Declared kappa; taken from ``u`` (or inferred) when omitted.
    """
    k = _kappa_of(u, kappa)
    xe, ue, off = _extend(x, u, pre)
    xs = xe.tolist()
    ys = [0.0] * len(xs)
    last = None
    for t, (xt, ut) in enumerate(zip(xs, ue.tolist())):
        if ut == 1:
            last = xt
        elif last is None:
            if t >= off:
                raise UndefinedOriginError(
                    "u_1 = 0 and no earlier fresh record is available"
                )
            ys[t] = float("nan")
            continue
        ys[t] = last
    y = np.array(ys[off:])
    return _wrap(y, xe[off:], ue[off:], k, _marginal(x))


def _indices_extended(ue: np.ndarray, kappa: int) -> np.ndarray:
    # N_n = n U_n + sum_{i>=1} prod_{j<i}(1 - U_{n-j}) U_{n-i} (n - i), i < kappa.
    n_total = ue.size
    t = np.arange(n_total, dtype=np.int64)
    u = ue.astype(np.int64)
    idx = t * u
    live = 1 - u
    found = u.copy()
    for i in range(1, kappa):
        lagged = np.zeros(n_total, dtype=np.int64)
        lagged[i:] = u[:-i]
        idx += live * lagged * (t - i)
        found += live * lagged
        shifted = np.zeros(n_total, dtype=np.int64)
        shifted[i:] = 1 - u[:-i]
        live = live * shifted
    return np.where(found == 1, idx, -1)


def compute_indices(u, pre_u=None, kappa: Optional[int] = None) -> IndexSeries:
    """Random index N_n of the last fresh record at or before time n.

    Returned values are 1-based; with a pre-window of length L, entries in
    ``(-L, 0]`` refer to pre-window positions.
    """
    k = _kappa_of(u, kappa)
    uv = np.asarray(_as_array(u)).astype(np.int8)
    off = 0
    if pre_u is not None:
        pu = np.asarray(_as_array(pre_u)).astype(np.int8)
        off = pu.size
        uv = np.concatenate((pu, uv))
    raw = _indices_extended(uv, k)[off:]
    if np.any(raw < 0):
        raise UndefinedOriginError("u_1 = 0 and no earlier fresh record is available")
    return IndexSeries(raw - off + 1)


def build_y_random_index(x, u, pre=None, kappa: Optional[int] = None) -> StoppedClockPath:
    """Build Y as ``X_{N_n}`` using :func:`compute_indices`."""
    k = _kappa_of(u, kappa)
    xe, ue, off = _extend(x, u, pre)
    idx = _indices_extended(ue, k)[off:]
    if np.any(idx < 0):
        raise UndefinedOriginError("u_1 = 0 and no earlier fresh record is available")
    y = xe[idx]
    return _wrap(y, xe[off:], ue[off:], k, _marginal(x))


def check_recursive_degeneracy(u, kappa: Optional[int] = None) -> bool:
    """True iff every full window of ``kappa`` indicators contains a one.

    In that case the trailing ``prod(1 - U_{n-i}) Y_{n-kappa}`` term of the
    recursive representation is identically zero and it reduces to the
    failure recursion.
    """
    k = _kappa_of(u, kappa)
    uv = np.asarray(_as_array(u)).astype(np.int64)
    if uv.size < k:
        return True
    csum = np.concatenate(([0], np.cumsum(uv)))
    return bool(np.all(csum[k:] - csum[:-k] > 0))


def max_equal_run(y) -> int:
    v = np.asarray(_as_array(y))
    if v.size == 0:
        return 0
    change = np.flatnonzero(v[1:] != v[:-1])
    bounds = np.concatenate(([-1], change, [v.size - 1]))
    return int(np.diff(bounds).max())


# --- CSV series format: header t,x,u,y -------------------------------------------


def _fmt(v: float) -> str:
    return format(float(v), ".17g")


def write_path_csv(path: StoppedClockPath, fh: TextIO) -> None:
    cols = ["t"]
    if path.x is not None:
        cols.append("x")
    if path.u is not None:
        cols.append("u")
    cols.append("y")
    writer = csv.writer(fh, lineterminator="\n")
    writer.writerow(cols)
    xs = path.x.values if path.x is not None else None
    us = path.u.values if path.u is not None else None
    for i, yv in enumerate(path.y.values):
        row = [str(i + 1)]
        if xs is not None:
            row.append(_fmt(xs[i]))
        if us is not None:
            row.append(str(int(us[i])))
        row.append(_fmt(yv))
        writer.writerow(row)


def path_to_csv(path: StoppedClockPath) -> str:
    buf = io.StringIO()
    write_path_csv(path, buf)
    return buf.getvalue()


def read_path_csv(fh: TextIO, kappa: Optional[int] = None) -> StoppedClockPath:
    """Read a series CSV.  Only the ``y`` column is mandatory."""
    reader = csv.DictReader(fh)
    if reader.fieldnames is None or "y" not in reader.fieldnames:
        raise InvalidSeriesError("series CSV needs a 'y' column")
    rows = list(reader)
    y = np.array([float(r["y"]) for r in rows])
    x = u = None
    if "u" in reader.fieldnames:
        u = np.array([int(r["u"]) for r in rows], dtype=np.int8)
    k = kappa if kappa is not None else (max_zero_run(u) + 1 if u is not None else 1)
    if "x" in reader.fieldnames:
        x = SeriesPath(np.array([float(r["x"]) for r in rows]))
    return StoppedClockPath(
        y=SeriesPath(y),
        kappa=k,
        x=x,
        u=BinarySeries(u, k) if u is not None else None,
    )
