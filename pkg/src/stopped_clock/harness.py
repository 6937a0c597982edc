"""Monte Carlo studies: the finite-sample table and closed-form validations.

Every replica draws from its own sub-stream keyed by ``(seed, m, replica,
series)``, and results are reduced in replica order, so reported numbers do
not depend on the number of worker threads.
"""

from __future__ import annotations

import csv
import logging
import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Iterable, Optional, Sequence, TextIO

import numpy as np

from . import estimators as est
from .core import StoppedClockPath, build_y_random_index
from .patterns import prob
from .processes import (
    ArmaxParams,
    WindowRuleParams,
    gen_armax,
    gen_iid_frechet,
    gen_u_window_rule,
    make_stream,
)
from .theory import armax_inputs, tdc_y_lagm, theta_y_closed_form, theta_y_upcrossing

logger = logging.getLogger(__name__)

EXAMPLE_P = 1.0 - math.exp(-0.5)
EXAMPLE_KAPPA = 3
THREADS_ENV = "STOPPED_CLOCK_THREADS"

_X_STREAM, _U_STREAM = 0, 1


@dataclass(frozen=True)
class ModelConfig:
    """One stopped clock model instance.

    ``phi = None`` selects an i.i.d. Frechet base, otherwise ARMAX(phi).
    """

    phi: Optional[float] = None
    p: float = EXAMPLE_P
    kappa: int = EXAMPLE_KAPPA
    n: int = 1000
    seed: int = 0
    replicas: int = 1

    def __post_init__(self):
        if self.phi is not None:
            ArmaxParams(self.phi)
        WindowRuleParams(self.p, self.kappa)
        if self.n < 1 or self.replicas < 1:
            raise ValueError("n and replicas must be >= 1")
        if self.seed < 0:
            raise ValueError("seed must be non-negative")

    @property
    def window(self) -> WindowRuleParams:
        return WindowRuleParams(self.p, self.kappa)

    @property
    def base(self) -> str:
        return "iid-frechet" if self.phi is None else f"armax{{phi={self.phi}}}"


def resolve_threads(threads: Optional[int] = None) -> int:
    if threads is None:
        env = os.environ.get(THREADS_ENV)
        threads = int(env) if env else (os.cpu_count() or 1)
    return max(1, int(threads))


def simulate(config: ModelConfig, n: Optional[int] = None, *key: int) -> StoppedClockPath:
    """Simulate one stopped clock path of length ``n`` (default ``config.n``).

    ``kappa`` warm-up steps of (X, U) precede index 1 and serve as the
    pre-window, so Y_1 is well defined and stationary.
    """
    n = config.n if n is None else n
    k = config.kappa
    total = n + k
    xr = make_stream(config.seed, *key, _X_STREAM)
    ur = make_stream(config.seed, *key, _U_STREAM)
    if config.phi is None:
        x = gen_iid_frechet(total, xr)
    else:
        x = gen_armax(ArmaxParams(config.phi), total, xr)
    u = gen_u_window_rule(config.window, total, ur)
    xv, uv = x.values, u.values
    return build_y_random_index(xv[k:], uv[k:], pre=(xv[:k], uv[:k]), kappa=k)


def _map_ordered(fn, items: Sequence, threads: int) -> list:
    if threads <= 1:
        return [fn(i) for i in items]
    with ThreadPoolExecutor(max_workers=threads) as pool:
        return list(pool.map(fn, items))


# --- finite-sample study of the pattern estimators ---------------------------------

TABLE1_ESTIMATORS = ("p0", "p10", "p100")


@dataclass
class StudyCell:
    estimator: str
    m: int
    abias: float
    rmse: float
    truth: float
    replicas: int


@dataclass
class StudyReport:
    cells: list
    kappa_success: dict = field(default_factory=dict)

    def cell(self, estimator: str, m: int) -> StudyCell:
        for c in self.cells:
            if c.estimator == estimator and c.m == m:
                return c
        raise KeyError((estimator, m))

    def write_csv(self, fh: TextIO) -> None:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["estimator", "m", "abias", "rmse", "truth", "replicas"])
        for c in self.cells:
            w.writerow([c.estimator, c.m, format(c.abias, ".17g"), format(c.rmse, ".17g"),
                        format(c.truth, ".17g"), c.replicas])


def summarize_errors(estimates: np.ndarray, truth: float) -> tuple[float, float]:
    """Mean absolute error and root mean squared error around ``truth``."""
    err = np.asarray(estimates, dtype=np.float64) - truth
    return float(np.mean(np.abs(err))), float(np.sqrt(np.mean(err**2)))


def _table1_replica(config: ModelConfig, m: int, r: int) -> tuple:
    path = simulate(config, m, m, r)
    _, p0 = est.estimate_change_probs(path)
    return (
        p0,
        est.estimate_run_pattern_prob(path, 1),
        est.estimate_run_pattern_prob(path, 2),
        est.estimate_kappa(path),
    )


def run_table1_study(
    config: Optional[ModelConfig] = None,
    sizes: Iterable[int] = (100, 1000, 5000),
    threads: Optional[int] = None,
) -> StudyReport:
    """abias / rmse of the repeat-pattern estimators over ``config.replicas`` replicas."""
    if config is None:
        config = ModelConfig(replicas=1000, seed=1)
    w = config.window
    truths = {
        "p0": prob((0,), w),
        "p10": prob((1, 0), w),
        "p100": prob((1, 0, 0), w),
    }
    n_threads = resolve_threads(threads)
    cells = []
    kappa_success = {}
    for m in sizes:
        rows = _map_ordered(lambda r: _table1_replica(config, m, r), range(config.replicas), n_threads)
        arr = np.array(rows, dtype=np.float64)
        for j, name in enumerate(TABLE1_ESTIMATORS):
            abias, rmse = summarize_errors(arr[:, j], truths[name])
            cells.append(StudyCell(name, m, abias, rmse, truths[name], config.replicas))
        kappa_success[m] = float(np.mean(arr[:, 3] == config.kappa))
        logger.info("m=%d done, kappa success %.3f", m, kappa_success[m])
    return StudyReport(cells, kappa_success)


# --- closed form vs simulation ------------------------------------------------------


@dataclass
class ValidationRow:
    quantity: str
    phi: float
    kappa: int
    setting: float  # q for extremal index rows, lag for tdc rows
    target: float
    estimate: float
    series: str = "y"
    estimator: str = ""
    alt_target: Optional[float] = None

    @property
    def delta(self) -> float:
        return self.estimate - self.target

    def to_dict(self) -> dict:
        return {
            "quantity": self.quantity,
            "series": self.series,
            "estimator": self.estimator,
            "phi": self.phi,
            "kappa": self.kappa,
            "setting": self.setting,
            "target": self.target,
            "estimate": self.estimate,
            "delta": self.delta,
            "alt_target": self.alt_target,
        }


def run_theta_validation(
    config: ModelConfig,
    phis: Sequence[float],
    q_grid: Sequence[float] = (0.995,),
    include_raw: bool = True,
) -> list:
    """Intervals and runs estimates of theta_Y against the closed form.

    Each Y row carries the proposition-based target and, as ``alt_target``,
    the upcrossing-based value from :func:`theta_y_upcrossing`.

    One path of length ``config.n`` is simulated per phi.  With
    ``include_raw`` the underlying X path is also checked against 1 - phi.
    """
    rows = []
    for idx, phi in enumerate(phis):
        cfg = ModelConfig(phi, config.p, config.kappa, config.n, config.seed, 1)
        inputs = armax_inputs(phi, cfg.window)
        target = theta_y_closed_form(inputs)
        alt = theta_y_upcrossing(inputs)
        path = simulate(cfg, None, 0, idx)
        for q in q_grid:
            iv = est.extremal_index_intervals(path, q).value
            ru = est.extremal_index_runs(path, q, r=cfg.kappa).value
            rows.append(ValidationRow("theta", phi, cfg.kappa, q, target, iv, "y", "intervals", alt))
            rows.append(ValidationRow("theta", phi, cfg.kappa, q, target, ru, "y", "runs", alt))
            if include_raw:
                xiv = est.extremal_index_intervals(path.x, q).value
                rows.append(ValidationRow("theta", phi, cfg.kappa, q, 1.0 - phi, xiv, "x", "intervals"))
    return rows


def run_tdc_validation(
    config: ModelConfig, lags: Sequence[int], q: float = 0.998, series_id: int = 0
) -> list:
    """Empirical lag-m tail dependence of Y against the closed form."""
    phi = 0.0 if config.phi is None else config.phi
    inputs = armax_inputs(phi, config.window, max_lag=max(lags))
    path = simulate(config, None, 1, series_id)
    rows = []
    for lag in lags:
        target = tdc_y_lagm(inputs, lag)
        value = est.empirical_tdc(path, lag, q).value
        rows.append(ValidationRow("tdc", phi, config.kappa, lag, target, value, "y", "empirical_tdc"))
    return rows
