"""Sweeps over the control parameter v, concavity checks and the optimality-condition fit."""

from __future__ import annotations

import csv
import io
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field

import numpy as np
from sklearn.base import BaseEstimator, RegressorMixin
from sklearn.utils.validation import check_array, check_is_fitted, column_or_1d

from .complexity import problem_complexity, system_complexity
from .exceptions import InvalidArgumentError, RankDeficientError
from .instances import ProblemInstance
from .rng import derive_seed
from .swarm import RunConfig, run

DEFAULT_SLOPE = 0.67
DEFAULT_INTERCEPT = 0.33


def default_grid(points: int = 21) -> tuple[float, ...]:
    if points < 1:
        raise InvalidArgumentError("grid needs at least one point")
    if points == 1:
        return (0.0,)
    return tuple(round(i / (points - 1), 12) for i in range(points))


@dataclass(frozen=True)
class SweepConfig:
    grid: tuple[float, ...] = field(default_factory=default_grid)
    replicates: int = 20
    base: RunConfig = field(default_factory=RunConfig)

    def __post_init__(self):
        grid = tuple(float(v) for v in self.grid)
        if not grid:
            raise InvalidArgumentError("empty v grid")
        if any(not 0.0 <= v <= 1.0 for v in grid):
            raise InvalidArgumentError("grid values must lie in [0, 1]")
        if any(b <= a for a, b in zip(grid, grid[1:])):
            raise InvalidArgumentError("grid must be strictly increasing")
        if int(self.replicates) != self.replicates or self.replicates < 1:
            raise InvalidArgumentError("replicates must be a positive integer")
        object.__setattr__(self, "grid", grid)


@dataclass(frozen=True, eq=False)
class SweepResult:
    grid: np.ndarray
    means: np.ndarray
    stds: np.ndarray
    # mean C(A) over the replicates at each grid point (nan for n = 2)
    system_complexity: np.ndarray
    seeds: np.ndarray
    name: str = ""

    @classmethod
    def from_curve(cls, grid, means, name: str = "") -> "SweepResult":
        """Wrap an externally computed mean-distance curve."""
        grid = np.asarray(grid, dtype=np.float64)
        means = np.asarray(means, dtype=np.float64)
        if grid.shape != means.shape or grid.ndim != 1 or grid.size == 0:
            raise InvalidArgumentError("grid and means must be equal-length 1-D arrays")
        nan = np.full(grid.shape, np.nan)
        return cls(grid, means, np.zeros_like(means), nan, np.zeros((grid.size, 0), np.int64), name)

    @property
    def v_star(self) -> float:
        return find_v_star(self)

    def to_csv(self) -> str:
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(["v", "mean", "std", "C_A"])
        for v, m, s, c in zip(self.grid, self.means, self.stds, self.system_complexity):
            writer.writerow([repr(float(v)), repr(float(m)), repr(float(s)), repr(float(c))])
        return buf.getvalue()


def _grid_point(instance: ProblemInstance, base: RunConfig, v: float, seeds) -> tuple[list, list]:
    means, complexities = [], []
    for seed in seeds:
        cfg = RunConfig(base.n_agents, v, int(seed), base.tour_mode, base.ptm_offset_mode)
        res = run(instance, cfg)
        means.append(res.mean_distance)
        complexities.append(system_complexity(res.strategy_matrix) if instance.n > 2 else math.nan)
    return means, complexities


def _map(fn, tasks, jobs: int):
    if jobs <= 1 or len(tasks) <= 1:
        return [fn(*t) for t in tasks]
    with ProcessPoolExecutor(max_workers=jobs) as pool:
        return list(pool.map(fn, *zip(*tasks)))


def replicate_seeds(base_seed: int, problem_index: int, n_grid: int, replicates: int) -> np.ndarray:
    """Position-derived seeds, shape (grid points, replicates)."""
    return np.array(
        [[derive_seed(base_seed, problem_index, i, r) for r in range(replicates)] for i in range(n_grid)],
        dtype=np.int64,
    )


def sweep_v(instance: ProblemInstance, cfg: SweepConfig, problem_index: int = 0, jobs: int = 1) -> SweepResult:
    """Mean and spread of the average distance at every grid value of v.

    Results do not depend on ``jobs``: every replicate seed is derived from
    its position and the reduction runs in grid order.
    """
    seeds = replicate_seeds(cfg.base.seed, problem_index, len(cfg.grid), cfg.replicates)
    tasks = [(instance, cfg.base, v, seeds[i].tolist()) for i, v in enumerate(cfg.grid)]
    outputs = _map(_grid_point, tasks, jobs)
    ddof = 1 if cfg.replicates > 1 else 0
    means = np.array([math.fsum(d) / len(d) for d, _ in outputs])
    stds = np.array([float(np.std(d, ddof=ddof)) for d, _ in outputs])
    comp = np.array([math.fsum(c) / len(c) for _, c in outputs])
    return SweepResult(np.array(cfg.grid), means, stds, comp, seeds, instance.name)


def find_v_star(s: SweepResult) -> float:
    """Grid value with the smallest mean distance; ties go to the smaller v."""
    if len(s.grid) == 0:
        raise InvalidArgumentError("empty sweep")
    return float(s.grid[int(np.argmin(s.means))])


@dataclass(frozen=True)
class ConcavityReport:
    curvature: float
    concave: bool
    vertex: float
    interior_max: bool
    sign_changes: int
    unimodality: float
    unimodal: bool

    @property
    def flagged(self) -> bool:
        return self.concave and self.interior_max


def concavity_report(s: SweepResult) -> ConcavityReport:
    """Quadratic least-squares fit of performance (``-mean``) against v.

    ``unimodality`` is the fraction of consecutive difference pairs that
    change sign; a unimodal curve changes sign exactly once.
    """
    v = np.asarray(s.grid, dtype=np.float64)
    if v.size < 3:
        raise InvalidArgumentError("concavity needs at least three grid points")
    perf = -np.asarray(s.means, dtype=np.float64)
    a, b, _ = np.polyfit(v, perf, 2)
    vertex = -b / (2 * a) if a != 0 else math.nan
    concave = bool(a < 0)
    interior = bool(concave and v[0] < vertex < v[-1])
    signs = np.sign(np.diff(perf))
    signs = signs[signs != 0]
    changes = int(np.count_nonzero(signs[1:] != signs[:-1]))
    frac = changes / (signs.size - 1) if signs.size > 1 else 0.0
    return ConcavityReport(float(a), concave, float(vertex), interior, changes, frac, changes == 1)


@dataclass(frozen=True)
class OptimalityFit:
    x: np.ndarray
    y: np.ndarray
    slope: float
    intercept: float
    r2: float
    residuals: np.ndarray

    @property
    def k(self) -> int:
        return int(self.x.size)

    def summary_csv(self) -> str:
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(["slope", "intercept", "r2", "K"])
        writer.writerow([repr(self.slope), repr(self.intercept), repr(self.r2), self.k])
        return buf.getvalue()


def fit_line(x, y) -> OptimalityFit:
    """Closed-form simple least squares of ``y`` on ``x`` with R^2."""
    x = np.asarray(x, dtype=np.float64).ravel()
    y = np.asarray(y, dtype=np.float64).ravel()
    if x.size != y.size:
        raise InvalidArgumentError("x and y differ in length")
    if x.size < 2:
        raise InvalidArgumentError("need at least two points")
    xm, ym = x.mean(), y.mean()
    dx, dy = x - xm, y - ym
    sxx = math.fsum(dx * dx)
    if sxx == 0:
        raise RankDeficientError("all x values are identical")
    slope = math.fsum(dx * dy) / sxx
    intercept = ym - slope * xm
    residuals = y - (slope * x + intercept)
    ss_res = math.fsum(residuals * residuals)
    ss_tot = math.fsum(dy * dy)
    r2 = 1.0 - ss_res / ss_tot if ss_tot > 0 else 1.0
    return OptimalityFit(x, y, slope, intercept, r2, residuals)


class OptimalityRegressor(RegressorMixin, BaseEstimator):
    """Linear model ``C(A) = slope * C(p) + intercept`` fitted by least squares."""

    def fit(self, X, y):
        X = check_array(X, ensure_2d=False, dtype=np.float64)
        if X.ndim == 2:
            if X.shape[1] != 1:
                raise InvalidArgumentError("expected a single feature column C(p)")
            X = X[:, 0]
        y = column_or_1d(y)
        result = fit_line(X, y)
        self.coef_ = np.array([result.slope])
        self.intercept_ = result.intercept
        self.r2_ = result.r2
        self.fit_ = result
        return self

    def predict(self, X):
        check_is_fitted(self, "coef_")
        X = np.asarray(X, dtype=np.float64)
        X = X[:, 0] if X.ndim == 2 else X
        return self.coef_[0] * X + self.intercept_


def predict_complexity(c_p: float, slope: float = DEFAULT_SLOPE, intercept: float = DEFAULT_INTERCEPT) -> float:
    """System complexity at optimal performance predicted from the problem complexity."""
    return slope * float(c_p) + intercept


@dataclass(frozen=True)
class ProblemRow:
    id: int
    name: str
    n: int
    c_p: float
    v_star: float
    c_a: float


def rows_to_csv(rows) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(["id", "name", "n", "C_p", "v_star", "C_A"])
    for r in rows:
        writer.writerow([r.id, r.name, r.n, repr(r.c_p), repr(r.v_star), repr(r.c_a)])
    return buf.getvalue()


def rows_from_csv(text: str) -> list[ProblemRow]:
    reader = csv.DictReader(io.StringIO(text))
    try:
        return [
            ProblemRow(int(r["id"]), r["name"], int(r["n"]), float(r["C_p"]), float(r["v_star"]), float(r["C_A"]))
            for r in reader
        ]
    except (KeyError, ValueError) as exc:
        raise InvalidArgumentError(f"malformed problems CSV: {exc}") from exc


def problem_row(index: int, instance: ProblemInstance, sweep: SweepResult) -> ProblemRow:
    i = int(np.argmin(sweep.means))
    return ProblemRow(index, instance.name, instance.n, problem_complexity(instance.distances),
                      float(sweep.grid[i]), float(sweep.system_complexity[i]))


def optimality_fit(problems, cfg: SweepConfig, jobs: int = 1):
    """Sweep every problem, read C(A) at v*(p), and regress it on C(p).

    ``C(A)`` at the optimum is the replicate mean of the strategy-matrix
    complexity at ``v*``.  Returns ``(fit, rows, sweeps)``.
    """
    problems = list(problems)
    if len(problems) < 2:
        raise InvalidArgumentError("need at least two problems")
    sweeps = [sweep_v(p, cfg, i, jobs) for i, p in enumerate(problems)]
    rows = [problem_row(i, p, s) for i, (p, s) in enumerate(zip(problems, sweeps))]
    fit = fit_line([r.c_p for r in rows], [r.c_a for r in rows])
    return fit, rows, sweeps
