"""Multi-agent TSP construction guided by a success threshold and the PTM rule.

N agents start together in city 0 and extend their routes one city per
step, each with either a random move or a greedy (nearest unvisited) move.
After every step the cumulative distances of all agents are pooled and
split by the threshold ``d_min + v (d_max - d_min)``: agents at or below
it are successful.  A successful agent keeps its strategy; an unsuccessful
one reads its next strategy from the Prouhet-Thue-Morse sequence
(+1 -> random, -1 -> greedy).
"""

from __future__ import annotations

import json
import math
from collections import Counter
from dataclasses import dataclass, field

import numpy as np
from sklearn.base import BaseEstimator

from .complexity import system_complexity
from .exceptions import ConsistencyError, InvalidArgumentError, InvalidStateError
from .instances import ProblemInstance
from .prime_relations import ptm_symbol
from .rng import CounterStreams
from .validation import check_unit_interval

RANDOM = 1
GREEDY = -1
TOUR_MODES = ("open", "closed")
PTM_OFFSET_MODES = ("staggered", "shared")


@dataclass(frozen=True)
class RunConfig:
    n_agents: int = 50
    v: float = 0.5
    seed: int = 0
    tour_mode: str = "open"
    ptm_offset_mode: str = "staggered"

    def __post_init__(self):
        if int(self.n_agents) != self.n_agents or self.n_agents < 1:
            raise InvalidArgumentError(f"n_agents must be a positive integer, got {self.n_agents!r}")
        object.__setattr__(self, "v", check_unit_interval(self.v))
        if self.tour_mode not in TOUR_MODES:
            raise InvalidArgumentError(f"tour_mode must be one of {TOUR_MODES}")
        if self.ptm_offset_mode not in PTM_OFFSET_MODES:
            raise InvalidArgumentError(f"ptm_offset_mode must be one of {PTM_OFFSET_MODES}")


@dataclass
class AgentState:
    """One agent, used by the step-level helpers below."""

    current: int = 0
    visited: set[int] = field(default_factory=lambda: {0})
    route: list[int] = field(default_factory=list)
    distance: float = 0.0
    last_strategy: int | None = None
    last_success: bool | None = None
    ptm_cursor: int = 0

    def move(self, city: int, instance: ProblemInstance) -> None:
        if city in self.visited:
            raise InvalidStateError(f"city {city} already visited")
        self.distance += float(instance.distances[self.current, city])
        self.route.append(city)
        self.visited.add(city)
        self.current = city


def _unvisited(agent: AgentState, instance: ProblemInstance) -> list[int]:
    left = [c for c in range(instance.n) if c not in agent.visited]
    if not left:
        raise InvalidStateError("no unvisited city remains")
    return left


def greedy_next(agent: AgentState, instance: ProblemInstance) -> int:
    """Nearest unvisited city; ties go to the smallest index."""
    row = instance.distances[agent.current]
    return min(_unvisited(agent, instance), key=lambda c: (row[c], c))


def random_next(agent: AgentState, instance: ProblemInstance, draw: float) -> int:
    """Unvisited city picked uniformly by a draw in [0, 1) (ascending city order)."""
    left = _unvisited(agent, instance)
    return left[min(int(draw * len(left)), len(left) - 1)]


def classify_success(distances, v: float) -> np.ndarray:
    """Agents whose distance is at or below ``d_min + v (d_max - d_min)``."""
    d = np.asarray(distances, dtype=np.float64)
    if d.size == 0:
        raise InvalidArgumentError("no distances to classify")
    v = check_unit_interval(v)
    lo, hi = d.min(), d.max()
    threshold = hi if v == 1.0 else lo + v * (hi - lo)
    return d <= threshold


def choose_strategy(agent: AgentState) -> int:
    """Keep a successful strategy, otherwise consult the PTM sequence at the agent's cursor."""
    if agent.last_strategy is None:
        return RANDOM
    if agent.last_success:
        return agent.last_strategy
    strategy = RANDOM if ptm_symbol(agent.ptm_cursor) == 1 else GREEDY
    agent.ptm_cursor += 1
    return strategy


def initial_cursors(n_agents: int, mode: str) -> np.ndarray:
    if mode == "staggered":
        return np.arange(n_agents, dtype=np.int64)
    return np.zeros(n_agents, dtype=np.int64)


@dataclass(frozen=True, eq=False)
class RunResult:
    strategy_matrix: np.ndarray
    routes: np.ndarray
    distances: np.ndarray
    mean_distance: float
    route_counts: dict[tuple[int, ...], int]
    route_lengths: dict[tuple[int, ...], float]
    config: RunConfig

    @property
    def n_agents(self) -> int:
        return self.strategy_matrix.shape[0]

    def to_dict(self) -> dict:
        table = [
            {"route": list(r), "count": self.route_counts[r], "distance": self.route_lengths[r]}
            for r in sorted(self.route_counts)
        ]
        return {
            "config": {
                "n_agents": self.config.n_agents, "v": self.config.v, "seed": self.config.seed,
                "tour_mode": self.config.tour_mode, "ptm_offset_mode": self.config.ptm_offset_mode,
            },
            "strategy_matrix": ["".join("+" if s > 0 else "-" for s in row) for row in self.strategy_matrix],
            "routes": self.routes.tolist(),
            "distances": self.distances.tolist(),
            "mean_distance": self.mean_distance,
            "route_table": table,
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=1)


def run(instance: ProblemInstance, config: RunConfig) -> RunResult:
    """Run all agents for ``n - 1`` steps and record strategies and routes."""
    if not isinstance(instance, ProblemInstance):
        instance = ProblemInstance(instance)
    n, N = instance.n, config.n_agents
    if n < 2:
        raise InvalidArgumentError("a run needs at least two cities")
    d = np.asarray(instance.distances)
    streams = CounterStreams(config.seed)
    rows = np.arange(N)

    visited = np.zeros((N, n), dtype=bool)
    visited[:, 0] = True
    current = np.zeros(N, dtype=np.int64)
    cumulative = np.zeros(N)
    routes = np.empty((N, n - 1), dtype=np.int64)
    S = np.empty((N, n - 1), dtype=np.int8)
    cursor = initial_cursors(N, config.ptm_offset_mode)
    strategy = np.full(N, RANDOM, dtype=np.int8)
    success = np.ones(N, dtype=bool)

    for step in range(n - 1):
        if step > 0:
            consult = ~success
            if consult.any():
                symbols = np.array([ptm_symbol(int(c)) for c in cursor[consult]], dtype=np.int8)
                strategy = strategy.copy()
                strategy[consult] = np.where(symbols == 1, RANDOM, GREEDY)
                cursor[consult] += 1
        left = n - 1 - step
        # every agent has the same number of unvisited cities, listed in ascending order
        unvisited = np.nonzero(~visited)[1].reshape(N, left)
        pick = np.minimum((streams.uniforms(step, N) * left).astype(np.int64), left - 1)
        random_city = unvisited[rows, pick]
        masked = np.where(visited, np.inf, d[current])
        greedy_city = np.argmin(masked, axis=1)
        nxt = np.where(strategy == RANDOM, random_city, greedy_city)

        cumulative = cumulative + d[current, nxt]
        visited[rows, nxt] = True
        routes[:, step] = nxt
        S[:, step] = strategy
        current = nxt
        success = classify_success(cumulative, config.v)

    if config.tour_mode == "closed":
        cumulative = cumulative + d[current, 0]

    counts = Counter(tuple(int(c) for c in r) for r in routes)
    lengths: dict[tuple[int, ...], float] = {}
    for r, dist in zip(routes, cumulative):
        lengths.setdefault(tuple(int(c) for c in r), float(dist))
    return RunResult(
        strategy_matrix=S,
        routes=routes,
        distances=cumulative,
        mean_distance=math.fsum(cumulative.tolist()) / N,
        route_counts=dict(counts),
        route_lengths=lengths,
        config=config,
    )


def route_length(route, instance: ProblemInstance, closed: bool = False) -> float:
    """Distance of ``[0] + route`` (plus the return leg when ``closed``), summed leg by leg."""
    d = instance.distances
    total, prev = 0.0, 0
    for c in route:
        total += float(d[prev, c])
        prev = c
    if closed:
        total += float(d[prev, 0])
    return total


def route_distribution(result: RunResult, instance: ProblemInstance | None = None,
                       rtol: float = 1e-12) -> dict[tuple[int, ...], tuple[float, float]]:
    """Map each route to ``(gamma / N, d(route))`` and check that they reproduce the mean.

    With ``instance`` given, route distances are recomputed from the distance
    matrix instead of taken from the run.
    """
    N = result.n_agents
    closed = result.config.tour_mode == "closed"
    dist = {}
    for r in sorted(result.route_counts):
        dist[r] = (
            result.route_counts[r] / N,
            route_length(r, instance, closed) if instance is not None else result.route_lengths[r],
        )
    total = sum(result.route_counts.values())
    if total != N:
        raise ConsistencyError(f"route counts sum to {total}, expected {N}")
    weighted = math.fsum(result.route_counts[r] * dist[r][1] for r in dist) / N
    if abs(weighted - result.mean_distance) > rtol * max(1.0, abs(result.mean_distance)):
        raise ConsistencyError(
            f"sum of gamma/N * d(route) = {weighted!r} differs from mean distance {result.mean_distance!r}"
        )
    return dist


class SwarmTSP(BaseEstimator):
    """Estimator wrapper around :func:`run`.

    ``fit`` takes a distance matrix or a :class:`ProblemInstance`; ``score``
    returns the performance ``-mean_distance`` so that larger is better.
    """

    def __init__(self, n_agents=50, v=0.5, seed=0, tour_mode="open", ptm_offset_mode="staggered"):
        self.n_agents = n_agents
        self.v = v
        self.seed = seed
        self.tour_mode = tour_mode
        self.ptm_offset_mode = ptm_offset_mode

    def _config(self) -> RunConfig:
        return RunConfig(self.n_agents, self.v, self.seed, self.tour_mode, self.ptm_offset_mode)

    def fit(self, X, y=None):
        instance = X if isinstance(X, ProblemInstance) else ProblemInstance(X)
        self.result_ = run(instance, self._config())
        self.strategy_matrix_ = self.result_.strategy_matrix
        self.routes_ = self.result_.routes
        self.mean_distance_ = self.result_.mean_distance
        self.n_cities_ = instance.n
        self.system_complexity_ = (
            system_complexity(self.strategy_matrix_) if instance.n > 2 else float("nan")
        )
        return self

    def score(self, X, y=None) -> float:
        instance = X if isinstance(X, ProblemInstance) else ProblemInstance(X)
        return -run(instance, self._config()).mean_distance
