"""TSP problem instances: loaders for JSON / CSV / TSPLIB and generators."""

from __future__ import annotations

import csv
import io
import json
import math
from dataclasses import dataclass
from pathlib import Path

import numpy as np
from scipy.spatial.distance import cdist

from .exceptions import FormatError, InvalidArgumentError
from .validation import check_distance_matrix

GENERATOR_KINDS = ("uniform_square", "clustered", "equidistant")


@dataclass(frozen=True, eq=False)
class ProblemInstance:
    distances: np.ndarray
    coords: np.ndarray | None = None
    name: str = ""
    degenerate: bool = False

    def __post_init__(self):
        d = check_distance_matrix(self.distances, allow_degenerate=self.degenerate)
        d.setflags(write=False)
        object.__setattr__(self, "distances", d)
        if self.coords is not None:
            c = np.asarray(self.coords, dtype=np.float64)
            c.setflags(write=False)
            object.__setattr__(self, "coords", c)

    @property
    def n(self) -> int:
        return self.distances.shape[0]

    @property
    def d_max(self) -> float:
        return float(self.distances.max())

    def __eq__(self, other):
        if not isinstance(other, ProblemInstance):
            return NotImplemented
        return self.n == other.n and np.array_equal(self.distances, other.distances)

    @classmethod
    def from_coords(cls, coords, name: str = "", rounded: bool = False) -> "ProblemInstance":
        c = np.asarray(coords, dtype=np.float64)
        if c.ndim != 2 or c.shape[1] != 2 or c.shape[0] < 1:
            raise FormatError(f"coordinates must be an (n, 2) array, got shape {c.shape}")
        d = cdist(c, c)
        if rounded:
            # TSPLIB nint convention
            d = np.floor(d + 0.5)
        np.fill_diagonal(d, 0.0)
        return cls(d, c, name)

    def to_csv(self) -> str:
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        for row in self.distances:
            writer.writerow([repr(float(x)) for x in row])
        return buf.getvalue()

    def to_json(self) -> str:
        if self.coords is not None:
            return json.dumps({"name": self.name, "coords": self.coords.tolist()})
        return json.dumps({"name": self.name, "distances": self.distances.tolist()})


def _load_json(text: str, name: str) -> ProblemInstance:
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise FormatError(f"invalid JSON instance: {exc}") from exc
    if isinstance(data, dict) and "coords" in data:
        return ProblemInstance.from_coords(data["coords"], data.get("name", name))
    if isinstance(data, dict) and "distances" in data:
        return ProblemInstance(data["distances"], name=data.get("name", name))
    raise FormatError('JSON instance needs a "coords" or "distances" field')


def _load_csv(text: str, name: str) -> ProblemInstance:
    rows = [row for row in csv.reader(io.StringIO(text)) if row and any(c.strip() for c in row)]
    try:
        d = [[float(c) for c in row] for row in rows]
    except ValueError as exc:
        raise FormatError(f"non-numeric entry in CSV distance matrix: {exc}") from exc
    if len({len(r) for r in d}) > 1:
        raise FormatError("ragged CSV distance matrix")
    return ProblemInstance(d, name=name)


def _load_tsplib(text: str, name: str, rounded: bool) -> ProblemInstance:
    header: dict[str, str] = {}
    coords: list[tuple[float, float]] = []
    lines = iter(text.splitlines())
    for line in lines:
        line = line.strip()
        if not line:
            continue
        if line.startswith("NODE_COORD_SECTION"):
            for row in lines:
                row = row.strip()
                if not row or row == "EOF":
                    break
                parts = row.split()
                if len(parts) < 3:
                    raise FormatError(f"bad node line {row!r}")
                coords.append((float(parts[1]), float(parts[2])))
            break
        if line == "EOF":
            break
        if ":" in line:
            key, _, value = line.partition(":")
            header[key.strip().upper()] = value.strip()
        else:
            raise FormatError(f"unsupported TSPLIB section {line!r}")
    kind = header.get("EDGE_WEIGHT_TYPE", "")
    if kind != "EUC_2D":
        raise FormatError(f"unsupported TSPLIB EDGE_WEIGHT_TYPE {kind!r}; only EUC_2D is handled")
    if "DIMENSION" in header and int(header["DIMENSION"]) != len(coords):
        raise FormatError(f"DIMENSION {header['DIMENSION']} but {len(coords)} nodes listed")
    return ProblemInstance.from_coords(coords, header.get("NAME", name), rounded=rounded)


def parse_instance(text: str, fmt: str, name: str = "", tsplib_round: bool = False) -> ProblemInstance:
    """Parse instance text; ``fmt`` is one of ``"json"``, ``"csv"``, ``"tsplib"``."""
    if fmt == "json":
        return _load_json(text, name)
    if fmt == "csv":
        return _load_csv(text, name)
    if fmt == "tsplib":
        return _load_tsplib(text, name, tsplib_round)
    raise FormatError(f"unknown instance format {fmt!r}")


def load_instance(path, fmt: str | None = None, tsplib_round: bool = False) -> ProblemInstance:
    """Load an instance file, inferring the format from its suffix unless ``fmt`` is given.

    TSPLIB distances are exact Euclidean unless ``tsplib_round`` asks for the
    integer rounding of the TSPLIB EUC_2D convention.
    """
    path = Path(path)
    if fmt is None:
        fmt = {".json": "json", ".csv": "csv", ".tsp": "tsplib"}.get(path.suffix.lower())
        if fmt is None:
            raise FormatError(f"cannot infer the instance format of {path.name}")
    try:
        text = path.read_text()
    except OSError as exc:
        raise FormatError(f"cannot read {path}: {exc}") from exc
    return parse_instance(text, fmt, path.stem, tsplib_round)


def generate_problem(kind: str, n: int, seed: int, clusters: int | None = None,
                     spread: float = 0.05) -> ProblemInstance:
    """Deterministic random instance of the given kind.

    ``uniform_square`` draws cities in the unit square; ``clustered`` puts
    Gaussian blobs around ``clusters`` uniform centres; ``equidistant``
    sets every off-diagonal distance to 1.
    """
    if kind not in GENERATOR_KINDS:
        raise InvalidArgumentError(f"unsupported problem kind {kind!r}; choose from {GENERATOR_KINDS}")
    if n < 2:
        raise InvalidArgumentError("an instance needs at least two cities")
    rng = np.random.default_rng([int(seed), GENERATOR_KINDS.index(kind), n])
    name = f"{kind}-n{n}-s{seed}"
    if kind == "equidistant":
        return ProblemInstance(np.ones((n, n)) - np.eye(n), name=name)
    if kind == "uniform_square":
        return ProblemInstance.from_coords(rng.random((n, 2)), name)
    k = clusters if clusters is not None else max(2, int(round(math.sqrt(n) / 2)))
    centres = rng.random((k, 2))
    labels = np.arange(n) % k
    coords = centres[labels] + rng.normal(scale=spread, size=(n, 2))
    return ProblemInstance.from_coords(coords, name)
