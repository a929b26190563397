"""Geometric patterns: iterated integrals of the +/-delta step function.

``Psi[0]`` is the step function taking ``s_i * delta`` on ``(t_{i-1}, t_i)``
with ``t_i = epsilon * i``.  ``Psi[l+1]`` is the antiderivative of ``Psi[l]``
vanishing at ``t_0``.  Over each qualifying level-``l`` block the region
between the graph of ``Psi[l]`` and the axis is a pattern with width
``2**l * epsilon``, height equal to the area of a level-``l-1`` pattern and
area ``width * height / 2``.

Every function here is held with exact rational coefficients; only arc
lengths are floating point.
"""

from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

import numpy as np
from scipy import integrate

from .exceptions import InvalidArgumentError, LevelUnreachableError
from .prime_relations import build_hierarchy
from .validation import as_fraction, check_signs

DEFAULT_TOL = 1e-9


@dataclass(frozen=True)
class GridSpec:
    epsilon: Fraction
    delta: Fraction
    length: int

    def __post_init__(self):
        object.__setattr__(self, "epsilon", as_fraction(self.epsilon, "epsilon", positive=True))
        object.__setattr__(self, "delta", as_fraction(self.delta, "delta", positive=True))
        if int(self.length) != self.length or self.length < 1:
            raise InvalidArgumentError(f"grid length must be a positive integer, got {self.length!r}")

    @property
    def breakpoints(self) -> tuple[Fraction, ...]:
        return tuple(self.epsilon * i for i in range(self.length + 1))


def _horner(coeffs: Sequence, x):
    acc = 0
    for c in reversed(coeffs):
        acc = acc * x + c
    return acc


@dataclass(frozen=True)
class PiecewisePoly:
    """Piecewise polynomial with exact rational coefficients.

    ``pieces[i]`` holds the coefficients (constant first) of the polynomial
    on ``[breakpoints[i], breakpoints[i+1]]`` in the local variable
    ``x = t - breakpoints[i]``.
    """

    breakpoints: tuple[Fraction, ...]
    pieces: tuple[tuple[Fraction, ...], ...]
    level: int = 0

    def __post_init__(self):
        if len(self.breakpoints) != len(self.pieces) + 1:
            raise InvalidArgumentError("need exactly one polynomial per interval")
        if any(b <= a for a, b in zip(self.breakpoints, self.breakpoints[1:])):
            raise InvalidArgumentError("breakpoints must be strictly increasing")

    @property
    def domain(self) -> tuple[Fraction, Fraction]:
        return self.breakpoints[0], self.breakpoints[-1]

    @property
    def degree(self) -> int:
        return max(len(p) for p in self.pieces) - 1

    def _locate(self, t) -> int:
        lo, hi = self.domain
        if not lo <= t <= hi:
            raise InvalidArgumentError(f"t = {t} outside the domain [{lo}, {hi}]")
        # right-continuous inside, left limit at the final breakpoint
        for i in range(len(self.pieces)):
            if t < self.breakpoints[i + 1]:
                return i
        return len(self.pieces) - 1

    def __call__(self, t):
        t = Fraction(t) if not isinstance(t, Fraction) else t
        i = self._locate(t)
        return _horner(self.pieces[i], t - self.breakpoints[i])

    def derivative(self) -> "PiecewisePoly":
        pieces = tuple(
            tuple(c * k for k, c in enumerate(p))[1:] or (Fraction(0),) for p in self.pieces
        )
        return PiecewisePoly(self.breakpoints, pieces, max(self.level - 1, 0))

    def integral(self, a=None, b=None) -> Fraction:
        """Exact definite integral over ``[a, b]`` (defaults to the whole domain)."""
        lo, hi = self.domain
        a = lo if a is None else Fraction(a)
        b = hi if b is None else Fraction(b)
        F = integrate_once(self, lo)
        return F(b) - F(a)

    def sample(self, points_per_interval: int) -> list[tuple[Fraction, Fraction]]:
        """Exact samples at equally spaced points, interval by interval, plus the right end."""
        out = []
        for i, p in enumerate(self.pieces):
            left, right = self.breakpoints[i], self.breakpoints[i + 1]
            h = (right - left) / points_per_interval
            for j in range(points_per_interval):
                out.append((left + j * h, _horner(p, j * h)))
        out.append((self.breakpoints[-1], _horner(self.pieces[-1], self.breakpoints[-1] - self.breakpoints[-2])))
        return out


def step_function(signs, grid: GridSpec) -> PiecewisePoly:
    """Level-0 pattern function: ``s_i * delta`` on the i-th interval of the grid."""
    signs = check_signs(signs)
    if len(signs) != grid.length:
        raise InvalidArgumentError(f"{len(signs)} signs for a grid of length {grid.length}")
    return PiecewisePoly(grid.breakpoints, tuple((s * grid.delta,) for s in signs), 0)


def integrate_once(f: PiecewisePoly, start=None) -> PiecewisePoly:
    """Exact continuous antiderivative ``F`` of ``f`` with ``F(start) == 0``."""
    lo, hi = f.domain
    start = lo if start is None else Fraction(start)
    if not lo <= start <= hi:
        raise InvalidArgumentError(f"start {start} outside the domain [{lo}, {hi}]")
    pieces = []
    constant = Fraction(0)
    for i, p in enumerate(f.pieces):
        q = (constant,) + tuple(c / (k + 1) for k, c in enumerate(p))
        pieces.append(q)
        constant = _horner(q, f.breakpoints[i + 1] - f.breakpoints[i])
    F = PiecewisePoly(f.breakpoints, tuple(pieces), f.level + 1)
    offset = F(start)
    if offset:
        F = PiecewisePoly(
            f.breakpoints, tuple((q[0] - offset,) + q[1:] for q in F.pieces), F.level
        )
    return F


def arc_length(f: PiecewisePoly, interval=None, tol: float = DEFAULT_TOL) -> float:
    """Arc length of the graph of ``f`` over ``interval`` by adaptive quadrature.

    The integrand ``sqrt(1 + f'(t)**2)`` is smooth on each piece, so each
    piece is integrated separately with a share of the error budget.
    """
    if not tol > 0:
        raise InvalidArgumentError("tol must be positive")
    lo, hi = f.domain if interval is None else (Fraction(interval[0]), Fraction(interval[1]))
    if not lo < hi:
        raise InvalidArgumentError(f"empty range [{lo}, {hi}]")
    if lo < f.domain[0] or hi > f.domain[1]:
        raise InvalidArgumentError("range extends beyond the domain of f")
    spans = []
    for i, p in enumerate(f.pieces):
        a = max(lo, f.breakpoints[i])
        b = min(hi, f.breakpoints[i + 1])
        if a < b:
            spans.append((f.breakpoints[i], a, b, p))
    share = tol / len(spans)
    total = 0.0
    for origin, a, b, p in spans:
        # derivative in the local variable, highest power first for np.polyval
        dcoef = [float(c * k) for k, c in enumerate(p)][1:][::-1]
        x0, x1 = float(a - origin), float(b - origin)
        if not any(dcoef):
            total += x1 - x0
            continue
        value, err = integrate.quad(
            lambda x: math.sqrt(1.0 + np.polyval(dcoef, x) ** 2),
            x0, x1, epsabs=share, epsrel=0.0, limit=500,
        )
        total += value
    return total


@dataclass(frozen=True)
class PatternMetrics:
    level: int
    lo: int
    hi: int
    width: Fraction
    height: Fraction
    area: Fraction
    arc_length: float
    # +1 if the pattern lies above the axis, -1 below
    orientation: int


@dataclass(frozen=True)
class PatternStack:
    grid: GridSpec
    signs: tuple[int, ...]
    functions: tuple[PiecewisePoly, ...]
    metrics: tuple[PatternMetrics, ...]
    structural_level: int

    @property
    def max_level(self) -> int:
        return len(self.functions) - 1

    def level_metrics(self, level: int) -> tuple[PatternMetrics, ...]:
        return tuple(m for m in self.metrics if m.level == level)

    def to_csv(self) -> str:
        return metrics_to_csv(self.metrics)


def _fmt_fraction(q: Fraction) -> str:
    return f"{q.numerator}/{q.denominator}"


def metrics_to_csv(metrics: Sequence[PatternMetrics]) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(["level", "block", "W", "H", "S", "arc_length"])
    for m in metrics:
        writer.writerow([
            m.level, f"{m.lo}:{m.hi}",
            _fmt_fraction(m.width), _fmt_fraction(m.height), _fmt_fraction(m.area),
            f"{m.arc_length:.12f}",
        ])
    return buf.getvalue()


def build_pattern_stack(signs, grid: GridSpec, max_level: int | None = None,
                        integers=None, tol: float = DEFAULT_TOL) -> PatternStack:
    """Build ``Psi[0] .. Psi[max_level]`` and the metrics of every qualifying block.

    ``max_level`` defaults to the structural level of the hierarchy over the
    same signs; asking for more raises :class:`LevelUnreachableError`.
    """
    signs = check_signs(signs)
    level = build_hierarchy(signs, integers).structural_level
    if max_level is None:
        max_level = level
    elif max_level > level:
        raise LevelUnreachableError(
            f"level {max_level} requested but the process stops at level {level}"
        )
    elif max_level < 0:
        raise InvalidArgumentError("max_level must be non-negative")

    functions = [step_function(signs, grid)]
    for _ in range(max_level + 1):
        functions.append(integrate_once(functions[-1], grid.breakpoints[0]))
    t = grid.breakpoints
    eps, delta = grid.epsilon, grid.delta

    metrics = []
    for i, s in enumerate(signs):
        metrics.append(PatternMetrics(0, i, i + 1, eps, delta, delta * eps, float(eps), s))
    for lvl in range(1, max_level + 1):
        psi, antiderivative = functions[lvl], functions[lvl + 1]
        width = 2**lvl
        for lo in range(0, len(signs), width):
            hi = lo + width
            mid = (t[lo] + t[hi]) / 2
            peak = psi(mid)
            signed_area = antiderivative(t[hi]) - antiderivative(t[lo])
            metrics.append(PatternMetrics(
                lvl, lo, hi, t[hi] - t[lo], abs(peak), abs(signed_area),
                arc_length(psi, (t[lo], t[hi]), tol), 1 if peak > 0 else -1,
            ))
    return PatternStack(grid, signs, tuple(functions[: max_level + 1]), tuple(metrics), level)


@dataclass(frozen=True)
class RenormalizedParams:
    epsilon_prime: Fraction
    delta_prime: Fraction


def renormalize(grid: GridSpec) -> RenormalizedParams:
    """Coarse-graining at level 4: ``epsilon' = 8 epsilon``, ``delta' = epsilon**3 delta``."""
    return RenormalizedParams(2**3 * grid.epsilon, grid.epsilon**3 * grid.delta)


def renormalized_level1(signs=(1, -1), grid: GridSpec | None = None) -> PiecewisePoly:
    """Level-1 triangle on the renormalized parameters.

    It has the width, height and area of a level-4 pattern on ``grid`` but a
    different boundary curve.
    """
    signs = check_signs(signs)
    if len(signs) != 2:
        raise InvalidArgumentError("the renormalized elementary pattern takes exactly two signs")
    if grid is None:
        raise InvalidArgumentError("a base grid is required")
    params = renormalize(grid)
    coarse = GridSpec(params.epsilon_prime, params.delta_prime, 2)
    return integrate_once(step_function(signs, coarse), 0)


@dataclass
class SvgOptions:
    width: float = 800.0
    layer_height: float = 160.0
    margin: float = 20.0
    samples_per_interval: int = 32
    stroke: str = "#1f4e79"
    colors: tuple[str, ...] = field(
        default=("#1f4e79", "#b5442c", "#2e7d32", "#6a1b9a", "#c77c02", "#00838f")
    )


def _num(x: float) -> str:
    return repr(float(x))


def render_svg(stack: PatternStack, grid: GridSpec | None = None, options: SvgOptions | None = None) -> str:
    """SVG 1.1 document with one ``<g>`` layer per level.

    Polyline vertices are written in data coordinates; each layer maps them
    into its band with a ``transform`` so that points can be read back
    exactly.
    """
    grid = stack.grid if grid is None else grid
    opts = options or SvgOptions()
    n_layers = len(stack.functions)
    total_h = opts.margin * 2 + opts.layer_height * n_layers
    total_w = opts.width + 2 * opts.margin
    t0, t1 = (float(x) for x in stack.functions[0].domain)
    sx = opts.width / (t1 - t0)
    lines = [
        '<?xml version="1.0" encoding="UTF-8"?>',
        f'<svg xmlns="http://www.w3.org/2000/svg" version="1.1" '
        f'width="{_num(total_w)}" height="{_num(total_h)}" viewBox="0 0 {_num(total_w)} {_num(total_h)}">',
    ]
    for lvl, psi in enumerate(stack.functions):
        samples = psi.sample(opts.samples_per_interval)
        ys = [float(y) for _, y in samples]
        amp = max(max(abs(y) for y in ys), 1e-300)
        sy = (opts.layer_height / 2 - opts.margin / 2) / amp
        cy = opts.margin + opts.layer_height * (lvl + 0.5)
        color = opts.colors[lvl % len(opts.colors)]
        pts = " ".join(f"{_num(float(t))},{_num(y)}" for (t, _), y in zip(samples, ys))
        lines.append(f'  <g id="level-{lvl}" class="level" data-level="{lvl}">')
        lines.append(
            f'    <line x1="{_num(opts.margin)}" y1="{_num(cy)}" x2="{_num(opts.margin + opts.width)}" '
            f'y2="{_num(cy)}" stroke="#999999" stroke-width="0.5"/>'
        )
        lines.append(
            f'    <polyline transform="translate({_num(opts.margin - t0 * sx)},{_num(cy)}) '
            f'scale({_num(sx)},{_num(-sy)})" fill="none" stroke="{color}" '
            f'stroke-width="1" vector-effect="non-scaling-stroke" points="{pts}"/>'
        )
        lines.append(
            f'    <text x="{_num(opts.margin)}" y="{_num(cy - opts.layer_height / 2 + 12)}" '
            f'font-family="sans-serif" font-size="11">level {lvl}</text>'
        )
        lines.append("  </g>")
    lines.append("</svg>")
    return "\n".join(lines) + "\n"
