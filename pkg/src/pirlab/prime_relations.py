"""Hierarchies of prime integer relations built from +/-1 sign sequences.

A level-``l`` relation is an aligned block of ``2**l`` signed integers whose
power sums ``sum(s_i * a_i**k)`` vanish for every ``k < l``.  Level ``l``
is reached only when every aligned block of that size qualifies, so the
hierarchy is a complete binary merge tree over the sequence.

All arithmetic is exact (Python ints).
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field

from .exceptions import FormatError, InvalidArgumentError
from .validation import check_integers, check_signs


def ptm_symbol(index: int) -> int:
    """Prouhet-Thue-Morse symbol at 0-based ``index``: +1 for even binary weight."""
    if index < 0:
        raise InvalidArgumentError("PTM index must be non-negative")
    return -1 if bin(index).count("1") & 1 else 1


def ptm_sequence(length: int) -> tuple[int, ...]:
    """First ``length`` PTM symbols, ``+1 -1 -1 +1 -1 +1 +1 -1 ...``."""
    if int(length) != length or length < 1:
        raise InvalidArgumentError(f"length must be a positive integer, got {length!r}")
    return tuple(ptm_symbol(i) for i in range(int(length)))


def default_integers(length: int) -> tuple[int, ...]:
    """Assignment ``a_i = L + 1 - i``: position 1 carries ``L``, position ``L`` carries 1."""
    return tuple(range(length, 0, -1))


def format_signs(signs) -> str:
    return "".join("+" if s > 0 else "-" for s in signs)


def power_sum(signs, integers, k: int, block: tuple[int, int] | None = None) -> int:
    """Exact signed power sum ``sum_{i in block} s_i * a_i**k`` (``a**0 == 1``)."""
    signs = check_signs(signs)
    integers = check_integers(integers, len(signs))
    if k < 0:
        raise InvalidArgumentError("power k must be non-negative")
    lo, hi = (0, len(signs)) if block is None else block
    if not 0 <= lo <= hi <= len(signs):
        raise InvalidArgumentError(f"block [{lo}, {hi}) out of range for length {len(signs)}")
    return _power_sum(signs, integers, k, lo, hi)


def _power_sum(signs, integers, k, lo, hi) -> int:
    return sum(s * a**k for s, a in zip(signs[lo:hi], integers[lo:hi]))


@dataclass(frozen=True)
class RelationNode:
    level: int
    lo: int
    hi: int
    power_sums: tuple[int, ...]
    is_prime: bool

    @property
    def block(self) -> tuple[int, int]:
        return (self.lo, self.hi)


@dataclass(frozen=True)
class Hierarchy:
    signs: tuple[int, ...]
    integers: tuple[int, ...]
    levels: tuple[tuple[RelationNode, ...], ...]
    structural_level: int
    # first level at which some block failed (or could not be formed)
    blocked_level: int
    # (lo, hi, k, value) of the first nonzero sum that stopped the process, if any
    blocking_sum: tuple[int, int, int, int] | None = field(default=None)

    def nodes(self, level: int) -> tuple[RelationNode, ...]:
        if not 1 <= level <= len(self.levels):
            return ()
        return self.levels[level - 1]

    def to_dict(self) -> dict:
        return {
            "signs": list(self.signs),
            "integers": list(self.integers),
            "levels": [
                {"level": i + 1, "blocks": [[node.lo, node.hi] for node in nodes]}
                for i, nodes in enumerate(self.levels)
            ],
            "structural_level": self.structural_level,
        }

    def to_json(self, indent: int | None = 2) -> str:
        return json.dumps(self.to_dict(), indent=indent)

    @classmethod
    def from_dict(cls, data: dict) -> "Hierarchy":
        """Rebuild from the JSON form and check that it matches a fresh build."""
        try:
            signs, integers = data["signs"], data["integers"]
            levels = data["levels"]
            level = data["structural_level"]
        except (KeyError, TypeError) as exc:
            raise FormatError(f"hierarchy JSON is missing a field: {exc}") from exc
        h = build_hierarchy(signs, integers)
        if h.structural_level != level:
            raise FormatError(
                f"stored structural_level {level} disagrees with recomputed {h.structural_level}"
            )
        if h.to_dict()["levels"] != levels:
            raise FormatError("stored level blocks disagree with the recomputed hierarchy")
        return h

    @classmethod
    def from_json(cls, text: str) -> "Hierarchy":
        try:
            data = json.loads(text)
        except json.JSONDecodeError as exc:
            raise FormatError(f"invalid hierarchy JSON: {exc}") from exc
        return cls.from_dict(data)


def is_prime_relation(node: RelationNode, signs, integers) -> bool:
    """True when the order-(l-1) sum vanishes on the block but on neither half.

    A relation that splits into two half-block relations of the same order
    is treated as composite.
    """
    signs = check_signs(signs)
    integers = check_integers(integers, len(signs))
    return _is_prime(signs, integers, node.level, node.lo, node.hi)


def _is_prime(signs, integers, level, lo, hi) -> bool:
    k = level - 1
    mid = (lo + hi) // 2
    return (
        _power_sum(signs, integers, k, lo, hi) == 0
        and _power_sum(signs, integers, k, lo, mid) != 0
        and _power_sum(signs, integers, k, mid, hi) != 0
    )


def build_hierarchy(signs, integers=None) -> Hierarchy:
    """Run the self-organization process from level 0 upward.

    Level ``l`` is created only if the sequence length is a multiple of
    ``2**l`` and every aligned block of that size has vanishing power sums
    for ``k = 0 .. l-1``.  The process stops at the first level that fails.
    """
    signs = check_signs(signs)
    integers = default_integers(len(signs)) if integers is None else check_integers(integers, len(signs))
    n = len(signs)
    levels: list[tuple[RelationNode, ...]] = []
    blocking = None
    level = 1
    while True:
        width = 1 << level
        if width > n or n % width:
            break
        nodes = []
        for lo in range(0, n, width):
            hi = lo + width
            sums = tuple(_power_sum(signs, integers, k, lo, hi) for k in range(level))
            bad = next((k for k, value in enumerate(sums) if value != 0), None)
            if bad is not None:
                blocking = (lo, hi, bad, sums[bad])
                break
            nodes.append(RelationNode(level, lo, hi, sums, _is_prime(signs, integers, level, lo, hi)))
        if blocking is not None:
            break
        levels.append(tuple(nodes))
        level += 1
    return Hierarchy(
        signs=signs,
        integers=integers,
        levels=tuple(levels),
        structural_level=len(levels),
        blocked_level=len(levels) + 1,
        blocking_sum=blocking,
    )


@dataclass(frozen=True)
class NodeCheck:
    level: int
    lo: int
    hi: int
    passed: bool
    message: str = ""


@dataclass(frozen=True)
class VerificationReport:
    checks: tuple[NodeCheck, ...]
    structural_level: int
    # level structural_level + 1 is genuinely unreachable
    maximal: bool
    blocked_at: int

    @property
    def passed(self) -> bool:
        return self.maximal and all(c.passed for c in self.checks)

    @property
    def failures(self) -> tuple[NodeCheck, ...]:
        return tuple(c for c in self.checks if not c.passed)


def verify_hierarchy(h: Hierarchy) -> VerificationReport:
    """Recompute every node from the base sequence, independently of the builder.

    Corrupted nodes are reported as failed checks rather than raised.
    """
    signs, ints = h.signs, h.integers
    n = len(signs)
    checks = []
    for level, nodes in enumerate(h.levels, start=1):
        width = 2**level
        expected_blocks = [(lo, lo + width) for lo in range(0, n - width + 1, width)]
        if [(node.lo, node.hi) for node in nodes] != expected_blocks:
            checks.append(NodeCheck(level, -1, -1, False, "level does not cover the sequence"))
        for node in nodes:
            problems = []
            if node.level != level:
                problems.append(f"node level {node.level} stored at level {level}")
            if node.hi - node.lo != width or node.lo % width:
                problems.append("block is not aligned")
            fresh = [sum(signs[i] * ints[i] ** k for i in range(node.lo, node.hi)) for k in range(level)]
            if list(node.power_sums) != fresh:
                problems.append(f"stored sums {list(node.power_sums)} != recomputed {fresh}")
            if any(fresh):
                problems.append(f"nonzero power sums {fresh}")
            checks.append(NodeCheck(level, node.lo, node.hi, not problems, "; ".join(problems)))

    nxt = h.structural_level + 1
    width = 2**nxt
    if width > n or n % width:
        maximal = True
    else:
        maximal = any(
            sum(signs[i] * ints[i] ** k for i in range(lo, lo + width)) != 0
            for lo in range(0, n, width)
            for k in range(nxt)
        )
    return VerificationReport(tuple(checks), h.structural_level, maximal, nxt)
