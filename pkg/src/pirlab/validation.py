"""Input validation helpers used at every public entry point."""

from __future__ import annotations

from fractions import Fraction
from numbers import Integral, Rational

import numpy as np
from sklearn.utils.validation import check_array

from .exceptions import DegenerateInstanceError, FormatError, InvalidArgumentError


def check_signs(signs) -> tuple[int, ...]:
    """Return ``signs`` as a tuple of Python ints, each exactly +1 or -1."""
    if isinstance(signs, str):
        signs = [+1 if c == "+" else -1 if c == "-" else c for c in signs]
    out = []
    for s in signs:
        if isinstance(s, (bool, np.bool_)) or not isinstance(s, (Integral, np.integer)):
            raise InvalidArgumentError(f"sign entries must be +1 or -1, got {s!r}")
        s = int(s)
        if s not in (1, -1):
            raise InvalidArgumentError(f"sign entries must be +1 or -1, got {s!r}")
        out.append(s)
    if not out:
        raise InvalidArgumentError("sign sequence must be non-empty")
    return tuple(out)


def check_integers(integers, length: int | None = None) -> tuple[int, ...]:
    out = []
    for a in integers:
        if isinstance(a, (bool, np.bool_)) or not isinstance(a, (Integral, np.integer)):
            raise InvalidArgumentError(f"integer assignment entries must be integers, got {a!r}")
        out.append(int(a))
    if length is not None and len(out) != length:
        raise InvalidArgumentError(
            f"integer assignment has length {len(out)}, sign sequence has length {length}"
        )
    return tuple(out)


def as_fraction(value, name: str = "value", positive: bool = False) -> Fraction:
    """Convert ints, Fractions and ``"p/q"`` strings to an exact Fraction.

    Floats are rejected: the geometry is exact and a float would silently
    carry its binary rounding into every coefficient.
    """
    if isinstance(value, (bool, np.bool_)):
        raise InvalidArgumentError(f"{name} must be rational, got {value!r}")
    if isinstance(value, str):
        try:
            frac = Fraction(value.strip())
        except (ValueError, ZeroDivisionError) as exc:
            raise InvalidArgumentError(f"{name}: cannot parse {value!r} as a rational") from exc
    elif isinstance(value, (Rational, np.integer)):
        frac = Fraction(int(value)) if isinstance(value, np.integer) else Fraction(value)
    else:
        raise InvalidArgumentError(f"{name} must be an int, Fraction or 'p/q' string, got {value!r}")
    if positive and frac <= 0:
        raise InvalidArgumentError(f"{name} must be positive, got {frac}")
    return frac


def check_distance_matrix(d, allow_degenerate: bool = False, atol: float = 1e-12) -> np.ndarray:
    """Validate a symmetric, non-negative, zero-diagonal distance matrix."""
    try:
        d = check_array(d, dtype=np.float64, ensure_min_samples=1, ensure_min_features=1)
    except ValueError as exc:
        raise FormatError(str(exc)) from exc
    n, m = d.shape
    if n != m:
        raise FormatError(f"distance matrix must be square, got {n}x{m}")
    if np.any(d < 0):
        raise FormatError("distance matrix has negative entries")
    if np.any(np.diag(d) != 0):
        raise FormatError("distance matrix must have a zero diagonal")
    scale = max(float(d.max()), 1.0)
    if not np.allclose(d, d.T, rtol=0.0, atol=atol * scale):
        raise FormatError("distance matrix is not symmetric")
    d = (d + d.T) / 2.0
    if not allow_degenerate:
        off = d[~np.eye(n, dtype=bool)]
        if off.size and np.any(off <= 0):
            raise DegenerateInstanceError("distinct cities at zero distance")
    return d


def check_strategy_matrix(S) -> np.ndarray:
    S = np.asarray(S)
    if S.ndim != 2 or S.shape[0] < 1 or S.shape[1] < 1:
        raise InvalidArgumentError(f"strategy matrix must be a non-empty 2-D array, got shape {S.shape}")
    if not np.all((S == 1) | (S == -1)):
        raise InvalidArgumentError("strategy matrix entries must all be +1 or -1")
    return S.astype(np.float64)


def check_unit_interval(v, name: str = "v") -> float:
    v = float(v)
    if not 0.0 <= v <= 1.0:
        raise InvalidArgumentError(f"{name} must lie in [0, 1], got {v}")
    return v
