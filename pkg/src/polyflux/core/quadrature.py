"""
Fifth-order composite quadrature on uniform nodes (the primed sum Σ′).

Three families of coefficient rows:

- the generic rule for spans j - i > 6: Gregory end blocks of four weights
  at each end and unit weights in between;
- left-anchored rows for spans 1..7 starting at node 0, which never use f_0
  (the density may jump there) and may read one node past the span end;
- right-anchored rows for spans 1..6 ending at node N, which may read one
  node before the span start.

Rows are kept as exact fractions and rendered to floats once at import.
Spans no row covers (short spans strictly inside the grid) are rejected.
"""

from fractions import Fraction as Fr
from functools import lru_cache
from typing import Any

import numpy as np
from numpy.typing import NDArray

from .errors import UnsupportedSpanError

GENERIC_END_WEIGHTS: tuple[Fr, ...] = (Fr(251, 720), Fr(299, 240), Fr(211, 240), Fr(739, 720))

# Coefficients on nodes 0, 1, 2, ... (node 0 always carries 0).
LEFT_ROWS: dict[int, tuple[Fr, ...]] = {
    1: (Fr(0), Fr(55, 24), Fr(-59, 24), Fr(37, 24), Fr(-9, 24)),
    2: (Fr(0), Fr(8, 3), Fr(-5, 3), Fr(4, 3), Fr(-1, 3)),
    3: (Fr(0), Fr(21, 8), Fr(-9, 8), Fr(15, 8), Fr(-3, 8)),
    4: (Fr(0), Fr(21, 8), Fr(-7, 6), Fr(29, 12), Fr(1, 6), Fr(-1, 24)),
    5: (Fr(0), Fr(21, 8), Fr(-7, 6), Fr(19, 8), Fr(17, 24), Fr(1, 2), Fr(-1, 24)),
    6: (Fr(0), Fr(21, 8), Fr(-7, 6), Fr(19, 8), Fr(2, 3), Fr(25, 24), Fr(1, 2), Fr(-1, 24)),
    7: (Fr(0), Fr(21, 8), Fr(-7, 6), Fr(19, 8), Fr(2, 3), Fr(1), Fr(25, 24), Fr(1, 2), Fr(-1, 24)),
}

# Coefficients on nodes N, N-1, N-2, ...
# Span 1 uses 9/24 on f_N; the row then integrates constants exactly.
RIGHT_ROWS: dict[int, tuple[Fr, ...]] = {
    1: (Fr(9, 24), Fr(19, 24), Fr(-5, 24), Fr(1, 24)),
    2: (Fr(1, 3), Fr(4, 3), Fr(1, 3)),
    3: (Fr(1, 3), Fr(31, 24), Fr(7, 8), Fr(13, 24), Fr(-1, 24)),
    4: (Fr(1, 3), Fr(31, 24), Fr(5, 6), Fr(13, 12), Fr(1, 2), Fr(-1, 24)),
    5: (Fr(1, 3), Fr(31, 24), Fr(5, 6), Fr(25, 24), Fr(25, 24), Fr(1, 2), Fr(-1, 24)),
    6: (Fr(1, 3), Fr(31, 24), Fr(5, 6), Fr(25, 24), Fr(1), Fr(25, 24), Fr(1, 2), Fr(-1, 24)),
}

_GENERIC = np.array([float(w) for w in GENERIC_END_WEIGHTS])
_LEFT = {s: np.array([float(w) for w in row]) for s, row in LEFT_ROWS.items()}
_RIGHT = {s: np.array([float(w) for w in row]) for s, row in RIGHT_ROWS.items()}

MAX_LEFT_SPAN = max(LEFT_ROWS)
MAX_RIGHT_SPAN = max(RIGHT_ROWS)


def rule_for(lo: int, hi: int, n: int) -> str:
    """Name the coefficient family used for the span (lo, hi) on nodes 0..n."""
    if not 0 <= lo <= hi <= n:
        raise UnsupportedSpanError(f"span ({lo}, {hi}) outside nodes 0..{n}")
    if lo == hi:
        return "empty"
    if lo == 0 and hi <= MAX_LEFT_SPAN:
        return "left"
    if hi == n and hi - lo <= MAX_RIGHT_SPAN:
        return "right"
    if hi - lo > 6:
        return "generic"
    raise UnsupportedSpanError(f"no composite rule for the interior span ({lo}, {hi})")


@lru_cache(maxsize=4096)
def primed_weights(lo: int, hi: int, n: int) -> NDArray[np.float64]:
    """
    Dense weight vector w over nodes 0..n with Σ′_{k=lo}^{hi} f_k = w·f.

    Args:
        lo: First node of the span
        hi: Last node of the span
        n: Index of the last grid node

    Returns:
        Read-only array of length n+1

    Raises:
        UnsupportedSpanError: If no rule covers the span or a row would read
            past the grid
    """
    w = np.zeros(n + 1)
    kind = rule_for(lo, hi, n)
    if kind == "left":
        row = _LEFT[hi]
        if len(row) > n + 1:
            raise UnsupportedSpanError(f"span ({lo}, {hi}) needs {len(row)} nodes, grid has {n + 1}")
        w[: len(row)] = row
    elif kind == "right":
        row = _RIGHT[hi - lo]
        if len(row) > n + 1:
            raise UnsupportedSpanError(f"span ({lo}, {hi}) needs {len(row)} nodes, grid has {n + 1}")
        w[n - len(row) + 1 :] = row[::-1]
    elif kind == "generic":
        w[lo + 4 : hi - 3] = 1.0
        w[lo : lo + 4] = _GENERIC
        w[hi - 3 : hi + 1] = _GENERIC[::-1]
    w.flags.writeable = False
    return w


def weighted_sum(values: NDArray[np.float64], lo: int, hi: int) -> float:
    """
    Primed sum Σ′_{k=lo}^{hi} values_k.

    Args:
        values: Samples f_0..f_n
        lo: First node of the span
        hi: Last node of the span

    Returns:
        The composite-rule sum (0 for an empty span)
    """
    n = len(values) - 1
    if lo == hi:
        rule_for(lo, hi, n)
        return 0.0
    return float(np.dot(primed_weights(lo, hi, n), values))


def integrate(values: NDArray[np.float64], spacing: Any, lo: int, hi: int) -> float:
    """Δx · Σ′_{k=lo}^{hi} values_k; spacing is a Grid or the step Δx itself."""
    dx = float(getattr(spacing, "dx", spacing))
    return dx * weighted_sum(values, lo, hi)


def trapezoid_weights(lo: int, hi: int, n: int) -> NDArray[np.float64]:
    """Trapezoidal weights over (lo, hi), for spans the composite rule does not cover."""
    w = np.zeros(n + 1)
    if hi > lo:
        w[lo : hi + 1] = 1.0
        w[lo] = w[hi] = 0.5
    return w
