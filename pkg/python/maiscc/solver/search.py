"""One-dimensional boundary search shared by the inner-layer solvers."""
from __future__ import annotations

from collections.abc import Callable


def bisect_boundary(
    predicate: Callable[[float], bool],
    good: float,
    bad: float,
    abs_tol: float = 0.0,
    rel_tol: float = 0.0,
    max_iter: int = 200,
) -> float:
    """Shrink ``[good, bad]`` (either order) around the switch of a monotone *predicate*.

    *predicate* must hold at *good* and fail at *bad*. Returns the final *good* end, so the
    result always satisfies the predicate. Stops once ``|good − bad| ≤ max(abs_tol,
    rel_tol·|good|)`` or when the midpoint no longer moves.
    """
    for _ in range(max_iter):
        if abs(good - bad) <= max(abs_tol, rel_tol * abs(good)):
            break
        mid = 0.5 * (good + bad)
        if mid in (good, bad):
            break
        if predicate(mid):
            good = mid
        else:
            bad = mid
    return good
