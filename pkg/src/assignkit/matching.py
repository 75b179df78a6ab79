"""Minimum-cost bipartite matching between predictions and ground truths.

Cost matrices are ``(M, K)`` with one row per prediction and one column
per ground truth.  Solutions are label vectors of length ``M``: entry
``i`` is the ground-truth index matched to prediction ``i``, or
:data:`BACKGROUND` when prediction ``i`` is unmatched.  Every column is
always covered, which requires ``M >= K`` (``M >= B * K`` for the
B-per-ground-truth variant).
"""

from __future__ import annotations

import numpy as np
from scipy.optimize import linear_sum_assignment

__all__ = [
    "BACKGROUND",
    "IGNORE",
    "InfeasibleMatchingError",
    "solve_assignment",
    "solve_b_matching",
    "matched_cost",
]

# Shared label vocabulary for assignment vectors: entries >= 0 are
# ground-truth indices, BACKGROUND marks an unmatched prediction, IGNORE
# marks a prediction excluded from supervision entirely (e.g. overlapping
# a crowd region).
BACKGROUND = -1
IGNORE = -2


class InfeasibleMatchingError(ValueError):
    """Raised when there are too few predictions to cover every ground truth."""


def _validated(cost) -> np.ndarray:
    arr = np.asarray(cost, dtype=np.float64)
    if arr.ndim != 2:
        raise ValueError(f"cost matrix must be 2-D, got shape {arr.shape}")
    if not np.isfinite(arr).all():
        raise ValueError("cost matrix entries must be finite")
    return arr


def solve_assignment(cost) -> np.ndarray:
    """Exact minimum-cost one-to-one assignment covering every column.

    Returns an int64 label vector of length ``M``.  Ties between
    equal-cost optima are resolved deterministically: a canonicalization
    pass walks columns in ascending order and applies cost-preserving
    exchanges so each column ends up with the lowest prediction index
    reachable by a single swap or substitution.
    """
    arr = _validated(cost)
    m, k = arr.shape
    if m < k:
        raise InfeasibleMatchingError(
            f"need at least as many predictions as ground truths, got {m} < {k}"
        )
    labels = np.full(m, BACKGROUND, dtype=np.int64)
    if k == 0:
        return labels
    rows, cols = linear_sum_assignment(arr)
    row_of = np.empty(k, dtype=np.int64)
    row_of[cols] = rows
    row_of = _canonicalize(arr, row_of)
    labels[row_of] = np.arange(k, dtype=np.int64)
    return labels


def solve_b_matching(cost, b: int) -> np.ndarray:
    """Assign exactly ``b`` predictions to every ground truth.

    Reduced to one-to-one matching by duplicating each cost column ``b``
    times, then folding the duplicate columns back onto their source
    ground truth.  ``b == 1`` follows the identical code path as
    :func:`solve_assignment`.
    """
    if b < 1:
        raise ValueError(f"b must be a positive integer, got {b}")
    arr = _validated(cost)
    m, k = arr.shape
    if m < b * k:
        raise InfeasibleMatchingError(
            f"need at least b * K predictions, got {m} < {b} * {k}"
        )
    tiled = np.tile(arr, (1, b))
    labels = solve_assignment(tiled)
    fold = labels.copy()
    fold[labels >= 0] = labels[labels >= 0] % k
    return fold


def matched_cost(cost, labels: np.ndarray) -> float:
    """Total cost of the matched pairs, summed in column order."""
    arr = _validated(cost)
    matched = labels >= 0
    rows = np.flatnonzero(matched)
    cols = labels[rows]
    order = np.argsort(cols, kind="stable")
    return float(np.sum(arr[rows[order], cols[order]]))


def _canonicalize(cost: np.ndarray, row_of: np.ndarray) -> np.ndarray:
    """Push each column's matched row toward lower indices, cost preserved.

    Columns are finalized in ascending order.  For column ``k`` the pass
    considers (a) substituting an unmatched row with exactly equal cost
    in that column and (b) swapping rows with a later column when the
    exchange leaves the total exactly unchanged, and takes the lowest
    row index reachable that way.  This keeps the labeling deterministic
    when several optima exist; longer alternating cycles are not
    explored.
    """
    m, k = cost.shape
    row_of = row_of.copy()
    matched_mask = np.zeros(m, dtype=bool)
    matched_mask[row_of] = True
    unmatched = np.flatnonzero(~matched_mask)
    for col in range(k):
        cur = row_of[col]
        best = cur
        best_kind = None  # ("sub", row) or ("swap", other_col)
        if unmatched.size:
            equal = unmatched[cost[unmatched, col] == cost[cur, col]]
            lower = equal[equal < best]
            if lower.size:
                best = int(lower[0])
                best_kind = ("sub", best)
        for other in range(col + 1, k):
            cand = row_of[other]
            if cand >= best:
                continue
            if (
                cost[cand, col] + cost[cur, other]
                == cost[cur, col] + cost[cand, other]
            ):
                best = int(cand)
                best_kind = ("swap", other)
        if best_kind is None:
            continue
        if best_kind[0] == "sub":
            row_of[col] = best
            unmatched = unmatched[unmatched != best]
            unmatched = np.sort(np.append(unmatched, cur))
        else:
            other = best_kind[1]
            row_of[col], row_of[other] = row_of[other], cur
    return row_of
