"""
Regression trees grown by exhaustive least-squares splitting.

A node is split on the (feature, threshold) pair minimizing the summed squared error of its two
children, over every feature and every midpoint between consecutive distinct sorted values.
Rows with x[feature] <= threshold go left. Nodes with fewer than `leaf_min` rows, or with
constant targets, become leaves predicting the mean of their targets. No pruning.
"""

from __future__ import annotations

from collections.abc import Iterator
from dataclasses import dataclass

import numpy as np

from ..constants import CART_LEAF_MIN, CART_TIE_RTOL
from ..gp.kernel import FloatArray


@dataclass(frozen=True)
class Split:
    feature: int
    threshold: float
    sse: float


@dataclass(frozen=True)
class CartNode:
    value: float
    n_samples: int
    sse: float
    feature: int | None = None
    threshold: float | None = None
    left: CartNode | None = None
    right: CartNode | None = None

    @property
    def is_leaf(self) -> bool:
        return self.left is None


@dataclass(frozen=True)
class CartTree:
    root: CartNode
    n_features: int

    def predict_row(self, row: FloatArray) -> float:
        node = self.root
        while not node.is_leaf:
            go_left = row[node.feature] <= node.threshold  # type: ignore[index,operator]
            node = node.left if go_left else node.right  # type: ignore[assignment]
        return node.value

    def predict(self, rows: FloatArray) -> FloatArray:
        rows = np.atleast_2d(rows)
        return np.array([self.predict_row(row) for row in rows])

    def decision_path(self, row: FloatArray) -> list[tuple[int, float, bool]]:
        """(feature, threshold, went_left) for every split on the way to the row's leaf."""
        path = []
        node = self.root
        while not node.is_leaf:
            went_left = bool(row[node.feature] <= node.threshold)  # type: ignore[index,operator]
            path.append((node.feature, node.threshold, went_left))
            node = node.left if went_left else node.right  # type: ignore[assignment]
        return path  # type: ignore[return-value]

    def leaves(self) -> Iterator[CartNode]:
        stack = [self.root]
        while stack:
            node = stack.pop()
            if node.is_leaf:
                yield node
            else:
                stack.extend([node.right, node.left])  # type: ignore[list-item]

    @property
    def n_leaves(self) -> int:
        return sum(1 for _ in self.leaves())

    @property
    def training_sse(self) -> float:
        return float(sum(leaf.sse for leaf in self.leaves()))


def _sse(y: FloatArray) -> float:
    return float(np.sum((y - y.mean()) ** 2))


def best_split(X: FloatArray, y: FloatArray) -> Split | None:
    """
    Lowest-SSE split of (X, y), or None if every feature is constant.

    Ties go to the lowest feature index, then the lowest threshold. Candidates within
    CART_TIE_RTOL of the best, relative to the node SSE, count as ties, so that summation
    order does not pick the winner.
    """
    n, n_features = X.shape
    if n < 2:
        return None
    centered = y - y.mean()
    order = np.argsort(X, axis=0, kind="stable")
    xs = np.take_along_axis(X, order, axis=0)
    ys = centered[order]

    csum = np.cumsum(ys, axis=0)
    csq = np.cumsum(ys**2, axis=0)
    n_left = np.arange(1, n, dtype=np.float64)[:, None]
    n_right = n - n_left
    sum_left = csum[:-1]
    sum_right = csum[-1] - sum_left
    sq_left = csq[:-1]
    sq_right = csq[-1] - sq_left
    sse = (sq_left - sum_left**2 / n_left) + (sq_right - sum_right**2 / n_right)
    # only boundaries between distinct values are candidate thresholds
    sse = np.where(xs[1:] > xs[:-1], np.maximum(sse, 0.0), np.inf)

    best = float(np.min(sse))
    if not np.isfinite(best):
        return None
    tied = sse <= best + CART_TIE_RTOL * float(csq[-1, 0])
    feature = int(np.flatnonzero(tied.any(axis=0))[0])
    i = int(np.flatnonzero(tied[:, feature])[0])
    threshold = 0.5 * (xs[i, feature] + xs[i + 1, feature])
    return Split(feature=feature, threshold=float(threshold), sse=float(sse[i, feature]))


def _grow(X: FloatArray, y: FloatArray, leaf_min: int) -> CartNode:
    value = float(y.mean())
    node_sse = _sse(y)
    if y.size < leaf_min or np.all(y == y[0]):
        return CartNode(value=value, n_samples=y.size, sse=node_sse)
    split = best_split(X, y)
    if split is None:
        return CartNode(value=value, n_samples=y.size, sse=node_sse)
    goes_left = X[:, split.feature] <= split.threshold
    if goes_left.all() or not goes_left.any():
        return CartNode(value=value, n_samples=y.size, sse=node_sse)
    return CartNode(
        value=value,
        n_samples=y.size,
        sse=node_sse,
        feature=split.feature,
        threshold=split.threshold,
        left=_grow(X[goes_left], y[goes_left], leaf_min),
        right=_grow(X[~goes_left], y[~goes_left], leaf_min),
    )


def cart_fit(X: FloatArray, y: FloatArray, leaf_min: int = CART_LEAF_MIN) -> CartTree:
    """Grow a tree on design rows X (n, p) and targets y (n,)."""
    X = np.asarray(X, dtype=np.float64)
    y = np.asarray(y, dtype=np.float64)
    if X.ndim != 2 or y.shape != (X.shape[0],) or y.size == 0:
        raise ValueError(f"expected X of shape (n, p) and y of shape (n,), n >= 1; got {X.shape} and {y.shape}")
    return CartTree(root=_grow(X, y, leaf_min), n_features=X.shape[1])


def cart_predict(tree: CartTree, row: FloatArray) -> float:
    return tree.predict_row(np.asarray(row, dtype=np.float64))
