"""Partition trees and piecewise-constant escalation mean functions.

A binary regression tree over (parameters, low-fidelity summary features)
partitions the feature space into cells; the mean function assigns each
cell an escalation rate nu_k, clamped to configured bounds.  Fitting is
greedy SSE minimisation, growing best-first until a leaf cap; splits use
"x <= threshold routes left", thresholds are midpoints between consecutive
distinct feature values, and ties between candidate splits resolve to the
lowest feature index then the lowest threshold, so fitting is deterministic
given the input order.

The serialisation is nested structured text (an indented if/else chart);
rendering and parsing round-trip bit-exactly because floats are written
with shortest round-trip representations.
"""

from __future__ import annotations

import heapq
import re
from dataclasses import dataclass

import numpy as np

__all__ = [
    "TreeParams",
    "Split",
    "Leaf",
    "PartitionTree",
    "BurninRecord",
    "MeanFunction",
    "TreeParseError",
    "fit_regression_tree",
    "fit_partition",
    "locate_cell",
    "eval_mean",
    "render_mean_function",
    "parse_mean_function",
]

NU_MIN_DEFAULT = 1e-3
NU_MAX_DEFAULT = 1e3


@dataclass(frozen=True)
class TreeParams:
    max_depth: int = 7
    min_leaf: int = 100
    max_leaves: int = 16

    def __post_init__(self):
        if self.max_depth < 0 or self.min_leaf < 1 or self.max_leaves < 1:
            raise ValueError("invalid tree hyperparameters")


@dataclass(frozen=True)
class Leaf:
    cell: int  # 1-based, numbered left to right
    fitted_value: float = 0.0


@dataclass(frozen=True)
class Split:
    feature: int
    threshold: float
    left: "Split | Leaf"
    right: "Split | Leaf"


@dataclass
class PartitionTree:
    root: Split | Leaf
    n_cells: int
    n_features: int
    feature_names: tuple[str, ...] | None = None
    degenerate: bool = False


@dataclass(frozen=True)
class BurninRecord:
    """One burn-in iteration's regression material for the schedule fit."""

    features: np.ndarray
    m: int
    target: float
    delta_abs: float


def locate_cell(tree: PartitionTree, features) -> int:
    """Cell index of a feature vector; equality routes left."""
    features = np.asarray(features, dtype=np.float64)
    node = tree.root
    while isinstance(node, Split):
        node = node.left if features[node.feature] <= node.threshold else node.right
    return node.cell


class _BuildNode:
    __slots__ = ("idx", "depth", "feature", "threshold", "left", "right", "value")

    def __init__(self, idx, depth, value):
        self.idx = idx
        self.depth = depth
        self.feature = -1
        self.threshold = 0.0
        self.left = None
        self.right = None
        self.value = value


def _best_split(X, y, idx, min_leaf):
    """Exhaustive best split of one node; returns (gain, feature, threshold)."""
    yi = y[idx]
    n = yi.shape[0]
    if n < 2 * min_leaf:
        return None
    if np.all(yi == yi[0]):
        return None
    mean = yi.mean()
    node_sse = float(np.sum((yi - mean) ** 2))
    if node_sse <= 0.0:
        return None
    best = None
    for f in range(X.shape[1]):
        xf = X[idx, f]
        order = np.argsort(xf, kind="stable")
        xs = xf[order]
        ys = yi[order]
        csum = np.cumsum(ys)
        csq = np.cumsum(ys * ys)
        total = csum[-1]
        total_sq = csq[-1]
        for p in range(min_leaf, n - min_leaf + 1):
            if xs[p - 1] == xs[p]:
                continue
            left_sse = float(csq[p - 1] - csum[p - 1] ** 2 / p)
            right_sum = total - csum[p - 1]
            right_sse = float((total_sq - csq[p - 1]) - right_sum**2 / (n - p))
            gain = node_sse - left_sse - right_sse
            if gain > 1e-12 * node_sse and (best is None or gain > best[0]):
                threshold = float(xs[p - 1] + (xs[p] - xs[p - 1]) / 2.0)
                # Guard against midpoints that round onto the right value.
                if not (xs[p - 1] <= threshold < xs[p]):
                    threshold = float(xs[p - 1])
                best = (gain, f, threshold)
    return best


def fit_regression_tree(X, y, params: TreeParams) -> tuple[Split | Leaf, int]:
    """Grow the tree; returns (root, number of leaves)."""
    X = np.asarray(X, dtype=np.float64)
    y = np.asarray(y, dtype=np.float64)
    if X.ndim != 2 or y.ndim != 1 or X.shape[0] != y.shape[0]:
        raise ValueError("features must be 2-d and aligned with 1-d targets")
    root = _BuildNode(np.arange(X.shape[0]), 0, float(y.mean()) if y.size else 0.0)
    n_leaves = 1
    heap: list = []
    push_seq = 0

    def consider(node: _BuildNode):
        nonlocal push_seq
        if node.depth >= params.max_depth:
            return
        found = _best_split(X, y, node.idx, params.min_leaf)
        if found is not None:
            gain, f, thr = found
            heapq.heappush(heap, (-gain, push_seq, node, f, thr))
            push_seq += 1

    if X.shape[0] > 0:
        consider(root)
    while heap and n_leaves < params.max_leaves:
        _, _, node, f, thr = heapq.heappop(heap)
        mask = X[node.idx, f] <= thr
        left = _BuildNode(node.idx[mask], node.depth + 1, float(y[node.idx[mask]].mean()))
        right = _BuildNode(node.idx[~mask], node.depth + 1, float(y[node.idx[~mask]].mean()))
        node.feature = f
        node.threshold = thr
        node.left = left
        node.right = right
        node.idx = None
        n_leaves += 1
        consider(left)
        consider(right)

    cells = [0]

    def freeze(node: _BuildNode):
        if node.left is None:
            cells[0] += 1
            return Leaf(cell=cells[0], fitted_value=node.value)
        return Split(
            feature=node.feature,
            threshold=node.threshold,
            left=freeze(node.left),
            right=freeze(node.right),
        )

    return freeze(root), n_leaves


def fit_partition(
    records: list[BurninRecord],
    params: TreeParams = TreeParams(),
    feature_names: tuple[str, ...] | None = None,
    n_features: int | None = None,
) -> PartitionTree:
    """Fit the escalation partition from burn-in records.

    Records that never escalated (m = 0) carry no high-fidelity signal and
    are excluded.  With no usable records the partition degenerates to a
    single cell, flagged on the returned tree.
    """
    usable = [r for r in records if r.m >= 1]
    if n_features is None:
        if records:
            n_features = int(np.asarray(records[0].features).shape[0])
        elif feature_names is not None:
            n_features = len(feature_names)
        else:
            raise ValueError("cannot infer the feature dimension")
    if feature_names is not None and len(feature_names) != n_features:
        raise ValueError("feature_names length does not match features")
    if not usable:
        return PartitionTree(
            root=Leaf(cell=1),
            n_cells=1,
            n_features=n_features,
            feature_names=feature_names,
            degenerate=True,
        )
    X = np.vstack([np.asarray(r.features, dtype=np.float64) for r in usable])
    y = np.array([r.target for r in usable], dtype=np.float64)
    root, n_cells = fit_regression_tree(X, y, params)
    return PartitionTree(
        root=root,
        n_cells=n_cells,
        n_features=n_features,
        feature_names=feature_names,
    )


@dataclass
class MeanFunction:
    """Piecewise-constant escalation means over a fitted partition."""

    uses_features = True

    tree: PartitionTree
    nu: np.ndarray
    nu_min: float = NU_MIN_DEFAULT
    nu_max: float = NU_MAX_DEFAULT

    def __post_init__(self):
        self.nu = np.asarray(self.nu, dtype=np.float64)
        if self.nu.shape != (self.tree.n_cells,):
            raise ValueError("nu length must equal the number of cells")
        if not (0 < self.nu_min <= self.nu_max):
            raise ValueError("invalid clamp bounds")

    def evaluate(self, theta, features) -> tuple[int, float]:
        k = locate_cell(self.tree, features)
        mu = float(min(max(self.nu[k - 1], self.nu_min), self.nu_max))
        return k, mu


def eval_mean(mean_fn: MeanFunction, theta, features) -> float:
    return mean_fn.evaluate(theta, features)[1]


class TreeParseError(ValueError):
    def __init__(self, line_no: int, message: str):
        self.line_no = line_no
        super().__init__(f"line {line_no}: {message}")


def _feature_label(tree: PartitionTree, index: int) -> str:
    if tree.feature_names is not None:
        return tree.feature_names[index]
    return f"x{index}"


def render_mean_function(mf: MeanFunction) -> str:
    """Canonical indented if/else rendering (also the storage format)."""
    tree = mf.tree
    names = tree.feature_names or tuple(f"x{i}" for i in range(tree.n_features))
    lines = [
        "# mean-function v1",
        "# features: " + " ".join(names),
        f"# clamps: {mf.nu_min!r} {mf.nu_max!r}",
    ]

    def emit(node, depth):
        pad = "    " * depth
        if isinstance(node, Leaf):
            lines.append(f"{pad}return nu[{node.cell}] = {float(mf.nu[node.cell - 1])!r}")
            return
        lines.append(f"{pad}if {_feature_label(tree, node.feature)} <= {node.threshold!r}:")
        emit(node.left, depth + 1)
        lines.append(f"{pad}else:")
        emit(node.right, depth + 1)

    emit(tree.root, 0)
    return "\n".join(lines) + "\n"


_IF_RE = re.compile(r"^if (\S+) <= (\S+):$")
_LEAF_RE = re.compile(r"^return nu\[(\d+)\] = (\S+)$")


def parse_mean_function(text: str) -> MeanFunction:
    """Parse the canonical rendering back into a mean function."""
    raw = text.splitlines()
    names = None
    clamps = (NU_MIN_DEFAULT, NU_MAX_DEFAULT)
    body: list[tuple[int, int, str]] = []  # (line_no, depth, stripped)
    for line_no, line in enumerate(raw, start=1):
        if not line.strip():
            continue
        if line.lstrip().startswith("#"):
            comment = line.strip()
            if comment.startswith("# features:"):
                names = tuple(comment[len("# features:") :].split())
            elif comment.startswith("# clamps:"):
                parts = comment[len("# clamps:") :].split()
                if len(parts) != 2:
                    raise TreeParseError(line_no, "clamps line needs two numbers")
                clamps = (float(parts[0]), float(parts[1]))
            continue
        indent = len(line) - len(line.lstrip(" "))
        if indent % 4 != 0:
            raise TreeParseError(line_no, "indentation must be multiples of 4 spaces")
        body.append((line_no, indent // 4, line.strip()))
    if not body:
        raise TreeParseError(0, "no tree content")

    name_index = {n: i for i, n in enumerate(names)} if names else None
    leaves: list[tuple[int, float]] = []
    pos = 0
    max_feature = -1

    def parse_node(depth: int):
        nonlocal pos, max_feature
        if pos >= len(body):
            raise TreeParseError(body[-1][0], "unexpected end of tree")
        line_no, d, content = body[pos]
        if d != depth:
            raise TreeParseError(line_no, f"expected depth {depth}, found {d}")
        m = _IF_RE.match(content)
        if m:
            pos += 1
            label, thr = m.group(1), m.group(2)
            if name_index is not None:
                if label not in name_index:
                    raise TreeParseError(line_no, f"unknown feature {label!r}")
                feature = name_index[label]
            else:
                if not label.startswith("x"):
                    raise TreeParseError(line_no, f"unknown feature {label!r}")
                feature = int(label[1:])
            max_feature = max(max_feature, feature)
            left = parse_node(depth + 1)
            if pos >= len(body):
                raise TreeParseError(body[-1][0], "missing else branch")
            e_no, e_d, e_content = body[pos]
            if e_d != depth or e_content != "else:":
                raise TreeParseError(e_no, "expected matching else")
            pos += 1
            right = parse_node(depth + 1)
            return Split(feature=feature, threshold=float(thr), left=left, right=right)
        m = _LEAF_RE.match(content)
        if m:
            pos += 1
            cell = int(m.group(1))
            value = float(m.group(2))
            if cell != len(leaves) + 1:
                raise TreeParseError(
                    line_no, f"cells must be numbered left to right; expected {len(leaves) + 1}"
                )
            leaves.append((cell, value))
            return Leaf(cell=cell)
        raise TreeParseError(line_no, f"cannot parse {content!r}")

    root = parse_node(0)
    if pos != len(body):
        raise TreeParseError(body[pos][0], "trailing content after tree")
    n_features = len(names) if names else max_feature + 1 if max_feature >= 0 else 1
    tree = PartitionTree(
        root=root,
        n_cells=len(leaves),
        n_features=n_features,
        feature_names=names,
    )
    nu = np.array([v for _, v in leaves], dtype=np.float64)
    return MeanFunction(tree=tree, nu=nu, nu_min=clamps[0], nu_max=clamps[1])
