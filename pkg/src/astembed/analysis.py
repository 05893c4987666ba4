"""Post-training analysis of the learned node-type embeddings.

Pairwise distances, nearest-neighbor tables, Lloyd k-means with k-means++
seeding, bottom-up agglomerative clustering, and dendrogram emission as
Newick, DOT, or a re-parsable merge-list TSV.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from astembed.embedding import EmbeddingModel
from astembed.rng import substream

__all__ = [
    "DistanceMatrix",
    "Dendrogram",
    "pairwise_distances",
    "nearest_neighbors",
    "kmeans",
    "agglomerate",
    "emit_dendrogram",
    "parse_dendrogram_tsv",
    "EmbeddingKMeans",
]

LINKAGES = ("single", "average", "complete")


@dataclass
class DistanceMatrix:
    values: np.ndarray  # (T, T), symmetric, zero diagonal
    metric: str
    labels: list[str]

    def validate(self) -> None:
        v = self.values
        if v.ndim != 2 or v.shape[0] != v.shape[1]:
            raise ValueError("distance matrix must be square")
        if np.abs(np.diag(v)).max(initial=0.0) > 1e-12:
            raise ValueError("nonzero diagonal")
        if np.abs(v - v.T).max(initial=0.0) > 1e-12:
            raise ValueError("asymmetric distance matrix")

    @property
    def size(self) -> int:
        return self.values.shape[0]


@dataclass
class Dendrogram:
    """T-1 merges over leaf ids 0..T-1; merge m creates cluster id T+m."""

    merges: list[tuple[int, int, float, int]]  # (a, b, height, new_id)
    leaf_names: list[str]

    @property
    def n_leaves(self) -> int:
        return len(self.leaf_names)


def pairwise_distances(model: EmbeddingModel, metric: str = "euclidean") -> DistanceMatrix:
    """All-pairs distances between embedding columns.

    Cosine distance of a zero vector against any nonzero vector is defined
    as 1; two zero vectors are identical and get 0.
    """
    X = model.V.T  # (T, n_f)
    T = X.shape[0]
    if metric == "euclidean":
        diff = X[:, None, :] - X[None, :, :]
        values = np.sqrt((diff * diff).sum(axis=2))
    elif metric == "cosine":
        norms = np.linalg.norm(X, axis=1)
        dots = X @ X.T
        values = np.ones((T, T))
        for i in range(T):
            for j in range(i + 1, T):
                if norms[i] == 0.0 and norms[j] == 0.0:
                    values[i, j] = 0.0
                elif norms[i] == 0.0 or norms[j] == 0.0:
                    values[i, j] = 1.0
                else:
                    values[i, j] = max(
                        0.0, 1.0 - dots[i, j] / (norms[i] * norms[j])
                    )
                values[j, i] = values[i, j]
        np.fill_diagonal(values, 0.0)
    else:
        raise ValueError(f"unknown metric {metric!r}")
    np.fill_diagonal(values, 0.0)
    dm = DistanceMatrix(values=values, metric=metric, labels=model.type_table.names)
    dm.validate()
    return dm


def nearest_neighbors(
    matrix: DistanceMatrix, type_id: int, m: int
) -> list[tuple[int, float]]:
    """The m closest other types, ascending by distance, ties by smaller id."""
    T = matrix.size
    if not 0 <= type_id < T:
        raise ValueError(f"type id {type_id} outside 0..{T - 1}")
    if not 1 <= m < T:
        raise ValueError(f"m must be in 1..{T - 1}")
    others = [(float(matrix.values[type_id, j]), j) for j in range(T) if j != type_id]
    others.sort()
    return [(j, d) for d, j in others[:m]]


def kmeans(
    X: np.ndarray, k: int, seed: int = 0, max_iters: int = 300
) -> tuple[np.ndarray, np.ndarray, list[float]]:
    """Lloyd iterations with k-means++ seeding over row vectors.

    Returns (assignments, centroids, per-iteration inertia). Empty clusters
    are reseeded from the point farthest from its current centroid.
    Deterministic per seed.
    """
    X = np.asarray(X, dtype=np.float64)
    n = X.shape[0]
    if not 1 <= k <= n:
        raise ValueError(f"k must be in 1..{n}")
    rng = substream(seed, "kmeans")

    centroids = np.empty((k, X.shape[1]))
    centroids[0] = X[int(rng.integers(n))]
    sq = ((X - centroids[0]) ** 2).sum(axis=1)
    for c in range(1, k):
        total = sq.sum()
        if total == 0.0:
            centroids[c] = X[int(rng.integers(n))]
        else:
            centroids[c] = X[int(rng.choice(n, p=sq / total))]
        sq = np.minimum(sq, ((X - centroids[c]) ** 2).sum(axis=1))

    inertia_trace: list[float] = []
    assign = np.full(n, -1, dtype=np.int64)
    for _ in range(max_iters):
        d2 = ((X[:, None, :] - centroids[None, :, :]) ** 2).sum(axis=2)
        new_assign = np.argmin(d2, axis=1)  # ties go to the smallest cluster
        for c in range(k):
            if not np.any(new_assign == c):
                # reseed the empty cluster at the point farthest from its
                # current centroid; its distance drops to zero
                worst = int(np.argmax(d2[np.arange(n), new_assign]))
                centroids[c] = X[worst]
                new_assign[worst] = c
        inertia_trace.append(
            float(((X - centroids[new_assign]) ** 2).sum())
        )
        if np.array_equal(new_assign, assign):
            break
        assign = new_assign
        for c in range(k):
            centroids[c] = X[assign == c].mean(axis=0)
    return assign, centroids, inertia_trace


def _linkage_update(linkage, d_ak, d_bk, na, nb):
    if linkage == "single":
        return min(d_ak, d_bk)
    if linkage == "complete":
        return max(d_ak, d_bk)
    return (na * d_ak + nb * d_bk) / (na + nb)


def agglomerate(matrix: DistanceMatrix, linkage: str = "average") -> Dendrogram:
    """Bottom-up merging by minimal linkage distance.

    Cluster-to-cluster distances maintained with the Lance-Williams update
    for the chosen linkage; ties break on the smallest (a, b) id pair.
    """
    if linkage not in LINKAGES:
        raise ValueError(f"linkage must be one of {LINKAGES}")
    matrix.validate()
    T = matrix.size
    if T < 2:
        raise ValueError("need at least 2 types to agglomerate")
    dist: dict[tuple[int, int], float] = {}
    for i in range(T):
        for j in range(i + 1, T):
            dist[(i, j)] = float(matrix.values[i, j])
    sizes = {i: 1 for i in range(T)}
    active = set(range(T))
    merges: list[tuple[int, int, float, int]] = []
    next_id = T
    while len(active) > 1:
        best = None
        for (a, b), d in dist.items():
            if a not in active or b not in active:
                continue
            if best is None or d < best[0] - 1e-15 or (
                abs(d - best[0]) <= 1e-15 and (a, b) < (best[1], best[2])
            ):
                best = (d, a, b)
        d, a, b = best
        new = next_id
        next_id += 1
        merges.append((a, b, d, new))
        active.discard(a)
        active.discard(b)
        for k in active:
            d_ak = dist.pop((min(a, k), max(a, k)))
            d_bk = dist.pop((min(b, k), max(b, k)))
            dist[(min(new, k), max(new, k))] = _linkage_update(
                linkage, d_ak, d_bk, sizes[a], sizes[b]
            )
        dist.pop((a, b), None)
        sizes[new] = sizes[a] + sizes[b]
        active.add(new)
    return Dendrogram(merges=merges, leaf_names=list(matrix.labels))


def _heights(d: Dendrogram) -> dict[int, float]:
    h = {i: 0.0 for i in range(d.n_leaves)}
    for a, b, height, new in d.merges:
        h[new] = height
    return h


def _newick_name(name: str) -> str:
    if any(c in name for c in "(),:;' \t\n"):
        return "'" + name.replace("'", "''") + "'"
    return name


def emit_dendrogram(d: Dendrogram, fmt: str = "newick") -> str:
    """Serialize a dendrogram as ``newick``, ``dot``, or merge-list ``tsv``."""
    heights = _heights(d)
    children = {new: (a, b) for a, b, _, new in d.merges}

    if fmt == "newick":
        def render(node: int, parent_height: float) -> str:
            length = parent_height - heights[node]
            if node < d.n_leaves:
                return f"{_newick_name(d.leaf_names[node])}:{length:.17g}"
            a, b = children[node]
            inner = f"({render(a, heights[node])},{render(b, heights[node])})"
            return f"{inner}:{length:.17g}"

        root = d.merges[-1][3] if d.merges else 0
        if not d.merges:
            return f"{_newick_name(d.leaf_names[0])};"
        a, b = children[root]
        h = heights[root]
        return f"({render(a, h)},{render(b, h)});"

    if fmt == "dot":
        lines = ["digraph dendrogram {"]
        for i, name in enumerate(d.leaf_names):
            lines.append(f'  n{i} [label="{name}", shape=box];')
        for a, b, height, new in d.merges:
            lines.append(f'  n{new} [label="h={height:.6g}"];')
            lines.append(f"  n{new} -> n{a};")
            lines.append(f"  n{new} -> n{b};")
        lines.append("}")
        return "\n".join(lines) + "\n"

    if fmt == "tsv":
        lines = [f"# leaf\t{i}\t{name}" for i, name in enumerate(d.leaf_names)]
        for a, b, height, new in d.merges:
            lines.append(f"{a}\t{b}\t{height:.17g}\t{new}")
        return "\n".join(lines) + "\n"

    raise ValueError(f"unknown dendrogram format {fmt!r}")


def parse_dendrogram_tsv(text: str) -> Dendrogram:
    leaves: dict[int, str] = {}
    merges: list[tuple[int, int, float, int]] = []
    for raw in text.splitlines():
        line = raw.strip()
        if not line:
            continue
        if line.startswith("# leaf\t"):
            idx, name = line[len("# leaf\t"):].split("\t", 1)
            leaves[int(idx)] = name
            continue
        a, b, height, new = line.split("\t")
        merges.append((int(a), int(b), float(height), int(new)))
    names = [leaves[i] for i in range(len(leaves))]
    return Dendrogram(merges=merges, leaf_names=names)


class EmbeddingKMeans:
    """sklearn-style wrapper around :func:`kmeans` over row vectors."""

    def __init__(self, n_clusters: int = 8, seed: int = 0, max_iters: int = 300):
        self.n_clusters = n_clusters
        self.seed = seed
        self.max_iters = max_iters

    def get_params(self, deep: bool = True) -> dict:
        return {
            "n_clusters": self.n_clusters,
            "seed": self.seed,
            "max_iters": self.max_iters,
        }

    def set_params(self, **params) -> "EmbeddingKMeans":
        for name, value in params.items():
            if name not in self.get_params():
                raise ValueError(f"unknown parameter {name!r}")
            setattr(self, name, value)
        return self

    def fit(self, X, y=None):
        self.labels_, self.cluster_centers_, self.inertia_trace_ = kmeans(
            X, self.n_clusters, seed=self.seed, max_iters=self.max_iters
        )
        self.inertia_ = self.inertia_trace_[-1] if self.inertia_trace_ else 0.0
        return self

    def predict(self, X) -> np.ndarray:
        if not hasattr(self, "cluster_centers_"):
            raise RuntimeError("estimator is not fitted")
        X = np.asarray(X, dtype=np.float64)
        d2 = ((X[:, None, :] - self.cluster_centers_[None, :, :]) ** 2).sum(axis=2)
        return np.argmin(d2, axis=1)

    def fit_predict(self, X, y=None) -> np.ndarray:
        return self.fit(X).labels_
