"""Opinion-landscape pipeline: impute, embed in 2-D, cluster, audit.

The pipeline fills unknown attitudes with column means, projects
participants onto the top principal directions found by power iteration
with deflation, clusters the projected points with seeded k-means, and
finally audits the clustering for groups that a different center would
serve strictly better.

Feeding mean-imputed binary data to a least-squares embedding is a known
fidelity compromise; the imputation mask is kept on the complete matrix so
downstream consumers can discount filled-in cells.
"""

from __future__ import annotations

from dataclasses import dataclass
from math import ceil
from typing import NamedTuple

import numpy as np

from .errors import NumericalError, ParameterError
from .matrix import AttitudeMatrix

PCA_TOLERANCE = 1e-9
PCA_MAX_ITERATIONS = 10_000
KMEANS_MAX_ITERATIONS = 500

_START_VECTOR_SEED = 0x5EED


@dataclass(frozen=True)
class CompleteMatrix:
    """Fully known n x m matrix in [0, 1] plus the mask of imputed cells."""

    values: np.ndarray
    imputed_mask: np.ndarray


@dataclass(frozen=True)
class Embedding:
    """Centered rows projected onto orthonormal principal directions."""

    points: np.ndarray          # (n, d) projection coordinates
    components: np.ndarray      # (d, m) orthonormal directions
    column_means: np.ndarray    # (m,) centering vector
    objective: float            # total squared residual off the subspace


@dataclass(frozen=True)
class Clustering:
    assignment: np.ndarray      # (n,) cluster index per point
    centroids: np.ndarray       # (k, d)
    objective: float            # within-cluster sum of squared distances
    objective_history: tuple[float, ...]
    seed: int


@dataclass(frozen=True)
class BlockingCoalition:
    """Participants who would all be strictly closer to one data point."""

    candidate: int
    members: tuple[int, ...]


@dataclass(frozen=True)
class FairnessAudit:
    centroid_distance: np.ndarray
    nearest_other_distance: np.ndarray
    blocking_coalitions: tuple[BlockingCoalition, ...]


class Landscape(NamedTuple):
    complete: CompleteMatrix
    embedding: Embedding
    clustering: Clustering
    audit: FairnessAudit


# -- imputation ---------------------------------------------------------------


def impute_mean(matrix: AttitudeMatrix) -> CompleteMatrix:
    """Fill each unknown cell with its column mean; empty columns get 0.5."""
    n, m = matrix.shape
    if n < 1 or m < 1:
        raise ParameterError("imputation needs at least one participant and one idea")
    codes = matrix.codes()
    known = codes >= 0
    values = codes.astype(float)
    for p in range(m):
        col_known = known[:, p]
        fill = values[col_known, p].mean() if col_known.any() else 0.5
        values[~col_known, p] = fill
    return CompleteMatrix(values=values, imputed_mask=~known)


def _as_points(data) -> np.ndarray:
    if isinstance(data, Embedding):
        return data.points
    if isinstance(data, CompleteMatrix):
        return data.values
    return np.asarray(data, dtype=float)


# -- principal components -------------------------------------------------------


def _power_iteration(scatter: np.ndarray, previous: list[np.ndarray], rng: np.random.Generator) -> tuple[np.ndarray, float]:
    """Dominant eigenvector of a PSD matrix, orthogonal to ``previous``.

    Each iteration applies the matrix twice (the power method on the
    squared operator), which preserves the eigenvectors of a PSD matrix
    while doubling the contraction rate for narrow eigengaps.
    """
    m = scatter.shape[0]
    v = rng.standard_normal(m)
    for q in previous:
        v -= (q @ v) * q
    norm = np.linalg.norm(v)
    if norm == 0.0:
        v = np.zeros(m)
        v[len(previous) % m] = 1.0
    else:
        v /= norm

    delta = np.inf
    for _ in range(PCA_MAX_ITERATIONS):
        w = scatter @ (scatter @ v)
        for q in previous:
            w -= (q @ w) * q
        norm = np.linalg.norm(w)
        if norm < 1e-30:
            # no variance left in this direction: v is a null eigenvector
            return v, 0.0
        w /= norm
        delta = float(np.linalg.norm(w - v))
        v = w
        if delta < PCA_TOLERANCE:
            return v, float(v @ scatter @ v)
    raise NumericalError(
        f"power iteration did not reach {PCA_TOLERANCE} within "
        f"{PCA_MAX_ITERATIONS} iterations (residual {delta:.3e})",
        residual=delta,
    )


def pca_2d(complete, d: int = 2) -> Embedding:
    """Top-d principal directions via power iteration with deflation.

    Columns are mean-centered first. Each component's largest-magnitude
    entry is made positive so the embedding is reproducible. The objective
    is the total squared residual between the centered rows and their
    projections.
    """
    data = _as_points(complete)
    n, m = data.shape
    if n < 2:
        raise ParameterError("embedding needs at least two participants")
    if not 1 <= d <= min(n, m):
        raise ParameterError(f"d must lie in [1, min(n, m)] = [1, {min(n, m)}]")

    column_means = data.mean(axis=0)
    centered = data - column_means
    scatter = centered.T @ centered
    rng = np.random.default_rng(_START_VECTOR_SEED)

    components: list[np.ndarray] = []
    deflated = scatter.copy()
    for _ in range(d):
        vector, eigenvalue = _power_iteration(deflated, components, rng)
        peak = int(np.argmax(np.abs(vector)))
        if vector[peak] < 0:
            vector = -vector
        components.append(vector)
        deflated = deflated - eigenvalue * np.outer(vector, vector)

    basis = np.vstack(components)
    points = centered @ basis.T
    residual = centered - points @ basis
    objective = float((residual**2).sum())
    return Embedding(points=points, components=basis, column_means=column_means, objective=objective)


# -- clustering -----------------------------------------------------------------


def _kmeans_pp_seeds(points: np.ndarray, k: int, rng: np.random.Generator) -> np.ndarray:
    n = points.shape[0]
    chosen = [int(rng.integers(n))]
    d2 = ((points - points[chosen[0]]) ** 2).sum(axis=1)
    while len(chosen) < k:
        total = d2.sum()
        if total <= 0:
            # all remaining mass on duplicates: take the lowest unchosen index
            for j in range(n):
                if j not in chosen:
                    chosen.append(j)
                    break
        else:
            j = int(rng.choice(n, p=d2 / total))
            chosen.append(j)
        d2 = np.minimum(d2, ((points - points[chosen[-1]]) ** 2).sum(axis=1))
    return points[chosen].copy()


def kmeans(data, k: int, seed: int, max_iterations: int = KMEANS_MAX_ITERATIONS) -> Clustering:
    """Seeded k-means++ followed by Lloyd iterations to a fixpoint.

    Deterministic for a given (data, k, seed). Empty clusters are repaired
    by moving in the point currently farthest from its own centroid, which
    keeps the objective non-increasing. The recorded history holds the
    objective after every Lloyd iteration.
    """
    points = _as_points(data)
    n = points.shape[0]
    if k < 1:
        raise ParameterError("k must be at least 1")
    if k > n:
        raise ParameterError(f"cannot form {k} clusters from {n} points")
    rng = np.random.default_rng(seed)
    centroids = _kmeans_pp_seeds(points, k, rng)
    assignment = np.full(n, -1, dtype=int)
    history: list[float] = []

    for _ in range(max_iterations):
        distances = ((points[:, None, :] - centroids[None, :, :]) ** 2).sum(axis=2)
        new_assignment = distances.argmin(axis=1)

        sizes = np.bincount(new_assignment, minlength=k)
        for empty in np.flatnonzero(sizes == 0):
            own = ((points - centroids[new_assignment]) ** 2).sum(axis=1)
            own[sizes[new_assignment] <= 1] = -np.inf
            moved = int(np.argmax(own))
            sizes[new_assignment[moved]] -= 1
            new_assignment[moved] = empty
            sizes[empty] = 1
            centroids[empty] = points[moved]

        for c in range(k):
            centroids[c] = points[new_assignment == c].mean(axis=0)
        objective = float(((points - centroids[new_assignment]) ** 2).sum())
        history.append(objective)
        if np.array_equal(new_assignment, assignment):
            break
        assignment = new_assignment

    return Clustering(
        assignment=assignment,
        centroids=centroids,
        objective=history[-1],
        objective_history=tuple(history),
        seed=seed,
    )


# -- fairness audit ---------------------------------------------------------------


def fairness_audit(clustering: Clustering, data) -> FairnessAudit:
    """Distance disadvantage per participant plus blocking coalitions.

    A blocking coalition is a group of at least ceil(n / k) participants
    who are all strictly closer to one common data point than to their own
    centroids. Candidates are exactly the data points; identical member
    sets are reported once, for the lowest candidate index.
    """
    points = _as_points(data)
    n = points.shape[0]
    k = clustering.centroids.shape[0]
    centroid_dist = np.sqrt(((points - clustering.centroids[clustering.assignment]) ** 2).sum(axis=1))
    all_dist = np.sqrt(((points[:, None, :] - clustering.centroids[None, :, :]) ** 2).sum(axis=2))
    masked = all_dist.copy()
    masked[np.arange(n), clustering.assignment] = np.inf
    nearest_other = masked.min(axis=1) if k > 1 else np.full(n, np.inf)

    threshold = ceil(n / k)
    pairwise = np.sqrt(((points[:, None, :] - points[None, :, :]) ** 2).sum(axis=2))
    closer = pairwise < centroid_dist[:, None]  # closer[i, c]: i prefers point c
    coalitions = []
    seen: set[frozenset[int]] = set()
    for candidate in range(n):
        members = np.flatnonzero(closer[:, candidate])
        if members.size >= threshold:
            key = frozenset(int(i) for i in members)
            if key not in seen:
                seen.add(key)
                coalitions.append(BlockingCoalition(candidate=candidate, members=tuple(int(i) for i in members)))
    return FairnessAudit(
        centroid_distance=centroid_dist,
        nearest_other_distance=nearest_other,
        blocking_coalitions=tuple(coalitions),
    )


# -- pipeline -------------------------------------------------------------------


def build_landscape(matrix: AttitudeMatrix, k: int, seed: int, space: str = "embedded", d: int = 2) -> Landscape:
    """Run impute -> embed -> cluster -> audit on one matrix snapshot.

    ``space`` picks where clustering happens: the d-dimensional embedding
    (the display pipeline) or the full imputed attitude space.
    """
    if space not in ("embedded", "full"):
        raise ParameterError(f"unknown clustering space {space!r}")
    complete = impute_mean(matrix)
    embedding = pca_2d(complete, d=d)
    cluster_points = embedding.points if space == "embedded" else complete.values
    clustering = kmeans(cluster_points, k, seed)
    audit = fairness_audit(clustering, cluster_points)
    return Landscape(complete=complete, embedding=embedding, clustering=clustering, audit=audit)
