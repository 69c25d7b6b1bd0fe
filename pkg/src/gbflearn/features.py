"""Feature maps, feature kernels, and entrywise kernel augmentation.

A feature assigns every graph vertex either a binary class (+1/-1) or a
real feature vector. The feature's own kernel is evaluated at the mapped
values of two vertices and multiplied entrywise into the base kernel,
one factor per feature. Binary features use the 2x2 correlation matrix
[[1, a], [a, 1]]; similarity features use a Gaussian kernel on the
feature vectors.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import (
    AlphaOutOfRange,
    DegenerateVertex,
    DimensionMismatch,
    DisconnectedGraph,
    EmptyPointCloud,
    InvalidParameter,
)
from .graphs import Graph, adjacency_matrix, degree_vector, is_connected
from .kernels import Gbf, KernelMatrix


@dataclass(frozen=True)
class FeatureSpec:
    """A feature map over the vertex set plus its kernel parameter.

    kind "binary": values is a length-n vector of +-1, alpha in [-1, 1].
    kind "similarity": values is (n,) or (n, d) real, alpha > 0.
    """

    kind: str
    values: np.ndarray
    alpha: float

    def __post_init__(self):
        self.values.setflags(write=False)

    @property
    def n(self) -> int:
        return self.values.shape[0]

    def update_matrix(self, centers=None) -> np.ndarray:
        """Feature-kernel evaluations K_F(psi(v), psi(w)).

        Full n x n matrix, or the n x N block at 1-based centers. Only the
        required entries are evaluated for the block case.
        """
        if self.kind == "binary":
            s = self.values.astype(float)
            t = s if centers is None else s[np.asarray(centers, dtype=int) - 1]
            same = np.equal.outer(s, t)
            return np.where(same, 1.0, self.alpha)
        pts = self.values.astype(float)
        if pts.ndim == 1:
            pts = pts[:, None]
        other = pts if centers is None else pts[np.asarray(centers, dtype=int) - 1]
        sq = ((pts[:, None, :] - other[None, :, :]) ** 2).sum(axis=2)
        return np.exp(-self.alpha * sq)


def binary_feature(values, alpha: float) -> FeatureSpec:
    values = np.asarray(values)
    if not np.all(np.isin(values, (-1, 1))):
        raise InvalidParameter("binary feature values must be +-1")
    if not -1.0 <= alpha <= 1.0:
        raise AlphaOutOfRange(f"alpha {alpha} outside [-1, 1]")
    return FeatureSpec(kind="binary", values=values.astype(int), alpha=float(alpha))


def similarity_feature(values, alpha: float) -> FeatureSpec:
    values = np.asarray(values, dtype=float)
    if alpha <= 0:
        raise AlphaOutOfRange(f"alpha {alpha} must be positive")
    return FeatureSpec(kind="similarity", values=values, alpha=float(alpha))


def binary_feature_kernel(alpha: float) -> np.ndarray:
    """Correlation matrix [[1, a], [a, 1]] on the two-vertex feature graph.

    Positive semi-definite exactly for alpha in [-1, 1]; at alpha = -1 it
    equals the two-vertex standard Laplacian.
    """
    if not -1.0 <= alpha <= 1.0:
        raise AlphaOutOfRange(f"alpha {alpha} outside [-1, 1]")
    return np.array([[1.0, alpha], [alpha, 1.0]])


def binary_feature_gbf(alpha: float) -> Gbf:
    """Generator of the binary feature kernel: multipliers (1+a, 1-a)."""
    if not -1.0 <= alpha <= 1.0:
        raise AlphaOutOfRange(f"alpha {alpha} outside [-1, 1]")
    return Gbf(
        fhat=np.array([1.0 + alpha, 1.0 - alpha]), kind="binary", params={"alpha": alpha}
    )


def similarity_feature_kernel(points, alpha: float) -> KernelMatrix:
    """Gaussian kernel matrix exp(-alpha * squared distance) over a point cloud."""
    pts = np.asarray(points, dtype=float)
    if pts.size == 0:
        raise EmptyPointCloud("similarity kernel needs at least one point")
    if alpha <= 0:
        raise AlphaOutOfRange(f"alpha {alpha} must be positive")
    if pts.ndim == 1:
        pts = pts[:, None]
    sq = ((pts[:, None, :] - pts[None, :, :]) ** 2).sum(axis=2)
    return KernelMatrix(values=np.exp(-alpha * sq), centers=None)


def spectral_bipartition(graph: Graph, alpha: float = -1.0) -> FeatureSpec:
    """Unsupervised two-way split by the normalized-cut relaxation.

    Thresholds D^{-1/2} u at zero, where u is the eigenvector of the
    normalized Laplacian for the second-smallest eigenvalue (entries >= 0
    map to +1). The returned partition is only defined up to a global
    flip; downstream binary feature kernels are invariant under that flip.
    """
    if not is_connected(graph):
        raise DisconnectedGraph("spectral bipartition requires a connected graph")
    d = degree_vector(graph.n, graph.edges)
    if np.any(d <= 0):
        raise DegenerateVertex("spectral bipartition requires positive degrees")
    a = adjacency_matrix(graph.n, graph.edges)
    dinv = 1.0 / np.sqrt(d)
    ln = np.eye(graph.n) - dinv[:, None] * a * dinv[None, :]
    _, vectors = np.linalg.eigh(ln)
    indicator = dinv * vectors[:, 1]
    labels = np.where(indicator >= 0, 1, -1)
    return binary_feature(labels, alpha)


@dataclass(frozen=True)
class AugmentedKernel:
    """Entrywise product of a base kernel with feature-kernel updates."""

    base: KernelMatrix
    features: tuple
    values: KernelMatrix


def augment_kernel(base: KernelMatrix, features) -> AugmentedKernel:
    """Multiply feature-kernel updates into a base kernel entrywise.

    Works on full matrices and on column blocks; a block costs one
    multiplication per feature per entry (d*n*N in total). An empty
    feature list returns the base values unchanged.
    """
    features = tuple(features)
    values = base.values.copy()
    for spec in features:
        if spec.n != base.n:
            raise DimensionMismatch(
                f"feature map length {spec.n} for kernel with {base.n} vertices"
            )
        values *= spec.update_matrix(centers=base.centers)
    return AugmentedKernel(
        base=base,
        features=features,
        values=KernelMatrix(values=values, centers=base.centers),
    )
