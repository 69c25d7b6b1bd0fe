"""Synthetic point clouds, geometric priors, graphs from clouds, CSV
ingestion, and the randomized accuracy-table experiment harness."""

from __future__ import annotations

import csv
import os
import warnings
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from .errors import (
    DisconnectedGraphWarning,
    EmptyPointCloud,
    InvalidParameter,
    IoError,
    ParseError,
    UnknownLabel,
)
from .features import binary_feature, similarity_feature, spectral_bipartition
from .graphs import Graph, build_graph, is_connected
from .kernels import KernelMatrix, diffusion_gbf, kernel_matrix, polynomial_gbf, spline_gbf
from .rls import accuracy, fit, labeled_set
from .spectral import eigendecompose


@dataclass(frozen=True)
class PointCloud:
    points: np.ndarray            # (n, d)
    truth: np.ndarray | None = None
    names: tuple | None = None

    def __post_init__(self):
        self.points.setflags(write=False)
        if self.truth is not None:
            self.truth.setflags(write=False)
            if len(self.truth) != len(self.points):
                raise InvalidParameter("truth length does not match point count")

    @property
    def n(self) -> int:
        return len(self.points)


@dataclass(frozen=True)
class ReferenceCircle:
    center: tuple
    radius: float


@dataclass(frozen=True)
class ReferenceLine:
    p0: tuple
    p1: tuple


def gen_two_moon(seed: int, n_per_moon: int = 300, noise: float = 0.0) -> PointCloud:
    """Two interleaved half-circles of n_per_moon points each.

    The upper moon is the unit half-circle (cos t, sin t) for t in [0, pi];
    the lower moon is (1 - cos t, 1/2 - sin t). Gaussian jitter of the
    given standard deviation is added per coordinate when noise > 0;
    labels are +1 on the upper moon and -1 on the lower one.
    """
    if n_per_moon < 1:
        raise InvalidParameter("n_per_moon must be >= 1")
    if noise < 0:
        raise InvalidParameter("noise must be >= 0")
    theta = np.linspace(0.0, np.pi, n_per_moon)
    upper = np.column_stack([np.cos(theta), np.sin(theta)])
    lower = np.column_stack([1.0 - np.cos(theta), 0.5 - np.sin(theta)])
    points = np.vstack([upper, lower])
    if noise > 0:
        rng = np.random.default_rng(seed)
        points = points + rng.normal(0.0, noise, size=points.shape)
    truth = np.concatenate([np.ones(n_per_moon), -np.ones(n_per_moon)]).astype(int)
    return PointCloud(points=points, truth=truth)


def gen_slashed_o(seed: int, n_per_part: int = 300, noise: float = 0.0):
    """A unit circle crossed by a diagonal line segment.

    The circle part has n_per_part points at evenly spaced angles; the
    line part is evenly spaced on the segment from (-1.3, -1.3) to
    (1.3, 1.3). Labels are +1 on the circle, -1 on the line. Returns the
    cloud together with the noise-free reference shapes for priors.
    """
    if n_per_part < 1:
        raise InvalidParameter("n_per_part must be >= 1")
    if noise < 0:
        raise InvalidParameter("noise must be >= 0")
    angles = np.linspace(0.0, 2.0 * np.pi, n_per_part, endpoint=False)
    circle = np.column_stack([np.cos(angles), np.sin(angles)])
    t = np.linspace(0.0, 1.0, n_per_part)
    p0, p1 = np.array([-1.3, -1.3]), np.array([1.3, 1.3])
    line = p0 + t[:, None] * (p1 - p0)
    points = np.vstack([circle, line])
    if noise > 0:
        rng = np.random.default_rng(seed)
        points = points + rng.normal(0.0, noise, size=points.shape)
    truth = np.concatenate([np.ones(n_per_part), -np.ones(n_per_part)]).astype(int)
    shapes = {
        "circle": ReferenceCircle(center=(0.0, 0.0), radius=1.0),
        "line": ReferenceLine(p0=tuple(p0), p1=tuple(p1)),
    }
    return PointCloud(points=points, truth=truth), shapes


def geometric_prior(cloud: PointCloud, shape) -> np.ndarray:
    """Scalar distance of every point to a reference shape.

    Circles measure |distance to center - radius|; lines measure the
    perpendicular distance to the infinite line through the segment.
    """
    pts = cloud.points
    if isinstance(shape, ReferenceCircle):
        center = np.asarray(shape.center, dtype=float)
        return np.abs(np.linalg.norm(pts - center, axis=1) - shape.radius)
    if isinstance(shape, ReferenceLine):
        p0 = np.asarray(shape.p0, dtype=float)
        direction = np.asarray(shape.p1, dtype=float) - p0
        direction = direction / np.linalg.norm(direction)
        rel = pts - p0
        along = rel @ direction
        return np.linalg.norm(rel - along[:, None] * direction, axis=1)
    raise InvalidParameter(f"unknown reference shape {type(shape).__name__}")


def epsilon_graph(cloud: PointCloud, radius: float, kind) -> Graph:
    """Unweighted graph joining points at euclidean distance strictly
    below the radius. Warns (without failing) when disconnected."""
    if radius <= 0:
        raise InvalidParameter("radius must be positive")
    if cloud.n == 0:
        raise EmptyPointCloud("cannot build a graph from an empty cloud")
    pts = cloud.points
    diff = pts[:, None, :] - pts[None, :, :]
    dist = np.sqrt((diff**2).sum(axis=2))
    edges = []
    for i in range(cloud.n):
        for j in range(i + 1, cloud.n):
            if dist[i, j] < radius:
                edges.append((i + 1, j + 1, 1.0))
    graph = build_graph(cloud.n, edges, kind)
    if not is_connected(graph):
        warnings.warn(
            "epsilon graph is disconnected", DisconnectedGraphWarning, stacklevel=2
        )
    return graph


def complete_similarity_graph(cloud: PointCloud, alpha: float, kind) -> Graph:
    """Complete weighted graph with Gaussian similarity weights."""
    if cloud.n == 0:
        raise EmptyPointCloud("cannot build a graph from an empty cloud")
    if alpha <= 0:
        raise InvalidParameter("alpha must be positive")
    pts = cloud.points
    diff = pts[:, None, :] - pts[None, :, :]
    sq = (diff**2).sum(axis=2)
    weights = np.exp(-alpha * sq)
    edges = []
    for i in range(cloud.n):
        for j in range(i + 1, cloud.n):
            edges.append((i + 1, j + 1, float(weights[i, j])))
    return build_graph(cloud.n, edges, kind)


def default_similarity_alpha(points) -> float:
    """Scale for Gaussian weights: the median squared pairwise distance
    maps to weight one half."""
    pts = np.asarray(points, dtype=float)
    diff = pts[:, None, :] - pts[None, :, :]
    sq = (diff**2).sum(axis=2)
    upper = sq[np.triu_indices(len(pts), k=1)]
    med = float(np.median(upper))
    if med <= 0:
        raise InvalidParameter("point cloud has zero median pairwise distance")
    return float(np.log(2.0) / med)


def minmax_scale(points) -> np.ndarray:
    """Column-wise min-max scaling to [0, 1]; constant columns map to 0."""
    pts = np.asarray(points, dtype=float)
    lo = pts.min(axis=0)
    span = pts.max(axis=0) - lo
    span[span == 0] = 1.0
    return (pts - lo) / span


# -- CSV ingestion -------------------------------------------------------------

@dataclass(frozen=True)
class DatasetSchema:
    """Column layout of a labeled CSV file (0-based column indices)."""

    label_column: int
    positive_label: str
    negative_label: str
    feature_columns: tuple
    missing_marker: str = "?"
    drop_missing: bool = True
    name_column: int | None = None


def load_csv(path, schema: DatasetSchema) -> PointCloud:
    """Parse a labeled CSV file into a point cloud.

    Rows containing the missing marker in any feature column are dropped
    when the schema says so; label values must map exhaustively onto
    {-1, +1}.
    """
    try:
        with open(path, newline="") as fh:
            rows = list(csv.reader(fh))
    except OSError as exc:
        raise IoError(str(exc)) from exc
    points, truth, names = [], [], []
    for rownum, row in enumerate(rows, start=1):
        if not row or (len(row) == 1 and not row[0].strip()):
            continue
        needed = max(schema.feature_columns) if schema.feature_columns else 0
        needed = max(needed, schema.label_column, schema.name_column or 0)
        if len(row) <= needed:
            raise ParseError(f"{path}: row {rownum} has {len(row)} columns, "
                             f"need at least {needed + 1}")
        raw = [row[c].strip() for c in schema.feature_columns]
        if schema.missing_marker in raw:
            if schema.drop_missing:
                continue
            col = schema.feature_columns[raw.index(schema.missing_marker)]
            raise ParseError(f"{path}: missing value at row {rownum}, column {col}")
        try:
            values = [float(v) for v in raw]
        except ValueError as exc:
            raise ParseError(f"{path}: row {rownum}: {exc}") from exc
        label = row[schema.label_column].strip()
        if label == schema.positive_label:
            truth.append(1)
        elif label == schema.negative_label:
            truth.append(-1)
        else:
            raise UnknownLabel(f"{path}: row {rownum}: unmapped label {label!r}")
        points.append(values)
        if schema.name_column is not None:
            names.append(row[schema.name_column].strip())
    if not points:
        raise EmptyPointCloud(f"{path}: no usable rows")
    return PointCloud(
        points=np.asarray(points, dtype=float),
        truth=np.asarray(truth, dtype=int),
        names=tuple(names) if names else None,
    )


# -- point-cloud files ---------------------------------------------------------

def save_cloud_csv(cloud: PointCloud, path) -> None:
    """Write points plus truth labels; header x1..xd,label."""
    d = cloud.points.shape[1]
    try:
        with open(path, "w", newline="") as fh:
            writer = csv.writer(fh)
            writer.writerow([f"x{k + 1}" for k in range(d)] + ["label"])
            for i in range(cloud.n):
                label = int(cloud.truth[i]) if cloud.truth is not None else 0
                writer.writerow([repr(float(v)) for v in cloud.points[i]] + [label])
    except OSError as exc:
        raise IoError(str(exc)) from exc


def load_cloud_csv(path) -> PointCloud:
    try:
        with open(path, newline="") as fh:
            rows = list(csv.reader(fh))
    except OSError as exc:
        raise IoError(str(exc)) from exc
    if not rows or rows[0][-1] != "label":
        raise ParseError(f"{path}: expected a generated point-cloud CSV")
    points, truth = [], []
    for rownum, row in enumerate(rows[1:], start=2):
        if not row:
            continue
        try:
            points.append([float(v) for v in row[:-1]])
            truth.append(int(row[-1]))
        except ValueError as exc:
            raise ParseError(f"{path}: row {rownum}: {exc}") from exc
    return PointCloud(
        points=np.asarray(points, dtype=float), truth=np.asarray(truth, dtype=int)
    )


# -- experiment harness ---------------------------------------------------------

@dataclass(frozen=True)
class ExperimentResult:
    methods: tuple
    label_counts: tuple
    means: dict                   # method -> {N: mean accuracy}
    trials: tuple                 # per-trial records, dicts
    spectral_accuracy: float | None
    name: str = ""

    def table_rows(self):
        yield ["method"] + [str(n) for n in self.label_counts]
        for method in self.methods:
            yield [method] + [
                format(self.means[method][n], ".4f") for n in self.label_counts
            ]


def sample_labeled_nodes(rng, truth: np.ndarray, count: int, stratified: bool = True) -> tuple:
    """Uniform sample of labeled nodes without replacement.

    With stratified=True the draw is rejected and repeated until both
    classes appear whenever count >= 2; with stratified=False the plain
    uniform draw is kept, so small label sets may fall in one class.
    """
    n = len(truth)
    if count > n:
        raise InvalidParameter(f"cannot label {count} of {n} nodes")
    stratify = stratified and count >= 2 and len(set(truth.tolist())) == 2
    while True:
        nodes = rng.choice(n, size=count, replace=False)
        if not stratify or len(set(truth[nodes].tolist())) == 2:
            return tuple(int(v) + 1 for v in nodes)


def _thread_count() -> int:
    raw = os.environ.get("GBF_THREADS", "")
    try:
        return max(1, int(raw))
    except ValueError:
        return 1


def run_experiment(pipeline, label_counts, trials: int, seed: int, *,
                   feature_prefixes: bool = False,
                   report_spectral: bool | None = None,
                   stratified: bool = True) -> ExperimentResult:
    """Mean accuracies of the supervised and feature-augmented classifiers.

    For every label count, each trial samples labeled nodes (stratified by
    default so each class gets a label when two or more are drawn; pass
    stratified=False for the plain uniform protocol), fits the plain
    kernel and the augmented kernel, and records accuracy against the
    ground truth. The unsupervised spectral row, when reported, is
    polarity-aligned to the truth. Trials are deterministic per
    (seed, label count, trial index) and may run in parallel under
    GBF_THREADS.
    """
    truth = pipeline.truth
    if truth is None:
        raise InvalidParameter("experiment needs ground-truth labels")
    label_counts = tuple(int(n) for n in label_counts)
    if trials < 1:
        raise InvalidParameter("trials must be >= 1")

    prefixes = (
        list(range(1, len(pipeline.features) + 1))
        if feature_prefixes and pipeline.features
        else [len(pipeline.features)]
    )
    methods = ["gbf-rls"]
    for k in prefixes:
        methods.append(f"psi-gbf-rls-{k}f" if feature_prefixes else "psi-gbf-rls")

    spectral_acc = None
    if report_spectral is None:
        report_spectral = pipeline.spectral_prior is not None
    if report_spectral:
        if pipeline.spectral_prior is None:
            raise InvalidParameter("no spectral prior available to report")
        prior = pipeline.spectral_prior.values
        spectral_acc = max(accuracy(prior, truth), accuracy(-prior, truth))
        methods.insert(0, "spectral")

    update_columns = [spec.update_matrix for spec in pipeline.features]

    def run_trial(count, trial):
        rng = np.random.default_rng([seed, count, trial])
        nodes = sample_labeled_nodes(rng, truth, count, stratified)
        data = labeled_set(nodes, truth[np.asarray(nodes) - 1])
        cols = pipeline.kernel.columns(nodes)
        record = {"N": count, "trial": trial, "nodes": list(nodes)}
        model = fit_columns(cols, nodes, data, pipeline.gamma)
        record["gbf-rls"] = accuracy(
            np.where(cols @ model >= 0, 1, -1), truth
        )
        aug = cols
        for k, update in enumerate(update_columns, start=1):
            aug = aug * update(centers=nodes)
            if k in prefixes:
                coeff = fit_columns(aug, nodes, data, pipeline.gamma)
                name = f"psi-gbf-rls-{k}f" if feature_prefixes else "psi-gbf-rls"
                record[name] = accuracy(np.where(aug @ coeff >= 0, 1, -1), truth)
        if not update_columns and not feature_prefixes:
            # Empty augmentation: the updated kernel is the base kernel.
            record["psi-gbf-rls"] = record["gbf-rls"]
        if spectral_acc is not None:
            record["spectral"] = spectral_acc
        return record

    jobs = [(count, trial) for count in label_counts for trial in range(trials)]
    workers = _thread_count()
    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            records = list(pool.map(lambda job: run_trial(*job), jobs))
    else:
        records = [run_trial(*job) for job in jobs]

    means: dict = {m: {} for m in methods}
    for count in label_counts:
        for method in methods:
            vals = [r[method] for r in records if r["N"] == count]
            means[method][count] = float(np.mean(vals))
    return ExperimentResult(
        methods=tuple(methods),
        label_counts=label_counts,
        means=means,
        trials=tuple(records),
        spectral_accuracy=spectral_acc,
        name=pipeline.name,
    )


def fit_columns(cols: np.ndarray, nodes, data, gamma: float) -> np.ndarray:
    """Coefficients for a kernel given only by its columns at the nodes."""
    block = KernelMatrix(values=cols, centers=tuple(nodes))
    return fit(block, data, gamma).coefficients


# -- assembled pipeline ----------------------------------------------------------

@dataclass(frozen=True)
class Pipeline:
    """Everything a classification or experiment run needs, precomputed."""

    name: str
    cloud: PointCloud
    graph: Graph
    spectrum: object
    gbf: object
    kernel: object                # full KernelMatrix of the base gbf
    features: tuple
    gamma: float
    spectral_prior: object | None = None

    @property
    def truth(self):
        return self.cloud.truth


def build_pipeline(
    name: str,
    cloud: PointCloud,
    graph: Graph,
    gbf_spec: dict,
    feature_specs,
    gamma: float,
    shapes=None,
) -> Pipeline:
    """Assemble spectrum, base kernel, and feature maps for one dataset."""
    spectrum = eigendecompose(graph)
    gbf = make_gbf(spectrum, gbf_spec)
    kernel = kernel_matrix(spectrum, gbf)
    spectral_prior = None
    features = []
    for spec in feature_specs:
        kind = spec["kind"]
        alpha = float(spec["alpha"])
        source = spec.get("source", "spectral")
        if kind == "binary":
            if source == "spectral":
                feature = spectral_bipartition(graph, alpha)
                if spectral_prior is None:
                    spectral_prior = feature
            elif source.startswith("file:"):
                values = np.loadtxt(source[5:], dtype=int)
                feature = binary_feature(values, alpha)
            else:
                raise InvalidParameter(f"unknown binary feature source {source!r}")
        elif kind == "similarity":
            if source == "circle-distance":
                values = geometric_prior(cloud, shapes["circle"])
            elif source == "line-distance":
                values = geometric_prior(cloud, shapes["line"])
            elif source == "attributes":
                values = cloud.points
            elif source.startswith("file:"):
                values = np.loadtxt(source[5:], dtype=float)
            else:
                raise InvalidParameter(f"unknown similarity feature source {source!r}")
            feature = similarity_feature(values, alpha)
        else:
            raise InvalidParameter(f"unknown feature kind {kind!r}")
        features.append(feature)
    return Pipeline(
        name=name,
        cloud=cloud,
        graph=graph,
        spectrum=spectrum,
        gbf=gbf,
        kernel=kernel,
        features=tuple(features),
        gamma=float(gamma),
        spectral_prior=spectral_prior,
    )


def make_gbf(spectrum, spec: dict):
    """Basis function from a config stanza."""
    kind = spec["type"]
    if kind == "diffusion":
        return diffusion_gbf(spectrum, float(spec["t"]))
    if kind == "spline":
        return spline_gbf(spectrum, float(spec["eps"]), float(spec["s"]))
    if kind == "poly":
        return polynomial_gbf(spectrum, spec["coeffs"])
    raise InvalidParameter(f"unknown gbf type {kind!r}")
