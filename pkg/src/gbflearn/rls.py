"""Regularized least-squares fitting over a kernel and sign classification.

Fitting solves (K_W + gamma*N*I) c = y for the expansion coefficients at
the labeled nodes; prediction sums the kernel columns weighted by c. The
classifier is the sign of the prediction, with sign(0) fixed to +1 so it
never abstains.
"""

from __future__ import annotations

import json
from dataclasses import dataclass

import numpy as np
import scipy.linalg

from .errors import (
    DimensionMismatch,
    InvalidParameter,
    NonFinite,
    SingularSystem,
)
from .kernels import KernelMatrix

CONDITION_LIMIT = 1e12
RESIDUAL_RTOL = 1e-8


@dataclass(frozen=True)
class LabeledSet:
    """Distinct 1-based labeled nodes with their values."""

    nodes: tuple
    labels: np.ndarray

    def __post_init__(self):
        self.labels.setflags(write=False)
        if len(self.nodes) != len(self.labels):
            raise DimensionMismatch(
                f"{len(self.nodes)} nodes for {len(self.labels)} labels"
            )
        if len(self.nodes) < 1:
            raise InvalidParameter("at least one label required")
        if len(set(self.nodes)) != len(self.nodes):
            raise InvalidParameter("labeled nodes must be distinct")

    @property
    def count(self) -> int:
        return len(self.nodes)


def labeled_set(nodes, labels) -> LabeledSet:
    return LabeledSet(
        nodes=tuple(int(v) for v in nodes),
        labels=np.asarray(labels, dtype=float),
    )


@dataclass(frozen=True)
class RlsModel:
    centers: tuple
    coefficients: np.ndarray
    gamma: float
    kernel_spec: dict | None = None

    def __post_init__(self):
        self.coefficients.setflags(write=False)


def fit(
    kernel: KernelMatrix,
    data: LabeledSet,
    gamma: float,
    *,
    interpolate: bool = False,
    kernel_spec: dict | None = None,
) -> RlsModel:
    """Solve the regularized normal system at the labeled nodes.

    gamma = 0 computes the pure interpolant and must be requested
    explicitly with interpolate=True; it additionally requires the kernel
    block at the labeled nodes to be numerically nonsingular.
    """
    if gamma < 0:
        raise InvalidParameter(f"gamma must be >= 0, got {gamma}")
    if gamma == 0 and not interpolate:
        raise InvalidParameter("gamma = 0 requires interpolate=True")
    n_labels = data.count
    for v in data.nodes:
        if not 1 <= v <= kernel.n:
            raise DimensionMismatch(f"labeled node {v} out of range 1..{kernel.n}")
    kw = kernel.submatrix(data.nodes)
    system = kw + gamma * n_labels * np.eye(n_labels)
    if gamma == 0:
        cond = np.linalg.cond(system)
        if not np.isfinite(cond) or cond > CONDITION_LIMIT:
            raise SingularSystem(
                f"kernel block at centers has condition {cond:.3e} with gamma = 0"
            )
    coeff = _solve_spd(system, data.labels)
    if not np.all(np.isfinite(coeff)):
        raise NonFinite("solver produced non-finite coefficients")
    resid = np.linalg.norm(system @ coeff - data.labels)
    scale = np.linalg.norm(data.labels) + np.linalg.norm(system, 2) * np.linalg.norm(coeff)
    if resid > RESIDUAL_RTOL * max(scale, 1.0):
        raise SingularSystem(f"solution residual {resid:.3e} too large")
    return RlsModel(
        centers=data.nodes,
        coefficients=coeff,
        gamma=float(gamma),
        kernel_spec=kernel_spec,
    )


def _solve_spd(system: np.ndarray, rhs: np.ndarray) -> np.ndarray:
    # Cholesky first; the regularized system is s.p.d. for gamma > 0.
    try:
        factor = scipy.linalg.cho_factor(system, lower=True)
        return scipy.linalg.cho_solve(factor, rhs)
    except scipy.linalg.LinAlgError:
        pass
    try:
        return scipy.linalg.solve(system, rhs, assume_a="sym")
    except scipy.linalg.LinAlgError as exc:
        raise SingularSystem(f"symmetric solve failed: {exc}") from exc


def predict(model: RlsModel, kernel_columns) -> np.ndarray:
    """Evaluate sum_i c_i K(., w_i) from the kernel columns at the centers."""
    if isinstance(kernel_columns, KernelMatrix):
        if kernel_columns.centers is not None:
            if tuple(kernel_columns.centers) != tuple(model.centers):
                raise DimensionMismatch("kernel columns do not match model centers")
            cols = kernel_columns.values
        else:
            cols = kernel_columns.columns(model.centers)
    else:
        cols = np.asarray(kernel_columns, dtype=float)
    if cols.shape[1] != len(model.centers):
        raise DimensionMismatch(
            f"{cols.shape[1]} columns for {len(model.centers)} centers"
        )
    return cols @ model.coefficients


def classify(scores) -> np.ndarray:
    """Sign classifier with sign(0) = +1."""
    scores = np.asarray(scores, dtype=float)
    return np.where(scores >= 0, 1, -1)


def accuracy(predicted, truth) -> float:
    predicted = np.asarray(predicted)
    truth = np.asarray(truth)
    if predicted.shape != truth.shape:
        raise DimensionMismatch(
            f"prediction shape {predicted.shape} vs truth {truth.shape}"
        )
    return float(np.mean(predicted == truth))


def one_vs_rest(kernel: KernelMatrix, nodes, class_labels, gamma: float) -> np.ndarray:
    """Multi-class reduction: one binary fit per class, argmax of the scores.

    Qualitative plumbing for multi-class experiments; ties resolve to the
    lowest class index.
    """
    nodes = tuple(int(v) for v in nodes)
    class_labels = np.asarray(class_labels)
    classes = sorted(set(class_labels.tolist()))
    scores = np.empty((kernel.n, len(classes)))
    cols = kernel.columns(nodes)
    for k, cls in enumerate(classes):
        data = labeled_set(nodes, np.where(class_labels == cls, 1.0, -1.0))
        model = fit(kernel, data, gamma)
        scores[:, k] = cols @ model.coefficients
    return np.asarray(classes)[np.argmax(scores, axis=1)]


# -- model dump ----------------------------------------------------------------

def model_to_json(model: RlsModel) -> dict:
    return {
        "centers": list(model.centers),
        "coefficients": [float(c) for c in model.coefficients],
        "gamma": model.gamma,
        "kernel_spec": model.kernel_spec,
    }


def save_model(model: RlsModel, path) -> None:
    with open(path, "w") as fh:
        json.dump(model_to_json(model), fh, indent=2)
        fh.write("\n")


def model_from_json(obj: dict) -> RlsModel:
    return RlsModel(
        centers=tuple(int(v) for v in obj["centers"]),
        coefficients=np.asarray(obj["coefficients"], dtype=float),
        gamma=float(obj["gamma"]),
        kernel_spec=obj.get("kernel_spec"),
    )
