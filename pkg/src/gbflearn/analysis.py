"""Interpolation and regularization diagnostics for kernel classifiers.

The power function measures the pointwise worst-case interpolation error
of a kernel over a center set; combined with a regularization term it
bounds the deviation of the regularized solution from any target signal,
measured in the augmented native-space norm.
"""

from __future__ import annotations

import csv
import json
import warnings
from dataclasses import dataclass

import numpy as np
import scipy.linalg

from .errors import (
    DimensionMismatch,
    InvalidParameter,
    KernelNotPositive,
    LabelsInconsistent,
    NotPositiveDefinite,
    SingularSubkernel,
)
from .features import FeatureSpec, augment_kernel
from .kernels import (
    Gbf,
    KernelMatrix,
    MULTIPLIER_FLOOR,
    is_positive_definite,
)
from .rls import LabeledSet, fit, labeled_set, predict
from .spectral import Spectrum

# Floating-point cancellation near centers can push squared powers
# slightly negative; anything above this magnitude is a real failure.
NEGATIVE_CLAMP = 1e-10

POWER_MATCH_TOL = 1e-7
BOUND_SLACK = 1e-6


def _full_kernel(kernel: KernelMatrix) -> KernelMatrix:
    if not kernel.is_full:
        raise DimensionMismatch("operation requires the full kernel matrix")
    return kernel


def power_function(kernel: KernelMatrix, nodes) -> np.ndarray:
    """Pointwise interpolation power of the kernel over a center set.

    P(v)^2 = K(v,v) - k_W(v)^T K_W^{-1} k_W(v), zero at the centers and
    nonnegative everywhere; the minimizing coefficients are the Lagrange
    coefficients K_W^{-1} k_W(v).
    """
    kernel = _full_kernel(kernel)
    nodes = tuple(int(v) for v in nodes)
    if not nodes:
        raise InvalidParameter("power function needs a nonempty center set")
    if len(set(nodes)) != len(nodes):
        raise InvalidParameter("centers must be distinct")
    kw = kernel.submatrix(nodes)
    cols = kernel.columns(nodes)
    try:
        factor = scipy.linalg.cho_factor(kw, lower=True)
        lagrange = scipy.linalg.cho_solve(factor, cols.T)
    except scipy.linalg.LinAlgError as exc:
        raise SingularSubkernel(f"kernel block at centers is singular: {exc}") from exc
    sq = np.diag(kernel.values) - np.sum(cols.T * lagrange, axis=0)
    if np.min(sq) < -NEGATIVE_CLAMP:
        warnings.warn(
            f"squared power dipped to {np.min(sq):.3e}; center block is "
            "severely ill-conditioned",
            RuntimeWarning,
            stacklevel=2,
        )
    return np.sqrt(np.maximum(sq, 0.0))


def lagrange_coefficients(kernel: KernelMatrix, nodes) -> np.ndarray:
    """Coefficients of the best kernel-column approximation, N x n."""
    kernel = _full_kernel(kernel)
    kw = kernel.submatrix(nodes)
    cols = kernel.columns(nodes)
    try:
        factor = scipy.linalg.cho_factor(kw, lower=True)
        return scipy.linalg.cho_solve(factor, cols.T)
    except scipy.linalg.LinAlgError as exc:
        raise SingularSubkernel(f"kernel block at centers is singular: {exc}") from exc


def power_invariance_check(
    kernel: KernelMatrix, psi: FeatureSpec, nodes, tol: float = POWER_MATCH_TOL
) -> bool:
    """Whether the power function survives a binary feature update unchanged.

    Holds whenever the update is the two-vertex Laplacian kernel
    (alpha = -1), for every choice of the binary map.
    """
    augmented = augment_kernel(_full_kernel(kernel), [psi]).values
    p_base = power_function(kernel, nodes)
    p_aug = power_function(augmented, nodes)
    return bool(np.max(np.abs(p_aug - p_base)) <= tol)


def augmented_native_norm(
    kernel: KernelMatrix,
    psi: FeatureSpec,
    y,
    *,
    spectrum: Spectrum | None = None,
    gbf: Gbf | None = None,
) -> float:
    """Native-space norm of y under a binary (alpha = -1) augmented kernel.

    The augmented kernel's eigensystem is the base eigensystem with every
    eigenvector multiplied entrywise by the binary map, so the norm equals
    the base-kernel native norm of psi*y. Uses the exact spectral data
    when given, otherwise the eigendecomposition of the kernel matrix.
    """
    y = np.asarray(y, dtype=float)
    flipped = psi.values.astype(float) * y
    if spectrum is not None and gbf is not None:
        if not is_positive_definite(gbf):
            raise NotPositiveDefinite("augmented norm needs a p.d. generator")
        coeff = spectrum.vectors.T @ flipped
        weights = np.maximum(gbf.fhat, MULTIPLIER_FLOOR)
    else:
        values, vectors = np.linalg.eigh(_full_kernel(kernel).values)
        if values[0] <= 0:
            raise NotPositiveDefinite(
                f"kernel matrix has min eigenvalue {values[0]:.3e}"
            )
        coeff = vectors.T @ flipped
        weights = values
    return float(np.sqrt(np.sum(coeff**2 / weights)))


@dataclass(frozen=True)
class BoundReport:
    """Per-node error bound for the regularized augmented solution."""

    rhs: np.ndarray            # full bound per node
    lhs: np.ndarray            # |y - y*| per node
    holds: bool
    power: np.ndarray
    regularization_rhs: np.ndarray
    regularization_lhs: np.ndarray  # |y_interp - y*| per node
    regularization_holds: bool
    lambda_min: float
    norm_y: float
    y_star: np.ndarray
    y_interp: np.ndarray


def error_bound(
    kernel: KernelMatrix,
    psi: FeatureSpec,
    nodes,
    gamma: float,
    y,
    *,
    spectrum: Spectrum | None = None,
    gbf: Gbf | None = None,
) -> BoundReport:
    """Bound |y(v) - y*(v)| for the regularized solution on the augmented kernel.

    The bound per node is (P(v) + gamma*N*sqrt(K(v,v)) / (lambda_min(K_W)
    + gamma*N)) times the augmented native norm of y, with P the power
    function of the base kernel; the second summand alone bounds the
    regularization error against the pure interpolant.
    """
    kernel = _full_kernel(kernel)
    nodes = tuple(int(v) for v in nodes)
    y = np.asarray(y, dtype=float)
    if y.shape != (kernel.n,):
        raise DimensionMismatch(f"signal shape {y.shape}, expected ({kernel.n},)")
    n_labels = len(nodes)
    rows = np.asarray(nodes, dtype=int) - 1

    augmented = augment_kernel(kernel, [psi]).values
    data = labeled_set(nodes, y[rows])
    model = fit(augmented, data, gamma, interpolate=gamma == 0)
    y_star = predict(model, augmented.columns(nodes))
    interp = fit(augmented, data, 0.0, interpolate=True)
    y_interp = predict(interp, augmented.columns(nodes))

    power = power_function(kernel, nodes)
    lam_min = float(np.linalg.eigvalsh(kernel.submatrix(nodes))[0])
    norm_y = augmented_native_norm(kernel, psi, y, spectrum=spectrum, gbf=gbf)
    diag = np.sqrt(np.maximum(np.diag(kernel.values), 0.0))
    reg_rhs = (gamma * n_labels * diag / (lam_min + gamma * n_labels)) * norm_y
    rhs = power * norm_y + reg_rhs

    lhs = np.abs(y - y_star)
    reg_lhs = np.abs(y_interp - y_star)
    # Absolute floor for the exact-zero cases (bound vanishes at centers
    # while the computed error carries machine-epsilon dust).
    floor = 1e-12 * (1.0 + float(np.max(np.abs(y))))
    return BoundReport(
        rhs=rhs,
        lhs=lhs,
        holds=bool(np.all(lhs <= rhs * (1.0 + BOUND_SLACK) + floor)),
        power=power,
        regularization_rhs=reg_rhs,
        regularization_lhs=reg_lhs,
        regularization_holds=bool(
            np.all(reg_lhs <= reg_rhs * (1.0 + BOUND_SLACK) + floor)
        ),
        lambda_min=lam_min,
        norm_y=norm_y,
        y_star=y_star,
        y_interp=y_interp,
    )


def align_prior_to_labels(psi: FeatureSpec, data: LabeledSet) -> FeatureSpec:
    """Resolve the prior's arbitrary global polarity against the labels.

    A binary prior and its global flip generate the same augmented kernel,
    so labels agreeing with the flipped prior are equally consistent.
    Returns the polarity that matches the labels; raises when the labels
    agree with neither.
    """
    from .features import binary_feature

    rows = np.asarray(data.nodes, dtype=int) - 1
    signs = np.sign(data.labels)
    if np.array_equal(signs, psi.values[rows]):
        return psi
    if np.array_equal(signs, -psi.values[rows]):
        return binary_feature(-psi.values, psi.alpha)
    bad = data.nodes[int(np.flatnonzero(signs != psi.values[rows])[0])]
    raise LabelsInconsistent(
        f"labels match neither polarity of the prior (first clash at node {bad})"
    )


@dataclass(frozen=True)
class ConsistencyResult:
    consistent: bool
    counterexample: int | None   # 1-based node, when not consistent
    guaranteed: bool             # hypothesis of the consistency theorem held


def consistency_check(
    kernel: KernelMatrix,
    psi: FeatureSpec,
    data: LabeledSet,
    gamma: float,
) -> ConsistencyResult:
    """Whether the regularized classifier reproduces the binary prior.

    Requires every kernel entry strictly positive and labels that agree
    with the prior at the labeled nodes. Reproduction is guaranteed for a
    single label at any gamma > 0, and for more labels once gamma exceeds
    twice the largest kernel diagonal.
    """
    kernel = _full_kernel(kernel)
    if np.min(kernel.values) <= 0:
        raise KernelNotPositive(
            f"kernel has nonpositive entry {np.min(kernel.values):.3e}"
        )
    if gamma <= 0:
        raise InvalidParameter("consistency check needs gamma > 0")
    prior = psi.values
    rows = np.asarray(data.nodes, dtype=int) - 1
    if not np.array_equal(np.sign(data.labels), prior[rows]):
        bad = data.nodes[int(np.flatnonzero(np.sign(data.labels) != prior[rows])[0])]
        raise LabelsInconsistent(f"label at node {bad} contradicts the prior")
    augmented = augment_kernel(kernel, [psi]).values
    model = fit(augmented, data, gamma)
    scores = predict(model, augmented.columns(data.nodes))
    predicted = np.where(scores >= 0, 1, -1)
    mismatches = np.flatnonzero(predicted != prior)
    guaranteed = data.count == 1 or gamma > 2.0 * float(np.max(np.diag(kernel.values)))
    if mismatches.size:
        return ConsistencyResult(False, int(mismatches[0]) + 1, guaranteed)
    return ConsistencyResult(True, None, guaranteed)


@dataclass(frozen=True)
class DiagnosticsReport:
    """Per-node diagnostics plus the scalar quantities behind them."""

    power: np.ndarray
    lambda_min: float
    bound: np.ndarray          # bound per unit of augmented native norm
    consistency: dict
    gamma: float
    nodes: tuple

    def to_json(self) -> dict:
        return {
            "gamma": self.gamma,
            "nodes": list(self.nodes),
            "lambda_min": self.lambda_min,
            "power": [float(v) for v in self.power],
            "bound": [float(v) for v in self.bound],
            "consistency": self.consistency,
        }

    def write_json(self, path) -> None:
        with open(path, "w") as fh:
            json.dump(self.to_json(), fh, indent=2)
            fh.write("\n")

    def write_csv(self, path) -> None:
        with open(path, "w", newline="") as fh:
            writer = csv.writer(fh)
            writer.writerow(["index", "power", "bound"])
            for k in range(len(self.power)):
                writer.writerow(
                    [k + 1, repr(float(self.power[k])), repr(float(self.bound[k]))]
                )


def diagnostics_report(
    kernel: KernelMatrix,
    psi: FeatureSpec | None,
    data: LabeledSet,
    gamma: float,
) -> DiagnosticsReport:
    """Power function, smallest center-block eigenvalue, normalized bound,
    and consistency flags for one labeled problem.

    Prior-reproduction flags are produced only when a binary prior psi is
    given and its hypotheses (strictly positive kernel, prior-consistent
    labels) hold.
    """
    kernel = _full_kernel(kernel)
    power = power_function(kernel, data.nodes)
    lam_min = float(np.linalg.eigvalsh(kernel.submatrix(data.nodes))[0])
    n_labels = data.count
    diag = np.sqrt(np.maximum(np.diag(kernel.values), 0.0))
    bound = power + gamma * n_labels * diag / (lam_min + gamma * n_labels)

    flags: dict = {
        "single_label": n_labels == 1,
        "gamma_above_threshold": gamma
        > 2.0 * float(np.max(np.diag(kernel.values))),
        "kernel_strictly_positive": bool(np.min(kernel.values) > 0),
    }
    if psi is not None and psi.kind == "binary":
        try:
            aligned = align_prior_to_labels(psi, data)
            labels_consistent = True
        except LabelsInconsistent:
            labels_consistent = False
        flags["labels_match_prior"] = labels_consistent
        if flags["kernel_strictly_positive"] and labels_consistent and gamma > 0:
            result = consistency_check(kernel, aligned, data, gamma)
            flags["prior_reproduced"] = result.consistent
            flags["reproduction_guaranteed"] = result.guaranteed
    return DiagnosticsReport(
        power=power,
        lambda_min=lam_min,
        bound=bound,
        consistency=flags,
        gamma=float(gamma),
        nodes=data.nodes,
    )
