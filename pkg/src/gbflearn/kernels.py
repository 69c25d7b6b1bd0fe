"""Positive definite graph basis functions and their kernels.

A basis function is stored by its spectral multipliers fhat: the kernel it
generates is K = U diag(fhat) U^T, positive definite exactly when every
multiplier is strictly positive. The native-space inner product weights
spectral coefficients by 1/fhat.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass, field

import numpy as np

from .errors import (
    DimensionMismatch,
    InvalidCenter,
    NonFiniteFilterValue,
    NotPositiveDefinite,
)
from .graphs import Graph
from .spectral import Spectrum, gft, product_order

# Multipliers below this are clamped in native-space inner products; the
# components they weight are already suppressed by the kernel itself.
MULTIPLIER_FLOOR = 1e-300


@dataclass(frozen=True)
class Gbf:
    """Graph basis function given by its spectral multipliers."""

    fhat: np.ndarray
    kind: str = "explicit"  # diffusion | spline | poly | tensor | explicit
    params: dict = field(default_factory=dict)

    def __post_init__(self):
        self.fhat.setflags(write=False)

    @property
    def n(self) -> int:
        return len(self.fhat)


@dataclass(frozen=True)
class KernelMatrix:
    """Kernel values, either the full n x n matrix or an n x N column block.

    For a column block, centers holds the 1-based vertex indices of the
    columns in order.
    """

    values: np.ndarray
    centers: tuple | None = None

    def __post_init__(self):
        self.values.setflags(write=False)
        if self.centers is not None and len(self.centers) != self.values.shape[1]:
            raise DimensionMismatch(
                f"{self.values.shape[1]} columns for {len(self.centers)} centers"
            )

    @property
    def n(self) -> int:
        return self.values.shape[0]

    @property
    def is_full(self) -> bool:
        return self.centers is None

    def submatrix(self, nodes) -> np.ndarray:
        """The square block K(w_i, w_j) at the given 1-based nodes."""
        rows = np.asarray(nodes, dtype=int) - 1
        if self.is_full:
            return self.values[np.ix_(rows, rows)]
        cols = [self.centers.index(int(v)) for v in nodes]
        return self.values[np.ix_(rows, cols)]

    def columns(self, nodes) -> np.ndarray:
        """The n x N block of columns at the given 1-based nodes."""
        if self.is_full:
            return self.values[:, np.asarray(nodes, dtype=int) - 1]
        return self.values[:, [self.centers.index(int(v)) for v in nodes]]


def _check_centers(n: int, centers):
    centers = [int(c) for c in centers]
    if len(set(centers)) != len(centers):
        raise InvalidCenter("repeated center")
    for c in centers:
        if not 1 <= c <= n:
            raise InvalidCenter(f"center {c} out of range 1..{n}")
    return centers


def gbf_from_filter(spectrum: Spectrum, g, kind: str = "explicit", params=None) -> Gbf:
    """Basis function with multipliers g(eigenvalue) for a scalar filter g."""
    fhat = np.array([float(g(lam)) for lam in spectrum.eigenvalues])
    if not np.all(np.isfinite(fhat)):
        k = int(np.flatnonzero(~np.isfinite(fhat))[0])
        raise NonFiniteFilterValue(
            f"filter not finite at eigenvalue {spectrum.eigenvalues[k]:.6g}"
        )
    return Gbf(fhat=fhat, kind=kind, params=dict(params or {}))


def diffusion_gbf(spectrum: Spectrum, t: float) -> Gbf:
    """Heat-kernel multipliers exp(-t * eigenvalue)."""
    return gbf_from_filter(spectrum, lambda lam: np.exp(-t * lam), "diffusion", {"t": t})


def spline_gbf(spectrum: Spectrum, eps: float, s: float) -> Gbf:
    """Variational-spline multipliers (eps + eigenvalue)^-s."""
    return gbf_from_filter(
        spectrum, lambda lam: (eps + lam) ** (-s), "spline", {"eps": eps, "s": s}
    )


def polynomial_gbf(spectrum: Spectrum, coeffs) -> Gbf:
    """Multipliers p(eigenvalue) for monomial coefficients [c0, c1, ...]."""
    coeffs = [float(c) for c in coeffs]
    return gbf_from_filter(
        spectrum, lambda lam: _horner(coeffs, lam), "poly", {"coeffs": coeffs}
    )


def _horner(coeffs, x):
    acc = 0.0
    for c in reversed(coeffs):
        acc = acc * x + c
    return acc


def is_positive_definite(f: Gbf) -> bool:
    """Strict sign test on the multipliers; no tolerance."""
    return bool(np.all(f.fhat > 0))


def kernel_matrix(spectrum: Spectrum, f: Gbf, centers=None) -> KernelMatrix:
    """Kernel U diag(fhat) U^T, full or restricted to columns at centers."""
    if f.n != spectrum.n:
        raise DimensionMismatch(f"gbf length {f.n} for spectrum of size {spectrum.n}")
    u = spectrum.vectors
    if centers is None:
        values = (u * f.fhat) @ u.T
        return KernelMatrix(values=values, centers=None)
    centers = _check_centers(spectrum.n, centers)
    rows = np.asarray(centers, dtype=int) - 1
    values = (u * f.fhat) @ u[rows, :].T
    return KernelMatrix(values=values, centers=tuple(centers))


def polynomial_kernel_columns(graph: Graph, coeffs, centers) -> KernelMatrix:
    """Columns of p(L) at the centers via repeated Laplacian products.

    Horner's scheme on the matrix needs only degree-many mat-vec products
    with L and no eigendecomposition; it agrees with the spectral route
    for the same coefficients.
    """
    centers = _check_centers(graph.n, centers)
    coeffs = [float(c) for c in coeffs]
    if not coeffs:
        coeffs = [0.0]
    lap = graph.laplacian
    basis = np.zeros((graph.n, len(centers)))
    for k, c in enumerate(centers):
        basis[c - 1, k] = 1.0
    values = coeffs[-1] * basis
    for c in reversed(coeffs[:-1]):
        values = lap @ values + c * basis
    return KernelMatrix(values=values, centers=tuple(centers))


def _clamped_multipliers(f: Gbf) -> np.ndarray:
    fhat = f.fhat
    if np.any(fhat < MULTIPLIER_FLOOR):
        warnings.warn(
            "spectral multipliers below 1e-300 clamped in native-space inner product",
            RuntimeWarning,
            stacklevel=3,
        )
        fhat = np.maximum(fhat, MULTIPLIER_FLOOR)
    return fhat


def native_inner(spectrum: Spectrum, f: Gbf, x, y) -> float:
    """Native-space inner product: spectral coefficients weighted by 1/fhat."""
    if not is_positive_definite(f):
        raise NotPositiveDefinite("native space requires strictly positive multipliers")
    fhat = _clamped_multipliers(f)
    return float(np.sum(gft(spectrum, x) * gft(spectrum, y) / fhat))


def native_norm(spectrum: Spectrum, f: Gbf, x) -> float:
    if not is_positive_definite(f):
        raise NotPositiveDefinite("native space requires strictly positive multipliers")
    fhat = _clamped_multipliers(f)
    return float(np.sqrt(np.sum(gft(spectrum, x) ** 2 / fhat)))


def tensor_gbf(sg: Spectrum, f: Gbf, sf: Spectrum, e: Gbf) -> Gbf:
    """Basis function on the product graph with multipliers fhat_k * ehat_k'.

    Ordered to match product_spectrum(sg, sf), so the pair behaves exactly
    like a factor spectrum/gbf pair on the product graph.
    """
    if f.n != sg.n or e.n != sf.n:
        raise DimensionMismatch("factor gbf sizes do not match factor spectra")
    multipliers = np.kron(f.fhat, e.fhat)[product_order(sg, sf)]
    return Gbf(
        fhat=multipliers,
        kind="tensor",
        params={"factors": (f.kind, e.kind)},
    )
