"""Eigendecomposition, the graph Fourier transform, and graph convolution.

The Fourier basis of a graph is the orthonormal eigenvector matrix U of its
Laplacian, with eigenvalues in ascending order. Forward transform is U^T x,
inverse is U xhat, and convolution multiplies spectral coefficients
pointwise: x * y = U diag(U^T x) U^T y.
"""

from __future__ import annotations

import csv
import hashlib
import json
import struct
from dataclasses import dataclass

import numpy as np

from .errors import ConvergenceFailure, DimensionMismatch, IoError, ParseError
from .graphs import Graph

ORTHONORMALITY_TOL = 1e-8
RESIDUAL_TOL = 1e-8

_MAGIC = b"GBFU"


@dataclass(frozen=True)
class Spectrum:
    """Orthonormal eigendecomposition L = U diag(eigenvalues) U^T."""

    eigenvalues: np.ndarray
    vectors: np.ndarray
    source_hash: str

    def __post_init__(self):
        self.eigenvalues.setflags(write=False)
        self.vectors.setflags(write=False)

    @property
    def n(self) -> int:
        return len(self.eigenvalues)


def _laplacian_digest(lap: np.ndarray) -> str:
    h = hashlib.sha256()
    h.update(str(lap.shape).encode())
    h.update(np.ascontiguousarray(lap).tobytes())
    return h.hexdigest()


def _fix_signs(vectors: np.ndarray) -> np.ndarray:
    # Deterministic orientation: the entry of largest magnitude in each
    # column is made positive; argmax breaks ties at the lowest index.
    idx = np.argmax(np.abs(vectors), axis=0)
    signs = np.sign(vectors[idx, np.arange(vectors.shape[1])])
    signs[signs == 0] = 1.0
    return vectors * signs


def eigendecompose(graph_or_matrix) -> Spectrum:
    """Dense symmetric eigendecomposition with a fixed sign convention.

    Deterministic for a fixed input: eigenvalues ascending, each
    eigenvector oriented so its largest-magnitude entry is positive.
    """
    if isinstance(graph_or_matrix, Graph):
        lap = graph_or_matrix.laplacian
    else:
        lap = np.asarray(graph_or_matrix, dtype=float)
    try:
        eigenvalues, vectors = np.linalg.eigh(lap)
    except np.linalg.LinAlgError as exc:
        raise ConvergenceFailure(f"eigendecomposition failed: {exc}") from exc
    vectors = _fix_signs(vectors)
    spectrum = Spectrum(
        eigenvalues=eigenvalues,
        vectors=vectors,
        source_hash=_laplacian_digest(lap),
    )
    _check_residuals(lap, spectrum)
    return spectrum


def _check_residuals(lap: np.ndarray, s: Spectrum) -> None:
    n = s.n
    ortho = np.max(np.abs(s.vectors.T @ s.vectors - np.eye(n)))
    if ortho > ORTHONORMALITY_TOL:
        raise ConvergenceFailure(f"eigenvector orthonormality residual {ortho:.3e}")
    resid = np.max(np.abs(lap @ s.vectors - s.vectors * s.eigenvalues))
    bound = RESIDUAL_TOL * (1.0 + np.max(np.abs(lap)))
    if resid > bound:
        raise ConvergenceFailure(f"eigenpair residual {resid:.3e} exceeds {bound:.3e}")


def product_spectrum(sg: Spectrum, sf: Spectrum) -> Spectrum:
    """Spectrum of a Cartesian product from its factor spectra.

    Eigenvectors are the Kronecker products of factor eigenvectors and the
    eigenvalue of column (k, k') is the sum of the factor eigenvalues.
    Columns are sorted ascending by eigenvalue with stable tie-breaking in
    the original (k, k') order, so tensor multipliers built with the same
    ordering stay aligned. This keeps product eigenspaces spanned by the
    tensor basis, which a direct eigendecomposition would not guarantee
    for repeated eigenvalues.
    """
    sums = np.add.outer(sg.eigenvalues, sf.eigenvalues).ravel()
    order = np.argsort(sums, kind="stable")
    vectors = np.kron(sg.vectors, sf.vectors)[:, order]
    h = hashlib.sha256((sg.source_hash + sf.source_hash).encode()).hexdigest()
    return Spectrum(eigenvalues=sums[order], vectors=vectors, source_hash=h)


def product_order(sg: Spectrum, sf: Spectrum) -> np.ndarray:
    """Column permutation applied by product_spectrum, for aligning tensors."""
    sums = np.add.outer(sg.eigenvalues, sf.eigenvalues).ravel()
    return np.argsort(sums, kind="stable")


def _as_signal(s: Spectrum, x) -> np.ndarray:
    x = np.asarray(x, dtype=float)
    if x.shape != (s.n,):
        raise DimensionMismatch(f"signal shape {x.shape}, expected ({s.n},)")
    return x


def gft(s: Spectrum, x) -> np.ndarray:
    """Spectral coefficients U^T x."""
    return s.vectors.T @ _as_signal(s, x)


def igft(s: Spectrum, xhat) -> np.ndarray:
    """Inverse transform U xhat."""
    return s.vectors @ _as_signal(s, xhat)


def convolve(s: Spectrum, x, y) -> np.ndarray:
    """Graph convolution: pointwise product of spectral coefficients."""
    return igft(s, gft(s, x) * gft(s, y))


def unity_element(s: Spectrum) -> np.ndarray:
    """The convolution identity: all spectral coefficients equal one."""
    return s.vectors.sum(axis=1)


def algebra_norm(s: Spectrum, x) -> float:
    """Operator norm of convolution by x: the largest |spectral coefficient|."""
    xhat = gft(s, x)
    return float(np.max(np.abs(xhat))) if len(xhat) else 0.0


# -- export -------------------------------------------------------------------

def eigenvalues_to_json(s: Spectrum) -> dict:
    return {
        "n": s.n,
        "eigenvalues": [float(v) for v in s.eigenvalues],
        "source_hash": s.source_hash,
    }


def write_eigenvalues(s: Spectrum, path) -> None:
    """Eigenvalue dump; .json or .csv by extension."""
    path = str(path)
    try:
        if path.endswith(".json"):
            with open(path, "w") as fh:
                json.dump(eigenvalues_to_json(s), fh)
                fh.write("\n")
        else:
            with open(path, "w", newline="") as fh:
                writer = csv.writer(fh)
                writer.writerow(["index", "eigenvalue"])
                for k, v in enumerate(s.eigenvalues, start=1):
                    writer.writerow([k, repr(float(v))])
    except OSError as exc:
        raise IoError(str(exc)) from exc


def write_vectors_binary(s: Spectrum, path) -> None:
    """Binary dump of U: 16-byte header (magic, u32 n, padding), then
    row-major little-endian doubles."""
    header = _MAGIC + struct.pack("<I", s.n) + b"\0" * 8
    try:
        with open(path, "wb") as fh:
            fh.write(header)
            fh.write(np.ascontiguousarray(s.vectors, dtype="<f8").tobytes())
    except OSError as exc:
        raise IoError(str(exc)) from exc


def read_vectors_binary(path) -> np.ndarray:
    try:
        with open(path, "rb") as fh:
            header = fh.read(16)
            if len(header) < 16 or header[:4] != _MAGIC:
                raise ParseError(f"{path}: bad header magic")
            (n,) = struct.unpack("<I", header[4:8])
            data = np.frombuffer(fh.read(), dtype="<f8")
    except OSError as exc:
        raise IoError(str(exc)) from exc
    if data.size != n * n:
        raise ParseError(f"{path}: expected {n * n} doubles, found {data.size}")
    return data.reshape(n, n)
