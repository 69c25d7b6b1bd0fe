import numpy as np
import pytest
from numpy.testing import assert_allclose

from gbflearn.errors import (
    DimensionMismatch,
    InvalidCenter,
    NonFiniteFilterValue,
    NotPositiveDefinite,
)
from gbflearn.graphs import build_graph, cartesian_product
from gbflearn.kernels import (
    Gbf,
    diffusion_gbf,
    gbf_from_filter,
    is_positive_definite,
    kernel_matrix,
    native_inner,
    native_norm,
    polynomial_gbf,
    polynomial_kernel_columns,
    spline_gbf,
    tensor_gbf,
)
from gbflearn.spectral import convolve, eigendecompose, igft, product_spectrum

from conftest import random_graph


class TestGbfConstruction:
    def test_diffusion_multipliers(self, rng):
        g = random_graph(rng, 8, kind="normalized")
        s = eigendecompose(g)
        f = diffusion_gbf(s, 5.0)
        assert_allclose(f.fhat, np.exp(-5.0 * s.eigenvalues), atol=0)

    def test_spline_multipliers(self, rng):
        g = random_graph(rng, 8, kind="standard")
        s = eigendecompose(g)
        f = spline_gbf(s, 0.01, 2.0)
        assert_allclose(f.fhat, (0.01 + s.eigenvalues) ** -2.0, rtol=1e-14)

    def test_constant_filter_gives_identity_kernel(self, rng):
        g = random_graph(rng, 6, kind="standard")
        s = eigendecompose(g)
        f = gbf_from_filter(s, lambda lam: 1.0)
        assert_allclose(kernel_matrix(s, f).values, np.eye(6), atol=1e-12)

    def test_nonfinite_filter_rejected(self, p3_standard):
        s = eigendecompose(p3_standard)
        with pytest.raises(NonFiniteFilterValue):
            gbf_from_filter(s, lambda lam: float("inf") if lam < 0.5 else 1.0)


class TestPositiveDefinite:
    def test_diffusion_always_pd(self, rng):
        g = random_graph(rng, 7, kind="normalized")
        s = eigendecompose(g)
        for t in (-3.0, 0.0, 0.5, 50.0):
            assert is_positive_definite(diffusion_gbf(s, t))

    def test_boundary_alpha_semidefinite(self):
        alpha = 1.0
        f = Gbf(fhat=np.array([1.0 + alpha, 1.0 - alpha]))
        assert not is_positive_definite(f)

    def test_zero_multiplier(self):
        assert not is_positive_definite(Gbf(fhat=np.array([1.0, 0.0, 2.0])))

    def test_matches_kernel_min_eigenvalue(self, rng):
        # Strictly positive multipliers iff the kernel matrix is p.d.
        g = random_graph(rng, 6, kind="standard")
        s = eigendecompose(g)
        for _ in range(20):
            fhat = rng.uniform(0.05, 2.0, size=6)
            if rng.uniform() < 0.5:
                fhat[rng.integers(0, 6)] *= -1.0
            f = Gbf(fhat=fhat)
            min_eig = np.linalg.eigvalsh(kernel_matrix(s, f).values)[0]
            assert is_positive_definite(f) == (min_eig > 1e-12)


class TestKernelMatrix:
    def test_all_ones_identity(self, rng):
        g = random_graph(rng, 5, kind="standard")
        s = eigendecompose(g)
        assert_allclose(
            kernel_matrix(s, Gbf(fhat=np.ones(5))).values, np.eye(5), atol=1e-12
        )

    def test_column_equals_translate(self, rng):
        # Each kernel column is the convolution of the basis signal with a
        # unit impulse at the center.
        g = random_graph(rng, 8, kind="normalized")
        s = eigendecompose(g)
        f = diffusion_gbf(s, 2.0)
        signal = igft(s, f.fhat)
        full = kernel_matrix(s, f)
        for w in (1, 4, 8):
            delta = np.zeros(8)
            delta[w - 1] = 1.0
            assert_allclose(
                full.values[:, w - 1], convolve(s, signal, delta), atol=1e-10
            )

    def test_diffusion_t0_identity(self, rng):
        g = random_graph(rng, 6, kind="standard")
        s = eigendecompose(g)
        assert_allclose(
            kernel_matrix(s, diffusion_gbf(s, 0.0)).values, np.eye(6), atol=1e-12
        )

    def test_column_block_matches_full(self, rng):
        g = random_graph(rng, 9, kind="normalized")
        s = eigendecompose(g)
        f = spline_gbf(s, 0.1, 1.5)
        full = kernel_matrix(s, f)
        block = kernel_matrix(s, f, centers=[2, 7, 5])
        assert block.centers == (2, 7, 5)
        assert_allclose(block.values, full.values[:, [1, 6, 4]], atol=1e-12)

    def test_mercer_reconstruction(self, rng):
        g = random_graph(rng, 8, kind="standard")
        s = eigendecompose(g)
        f = diffusion_gbf(s, 1.0)
        explicit = sum(
            f.fhat[k] * np.outer(s.vectors[:, k], s.vectors[:, k]) for k in range(8)
        )
        assert_allclose(kernel_matrix(s, f).values, explicit, atol=1e-9)

    def test_symmetry_and_psd(self, rng):
        g = random_graph(rng, 10, kind="normalized", weighted=True)
        s = eigendecompose(g)
        f = diffusion_gbf(s, 3.0)
        k = kernel_matrix(s, f).values
        assert np.max(np.abs(k - k.T)) <= 1e-10 * np.max(np.abs(k))
        assert np.linalg.eigvalsh(k)[0] > -1e-10

    def test_principal_submatrix_pd(self, rng):
        g = random_graph(rng, 9, kind="standard")
        s = eigendecompose(g)
        k = kernel_matrix(s, diffusion_gbf(s, 1.0))
        sub = k.submatrix([2, 5, 9])
        assert np.linalg.eigvalsh(sub)[0] > 0

    def test_invalid_center(self, rng):
        g = random_graph(rng, 5, kind="standard")
        s = eigendecompose(g)
        f = diffusion_gbf(s, 1.0)
        with pytest.raises(InvalidCenter):
            kernel_matrix(s, f, centers=[0])
        with pytest.raises(InvalidCenter):
            kernel_matrix(s, f, centers=[2, 2])

    def test_dimension_mismatch(self, rng):
        g = random_graph(rng, 5, kind="standard")
        s = eigendecompose(g)
        with pytest.raises(DimensionMismatch):
            kernel_matrix(s, Gbf(fhat=np.ones(4)))


class TestPolynomialColumns:
    def test_degree_zero_identity_columns(self, p3_standard):
        block = polynomial_kernel_columns(p3_standard, [1.0], [1, 3])
        assert_allclose(block.values, np.eye(3)[:, [0, 2]], atol=0)

    def test_linear_polynomial_is_laplacian_column(self, p3_standard):
        block = polynomial_kernel_columns(p3_standard, [0.0, 1.0], [2])
        assert_allclose(block.values[:, 0], [-1.0, 2.0, -1.0], atol=0)

    def test_matches_spectral_path(self, rng):
        # Oracle: the spectral route through the eigendecomposition.
        g = random_graph(rng, 8, kind="standard", weighted=True)
        s = eigendecompose(g)
        coeffs = rng.normal(size=4).tolist()
        centers = [1, 5, 8]
        direct = polynomial_kernel_columns(g, coeffs, centers)
        spectral = kernel_matrix(s, polynomial_gbf(s, coeffs), centers=centers)
        assert_allclose(direct.values, spectral.values, atol=1e-8)


class TestNativeSpace:
    def test_all_ones_is_euclidean(self, rng):
        g = random_graph(rng, 6, kind="standard")
        s = eigendecompose(g)
        f = Gbf(fhat=np.ones(6))
        x, y = rng.normal(size=(2, 6))
        assert native_inner(s, f, x, y) == pytest.approx(float(x @ y), rel=1e-12)

    def test_kernel_column_norm(self, rng):
        g = random_graph(rng, 7, kind="normalized")
        s = eigendecompose(g)
        f = diffusion_gbf(s, 1.5)
        k = kernel_matrix(s, f).values
        v = 3
        assert native_norm(s, f, k[:, v - 1]) ** 2 == pytest.approx(
            k[v - 1, v - 1], rel=1e-10
        )

    def test_matches_explicit_inverse(self, p3_standard, rng):
        # Oracle: the quadratic form through the explicitly inverted matrix.
        s = eigendecompose(p3_standard)
        f = diffusion_gbf(s, 0.7)
        k = kernel_matrix(s, f).values
        kinv = np.linalg.inv(k)
        for _ in range(10):
            x, y = rng.normal(size=(2, 3))
            assert native_inner(s, f, x, y) == pytest.approx(
                float(y @ kinv @ x), rel=1e-8
            )

    def test_reproducing_property(self, rng):
        g = random_graph(rng, 8, kind="standard")
        s = eigendecompose(g)
        f = spline_gbf(s, 0.5, 1.0)
        k = kernel_matrix(s, f).values
        x = rng.normal(size=8)
        for v in (1, 4, 8):
            assert native_inner(s, f, x, k[:, v - 1]) == pytest.approx(
                x[v - 1], abs=1e-8
            )

    def test_semidefinite_rejected(self, rng):
        g = random_graph(rng, 4, kind="standard")
        s = eigendecompose(g)
        f = Gbf(fhat=np.array([1.0, 1.0, 1.0, 0.0]))
        with pytest.raises(NotPositiveDefinite):
            native_inner(s, f, np.ones(4), np.ones(4))

    def test_underflow_clamp_warns(self, rng):
        g = random_graph(rng, 3, kind="standard")
        s = eigendecompose(g)
        f = Gbf(fhat=np.array([1.0, 1.0, 1e-310]))
        with pytest.warns(RuntimeWarning):
            value = native_norm(s, f, rng.normal(size=3))
        assert np.isfinite(value)


class TestStrictPositivity:
    def test_diffusion_strictly_positive_on_connected(self, rng):
        for _ in range(5):
            g = random_graph(rng, 9, kind="standard", weighted=True)
            s = eigendecompose(g)
            for t in (0.1, 1.0, 10.0):
                k = kernel_matrix(s, diffusion_gbf(s, t)).values
                assert np.min(k) > 0

    def test_spline_strictly_positive_under_norm_condition(self, rng):
        g = random_graph(rng, 8, kind="standard")
        s = eigendecompose(g)
        eps, power = 0.5, 2
        d = float(np.max(np.diag(g.laplacian)))
        # The positivity statement needs ||d I - L|| < d + eps.
        assert np.linalg.norm(d * np.eye(8) - g.laplacian, 2) < d + eps
        k = kernel_matrix(s, spline_gbf(s, eps, power)).values
        assert np.min(k) > 0


class TestTensorGbf:
    def test_pd_factors_give_pd_tensor(self, rng):
        g = random_graph(rng, 4, kind="standard")
        f = random_graph(rng, 3, kind="standard")
        sg, sf = eigendecompose(g), eigendecompose(f)
        tensor = tensor_gbf(sg, diffusion_gbf(sg, 1.0), sf, diffusion_gbf(sf, 2.0))
        assert is_positive_definite(tensor)

    def test_all_ones_factor_gives_kron_with_identity(self, rng):
        g = random_graph(rng, 4, kind="standard")
        f = random_graph(rng, 3, kind="standard")
        sg, sf = eigendecompose(g), eigendecompose(f)
        fg = diffusion_gbf(sg, 1.0)
        ones = Gbf(fhat=np.ones(3))
        sp = product_spectrum(sg, sf)
        tensor_kernel = kernel_matrix(sp, tensor_gbf(sg, fg, sf, ones)).values
        base = kernel_matrix(sg, fg).values
        assert_allclose(tensor_kernel, np.kron(base, np.eye(3)), atol=1e-10)

    def test_tensor_kernel_is_kron_of_kernels(self, rng):
        g = random_graph(rng, 4, kind="normalized")
        f = random_graph(rng, 3, kind="standard")
        sg, sf = eigendecompose(g), eigendecompose(f)
        fg, fe = diffusion_gbf(sg, 0.5), spline_gbf(sf, 0.2, 1.0)
        sp = product_spectrum(sg, sf)
        tensor_kernel = kernel_matrix(sp, tensor_gbf(sg, fg, sf, fe)).values
        assert_allclose(
            tensor_kernel,
            np.kron(kernel_matrix(sg, fg).values, kernel_matrix(sf, fe).values),
            atol=1e-10,
        )

    def test_tensor_convolution_identity(self):
        # (f (x) e) * (f' (x) e') = (f * f') (x) (e * e') on P2 x P2.
        p2 = build_graph(2, [(1, 2, 1.0)], "standard")
        s = eigendecompose(p2)
        sp = product_spectrum(s, s)
        rng = np.random.default_rng(5)
        f, fp, e, ep = rng.normal(size=(4, 2))
        left = convolve(sp, np.kron(f, e), np.kron(fp, ep))
        right = np.kron(convolve(s, f, fp), convolve(s, e, ep))
        assert_allclose(left, right, atol=1e-10)

    def test_factor_size_mismatch(self, rng):
        g = random_graph(rng, 4, kind="standard")
        f = random_graph(rng, 3, kind="standard")
        sg, sf = eigendecompose(g), eigendecompose(f)
        with pytest.raises(DimensionMismatch):
            tensor_gbf(sg, Gbf(fhat=np.ones(3)), sf, Gbf(fhat=np.ones(3)))
