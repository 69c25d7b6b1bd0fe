import numpy as np
import pytest
from numpy.testing import assert_allclose

from gbflearn.analysis import (
    augmented_native_norm,
    consistency_check,
    diagnostics_report,
    error_bound,
    lagrange_coefficients,
    power_function,
    power_invariance_check,
)
from gbflearn.errors import (
    InvalidParameter,
    KernelNotPositive,
    LabelsInconsistent,
)
from gbflearn.features import augment_kernel, binary_feature
from gbflearn.kernels import diffusion_gbf, kernel_matrix, native_norm
from gbflearn.rls import labeled_set
from gbflearn.spectral import eigendecompose

from conftest import random_graph


def _setup(rng, n, t=1.0, kind="standard"):
    g = random_graph(rng, n, kind=kind)
    s = eigendecompose(g)
    f = diffusion_gbf(s, t)
    return s, f, kernel_matrix(s, f)


class TestPowerFunction:
    def test_zero_at_centers(self, rng):
        s, f, k = _setup(rng, 9)
        nodes = [2, 5, 8]
        p = power_function(k, nodes)
        assert np.max(p[[1, 4, 7]]) <= 1e-7
        assert np.min(p) >= 0

    def test_all_centers_identically_zero(self, rng):
        s, f, k = _setup(rng, 6)
        p = power_function(k, list(range(1, 7)))
        assert np.max(p) <= 1e-7

    def test_matches_native_norm_of_residual(self, rng):
        # Oracle: evaluate the defining expression directly, as the
        # native-space norm of the residual between the kernel column and
        # its best approximation from the center columns.
        s, f, k = _setup(rng, 8)
        nodes = [1, 4, 6]
        p = power_function(k, nodes)
        coeff = lagrange_coefficients(k, nodes)
        for v in range(1, 9):
            residual = k.values[:, v - 1] - k.columns(nodes) @ coeff[:, v - 1]
            assert p[v - 1] == pytest.approx(
                native_norm(s, f, residual), abs=1e-8
            )

    def test_bounded_by_diagonal(self, rng):
        s, f, k = _setup(rng, 10)
        p = power_function(k, [3, 7])
        assert np.all(p <= np.sqrt(np.diag(k.values)) + 1e-10)

    def test_monotone_under_center_growth(self, rng):
        s, f, k = _setup(rng, 12)
        small = power_function(k, [2, 5])
        large = power_function(k, [2, 5, 9, 11])
        assert np.all(large <= small + 1e-8)

    def test_empty_centers_rejected(self, rng):
        s, f, k = _setup(rng, 5)
        with pytest.raises(InvalidParameter):
            power_function(k, [])


class TestPowerInvariance:
    def test_two_moon_kernel(self, two_moon_pipeline, rng):
        pipeline, _ = two_moon_pipeline
        psi = binary_feature(rng.choice([-1, 1], size=600), -1.0)
        nodes = (rng.choice(600, size=6, replace=False) + 1).tolist()
        assert power_invariance_check(pipeline.kernel, psi, nodes)

    def test_constant_map_trivial(self, rng):
        s, f, k = _setup(rng, 8)
        psi = binary_feature(np.ones(8, dtype=int), -1.0)
        assert power_invariance_check(k, psi, [1, 5])

    def test_ten_random_maps(self, rng):
        # Oracle: compute both power functions directly and compare.
        s, f, k = _setup(rng, 8)
        nodes = [2, 4, 7]
        base = power_function(k, nodes)
        for _ in range(10):
            psi = binary_feature(rng.choice([-1, 1], size=8), -1.0)
            augmented = augment_kernel(k, [psi]).values
            direct = power_function(augmented, nodes)
            assert np.max(np.abs(direct - base)) <= 1e-7
            assert power_invariance_check(k, psi, nodes)


class TestAugmentedNorm:
    def test_spectral_and_matrix_paths_agree(self, rng):
        s, f, k = _setup(rng, 9)
        psi = binary_feature(rng.choice([-1, 1], size=9), -1.0)
        y = rng.normal(size=9)
        a = augmented_native_norm(k, psi, y)
        b = augmented_native_norm(k, psi, y, spectrum=s, gbf=f)
        assert a == pytest.approx(b, rel=1e-8)

    def test_equals_inverse_quadratic_form(self, rng):
        # Oracle: norm through the inverted augmented matrix.
        s, f, k = _setup(rng, 7)
        psi = binary_feature(rng.choice([-1, 1], size=7), -1.0)
        aug = augment_kernel(k, [psi]).values.values
        y = rng.normal(size=7)
        expected = np.sqrt(y @ np.linalg.inv(aug) @ y)
        assert augmented_native_norm(k, psi, y, spectrum=s, gbf=f) == pytest.approx(
            expected, rel=1e-8
        )


class TestErrorBound:
    def test_interpolant_in_span_zero_error(self, rng):
        s, f, k = _setup(rng, 8)
        psi = binary_feature(rng.choice([-1, 1], size=8), -1.0)
        nodes = [2, 5, 7]
        aug = augment_kernel(k, [psi]).values
        y = aug.columns(nodes) @ rng.normal(size=3)
        report = error_bound(k, psi, nodes, 0.0, y, spectrum=s, gbf=f)
        assert np.max(np.abs(report.y_star - y)) <= 1e-8
        assert report.holds

    def test_random_signal_bound_holds(self, rng):
        s, f, k = _setup(rng, 10)
        psi = binary_feature(rng.choice([-1, 1], size=10), -1.0)
        report = error_bound(
            k, psi, [1, 4, 9], 0.01, rng.normal(size=10), spectrum=s, gbf=f
        )
        assert report.holds
        assert report.regularization_holds

    def test_regularization_component(self, rng):
        # The second summand alone bounds |interpolant - regularized|.
        s, f, k = _setup(rng, 9)
        psi = binary_feature(rng.choice([-1, 1], size=9), -1.0)
        y = rng.normal(size=9)
        for gamma in (1e-3, 1e-2, 0.3):
            report = error_bound(k, psi, [3, 6], gamma, y, spectrum=s, gbf=f)
            assert np.all(
                report.regularization_lhs
                <= report.regularization_rhs * (1 + 1e-6)
            )


class TestConsistency:
    def test_single_label(self, two_moon_pipeline):
        pipeline, _ = two_moon_pipeline
        psi = pipeline.spectral_prior
        data = labeled_set([17], psi.values[[16]].astype(float))
        result = consistency_check(pipeline.kernel, psi, data, pipeline.gamma)
        assert result.consistent
        assert result.guaranteed

    def test_large_gamma_many_labels(self, two_moon_pipeline, rng):
        pipeline, _ = two_moon_pipeline
        psi = pipeline.spectral_prior
        nodes = (rng.choice(600, size=16, replace=False) + 1).tolist()
        data = labeled_set(nodes, psi.values[np.asarray(nodes) - 1].astype(float))
        gamma = 2.5 * float(np.max(np.diag(pipeline.kernel.values)))
        result = consistency_check(pipeline.kernel, psi, data, gamma)
        assert result.consistent
        assert result.guaranteed

    def test_contradicting_label_rejected(self, rng):
        s, f, k = _setup(rng, 8)
        assert np.min(k.values) > 0
        psi = binary_feature(rng.choice([-1, 1], size=8), -1.0)
        labels = psi.values[[0, 3]].astype(float)
        labels[1] *= -1
        with pytest.raises(LabelsInconsistent):
            consistency_check(k, psi, labeled_set([1, 4], labels), 0.1)

    def test_nonpositive_kernel_rejected(self):
        # Diffusion on a disconnected graph has exact zero blocks.
        from gbflearn.graphs import build_graph

        g = build_graph(4, [(1, 2, 1.0), (3, 4, 1.0)], "standard")
        s = eigendecompose(g)
        k = kernel_matrix(s, diffusion_gbf(s, 1.0))
        assert np.min(k.values) <= 0
        psi = binary_feature(np.ones(4, dtype=int), -1.0)
        with pytest.raises(KernelNotPositive):
            consistency_check(k, psi, labeled_set([1], [1.0]), 0.1)


class TestLambdaMinEquality:
    def test_base_and_augmented_blocks(self, rng):
        s, f, k = _setup(rng, 11)
        psi = binary_feature(rng.choice([-1, 1], size=11), -1.0)
        aug = augment_kernel(k, [psi]).values
        for _ in range(5):
            nodes = rng.choice(11, size=4, replace=False) + 1
            a = np.linalg.eigvalsh(k.submatrix(nodes))[0]
            b = np.linalg.eigvalsh(aug.submatrix(nodes))[0]
            assert a == pytest.approx(b, abs=1e-10)


class TestDiagnosticsReport:
    def test_fields_and_files(self, tmp_path, rng):
        s, f, k = _setup(rng, 9)
        psi = binary_feature(rng.choice([-1, 1], size=9), -1.0)
        data = labeled_set([2, 6], psi.values[[1, 5]].astype(float))
        report = diagnostics_report(k, psi, data, 0.05)
        assert report.power.shape == (9,)
        assert np.min(report.power) >= 0
        assert np.max(report.power[[1, 5]]) <= 1e-7
        assert report.lambda_min > 0
        assert np.all(report.bound >= report.power - 1e-15)
        assert "prior_reproduced" in report.consistency

        jpath = tmp_path / "diag.json"
        report.write_json(jpath)
        import json

        payload = json.loads(jpath.read_text())
        assert payload["lambda_min"] == report.lambda_min
        cpath = tmp_path / "diag.csv"
        report.write_csv(cpath)
        lines = cpath.read_text().strip().splitlines()
        assert lines[0] == "index,power,bound"
        assert len(lines) == 10
