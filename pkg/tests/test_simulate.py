import math

import numpy as np
import pytest

from lgcp_duplicates.errors import (
    ConfigError,
    DataIOError,
    DomainError,
    SimulationOverflowError,
    UnsupportedGeometryError,
)
from lgcp_duplicates.geometry import (
    Window,
    find_duplicates,
    make_regular_grid,
    random_tessellation,
)
from lgcp_duplicates.models import (
    AnchorDistanceCovariate,
    ConstantMean,
    CoordinateLinearMean,
    CovariateLinearMean,
    CovarianceParams,
    SegmentDistanceCovariate,
)
from lgcp_duplicates.simulate import (
    CorruptionSpec,
    RasterField,
    corrupt,
    covariate_raster,
    exponential_covariance,
    realize_lgcp,
    resolve_mean,
    sample_poisson_raster,
    simulate_grf,
    simulate_lgcp,
    snapped_count,
    theoretical_k,
    theoretical_k_curve,
)

H_MEAN = ConstantMean(value=math.log(1000.0 / 810.0**2))


class TestRasterField:
    def test_integral_of_constant(self, unit_square):
        field = RasterField(window=unit_square, values=np.full((4, 5), 3.0))
        assert field.cell_area == pytest.approx(0.05)
        assert field.integral() == pytest.approx(3.0)

    def test_polygon_integral_uses_inside_cells(self, l_shape):
        field = RasterField(window=l_shape, values=np.ones((20, 20)))
        assert field.inside_mask().sum() == 300
        assert field.integral() == pytest.approx(3.0)

    def test_interpolation_is_exact_on_linear_fields(self, square):
        template = RasterField(window=square, values=np.zeros((8, 8)))
        X, Y = template.centers()
        field = template.with_values(2.0 * X - Y)
        pts = np.array([[300.0, 400.0], [123.4, 567.8]])
        np.testing.assert_allclose(field.interpolate(pts), 2.0 * pts[:, 0] - pts[:, 1])

    def test_non_finite_values_rejected(self, unit_square):
        with pytest.raises(ConfigError):
            RasterField(window=unit_square, values=np.array([[np.inf, 1.0]]))

    def test_csv_is_north_up(self, unit_square, tmp_path):
        """Test that the first data row of the file is the northern row."""
        field = RasterField(window=unit_square, values=np.array([[1.0, 2.0], [3.0, 4.0]]))
        path = tmp_path / "field.csv"
        field.to_csv(path)
        lines = path.read_text().splitlines()
        assert lines[2:4] == ["nx,2", "ny,2"]
        assert lines[4] == "3,4"
        again = RasterField.from_csv(path)
        np.testing.assert_array_equal(again.values, field.values)

    def test_malformed_csv(self, tmp_path):
        path = tmp_path / "bad.csv"
        path.write_text("xrange,0,1\nyrange,0,1\nnx,3\nny,1\n1,2\n")
        with pytest.raises(DataIOError):
            RasterField.from_csv(path)


class TestGaussianField:
    def test_covariance_at_zero_is_variance(self):
        cov = CovarianceParams(phi=20.0, sigma2=2.0)
        assert exponential_covariance(0.0, cov) == pytest.approx(2.0)
        assert exponential_covariance(20.0, cov) == pytest.approx(2.0 / math.e)

    def test_same_seed_same_field(self, square):
        cov = CovarianceParams(phi=20.0, sigma2=2.0)
        a = simulate_grf(square, 64, 64, cov, seed=4)
        b = simulate_grf(square, 64, 64, cov, seed=4)
        np.testing.assert_array_equal(a.values, b.values)

    def test_moments(self, square):
        """Test the mean -sigma2/2, the variance and the lag-one correlation of one large field."""
        cov = CovarianceParams(phi=15.0, sigma2=2.0)
        field = simulate_grf(square, 128, 128, cov, seed=12).values
        assert field.mean() == pytest.approx(-1.0, abs=0.3)
        assert field.var() == pytest.approx(2.0, rel=0.25)
        centred = field - field.mean()
        lag = (centred[:, :-1] * centred[:, 1:]).mean() / centred.var()
        assert lag == pytest.approx(math.exp(-(810.0 / 128) / 15.0), abs=0.1)

    def test_zero_variance_is_constant(self, square):
        field = simulate_grf(square, 8, 8, CovarianceParams(phi=10.0, sigma2=0.0), seed=1)
        assert np.all(field.values == 0.0)

    def test_explicit_mean(self, square):
        field = simulate_grf(square, 8, 8, CovarianceParams(phi=10.0, sigma2=0.0), 1, mean=2.5)
        assert np.all(field.values == 2.5)

    def test_polygon_window_rejected(self, l_shape):
        with pytest.raises(UnsupportedGeometryError):
            simulate_grf(l_shape, 8, 8, CovarianceParams(phi=1.0, sigma2=1.0), seed=0)

    def test_grid_too_small(self, square):
        with pytest.raises(ConfigError):
            simulate_grf(square, 1, 8, CovarianceParams(phi=1.0, sigma2=1.0), seed=0)


class TestMeanModels:
    def test_coordinate_linear(self, square):
        mean = CoordinateLinearMean(intercept=-7.0753, coef_x=-0.0018, coef_y=0.0026)
        raster = resolve_mean(mean, square, 4, 4)
        X, Y = raster.centers()
        np.testing.assert_allclose(raster.values, -7.0753 - 0.0018 * X + 0.0026 * Y)

    def test_expected_count_calibration(self, square):
        mean = CovariateLinearMean(
            intercept=0.0,
            coefficients=[-0.392, -1.075],
            covariates=[
                AnchorDistanceCovariate(n_anchors=10, seed=7),
                SegmentDistanceCovariate(start=(100.0, 150.0), end=(700.0, 650.0)),
            ],
            expected_count=1000.0,
        )
        raster = resolve_mean(mean, square, 64, 64)
        assert raster.with_values(np.exp(raster.values)).integral() == pytest.approx(1000.0)

    def test_segment_covariate_is_log_distance(self, square):
        covariate = SegmentDistanceCovariate(start=(0.0, 405.0), end=(810.0, 405.0))
        raster = covariate_raster(covariate, square, 2, 2)
        np.testing.assert_allclose(raster.values, math.log1p(202.5))

    def test_raster_file_grid_mismatch(self, square, tmp_path):
        path = tmp_path / "cov.csv"
        RasterField(window=square, values=np.zeros((3, 3))).to_csv(path)
        mean = CovariateLinearMean(
            intercept=0.0,
            coefficients=[1.0],
            covariates=[{"kind": "raster_file", "path": str(path)}],
        )
        with pytest.raises(ConfigError):
            resolve_mean(mean, square, 4, 4)

    def test_coefficient_count_must_match(self):
        with pytest.raises(ValueError):
            CovariateLinearMean(intercept=0.0, coefficients=[1.0, 2.0], covariates=[])


class TestLGCPSimulation:
    def test_reproducible(self, square):
        cov = CovarianceParams(phi=20.0, sigma2=2.0)
        a = simulate_lgcp(H_MEAN, cov, square, 64, 64, seed=99)
        b = simulate_lgcp(H_MEAN, cov, square, 64, 64, seed=99)
        np.testing.assert_array_equal(a.points, b.points)

    def test_poisson_limit_count(self, square):
        """Test that sigma2 = 0 gives a Poisson count around the expected 1000."""
        realization = realize_lgcp(
            H_MEAN, CovarianceParams(phi=20.0, sigma2=0.0), square, 32, 32, seed=3
        )
        assert realization.intensity.integral() == pytest.approx(1000.0)
        assert abs(realization.pattern.n - 1000) < 5 * math.sqrt(1000)

    def test_intensity_is_exp_of_mean_plus_field(self, square):
        realization = realize_lgcp(
            H_MEAN, CovarianceParams(phi=20.0, sigma2=2.0), square, 32, 32, seed=8
        )
        np.testing.assert_allclose(
            realization.intensity.values,
            np.exp(realization.mean.values + realization.field.values),
        )

    def test_overflow(self, square):
        with pytest.raises(SimulationOverflowError):
            realize_lgcp(
                ConstantMean(value=800.0), CovarianceParams(phi=20.0, sigma2=1.0), square, 8, 8, 0
            )

    def test_zero_intensity_raster_gives_empty_pattern(self, square):
        pattern = sample_poisson_raster(RasterField(window=square, values=np.zeros((4, 4))), 0)
        assert pattern.n == 0

    def test_points_stay_in_polygon(self, l_shape):
        pattern = sample_poisson_raster(
            RasterField(window=l_shape, values=np.full((10, 10), 200.0)), 5
        )
        assert pattern.n > 0
        assert l_shape.contains(pattern.points, tol=0.0).all()


class TestTheoreticalK:
    @pytest.mark.parametrize("r", [1.0, 5.0, 20.0, 100.0])
    def test_poisson_degeneracy(self, r):
        cov = CovarianceParams(phi=15.0, sigma2=0.0)
        assert theoretical_k(r, cov) == pytest.approx(math.pi * r * r, rel=1e-6)
        assert theoretical_k_curve(np.array([r]), cov)[0] == pytest.approx(math.pi * r * r)

    def test_origin_and_negative(self):
        cov = CovarianceParams(phi=15.0, sigma2=2.0)
        assert theoretical_k(0.0, cov) == 0.0
        with pytest.raises(DomainError):
            theoretical_k(-1.0, cov)

    @pytest.mark.parametrize("phi", [15.0, 20.0, 30.0])
    @pytest.mark.parametrize("sigma2", [1.0, 2.0, 4.0])
    def test_series_matches_quadrature(self, phi, sigma2):
        cov = CovarianceParams(phi=phi, sigma2=sigma2)
        r = np.array([0.5, 3.0, 17.0, 45.0, 120.0, 202.5])
        expected = np.array([theoretical_k(v, cov) for v in r])
        np.testing.assert_allclose(theoretical_k_curve(r, cov), expected, rtol=1e-8)

    def test_exceeds_poisson_for_positive_variance(self):
        cov = CovarianceParams(phi=20.0, sigma2=2.0)
        r = np.linspace(1.0, 200.0, 20)
        assert np.all(theoretical_k_curve(r, cov) > math.pi * r**2)


class TestCorruption:
    def test_snapped_count_floors_robustly(self):
        assert snapped_count(0.6, 1000) == 600
        assert snapped_count(0.2, 7) == 1
        assert snapped_count(1.0, 7) == 7
        assert snapped_count(0.0, 7) == 0

    def test_zero_fraction_is_identity(self, square, csr_pattern):
        grid = make_regular_grid(square, 18, 18)
        out = corrupt(csr_pattern, CorruptionSpec(partition=grid, fraction=0.0, seed=1))
        np.testing.assert_array_equal(out.points, csr_pattern.points)

    def test_snaps_exactly_floor_fraction_n(self, square, csr_pattern):
        grid = make_regular_grid(square, 18, 18)
        out = corrupt(csr_pattern, CorruptionSpec(partition=grid, fraction=0.4, seed=1))
        moved = np.any(out.points != csr_pattern.points, axis=1)
        assert out.n == csr_pattern.n
        assert moved.sum() == 120
        centres = {tuple(p) for p in grid.snap_points.tolist()}
        assert all(tuple(p) in centres for p in out.points[moved].tolist())

    def test_full_corruption_leaves_only_cell_centres(self, square, csr_pattern):
        grid = make_regular_grid(square, 6, 6)
        out = corrupt(csr_pattern, CorruptionSpec(partition=grid, fraction=1.0, seed=2))
        assert find_duplicates(out).n_distinct <= 36

    def test_tessellation_snap_points_inside_cells(self, square, csr_pattern):
        tess = random_tessellation(square, 40, seed=3)
        out = corrupt(csr_pattern, CorruptionSpec(partition=tess, fraction=1.0, seed=2))
        assert square.contains(out.points).all()

    def test_deterministic(self, square, csr_pattern):
        grid = make_regular_grid(square, 18, 18)
        request = CorruptionSpec(partition=grid, fraction=0.6, seed=10)
        np.testing.assert_array_equal(
            corrupt(csr_pattern, request).points, corrupt(csr_pattern, request).points
        )

    def test_window_mismatch(self, csr_pattern):
        grid = make_regular_grid(Window.rectangle(0, 100, 0, 100), 2, 2)
        with pytest.raises(ConfigError):
            corrupt(csr_pattern, CorruptionSpec(partition=grid, fraction=0.5, seed=0))

    def test_fraction_out_of_range(self, square):
        grid = make_regular_grid(square, 2, 2)
        with pytest.raises(ValueError):
            CorruptionSpec(partition=grid, fraction=1.5, seed=0)

