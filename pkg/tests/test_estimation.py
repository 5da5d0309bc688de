import math

import numpy as np
import pytest

from lgcp_duplicates.config import get_scenario_presets
from lgcp_duplicates.errors import (
    ConfigError,
    NonConvergenceError,
    UnsupportedRuleError,
)
from lgcp_duplicates.estimation import (
    ContrastObjective,
    MethodContext,
    MethodFactory,
    contrast,
    dedup,
    delta_rule,
    fit,
    jitter,
    redistribute,
    rmax_rule,
    start_points,
)
from lgcp_duplicates.estimation.methods.contrast_methods import MinimumContrast
from lgcp_duplicates.estimation.methods.remedy_methods import DeletionMethod
from lgcp_duplicates.geometry import (
    PointPattern,
    Window,
    find_duplicates,
    locate_many,
    make_regular_grid,
)
from lgcp_duplicates.kfunction import default_r_grid, k_hom, theoretical_estimate
from lgcp_duplicates.models import (
    ContrastConfig,
    CovarianceParams,
    MethodLabel,
    OptimizerSpec,
    ParameterBounds,
)
from lgcp_duplicates.simulate import realize_lgcp

R_MAX = 202.5


def h2_khat(seed, n_r=257):
    """K estimate of one simulated H.2 pattern."""
    h2 = get_scenario_presets()["H.2"]
    window = Window.rectangle(*h2.window)
    pattern = realize_lgcp(h2.mean, h2.covariance, window, 128, 128, seed=seed).pattern
    return k_hom(pattern, default_r_grid(R_MAX, n_r))


@pytest.fixture
def theoretical():
    def build(phi, sigma2, n=201):
        cov = CovarianceParams(phi=phi, sigma2=sigma2)
        return theoretical_estimate(default_r_grid(R_MAX, n), cov)

    return build


# --- Rules of thumb ---


class TestRules:
    @pytest.mark.parametrize("side, expected", [(30.0, 11), (45.0, 17), (54.0, 20)])
    def test_delta_rule_for_grid_cells(self, side, expected):
        assert round(delta_rule(side**2)) == expected

    def test_rmax_quarter_of_shorter_side(self, square):
        assert rmax_rule(square) == pytest.approx(R_MAX)

    def test_rmax_undefined_for_polygons(self, l_shape):
        with pytest.raises(UnsupportedRuleError):
            rmax_rule(l_shape)

    def test_start_points_inside_box(self):
        bounds = ParameterBounds()
        starts = start_points(bounds, 5)
        assert starts.shape == (5, 2)
        assert math.exp(starts[0, 0]) == pytest.approx(math.sqrt(0.1 * 50.0))
        assert np.all(np.exp(starts[:, 0]) >= 0.1) and np.all(np.exp(starts[:, 0]) <= 50.0)
        assert np.all(np.exp(starts[:, 1]) >= 0.01) and np.all(np.exp(starts[:, 1]) <= 20.0)
        np.testing.assert_array_equal(starts, start_points(bounds, 5))


# --- Contrast ---


class TestContrast:
    def test_zero_at_generating_parameters(self, theoretical):
        khat = theoretical(20.0, 2.0)
        assert contrast(khat, 20.0, 2.0, ContrastConfig(r_max=R_MAX)) == 0.0

    def test_positive_away_from_truth(self, theoretical):
        khat = theoretical(20.0, 2.0)
        config = ContrastConfig(r_max=R_MAX)
        assert contrast(khat, 25.0, 2.0, config) > 0.0
        assert contrast(khat, 20.0, 3.0, config) > contrast(khat, 20.0, 2.5, config)

    def test_limits_snap_to_grid_nodes(self, theoretical):
        objective = ContrastObjective.build(
            theoretical(20.0, 2.0, n=82), ContrastConfig(delta=17.0, r_max=R_MAX)
        )
        assert objective.delta == pytest.approx(17.5)
        assert objective.r_max == pytest.approx(R_MAX)

    def test_empty_range_vanishes(self, theoretical):
        khat = theoretical(20.0, 2.0, n=21)
        config = ContrastConfig(delta=11.0, r_max=14.0)
        assert ContrastObjective.build(khat, config).vanishing
        assert contrast(khat, 5.0, 9.0, config) == 0.0

    def test_r_max_beyond_grid(self, theoretical):
        with pytest.raises(ConfigError):
            ContrastObjective.build(theoretical(20.0, 2.0), ContrastConfig(r_max=400.0))

    def test_delta_must_stay_below_r_max(self):
        with pytest.raises(ValueError):
            ContrastConfig(delta=50.0, r_max=50.0)

    @pytest.mark.parametrize("phi, sigma2", [(5.0, 2.0), (20.0, 2.0), (20.0, 8.0)])
    def test_shrinking_range_never_increases(self, csr_pattern, phi, sigma2):
        khat = k_hom(csr_pattern, default_r_grid(R_MAX, 129))
        values = [
            contrast(khat, phi, sigma2, ContrastConfig(delta=delta, r_max=R_MAX))
            for delta in np.linspace(0.0, 200.0, 41)
        ]
        assert np.all(np.diff(values) <= 0.0)

    @pytest.mark.parametrize("seed", [1, 2, 3])
    def test_generating_parameters_win_on_h2_replication(self, seed):
        """Test that on one simulated H.2 pattern U(20, 2) beats U(5, 2) and U(20, 8)."""
        khat = h2_khat(seed)
        config = ContrastConfig(r_max=R_MAX)
        at_truth = contrast(khat, 20.0, 2.0, config)
        assert at_truth < contrast(khat, 5.0, 2.0, config)
        assert at_truth < contrast(khat, 20.0, 8.0, config)


# --- Fitting ---


class TestFit:
    @pytest.mark.parametrize("phi", [15.0, 20.0, 30.0])
    @pytest.mark.parametrize("sigma2", [1.0, 2.0, 4.0])
    def test_noiseless_inversion(self, theoretical, phi, sigma2):
        """Test that fitting the exact LGCP K recovers its parameters."""
        result = fit(theoretical(phi, sigma2), ContrastConfig(r_max=R_MAX))
        assert result.converged
        assert result.method_label == MethodLabel.MC
        assert result.phi_hat == pytest.approx(phi, rel=1e-3)
        assert result.sigma2_hat == pytest.approx(sigma2, rel=1e-3)

    def test_modified_contrast_label_and_range(self, theoretical):
        result = fit(theoretical(20.0, 2.0), ContrastConfig(delta=17.0, r_max=R_MAX))
        assert result.method_label == MethodLabel.MMC
        assert result.delta == pytest.approx(17.0, abs=0.6)
        assert result.phi_hat == pytest.approx(20.0, rel=1e-3)

    def test_estimates_stay_in_bounds(self, theoretical):
        bounds = ParameterBounds(phi=(0.5, 10.0), sigma2=(0.1, 5.0))
        result = fit(theoretical(30.0, 2.0), ContrastConfig(r_max=R_MAX), bounds=bounds)
        assert 0.5 <= result.phi_hat <= 10.0
        assert 0.1 <= result.sigma2_hat <= 5.0

    def test_non_convergence_carries_diagnostics(self, theoretical):
        optimizer = OptimizerSpec(n_starts=2, max_iter=1)
        with pytest.raises(NonConvergenceError) as excinfo:
            fit(theoretical(20.0, 2.0), ContrastConfig(r_max=R_MAX), optimizer=optimizer)
        diagnostics = excinfo.value.diagnostics
        assert diagnostics["converged"] is False
        assert diagnostics["restarts"] == 2
        assert diagnostics["phi_hat"] > 0


# --- Remedies ---


class TestDedup:
    def test_keeps_first_of_each_group(self, square):
        pattern = PointPattern.from_iterable(
            [(1.0, 1.0), (1.0, 1.0), (2.0, 2.0), (1.0, 1.0)], square
        )
        assert dedup(pattern).points.tolist() == [[1.0, 1.0], [2.0, 2.0]]

    def test_no_duplicates_is_identity(self, csr_pattern):
        assert dedup(csr_pattern) is csr_pattern


class TestJitter:
    def _pattern(self, square):
        return PointPattern.from_iterable([(100.0, 100.0)] * 3 + [(300.0, 300.0)], square)

    def test_moves_only_duplicates(self, square):
        out = jitter(self._pattern(square), 10.0, seed=1)
        assert out.n == 4
        assert out.points[3].tolist() == [300.0, 300.0]
        offsets = out.points[:3] - 100.0
        assert np.all(np.abs(offsets) <= 10.0)
        assert not find_duplicates(out, tol=0.0).has_duplicates

    def test_reproducible(self, square):
        a = jitter(self._pattern(square), 10.0, seed=7)
        b = jitter(self._pattern(square), 10.0, seed=7)
        np.testing.assert_array_equal(a.points, b.points)

    def test_points_leaving_window_are_dropped(self, square):
        pattern = PointPattern.from_iterable([(0.0, 0.0)] * 50 + [(400.0, 400.0)], square)
        out = jitter(pattern, 1.0, seed=3)
        assert out.n < 51
        assert [400.0, 400.0] in out.points.tolist()
        assert square.contains(out.points).all()

    def test_radius_must_be_positive(self, square):
        with pytest.raises(ConfigError):
            jitter(self._pattern(square), 0.0, seed=1)


class TestRedistribute:
    def test_draws_stay_in_the_cell(self, square):
        partition = make_regular_grid(square, 18, 18)
        pattern = PointPattern.from_iterable([(100.0, 100.0)] * 3 + [(500.0, 500.0)], square)
        out = redistribute(pattern, partition, seed=4)
        assert out.n == 4
        assert out.points[3].tolist() == [500.0, 500.0]
        assert locate_many(partition, out.points[:3]).tolist() == [38, 38, 38]
        assert not find_duplicates(out, tol=0.0).has_duplicates

    def test_no_duplicates_is_identity(self, square, csr_pattern):
        partition = make_regular_grid(square, 4, 4)
        assert redistribute(csr_pattern, partition, seed=0) is csr_pattern


# --- Methods ---


class TestMethodFactory:
    def test_labels_resolve_to_cached_instances(self):
        method = MethodFactory.get_method("MC-II")
        assert method.label == MethodLabel.MC_II
        assert MethodFactory.get_method(MethodLabel.MC_II) is method

    def test_unknown_label(self):
        with pytest.raises(ConfigError):
            MethodFactory.get_method("MC-IV")

    def test_preprocessing_keys(self):
        methods = MethodFactory.get_methods(["MC", "MC-I", "MC-II", "MC-III", "MMC"])
        keys = [m.preprocessing_key for m in methods]
        assert keys == ["raw", "dedup", "jitter", "redistribute", "raw"]

    def test_contrast_ranges(self, square):
        context = MethodContext(partition=make_regular_grid(square, 2, 2), r_max=R_MAX, seed=1)
        mc = MethodFactory.get_method("MC").contrast_config(context)
        mmc = MethodFactory.get_method("MMC").contrast_config(context)
        assert mc.delta == 0.0
        assert mmc.delta == context.delta == 17.0

    @pytest.mark.parametrize("source", ["theoretical", "simulated"])
    def test_mc_and_mmc_coincide_at_zero_delta(self, square, theoretical, source):
        khat = theoretical(20.0, 2.0) if source == "theoretical" else h2_khat(seed=1)
        context = MethodContext(
            partition=make_regular_grid(square, 2, 2), r_max=R_MAX, seed=1, delta=0.0
        )
        mc = MethodFactory.get_method("MC").estimate(khat, context)
        mmc = MethodFactory.get_method("MMC").estimate(khat, context)
        assert mmc.method_label == MethodLabel.MMC
        assert (mmc.phi_hat, mmc.sigma2_hat, mmc.contrast_value) == (
            mc.phi_hat,
            mc.sigma2_hat,
            mc.contrast_value,
        )

    def test_random_remedies_use_context_seed(self, square):
        context = MethodContext(partition=make_regular_grid(square, 18, 18), r_max=R_MAX, seed=9)
        pattern = PointPattern.from_iterable([(100.0, 100.0)] * 4, square)
        for label in ("MC-II", "MC-III"):
            method = MethodFactory.get_method(label)
            a = method.preprocess(pattern, context)
            b = method.preprocess(pattern, context)
            np.testing.assert_array_equal(a.points, b.points)

    def test_method_info(self):
        info = MethodFactory.get_method("MC-III").get_method_info()
        assert info == {"label": "MC-III", "preprocessing": "redistribute"}

    def test_register_replaces_cached_instance(self):
        original = MethodFactory.get_method("MC-I")
        try:
            MethodFactory.register_method(MethodLabel.MC_I, MinimumContrast)
            replaced = MethodFactory.get_method("MC-I")
            assert isinstance(replaced, MinimumContrast)
            assert replaced is not original
        finally:
            MethodFactory.register_method(MethodLabel.MC_I, DeletionMethod)
