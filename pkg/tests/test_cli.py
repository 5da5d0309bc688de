import json

import pandas as pd
import pytest

from lgcp_duplicates.config import get_scenario_presets
from lgcp_duplicates.geometry import Window, find_duplicates, read_pattern_csv
from lgcp_duplicates.harness.cli import _study_scenario, build_parser, main
from lgcp_duplicates.kfunction import KEstimate, default_r_grid, theoretical_estimate
from lgcp_duplicates.models import CovarianceParams

SQUARE = Window.rectangle(0.0, 810.0, 0.0, 810.0)


@pytest.fixture
def simulated(tmp_path):
    path = tmp_path / "pattern.csv"
    argv = ["simulate", "--scenario", "H.2", "--seed", "3", "--sim-grid", "32", "32"]
    code = main([*argv, "--out", str(path)])
    assert code == 0
    return path


class TestParser:
    def test_subcommands(self):
        parser = build_parser()
        args = parser.parse_args(["study", "--reps", "3", "--workers", "2"])
        assert args.command == "study"
        assert args.scenario == "H.2"
        assert args.reps == 3

    def test_partition_options_are_exclusive(self):
        with pytest.raises(SystemExit):
            build_parser().parse_args(["delta-rule", "--grid", "2", "2", "--tessellation", "5"])


class TestDeltaRule:
    def test_cell_area(self, capsys):
        assert main(["delta-rule", "--cell-area", "2025"]) == 0
        assert round(float(capsys.readouterr().out)) == 17

    def test_default_grid_partition(self, capsys):
        assert main(["delta-rule"]) == 0
        assert float(capsys.readouterr().out) == pytest.approx(16.925, abs=1e-3)

    def test_non_positive_area_is_config_error(self):
        assert main(["delta-rule", "--cell-area", "0"]) == 2


class TestPipeline:
    def test_simulate_writes_pattern(self, simulated):
        pattern = read_pattern_csv(simulated, SQUARE)
        assert pattern.n > 100

    def test_corrupt_then_dedup(self, simulated, tmp_path):
        corrupted = tmp_path / "corrupted.csv"
        deduped = tmp_path / "dedup.csv"
        argv = ["corrupt", "--input", str(simulated), "--fraction", "0.5", "--seed", "1"]
        assert main([*argv, "--out", str(corrupted)]) == 0
        observed = read_pattern_csv(corrupted, SQUARE)
        assert observed.n == read_pattern_csv(simulated, SQUARE).n
        assert find_duplicates(observed).has_duplicates

        assert main(["dedup", "--input", str(corrupted), "--out", str(deduped)]) == 0
        assert not find_duplicates(read_pattern_csv(deduped, SQUARE)).has_duplicates

    def test_redistribute_keeps_count(self, simulated, tmp_path):
        corrupted = tmp_path / "corrupted.csv"
        moved = tmp_path / "moved.csv"
        main(["corrupt", "--input", str(simulated), "--fraction", "0.3", "--out", str(corrupted)])
        assert main(
            ["redistribute", "--input", str(corrupted), "--seed", "2", "--out", str(moved)]
        ) == 0
        assert read_pattern_csv(moved, SQUARE).n == read_pattern_csv(corrupted, SQUARE).n

    def test_kest_then_fit(self, simulated, tmp_path, capsys):
        kest = tmp_path / "k.csv"
        assert main(
            ["kest", "--input", str(simulated), "--r-points", "65", "--out", str(kest)]
        ) == 0
        estimate = KEstimate.from_csv(kest)
        assert estimate.r_max == pytest.approx(202.5)
        capsys.readouterr()
        assert main(["fit", "--kest", str(kest), "--delta", "17"]) == 0
        result = json.loads(capsys.readouterr().out)
        assert result["method_label"] == "MMC"
        assert result["phi_hat"] > 0

    def test_fit_recovers_theoretical_curve(self, tmp_path, capsys):
        path = tmp_path / "truth.csv"
        theoretical_estimate(
            default_r_grid(202.5, 201), CovarianceParams(phi=20.0, sigma2=2.0)
        ).to_csv(path)
        assert main(["fit", "--kest", str(path)]) == 0
        result = json.loads(capsys.readouterr().out)
        assert result["phi_hat"] == pytest.approx(20.0, rel=1e-3)
        assert result["sigma2_hat"] == pytest.approx(2.0, rel=1e-3)


class TestExitCodes:
    def test_missing_input_is_io_error(self, tmp_path):
        assert main(["kest", "--input", str(tmp_path / "missing.csv")]) == 4

    def test_bad_fraction_is_config_error(self, simulated, tmp_path):
        out = tmp_path / "x.csv"
        assert main(
            ["corrupt", "--input", str(simulated), "--fraction", "1.5", "--out", str(out)]
        ) == 2

    def test_delta_beyond_r_max_is_config_error(self, tmp_path):
        path = tmp_path / "truth.csv"
        theoretical_estimate(
            default_r_grid(100.0, 11), CovarianceParams(phi=20.0, sigma2=2.0)
        ).to_csv(path)
        assert main(["fit", "--kest", str(path), "--delta", "150"]) == 2

    def test_bad_scenario_file(self, tmp_path):
        path = tmp_path / "bad.toml"
        path.write_text("replications = -1\n")
        assert main(["study", "--config", str(path), "--out", str(tmp_path / "o")]) == 2


class TestPlotCommand:
    def test_empty_method_list_writes_nothing(self, tmp_path, capsys):
        assert main(["plot", "--out", str(tmp_path), "--methods"]) == 0
        assert capsys.readouterr().out == ""
        assert list(tmp_path.iterdir()) == []


@pytest.fixture
def small_config(tmp_path):
    path = tmp_path / "small.toml"
    path.write_text(
        'preset = "H.2"\n'
        "sim_grid = [32, 32]\n"
        "r_points = 65\n"
        "[corruption]\n"
        "fractions = [0.0, 0.4]\n"
    )
    return path


class TestStudyOverrides:
    def test_flags_replace_scenario_fields(self):
        argv = "study --window 0 400 0 400 --grid 9 9 --rmax 100 --delta rule --seed 4"
        args = build_parser().parse_args(argv.split())
        config = _study_scenario(args)
        assert config.window == (0.0, 400.0, 0.0, 400.0)
        assert config.corruption.partition == "grid"
        assert config.corruption.grid == (9, 9)
        assert config.r_max == 100.0
        assert config.delta is None
        assert config.base_seed == 4

    def test_numeric_delta(self):
        config = _study_scenario(build_parser().parse_args(["study", "--delta", "12.5"]))
        assert config.delta == 12.5

    def test_without_flags_keeps_preset(self):
        config = _study_scenario(build_parser().parse_args(["study", "--scenario", "H.3"]))
        assert config == get_scenario_presets()["H.3"]

    def test_invalid_override_is_config_error(self, tmp_path):
        argv = ["study", "--rmax", "-5", "--out", str(tmp_path / "o")]
        assert main(argv) == 2

    def test_sweep_accepts_grid(self):
        args = build_parser().parse_args(["delta-sweep", "--grid", "6", "6"])
        assert _study_scenario(args).corruption.grid == (6, 6)


class TestFitBounds:
    def test_estimate_stays_in_phi_box(self, tmp_path, capsys):
        path = tmp_path / "truth.csv"
        theoretical_estimate(
            default_r_grid(202.5, 201), CovarianceParams(phi=20.0, sigma2=2.0)
        ).to_csv(path)
        assert main(["fit", "--kest", str(path), "--phi-bounds", "1", "10"]) == 0
        result = json.loads(capsys.readouterr().out)
        assert 1.0 <= result["phi_hat"] <= 10.0

    def test_inverted_bounds_are_config_error(self, tmp_path):
        path = tmp_path / "truth.csv"
        theoretical_estimate(
            default_r_grid(100.0, 11), CovarianceParams(phi=20.0, sigma2=2.0)
        ).to_csv(path)
        assert main(["fit", "--kest", str(path), "--sigma2-bounds", "5", "1"]) == 2


class TestPlotOverlay:
    def test_creates_missing_output_directory(self, small_config, tmp_path):
        out = tmp_path / "new" / "figures"
        argv = ["plot", "--config", str(small_config), "--out", str(out), "--overlay"]
        assert main([*argv, "--methods"]) == 0
        frame = pd.read_csv(out / "k_curves.csv")
        assert list(frame.columns) == ["r", "truth", "corrupted", "MC-I", "MC-II", "MC-III"]

    def test_unwritable_output_is_io_error(self, small_config, tmp_path):
        blocker = tmp_path / "blocker"
        blocker.write_text("")
        argv = ["plot", "--config", str(small_config), "--out", str(blocker / "sub"), "--overlay"]
        assert main([*argv, "--methods"]) == 4
