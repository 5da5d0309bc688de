"""
Command-line interface.

Subcommands cover each step of the pipeline on files (simulate, corrupt, the three
remedies, intensity, kest, fit, delta-rule) and the study runs built on them
(study, delta-sweep, plot).

Exit codes: 0 success, 2 configuration error, 3 numerical failure, 4 I/O error.
"""

import argparse
import logging
import sys
from pathlib import Path
from typing import Any, Dict, List, Optional

import numpy as np
import pandas as pd
from pydantic import ValidationError

from lgcp_duplicates.config import get_scenario_presets, get_settings, load_scenario
from lgcp_duplicates.errors import ConfigError, DataIOError, ToolkitError
from lgcp_duplicates.estimation import delta_rule, dedup, fit, jitter, redistribute, rmax_rule
from lgcp_duplicates.geometry import (
    Partition,
    PointPattern,
    Window,
    find_duplicates,
    load_partition,
    make_regular_grid,
    random_tessellation,
    read_pattern_csv,
    save_partition,
    write_pattern_csv,
)
from lgcp_duplicates.intensity import (
    constant_intensity,
    kernel_intensity_adaptive,
    kernel_intensity_fixed,
    select_bandwidth_cvl,
)
from lgcp_duplicates.kfunction import KEstimate, default_r_grid, k_hom, k_inhom
from lgcp_duplicates.models import ALL_METHODS, ContrastConfig, ParameterBounds, ScenarioConfig
from lgcp_duplicates.simulate import CorruptionSpec, corrupt, realize_lgcp

from . import io
from .orchestrator import SWEEP_FILE, StudyOrchestrator, k_curve_overlay, k_curves_frame
from .plots import emit_plots
from .summary import summary_frame

logger = logging.getLogger(__name__)

LOG_FORMAT = "%(asctime)s - %(name)s - %(levelname)s - %(message)s"

# bandwidths tried by --red-search when none are given
RED_CANDIDATES = [float(h) for h in range(150, 451, 25)]


# --- Shared argument groups ---


def _add_window(parser: argparse.ArgumentParser) -> None:
    parser.add_argument(
        "--window",
        type=float,
        nargs=4,
        metavar=("X0", "X1", "Y0", "Y1"),
        help="Rectangular window (default from settings)",
    )
    parser.add_argument("--polygon", type=Path, help="CSV of polygon vertices (x,y header)")


def _add_partition(parser: argparse.ArgumentParser) -> None:
    group = parser.add_mutually_exclusive_group()
    group.add_argument(
        "--grid",
        type=int,
        nargs=2,
        metavar=("NX", "NY"),
        default=(18, 18),
        help="Regular grid partition (default 18 x 18)",
    )
    group.add_argument(
        "--tessellation", type=int, metavar="N", help="Dirichlet tessellation with N random seeds"
    )
    group.add_argument("--partition", type=Path, help="Partition JSON file")
    parser.add_argument("--partition-seed", type=int, default=0)
    parser.add_argument("--save-partition", type=Path, help="Write the partition as JSON")


def _add_scenario(parser: argparse.ArgumentParser) -> None:
    group = parser.add_mutually_exclusive_group()
    group.add_argument("--scenario", choices=sorted(get_scenario_presets()), default="H.2")
    group.add_argument("--config", type=Path, help="Scenario TOML file")


def _add_study_overrides(parser: argparse.ArgumentParser, delta: bool = True) -> None:
    parser.add_argument(
        "--window",
        type=float,
        nargs=4,
        metavar=("X0", "X1", "Y0", "Y1"),
        help="Replace the scenario window",
    )
    parser.add_argument(
        "--grid", type=int, nargs=2, metavar=("NX", "NY"), help="Snap onto a regular grid"
    )
    parser.add_argument("--rmax", type=float, help="Upper contrast limit")
    if delta:
        parser.add_argument("--delta", help="MMC lower bound, or 'rule' for the rule of thirds")


def _window(args: argparse.Namespace) -> Window:
    if getattr(args, "polygon", None):
        try:
            vertices = np.loadtxt(args.polygon, delimiter=",", skiprows=1, ndmin=2)
        except (OSError, ValueError) as e:
            raise DataIOError(f"Cannot read polygon {args.polygon}: {e}")
        return Window.from_vertices(vertices.tolist())
    bounds = args.window if getattr(args, "window", None) else get_settings().window
    return Window.rectangle(*bounds)


def _partition(args: argparse.Namespace, window: Window) -> Partition:
    if args.partition:
        partition = load_partition(args.partition, window)
    elif args.tessellation:
        partition = random_tessellation(window, args.tessellation, args.partition_seed)
    else:
        partition = make_regular_grid(window, *args.grid)
    if args.save_partition:
        save_partition(partition, args.save_partition)
    return partition


def _scenario(args: argparse.Namespace) -> ScenarioConfig:
    if args.config:
        return load_scenario(args.config)
    return get_scenario_presets()[args.scenario]


def _study_scenario(args: argparse.Namespace) -> ScenarioConfig:
    """Scenario with the command-line overrides applied and validated."""
    config = _scenario(args)
    overrides: Dict[str, Any] = {}
    if args.seed is not None:
        overrides["base_seed"] = args.seed
    if args.window:
        overrides["window"] = list(args.window)
    if args.grid:
        corruption = config.corruption.model_dump(mode="json")
        overrides["corruption"] = {**corruption, "partition": "grid", "grid": list(args.grid)}
    if args.rmax is not None:
        overrides["r_max"] = args.rmax
    if getattr(args, "delta", None) is not None:
        overrides["delta"] = args.delta
    if not overrides:
        return config
    try:
        return ScenarioConfig.model_validate({**config.model_dump(mode="json"), **overrides})
    except ValidationError as e:
        raise ConfigError(f"Invalid scenario override: {e}")


def _pattern(args: argparse.Namespace) -> PointPattern:
    return read_pattern_csv(args.input, _window(args))


def _tol(window: Window) -> float:
    return window.default_tolerance(get_settings().duplicate_rel_tol)


def _seed(args: argparse.Namespace) -> int:
    return args.seed if args.seed is not None else get_settings().default_seed


# --- Subcommands ---


def cmd_simulate(args: argparse.Namespace) -> int:
    config = _scenario(args)
    window = Window.rectangle(*config.window)
    grid = tuple(args.sim_grid) if args.sim_grid else config.sim_grid
    realization = realize_lgcp(config.mean, config.covariance, window, *grid, seed=_seed(args))
    write_pattern_csv(realization.pattern, args.out)
    if args.intensity_out:
        realization.intensity.to_csv(args.intensity_out)
    print(f"{realization.pattern.n} points written to {args.out}")
    return 0


def cmd_corrupt(args: argparse.Namespace) -> int:
    pattern = _pattern(args)
    partition = _partition(args, pattern.window)
    observed = corrupt(
        pattern, CorruptionSpec(partition=partition, fraction=args.fraction, seed=_seed(args))
    )
    write_pattern_csv(observed, args.out)
    groups = find_duplicates(observed, _tol(observed.window))
    print(f"{observed.n} points, {groups.n_distinct} distinct locations, written to {args.out}")
    return 0


def cmd_remedy(args: argparse.Namespace) -> int:
    pattern = _pattern(args)
    tol = _tol(pattern.window)
    if args.command == "dedup":
        result = dedup(pattern, tol)
    elif args.command == "jitter":
        result = jitter(pattern, args.d, _seed(args), tol)
    else:
        result = redistribute(pattern, _partition(args, pattern.window), _seed(args), tol)
    write_pattern_csv(result, args.out)
    print(f"{args.command}: {pattern.n} -> {result.n} points, written to {args.out}")
    return 0


def cmd_intensity(args: argparse.Namespace) -> int:
    pattern = _pattern(args)
    grid = tuple(args.grid) if args.grid else get_settings().intensity_grid
    if args.kind == "constant":
        print(f"{constant_intensity(pattern):.17g}")
        return 0
    h = args.h
    if args.select == "cvl" or h is None:
        h = select_bandwidth_cvl(pattern, None, grid, kind=args.kind, pilot_h=args.pilot_h)
    if args.kind == "fixed":
        field_ = kernel_intensity_fixed(pattern, h, grid, as_intensity=args.as_intensity)
    else:
        field_ = kernel_intensity_adaptive(
            pattern, h, args.pilot_h, grid, as_intensity=args.as_intensity
        )
    field_.to_csv(args.out)
    print(f"{args.kind} estimate with bandwidth {h:.6g} written to {args.out}")
    return 0


def cmd_kest(args: argparse.Namespace) -> int:
    pattern = _pattern(args)
    r_max = args.rmax if args.rmax is not None else rmax_rule(pattern.window)
    r_grid = default_r_grid(r_max, args.r_points or get_settings().r_points)
    grid = tuple(args.grid) if args.grid else get_settings().intensity_grid
    if args.intensity == "constant":
        estimate = k_hom(pattern, r_grid)
    else:
        h = args.h
        if h is None:
            h = select_bandwidth_cvl(pattern, None, grid, kind=args.intensity)
        if args.intensity == "fixed":
            field_ = kernel_intensity_fixed(pattern, h, grid, as_intensity=True)
        else:
            field_ = kernel_intensity_adaptive(pattern, h, None, grid, as_intensity=True)
        estimate = k_inhom(pattern, field_, r_grid)
    estimate.to_csv(args.out)
    print(f"K estimate on [0, {r_max:g}] written to {args.out}")
    return 0


def cmd_fit(args: argparse.Namespace) -> int:
    khat = KEstimate.from_csv(args.kest)
    r_max = args.rmax if args.rmax is not None else khat.r_max
    bounds = ParameterBounds(
        phi=args.phi_bounds or ParameterBounds().phi,
        sigma2=args.sigma2_bounds or ParameterBounds().sigma2,
    )
    result = fit(khat, ContrastConfig(delta=args.delta, r_max=r_max), bounds=bounds)
    print(result.model_dump_json(indent=2))
    return 0


def cmd_study(args: argparse.Namespace) -> int:
    config = _study_scenario(args)
    orchestrator = StudyOrchestrator(config, args.out, args.workers)
    if args.red_search:
        candidates = args.candidates or RED_CANDIDATES
        best, table = orchestrator.red_bandwidth_search(candidates, args.reps)
        print(table.to_string(index=False))
        print(f"selected bandwidth: {best:g}")
        return 0
    df, summary = orchestrator.run(args.reps)
    print(summary_frame(summary).to_string(index=False))
    if args.plots:
        emit_plots(orchestrator.out_dir, orchestrator.method_order, summary=summary)
    print(f"{len(df)} rows written to {orchestrator.out_dir / io.ROWS_FILE}")
    return 0


def cmd_delta_sweep(args: argparse.Namespace) -> int:
    config = _study_scenario(args)
    start, stop, step = args.deltas
    if step <= 0:
        raise ConfigError(f"Delta step must be positive, got {step}")
    deltas = np.arange(start, stop + step / 2, step).tolist()
    orchestrator = StudyOrchestrator(config, args.out, args.workers)
    table = orchestrator.delta_sweep(deltas, args.reps)
    if args.plots:
        emit_plots(orchestrator.out_dir, orchestrator.method_order, sweep=table)
    print(f"{len(table)} sweep rows written to {orchestrator.out_dir / SWEEP_FILE}")
    return 0


def cmd_delta_rule(args: argparse.Namespace) -> int:
    if args.cell_area is not None:
        area = args.cell_area
    else:
        area = _partition(args, _window(args)).mean_cell_area
    print(f"{delta_rule(area):.17g}")
    return 0


def cmd_plot(args: argparse.Namespace) -> int:
    out = Path(args.out)
    summary = io.read_summary(out / io.SUMMARY_JSON) if (out / io.SUMMARY_JSON).exists() else None
    sweep = pd.read_csv(out / SWEEP_FILE) if (out / SWEEP_FILE).exists() else None
    curves = None
    if args.overlay:
        config = _scenario(args)
        curves = k_curve_overlay(config, args.replication, args.fraction)
        io.write_k_curves(k_curves_frame(curves), out)
    if args.methods is not None:
        methods = args.methods
    elif summary is not None:
        methods = list(dict.fromkeys(row.method.value for row in summary.rows))
    else:
        methods = [m.value for m in ALL_METHODS]
    written = emit_plots(out, methods, summary=summary, sweep=sweep, curves=curves)
    for path in written:
        print(path)
    return 0


# --- Parser ---


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="lgcp-dup",
        description="Second-order LGCP estimation from point patterns with duplicated locations",
        formatter_class=argparse.RawDescriptionHelpFormatter,
    )
    parser.add_argument("--log-level", default=None, help="Override LGCP_LOG_LEVEL")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("simulate", help="Simulate one LGCP pattern")
    _add_scenario(p)
    p.add_argument("--seed", type=int)
    p.add_argument("--sim-grid", type=int, nargs=2, metavar=("NX", "NY"))
    p.add_argument("--out", type=Path, required=True)
    p.add_argument("--intensity-out", type=Path, help="Also write the true intensity raster")
    p.set_defaults(handler=cmd_simulate)

    p = sub.add_parser("corrupt", help="Snap a fraction of points to partition representatives")
    p.add_argument("--input", type=Path, required=True)
    _add_window(p)
    _add_partition(p)
    p.add_argument("--fraction", type=float, required=True)
    p.add_argument("--seed", type=int)
    p.add_argument("--out", type=Path, required=True)
    p.set_defaults(handler=cmd_corrupt)

    for name, help_text in (
        ("dedup", "Keep one point per duplicate group"),
        ("jitter", "Perturb duplicated points by U(-d, d)"),
        ("redistribute", "Redraw duplicated points uniformly within their cell"),
    ):
        p = sub.add_parser(name, help=help_text)
        p.add_argument("--input", type=Path, required=True)
        _add_window(p)
        p.add_argument("--seed", type=int)
        p.add_argument("--out", type=Path, required=True)
        if name == "jitter":
            p.add_argument("--d", type=float, default=25.0)
        if name == "redistribute":
            _add_partition(p)
        p.set_defaults(handler=cmd_remedy)

    p = sub.add_parser("intensity", help="Kernel intensity estimate on a grid")
    p.add_argument("--input", type=Path, required=True)
    _add_window(p)
    p.add_argument("--kind", choices=["constant", "fixed", "adaptive"], default="fixed")
    p.add_argument("--h", type=float, help="Bandwidth (h0 for the adaptive estimator)")
    p.add_argument("--pilot-h", type=float)
    p.add_argument("--select", choices=["none", "cvl"], default="none")
    p.add_argument("--grid", type=int, nargs=2, metavar=("NX", "NY"))
    p.add_argument("--as-intensity", action="store_true", help="Scale the density by n")
    p.add_argument("--out", type=Path, default=Path("intensity.csv"))
    p.set_defaults(handler=cmd_intensity)

    p = sub.add_parser("kest", help="Empirical K-function")
    p.add_argument("--input", type=Path, required=True)
    _add_window(p)
    p.add_argument("--intensity", choices=["constant", "fixed", "adaptive"], default="constant")
    p.add_argument("--h", type=float)
    p.add_argument("--grid", type=int, nargs=2, metavar=("NX", "NY"))
    p.add_argument("--rmax", type=float)
    p.add_argument("--r-points", type=int)
    p.add_argument("--out", type=Path, default=Path("kest.csv"))
    p.set_defaults(handler=cmd_kest)

    p = sub.add_parser("fit", help="(Modified) minimum contrast fit to a K estimate")
    p.add_argument("--kest", type=Path, required=True)
    p.add_argument("--delta", type=float, default=0.0)
    p.add_argument("--rmax", type=float)
    p.add_argument("--phi-bounds", type=float, nargs=2, metavar=("LO", "HI"))
    p.add_argument("--sigma2-bounds", type=float, nargs=2, metavar=("LO", "HI"))
    p.set_defaults(handler=cmd_fit)

    p = sub.add_parser("study", help="Run a simulation study")
    _add_scenario(p)
    _add_study_overrides(p)
    p.add_argument("--seed", type=int, help="Base seed (replication i uses seed + i)")
    p.add_argument("--reps", type=int)
    p.add_argument("--workers", type=int)
    p.add_argument("--out", type=Path)
    p.add_argument("--plots", action="store_true")
    p.add_argument(
        "--red-search",
        action="store_true",
        help="Select the bandwidth by RED on uncorrupted replications instead",
    )
    p.add_argument("--candidates", type=float, nargs="+")
    p.set_defaults(handler=cmd_study)

    p = sub.add_parser("delta-sweep", help="MMC estimates over a grid of delta values")
    _add_scenario(p)
    _add_study_overrides(p, delta=False)
    p.add_argument("--seed", type=int, help="Base seed (replication i uses seed + i)")
    p.add_argument(
        "--deltas",
        type=float,
        nargs=3,
        metavar=("START", "STOP", "STEP"),
        default=(0.0, 70.0, 5.0),
    )
    p.add_argument("--reps", type=int)
    p.add_argument("--workers", type=int)
    p.add_argument("--out", type=Path)
    p.add_argument("--plots", action="store_true")
    p.set_defaults(handler=cmd_delta_sweep)

    p = sub.add_parser("delta-rule", help="Rule-of-thirds delta for a partition")
    _add_window(p)
    _add_partition(p)
    p.add_argument("--cell-area", type=float)
    p.set_defaults(handler=cmd_delta_rule)

    p = sub.add_parser("plot", help="Figures from a study output directory")
    _add_scenario(p)
    p.add_argument("--out", type=Path, required=True)
    p.add_argument("--methods", nargs="*")
    p.add_argument("--overlay", action="store_true", help="Add the K-curve overlay")
    p.add_argument("--replication", type=int, default=0)
    p.add_argument("--fraction", type=float)
    p.set_defaults(handler=cmd_plot)

    return parser


def main(argv: Optional[List[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    level = (args.log_level or get_settings().log_level).upper()
    logging.basicConfig(level=level, format=LOG_FORMAT)
    logger.debug(f"Arguments: {vars(args)}")
    try:
        return args.handler(args)
    except ToolkitError as e:
        logger.error(f"{type(e).__name__}: {e}")
        return e.exit_code
    except ValidationError as e:
        logger.error(f"Invalid argument: {e}")
        return ConfigError.exit_code


if __name__ == "__main__":
    sys.exit(main())
