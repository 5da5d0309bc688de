"""One replication of a simulation study: simulate, corrupt, remedy, estimate K, fit.

Everything here is a pure function of the scenario and the replication index, so
replications can run in any process and in any order.
"""

import logging
import math
import time
from dataclasses import dataclass, field
from typing import Any, Dict, List, Optional, Tuple

import numpy as np

from lgcp_duplicates.errors import NonConvergenceError, ToolkitError
from lgcp_duplicates.estimation import MethodContext, MethodFactory, delta_rule, fit, rmax_rule
from lgcp_duplicates.geometry import (
    Partition,
    PointPattern,
    Window,
    load_partition,
    make_regular_grid,
    random_tessellation,
)
from lgcp_duplicates.intensity import (
    constant_intensity,
    kernel_intensity_adaptive,
    kernel_intensity_fixed,
    select_bandwidth_cvl,
)
from lgcp_duplicates.kfunction import KEstimate, default_r_grid, k_hom, k_inhom
from lgcp_duplicates.models import BandwidthConfig, ContrastConfig, FitResult, ScenarioConfig
from lgcp_duplicates.simulate import CorruptionSpec, corrupt, realize_lgcp

logger = logging.getLogger(__name__)

ROW_COLUMNS = [
    "scenario",
    "replication",
    "seed",
    "fraction",
    "method",
    "n_points",
    "bandwidth",
    "delta",
    "r_max",
    "phi_hat",
    "sigma2_hat",
    "contrast",
    "converged",
    "message",
]

# substreams of a replication seed
STREAM_CORRUPTION = 1
STREAM_METHODS = 2


def replication_seed(config: ScenarioConfig, replication: int) -> int:
    return config.base_seed + replication


def derived_seed(seed: int, stream: int, index: int) -> int:
    return int(np.random.SeedSequence([seed, stream, index]).generate_state(1, np.uint64)[0])


def build_window(config: ScenarioConfig) -> Window:
    return Window.rectangle(*config.window)


def build_partition(config: ScenarioConfig, window: Optional[Window] = None) -> Partition:
    """The snapping partition; fixed across replications."""
    window = window or build_window(config)
    corruption = config.corruption
    if corruption.partition == "grid":
        return make_regular_grid(window, *corruption.grid)
    if corruption.partition == "tessellation":
        n_cells = corruption.n_cells or corruption.grid[0] * corruption.grid[1]
        return random_tessellation(window, n_cells, corruption.partition_seed)
    return load_partition(corruption.path, window)


def resolve_r_max(config: ScenarioConfig, window: Window) -> float:
    return config.r_max if config.r_max is not None else rmax_rule(window)


def resolve_delta(config: ScenarioConfig, partition: Partition) -> float:
    return config.delta if config.delta is not None else delta_rule(partition.mean_cell_area)


def estimate_k_for(
    pattern: PointPattern, intensity: BandwidthConfig, r_grid: np.ndarray
) -> Tuple[KEstimate, Optional[float]]:
    """K estimate with the scenario's intensity estimator; returns the bandwidth used."""
    if intensity.kind == "constant":
        constant_intensity(pattern)
        return k_hom(pattern, r_grid), None
    if intensity.kind == "fixed":
        h = intensity.h
        if intensity.select == "cvl" or h is None:
            h = select_bandwidth_cvl(pattern, intensity.candidates, intensity.grid, kind="fixed")
        field_ = kernel_intensity_fixed(pattern, h, intensity.grid, as_intensity=True)
        return k_inhom(pattern, field_, r_grid), h
    h0 = intensity.h0
    if intensity.select == "cvl" or h0 is None:
        h0 = select_bandwidth_cvl(
            pattern,
            intensity.candidates,
            intensity.grid,
            kind="adaptive",
            pilot_h=intensity.pilot_h,
        )
    field_ = kernel_intensity_adaptive(
        pattern, h0, intensity.pilot_h, intensity.grid, as_intensity=True
    )
    return k_inhom(pattern, field_, r_grid), h0


def _row(config: ScenarioConfig, replication: int, fraction: float, method: str, **values: Any):
    row: Dict[str, Any] = {c: math.nan for c in ROW_COLUMNS}
    row.update(
        scenario=config.label,
        replication=replication,
        seed=replication_seed(config, replication),
        fraction=fraction,
        method=method,
        n_points=0,
        converged=False,
        message="",
    )
    row.update(values)
    return row


def _fit_row(result: FitResult) -> Dict[str, Any]:
    return {
        "phi_hat": result.phi_hat,
        "sigma2_hat": result.sigma2_hat,
        "contrast": result.contrast_value,
        "delta": result.delta,
        "r_max": result.r_max,
        "converged": result.converged,
        "message": "",
    }


@dataclass
class ReplicationOutcome:
    """Rows of one replication plus timings, which stay out of the row file."""

    replication: int
    rows: List[Dict[str, Any]]
    fit_seconds: List[Tuple[str, float]] = field(default_factory=list)
    remedies: List[str] = field(default_factory=list)
    seconds: float = 0.0
    failed: bool = False


def run_replication(
    config: ScenarioConfig, replication: int, partition: Optional[Partition] = None
) -> ReplicationOutcome:
    """All (fraction, method) fits of one replication.

    Failures become non-converged rows so the row count is always
    |fractions| * |methods|.
    """
    started = time.perf_counter()
    window = build_window(config)
    partition = partition or build_partition(config, window)
    seed = replication_seed(config, replication)
    methods = MethodFactory.get_methods(config.methods)
    outcome = ReplicationOutcome(replication=replication, rows=[])

    try:
        realization = realize_lgcp(
            config.mean, config.covariance, window, *config.sim_grid, seed=seed
        )
        r_max = resolve_r_max(config, window)
        r_grid = default_r_grid(r_max, config.r_points)
        delta = resolve_delta(config, partition)
    except ToolkitError as e:
        logger.warning(f"Replication {replication} of {config.label} failed to simulate: {e}")
        outcome.failed = True
        for fraction in config.corruption.fractions:
            for method in methods:
                outcome.rows.append(
                    _row(config, replication, fraction, method.label.value, message=str(e))
                )
        outcome.seconds = time.perf_counter() - started
        return outcome

    for f_index, fraction in enumerate(config.corruption.fractions):
        observed = corrupt(
            realization.pattern,
            CorruptionSpec(
                partition=partition,
                fraction=fraction,
                seed=derived_seed(seed, STREAM_CORRUPTION, f_index),
            ),
        )
        context = MethodContext(
            partition=partition,
            r_max=r_max,
            seed=derived_seed(seed, STREAM_METHODS, f_index),
            delta=delta,
            jitter_d=config.jitter_d,
            tol=config.duplicate_tol,
            bounds=config.bounds,
            optimizer=config.optimizer,
        )
        cache: Dict[str, Any] = {}
        for method in methods:
            label = method.label.value
            try:
                key = method.preprocessing_key
                if key not in cache:
                    processed = method.preprocess(observed, context)
                    if key != "raw":
                        outcome.remedies.append(label)
                    try:
                        khat, bandwidth = estimate_k_for(processed, config.intensity, r_grid)
                        cache[key] = (processed, khat, bandwidth, None)
                    except ToolkitError as e:
                        cache[key] = (processed, None, None, e)
                processed, khat, bandwidth, error = cache[key]
                base = {"n_points": processed.n, "bandwidth": bandwidth}
                if error is not None:
                    raise error
                fit_started = time.perf_counter()
                try:
                    result = method.estimate(khat, context)
                    values = {**base, **_fit_row(result)}
                except NonConvergenceError as e:
                    d = e.diagnostics
                    values = {
                        **base,
                        "phi_hat": d.get("phi_hat", math.nan),
                        "sigma2_hat": d.get("sigma2_hat", math.nan),
                        "contrast": d.get("contrast_value", math.nan),
                        "message": str(e),
                    }
                outcome.fit_seconds.append((label, time.perf_counter() - fit_started))
                outcome.rows.append(_row(config, replication, fraction, label, **values))
            except ToolkitError as e:
                logger.warning(
                    f"{config.label} rep {replication} fraction {fraction:g} {label}: {e}"
                )
                outcome.rows.append(
                    _row(config, replication, fraction, label, n_points=observed.n, message=str(e))
                )

    outcome.seconds = time.perf_counter() - started
    logger.info(
        f"Replication {replication} of {config.label} done: "
        f"N={realization.pattern.n}, {len(outcome.rows)} fits"
    )
    return outcome


def sweep_replication(
    config: ScenarioConfig,
    replication: int,
    deltas: List[float],
    partition: Optional[Partition] = None,
) -> List[Dict[str, Any]]:
    """Modified-contrast fits over a delta grid, one K estimate per corruption fraction."""
    window = build_window(config)
    partition = partition or build_partition(config, window)
    seed = replication_seed(config, replication)
    rows: List[Dict[str, Any]] = []
    try:
        realization = realize_lgcp(
            config.mean, config.covariance, window, *config.sim_grid, seed=seed
        )
        r_max = resolve_r_max(config, window)
        r_grid = default_r_grid(r_max, config.r_points)
    except ToolkitError as e:
        logger.warning(f"Sweep replication {replication} failed to simulate: {e}")
        return [
            {
                "replication": replication,
                "fraction": f,
                "delta": d,
                "phi_hat": math.nan,
                "sigma2_hat": math.nan,
                "converged": False,
            }
            for f in config.corruption.fractions
            for d in deltas
        ]

    for f_index, fraction in enumerate(config.corruption.fractions):
        observed = corrupt(
            realization.pattern,
            CorruptionSpec(
                partition=partition,
                fraction=fraction,
                seed=derived_seed(seed, STREAM_CORRUPTION, f_index),
            ),
        )
        try:
            khat, _ = estimate_k_for(observed, config.intensity, r_grid)
        except ToolkitError as e:
            logger.warning(f"Sweep replication {replication} fraction {fraction:g}: {e}")
            khat = None
        for delta in deltas:
            row = {
                "replication": replication,
                "fraction": fraction,
                "delta": delta,
                "phi_hat": math.nan,
                "sigma2_hat": math.nan,
                "converged": False,
            }
            if khat is not None:
                try:
                    result = fit(
                        khat,
                        ContrastConfig(delta=delta, r_max=r_max),
                        bounds=config.bounds,
                        optimizer=config.optimizer,
                    )
                    row.update(
                        phi_hat=result.phi_hat, sigma2_hat=result.sigma2_hat, converged=True
                    )
                except NonConvergenceError as e:
                    row.update(
                        phi_hat=e.diagnostics.get("phi_hat", math.nan),
                        sigma2_hat=e.diagnostics.get("sigma2_hat", math.nan),
                    )
                except ToolkitError as e:
                    logger.warning(f"Sweep fit at delta={delta:g} failed: {e}")
            rows.append(row)
    return rows
