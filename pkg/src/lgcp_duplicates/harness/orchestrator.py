"""
Study Orchestrator Module.

Runs a scenario's replications across a worker pool, writes rows as they arrive,
and produces the summary, the delta sweep and the bandwidth search built on the
same replications.

Replications are seeded by counter (base_seed + index), so results do not depend
on the number of workers or the order in which they finish.
"""

import logging
import math
import time
from multiprocessing import Pool
from pathlib import Path
from typing import Any, Callable, Dict, Iterable, Iterator, List, Optional, Sequence, Tuple, Union

import numpy as np
import pandas as pd

from lgcp_duplicates.config import get_settings
from lgcp_duplicates.errors import ConfigError, NonConvergenceError, ToolkitError
from lgcp_duplicates.estimation import MethodContext, MethodFactory, fit
from lgcp_duplicates.geometry import Partition
from lgcp_duplicates.intensity import (
    kernel_intensity_adaptive,
    kernel_intensity_fixed,
    red,
)
from lgcp_duplicates.kfunction import KEstimate, default_r_grid, k_inhom, theoretical_estimate
from lgcp_duplicates.models import ContrastConfig, MethodLabel, ScenarioConfig, StudySummary
from lgcp_duplicates.observability.metrics import (
    FIT_DURATION_SECONDS,
    FITS_TOTAL,
    REMEDY_APPLICATIONS_TOTAL,
    REPLICATION_DURATION_SECONDS,
    REPLICATIONS_TOTAL,
    export_textfile,
)
from lgcp_duplicates.simulate import CorruptionSpec, corrupt, realize_lgcp

from . import io
from .replication import (
    STREAM_CORRUPTION,
    STREAM_METHODS,
    ReplicationOutcome,
    build_partition,
    build_window,
    derived_seed,
    estimate_k_for,
    replication_seed,
    resolve_delta,
    resolve_r_max,
    run_replication,
    sweep_replication,
)
from .summary import summarize, summary_frame, sweep_quantiles

logger = logging.getLogger(__name__)

SWEEP_ROWS_FILE = "sweep_rows.csv"
SWEEP_FILE = "sweep.csv"
RED_SEARCH_FILE = "red_search.csv"

# --- Worker process state ---

_worker_config: Optional[ScenarioConfig] = None
_worker_partition: Optional[Partition] = None


def _init_worker(config: ScenarioConfig) -> None:
    global _worker_config, _worker_partition
    _worker_config = config
    _worker_partition = build_partition(config)


def _replication_task(replication: int) -> ReplicationOutcome:
    return run_replication(_worker_config, replication, _worker_partition)


def _sweep_task(args: Tuple[int, List[float]]) -> List[Dict[str, Any]]:
    replication, deltas = args
    return sweep_replication(_worker_config, replication, deltas, _worker_partition)


def _red_task(args: Tuple[int, List[float]]) -> List[Dict[str, Any]]:
    replication, candidates = args
    return red_replication(_worker_config, replication, candidates)


class StudyOrchestrator:
    """
    Drives one scenario: replications, row files, summary and metrics.
    """

    def __init__(
        self,
        config: ScenarioConfig,
        out_dir: Union[str, Path, None] = None,
        workers: Optional[int] = None,
    ):
        self.config = config
        self.settings = get_settings()
        self.out_dir = Path(out_dir or self.settings.output_dir)
        self.workers = max(1, workers if workers is not None else self.settings.workers)
        self.method_order = [m.value for m in config.methods]

    def _map(self, task: Callable[[Any], Any], items: Sequence[Any]) -> Iterator[Any]:
        """Apply a worker task to items, unordered, in-process when one worker is asked for."""
        if self.workers == 1 or len(items) <= 1:
            _init_worker(self.config)
            for item in items:
                yield task(item)
            return
        with Pool(
            processes=self.workers, initializer=_init_worker, initargs=(self.config,)
        ) as pool:
            yield from pool.imap_unordered(task, items)

    def _record(self, outcome: ReplicationOutcome) -> None:
        for row in outcome.rows:
            FITS_TOTAL.labels(
                method=row["method"], status="converged" if row["converged"] else "failed"
            ).inc()
        for method, seconds in outcome.fit_seconds:
            FIT_DURATION_SECONDS.labels(method=method).observe(seconds)
        for method in outcome.remedies:
            REMEDY_APPLICATIONS_TOTAL.labels(method=method).inc()
        REPLICATIONS_TOTAL.labels(
            scenario=self.config.label, status="failed" if outcome.failed else "ok"
        ).inc()
        REPLICATION_DURATION_SECONDS.labels(scenario=self.config.label).observe(outcome.seconds)

    def _prepare(self) -> None:
        self.out_dir.mkdir(parents=True, exist_ok=True)
        io.write_scenario(self.config, self.out_dir)

    def run(self, replications: Optional[int] = None) -> Tuple[pd.DataFrame, StudySummary]:
        """Run every replication and write rows, summary and scenario echo.

        Returns:
            The sorted row frame and the study summary
        """
        reps = replications or self.config.replications
        self._prepare()
        partial = self.out_dir / io.PARTIAL_ROWS_FILE
        partial.unlink(missing_ok=True)

        logger.info(
            f"Starting study {self.config.label}: {reps} replications, "
            f"fractions {self.config.corruption.fractions}, methods {self.method_order}, "
            f"{self.workers} worker(s)"
        )
        start_time = time.time()
        rows: List[Dict[str, Any]] = []
        for done, outcome in enumerate(self._map(_replication_task, list(range(reps))), 1):
            self._record(outcome)
            io.append_rows(outcome.rows, partial)
            rows.extend(outcome.rows)
            logger.debug(f"{done}/{reps} replications finished")

        df = io.rows_frame(rows, self.method_order)
        io.write_rows(df, self.out_dir / io.ROWS_FILE)
        partial.unlink(missing_ok=True)

        summary = summarize(
            df, self.config.label, self.config.covariance.phi, self.config.covariance.sigma2
        )
        io.write_summary(summary, summary_frame(summary), self.out_dir)
        if self.settings.metrics_textfile:
            export_textfile(str(self.out_dir / io.METRICS_FILE))

        n_converged = int(df["converged"].sum())
        logger.info(
            f"Study {self.config.label} finished in {time.time() - start_time:.1f}s: "
            f"{n_converged}/{len(df)} fits converged"
        )
        return df, summary

    def delta_sweep(
        self, delta_grid: Iterable[float], replications: Optional[int] = None
    ) -> pd.DataFrame:
        """MMC fits over a grid of lower bounds; writes per-delta quantile bands."""
        deltas = sorted(float(d) for d in delta_grid)
        if not deltas:
            raise ConfigError("Delta grid is empty")
        r_max = resolve_r_max(self.config, build_window(self.config))
        bad = [d for d in deltas if d < 0 or d >= r_max]
        if bad:
            raise ConfigError(f"Delta values {bad} outside [0, {r_max:g})")
        reps = replications or self.config.replications
        self._prepare()

        logger.info(f"Starting delta sweep of {self.config.label} over {len(deltas)} values")
        rows: List[Dict[str, Any]] = []
        for chunk in self._map(_sweep_task, [(rep, deltas) for rep in range(reps)]):
            rows.extend(chunk)

        df = pd.DataFrame(rows).sort_values(
            ["replication", "fraction", "delta"], kind="mergesort"
        ).reset_index(drop=True)
        df.to_csv(self.out_dir / SWEEP_ROWS_FILE, index=False, float_format=io.FLOAT_FORMAT)
        table = sweep_quantiles(df)
        table.to_csv(self.out_dir / SWEEP_FILE, index=False, float_format=io.FLOAT_FORMAT)
        logger.info(f"Delta sweep written to {self.out_dir / SWEEP_FILE}")
        return table

    def red_bandwidth_search(
        self, candidates: Sequence[float], replications: Optional[int] = None
    ) -> Tuple[float, pd.DataFrame]:
        """Bandwidth minimizing the median RED of uncorrupted MC fits.

        Returns:
            The chosen bandwidth and the per-candidate table
        """
        if self.config.intensity.kind == "constant":
            raise ConfigError("RED bandwidth search needs a fixed or adaptive intensity")
        candidates = sorted(float(h) for h in candidates)
        if not candidates or candidates[0] <= 0:
            raise ConfigError(f"Bandwidth candidates must be positive, got {candidates}")
        reps = replications or self.config.replications
        self._prepare()

        rows: List[Dict[str, Any]] = []
        for chunk in self._map(_red_task, [(rep, candidates) for rep in range(reps)]):
            rows.extend(chunk)
        df = pd.DataFrame(rows)
        table = (
            df.groupby("bandwidth", sort=True)["red"]
            .agg(median_red="median", n_finite="count")
            .reset_index()
        )
        finite = table.dropna(subset=["median_red"])
        if finite.empty:
            raise NonConvergenceError("No bandwidth candidate produced a converged fit")
        best = float(finite.loc[finite["median_red"].idxmin(), "bandwidth"])
        table.to_csv(self.out_dir / RED_SEARCH_FILE, index=False, float_format=io.FLOAT_FORMAT)
        logger.info(f"RED search for {self.config.label} selected bandwidth {best:g}")
        return best, table

    def k_curve_overlay(
        self, replication: int = 0, fraction: Optional[float] = None
    ) -> Dict[str, KEstimate]:
        """K curves of one replication: truth, corrupted pattern and the three remedies."""
        return k_curve_overlay(self.config, replication, fraction)


def red_replication(
    config: ScenarioConfig, replication: int, candidates: Sequence[float]
) -> List[Dict[str, Any]]:
    """RED of plain MC fits on one uncorrupted realization for each bandwidth."""
    window = build_window(config)
    seed = replication_seed(config, replication)
    intensity = config.intensity
    phi, sigma2 = config.covariance.phi, config.covariance.sigma2
    rows = []
    try:
        realization = realize_lgcp(
            config.mean, config.covariance, window, *config.sim_grid, seed=seed
        )
        pattern = realization.pattern
        r_max = resolve_r_max(config, window)
        r_grid = default_r_grid(r_max, config.r_points)
    except ToolkitError as e:
        logger.warning(f"RED replication {replication} failed to simulate: {e}")
        return [{"replication": replication, "bandwidth": h, "red": math.nan} for h in candidates]
    for h in candidates:
        value = math.nan
        try:
            if intensity.kind == "fixed":
                field_ = kernel_intensity_fixed(pattern, h, intensity.grid, as_intensity=True)
            else:
                field_ = kernel_intensity_adaptive(
                    pattern, h, intensity.pilot_h, intensity.grid, as_intensity=True
                )
            result = fit(
                k_inhom(pattern, field_, r_grid),
                ContrastConfig(delta=0.0, r_max=r_max),
                bounds=config.bounds,
                optimizer=config.optimizer,
            )
            value = red(result.phi_hat, result.sigma2_hat, phi, sigma2)
        except ToolkitError as e:
            logger.debug(f"RED replication {replication} at h={h:g}: {e}")
        rows.append({"replication": replication, "bandwidth": h, "red": value})
    return rows


def k_curve_overlay(
    config: ScenarioConfig, replication: int = 0, fraction: Optional[float] = None
) -> Dict[str, KEstimate]:
    """Truth, corrupted and remedied K curves for one (replication, fraction).

    Uses the same seed streams as the study, so the curves belong to rows of
    ``rows.csv``. ``fraction`` defaults to the largest corruption level.
    """
    fractions = config.corruption.fractions
    fraction = max(fractions) if fraction is None else fraction
    if fraction not in fractions:
        raise ConfigError(f"Fraction {fraction} is not one of the scenario's {fractions}")
    f_index = fractions.index(fraction)

    window = build_window(config)
    partition = build_partition(config, window)
    seed = replication_seed(config, replication)
    r_max = resolve_r_max(config, window)
    r_grid = default_r_grid(r_max, config.r_points)

    realization = realize_lgcp(
        config.mean, config.covariance, window, *config.sim_grid, seed=seed
    )
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
        delta=resolve_delta(config, partition),
        jitter_d=config.jitter_d,
        tol=config.duplicate_tol,
    )
    curves = {
        "truth": theoretical_estimate(r_grid, config.covariance),
        "corrupted": estimate_k_for(observed, config.intensity, r_grid)[0],
    }
    for label in (MethodLabel.MC_I, MethodLabel.MC_II, MethodLabel.MC_III):
        method = MethodFactory.get_method(label)
        curves[label.value] = estimate_k_for(
            method.preprocess(observed, context), config.intensity, r_grid
        )[0]
    logger.info(
        f"K overlay for {config.label} rep {replication} at fraction {fraction:g}: "
        f"{observed.n} observed points"
    )
    return curves


def k_curves_frame(curves: Dict[str, KEstimate]) -> pd.DataFrame:
    """Curves side by side on their shared distance grid."""
    r = next(iter(curves.values())).r
    data = {"r": r}
    for label, estimate in curves.items():
        data[label] = np.asarray(estimate.khat)
    return pd.DataFrame(data)
