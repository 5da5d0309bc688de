"""SVG figures from study outputs.

matplotlib is an optional extra (``pip install lgcp-duplicates[plot]``); it is imported
on first use with the non-interactive Agg backend.
"""

import logging
from pathlib import Path
from typing import Dict, List, Optional, Sequence, Union

import pandas as pd

from lgcp_duplicates.errors import ConfigError, DataIOError
from lgcp_duplicates.kfunction import KEstimate
from lgcp_duplicates.models import StudySummary

logger = logging.getLogger(__name__)

K_CURVES_FILE = "k_curves.svg"
BOXES_FILE = "boxes_{name}.svg"
SWEEP_FILE = "delta_sweep_{name}.svg"


def _pyplot():
    try:
        import matplotlib
    except ImportError:
        raise ConfigError("Plotting requires matplotlib; install the 'plot' extra")
    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    return plt


def plot_k_curves(curves: Dict[str, KEstimate], path: Union[str, Path]) -> Path:
    """One labeled polyline per curve."""
    plt = _pyplot()
    fig, ax = plt.subplots(figsize=(6, 4.5))
    for label, estimate in curves.items():
        style = "--" if label == "truth" else "-"
        ax.plot(estimate.r, estimate.khat, style, label=label, linewidth=1.2)
    ax.set_xlabel("r")
    ax.set_ylabel("K(r)")
    ax.legend(frameon=False)
    fig.tight_layout()
    fig.savefig(path, format="svg")
    plt.close(fig)
    return Path(path)


def plot_quantile_boxes(
    summary: StudySummary, parameter: str, path: Union[str, Path], methods: Sequence[str]
) -> Path:
    """Box per (fraction, method): whiskers at 5/95%, box at 25/75%, line at the median."""
    if parameter not in ("phi", "sigma2"):
        raise ConfigError(f"Unknown parameter {parameter!r}")
    plt = _pyplot()
    fractions = sorted({row.fraction for row in summary.rows})
    stats, positions, labels = [], [], []
    width = len(methods) + 1
    for fi, fraction in enumerate(fractions):
        for mi, method in enumerate(methods):
            row = next(
                (r for r in summary.rows if r.fraction == fraction and r.method.value == method),
                None,
            )
            band = getattr(row, parameter) if row is not None else None
            if band is None:
                continue
            stats.append(
                {
                    "whislo": band.q05,
                    "q1": band.q25,
                    "med": band.q50,
                    "q3": band.q75,
                    "whishi": band.q95,
                    "label": method,
                }
            )
            positions.append(fi * width + mi)
            labels.append(method)

    fig, ax = plt.subplots(figsize=(max(6, 0.45 * len(stats) + 2), 4.5))
    if stats:
        ax.bxp(stats, positions=positions, showfliers=False, widths=0.7)
        ax.set_xticks(positions, labels, rotation=90, fontsize=7)
    truth = summary.phi_true if parameter == "phi" else summary.sigma2_true
    ax.axhline(truth, linestyle="--", color="black", linewidth=0.8)
    for fi, fraction in enumerate(fractions):
        ax.text(
            fi * width + (len(methods) - 1) / 2,
            1.01,
            f"{fraction:.0%}",
            transform=ax.get_xaxis_transform(),
            ha="center",
            fontsize=8,
        )
    ax.set_ylabel(parameter)
    fig.tight_layout()
    fig.savefig(path, format="svg")
    plt.close(fig)
    return Path(path)


def plot_delta_sweep(
    table: pd.DataFrame, parameter: str, fraction: float, path: Union[str, Path]
) -> Path:
    """Median line with shaded 25-75% and 5-95% bands against delta."""
    plt = _pyplot()
    data = table[table["fraction"] == fraction].sort_values("delta")
    fig, ax = plt.subplots(figsize=(6, 4.5))
    ax.fill_between(
        data["delta"], data[f"{parameter}_q05"], data[f"{parameter}_q95"],
        color="0.85", label="5-95%",
    )
    ax.fill_between(
        data["delta"], data[f"{parameter}_q25"], data[f"{parameter}_q75"],
        color="0.6", label="25-75%",
    )
    ax.plot(data["delta"], data[f"{parameter}_q50"], color="black", label="median")
    ax.set_xlabel("delta")
    ax.set_ylabel(parameter)
    ax.set_title(f"{fraction:.0%} corrupted", fontsize=9)
    ax.legend(frameon=False)
    fig.tight_layout()
    fig.savefig(path, format="svg")
    plt.close(fig)
    return Path(path)


def emit_plots(
    out_dir: Union[str, Path],
    methods: Sequence[str],
    summary: Optional[StudySummary] = None,
    sweep: Optional[pd.DataFrame] = None,
    curves: Optional[Dict[str, KEstimate]] = None,
) -> List[Path]:
    """Write every figure the given outputs support; nothing when no method is selected."""
    if not methods:
        logger.info("No methods selected, no figures written")
        return []
    out_dir = Path(out_dir)
    try:
        out_dir.mkdir(parents=True, exist_ok=True)
    except OSError as e:
        raise DataIOError(f"Cannot create figure directory {out_dir}: {e}")
    written: List[Path] = []
    if curves:
        written.append(plot_k_curves(curves, out_dir / K_CURVES_FILE))
    if summary is not None:
        for parameter in ("phi", "sigma2"):
            written.append(
                plot_quantile_boxes(
                    summary, parameter, out_dir / BOXES_FILE.format(name=parameter), methods
                )
            )
    if sweep is not None and not sweep.empty:
        for fraction in sorted(sweep["fraction"].unique()):
            for parameter in ("phi", "sigma2"):
                name = f"{parameter}_{int(round(100 * fraction))}"
                path = out_dir / SWEEP_FILE.format(name=name)
                written.append(plot_delta_sweep(sweep, parameter, fraction, path))
    logger.info(f"Wrote {len(written)} figure(s) to {out_dir}")
    return written
