"""Quantile summaries of study rows.

Quantiles use converged rows only, with pandas' linear interpolation, so
``scripts/verify_summary.py`` can recompute them from ``rows.csv``.
"""

import logging
from typing import List, Optional

import pandas as pd

from lgcp_duplicates.errors import ToolkitError
from lgcp_duplicates.intensity import red
from lgcp_duplicates.models import MethodLabel, QuantileBand, StudySummary, SummaryRow

logger = logging.getLogger(__name__)

QUANTILES = [0.05, 0.25, 0.5, 0.75, 0.95]
BAND_FIELDS = ["q05", "q25", "q50", "q75", "q95"]


def quantile_band(values: pd.Series) -> Optional[QuantileBand]:
    values = values.dropna()
    if values.empty:
        return None
    q = values.quantile(QUANTILES).to_numpy()
    return QuantileBand(**dict(zip(BAND_FIELDS, (float(v) for v in q))))


def summarize(
    rows: pd.DataFrame, label: str, phi_true: float, sigma2_true: float
) -> StudySummary:
    """Per (method, fraction) quantiles of the estimates and RED of the medians."""
    out: List[SummaryRow] = []
    for (method, fraction), group in rows.groupby(["method", "fraction"], sort=False):
        converged = group[group["converged"]]
        phi = quantile_band(converged["phi_hat"])
        sigma2 = quantile_band(converged["sigma2_hat"])
        red_value = None
        if phi is not None and sigma2 is not None:
            try:
                red_value = red(phi.q50, sigma2.q50, phi_true, sigma2_true)
            except ToolkitError as e:
                logger.warning(f"RED undefined for {method} at {fraction:g}: {e}")
        out.append(
            SummaryRow(
                method=MethodLabel(method),
                fraction=float(fraction),
                n_rows=len(group),
                n_converged=len(converged),
                convergence_rate=len(converged) / len(group),
                phi=phi,
                sigma2=sigma2,
                red_of_medians=red_value,
            )
        )
    return StudySummary(label=label, phi_true=phi_true, sigma2_true=sigma2_true, rows=out)


def summary_frame(summary: StudySummary) -> pd.DataFrame:
    """Flat table, one line per (method, fraction)."""
    records = []
    for row in summary.rows:
        record = {
            "method": row.method.value,
            "fraction": row.fraction,
            "n_rows": row.n_rows,
            "n_converged": row.n_converged,
            "convergence_rate": row.convergence_rate,
            "red_of_medians": row.red_of_medians,
        }
        for name in ("phi", "sigma2"):
            band = getattr(row, name)
            for f in BAND_FIELDS:
                record[f"{name}_{f}"] = getattr(band, f) if band is not None else None
        records.append(record)
    return pd.DataFrame.from_records(records)


def sweep_quantiles(rows: pd.DataFrame) -> pd.DataFrame:
    """Quantile bands of the converged estimates per (fraction, delta)."""
    records = []
    for (fraction, delta), group in rows.groupby(["fraction", "delta"], sort=True):
        converged = group[group["converged"]]
        record = {
            "fraction": float(fraction),
            "delta": float(delta),
            "n_converged": len(converged),
        }
        for name in ("phi_hat", "sigma2_hat"):
            band = quantile_band(converged[name])
            for f in BAND_FIELDS:
                record[f"{name.removesuffix('_hat')}_{f}"] = (
                    getattr(band, f) if band is not None else None
                )
        records.append(record)
    return pd.DataFrame.from_records(records)
