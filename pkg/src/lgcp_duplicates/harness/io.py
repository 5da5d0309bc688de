"""Row and summary files written by a study."""

import json
import logging
from pathlib import Path
from typing import Any, Dict, Iterable, List, Sequence, Union

import pandas as pd

from lgcp_duplicates.errors import DataIOError
from lgcp_duplicates.models import ALL_METHODS, ScenarioConfig, StudySummary

from .replication import ROW_COLUMNS

logger = logging.getLogger(__name__)

FLOAT_FORMAT = "%.17g"

ROWS_FILE = "rows.csv"
PARTIAL_ROWS_FILE = "rows.partial.csv"
SUMMARY_JSON = "summary.json"
SUMMARY_CSV = "summary.csv"
SCENARIO_JSON = "scenario.json"
METRICS_FILE = "metrics.prom"
K_CURVES_CSV = "k_curves.csv"


def rows_frame(rows: Iterable[Dict[str, Any]], methods: Sequence[str] = ()) -> pd.DataFrame:
    """Rows as a frame in (replication, fraction, method) order.

    Methods sort by their position in ``methods``, falling back to the canonical order.
    """
    df = pd.DataFrame(list(rows), columns=ROW_COLUMNS)
    order = list(methods) or [m.value for m in ALL_METHODS]
    rank = {m: i for i, m in enumerate(order)}
    df["_rank"] = df["method"].map(lambda m: rank.get(m, len(rank)))
    df = df.sort_values(["replication", "fraction", "_rank"], kind="mergesort")
    return df.drop(columns="_rank").reset_index(drop=True)


def append_rows(rows: List[Dict[str, Any]], path: Union[str, Path]) -> None:
    """Append rows to the incremental file, writing the header on first use."""
    path = Path(path)
    header = not path.exists()
    try:
        pd.DataFrame(rows, columns=ROW_COLUMNS).to_csv(
            path, mode="a", header=header, index=False, float_format=FLOAT_FORMAT
        )
    except OSError as e:
        raise DataIOError(f"Cannot append rows to {path}: {e}")


def write_rows(df: pd.DataFrame, path: Union[str, Path]) -> None:
    try:
        df.to_csv(path, index=False, float_format=FLOAT_FORMAT)
    except OSError as e:
        raise DataIOError(f"Cannot write rows to {path}: {e}")
    logger.info(f"Wrote {len(df)} rows to {path}")


def read_rows(path: Union[str, Path]) -> pd.DataFrame:
    try:
        df = pd.read_csv(path, keep_default_na=True)
    except (OSError, pd.errors.ParserError) as e:
        raise DataIOError(f"Cannot read rows from {path}: {e}")
    missing = set(ROW_COLUMNS) - set(df.columns)
    if missing:
        raise DataIOError(f"Row file {path} lacks columns {sorted(missing)}")
    df["message"] = df["message"].fillna("")
    df["converged"] = df["converged"].astype(bool)
    return df


def write_summary(summary: StudySummary, frame: pd.DataFrame, out_dir: Union[str, Path]) -> None:
    out_dir = Path(out_dir)
    try:
        (out_dir / SUMMARY_JSON).write_text(summary.model_dump_json(indent=2))
        frame.to_csv(out_dir / SUMMARY_CSV, index=False, float_format=FLOAT_FORMAT)
    except OSError as e:
        raise DataIOError(f"Cannot write summary to {out_dir}: {e}")


def read_summary(path: Union[str, Path]) -> StudySummary:
    try:
        return StudySummary.model_validate_json(Path(path).read_text())
    except OSError as e:
        raise DataIOError(f"Cannot read summary {path}: {e}")


def write_scenario(config: ScenarioConfig, out_dir: Union[str, Path]) -> None:
    """Echo the resolved scenario next to its outputs."""
    path = Path(out_dir) / SCENARIO_JSON
    try:
        path.write_text(json.dumps(config.model_dump(mode="json"), indent=2))
    except OSError as e:
        raise DataIOError(f"Cannot write {path}: {e}")


def write_k_curves(frame: pd.DataFrame, out_dir: Union[str, Path]) -> Path:
    """Write the K-curve overlay table, creating ``out_dir`` when needed."""
    path = Path(out_dir) / K_CURVES_CSV
    try:
        path.parent.mkdir(parents=True, exist_ok=True)
        frame.to_csv(path, index=False, float_format=FLOAT_FORMAT)
    except OSError as e:
        raise DataIOError(f"Cannot write K curves to {path}: {e}")
    return path
