#!/usr/bin/env python3
"""
Independent check of a study summary.
Recomputes the per (method, fraction) quantiles from rows.csv with plain pandas
and compares them with summary.csv.

Usage: python scripts/verify_summary.py results/H.2
"""

import sys
from pathlib import Path

import numpy as np
import pandas as pd

QUANTILES = [0.05, 0.25, 0.5, 0.75, 0.95]
NAMES = ["q05", "q25", "q50", "q75", "q95"]

GREEN = "\033[92m"
RED = "\033[91m"
RESET = "\033[0m"


def recompute(rows: pd.DataFrame) -> pd.DataFrame:
    records = []
    for (method, fraction), group in rows.groupby(["method", "fraction"], sort=False):
        ok = group[group["converged"].astype(bool)]
        record = {"method": method, "fraction": fraction, "n_converged": len(ok)}
        for column, prefix in (("phi_hat", "phi"), ("sigma2_hat", "sigma2")):
            values = ok[column].dropna()
            q = values.quantile(QUANTILES).to_numpy() if len(values) else [np.nan] * 5
            for name, value in zip(NAMES, q):
                record[f"{prefix}_{name}"] = value
        records.append(record)
    return pd.DataFrame.from_records(records)


def main(out_dir: str) -> int:
    out = Path(out_dir)
    rows = pd.read_csv(out / "rows.csv")
    summary = pd.read_csv(out / "summary.csv")
    mine = recompute(rows)

    merged = summary.merge(mine, on=["method", "fraction"], suffixes=("", "_check"))
    if len(merged) != len(summary) or len(merged) != len(mine):
        print(f"{RED}FAIL{RESET}  (method, fraction) keys differ")
        return 1

    failures = 0
    columns = ["n_converged"] + [f"{p}_{n}" for p in ("phi", "sigma2") for n in NAMES]
    for column in columns:
        a = merged[column].to_numpy(dtype=float)
        b = merged[f"{column}_check"].to_numpy(dtype=float)
        same = (a == b) | (np.isnan(a) & np.isnan(b))
        if not same.all():
            failures += 1
            print(f"{RED}FAIL{RESET}  {column}: {int((~same).sum())} mismatch(es)")
    if failures:
        return 1
    print(f"{GREEN}PASS{RESET}  {len(merged)} summary lines match rows.csv")
    return 0


if __name__ == "__main__":
    if len(sys.argv) != 2:
        print(__doc__)
        sys.exit(2)
    sys.exit(main(sys.argv[1]))
