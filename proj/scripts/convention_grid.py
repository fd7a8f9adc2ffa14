"""Runs the benchmark CLI over data conventions that affect the reported NMAE.

Grid: value scaling (raw / z-score), time encoding (fractional years /
sample index), PA step coordinates for the frequencies (log / raw), number of
spectral components K, and which hyperparameters score each forecast. p = 2, c = 100, eps = 0 and the linear trend stay fixed.

Usage: python scripts/convention_grid.py build/pmgp data/co2_monthly.csv data/airline.csv
"""
import itertools
import json
import pathlib
import subprocess
import sys
import tempfile

import pandas as pd


def variant(df: pd.DataFrame, scaling: str, time: str) -> pd.DataFrame:
    out = df.copy()
    if scaling == "zscore":
        out["y"] = (out.y - out.y.mean()) / out.y.std()
    if time == "index":
        out["t"] = (out.t * 12).round()
    return out


def run(binary: str, csv: pathlib.Path, fs: float, k: int, previous: bool, omega: str) -> dict:
    with tempfile.NamedTemporaryFile(suffix=".json") as out:
        cmd = [binary, "benchmark", "--input", str(csv), "--fs", str(fs), "--components", str(k),
               "--omega-space", omega, "--models", "pmgp,pa-ar2", "--out", out.name]
        if previous:
            cmd.append("--score-previous-theta")
        subprocess.run(cmd, check=True, capture_output=True)
        report = json.load(open(out.name))
    return {m["model"]: m.get("nmae", float("nan")) for m in report["models"]}


def main() -> None:
    binary, *inputs = sys.argv[1:]
    rows = []
    with tempfile.TemporaryDirectory() as tmp:
        for path in inputs:
            base = pd.read_csv(path)
            for scaling, time in itertools.product(["raw", "zscore"], ["years", "index"]):
                csv = pathlib.Path(tmp) / f"{pathlib.Path(path).stem}_{scaling}_{time}.csv"
                variant(base, scaling, time).to_csv(csv, index=False, float_format="%.12g")
                fs = 12.0 if time == "years" else 1.0
                for omega, k, previous in itertools.product(["log", "raw"], [1, 2, 3, 4, 5], [False, True]):
                    res = run(binary, csv, fs, k, previous, omega)
                    rows.append((pathlib.Path(path).stem, scaling, time, omega, k,
                                 "previous" if previous else "current", res["pmgp"], res["pa-ar2"]))
                    print("%-12s %-6s %-5s omega=%-3s K=%d %-8s pmgp=%.3f pa-ar2=%.3f" % rows[-1], flush=True)


if __name__ == "__main__":
    main()
