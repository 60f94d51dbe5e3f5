"""Persisted experiment results: JSON report plus CSV rows.

The JSON splits into a deterministic ``results`` payload (bit-identical
across reruns with the same config and seeds) and a ``timing`` section that
is excluded from reproducibility comparisons.
"""

from __future__ import annotations

import csv
import hashlib
import json
import os
from dataclasses import asdict, dataclass, field

import numpy as np

from ..errors import FormatError

FORMAT_VERSION = 1

CSV_COLUMNS = ["run_id", "env", "dataset_combo", "algo", "seed",
               "return_mean", "return_std", "margin_c", "alpha", "lambda"]


@dataclass
class SeedResult:
    seed: int
    status: str = "ok"                 # ok | failed
    return_mean: float | None = None
    return_std: float | None = None
    margin: float | None = None
    stage1: dict = field(default_factory=dict)
    stage2: dict = field(default_factory=dict)
    error: str | None = None


@dataclass
class MetricsReport:
    run_id: str
    env: str
    dataset_combo: str
    algo: str
    seeds: list
    results: list                       # list[SeedResult]
    aggregate_mean: float | None
    aggregate_std: float | None
    margin_c: float | None
    alpha: float
    lam: float
    dataset_hashes: dict
    config_echo: str
    format_version: int = FORMAT_VERSION
    timing_seconds: float = 0.0

    def deterministic_payload(self) -> dict:
        d = asdict(self)
        d.pop("timing_seconds")
        return d

    def deterministic_bytes(self) -> bytes:
        return json.dumps(self.deterministic_payload(), sort_keys=True,
                          allow_nan=True).encode()


def aggregate_from_results(results) -> tuple:
    """(mean, std) across the per-seed return means of successful seeds."""
    vals = [r.return_mean for r in results
            if r.status == "ok" and r.return_mean is not None]
    if not vals:
        return None, None
    return float(np.mean(vals)), float(np.std(vals))


def make_run_id(env: str, combo: str, algo: str, config_echo: str) -> str:
    digest = hashlib.sha256(config_echo.encode()).hexdigest()[:8]
    return f"{env}-{combo}-{algo}-{digest}"


def write_report(report: MetricsReport, out_dir: str) -> tuple:
    os.makedirs(out_dir, exist_ok=True)
    json_path = os.path.join(out_dir, "report.json")
    csv_path = os.path.join(out_dir, "report.csv")
    payload = {"results": report.deterministic_payload(),
               "timing": {"seconds": report.timing_seconds}}
    with open(json_path, "w") as fh:
        json.dump(payload, fh, sort_keys=True, indent=1)
        fh.write("\n")
    with open(csv_path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(CSV_COLUMNS)
        for r in report.results:
            if r.status != "ok":
                continue
            writer.writerow([report.run_id, report.env, report.dataset_combo,
                             report.algo, r.seed,
                             f"{r.return_mean:.17g}", f"{r.return_std:.17g}",
                             "" if report.margin_c is None else report.margin_c,
                             report.alpha, report.lam])
    return json_path, csv_path


def read_report(json_path: str) -> dict:
    with open(json_path) as fh:
        payload = json.load(fh)
    if "results" not in payload:
        raise FormatError(f"{json_path}: missing results payload")
    return payload


def read_csv_rows(csv_path: str) -> list:
    with open(csv_path, newline="") as fh:
        reader = csv.DictReader(fh)
        if reader.fieldnames != CSV_COLUMNS:
            raise FormatError(f"{csv_path}: unexpected columns {reader.fieldnames}")
        return list(reader)


def aggregates_from_csv(csv_path: str) -> tuple:
    rows = read_csv_rows(csv_path)
    vals = [float(r["return_mean"]) for r in rows]
    if not vals:
        return None, None
    return float(np.mean(vals)), float(np.std(vals))
