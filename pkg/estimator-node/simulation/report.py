"""
Emission of a SimulationSummary as JSON and CSV tables.

Files written to the output directory (schema in docs/output_schema.md):
  summary.json                 full summary, sorted keys
  estimates_by_iteration.csv   scheme,iteration,coordinate,<stats>
  defficiency_stats.csv        scheme,iteration,<stats>
  comparators.csv              estimator,coordinate,<stats>
  raw_estimates.csv            replication,estimator,iteration,d_efficiency,x1..xp (emit_raw only)
"""

import csv
import json
import logging
import os
from typing import Dict, List

from simulation.summary import CellStats, SimulationSummary

logger = logging.getLogger("report")

SUMMARY_FILE = "summary.json"
ESTIMATES_FILE = "estimates_by_iteration.csv"
DEFFICIENCY_FILE = "defficiency_stats.csv"
COMPARATORS_FILE = "comparators.csv"
RAW_FILE = "raw_estimates.csv"

ESTIMATES_HEADER = ["scheme", "iteration", "coordinate", *CellStats.FIELDS]
DEFFICIENCY_HEADER = ["scheme", "iteration", *CellStats.FIELDS]
COMPARATORS_HEADER = ["estimator", "coordinate", *CellStats.FIELDS]


def _fmt(value: float) -> str:
    return repr(float(value))


def _stats_row(c: CellStats) -> List[str]:
    return [_fmt(getattr(c, k)) for k in CellStats.FIELDS]


def summary_json(summary: SimulationSummary) -> str:
    return json.dumps(summary.to_dict(), indent=2, sort_keys=True) + "\n"


def _write_csv(path: str, header: List[str], rows: List[List[str]]) -> None:
    with open(path, "w", newline="") as f:
        writer = csv.writer(f, lineterminator="\n")
        writer.writerow(header)
        writer.writerows(rows)
    logger.info("Wrote %d rows to %s", len(rows), path)


def write_summary(summary: SimulationSummary, out_dir: str) -> Dict[str, str]:
    """Write every table; returns the paths keyed by file name."""
    os.makedirs(out_dir, exist_ok=True)
    paths = {}

    path = os.path.join(out_dir, SUMMARY_FILE)
    with open(path, "w") as f:
        f.write(summary_json(summary))
    paths[SUMMARY_FILE] = path

    rows = []
    for label, iterations in summary.estimates.items():
        for r, coords in enumerate(iterations, start=1):
            for j, c in enumerate(coords, start=1):
                rows.append([label, str(r), str(j), *_stats_row(c)])
    paths[ESTIMATES_FILE] = os.path.join(out_dir, ESTIMATES_FILE)
    _write_csv(paths[ESTIMATES_FILE], ESTIMATES_HEADER, rows)

    rows = [[label, str(r), *_stats_row(c)]
            for label, cells in summary.d_efficiency.items()
            for r, c in enumerate(cells, start=1)]
    paths[DEFFICIENCY_FILE] = os.path.join(out_dir, DEFFICIENCY_FILE)
    _write_csv(paths[DEFFICIENCY_FILE], DEFFICIENCY_HEADER, rows)

    rows = [[name, str(j), *_stats_row(c)]
            for name, coords in summary.comparators.items()
            for j, c in enumerate(coords, start=1)]
    paths[COMPARATORS_FILE] = os.path.join(out_dir, COMPARATORS_FILE)
    _write_csv(paths[COMPARATORS_FILE], COMPARATORS_HEADER, rows)

    if summary.config.get("emit_raw"):
        paths[RAW_FILE] = os.path.join(out_dir, RAW_FILE)
        _write_raw(summary, paths[RAW_FILE])

    return paths


def _write_raw(summary: SimulationSummary, path: str) -> None:
    p = len(summary.config["distribution"]["theta"])
    header = ["replication", "estimator", "iteration", "d_efficiency", *[f"x{j}" for j in range(1, p + 1)]]
    rows = []
    for record in summary.records:
        if record.failed:
            continue
        for label, centers in record.centers.items():
            for r, center in enumerate(centers):
                d = _fmt(record.d_efficiency[label][r - 1]) if r > 0 else ""
                rows.append([str(record.index), label, str(r), d, *[_fmt(v) for v in center]])
        for name, center in record.comparators.items():
            rows.append([str(record.index), name, "", "", *[_fmt(v) for v in center]])
    _write_csv(path, header, rows)


def read_table(path: str) -> List[Dict[str, str]]:
    """Read an emitted CSV table back as a list of row dicts."""
    with open(path, "r", newline="") as f:
        return list(csv.DictReader(f))


def digest(summary: SimulationSummary) -> str:
    """One-line description of a finished campaign."""
    parts = [f"{summary.config.get('name', 'campaign')}: {summary.used}/{summary.replications} replications"]
    for label, iterations in summary.estimates.items():
        final = ", ".join(f"{c.mean:.4f}" for c in iterations[-1])
        med_d = summary.d_efficiency[label][-1].median
        parts.append(f"{label} r={len(iterations)} mean=({final}) medianD={med_d:.4f}")
    return "; ".join(parts)
