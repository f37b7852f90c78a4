"""
Subcommand implementations. Each returns a process exit code.

Exit codes: 0 ok, 2 parse/config/usage error, 3 degenerate scatter,
4 too many failed replications, 5 wrong dimension for `ellipses`.
"""

import csv
import io
import json
import logging
import os
import sys
from typing import Dict, List, Optional, Sequence, TextIO

import numpy as np

from cli.csv_io import CsvParseError, fmt, read_matrix, write_matrix
from estimators.l_estimator import DegenerateScatter, d_efficiency_from_log_dets, iterate, mean_state
from estimators.state import EstimatorState, InvalidSample, Sample
from estimators.weights import (
    CustomScores,
    GeneralLk,
    InvalidScheme,
    Poisson,
    RankWeightedL2,
    TrimmedL1,
    WeightScheme,
)
from linalg.spd import spd_factorize
from sampling.distributions import NORMAL, STUDENT_T, bundled_spec, sample
from simulation.config import ConfigInvalid, load_config
from simulation.harness import TooManyFailures, run_simulation
from simulation.report import digest, write_summary

logger = logging.getLogger("cli")

EXIT_OK = 0
EXIT_PARSE = 2
EXIT_DEGENERATE = 3
EXIT_FAILURES = 4
EXIT_DIMENSION = 5

FORMATS = ("json", "csv", "plain")
SCHEMES = ("l1", "l2", "lk", "poisson", "scores")
KINDS = (NORMAL, STUDENT_T)
ELLIPSE_ESTIMATORS = ("mean", "l1", "l2")
ELLIPSES_FILE = "ellipses.csv"
ELLIPSE_POINTS_FILE = "ellipse_points.csv"


def build_scheme(name: str, kn: int, k: int = 2, lam: float = 0.5,
                 scores: Optional[Sequence[float]] = None, n: Optional[int] = None) -> WeightScheme:
    """Map --scheme and its parameters to a weight scheme.

    With n given, --scores shorter than n are padded with trailing zeros
    (a_j = 0 for j beyond the list); more than n scores are rejected.
    """
    if name == "l1":
        return TrimmedL1(kn=kn)
    if name == "l2":
        return RankWeightedL2(kn=kn)
    if name == "lk":
        return GeneralLk(kn=kn, k=k)
    if name == "poisson":
        return Poisson(lam=lam)
    if name == "scores":
        if not scores:
            raise InvalidScheme("--scheme scores needs --scores")
        scores = tuple(float(a) for a in scores)
        if n is not None:
            if len(scores) > n:
                raise InvalidScheme(f"{len(scores)} scores given for a sample of n={n}")
            scores = scores + (0.0,) * (n - len(scores))
        return CustomScores(scores=scores)
    raise InvalidScheme(f"unknown scheme {name!r}")


# --- estimate ---

def estimate_report(data: np.ndarray, scheme: WeightScheme, iterations: int, tol: float,
                    initial: str = "mean") -> Dict:
    s = Sample(data)
    trace = iterate(s, scheme, iterations, tol, initial)
    final = trace.final
    # step 0 is the initializer itself; it is only 1 when that is the mean
    start_d = d_efficiency_from_log_dets(trace.states[0].log_det, mean_state(s).log_det, s.p)
    return {
        "n": s.n,
        "p": s.p,
        "scheme": scheme.to_dict(),
        "initial": initial,
        "converged_at": trace.converged_at,
        "iterations": [
            {"step": st.step,
             "center": st.center.tolist(),
             "d_efficiency": trace.d_efficiency[st.step - 1] if st.step > 0 else start_d}
            for st in trace.states
        ],
        "final": {
            "step": final.step,
            "distances": final.distances.tolist(),
            "ranks": final.ranks.tolist(),
        },
    }


def _render_estimate(report: Dict, fmt_name: str) -> str:
    if fmt_name == "json":
        return json.dumps(report, indent=2) + "\n"

    p = report["p"]
    if fmt_name == "csv":
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(["step", "d_efficiency", *[f"x{j}" for j in range(1, p + 1)]])
        for it in report["iterations"]:
            writer.writerow([it["step"], fmt(it["d_efficiency"]), *[fmt(v) for v in it["center"]]])
        buf.write("\n")
        writer.writerow(["observation", "distance", "rank"])
        for i, (d, r) in enumerate(zip(report["final"]["distances"], report["final"]["ranks"]), start=1):
            writer.writerow([i, fmt(d), r])
        return buf.getvalue()

    lines = [f"n={report['n']} p={p} scheme={report['scheme']} initial={report['initial']}"]
    lines.append(f"{'step':>4}  {'D-eff':>10}  center")
    for it in report["iterations"]:
        center = "  ".join(f"{v:12.6f}" for v in it["center"])
        lines.append(f"{it['step']:>4}  {it['d_efficiency']:>10.6f}  {center}")
    if report["converged_at"] is not None:
        lines.append(f"converged at step {report['converged_at']}")
    lines.append(f"{'obs':>4}  {'distance':>12}  {'rank':>5}")
    for i, (d, r) in enumerate(zip(report["final"]["distances"], report["final"]["ranks"]), start=1):
        lines.append(f"{i:>4}  {d:>12.8f}  {r:>5}")
    return "\n".join(lines) + "\n"


def cmd_estimate(input_path: str, scheme_name: str, kn: int, k: int = 2, lam: float = 0.5,
                 scores: Optional[Sequence[float]] = None, iterations: int = 10, tol: float = 0.0,
                 fmt_name: str = "json", initial: str = "mean", out: TextIO = None) -> int:
    out = out or sys.stdout
    try:
        data, _ = read_matrix(input_path)
        scheme = build_scheme(scheme_name, kn, k, lam, scores, n=data.shape[0])
        report = estimate_report(data, scheme, iterations, tol, initial)
    except CsvParseError as e:
        logger.error("Cannot parse %s: %s", input_path, e)
        print(f"error: {input_path}: {e}", file=sys.stderr)
        return EXIT_PARSE
    except (InvalidScheme, InvalidSample, ValueError) as e:
        logger.error("Invalid input: %s", e)
        print(f"error: {e}", file=sys.stderr)
        return EXIT_PARSE
    except DegenerateScatter as e:
        logger.error("Degenerate scatter: %s", e)
        print(f"error: {e}", file=sys.stderr)
        return EXIT_DEGENERATE
    out.write(_render_estimate(report, fmt_name))
    return EXIT_OK


# --- simulate ---

def cmd_simulate(config_path: str, out_dir: str, threads: Optional[int] = None,
                 replications: Optional[int] = None, seed: Optional[int] = None,
                 out: TextIO = None) -> int:
    out = out or sys.stdout
    try:
        cfg = load_config(config_path)
        if replications is not None or seed is not None:
            obj = cfg.to_dict()
            if replications is not None:
                obj["replications"] = replications
            if seed is not None:
                obj["master_seed"] = seed
            cfg = type(cfg).from_dict(obj)
    except ConfigInvalid as e:
        logger.error("Invalid configuration %s: %s", config_path, e)
        print(f"error: {config_path}: {e}", file=sys.stderr)
        return EXIT_PARSE

    try:
        summary = run_simulation(cfg, threads)
    except TooManyFailures as e:
        logger.error("Campaign '%s' failed: %s", cfg.name, e)
        if e.summary is not None:
            write_summary(e.summary, out_dir)
        print(f"error: {e}", file=sys.stderr)
        return EXIT_FAILURES

    write_summary(summary, out_dir)
    out.write(digest(summary) + "\n")
    return EXIT_OK


# --- ellipses ---

def ellipse_points(center, shape, level: float, m: int = 64) -> np.ndarray:
    """m boundary points of {x : (x - c)^T shape^{-1} (x - c) = level}."""
    lower = spd_factorize(shape).lower
    phi = np.linspace(0.0, 2.0 * np.pi, m, endpoint=False)
    circle = np.vstack([np.cos(phi), np.sin(phi)])
    return np.asarray(center, dtype=float) + np.sqrt(max(level, 0.0)) * (lower @ circle).T


def ellipse_records(s: Sample, estimators: Sequence[str], kn: int, iterations: int,
                    every: int = 1) -> List[Dict]:
    """One contour per kept observation for each requested center.

    The shape matrix is the estimator's raw scatter, under which the levels
    are the distances d_i and sum to p. Contours are kept for ranks
    1, 1 + every, 1 + 2 * every, ...
    """
    if every < 1:
        raise ValueError(f"--every must be >= 1, got {every}")
    states: Dict[str, EstimatorState] = {}
    for name in estimators:
        if name == "mean":
            states[name] = mean_state(s)
        else:
            scheme = build_scheme(name, kn)
            states[name] = iterate(s, scheme, iterations).final

    records = []
    for name, st in states.items():
        order = np.argsort(st.ranks, kind="stable")
        for idx in order[::every]:
            records.append({
                "estimator": name,
                "observation": int(idx) + 1,
                "rank": int(st.ranks[idx]),
                "level": float(st.distances[idx]),
                "center": st.center.tolist(),
                "shape": st.scatter.tolist(),
            })
    return records


def _write_ellipses(records: List[Dict], handle: TextIO) -> None:
    writer = csv.writer(handle, lineterminator="\n")
    writer.writerow(["estimator", "observation", "rank", "level",
                     "center_x", "center_y", "s11", "s12", "s22"])
    for r in records:
        (s11, s12), (_, s22) = r["shape"]
        writer.writerow([r["estimator"], r["observation"], r["rank"], fmt(r["level"]),
                         fmt(r["center"][0]), fmt(r["center"][1]), fmt(s11), fmt(s12), fmt(s22)])


def _write_points(records: List[Dict], m: int, handle: TextIO) -> None:
    writer = csv.writer(handle, lineterminator="\n")
    writer.writerow(["estimator", "observation", "vertex", "x", "y"])
    for r in records:
        pts = ellipse_points(r["center"], r["shape"], r["level"], m)
        for v, (x, y) in enumerate(pts):
            writer.writerow([r["estimator"], r["observation"], v, fmt(x), fmt(y)])


def cmd_ellipses(input_path: str, estimators: Sequence[str] = ELLIPSE_ESTIMATORS, kn: int = 15,
                 iterations: int = 10, every: int = 1, points: int = 0, fmt_name: str = "csv",
                 out_dir: Optional[str] = None, out: TextIO = None) -> int:
    out = out or sys.stdout
    try:
        data, _ = read_matrix(input_path)
    except CsvParseError as e:
        logger.error("Cannot parse %s: %s", input_path, e)
        print(f"error: {input_path}: {e}", file=sys.stderr)
        return EXIT_PARSE
    if data.shape[1] != 2:
        logger.error("ellipses needs p = 2, got p = %d", data.shape[1])
        print(f"error: ellipses needs 2 columns, found {data.shape[1]}", file=sys.stderr)
        return EXIT_DIMENSION

    try:
        records = ellipse_records(Sample(data), estimators, kn, iterations, every)
    except DegenerateScatter as e:
        logger.error("Degenerate scatter: %s", e)
        print(f"error: {e}", file=sys.stderr)
        return EXIT_DEGENERATE
    except (InvalidScheme, InvalidSample, ValueError) as e:
        logger.error("Invalid input: %s", e)
        print(f"error: {e}", file=sys.stderr)
        return EXIT_PARSE

    if out_dir:
        os.makedirs(out_dir, exist_ok=True)
        path = os.path.join(out_dir, ELLIPSES_FILE)
        with open(path, "w", newline="") as f:
            _write_ellipses(records, f)
        logger.info("Wrote %d contours to %s", len(records), path)
        if points > 0:
            with open(os.path.join(out_dir, ELLIPSE_POINTS_FILE), "w", newline="") as f:
                _write_points(records, points, f)
    elif fmt_name == "json":
        out.write(json.dumps(records, indent=2) + "\n")
    else:
        _write_ellipses(records, out)
    return EXIT_OK


# --- generate ---

def cmd_generate(out_path: str, n: int, seed: int, kind: str = NORMAL, p: int = 3,
                 df: float = 3.0) -> int:
    """Write a sample from the bundled normal / t_3 model as CSV."""
    try:
        spec = bundled_spec(kind, p, df)
        s = sample(spec, n, seed)
    except ValueError as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_PARSE
    write_matrix(out_path, s.data, header=[f"x{j}" for j in range(1, s.p + 1)])
    logger.info("Wrote %d x %d %s sample to %s", s.n, s.p, kind, out_path)
    return EXIT_OK

