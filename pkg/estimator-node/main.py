#!/usr/bin/env python3
"""
Entry point for the estimator node.

Subcommands:
  - estimate   iterate an L-estimator on a CSV sample
  - simulate   run a Monte-Carlo campaign from a JSON config
  - ellipses   emit Mahalanobis contour data for a bivariate sample
  - generate   write a seeded sample from the bundled normal / t model
"""

import argparse
import json
import logging
import os
import sys

sys.path.insert(0, os.path.dirname(os.path.abspath(__file__)))

from cli import commands


logger = logging.getLogger("estimator-node")

# Default configuration path
DEFAULT_CONFIG_PATH = os.path.join(os.path.dirname(os.path.abspath(__file__)), "config.json")


def load_node_config(config_path: str) -> dict:
    """Read config.json; a missing default file means built-in defaults."""
    if not os.path.exists(config_path):
        if config_path != DEFAULT_CONFIG_PATH:
            raise FileNotFoundError(config_path)
        return {}
    with open(config_path, "r") as f:
        return json.load(f)


def setup_logging(cfg: dict, verbose: bool = False) -> None:
    log_cfg = cfg.get("logging", {})
    level = logging.DEBUG if verbose else getattr(logging, str(log_cfg.get("level", "INFO")).upper(), logging.INFO)
    handlers = [logging.StreamHandler(sys.stderr)]
    log_file = log_cfg.get("log_file")
    if log_file:
        os.makedirs(os.path.dirname(os.path.abspath(log_file)), exist_ok=True)
        handlers.append(logging.FileHandler(log_file))
    logging.basicConfig(level=level, handlers=handlers,
                        format="%(asctime)s %(levelname)s %(name)s: %(message)s", force=True)


def _scores(text: str):
    return [float(v) for v in text.split(",") if v.strip()]


def build_parser(cfg: dict) -> argparse.ArgumentParser:
    est = cfg.get("estimator", {})
    ell = cfg.get("ellipses", {})

    parser = argparse.ArgumentParser(description="Affine-equivariant L-estimators of multivariate location")
    parser.add_argument("--config", default=DEFAULT_CONFIG_PATH, help="Path to estimator-node/config.json")
    parser.add_argument("--verbose", action="store_true", help="Log at DEBUG level")
    sub = parser.add_subparsers(dest="command", required=True)

    def scheme_flags(p, with_scheme=True):
        if with_scheme:
            p.add_argument("--scheme", choices=commands.SCHEMES, default=est.get("scheme", "l1"))
            p.add_argument("--k", type=int, default=est.get("k", 3), help="order of the lk scheme")
            p.add_argument("--lambda", dest="lam", type=float, default=est.get("lambda", 0.5))
            p.add_argument("--scores", type=_scores, default=None, help="comma-separated nonincreasing scores, zero-padded up to n")
            p.add_argument("--tol", type=float, default=est.get("tol", 0.0))
            p.add_argument("--initial", choices=("mean", "nearest"), default=est.get("initial", "mean"))
        p.add_argument("--kn", type=int, default=est.get("kn", 15))
        p.add_argument("--iterations", type=int, default=est.get("iterations", 10))

    p_est = sub.add_parser("estimate", help="Estimate location from a CSV file")
    p_est.add_argument("input")
    scheme_flags(p_est)
    p_est.add_argument("--format", choices=commands.FORMATS, default="json")

    p_sim = sub.add_parser("simulate", help="Run a simulation campaign")
    p_sim.add_argument("config_file")
    p_sim.add_argument("--out", required=True, help="output directory")
    p_sim.add_argument("--replications", type=int, default=None, help="override the campaign's count")
    p_sim.add_argument("--seed", type=int, default=None, help="override master_seed")
    p_sim.add_argument("--threads", type=int, default=None, help="0 = auto; default from AFFINEST_THREADS")

    p_ell = sub.add_parser("ellipses", help="Emit Mahalanobis contour data (p = 2)")
    p_ell.add_argument("input")
    scheme_flags(p_ell, with_scheme=False)
    p_ell.add_argument("--estimators", default=",".join(ell.get("estimators", commands.ELLIPSE_ESTIMATORS)),
                       help="comma-separated subset of mean,l1,l2")
    p_ell.add_argument("--every", type=int, default=ell.get("every", 1))
    p_ell.add_argument("--points", type=int, default=ell.get("points", 0), help="boundary vertices per contour")
    p_ell.add_argument("--format", choices=("csv", "json"), default="csv")
    p_ell.add_argument("--out", default=None, help="output directory")

    p_gen = sub.add_parser("generate", help="Write a seeded sample as CSV")
    p_gen.add_argument("output")
    p_gen.add_argument("--n", type=int, default=100)
    p_gen.add_argument("--p", type=int, default=3)
    p_gen.add_argument("--kind", choices=commands.KINDS, default="normal")
    p_gen.add_argument("--df", type=float, default=3.0)
    p_gen.add_argument("--seed", type=int, required=True)

    return parser


def main(argv=None) -> int:
    """CLI entrypoint for the estimator node."""
    argv = sys.argv[1:] if argv is None else argv

    # --config must be known before the parser defaults can be filled in
    pre = argparse.ArgumentParser(add_help=False)
    pre.add_argument("--config", default=DEFAULT_CONFIG_PATH)
    pre.add_argument("--verbose", action="store_true")
    known, _ = pre.parse_known_args(argv)
    try:
        cfg = load_node_config(known.config)
    except (OSError, json.JSONDecodeError) as e:
        print(f"error: cannot load config {known.config}: {e}", file=sys.stderr)
        return commands.EXIT_PARSE
    setup_logging(cfg, known.verbose)

    args = build_parser(cfg).parse_args(argv)
    # precedence: --threads, then AFFINEST_THREADS, then config.json
    threads = getattr(args, "threads", None)
    if threads is None and "AFFINEST_THREADS" not in os.environ:
        threads = cfg.get("threads")

    if args.command == "estimate":
        return commands.cmd_estimate(args.input, args.scheme, args.kn, args.k, args.lam, args.scores,
                                     args.iterations, args.tol, args.format, args.initial)
    if args.command == "simulate":
        return commands.cmd_simulate(args.config_file, args.out, threads, args.replications, args.seed)
    if args.command == "ellipses":
        estimators = [e.strip() for e in args.estimators.split(",") if e.strip()]
        unknown = set(estimators) - set(commands.ELLIPSE_ESTIMATORS)
        if unknown:
            print(f"error: unknown estimators {sorted(unknown)}", file=sys.stderr)
            return commands.EXIT_PARSE
        return commands.cmd_ellipses(args.input, estimators, args.kn, args.iterations, args.every,
                                     args.points, args.format, args.out)
    if args.command == "generate":
        return commands.cmd_generate(args.output, args.n, args.seed, args.kind, args.p, args.df)
    return commands.EXIT_PARSE


if __name__ == "__main__":
    sys.exit(main())
