"""``airtaxi`` command line.

Exit status: 0 on success, 1 on a runtime failure, 2 on a bad config or
arguments. Failures print one JSON object on stderr.
"""
import argparse
import json
import logging
import sys

from threadpoolctl import threadpool_limits

from .errors import SpecError
from .config import load_config
from .pipeline import STAGES

COMMANDS = {
    "generate": "write a synthetic trips/weather dataset with a manifest",
    "prepare": "cluster origins, aggregate, join weather, clean, bin and encode",
    "train": "grid-search each learner by k-fold CV and fit the final models",
    "evaluate": "score the models on the test split (metrics.csv, timing.csv)",
    "importance": "permutation importance for the best (or configured) learners",
    "report": "write summary.md and demand histograms",
    "all": "run every stage in order",
}


def _common(default):
    # options are accepted before or after the subcommand; the subcommand copy
    # uses SUPPRESS so it does not overwrite a value given before it
    common = argparse.ArgumentParser(add_help=False, argument_default=default)
    common.add_argument("--config", help="YAML run configuration")
    common.add_argument("--seed", type=int, help="master seed")
    common.add_argument("--jobs", type=int, help="worker processes for the grid search")
    common.add_argument("--output", help="output directory")
    common.add_argument("--k", type=int, nargs="+", dest="k_values", metavar="K",
                        help="cluster counts to run")
    common.add_argument("--learners", nargs="+", help="subset of lr ann rf gb")
    common.add_argument("--trips", help="trips CSV (default: <output>/data/trips.csv)")
    common.add_argument("--weather", help="weather CSV (default: <output>/data/weather.csv)")
    common.add_argument("-v", "--verbose", action="store_true", default=default)
    return common


def build_parser():
    parser = argparse.ArgumentParser(prog="airtaxi", description="Air-taxi demand classification.",
                                     parents=[_common(None)])
    sub = parser.add_subparsers(dest="command", required=True)
    for name, help_text in COMMANDS.items():
        sub.add_parser(name, help=help_text, parents=[_common(argparse.SUPPRESS)])
    return parser


def _fail(kind, message, code):
    sys.stderr.write(json.dumps({"error": kind, "message": str(message)}) + "\n")
    return code


def main(argv=None):
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return 0 if exc.code == 0 else 2
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(message)s", stream=sys.stderr)
    overrides = {k: getattr(args, k, None)
                 for k in ("seed", "jobs", "output", "k_values", "trips", "weather", "learners")}
    try:
        cfg = load_config(args.config, **overrides)
    except SpecError as exc:
        return _fail("config", exc, 2)
    stages = list(STAGES) if args.command == "all" else [args.command]
    try:
        with threadpool_limits(1):
            for stage in stages:
                STAGES[stage](cfg)
    except SpecError as exc:
        return _fail("config", exc, 2)
    except Exception as exc:          # reported as one JSON line, not a traceback
        logging.getLogger("airtaxi").debug("failure", exc_info=True)
        return _fail(type(exc).__name__, exc, 1)
    return 0


if __name__ == "__main__":
    sys.exit(main())
