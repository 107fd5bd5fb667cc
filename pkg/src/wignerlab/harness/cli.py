"""wigner-lab command line: run, list, check."""
import argparse
import json
import sys
import tempfile

from wignerlab.harness.config import ConfigError, from_dict, load_config
from wignerlab.harness.experiments import REGISTRY
from wignerlab.harness.runner import run_experiment

EXIT_OK, EXIT_ERROR, EXIT_THRESHOLD = 0, 1, 2

CHECK_CONFIG = {
    "experiment": "identity-suite",
    "n": 64,
    "trials": 50,
    "kappa": 0.5,
    "eta_spec": {"c": 1.0, "a": 0.0},
    "dist": {"off_diag": "gaussian", "diag": "gaussian"},
    "seed": 0,
    "out_dir": "",
    "params": {"z": [0.3, 0.1]},
}


def _u64(text):
    v = int(text, 0)
    if not 0 <= v < 2**64:
        raise argparse.ArgumentTypeError("seed must be an unsigned 64-bit integer")
    return v


def _range(text):
    lo, _, hi = text.partition(":")
    return int(lo), int(hi)


def build_parser():
    p = argparse.ArgumentParser(prog="wigner-lab", description="Wigner-matrix spectral experiments")
    sub = p.add_subparsers(dest="command", required=True)
    run = sub.add_parser("run", help="run an experiment from a JSON config")
    run.add_argument("--config", required=True)
    run.add_argument("--seed", type=_u64)
    run.add_argument("--threads", type=int)
    run.add_argument("--out")
    run.add_argument("--trials", type=_range, metavar="LO:HI", help="run only trials LO..HI-1")
    sub.add_parser("list", help="list experiments")
    chk = sub.add_parser("check", help="run the fast identity suite")
    chk.add_argument("--out")
    chk.add_argument("--threads", type=int)
    return p


def _report(report, out):
    agg = report.science["aggregate"]
    print(json.dumps(agg, sort_keys=True, indent=2), file=out)
    for c in report.science["checks"]:
        mark = "PASS" if c["passed"] else "FAIL"
        print(f"{mark} {c['name']}: {c['value']} {c['op']} {c['threshold']}", file=out)
    return EXIT_OK if report.passed else EXIT_THRESHOLD


def main(argv=None):
    args = build_parser().parse_args(argv)
    try:
        if args.command == "list":
            for name, (_, _, desc) in REGISTRY.items():
                print(f"{name:18s} {desc}")
            return EXIT_OK
        if args.command == "check":
            raw = dict(CHECK_CONFIG)
            raw["out_dir"] = args.out or tempfile.mkdtemp(prefix="wigner-lab-check-")
            if args.threads:
                raw["threads"] = args.threads
            report = run_experiment(from_dict(raw))
            print(f"report: {raw['out_dir']}/report.json")
            return _report(report, sys.stdout)
        cfg = load_config(args.config).with_overrides(seed=args.seed, threads=args.threads, out_dir=args.out)
        report = run_experiment(cfg, trial_range=args.trials)
        print(f"report: {cfg.out_dir}/report.json")
        return _report(report, sys.stdout)
    except (ConfigError, OSError, ValueError) as exc:
        print(f"wigner-lab: error: {exc}", file=sys.stderr)
        return EXIT_ERROR


if __name__ == "__main__":
    sys.exit(main())
