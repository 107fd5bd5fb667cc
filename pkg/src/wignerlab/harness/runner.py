"""Deterministic, thread-parallel execution of experiment trials."""
import json
import os
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from datetime import datetime, timezone

from wignerlab._io import write_csv
from wignerlab.harness.experiments import REGISTRY, clean
from wignerlab.rng import trial_seed


@dataclass
class ExperimentReport:
    science: dict
    metadata: dict

    @property
    def passed(self):
        return all(c["passed"] for c in self.science["checks"])

    @property
    def records(self):
        return self.science["trials"]

    def science_json(self):
        return json.dumps(self.science, sort_keys=True, indent=2, allow_nan=False) + "\n"

    def to_json(self):
        return json.dumps({"science": self.science, "metadata": self.metadata}, sort_keys=True, indent=2, allow_nan=False) + "\n"


def _run_trial(cfg, t, tables):
    trial, _, _ = REGISTRY[cfg.experiment]
    seed = trial_seed(cfg.seed, t)
    start = time.perf_counter()
    rec, out = trial(cfg, t, seed, tables)
    return t, seed, rec, out, time.perf_counter() - start


def _summarize(cfg, records):
    _, agg, _ = REGISTRY[cfg.experiment]
    summary, checks = agg(cfg, records)
    return clean(summary), [c.as_dict() for c in checks]


def run_experiment(cfg, trial_range=None, write=True, threads=None):
    """Run trials ``trial_range`` (default: all) and build the report.

    Trial t always uses ``trial_seed(cfg.seed, t)``; results are sorted by
    trial index before aggregation, so the science block does not depend on
    the thread count or scheduling. CSV tables come from the first trial run.
    """
    lo, hi = trial_range if trial_range is not None else (0, cfg.trials)
    if not 0 <= lo < hi <= cfg.trials:
        raise ValueError(f"trial range [{lo}, {hi}) outside [0, {cfg.trials})")
    threads = threads or cfg.threads or 1
    if write:
        os.makedirs(cfg.out_dir, exist_ok=True)
        if not os.access(cfg.out_dir, os.W_OK):
            raise PermissionError(f"output directory {cfg.out_dir} is not writable")
    started = datetime.now(timezone.utc)
    wall = time.perf_counter()
    idx = range(lo, hi)
    if threads > 1 and len(idx) > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            results = list(pool.map(lambda t: _run_trial(cfg, t, t == lo), idx))
    else:
        results = [_run_trial(cfg, t, t == lo) for t in idx]
    results.sort(key=lambda r: r[0])
    records = [clean({"trial": t, "seed": s, **rec}) for t, s, rec, _, _ in results]
    summary, checks = _summarize(cfg, records)
    science = {
        "experiment": cfg.experiment,
        "config": clean(cfg.science_dict()),
        "config_hash": cfg.hash(),
        "trial_range": [lo, hi],
        "trials": records,
        "aggregate": summary,
        "checks": checks,
        "passed": all(c["passed"] for c in checks),
    }
    metadata = {
        "started": started.isoformat(),
        "finished": datetime.now(timezone.utc).isoformat(),
        "wall_seconds": time.perf_counter() - wall,
        "trial_seconds": {str(t): dt for t, _, _, _, dt in results},
        "threads": threads,
        "out_dir": cfg.out_dir,
    }
    report = ExperimentReport(science, metadata)
    if write:
        with open(os.path.join(cfg.out_dir, "report.json"), "w", encoding="utf-8", newline="\n") as fh:
            fh.write(report.to_json())
        for name, (header, rows) in results[0][3].items():
            write_csv(os.path.join(cfg.out_dir, name), header, rows)
    return report


def aggregate(reports, cfg=None):
    """Merge trial records of several reports of one experiment and re-aggregate.

    The merge is a union keyed by trial index (duplicates must agree), so the
    result is associative and independent of report order.
    """
    reports = list(reports)
    if not reports:
        raise ValueError("nothing to aggregate")
    kinds = {r.science["experiment"] for r in reports}
    if len(kinds) != 1:
        raise ValueError(f"cannot aggregate mixed experiment types {sorted(kinds)}")
    hashes = {r.science["config_hash"] for r in reports}
    if len(hashes) != 1:
        raise ValueError("reports come from different configurations")
    merged = {}
    for r in reports:
        for rec in r.records:
            prev = merged.setdefault(rec["trial"], rec)
            if prev != rec:
                raise ValueError(f"conflicting records for trial {rec['trial']}")
    records = [merged[t] for t in sorted(merged)]
    if cfg is None:
        from wignerlab.harness.config import from_dict

        raw = dict(reports[0].science["config"])
        raw.update(out_dir=".", threads=1)
        cfg = from_dict(raw)
    summary, checks = _summarize(cfg, records)
    return {
        "experiment": kinds.pop(),
        "config_hash": hashes.pop(),
        "trials": len(records),
        "aggregate": summary,
        "checks": checks,
        "passed": all(c["passed"] for c in checks),
    }


__all__ = ["ExperimentReport", "run_experiment", "aggregate"]
