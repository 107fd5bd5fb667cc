"""Experiment configuration: JSON ingestion, validation, and the config hash."""
import hashlib
import json
import math
import os
import warnings
from dataclasses import dataclass, field

from wignerlab.ensemble import KINDS, EntryDistribution

EXPERIMENTS = (
    "semicircle-sweep",
    "counting",
    "delocalization",
    "xk-concentration",
    "bootstrap",
    "identity-suite",
    "projection-lemma",
    "khintchine",
)
REQUIRED = ("experiment", "n", "trials", "kappa", "eta_spec", "dist", "seed", "out_dir")
LOG8_PRESET = {"c": 1.0, "a": 8.0}


class ConfigError(ValueError):
    pass


class EtaClampWarning(UserWarning):
    pass


def _dist(entry, default_variance):
    if isinstance(entry, str):
        entry = {"kind": entry}
    if not isinstance(entry, dict) or entry.get("kind") not in KINDS:
        raise ConfigError(f"bad distribution entry {entry!r}; kinds are {KINDS}")
    return {"kind": entry["kind"], "variance": float(entry.get("variance", default_variance))}


@dataclass(frozen=True)
class ExperimentConfig:
    experiment: str
    n: int
    trials: int
    kappa: float
    eta_spec: dict
    dist: dict
    seed: int
    out_dir: str
    threads: int = 0
    params: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.experiment not in EXPERIMENTS:
            raise ConfigError(f"unknown experiment {self.experiment!r}")
        if not isinstance(self.n, int) or self.n < 1:
            raise ConfigError("n must be a positive integer")
        if not isinstance(self.trials, int) or self.trials < 1:
            raise ConfigError("trials must be >= 1")
        if not 0 < self.kappa < 2:
            raise ConfigError("kappa must lie in (0, 2)")
        if not self.eta_spec.get("c", 0) > 0:
            raise ConfigError("eta_spec.c must be positive")
        if not 0 <= self.seed < 2**64:
            raise ConfigError("seed must be an unsigned 64-bit integer")
        if self.threads < 0:
            raise ConfigError("threads must be nonnegative")

    @property
    def eta(self):
        """c (log n)^a / n, clamped to 1 (with a warning) when it exceeds 1."""
        c, a = self.eta_spec["c"], self.eta_spec["a"]
        logn = math.log(self.n) if self.n > 1 else 0.0
        eta = c * logn**a / self.n
        if eta > 1:
            warnings.warn(
                f"eta = {c:g} (log {self.n})^{a:g} / {self.n} = {eta:.4g} exceeds 1 at this N; using eta = 1",
                EtaClampWarning,
                stacklevel=2,
            )
            return 1.0
        if eta <= 0:
            raise ConfigError(f"eta_spec gives eta = {eta} at n = {self.n}")
        return eta

    def off_diag(self):
        return EntryDistribution(**self.dist["off_diag"])

    def diag(self):
        return EntryDistribution(**self.dist["diag"])

    def param(self, key, default=None):
        return self.params.get(key, default)

    def science_dict(self):
        """Config fields that determine the numbers (no threads, no out_dir)."""
        return {
            "experiment": self.experiment,
            "n": self.n,
            "trials": self.trials,
            "kappa": self.kappa,
            "eta_spec": dict(self.eta_spec),
            "dist": {k: dict(v) for k, v in self.dist.items()},
            "seed": self.seed,
            "params": self.params,
        }

    def hash(self):
        blob = json.dumps(self.science_dict(), sort_keys=True, separators=(",", ":"))
        return hashlib.sha256(blob.encode("utf-8")).hexdigest()

    def with_overrides(self, seed=None, threads=None, out_dir=None):
        d = self.science_dict()
        d["out_dir"] = out_dir if out_dir is not None else self.out_dir
        d["threads"] = threads if threads is not None else self.threads
        if seed is not None:
            d["seed"] = seed
        return from_dict(d)


def from_dict(raw):
    missing = [k for k in REQUIRED if k not in raw]
    if missing:
        raise ConfigError(f"missing config fields: {', '.join(missing)}")
    unknown = set(raw) - set(REQUIRED) - {"threads", "params"}
    if unknown:
        raise ConfigError(f"unknown config fields: {', '.join(sorted(unknown))}")
    eta_spec = raw["eta_spec"]
    if eta_spec == "paper":
        eta_spec = dict(LOG8_PRESET)
    if not isinstance(eta_spec, dict) or set(eta_spec) != {"c", "a"}:
        raise ConfigError('eta_spec must be {"c": ..., "a": ...} or "paper"')
    dist = raw["dist"]
    if not isinstance(dist, dict) or set(dist) != {"off_diag", "diag"}:
        raise ConfigError('dist must give "off_diag" and "diag"')
    threads = raw.get("threads")
    try:
        return ExperimentConfig(
            experiment=raw["experiment"],
            n=raw["n"],
            trials=raw["trials"],
            kappa=float(raw["kappa"]),
            eta_spec={"c": float(eta_spec["c"]), "a": float(eta_spec["a"])},
            dist={"off_diag": _dist(dist["off_diag"], 0.5), "diag": _dist(dist["diag"], 1.0)},
            seed=int(raw["seed"]),
            out_dir=str(raw["out_dir"]),
            threads=int(threads) if threads is not None else (os.cpu_count() or 1),
            params=dict(raw.get("params") or {}),
        )
    except TypeError as exc:
        raise ConfigError(str(exc)) from exc


def load_config(path):
    with open(path, encoding="utf-8") as fh:
        try:
            raw = json.load(fh)
        except json.JSONDecodeError as exc:
            raise ConfigError(f"{path}: {exc}") from exc
    return from_dict(raw)
