"""Run configuration: a versioned JSON document, strictly validated.

Unknown keys are errors at every level.  Missing keys take the defaults
below, and the fully resolved config is echoed into every report.
"""
from __future__ import annotations

import copy
import json
import os
from dataclasses import dataclass, field
from pathlib import Path

SCHEMA = "nahmlab.run/1"
THREADS_ENV = "NAHMLAB_THREADS"

CONSTRUCTORS = ("constant_flux", "trivial", "direct_sum")


class ConfigError(ValueError):
    pass


def _default_tolerances():
    return {"asd": 0.1, "integer": 0.2, "wilson": 0.15, "overlap_min": 0.1,
            "irreducibility": 1e-6}


def _default_solver():
    return {"mode": "auto", "dense_max": 4096, "tol": 1e-9, "maxiter": 2000}


def _default_checks():
    return {"asd": True, "invariants": True, "invert": False, "irred": False}


@dataclass
class RunConfig:
    input: dict = field(default_factory=lambda: {"constructor": "constant_flux", "params": {"k": 1}})
    N: int = 8
    M: int = 6
    tau_ker: float = 0.5
    rho_gap: float = 50.0
    regulator: float = 0.2
    n_eigs: int = 6
    irred_samples: int = 16
    tolerances: dict = field(default_factory=_default_tolerances)
    solver: dict = field(default_factory=_default_solver)
    checks: dict = field(default_factory=_default_checks)
    seed: int = 0
    threads: int = 1
    out_dir: str = "out"
    schema: str = SCHEMA

    # ----------------------------------------------------------- I/O
    @classmethod
    def from_dict(cls, d: dict) -> "RunConfig":
        if not isinstance(d, dict):
            raise ConfigError("config must be a JSON object")
        d = copy.deepcopy(d)
        known = set(cls.__dataclass_fields__)
        extra = sorted(set(d) - known)
        if extra:
            raise ConfigError(f"unknown config keys: {extra}")
        if d.get("schema", SCHEMA) != SCHEMA:
            raise ConfigError(f"unsupported schema {d.get('schema')!r}; expected {SCHEMA!r}")
        cfg = cls()
        for key in ("tolerances", "solver", "checks"):
            if key in d:
                base = getattr(cfg, key)
                bad = sorted(set(d[key]) - set(base))
                if bad:
                    raise ConfigError(f"unknown keys in {key}: {bad}")
                base.update(d.pop(key))
        for k, v in d.items():
            setattr(cfg, k, v)
        cfg.validate()
        return cfg

    def to_dict(self) -> dict:
        return {k: copy.deepcopy(getattr(self, k)) for k in self.__dataclass_fields__}

    @classmethod
    def load(cls, path) -> "RunConfig":
        try:
            data = json.loads(Path(path).read_text(encoding="utf-8"))
        except json.JSONDecodeError as exc:
            raise ConfigError(f"{path}: invalid JSON ({exc})") from None
        return cls.from_dict(data)

    def dumps(self) -> str:
        return json.dumps(self.to_dict(), indent=2, sort_keys=True) + "\n"

    def save(self, path):
        Path(path).write_text(self.dumps(), encoding="utf-8")

    # ----------------------------------------------------- validation
    def validate(self):
        def integer(name, v, lo):
            if isinstance(v, bool) or not isinstance(v, int) or v < lo:
                raise ConfigError(f"{name} must be an integer >= {lo}, got {v!r}")

        def positive(name, v):
            if isinstance(v, bool) or not isinstance(v, (int, float)) or not v > 0:
                raise ConfigError(f"{name} must be positive, got {v!r}")

        integer("N", self.N, 2)
        integer("M", self.M, 2)
        integer("n_eigs", self.n_eigs, 1)
        integer("irred_samples", self.irred_samples, 1)
        integer("seed", self.seed, 0)
        integer("threads", self.threads, 1)
        positive("tau_ker", self.tau_ker)
        positive("rho_gap", self.rho_gap)
        if isinstance(self.regulator, bool) or not isinstance(self.regulator, (int, float)) or self.regulator < 0:
            raise ConfigError(f"regulator must be >= 0, got {self.regulator!r}")
        for k, v in self.tolerances.items():
            positive(f"tolerances.{k}", v)
        if self.solver["mode"] not in ("auto", "kron", "generic"):
            raise ConfigError(f"solver.mode must be auto, kron or generic, got {self.solver['mode']!r}")
        integer("solver.dense_max", self.solver["dense_max"], 1)
        integer("solver.maxiter", self.solver["maxiter"], 1)
        positive("solver.tol", self.solver["tol"])
        for k, v in self.checks.items():
            if not isinstance(v, bool):
                raise ConfigError(f"checks.{k} must be true or false")
        if not isinstance(self.out_dir, str):
            raise ConfigError("out_dir must be a string")
        validate_input(self.input)


def validate_input(spec):
    if not isinstance(spec, dict):
        raise ConfigError("input must be an object")
    if "file" in spec:
        bad = sorted(set(spec) - {"file", "twist", "gauge_seed"})
        if bad:
            raise ConfigError(f"unknown input keys: {bad}")
        if not isinstance(spec["file"], str):
            raise ConfigError("input.file must be a path string")
    else:
        bad = sorted(set(spec) - {"constructor", "params", "twist", "gauge_seed"})
        if bad:
            raise ConfigError(f"unknown input keys: {bad}")
        name = spec.get("constructor")
        if name not in CONSTRUCTORS:
            raise ConfigError(f"input.constructor must be one of {CONSTRUCTORS}, got {name!r}")
        params = spec.get("params", {})
        allowed = {"constant_flux": {"k", "fluxes"}, "trivial": {"n"},
                   "direct_sum": {"parts"}}[name]
        bad = sorted(set(params) - allowed)
        if bad:
            raise ConfigError(f"unknown params for {name}: {bad}")
        if name == "direct_sum":
            parts = params.get("parts")
            if not isinstance(parts, list) or not parts:
                raise ConfigError("direct_sum needs a nonempty list of parts")
            for p in parts:
                validate_input(p)
        if name == "constant_flux" and "fluxes" in params:
            fl = params["fluxes"]
            if not isinstance(fl, dict) or any(k not in ("12", "13", "14", "23", "24", "34") for k in fl):
                raise ConfigError("fluxes must map plane labels like '12' to integers")
    if "twist" in spec:
        t = spec["twist"]
        if not isinstance(t, list) or len(t) != 4 or not all(isinstance(v, (int, float)) for v in t):
            raise ConfigError("twist must be a list of 4 numbers")
    if "gauge_seed" in spec and (isinstance(spec["gauge_seed"], bool) or not isinstance(spec["gauge_seed"], int)):
        raise ConfigError("gauge_seed must be an integer")


def resolve_threads(cfg_threads: int, cli_threads: int | None = None) -> int:
    """CLI flag wins, then the environment variable, then the config."""
    if cli_threads is not None:
        return max(1, int(cli_threads))
    env = os.environ.get(THREADS_ENV)
    if env:
        try:
            return max(1, int(env))
        except ValueError:
            raise ConfigError(f"{THREADS_ENV} must be an integer, got {env!r}") from None
    return cfg_threads
