"""Run a configured experiment: input field -> IT1 scan -> transform -> checks.

The JSON report and CSV tables are deterministic functions of the config;
wall-clock timings go to a separate ``timings.json`` so reruns compare
byte for byte.
"""
from __future__ import annotations

import csv
import io
import json
import math
import time
from dataclasses import dataclass, field
from fractions import Fraction
from pathlib import Path

import numpy as np

from . import cohomology as coh
from .config import ConfigError, RunConfig, resolve_threads
from .dolbeault import SolverError, make_solver, scan
from .formats import load_link_field, save_berry_bundle
from .lattice import (CurvatureError, LinkField, asd_residual, constant_flux_field,
                      direct_sum, poincare_twist, random_gauge_transform, trivial_field,
                      wilson_loops)
from .transform import (BerryBundle, NotIT1Error, ResolutionError, SingularOverlapError,
                        berry_curvature, berry_links, double_transform_check,
                        link_field_invariants, links_irreducibility, round_invariants,
                        raw_invariants, transform_asd_residual)

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_NOT_IT1 = 10
EXIT_SINGULAR = 11
EXIT_THEOREM = 12
EXIT_SOLVER = 13

EXIT_CODES = {
    EXIT_OK: "all enabled checks passed",
    EXIT_CONFIG: "configuration error",
    EXIT_NOT_IT1: "input is not IT1 on the dual grid",
    EXIT_SINGULAR: "singular overlap or insufficient resolution",
    EXIT_THEOREM: "a theorem check failed",
    EXIT_SOLVER: "eigensolver failure",
}

TABLES = ("eigenvalues", "residuals", "invariants", "wilson")
PLANE_COLS = ("c1_12", "c1_13", "c1_14", "c1_23", "c1_24", "c1_34")


# ------------------------------------------------------------------ inputs

def build_input(spec: dict, N: int) -> LinkField:
    if "file" in spec:
        f = load_link_field(spec["file"])
        if f.N != N:
            raise ConfigError(f"field file has N={f.N}, config says N={N}")
    else:
        name, params = spec["constructor"], spec.get("params", {})
        if name == "constant_flux":
            fl = params.get("fluxes")
            fluxes = None if fl is None else {k: int(v) for k, v in fl.items()}
            f = constant_flux_field(N, int(params.get("k", 1)), fluxes)
        elif name == "trivial":
            f = trivial_field(N, int(params.get("n", 1)))
        else:
            f = direct_sum([build_input(p, N) for p in params["parts"]])
    if "twist" in spec:
        f = poincare_twist(f, spec["twist"])
    if "gauge_seed" in spec:
        f = random_gauge_transform(f, spec["gauge_seed"])
    return f


def input_chern_class(spec: dict, f: LinkField | None = None) -> coh.CohClass:
    """ch(E) from the constructor parameters (exact); field files fall back to
    the rounded lattice invariants."""
    if "file" in spec:
        rank, c1, ch2 = link_field_invariants(f)
        return coh.chern_character(rank, coh.two_form_class(c1), ch2)
    name, params = spec["constructor"], spec.get("params", {})
    if name == "trivial":
        return coh.CohClass.scalar(int(params.get("n", 1)))
    if name == "direct_sum":
        out = coh.CohClass("X", {})
        for p in params["parts"]:
            out = out + input_chern_class(p)
        return out
    fl = params.get("fluxes")
    if fl is None:
        k = int(params.get("k", 1))
        fl = {"12": k, "34": -k}
    labels = ("12", "13", "14", "23", "24", "34")
    c1 = coh.two_form_class([int(fl.get(lab, 0)) for lab in labels])
    ch = coh.CohClass.scalar(1) + c1 + coh.wedge(c1, c1).scale(Fraction(1, 2))
    return ch


def _triple(ch: coh.CohClass):
    rank, c1, ch2 = coh.chern_data(ch)
    return (coh.as_integer(rank, "rank"), tuple(coh.as_integer(v, "c1") for v in c1),
            coh.as_integer(ch2, "ch2"))


# ------------------------------------------------------------------ report

def _clean(x):
    """Make report data JSON-safe and deterministic."""
    if isinstance(x, dict):
        return {str(k): _clean(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [_clean(v) for v in x]
    if isinstance(x, (bool, np.bool_)):
        return bool(x)
    if isinstance(x, (int, np.integer)):
        return int(x)
    if isinstance(x, Fraction):
        return int(x) if x.denominator == 1 else str(x)
    if isinstance(x, (float, np.floating)):
        x = float(x)
        return x if math.isfinite(x) else ("inf" if x > 0 else "-inf" if x < 0 else "nan")
    if isinstance(x, complex):
        return [_clean(x.real), _clean(x.imag)]
    return x


@dataclass
class ExperimentReport:
    data: dict
    exit_code: int
    tables: dict = field(default_factory=dict)
    timings: dict = field(default_factory=dict)
    bundle: BerryBundle | None = None

    def to_json(self) -> str:
        return json.dumps(_clean(self.data), indent=2, sort_keys=True) + "\n"


def _fmt(v):
    if isinstance(v, float):
        return repr(v)
    return str(v)


def emit_csv(report: ExperimentReport, table: str, out_dir=None) -> str:
    """Render one table as CSV text; also write ``<out_dir>/<table>.csv`` if given."""
    if table not in TABLES:
        raise ValueError(f"unknown table {table!r}; choose from {TABLES}")
    header, rows = report.tables.get(table, ([], []))
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    for row in rows:
        w.writerow([_fmt(v) for v in row])
    text = buf.getvalue()
    if out_dir is not None:
        p = Path(out_dir) / f"{table}.csv"
        p.parent.mkdir(parents=True, exist_ok=True)
        p.write_text(text, encoding="utf-8")
    return text


def write_outputs(report: ExperimentReport, out_dir) -> Path:
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    (out / "report.json").write_text(report.to_json(), encoding="utf-8")
    (out / "timings.json").write_text(json.dumps(_clean(report.timings), indent=2, sort_keys=True) + "\n",
                                      encoding="utf-8")
    for t in TABLES:
        emit_csv(report, t, out)
    if report.bundle is not None:
        save_berry_bundle(out / "berry.nfbb", report.bundle)
    return out


# ---------------------------------------------------------------- pipeline

class _Stage:
    def __init__(self, timings, name):
        self.timings, self.name = timings, name

    def __enter__(self):
        self.t = time.perf_counter()

    def __exit__(self, *exc):
        self.timings[self.name] = time.perf_counter() - self.t
        return False


def run_pipeline(cfg: RunConfig, threads: int | None = None) -> ExperimentReport:
    cfg.validate()
    nthreads = resolve_threads(cfg.threads, threads)
    tol = cfg.tolerances
    data = {"config": cfg.to_dict(), "errors": [], "checks": {}}
    data["config"]["threads"] = nthreads
    del data["config"]["out_dir"]       # where outputs go is not part of the experiment
    timings: dict = {}
    tables = {t: ([], []) for t in TABLES}
    rep = ExperimentReport(data, EXIT_OK, tables, timings)

    def fail(stage, code, exc):
        data["errors"].append({"stage": stage, "code": code, "type": type(exc).__name__,
                               "message": str(exc)})
        data["exit_meaning"] = EXIT_CODES[code]
        data["exit_code"] = code
        rep.exit_code = code
        rep.data = data
        return rep

    # input
    with _Stage(timings, "input"):
        try:
            f = build_input(cfg.input, cfg.N)
        except (ConfigError, OSError, ValueError) as exc:
            return fail("input", EXIT_CONFIG, exc)
        chE = input_chern_class(cfg.input, f)
        predicted = coh.fm_transform_coh(chE)
        chi = coh.euler_characteristic(chE)
        data["input"] = {"N": f.N, "n": f.n, "cohomology": _triple(chE),
                         "euler_characteristic": chi}
        try:
            data["input"]["lattice_invariants"] = link_field_invariants(f, tol["integer"])
            data["input"]["asd_residual"] = asd_residual(f)
        except (CurvatureError, ResolutionError) as exc:
            return fail("input", EXIT_SINGULAR, exc)
        data["cohomology_prediction"] = {"transform": _triple(predicted),
                                         "expected_rank": -chi}
        w_rows = []
        for mu in range(4):
            tr = np.trace(wilson_loops(f.links, mu), axis1=-2, axis2=-1)
            for idx in np.ndindex(*tr.shape):
                z = complex(tr[idx])
                w_rows.append(["input", mu + 1, *idx, z.real, z.imag])
        tables["wilson"] = (["field", "mu", "x1", "x2", "x3", "x4", "re_trace", "im_trace"], w_rows)

    # index scan
    solver_kw = dict(dense_max=cfg.solver["dense_max"], tol=cfg.solver["tol"],
                     maxiter=cfg.solver["maxiter"], seed=cfg.seed)
    with _Stage(timings, "index"):
        try:
            solver = make_solver(f, cfg.regulator, cfg.solver["mode"], **solver_kw)
            it1, results, frames = scan(solver, cfg.M, cfg.tau_ker, cfg.rho_gap,
                                        n_eigs=cfg.n_eigs, threads=nthreads, keep_frames=True)
        except SolverError as exc:
            return fail("index", EXIT_SOLVER, exc)
        except ValueError as exc:
            return fail("index", EXIT_CONFIG, exc)
        data["index"] = it1.summary()
        eig_rows = []
        for res in results:
            ev = res.reports[1].eigenvalues
            for j in range(cfg.n_eigs):
                val = float(ev[j]) if j < len(ev) else float("nan")
                eig_rows.append([*res.xi, j, val])
        tables["eigenvalues"] = (["xi1", "xi2", "xi3", "xi4", "j", "lambda"], eig_rows)
        if not it1.it1 or not it1.rank:
            return fail("index", EXIT_NOT_IT1, NotIT1Error(it1))
        data["checks"]["rank_law"] = {"rank": it1.rank, "expected": -chi,
                                      "pass": it1.rank == -chi}

    # transform
    with _Stage(timings, "transform"):
        try:
            links = berry_links(frames, cfg.M, 1, tol["overlap_min"])
            b = BerryBundle(links, None, {"N": f.N, "n": f.n}, it1)
            F = berry_curvature(b)
            raw = raw_invariants(F, b.M, b.r)
            inv = round_invariants(*raw, tol["integer"])
        except SingularOverlapError as exc:
            return fail("transform", EXIT_SINGULAR, exc)
        except (CurvatureError, ResolutionError) as exc:
            return fail("transform", EXIT_SINGULAR, exc)
        rep.bundle = b
        res_asd = transform_asd_residual(b)
        data["transform"] = {"rank": b.r, "M": b.M, "asd_residual": res_asd,
                             "invariants": inv,
                             "raw_c1": [float(v) for v in raw[1]], "raw_ch2": float(raw[2])}
        inv_rows = [["input_cohomology", *_flat(_triple(chE))],
                    ["input_lattice", *_flat(data["input"]["lattice_invariants"])],
                    ["transform_cohomology", *_flat(_triple(predicted))],
                    ["transform_lattice", *_flat(inv)]]
        res_rows = [["input_asd_residual", data["input"]["asd_residual"], "", ""],
                    ["transform_asd_residual", res_asd, tol["asd"], res_asd < tol["asd"]]]
        if cfg.checks["asd"]:
            data["checks"]["asd"] = {"residual": res_asd, "tolerance": tol["asd"],
                                     "pass": res_asd < tol["asd"]}
        if cfg.checks["invariants"]:
            data["checks"]["invariants"] = {"lattice": inv, "cohomology": _triple(predicted),
                                            "pass": tuple(inv) == _triple(predicted)}

    # optional double transform
    if cfg.checks["invert"]:
        with _Stage(timings, "invert"):
            try:
                dt = double_transform_check(f, cfg.M, first=b, wilson_tol=tol["wilson"],
                                            integer_tol=tol["integer"], tau_ker=cfg.tau_ker,
                                            rho_gap=cfg.rho_gap, regulator=cfg.regulator,
                                            solver=cfg.solver["mode"], n_eigs=cfg.n_eigs,
                                            threads=nthreads, min_overlap_sv=tol["overlap_min"],
                                            **solver_kw)
            except SingularOverlapError as exc:
                return fail("invert", EXIT_SINGULAR, exc)
            except (CurvatureError, ResolutionError) as exc:
                return fail("invert", EXIT_SINGULAR, exc)
            except SolverError as exc:
                return fail("invert", EXIT_SOLVER, exc)
            data["invert"] = dt.as_dict()
            data["checks"]["invert"] = {"pass": dt.invariants_equal and dt.wilson_ok
                                        and not dt.theorem_violation,
                                        "wilson_tolerance": tol["wilson"]}
            if dt.double is not None:
                inv_rows.append(["double_lattice", *_flat(dt.double)])
            res_rows.append(["double_wilson_max_error", dt.wilson_max_error, tol["wilson"], dt.wilson_ok])

    if cfg.checks["irred"]:
        with _Stage(timings, "irred"):
            try:
                vin = links_irreducibility(f.links, cfg.irred_samples, tol["irreducibility"])
                vout = links_irreducibility(b.links, cfg.irred_samples, tol["irreducibility"])
            except CurvatureError as exc:
                return fail("irred", EXIT_SINGULAR, exc)
            data["irred"] = {"input": list(vin), "transform": list(vout),
                             "samples": cfg.irred_samples, "tolerance": tol["irreducibility"]}
            data["checks"]["irred"] = {"pass": vin.verdict == vout.verdict
                                       and vout.verdict != "indeterminate"}

    tables["invariants"] = (["source", "rank", *PLANE_COLS, "ch2"], inv_rows)
    tables["residuals"] = (["quantity", "value", "tolerance", "pass"], res_rows)
    if not all(c["pass"] for c in data["checks"].values()):
        data["exit_meaning"] = EXIT_CODES[EXIT_THEOREM]
        rep.exit_code = EXIT_THEOREM
    else:
        data["exit_meaning"] = EXIT_CODES[EXIT_OK]
    data["exit_code"] = rep.exit_code
    rep.data = data
    return rep


def _flat(triple):
    rank, c1, ch2 = triple
    return [int(rank), *[int(v) for v in c1], int(ch2)]
