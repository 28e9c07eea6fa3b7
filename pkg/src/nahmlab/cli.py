"""Command-line entry point: ``nahmlab <subcommand> [options]``."""
from __future__ import annotations

import argparse
import json
import sys
from fractions import Fraction
from pathlib import Path

from . import cohomology as coh
from .config import ConfigError, RunConfig, resolve_threads
from .k3 import K3Class, MukaiVector, check_paper_conditions, moduli_dimension, mukai_pairing
from .pipeline import (EXIT_CODES, EXIT_CONFIG, EXIT_NOT_IT1, EXIT_OK, EXIT_SINGULAR,
                       EXIT_SOLVER, EXIT_THEOREM, _clean, _triple, build_input, run_pipeline,
                       write_outputs)

EPILOG = "exit codes:\n" + "\n".join(f"  {k:>3}  {v}" for k, v in sorted(EXIT_CODES.items())) + \
    "\n\nThe NAHMLAB_THREADS environment variable overrides the config thread budget;" \
    " --threads overrides both."


def _print(obj):
    print(json.dumps(_clean(obj), indent=2, sort_keys=True))


def _config(args) -> RunConfig:
    cfg = RunConfig.load(args.config) if args.config else RunConfig()
    if args.seed is not None:
        cfg.seed = args.seed
    if args.out is not None:
        cfg.out_dir = args.out
    if getattr(args, "N", None) is not None:
        cfg.N = args.N
    if getattr(args, "M", None) is not None:
        cfg.M = args.M
    if getattr(args, "k", None) is not None:
        cfg.input = {"constructor": "constant_flux", "params": {"k": args.k}}
    cfg.threads = resolve_threads(cfg.threads, args.threads)
    cfg.validate()
    return cfg


def _with_checks(cfg, **flags):
    for k in cfg.checks:
        cfg.checks[k] = flags.get(k, False)
    return cfg


def _finish(cfg, rep, keys):
    out = {k: rep.data[k] for k in keys if k in rep.data}
    out["errors"] = rep.data.get("errors", [])
    out["exit_code"] = rep.exit_code
    if cfg.out_dir:
        write_outputs(rep, cfg.out_dir)
    _print(out)
    return rep.exit_code


def cmd_field(args):
    from .formats import load_link_field, save_link_field
    from .lattice import asd_residual
    from .transform import link_field_invariants
    if args.inspect:
        f = load_link_field(args.inspect)
    else:
        cfg = _config(args)
        f = build_input(cfg.input, cfg.N)
        out = Path(args.out or ".")
        out.mkdir(parents=True, exist_ok=True)
        path = out / "field.nfrg"
        save_link_field(path, f)
        print(f"wrote {path}", file=sys.stderr)
    _print({"N": f.N, "n": f.n, "invariants": link_field_invariants(f),
            "asd_residual": asd_residual(f)})
    return EXIT_OK


def cmd_index(args):
    from .dolbeault import classify_IT1
    cfg = _config(args)
    f = build_input(cfg.input, cfg.N)
    rep = classify_IT1(f, cfg.M, cfg.tau_ker, cfg.rho_gap, regulator=cfg.regulator,
                       solver=cfg.solver["mode"], n_eigs=cfg.n_eigs, threads=cfg.threads,
                       dense_max=cfg.solver["dense_max"], tol=cfg.solver["tol"],
                       maxiter=cfg.solver["maxiter"], seed=cfg.seed)
    _print(rep.summary())
    return EXIT_OK if rep.it1 else EXIT_NOT_IT1


def cmd_transform(args):
    cfg = _with_checks(_config(args), invariants=True)
    rep = run_pipeline(cfg)
    return _finish(cfg, rep, ["index", "transform", "cohomology_prediction", "checks"])


def cmd_verify_asd(args):
    if args.bundle:
        from .formats import load_berry_bundle
        from .transform import transform_asd_residual
        b = load_berry_bundle(args.bundle)
        res = transform_asd_residual(b)
        _print({"M": b.M, "r": b.r, "asd_residual": res})
        return EXIT_OK
    cfg = _with_checks(_config(args), asd=True)
    return _finish(cfg, run_pipeline(cfg), ["transform", "checks"])


def cmd_invert(args):
    cfg = _with_checks(_config(args), invariants=True, invert=True)
    return _finish(cfg, run_pipeline(cfg), ["invert", "checks"])


def cmd_irred(args):
    if args.bundle:
        from .formats import load_berry_bundle
        from .transform import irreducibility_test
        b = load_berry_bundle(args.bundle)
        v = irreducibility_test(b, args.samples, args.tol)
        _print({"verdict": v.verdict, "algebra_dim": v.algebra_dim,
                "commutant_dim": v.commutant_dim})
        return EXIT_OK
    cfg = _with_checks(_config(args), irred=True)
    return _finish(cfg, run_pipeline(cfg), ["irred", "checks"])


def cmd_report(args):
    cfg = _config(args)
    rep = run_pipeline(cfg)
    write_outputs(rep, cfg.out_dir)
    _print({"exit_code": rep.exit_code, "out_dir": cfg.out_dir, "errors": rep.data["errors"]})
    return rep.exit_code


def cmd_coh(args):
    c1 = coh.two_form_class([Fraction(v) for v in args.c1])
    ch = coh.chern_character(args.rank, c1, Fraction(args.ch2))
    t = coh.fm_transform_coh(ch)
    back = coh.fm_inverse_coh(t)

    def triple(c):
        r, c1v, ch2 = coh.chern_data(c)
        return {"rank": r, "c1": list(c1v), "ch2": ch2}
    _print({"input": triple(ch), "euler_characteristic": coh.euler_characteristic(ch),
            "transform": triple(t), "round_trip": triple(back),
            "c1_planes": ["12", "13", "14", "23", "24", "34"]})
    return EXIT_OK


def _k3(vals, name):
    if len(vals) != 22:
        raise ConfigError(f"{name} needs 22 integers, got {len(vals)}")
    return K3Class(tuple(vals))


def cmd_k3(args):
    H = _k3(args.H, "--H")
    l = _k3(args.l, "--l")
    out = {"conditions": check_paper_conditions(H, l)}
    if args.rank is not None:
        c2 = args.c2 if args.c2 is not None else out["conditions"]["c2"]
        v = MukaiVector.from_chern(args.rank, l, int(c2))
        out["mukai"] = {"r": v.r, "s": v.s, "c2": v.c2, "pairing": mukai_pairing(v, v),
                        "moduli_dimension": moduli_dimension(v)}
    _print(out)
    return EXIT_OK


def cmd_oracle(args):
    from .oracle import predict
    _print(predict(args.k).as_dict())
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="nahmlab", description="Lattice Nahm transform laboratory.",
                                epilog=EPILOG, formatter_class=argparse.RawDescriptionHelpFormatter)
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help="JSON run config")
    common.add_argument("--seed", type=int, help="solver seed")
    common.add_argument("--threads", type=int, help="thread budget")
    common.add_argument("--out", help="output directory")
    res = argparse.ArgumentParser(add_help=False)
    res.add_argument("--N", type=int, help="lattice sites per direction")
    res.add_argument("--M", type=int, help="dual grid sites per direction")
    res.add_argument("--k", type=int, help="shorthand for a constant-flux input with this k")
    sub = p.add_subparsers(dest="cmd", required=True)

    def add(name, fn, parents, help_):
        s = sub.add_parser(name, parents=parents, help=help_, epilog=EPILOG,
                           formatter_class=argparse.RawDescriptionHelpFormatter)
        s.set_defaults(fn=fn)
        return s

    s = add("field", cmd_field, [common, res], "create a field file or inspect one")
    s.add_argument("--inspect", help="NFRG file to inspect")
    add("index", cmd_index, [common, res], "IT1 classification on the dual grid")
    add("transform", cmd_transform, [common, res], "transform and report invariants")
    s = add("verify-asd", cmd_verify_asd, [common, res], "ASD residual of the transform")
    s.add_argument("--bundle", help="NFBB file to check instead of running the pipeline")
    add("invert", cmd_invert, [common, res], "double transform check")
    s = add("irred", cmd_irred, [common, res], "irreducibility test")
    s.add_argument("--bundle", help="NFBB file to test instead of running the pipeline")
    s.add_argument("--samples", type=int, default=16)
    s.add_argument("--tol", type=float, default=1e-6)
    add("report", cmd_report, [common, res], "full pipeline with JSON and CSV outputs")
    s = add("coh", cmd_coh, [common], "cohomological transform of (rank, c1, ch2)")
    s.add_argument("--rank", type=int, required=True)
    s.add_argument("--c1", nargs=6, default=["0"] * 6, metavar="C",
                   help="c1 coefficients on planes 12 13 14 23 24 34")
    s.add_argument("--ch2", default="0")
    s = add("k3", cmd_k3, [common], "K3 lattice conditions and Mukai data")
    s.add_argument("--H", type=int, nargs="+", required=True, help="22 coordinates")
    s.add_argument("--l", type=int, nargs="+", required=True, help="22 coordinates")
    s.add_argument("--rank", type=int, help="also report the Mukai vector of this rank")
    s.add_argument("--c2", type=int, help="c2 for the Mukai vector (default: derived)")
    s = add("oracle", cmd_oracle, [common], "continuum predictions for constant flux")
    s.add_argument("--k", type=int, required=True)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.fn(args)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG


if __name__ == "__main__":
    sys.exit(main())
