"""Command line frontend.

Exit codes: 0 success, 1 a hypothesis fails for the input (for example a
spectral subspace that is not a graph), 2 bad input or usage, 3 numerical
non-convergence. Every report is written to ``<output-dir>/<command>.json``
and echoed on stdout.
"""

import argparse
import sys
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from . import __version__
from ._errors import DichoRiccError, InputError
from .mmio import load_system, matrix_to_json, read_matrix, save_system, write_matrix
from .report import dumps, make_report
from .validation import DEFAULT_TOLERANCES, max_threads, resolve_tolerances

METHOD_ALIASES = {"quadrature": "quadrature", "sign": "sign_newton", "eigen": "eigen_order"}
COMMANDS = ("certify", "subordination", "project", "solve", "verify", "dual", "homotopy",
            "example", "selftest")


@dataclass
class RunConfig:
    command: str
    input_paths: dict = field(default_factory=dict)
    output_dir: Path = Path(".")
    tolerances: dict = field(default_factory=lambda: dict(DEFAULT_TOLERANCES))
    seed: int = 0
    method: str = "quadrature"
    flags: dict = field(default_factory=dict)


def _parse_param(text):
    if "=" not in text:
        raise InputError(f"--param expects key=value, got {text!r}")
    key, value = text.split("=", 1)
    try:
        return key.strip(), float(value) if any(c in value for c in ".eE") else int(value)
    except ValueError:
        return key.strip(), value


def build_parser():
    p = argparse.ArgumentParser(prog="dichoricc", description=__doc__.splitlines()[0])
    p.add_argument("--version", action="version", version=f"dichoricc {__version__}")
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--input", help="system descriptor JSON")
    common.add_argument("--output-dir", default=".", help="directory for reports and matrices")
    common.add_argument("--method", choices=sorted(METHOD_ALIASES), default="quadrature")
    common.add_argument("--seed", type=int, default=0)
    common.add_argument("--which", choices=("plus", "minus", "both"), default="both")
    for name in DEFAULT_TOLERANCES:
        flag = "--" + name.replace("_", "-")
        common.add_argument(flag, dest=name, type=float, default=None)
    sub = p.add_subparsers(dest="command", required=True)
    helps = {
        "certify": "sector, bisector, dichotomy and enclosure certificates",
        "subordination": "p-subordination bounds of the off-diagonal blocks",
        "project": "spectral projections P+ and P-",
        "solve": "Riccati solutions X+ and X-",
        "verify": "re-check a given solution X",
        "dual": "solutions of the dual Riccati equation",
        "homotopy": "trace T_r = S + rR for r in [0, 1]",
        "example": "generate a model problem",
        "selftest": "run the acceptance suite",
    }
    cmds = {name: sub.add_parser(name, parents=[common], help=h) for name, h in helps.items()}
    for name in ("certify", "subordination", "homotopy"):
        cmds[name].add_argument("--p", type=float, default=None, help="subordination exponent")
    cmds["subordination"].add_argument("--samples", type=int, default=4096)
    cmds["verify"].add_argument("--solution", required=True, help="Matrix Market file with X")
    cmds["homotopy"].add_argument("--steps", type=int, default=8)
    cmds["homotopy"].add_argument("--refine-threshold", type=float, default=0.2)
    cmds["example"].add_argument("--name", required=True)
    cmds["example"].add_argument("--n", type=int, default=None)
    cmds["example"].add_argument("--param", action="append", default=[], help="key=value")
    cmds["selftest"].add_argument("--only", default="", help="comma separated criterion numbers")
    return p


def config_from_args(args):
    tol = resolve_tolerances({k: getattr(args, k) for k in DEFAULT_TOLERANCES})
    inputs = {"system": args.input} if args.input else {}
    flags = {k: v for k, v in vars(args).items()
             if k not in DEFAULT_TOLERANCES and k not in ("command", "input", "output_dir", "seed", "method")}
    return RunConfig(args.command, inputs, Path(args.output_dir), tol, int(args.seed),
                     METHOD_ALIASES[args.method], flags)


def _system(cfg):
    path = cfg.input_paths.get("system")
    if not path:
        raise InputError(f"{cfg.command} requires --input")
    return load_system(path, tol_herm=cfg.tolerances["tol_herm"])


def _graph(g):
    if g is None:
        return None
    return {"X": matrix_to_json(g.X), "sign": g.sign, "residual_abs": g.residual_abs,
            "residual_rel": g.residual_rel, "graph_condition": g.graph_condition,
            "hermiticity_defect": g.hermiticity_defect, "min_eig_signed": g.min_eig_signed,
            "symmetrized": g.symmetrized}


def _sides(which):
    return ("plus", "minus") if which == "both" else (which,)


def _failures(failures, which):
    return [dict(failures[s].to_dict(), which=s) for s in _sides(which) if s in failures]


# -- subcommands ------------------------------------------------------------

def cmd_certify(cfg):
    from .certify import certify_bisectorial, certify_sectorial, dichotomy_gap, enclosure_region, with_r_prime
    from .operator_model import check_krein_structure, split_diag_offdiag

    sys_ = _system(cfg)
    split = split_diag_offdiag(sys_)
    p = cfg.flags.get("p")
    p = 0.5 if p is None else p
    result, errors = {}, []
    try:
        result["sector_A"] = certify_sectorial(sys_.A)
    except DichoRiccError as exc:
        errors.append(dict(exc.to_dict(), which="sector_A"))
    sector_S = certify_bisectorial(split.S)
    result["bisector_S"] = sector_S
    cert = dichotomy_gap(sys_.T)
    enc = enclosure_region(sys_.T, cert, sector_S, p, split.S)
    result["dichotomy"] = with_r_prime(cert, enc)
    result["enclosure"] = enc
    result["structure"] = check_krein_structure(sys_.T)
    result["nonnegative"] = sys_.nonnegative
    if not enc.ok:
        errors.append({"code": "ENCLOSURE_FAILED", "message": "eigenvalues inside the certified region",
                       "details": {}})
    return result, errors, {}


def cmd_subordination(cfg):
    from .operator_model import split_diag_offdiag
    from .subordination import diag_p_dominance, subordination_from_resolvent

    sys_ = _system(cfg)
    p = cfg.flags.get("p")
    p = 0.5 if p is None else p
    dom = diag_p_dominance(sys_, p, cfg.flags["samples"], cfg.seed)
    split = split_diag_offdiag(sys_)
    result = {"dominance": dom, "resolvent_R_S": subordination_from_resolvent(split.R, split.S, p)}
    return result, [], {}


def cmd_project(cfg):
    from .certify import dichotomy_gap
    from .dichotomy import compute_projections, verify_decomposition

    sys_ = _system(cfg)
    cert = dichotomy_gap(sys_.T)
    proj = compute_projections(sys_.T, cfg.method, cert, tol=cfg.tolerances["quad_tol"] * 100)
    files = {}
    for name in ("P_plus", "P_minus", "V_plus", "V_minus"):
        files[name] = getattr(proj, name)
    result = {"method": proj.method, "quad_error_estimate": proj.quad_error_estimate,
              "info": proj.info, "dichotomy": cert, "decomposition": verify_decomposition(sys_.T, proj)}
    dec = result["decomposition"]
    errors = []
    tp = cfg.tolerances["tol_proj"]
    if max(dec.idempotency_defect, dec.complement_defect, dec.commutation_defect) > tp or not dec.spectral_split_ok:
        errors.append({"code": "DECOMPOSITION_DEFECT", "message": "projection defects exceed tol_proj",
                       "details": {}})
    return result, errors, files


def cmd_solve(cfg):
    from .riccati import kernel_condition, solve, verify_krein

    sys_ = _system(cfg)
    res = solve(sys_, cfg.method, cfg.tolerances)
    which = cfg.flags["which"]
    result = {"method": res.method, "dichotomy": res.cert}
    files = {}
    for side in _sides(which):
        g = getattr(res, "X_" + side)
        result["X_" + side] = _graph(g)
        if g is not None:
            files["X_" + side] = g.X
    result["krein"] = verify_krein(res.proj, seed=cfg.seed)
    try:
        result["kernel_condition"] = kernel_condition(sys_)
    except DichoRiccError as exc:
        result["kernel_condition"] = exc
    return result, _failures(res.failures, which), files


def cmd_verify(cfg):
    from .riccati import graph_invariance_defect, riccati_residual
    from .validation import hermiticity_defect, max_eig_hermitian, min_eig_hermitian, norm2

    sys_ = _system(cfg)
    X = read_matrix(cfg.flags["solution"])
    res = riccati_residual(sys_, X)
    scale = 1.0 + norm2(X)
    herm = hermiticity_defect(X)
    lo, hi = min_eig_hermitian(X), max_eig_hermitian(X)
    tol = cfg.tolerances
    result = {"residual_abs": res["abs"], "residual_rel": res["rel"], "hermiticity_defect": herm,
              "lambda_min": lo, "lambda_max": hi,
              "graph_invariance_defect": graph_invariance_defect(sys_, X)}
    errors = []
    if res["rel"] > tol["tol_ricc"]:
        errors.append({"code": "RESIDUAL_TOO_LARGE", "message": "X does not solve the Riccati equation",
                       "details": {"residual_rel": res["rel"]}})
    if herm > tol["tol_herm"] * scale:
        errors.append({"code": "NOT_HERMITIAN", "message": "X is not Hermitian", "details": {"defect": herm}})
    which = cfg.flags["which"]
    if which == "plus" and lo < -tol["tol_psd"] * scale:
        errors.append({"code": "SIGN_MISMATCH", "message": "X is not nonnegative", "details": {"lambda_min": lo}})
    if which == "minus" and hi > tol["tol_psd"] * scale:
        errors.append({"code": "SIGN_MISMATCH", "message": "X is not nonpositive", "details": {"lambda_max": hi}})
    return result, errors, {}


def cmd_dual(cfg):
    from .riccati import dual_solve

    sys_ = _system(cfg)
    res = dual_solve(sys_, cfg.method, cfg.tolerances)
    which = cfg.flags["which"]
    result, files = {"kernel_condition_dual": res.kernel}, {}
    for side in _sides(which):
        g = getattr(res, "Y_" + side)
        result["Y_" + side] = _graph(g)
        if g is not None:
            files["Y_" + side] = g.X
    return result, _failures(res.failures, which), files


def cmd_homotopy(cfg):
    from .homotopy import trace_homotopy, write_trace_csv

    sys_ = _system(cfg)
    p = cfg.flags.get("p")
    p = 0.0 if p is None else p
    tr = trace_homotopy(sys_, cfg.flags["steps"], cfg.flags["refine_threshold"], p, cfg.method,
                        tol=cfg.tolerances["quad_tol"] * 100)
    cfg.output_dir.mkdir(parents=True, exist_ok=True)
    csv_path = cfg.output_dir / "homotopy.csv"
    write_trace_csv(tr, csv_path)
    norms = np.array(tr.X_norms)
    finite = norms[np.isfinite(norms)]
    result = {"points": len(tr.r_grid), "rounds": tr.rounds, "L": tr.L, "p": tr.p, "c_C": tr.c_C,
              "max_X_norm": float(finite.max()) if finite.size else float("nan"),
              "max_step_defect": tr.max_step_defect, "min_gap_h": float(min(tr.gap_h)),
              "bounded": bool(np.all(finite <= tr.L * (1 + 1e-6))),
              "graph_failures": {"%.17g" % r: c for r, c in tr.failures.items()},
              "csv": csv_path.name}
    errors = []
    if not result["bounded"]:
        errors.append({"code": "BOUND_EXCEEDED", "message": "||X_r|| exceeds L", "details": {}})
    return result, errors, {}


def cmd_example(cfg):
    from .examples import generate

    params = dict(_parse_param(t) for t in cfg.flags["param"])
    sys_, spec = generate(cfg.flags["name"], cfg.flags["n"], **params)
    cfg.output_dir.mkdir(parents=True, exist_ok=True)
    desc = save_system(sys_, cfg.output_dir, spec.name)
    meta = cfg.output_dir / f"{spec.name}_meta.json"
    meta.write_text(dumps(spec))
    return {"example": spec, "descriptor": desc.name, "metadata": meta.name}, [], {}


def cmd_selftest(cfg):
    from .acceptance import run_all

    only = {int(x) for x in cfg.flags["only"].split(",") if x.strip()}
    results = run_all(only or None, echo=lambda line: print(line, file=sys.stderr))
    errors = [{"code": "CRITERION_FAILED", "message": r.name, "details": {"number": r.number}}
              for r in results if not r.passed]
    return {"criteria": [{"number": r.number, "name": r.name, "passed": r.passed, "detail": r.detail}
                         for r in results]}, errors, {}


HANDLERS = {name: globals()["cmd_" + name] for name in COMMANDS}


def run(cfg, stdout=None):
    """Execute ``cfg`` and return the exit code."""
    stdout = sys.stdout if stdout is None else stdout
    try:
        max_threads()
        result, errors, files = HANDLERS[cfg.command](cfg)
        status = "ok" if not errors else "hypothesis_failure"
        code = 0 if not errors else 1
    except DichoRiccError as exc:
        result, files = None, {}
        errors = [exc.to_dict()]
        code = exc.exit_code
        status = {1: "hypothesis_failure", 2: "input_error", 3: "numerical_error"}[code]
    report = make_report(cfg.command, result, cfg.tolerances, cfg.seed, __version__, errors, status)
    text = dumps(report)
    try:
        cfg.output_dir.mkdir(parents=True, exist_ok=True)
        for name, M in files.items():
            write_matrix(cfg.output_dir / f"{name}.mtx", M)
        (cfg.output_dir / f"{cfg.command}.json").write_text(text)
    except OSError as exc:
        print(dumps({"code": "OUTPUT_ERROR", "message": str(exc)}), file=sys.stderr)
        return 2
    stdout.write(text)
    return code


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        cfg = config_from_args(args)
    except DichoRiccError as exc:
        sys.stdout.write(dumps(exc.to_dict()))
        return exc.exit_code
    return run(cfg)


if __name__ == "__main__":
    sys.exit(main())
