"""Command-line interface.

Every command prints one JSON report on stdout.  Exit codes: 0 success,
1 conjecture violations found, 2 invalid input, 3 mathematical
precondition not met.
"""

from __future__ import annotations

import argparse
import json
import math
import os
import sys
import time

import numpy as np

from . import __version__
from . import coefficients as coef
from . import conjecture, limits, linalg, mmio, stationary
from .errors import ErgoError, InternalError, PreconditionError, ValidationError
from .linalg import NormKind

EXIT_OK, EXIT_VIOLATION, EXIT_INVALID, EXIT_PRECONDITION = 0, 1, 2, 3


# ---------------------------------------------------------------------------
# stable JSON
# ---------------------------------------------------------------------------

def _plain(o):
    if isinstance(o, dict):
        return {str(k): _plain(v) for k, v in o.items()}
    if isinstance(o, (list, tuple)):
        return [_plain(v) for v in o]
    if isinstance(o, np.ndarray):
        return _plain(o.tolist())
    if isinstance(o, (bool, np.bool_)):
        return bool(o)
    if isinstance(o, (int, np.integer)):
        return int(o)
    if isinstance(o, (float, np.floating)):
        return float(o)
    if isinstance(o, (complex, np.complexfloating)):
        return [float(o.real), float(o.imag)]
    return o


def _emit(o, indent: int, level: int) -> str:
    pad = " " * (indent * (level + 1))
    end = " " * (indent * level)
    if isinstance(o, dict):
        if not o:
            return "{}"
        items = [f"{pad}{_emit(k, indent, level + 1)}: {_emit(o[k], indent, level + 1)}"
                 for k in sorted(o)]
        return "{\n" + ",\n".join(items) + "\n" + end + "}"
    if isinstance(o, list):
        if not o:
            return "[]"
        if all(not isinstance(v, (dict, list)) for v in o):
            return "[" + ", ".join(_emit(v, indent, level + 1) for v in o) + "]"
        return "[\n" + ",\n".join(pad + _emit(v, indent, level + 1) for v in o) + "\n" + end + "]"
    if o is None:
        return "null"
    if o is True:
        return "true"
    if o is False:
        return "false"
    if isinstance(o, int):
        return str(o)
    if isinstance(o, float):
        return format(o, ".17g") if math.isfinite(o) else "null"
    if isinstance(o, str):
        return json.dumps(o)
    raise TypeError(f"cannot serialise {type(o).__name__}")


def dumps_stable(obj, indent: int = 2) -> str:
    """JSON with sorted keys and 17 significant digits per float."""
    return _emit(_plain(obj), indent, 0) + "\n"


# ---------------------------------------------------------------------------
# helpers
# ---------------------------------------------------------------------------

def _load(path, fmt=None):
    try:
        return mmio.read_matrix(path, fmt)
    except OSError as exc:
        raise ValidationError(f"cannot read {path}: {exc.strerror or exc}") from None


def _load_stochastic(path, fmt=None):
    A, digest = _load(path, fmt)
    return linalg.StochasticMatrix(A), digest


def _echo(args) -> dict:
    return {k: v for k, v in sorted(vars(args).items()) if k not in ("func",)}


def _report(args, result, digest=None, seed=None) -> dict:
    return {
        "command": args.command,
        "args": _echo(args),
        "input_digest": digest,
        "version": __version__,
        "seed": seed,
        "result": result,
    }


# ---------------------------------------------------------------------------
# commands
# ---------------------------------------------------------------------------

_STOCHASTIC_COEFS = ("tau_n1", "tau_m", "tau_m_min")


def cmd_coeff(args):
    A, digest = _load(args.matrix, args.format)
    kind = NormKind.parse(args.norm)
    name = args.coef
    if name in ("tau_m", "tau_m_min") and args.m is None:
        raise ValidationError(f"--m is required for {name}")
    if name == "phi" and args.w is None:
        raise ValidationError("--w is required for phi")

    if name in _STOCHASTIC_COEFS:
        S = linalg.StochasticMatrix(A)
        if name == "tau_n1":
            rep = coef.CoefficientReport("tau_n1", coef.tau_n1(S), "none", "closed_form")
        elif name == "tau_m":
            rep = coef.CoefficientReport("tau_m", coef.tau_m(S, args.m), "none", "closed_form")
        else:
            rep = coef.CoefficientReport("tau_m_min", coef.tau_m_min_variant(S, args.m),
                                         "none", "support_enumeration")
        result = rep.to_dict()
        if name != "tau_n1":
            result["m"] = args.m
    elif name == "tau_haviv":
        A = linalg.as_nonnegative(A)
        y = mmio.read_vector(args.y) if args.y else linalg.perron_vector(A, "left")
        rep = coef.CoefficientReport("tau_haviv", coef.tau_haviv(A, y), "none", "closed_form")
        result = rep.to_dict()
        result["y"] = [float(v) for v in np.asarray(y) / np.sum(y)]
    elif name == "phi":
        W, _ = _load(args.w)
        sel = coef.JordanSelection(W)
        result = coef.phi(sel, A, kind, args.budget, args.seed).to_dict()
    else:
        A = linalg.as_nonnegative(A)
        x = mmio.read_vector(args.x) if args.x else linalg.perron_vector(A, "right")
        fn = coef.mu if name == "mu" else coef.tau_vecnorm
        result = fn(x, A, kind, args.budget, args.seed).to_dict()
        result["x"] = [float(v) for v in np.asarray(x) / np.sum(x)]
    return _report(args, result, digest, args.seed), EXIT_OK


def cmd_stationary(args):
    S, digest = _load_stochastic(args.matrix, args.format)
    result = {"tau_n1": coef.tau_n1(S)}
    xs = {}
    if args.method in ("msystem", "both"):
        xs["msystem"] = stationary.stationary_via_msystem(S)
    if args.method in ("power", "both"):
        xs["power"] = stationary.stationary_via_power(S, tol=args.tol)
    for k, x in xs.items():
        result[k] = {"x": x, "residual": float(np.abs(S.array @ x - x).sum())}
    if len(xs) == 2:
        result["discrepancy"] = float(np.abs(xs["msystem"] - xs["power"]).sum())
    return _report(args, result, digest), EXIT_OK


def cmd_limit(args):
    A, digest = _load(args.matrix, args.format)
    ks = limits.geometric_ks(args.kmax)
    if args.study == "tau_n1":
        study = limits.limit_study_tau_n1(linalg.StochasticMatrix(A), ks, args.tol)
    else:
        if args.w is None:
            raise ValidationError("--w is required for the phi study")
        W, _ = _load(args.w)
        sel = coef.JordanSelection.for_matrix(A, W)
        study = limits.limit_study_phi(sel, A, NormKind.parse(args.norm), ks, args.tol,
                                       budget=args.budget, seed=args.seed)
    result = study.to_dict()
    result["table"] = [[k, v] for k, v in zip(study.ks, study.values)]
    return _report(args, result, digest, args.seed), EXIT_OK


def cmd_conjecture(args):
    inject, digest = None, None
    if args.inject:
        inject, digest = _load(args.inject)
    workers = int(os.environ.get("ERGO_THREADS", "1") or 1)
    findings = conjecture.fuzz_conjecture(args.n, args.trials, args.seed, args.variant,
                                          inject=inject, sparsity=args.sparsity,
                                          workers=workers)
    violations = [f for f in findings if f.violated]
    for f in violations:
        print(f"violation: trial {f.trial} k={f.k} |lambda_k|={f.lambda_k_modulus:.6g} "
              f"> tau={f.tau_value:.6g}", file=sys.stderr)
    result = {
        "violations": len(violations),
        "findings": [f.to_dict() for f in findings],
    }
    code = EXIT_VIOLATION if violations else EXIT_OK
    return _report(args, result, digest, args.seed), code


def cmd_check(args):
    A, digest = _load(args.matrix, args.format)
    A = linalg.as_matrix(A, square=True)
    result = {"n": A.shape[0], "stochastic": linalg.is_column_stochastic(A)}
    if linalg.is_real(A) and np.all(np.real(A) >= 0):
        A = np.real(A)
        result["irreducible"] = linalg.is_irreducible(A)
        result["primitive"] = linalg.is_primitive(A)
        result["max_row_min"] = float(A.min(axis=1).max())
    if result["stochastic"]:
        S = linalg.StochasticMatrix(A)
        result["tau_n1"] = coef.tau_n1(S)
        result["bound_lambda2"] = limits.check_bound_lambda2(S).to_dict()
        result["corollary"] = stationary.primitivity_corollary_check(S).to_dict()
    return _report(args, result, digest), EXIT_OK


# ---------------------------------------------------------------------------
# parser
# ---------------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="ergocoef",
                                description="Ergodicity coefficients of nonnegative and complex matrices.")
    p.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = p.add_subparsers(dest="command", required=True)

    def matrix_cmd(name, helptext):
        sp = sub.add_parser(name, help=helptext)
        sp.add_argument("matrix", help="matrix file (.mtx, .csv or .json)")
        sp.add_argument("--format", choices=mmio.FORMATS, help="override format detection")
        sp.add_argument("--timing", action="store_true", help="add wall time to the report")
        return sp

    sp = matrix_cmd("coeff", "compute one ergodicity coefficient")
    sp.add_argument("--coef", required=True,
                    choices=["tau_n1", "tau_m", "tau_m_min", "tau_haviv", "phi", "mu", "tau_vecnorm"])
    sp.add_argument("--norm", default="two", help="one, two, inf, box or box:<inner>")
    sp.add_argument("--m", type=int)
    sp.add_argument("--y", help="left Perron vector file for tau_haviv")
    sp.add_argument("--x", help="right Perron vector file for mu / tau_vecnorm")
    sp.add_argument("--w", help="Jordan basis file for phi")
    sp.add_argument("--budget", type=int, default=100_000)
    sp.add_argument("--seed", type=int, default=0)
    sp.set_defaults(func=cmd_coeff)

    sp = matrix_cmd("stationary", "stationary distribution of a stochastic matrix")
    sp.add_argument("--method", choices=["msystem", "power", "both"], default="both")
    sp.add_argument("--tol", type=float, default=1e-13)
    sp.set_defaults(func=cmd_stationary)

    sp = matrix_cmd("limit", "k-th root limit study")
    sp.add_argument("--study", choices=["tau_n1", "phi"], default="tau_n1")
    sp.add_argument("--norm", default="two")
    sp.add_argument("--w", help="Jordan basis file for the phi study")
    sp.add_argument("--kmax", type=int, default=256)
    sp.add_argument("--tol", type=float, default=limits.DEFAULT_TOL)
    sp.add_argument("--budget", type=int, default=20_000)
    sp.add_argument("--seed", type=int, default=0)
    sp.set_defaults(func=cmd_limit)

    sp = sub.add_parser("conjecture", help="fuzz |lambda_k| <= tau_{n-k+1}")
    sp.add_argument("--n", type=int, default=4)
    sp.add_argument("--trials", type=int, default=100)
    sp.add_argument("--seed", type=int, default=0)
    sp.add_argument("--variant", choices=["max", "min"], default="max")
    sp.add_argument("--inject", help="matrix file evaluated as trial 0")
    sp.add_argument("--sparsity", type=float, default=conjecture.DEFAULT_SPARSITY)
    sp.add_argument("--timing", action="store_true")
    sp.set_defaults(func=cmd_conjecture)

    sp = matrix_cmd("check", "structural properties and bound checks")
    sp.set_defaults(func=cmd_check)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_INVALID if exc.code else EXIT_OK
    started = time.perf_counter()
    try:
        report, code = args.func(args)
    except PreconditionError as exc:
        print(f"precondition not met: {exc}", file=sys.stderr)
        return EXIT_PRECONDITION
    except InternalError:
        raise
    except (ErgoError, ValueError) as exc:
        print(f"invalid input: {exc}", file=sys.stderr)
        return EXIT_INVALID
    if getattr(args, "timing", False):
        report["wall_time_s"] = time.perf_counter() - started
    sys.stdout.write(dumps_stable(report))
    return code


if __name__ == "__main__":
    sys.exit(main())
