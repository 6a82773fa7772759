"""Command-line front end.

Exit codes: 0 success, 2 invalid input, 3 enumeration cap exceeded.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import sys
from pathlib import Path

import numpy as np

from . import exponents, guesswork, reduction, typeclasses
from .errors import CapExceededError, InputError
from .pmf import JointPmf, Pmf, arimoto_conditional_entropy, marginals, renyi_entropy

EXIT_OK, EXIT_INPUT, EXIT_CAP = 0, 2, 3
NATS_PER_BIT = math.log(2)


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        raise InputError(message)


def _load(path: str) -> dict:
    try:
        obj = json.loads(Path(path).read_text())
    except OSError as exc:
        raise InputError(f"cannot read {path}: {exc.strerror}") from None
    except json.JSONDecodeError as exc:
        raise InputError(f"{path} is not valid JSON: {exc}") from None
    if not isinstance(obj, dict):
        raise InputError(f"{path} must hold a JSON object")
    return obj


def _load_key(path: str, key: str):
    obj = _load(path)
    if key not in obj:
        raise InputError(f'{path} has no "{key}" key')
    return obj[key]


def _load_pmf(path: str) -> Pmf:
    return Pmf(_load_key(path, "pmf"))


def _load_joint(path: str) -> JointPmf:
    return JointPmf(_load_key(path, "joint"))


def _load_map(path: str) -> reduction.MergeMap:
    return reduction.MergeMap.from_json(_load(path))


def _alpha(text: str) -> float:
    if text.lower() in ("inf", "infinity"):
        return math.inf
    return float(text)


def _shape(text: str) -> tuple[int, int]:
    try:
        k, l = (int(v) for v in text.lower().split("x"))
    except ValueError:
        raise argparse.ArgumentTypeError(f"shape must look like KxL, got {text!r}") from None
    return k, l


def _to_unit(bits: float, nats: bool) -> float:
    return bits * NATS_PER_BIT if nats else bits


def _unit(args) -> str:
    return "nats" if args.nats else "bits"


# --- subcommands -----------------------------------------------------------


def cmd_entropy(args) -> dict:
    if args.joint:
        joint = _load_joint(args.joint)
        px = marginals(joint)[0]
        return {"joint": joint.masses.tolist(), "alpha": args.alpha, "unit": _unit(args),
                "entropy": _to_unit(renyi_entropy(px, args.alpha), args.nats),
                "conditional_entropy": _to_unit(arimoto_conditional_entropy(joint, args.alpha), args.nats)}
    if not args.pmf:
        raise InputError("entropy needs --pmf or --joint")
    p = _load_pmf(args.pmf)
    return {"pmf": p.masses.tolist(), "alpha": args.alpha, "unit": _unit(args),
            "entropy": _to_unit(renyi_entropy(p, args.alpha), args.nats)}


def cmd_reduce(args) -> dict:
    p = _load_pmf(args.pmf)
    f, merged = reduction.huffman_reduce(p, args.m)
    return {"pmf": p.masses.tolist(), "m": f.m, "map": list(f.labels),
            "merged": merged.masses.tolist(), "reduced": reduction.reduce_pmf(p, args.m).masses.tolist()}


def cmd_moments(args) -> dict:
    p = _load_pmf(args.pmf)
    out = {"pmf": p.masses.tolist(), "n": args.n, "rho": args.rho}
    if args.map:
        f = _load_map(args.map)
        res = guesswork.two_stage_moment(p, f, args.n, args.rho, cap=args.cap)
        bounds = guesswork.two_stage_moment_bounds(p, f, args.n, args.rho)
        out.update(f.to_json())
        out.update(value=res.value, lower=bounds.lower, upper=bounds.upper)
        if bounds.huffman_lower is not None:
            out.update(huffman_lower=bounds.huffman_lower, huffman_upper=bounds.huffman_upper)
    else:
        res = guesswork.guess_moment(p, args.n, args.rho, cap=args.cap)
        h = renyi_entropy(p, 1.0 / (1.0 + args.rho))
        lower, upper = guesswork.arikan_sandwich(h, args.n, args.rho, p.support_size)
        out.update(value=res.value, lower=lower, upper=upper)
    out["log_value_over_n"] = _to_unit(res.log2_value_over_n, args.nats)
    out["unit"] = _unit(args)
    return out


def _type_moment_record(t: typeclasses.TypeDescriptor, policy: str, rho: float, cap: int, nats: bool) -> dict:
    policies = list(typeclasses.StageOneSet) if policy == "best" else [typeclasses.StageOneSet.parse(policy)]
    results = {pol.value: typeclasses.type_class_two_stage_moment(t, pol, rho, cap) for pol in policies}
    best_policy = min(results, key=lambda key: results[key].value)
    best = results[best_policy]
    x, y = t.shape
    return {"counts": t.counts.tolist(), "n": t.n, "rho": rho, "policy": best_policy,
            "value": best.value, "log_value_over_n": _to_unit(best.log2_value_over_n, nats),
            "target": _to_unit(exponents.two_stage_rate(t.joint(), rho), nats),
            "delta_n": _to_unit(typeclasses.delta_n(t.n, x, y), nats)}


def cmd_types(args) -> dict:
    if args.types_command == "enumerate":
        x, y = args.shape
        types = typeclasses.enumerate_types(args.n, x, y, cap=args.cap)
        return {"n": args.n, "shape": [x, y], "count": len(types),
                "types": [{"counts": t.counts.tolist(), "size": typeclasses.type_class_size(t)} for t in types]}
    obj = _load(args.counts)
    if "counts" in obj:
        t = typeclasses.TypeDescriptor(np.array(obj["counts"]))
        return _type_moment_record(t, args.policy, args.rho, args.cap, args.nats)
    if "types" in obj:
        return {"results": [_type_moment_record(typeclasses.TypeDescriptor(np.array(e["counts"])),
                                                args.policy, args.rho, args.cap, args.nats)
                            for e in obj["types"]]}
    raise InputError(f'{args.counts} needs a "counts" or "types" key')


def _report(rep: exponents.ExponentReport, nats: bool) -> dict:
    out = rep.to_json()
    for key in ("value", "lower", "upper"):
        out[key] = _to_unit(out[key], nats)
    return out


def cmd_exponents(args) -> dict:
    which = args.which
    if which == "variational":
        if args.joint:
            joint = _load_joint(args.joint)
            rep = exponents.variational_exponent(joint, args.rho, args.resolution)
            out = _report(rep, args.nats)
            out["joint"] = out["witness"]
        elif args.pmf:
            rep = exponents.single_stage_variational(_load_pmf(args.pmf), args.rho, args.resolution)
            out = _report(rep, args.nats)
            out["pmf"] = out["witness"]
        else:
            raise InputError("variational needs --joint (two-stage) or --pmf (single-stage)")
    else:
        if not args.pmf:
            raise InputError(f"{which} needs --pmf")
        p = _load_pmf(args.pmf)
        if which == "e1":
            v = exponents.e1(p, args.rho)
            out = {"value": _to_unit(v, args.nats), "lower": _to_unit(v, args.nats),
                   "upper": _to_unit(v, args.nats), "witness": None}
        elif which == "e2":
            if not args.map:
                raise InputError("e2 needs --map")
            f = _load_map(args.map)
            v = exponents.e2(p, f, args.rho)
            out = {"value": _to_unit(v, args.nats), "lower": _to_unit(v, args.nats),
                   "upper": _to_unit(v, args.nats), "witness": None, **f.to_json()}
        else:
            if args.m is None:
                raise InputError("bounds needs --m")
            out = _report(exponents.e2_bounds_huffman(p, args.m, args.rho), args.nats)
        out["pmf"] = p.masses.tolist()
    out.update(rho=args.rho, unit=_unit(args))
    return out


def cmd_vcurve(args) -> dict:
    if not 0 < args.alpha_min <= args.alpha_max or args.steps < 1:
        raise InputError("need 0 < alpha-min <= alpha-max and steps >= 1")
    alphas = np.linspace(args.alpha_min, args.alpha_max, args.steps) if args.steps > 1 else np.array([args.alpha_min])
    return {"alpha": alphas.tolist(), "v": [_to_unit(reduction.v_gap(a), args.nats) for a in alphas],
            "unit": _unit(args)}


# --- output ------------------------------------------------------------------


def _rows(result: dict) -> tuple[list[str], list[list]]:
    """Flatten a result dict into CSV rows: column-parallel lists become rows."""
    if "alpha" in result and "v" in result:
        return ["alpha", "v"], [list(r) for r in zip(result["alpha"], result["v"])]
    if "types" in result:
        return ["counts", "size"], [[json.dumps(t["counts"]), t["size"]] for t in result["types"]]
    if "results" in result:
        keys = list(result["results"][0]) if result["results"] else []
        return keys, [[json.dumps(r[k]) if isinstance(r[k], list) else r[k] for k in keys] for r in result["results"]]
    keys = list(result)
    return keys, [[json.dumps(result[k]) if isinstance(result[k], (list, dict)) else result[k] for k in keys]]


def _emit(result: dict, as_csv: bool, stream) -> None:
    if as_csv:
        header, rows = _rows(result)
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(header)
        writer.writerows(rows)
        stream.write(buf.getvalue())
    else:
        stream.write(json.dumps(result, indent=2) + "\n")


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--csv", action="store_true", help="emit CSV instead of JSON")
    common.add_argument("--nats", action="store_true", help="report information quantities in nats")
    common.add_argument("--cap", type=int, default=guesswork.DEFAULT_CAP, help="enumeration cap")

    parser = _Parser(prog="guesslab", description="Two-stage guessing toolkit.")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("entropy", parents=[common], help="Rényi / Arimoto–Rényi entropy")
    p.add_argument("--pmf")
    p.add_argument("--joint")
    p.add_argument("--alpha", type=_alpha, required=True)
    p.set_defaults(func=cmd_entropy)

    p = sub.add_parser("reduce", parents=[common], help="Huffman-merge map and reduced PMF")
    p.add_argument("--pmf", required=True)
    p.add_argument("--m", type=int, required=True)
    p.set_defaults(func=cmd_reduce)

    p = sub.add_parser("moments", parents=[common], help="exact guessing moments and their bounds")
    p.add_argument("--pmf", required=True)
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--rho", type=float, required=True)
    p.add_argument("--map")
    p.set_defaults(func=cmd_moments)

    p = sub.add_parser("types", help="denominator-n joint types")
    tsub = p.add_subparsers(dest="types_command", required=True, parser_class=_Parser)
    t = tsub.add_parser("enumerate", parents=[common])
    t.add_argument("--n", type=int, required=True)
    t.add_argument("--shape", type=_shape, required=True)
    t = tsub.add_parser("moment", parents=[common])
    t.add_argument("--counts", required=True)
    t.add_argument("--policy", default="best", choices=["skip", "fully", "full-y", "best"])
    t.add_argument("--rho", type=float, required=True)
    p.set_defaults(func=cmd_types)

    p = sub.add_parser("exponents", parents=[common], help="guessing exponents")
    p.add_argument("which", choices=["e1", "e2", "bounds", "variational"])
    p.add_argument("--pmf")
    p.add_argument("--joint")
    p.add_argument("--map")
    p.add_argument("--rho", type=float, required=True)
    p.add_argument("--m", type=int)
    p.add_argument("--resolution", type=int)
    p.set_defaults(func=cmd_exponents)

    p = sub.add_parser("vcurve", parents=[common], help="the gap function v(alpha), as CSV unless --json")
    p.add_argument("--alpha-min", type=float, default=0.05)
    p.add_argument("--alpha-max", type=float, default=10.0)
    p.add_argument("--steps", type=int, default=200)
    p.add_argument("--json", action="store_true")
    p.set_defaults(func=cmd_vcurve)
    return parser


def run(argv: list[str] | None = None, stdout=None, stderr=None) -> int:
    stdout = stdout or sys.stdout
    stderr = stderr or sys.stderr
    try:
        args = build_parser().parse_args(argv)
        result = args.func(args)
        as_csv = (not args.json) if args.command == "vcurve" else args.csv
        _emit(result, as_csv, stdout)
        return EXIT_OK
    except CapExceededError as exc:
        print(f"guesslab: {exc}", file=stderr)
        return EXIT_CAP
    except InputError as exc:
        print(f"guesslab: {exc}", file=stderr)
        return EXIT_INPUT


def main() -> None:
    sys.exit(run())
