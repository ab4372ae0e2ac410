"""``hc-zonal`` command line: one subcommand per verification experiment."""
from __future__ import annotations

import argparse
import csv
import io
import json
import sys
import time

import numpy as np

from . import decompose, experiments as ex
from .contour import QuadratureSpec
from .errors import HCError, InvalidInput, PoleError
from .rootsys import WeylElement

DEFAULTS = {
    1: {"lambda": "0.13,-0.05", "k": "0.4", "z": "1,2"},
    2: {"lambda": "0.21,-0.07,-0.11", "k": "0.6", "z": "1,2,4"},
}


def parse_complex_list(s: str) -> list[complex]:
    try:
        return [complex(x.strip().replace("i", "j")) for x in s.split(",") if x.strip()]
    except ValueError as exc:
        raise InvalidInput(f"cannot parse number list {s!r}") from exc


def parse_k(s: str) -> complex:
    parts = [float(x) for x in s.split(",")]
    if len(parts) == 1:
        return complex(parts[0])
    if len(parts) == 2:
        return complex(parts[0], parts[1])
    raise InvalidInput("--k takes re or re,im")


def parse_real_list(s: str) -> list[float]:
    try:
        return [float(x) for x in s.split(",") if x.strip()]
    except ValueError as exc:
        raise InvalidInput(f"cannot parse real list {s!r}") from exc


def _encode(o):
    if isinstance(o, complex):
        return [o.real, o.imag]
    if isinstance(o, np.generic):
        return o.item()
    if isinstance(o, np.ndarray):
        return o.tolist()
    raise TypeError(type(o))


def _flatten(prefix, obj, rows):
    if isinstance(obj, dict):
        for k, v in obj.items():
            _flatten(f"{prefix}.{k}" if prefix else str(k), v, rows)
    elif isinstance(obj, list) and obj and isinstance(obj[0], (dict, list)) and not (
            len(obj) == 2 and all(isinstance(x, float) for x in obj)):
        for i, v in enumerate(obj):
            _flatten(f"{prefix}[{i}]", v, rows)
    else:
        rows.append((prefix, json.dumps(obj, default=_encode)))


def to_csv(doc: dict) -> str:
    rows = []
    for section in ("inputs", "values", "residuals", "tolerances"):
        _flatten(section, doc.get(section, {}), rows)
    rows.append(("pass", json.dumps(doc.get("pass"))))
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["experiment", "key", "value"])
    for k, v in rows:
        w.writerow([doc["experiment"], k, v])
    return buf.getvalue()


def _quad(args, n):
    q = QuadratureSpec.default(n)
    return QuadratureSpec(tol=args.tol if args.tol is not None else q.tol,
                          n_max=args.nodes if args.nodes is not None else q.n_max)


def _params(args, n):
    d = DEFAULTS.get(n, {})
    lam = parse_complex_list(args.lam if args.lam is not None else d.get("lambda", ""))
    k = parse_k(args.k if args.k is not None else d.get("k", "0.6"))
    z = parse_real_list(args.z) if args.z is not None else parse_real_list(d.get("z", ""))
    return lam, k, z


def run(args) -> ex.ExperimentReport:
    cmd = args.command
    n = args.n
    if cmd == "cfunc":
        lam, k, _ = _params(args, n)
        w = WeylElement(tuple(int(x) - 1 for x in args.w.split(","))) if args.w else None
        if w is not None and sorted(w.perm) != list(range(n + 1)):
            raise InvalidInput("--w must be a permutation of 1..n+1")
        return ex.cmd_cfunc(n, lam, k, w)
    if cmd == "verify-decomposition":
        lam, k, z = _params(args, n)
        return ex.cmd_verify_decomposition(n, lam, k, z, _quad(args, n), variant=args.lemma23_variant or "corrected")
    if cmd == "verify-unity":
        k = parse_k(args.k) if args.k is not None else complex(0.5 if n == 1 else 0.75)
        q = None
        if args.tol is not None or args.nodes is not None:
            q = QuadratureSpec(tol=args.tol or (1e-12 if n == 1 else 1e-8), n_max=args.nodes or 256)
        return ex.cmd_verify_unity(n, k, q)
    if cmd == "verify-connection-identity":
        return ex.cmd_verify_connection_identity(n, args.samples or 100, args.seed)
    if cmd == "verify-wrong-diagram":
        k = parse_k(args.k) if args.k is not None else 0.37
        z = parse_real_list(args.z) if args.z else (1.0, 2.0, 4.0)
        lam = parse_complex_list(args.lam) if args.lam else (0.21, -0.07, -0.11)
        return ex.cmd_verify_wrong_diagram(k, z, lam, nodes=args.nodes or 32)
    if cmd == "cross-route":
        lam = parse_complex_list(args.lam) if args.lam else (0.3, -0.3)
        k = parse_k(args.k) if args.k is not None else 0.65
        z = parse_real_list(args.z) if args.z else (0.2, 1.0)
        return ex.cmd_cross_route(lam, k, z, n_max=args.nmax, q=_quad(args, 1))
    if cmd == "verify-elementary":
        return ex.cmd_verify_elementary(args.samples or 5, args.seed, args.lemma23_variant)
    if cmd == "verify-engine":
        return ex.cmd_verify_engine(samples=args.samples or 50, seed=args.seed,
                                    variant=args.lemma23_variant or "corrected")
    if cmd == "verify-series":
        return ex.cmd_verify_series(height=min(args.nmax, 30), samples=args.samples or 100, seed=args.seed)
    if cmd == "verify-gk":
        return ex.cmd_verify_gk(samples=args.samples or 100, seed=args.seed)
    if cmd == "dump-diagrams":
        t0 = time.perf_counter()
        variant = args.lemma23_variant or "corrected"
        text = decompose.dump_diagrams(n, variant)
        rep = ex.ExperimentReport("dump-diagrams", {"n": n, "variant": variant})
        rep.values["lines"] = text.splitlines()
        rep.values["count"] = len(rep.values["lines"])
        return rep.finish(t0)
    raise InvalidInput(f"unknown command {cmd}")


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="hc-zonal", description=__doc__)
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--n", type=int, default=1, help="rank")
    common.add_argument("--lambda", dest="lam", help="comma list of n+1 components (complex allowed, e.g. 0.1+0.2j)")
    common.add_argument("--k", help="coupling as re or re,im")
    common.add_argument("--z", help="comma list of arguments")
    common.add_argument("--w", help="Weyl element in one-line notation, e.g. 2,1,3")
    common.add_argument("--tol", type=float, help="quadrature tolerance (relative)")
    common.add_argument("--nodes", type=int, help="quadrature nodes per layer (budget)")
    common.add_argument("--nmax", type=int, default=30, help="series truncation height")
    common.add_argument("--seed", type=int, default=0)
    common.add_argument("--samples", type=int)
    common.add_argument("--json", dest="json_path", help="also write the report to this path")
    common.add_argument("--csv", action="store_true", help="print flat CSV rows instead of JSON")
    common.add_argument("--lemma23-variant", choices=decompose.VARIANTS)
    common.add_argument("--no-timing", action="store_true", help="omit runtime_ms (byte-reproducible output)")
    sub = p.add_subparsers(dest="command", required=True)
    for name in ("cfunc", "verify-decomposition", "verify-unity", "verify-connection-identity",
                 "verify-wrong-diagram", "cross-route", "verify-elementary", "verify-engine",
                 "verify-series", "verify-gk", "dump-diagrams"):
        sub.add_parser(name, parents=[common])
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        rep = run(args)
        doc = rep.to_dict()
        code = 0 if rep.passed else 1
    except HCError as exc:
        doc = {"schema": ex.SCHEMA_VERSION, "experiment": args.command, "inputs": {}, "values": {},
               "residuals": {}, "tolerances": {}, "pass": False, "runtime_ms": None,
               "conformance_notes": [],
               "error": {"type": type(exc).__name__, "message": str(exc)}}
        if isinstance(exc, PoleError) and exc.root is not None:
            doc["error"]["root"] = list(exc.root)
        code = exc.exit_code
    if args.no_timing:
        doc["runtime_ms"] = None
    text = json.dumps(doc, default=_encode, sort_keys=True, indent=2)
    if args.json_path:
        with open(args.json_path, "w") as fh:
            fh.write(text + "\n")
    if args.command == "dump-diagrams" and "error" not in doc and not args.csv:
        sys.stdout.write("\n".join(doc["values"]["lines"]) + "\n")
    elif args.csv:
        sys.stdout.write(to_csv(doc))
    else:
        sys.stdout.write(text + "\n")
    return code


if __name__ == "__main__":
    sys.exit(main())
