"""Command-line front end.

Exit codes: 0 computed, 1 mismatch (``vk --assert-zero`` on a nonzero class,
failed atlas claims or acceptance criteria), 2 inconclusive verdict, 3 input error.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
import time
from pathlib import Path

import numpy as np

from . import __version__
from .complexes import SimplicialComplex, SimplicialMap, is_zero
from .exactalg import IntMatrix, snf
from .obstruction import (
    DEFAULT_SEED,
    char_class_or_zero,
    coindex,
    deleted_product,
    embeddability_report,
    restricted_vanishing,
    sigma_subcomplex,
)
from .towers import Stabilizing, delta_218, lim_lim1, tower_from_json, verify_verdict

SCHEMA_VERSION = "1"
OUTPUT_DIR_ENV = "VKAMPEN_OUTPUT_DIR"

EXIT_OK, EXIT_MISMATCH, EXIT_INCONCLUSIVE, EXIT_INPUT = 0, 1, 2, 3


class InputError(Exception):
    """Malformed or unusable input; carries a location for the diagnostic."""

    def __init__(self, where: str, message: str):
        super().__init__(f"{where}: {message}")


def _stringify(x):
    """Integers become decimal strings so that no reader loses precision."""
    if isinstance(x, dict):
        return {str(k): _stringify(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [_stringify(v) for v in x]
    if isinstance(x, bool) or x is None or isinstance(x, str):
        return x
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    if isinstance(x, np.ndarray):
        return _stringify(x.tolist())
    return str(x)


def _load_json(path: str):
    try:
        text = Path(path).read_text() if path != "-" else sys.stdin.read()
    except OSError as exc:
        raise InputError(path, exc.strerror or str(exc)) from None
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise InputError(f"{path}:{exc.lineno}:{exc.colno}", exc.msg) from None


def _field(obj, key: str, where: str):
    if not isinstance(obj, dict):
        raise InputError(where, f"expected an object, got {type(obj).__name__}")
    if key not in obj:
        raise InputError(where, f"missing field '{key}'")
    return obj[key]


def _parse(where: str, fn, *args):
    try:
        return fn(*args)
    except (ValueError, TypeError, KeyError) as exc:
        raise InputError(where, str(exc)) from None


def _load_complex(path: str, obj=None, where: str | None = None) -> SimplicialComplex:
    obj = _load_json(path) if obj is None else obj
    where = where or path
    _field(obj, "facets", where)
    return _parse(where, SimplicialComplex.from_json, obj, Path(path).stem if path != "-" else "stdin")


def _load_matrix(path: str) -> np.ndarray:
    obj = _load_json(path)
    if isinstance(obj, list):
        if not obj:
            return np.zeros((0, 0), dtype=object)
        rows = len(obj)
        cols = len(obj[0]) if isinstance(obj[0], list) else -1
        for r, row in enumerate(obj):
            if not isinstance(row, list) or len(row) != cols:
                raise InputError(f"{path}[{r}]", "rows must be lists of equal length")
        obj = {"rows": rows, "cols": cols, "entries": obj}
    return _parse(path, IntMatrix.from_json, obj).a


# ---------------------------------------------------------------------------
# Commands; each returns (report, exit code, text lines)


def cmd_snf(args):
    M = _load_matrix(args.input)
    dec = snf(M)
    report = {"invariant_factors": list(dec.invariant_factors), "rank": dec.rank,
              "U": dec.U.to_json(), "D": dec.D.to_json(), "V": dec.V.to_json(), "verified": dec.verify(M)}
    text = [f"shape {M.shape[0]}x{M.shape[1]}, rank {dec.rank}",
            "invariant factors: " + (" ".join(str(d) for d in dec.invariant_factors) or "(none)"),
            f"U M V = D verified: {report['verified']}"]
    return report, EXIT_OK, text


def _homology(cx, d: int):
    """H_d from ranks and the invariant factors of the boundary into degree d."""
    from .exactalg import FgAbGroup, gf2_rank

    n = cx.dim(d)
    if cx.ring == "Z2":
        r_out = gf2_rank(cx.boundary(d)) if d > 0 and n else 0
        r_in = gf2_rank(cx.boundary(d + 1)) if d + 1 < len(cx.cells) and n else 0
        return FgAbGroup(0, (2,) * (n - r_out - r_in))
    r_out = snf(cx.boundary(d)).rank if d > 0 and n else 0
    factors = snf(cx.boundary(d + 1)).invariant_factors if d + 1 < len(cx.cells) and n else ()
    return FgAbGroup(n - r_out - len(factors), tuple(f for f in factors if f > 1))


def cmd_homology(args):
    K = _load_complex(args.input)
    cx = K.chain_complex(args.ring)
    rows = []
    for d in range(K.dim + 1):
        h = _homology(cx, d)
        c = cx.cohomology(d).group
        rows.append({"degree": d, "homology": h.to_json(), "homology_text": h.describe(),
                     "cohomology": c.to_json(), "cohomology_text": c.describe()})
    report = {"complex": K.name, "ring": args.ring, "f_vector": K.f_vector(), "groups": rows}
    text = [f"{K.name}: f-vector {K.f_vector()}, coefficients {args.ring}"]
    text += [f"  degree {r['degree']}: H_* = {r['homology_text']}, H^* = {r['cohomology_text']}" for r in rows]
    return report, EXIT_OK, text


def cmd_vk(args):
    K = _load_complex(args.input)
    if args.m < 0:
        raise InputError("-m", "degree must be nonnegative")
    rep = embeddability_report(K, args.m, seed=args.seed, cross_check=not args.no_cross_check)
    report = rep.to_json()
    code = EXIT_OK
    if args.assert_zero and not rep.verdict.zero:
        code = EXIT_MISMATCH
    text = [f"{rep.complex}: obstruction in degree {args.m} is {rep.verdict.label}",
            f"  routes: {', '.join(rep.route)}; witness verified: {report['witness_verified']}",
            f"  completeness: {rep.completeness_label} (n={rep.hypotheses['n']}, range {rep.hypotheses['range']})"]
    text += [f"  note: {n}" for n in rep.notes]
    return report, code, text


def cmd_coindex(args):
    K = _load_complex(args.input)
    dp = deleted_product(K)
    value = coindex(K, dp)
    report = {"complex": K.name, "coindex": value, "deleted_product_dimension": dp.top}
    return report, EXIT_OK, [f"{K.name}: co-index {value} (deleted product dimension {dp.top})"]


def cmd_tower(args):
    obj = _load_json(args.input)
    t = _parse(args.input, tower_from_json, obj)
    v = lim_lim1(t)
    report = {"tower": obj.get("variant"), "verdict": v.to_json(), "verified": verify_verdict(t, v)}
    code = EXIT_INCONCLUSIVE if "inconclusive" in (v.ml.status, v.lim1) else EXIT_OK
    lim = report["verdict"]["lim"]
    lim_text = lim if isinstance(lim, str) else lim.get("text", lim.get("described"))
    text = [f"Mittag-Leffler: {v.ml.status}", f"lim: {lim_text}", f"lim^1: {v.lim1}",
            f"certificates verified: {report['verified']}"]
    text += [f"note: {n}" for n in v.notes]
    return report, code, text


def cmd_delta218(args):
    from .atlas import ljubljana_tower

    if args.input:
        obj = _load_json(args.input)
        t = _parse(f"{args.input}:tower", tower_from_json, _field(obj, "tower", args.input))
        thread = _field(obj, "thread", args.input)
        lifts = obj.get("lifts")
        source = args.input
    else:
        lw = ljubljana_tower(args.n, args.depth)
        t, thread, lifts = lw.tower, lw.thread, lw.lifts
        source = f"doubly indexed window (n={args.n}, depth={args.depth})"
    constraint = None
    if args.margin is not None:
        if t.labels is None:
            raise InputError("--margin", "stabilization needs (j, k) labels on the tower")
        depth = min(args.depth, t.depth) if args.input else args.depth
        constraint = Stabilizing(depth, args.margin)
    try:
        r = delta_218(t, thread, lifts, constraint=constraint)
    except ValueError as exc:
        raise InputError(source, str(exc)) from None
    report = {"source": source, "result": r.to_json()}
    code = EXIT_INCONCLUSIVE if r.verdict.status == "inconclusive" else EXIT_OK
    text = [f"{source}", "halves: " + "; ".join(" ".join(str(v) for v in h) for h in r.halves),
            f"system: {r.verdict.status}"]
    if r.verdict.caveat:
        text.append(f"caveat: {r.verdict.caveat}")
    return report, code, text


def cmd_stagecheck(args):
    obj = _load_json(args.input)
    src = _load_complex(args.input, _field(obj, "source", args.input), f"{args.input}:source")
    tgt = _load_complex(args.input, _field(obj, "target", args.input), f"{args.input}:target")
    p = _parse(f"{args.input}:map", SimplicialMap.from_json, _field(obj, "map", args.input), src, tgt)
    m = int(obj.get("m", 2 * max(src.dim, 0)))
    dp = deleted_product(src)
    klass, trivial = char_class_or_zero(dp, m)
    sigma, comp = sigma_subcomplex(dp, p)
    full = is_zero(klass)
    restricted = restricted_vanishing(klass, dp, comp)
    report = {
        "m": m,
        "class": full.to_json(),
        "sigma_cells": [len(s) for s in sigma],
        "complement_cells": [len(s) for s in comp],
        "restricted": restricted.to_json(),
        "notes": ["the neighbourhood of the diagonal is modeled by pairs of cells whose images share a vertex"],
    }
    text = [f"degree {m}: class {full.label}; restricted to the complement of the collapse locus: {restricted.label}",
            f"  complement cells per degree: {report['complement_cells']}"]
    return report, EXIT_OK, text


def _parse_params(items) -> dict:
    out = {}
    for item in items or []:
        if "=" not in item:
            raise InputError("--param", f"expected key=value, got {item!r}")
        k, v = item.split("=", 1)
        try:
            out[k] = int(v)
        except ValueError:
            raise InputError(f"--param {k}", f"value {v!r} is not an integer") from None
    return out


def _describe_product(product: dict) -> dict:
    from .complexes import Filtration
    from .towers import ExplicitTower

    out = {}
    for key, val in product.items():
        if isinstance(val, SimplicialComplex):
            out[key] = {"name": val.name, "f_vector": val.f_vector(), "complex": val.to_json()}
        elif isinstance(val, SimplicialMap):
            out[key] = val.to_json()
        elif isinstance(val, Filtration):
            out[key] = {"stages": [st.f_vector() for st in val.stages]}
        elif isinstance(val, ExplicitTower):
            out[key] = val.to_json()
        elif val is None:
            out[key] = None
        else:
            out[key] = val
    return out


def cmd_atlas(args):
    from .atlas import atlas_names, build

    if args.action == "list":
        names = atlas_names()
        return {"entries": names}, EXIT_OK, names
    if not args.name:
        raise InputError("atlas build", "missing entry name")
    params = _parse_params(args.param)
    try:
        entry = build(args.name, **params)
    except TypeError as exc:
        raise InputError(f"atlas build {args.name}", str(exc)) from None
    except ValueError as exc:
        raise InputError(f"atlas build {args.name}", str(exc)) from None
    results = entry.run_claims() if not args.no_check else []
    report = {"name": entry.name, "parameters": entry.parameters, "notes": entry.notes, "claims": results}
    if args.include_product:
        report["product"] = _describe_product(entry.product)
    code = EXIT_MISMATCH if any(not r["ok"] for r in results) else EXIT_OK
    text = [f"{entry.name} {entry.parameters}"]
    for r in results:
        text.append(f"  [{'ok' if r['ok'] else 'MISMATCH'}] {r['operation']}: expected {r['expected']}, "
                    f"observed {r['observed']} ({r['reference']})")
    text += [f"  note: {n}" for n in entry.notes]
    return report, code, text


def cmd_accept(args):
    from .acceptance import TOTAL_LIMIT, run_all

    only = [int(x) for x in args.only.split(",")] if args.only else None
    echo = print if args.format == "text" else None
    start = time.perf_counter()
    results = run_all(seed=args.seed, cases=args.cases, only=only, echo=echo, depth=args.depth, margin=args.margin)
    total = time.perf_counter() - start
    ok = all(r.passed for r in results) and (only is not None or total < TOTAL_LIMIT)
    report = {"criteria": [r.to_json() for r in results], "total_seconds": f"{total:.3f}", "passed": ok}
    text = [] if echo else [r.line() for r in results]
    if args.verbose:
        for r in results:
            text += [f"  {r.number}: {d}" for d in r.details]
    text.append(f"{'all criteria passed' if ok else 'some criteria FAILED'} in {total:.1f}s")
    return report, EXIT_OK if ok else EXIT_MISMATCH, text


# ---------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--format", choices=["text", "json"], default="text")
    common.add_argument("--seed", type=int, default=DEFAULT_SEED, help="seed for every randomized choice")
    common.add_argument("-o", "--output", help="also write the JSON report to this file")
    common.add_argument("--output-dir", default=os.environ.get(OUTPUT_DIR_ENV),
                        help=f"directory for JSON reports (default from ${OUTPUT_DIR_ENV})")

    p = argparse.ArgumentParser(prog="vkampen", description="Exact van Kampen obstructions and derived limits.")
    p.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = p.add_subparsers(dest="command", required=True)

    s = sub.add_parser("snf", parents=[common], help="Smith normal form of an integer matrix")
    s.add_argument("input")
    s.set_defaults(func=cmd_snf)

    s = sub.add_parser("homology", parents=[common], help="homology and cohomology of a simplicial complex")
    s.add_argument("input")
    s.add_argument("--ring", choices=["Z", "Z2"], default="Z")
    s.set_defaults(func=cmd_homology)

    s = sub.add_parser("vk", parents=[common], help="obstruction class e^m of the deleted product")
    s.add_argument("input")
    s.add_argument("-m", type=int, required=True, help="target dimension")
    s.add_argument("--assert-zero", action="store_true", help="exit 1 when the class is nonzero")
    s.add_argument("--no-cross-check", action="store_true", help="skip the Bockstein and geometric routes")
    s.set_defaults(func=cmd_vk)

    s = sub.add_parser("coindex", parents=[common], help="largest m with nonzero e^m")
    s.add_argument("input")
    s.set_defaults(func=cmd_coindex)

    s = sub.add_parser("tower", parents=[common], help="Mittag-Leffler verdict, lim and lim^1 of a tower")
    s.add_argument("input")
    s.set_defaults(func=cmd_tower)

    s = sub.add_parser("delta218", parents=[common], help="connecting map from mod-2 threads to lim^1")
    s.add_argument("input", nargs="?", help="JSON with tower, thread and optional lifts; default: built-in window")
    s.add_argument("--depth", type=int, default=6)
    s.add_argument("--margin", type=int, default=None, help="require stabilization by column depth - margin")
    s.add_argument("-n", type=int, default=1)
    s.set_defaults(func=cmd_delta218)

    s = sub.add_parser("stagecheck", parents=[common], help="obstruction restricted away from a bonding map's collapse locus")
    s.add_argument("input")
    s.set_defaults(func=cmd_stagecheck)

    s = sub.add_parser("atlas", parents=[common], help="built-in example stages")
    s.add_argument("action", choices=["list", "build"])
    s.add_argument("name", nargs="?")
    s.add_argument("--param", action="append", metavar="KEY=VALUE")
    s.add_argument("--no-check", action="store_true", help="build without running the claims")
    s.add_argument("--include-product", action="store_true", help="embed the built complexes and towers")
    s.set_defaults(func=cmd_atlas)

    s = sub.add_parser("accept", parents=[common], help="run the acceptance criteria")
    s.add_argument("--cases", type=int, default=200, help="seeded cases per property suite")
    s.add_argument("--only", help="comma-separated criterion numbers")
    s.add_argument("--depth", type=int, default=6, help="window depth for criterion 8")
    s.add_argument("--margin", type=int, default=2, help="stabilization margin for criterion 8")
    s.add_argument("-v", "--verbose", action="store_true")
    s.set_defaults(func=cmd_accept)
    return p


def _dump(report: dict) -> str:
    return json.dumps(_stringify(report), indent=2, sort_keys=True) + "\n"


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        report, code, text = args.func(args)
    except InputError as exc:
        print(f"input error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    report = {"schema_version": SCHEMA_VERSION, "command": args.command, **report}
    blob = _dump(report)
    if args.format == "json":
        sys.stdout.write(blob)
    else:
        print("\n".join(text))
    targets = []
    if args.output:
        targets.append(Path(args.output))
    if args.output_dir:
        stem = Path(getattr(args, "input", None) or args.command).stem
        targets.append(Path(args.output_dir) / f"{args.command}-{stem}.json")
    for path in targets:
        path.parent.mkdir(parents=True, exist_ok=True)
        path.write_text(blob)
    return code


if __name__ == "__main__":
    sys.exit(main())
