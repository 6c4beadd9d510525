"""Command-line front end: ``ellfib families | build | dims | chow | invariants``.

Exit codes: 0 pass, 1 verification failure, 2 usage or input error, 3 undecided.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from importlib import resources
from pathlib import Path

from . import __version__
from .chow_ring import ChowClass, ChowError, evaluate
from .ec_core import CurveError, EllipticCurve
from .moduli_catalog import (
    FAMILY_NAMES,
    TorsionError,
    catalog,
    dimension,
    expected_dim_bound,
    family,
    frame_from_curve,
    invariants,
)

EXIT_PASS, EXIT_FAIL, EXIT_USAGE, EXIT_UNDECIDED = 0, 1, 2, 3
OUTPUT_ENV = "ELLFIB_OUTPUT_DIR"
SCHEMA_VERSION = "1"


@dataclass(frozen=True)
class RunConfig:
    command: str
    family: str | None = None
    curve: tuple | None = None
    seed: int = 0
    fmt: str = "text"
    output: str | None = None


def load_schema(kind: str) -> dict:
    """Shipped JSON schema for one output kind: member, families, dims, chow or invariants."""
    return json.loads(resources.files("ellfib").joinpath("schemas", f"{kind}.schema.json").read_text())


def _emit(text: str, output: str | None):
    if output:
        Path(output).write_text(text if text.endswith("\n") else text + "\n")
    else:
        sys.stdout.write(text if text.endswith("\n") else text + "\n")


def _dump(obj) -> str:
    return json.dumps(obj, sort_keys=True, indent=2, ensure_ascii=False)


# ---------------------------------------------------------------------------
# families


def _expr_str(expr) -> str:
    parts = []
    for name, n in expr:
        parts.append(name if n == 1 else f"{n}*{name}")
    return "+".join(parts).replace("+-", "-") or "0"


def family_record(desc) -> dict:
    from .rel_forms import conic_display, cubic_display

    rec = desc.to_json()
    rec["conic"] = conic_display(desc)
    rec["cubic"] = cubic_display(desc)
    rec["sigma2_shape"] = [list(r) for r in desc.shape]
    rec["schema_version"] = SCHEMA_VERSION
    return rec


def cmd_families(name: str | None = None, fmt: str = "text") -> str:
    descs = [family(name)] if name else catalog()
    if fmt == "json":
        return _dump([family_record(d) for d in descs])
    lines = []
    for d in descs:
        r = family_record(d)
        lines.append(f"{d.name} ({d.label})  V1: {d.v1}")
        lines.append(f"  D1, D2, D3: {', '.join(_expr_str(e) for e in d.D)}")
        lines.append(f"  |tau|: {_expr_str(d.tau)}{' (fixed)' if d.tau_fixed else ''}")
        lines.append("  sigma2: " + " / ".join(" ".join(row) for row in d.shape))
        lines.append(f"  conic: {r['conic']}")
        lines.append(f"  cubic: {r['cubic']}")
    return "\n".join(lines)


# ---------------------------------------------------------------------------
# build


def _build_one(args) -> dict:
    from .branch import search_member

    name, seed, curve, attempts, force_b, cap = args
    E = EllipticCurve(*curve) if curve else None
    rep, n = search_member(name, seed=seed, curve=E, attempts=attempts, force_b_zero=force_b, degree_cap=cap)
    out = rep.to_json()
    out["attempts"] = n
    out["schema_version"] = SCHEMA_VERSION
    return out


def _text_report(r: dict) -> str:
    c = r["conditions"]
    flags = " ".join(f"{k}={'yes' if v else 'no'}" for k, v in sorted(c.items()))
    line = f"{r['family']}: {r['status'].upper()} seed={r['seed']} attempts={r['attempts']} {flags}"
    line += f" components={r['components']} crit_length={r['crit_length']}"
    params = " ".join(f"{k}={v}" for k, v in sorted(r["params"].items()))
    extra = f"\n  params: {params}"
    if r["diagnosis"]:
        extra += "\n  diagnosis: " + "; ".join(r["diagnosis"])
    return line + extra


def cmd_build(names, seed=0, curve=None, attempts=50, force_b=False, cap=40, jobs=1):
    work = [(n, seed, curve, attempts, force_b, cap) for n in names]
    if jobs > 1 and len(work) > 1:
        with ProcessPoolExecutor(max_workers=jobs) as ex:
            return list(ex.map(_build_one, work))
    return [_build_one(w) for w in work]


def _exit_for(reports) -> int:
    if all(r["pass"] for r in reports):
        return EXIT_PASS
    if any(r["status"] == "undecided" for r in reports) and not any(r["status"] == "fail" for r in reports):
        return EXIT_UNDECIDED
    return EXIT_FAIL


# ---------------------------------------------------------------------------
# dims, chow, invariants


def cmd_dims(fmt="text") -> str:
    rows = [(d.name, dimension(d)) for d in catalog()]
    if fmt == "json":
        return _dump([b.to_json() for _, b in rows])
    lines = ["family   h  delta  alpha1  alpha2  dim"]
    for n, b in rows:
        lines.append(f"{n:<8} {b.h:>2} {b.delta:>6} {b.alpha1:>7} {b.alpha2:>7} {b.dim:>4}")
    dims = {n: b.dim for n, b in rows}
    first = FAMILY_NAMES[0]
    others = sorted({v for n, v in dims.items() if n != first})
    lines.append(f"{first}: {dims[first]}, others: {','.join(map(str, others))}")
    return "\n".join(lines)


def cmd_chow(expr: str, deg_v: int = 5, genus: int = 1, fmt="text") -> str:
    v = evaluate(expr, deg_v, genus)
    if fmt == "json":
        if isinstance(v, ChowClass):
            return _dump({"expr": expr, "degV2": deg_v, "b": genus, "class": list(v.coeffs), "value": str(v)})
        return _dump({"expr": expr, "degV2": deg_v, "b": genus, "degree": v, "value": str(v)})
    return str(v)


def cmd_invariants(deg_v1: int, b: int, deg_tau: int, fmt="text") -> str:
    inv = invariants(deg_v1, b, deg_tau)
    j = inv.to_json()
    j["expected_dim_bound"] = expected_dim_bound(inv.p_g, inv.K2)
    if fmt == "json":
        return _dump(j)
    return f"chi={inv.chi} K2={inv.K2} p_g={inv.p_g} q={inv.q} fiber_genus={inv.fiber_genus} expected_dim_bound={j['expected_dim_bound']}"


# ---------------------------------------------------------------------------


def _curve_arg(s: str) -> tuple:
    parts = [p.strip() for p in s.strip("[]()").split(",")]
    if len(parts) != 5:
        raise argparse.ArgumentTypeError("curve needs five a-invariants a1,a2,a3,a4,a6")
    return tuple(parts)


def make_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="ellfib", description="Genus-2 fibrations over an elliptic curve with K^2=4, p_g=q=1")
    p.add_argument("--version", action="version", version=__version__)
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--format", choices=("text", "json"), default="text")
    common.add_argument("--output", "-o", help="write to this file instead of stdout")
    sub = p.add_subparsers(dest="command", required=True)

    f = sub.add_parser("families", parents=[common], help="list the eight families")
    f.add_argument("--name", choices=FAMILY_NAMES)

    b = sub.add_parser("build", parents=[common], help="sample and verify a member")
    g = b.add_mutually_exclusive_group(required=True)
    g.add_argument("--family", choices=FAMILY_NAMES)
    g.add_argument("--all", action="store_true")
    b.add_argument("--seed", type=int, default=0)
    b.add_argument("--curve", type=_curve_arg, help="a1,a2,a3,a4,a6 of the base curve")
    b.add_argument("--force-b1-zero", action="store_true", help="set the b entry of sigma2 to zero")
    b.add_argument("--attempts", type=int, default=50)
    b.add_argument("--degree-cap", type=int, default=40)
    b.add_argument("--jobs", type=int, default=os.cpu_count() or 1)

    sub.add_parser("dims", parents=[common], help="dimension table")

    c = sub.add_parser("chow", parents=[common], help="evaluate an expression in H and F")
    c.add_argument("expr")
    c.add_argument("--degV2", type=int, default=5)
    c.add_argument("--b", type=int, default=1)

    i = sub.add_parser("invariants", parents=[common], help="surface invariants")
    i.add_argument("--degV1", type=int, required=True)
    i.add_argument("--b", type=int, required=True)
    i.add_argument("--degTau", type=int, required=True)
    return p


def main(argv=None) -> int:
    parser = make_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return EXIT_USAGE if e.code not in (0, None) else 0
    try:
        if args.command == "families":
            _emit(cmd_families(args.name, args.format), args.output)
            return EXIT_PASS
        if args.command == "dims":
            _emit(cmd_dims(args.format), args.output)
            return EXIT_PASS
        if args.command == "chow":
            _emit(cmd_chow(args.expr, args.degV2, args.b, args.format), args.output)
            return EXIT_PASS
        if args.command == "invariants":
            _emit(cmd_invariants(args.degV1, args.b, args.degTau, args.format), args.output)
            return EXIT_PASS
        if args.command == "build":
            names = list(FAMILY_NAMES) if args.all else [args.family]
            if args.curve:
                E = EllipticCurve(*args.curve)
                for n in names:
                    frame_from_curve(n, E)  # fail early on missing torsion
            reports = cmd_build(names, args.seed, args.curve, args.attempts, args.force_b1_zero,
                                args.degree_cap, args.jobs)
            if args.format == "json":
                text = _dump(reports if args.all else reports[0])
            else:
                text = "\n".join(_text_report(r) for r in reports)
            _emit(text, args.output)
            outdir = os.environ.get(OUTPUT_ENV)
            if outdir and not args.output:
                Path(outdir).mkdir(parents=True, exist_ok=True)
                for r in reports:
                    (Path(outdir) / f"{r['family']}-seed{r['seed']}.json").write_text(_dump(r) + "\n")
            return _exit_for(reports)
    except (TorsionError, CurveError, ChowError, KeyError, ValueError) as e:
        msg = e.args[0] if e.args else str(e)
        print(f"error: {msg}", file=sys.stderr)
        return EXIT_USAGE
    return EXIT_USAGE


def entry() -> None:
    sys.exit(main())


if __name__ == "__main__":
    entry()
