"""Command-line entry point ``cartier-lab``.

Exit status: 0 on success, 1 when the mathematics rejects the input (with a
machine-readable report on stdout), 2 for usage and input errors.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import os
import subprocess
import sys
import tempfile
import time
from pathlib import Path

from . import __version__
from .errors import AxiomViolation, CartierLabError, MathematicalRejection, WeightInhomogeneity
from .rings import QQ, ZZ, IntegersMod, finite_field, parse_ring, ring_from_json

DEFAULT_MAX_N = 16


class UsageError(Exception):
    pass


def max_truncation() -> int:
    raw = os.environ.get("CARTIER_LAB_MAX_N")
    if raw is None:
        return DEFAULT_MAX_N
    try:
        return int(raw)
    except ValueError:
        raise UsageError(f"CARTIER_LAB_MAX_N must be an integer, got {raw!r}") from None


class Output:
    """A command result: JSON payload plus a flat table for the text formats."""

    def __init__(self, result: dict, header=None, rows=None, summary: str | None = None,
                 ring=None, p=None, N=None):
        self.result = result
        self.header = header or ["key", "value"]
        self.rows = rows if rows is not None else [[k, _cell(v)] for k, v in result.items()]
        self.summary = summary
        self.ring, self.p, self.N = ring, p, N


def _cell(v):
    if isinstance(v, (dict, list)):
        return json.dumps(v, sort_keys=True)
    return "" if v is None else str(v)


# input helpers ---------------------------------------------------------------

def _load_json(args, source: str | None = None):
    if getattr(args, "inline", None):
        text = args.inline
    elif source:
        path = Path(source)
        if not path.exists():
            raise UsageError(f"no such file: {source}")
        text = path.read_text()
    else:
        raise UsageError("give an input file or --inline JSON")
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise UsageError(f"malformed JSON: {exc}") from None


def _ring(args, default=ZZ):
    spec = getattr(args, "ring", None)
    if not spec:
        return default
    try:
        return parse_ring(spec)
    except (ValueError, KeyError) as exc:
        raise UsageError(f"bad ring {spec!r}: {exc}") from None


def _truncation(args, default: int) -> int:
    N = args.N if getattr(args, "N", None) is not None else default
    if N < 0:
        raise UsageError("N must be non-negative")
    cap = max_truncation()
    if N > cap:
        raise UsageError(f"N={N} exceeds the configured maximum {cap} (CARTIER_LAB_MAX_N)")
    return N


def _law(args):
    """A law from a name (add, mult, honda:P:H), a JSON file, or --inline."""
    from .acceptance import honda_law
    from .fgl import FormalGroupLaw, additive_law, deform_to_normal_cone, multiplicative_law

    source = getattr(args, "source", None)
    if source in ("add", "additive", "mult", "multiplicative") and not getattr(args, "inline", None):
        N = _truncation(args, 8)
        ring = _ring(args)
        G = additive_law(ring, N) if source.startswith("add") else multiplicative_law(ring, N)
    elif source and source.startswith("honda:") and not getattr(args, "inline", None):
        try:
            _, p, h = source.split(":")
            p, h = int(p), int(h)
        except ValueError:
            raise UsageError("honda laws are named honda:P:H") from None
        N = _truncation(args, 8)
        ring = _ring(args, None)
        G = honda_law(p, h, N, ring if ring is not None else IntegersMod(p))
    else:
        obj = _load_json(args, source)
        if "ring" not in obj and getattr(args, "ring", None):
            obj = dict(obj, ring=_ring(args).to_json())
        if getattr(args, "N", None) is not None:
            obj = dict(obj, N=_truncation(args, obj.get("N", 8)))
        elif "N" not in obj:
            obj = dict(obj, N=_truncation(args, 8))
        else:
            _truncation(args, int(obj["N"]))
        try:
            G = FormalGroupLaw.from_json(obj)
        except (KeyError, TypeError) as exc:
            raise UsageError(f"law JSON is missing a field: {exc}") from None
    if getattr(args, "deform", False):
        G = deform_to_normal_cone(G)
    return G


def _law_context(G):
    char = G.ring.characteristic
    return {"ring": str(G.ring), "p": char if char else None, "N": G.N}


def _series_text(s) -> str:
    return repr(s).split(" + O(")[0] if " + O(" in repr(s) else repr(s)


# fgl ---------------------------------------------------------------------------

def cmd_fgl(args) -> Output:
    from .fgl import (
        fgl_exp,
        fgl_log,
        formal_inverse,
        height,
        n_series,
    )
    from .series import PowerSeriesRing

    if args.action == "exp":
        obj = _load_json(args, args.source)
        ring = ring_from_json(obj["ring"]) if "ring" in obj else _ring(args, QQ)
        N = _truncation(args, int(obj.get("N", 8)))
        log = PowerSeriesRing(ring, ("X",), N).parse(obj["log"])
        G = fgl_exp(log)
        return Output({"law": G.to_json(), "series": _series_text(G.series)}, **_law_context(G))

    G = _law(args)
    ctx = _law_context(G)
    if args.action == "check":
        kind = {"additive": "G_a", "multiplicative": "G_m"}.get(G.describe(), "law")
        summary = f"valid; {kind}" if kind != "law" else "valid"
        return Output({"valid": True, "kind": G.describe(), "law": G.to_json()}, summary=summary, **ctx)
    if args.action == "inverse":
        inv = formal_inverse(G)
        return Output({"inverse": _series_text(inv), "series": inv.to_json()}, **ctx)
    if args.action == "nseries":
        s = n_series(G, args.n)
        return Output({"n": args.n, "series": _series_text(s), "terms": s.to_json()["terms"]}, **ctx)
    if args.action == "height":
        h = height(G, args.p)
        return Output(h.to_json(), summary=f"height {h}", **ctx)
    if args.action == "deform":
        from .fgl import deform_to_normal_cone
        D = deform_to_normal_cone(G, var=args.var)
        return Output({"law": D.to_json(), "series": _series_text(D.series)}, **_law_context(D))
    if args.action == "log":
        s = fgl_log(G)
        return Output({"log": _series_text(s), "series": s.to_json()}, **ctx)
    raise UsageError(f"unknown fgl action {args.action}")


# witt --------------------------------------------------------------------------

def cmd_witt(args) -> Output:
    from .witt import (
        WittContext,
        fix_points,
        sekiguchi_suwa_kernel,
        witt_prod_polys,
        witt_sum_polys,
    )

    p, n = args.p, args.n
    if n < 1 or n > max_truncation():
        raise UsageError(f"length n must be between 1 and {max_truncation()}")
    if args.action in ("sum-poly", "prod-poly"):
        letter = "S" if args.action == "sum-poly" else "P"
        polys = (witt_sum_polys if letter == "S" else witt_prod_polys)(p, n)
        result = {f"{letter}_{i}": str(f) for i, f in enumerate(polys)}
        rows = [[k, v] for k, v in result.items()]
        text = "\n".join(f"{k} = {v}" for k, v in result.items())
        return Output({"polynomials": result}, ["component", "polynomial"], rows, summary=text, ring="Z", p=p, N=n)
    ring = _ring(args, IntegersMod(p))
    ctx = WittContext(p, n, ring)
    if args.action == "fix":
        pts = fix_points(ctx)
    elif args.action == "kernel":
        pts = sekiguchi_suwa_kernel(ctx, ring.parse(args.t), scalar=args.scalar)
    else:
        raise UsageError(f"unknown witt action {args.action}")
    vecs = [[ring.format(c) for c in x.components] for x in pts]
    return Output({"count": len(pts), "points": vecs}, ["index", "components"],
                  [[i, " ".join(v)] for i, v in enumerate(vecs)], summary=f"{len(pts)} points",
                  ring=str(ring), p=p, N=n)


# filtrations ------------------------------------------------------------------------

def _filtered(args):
    from .filtration import FilteredAlgebra

    obj = _load_json(args, args.source)
    try:
        FA = FilteredAlgebra.from_json(obj)
    except (KeyError, TypeError) as exc:
        raise UsageError(f"filtered algebra JSON is missing a field: {exc}") from None
    return obj, FA


def _filtration_context(FA):
    A = FA.algebra
    char = A.field.characteristic
    return {"ring": str(A.field), "p": char if char else None, "N": FA.N_top}


def cmd_rees(args) -> Output:
    from .filtration import fiber, rees

    _, FA = _filtered(args)
    R = rees(FA)
    if args.action == "build":
        return Output(R.to_json(), **_filtration_context(FA))
    f = fiber(R, args.at)
    result = f.to_json()
    if not f.iso_ok:
        raise _Rejection("fiber isomorphism could not be verified", result)
    return Output(result, **_filtration_context(FA))


def cmd_filtration(args) -> Output:
    from .filtration import associated_graded, check_adic_unicity, s0_fil_fibers

    if args.action == "s0fil":
        k = QQ if args.char == 0 else finite_field(args.char)
        at1, at0 = s0_fil_fibers(k)
        return Output({"fiber_1": at1.to_json(), "fiber_0": at0.to_json()},
                      ring=str(k), p=args.char or None, N=None)
    obj, FA = _filtered(args)
    if args.action == "gr":
        gr = associated_graded(FA)
        data = gr.to_json()
        data["generated_in_weight_one"] = {str(k): v for k, v in gr.generated_in_weight_one().items()}
        return Output(data, **_filtration_context(FA))
    if args.action == "unicity":
        ideal = args.ideal.split(",") if args.ideal else obj.get("ideal")
        if not ideal:
            raise UsageError("give the ideal with --ideal or an \"ideal\" key")
        gens = [FA.algebra.parse(g) for g in ideal]
        r = check_adic_unicity(FA, gens)
        if r.status != "certificate":
            raise _Rejection(f"{r.status}: {r.detail}", r.to_json())
        return Output(r.to_json(), summary="certificate: the filtration is the I-adic one",
                      **_filtration_context(FA))
    raise UsageError(f"unknown filtration action {args.action}")


# duality -------------------------------------------------------------------------------

def _base_algebra(args):
    from .filtration import algebra_from_json

    spec = args.base
    if spec is None:
        raise UsageError("give --base")
    path = Path(spec)
    if spec.endswith(".json") or path.exists():
        if not path.exists():
            raise UsageError(f"no such file: {spec}")
        return algebra_from_json(json.loads(path.read_text()))
    if spec.lstrip().startswith("{"):
        return algebra_from_json(json.loads(spec))
    try:
        return parse_ring(spec)
    except (ValueError, KeyError) as exc:
        raise UsageError(f"bad base ring {spec!r}: {exc}") from None


def cmd_dual(args) -> Output:
    from .cartier import cartier_dual, dual_pairing_check, filtered_dual_weights, grouplike_points

    G = _law(args)
    ctx = _law_context(G)
    H = cartier_dual(G)
    if args.action == "build":
        data = H.to_json()
        rows = [[i, j, " + ".join(f"{c}*x^[{k}]" for k, c in row) or "0"] for i, j, row in data["mul"]]
        return Output(data, ["i", "j", "x^[i]*x^[j]"], rows, **ctx)
    if args.action == "check":
        ok, witness = dual_pairing_check(G, H)
        result = {"pairing": ok, "witness": witness}
        if not ok:
            raise _Rejection("pairing check failed", result)
        return Output(result, summary="pairing verified", **ctx)
    if args.action == "grouplikes":
        A = _base_algebra(args)
        pts = grouplike_points((G, H), A)
        return Output(pts.to_json(), ["a", "b", "F(a,b)"], pts.to_json()["table"],
                      summary=f"{len(pts)} grouplike points", **ctx)
    if args.action == "weights":
        report = filtered_dual_weights(H, lam_weight=args.lam_weight)
        return Output(report.to_json(), summary="weight-homogeneous", **ctx)
    raise UsageError(f"unknown dual action {args.action}")


# verify-paper --------------------------------------------------------------------------

def cmd_verify(args) -> Output:
    from .acceptance import artifact_bytes, determinism_check, run_criteria

    if args.seed is None:
        args.seed = 42
    seed = args.seed
    results = run_criteria(seed)
    first = artifact_bytes(results, seed)
    if not args.no_rerun:
        def rerun():
            with tempfile.TemporaryDirectory() as tmp:
                out = Path(tmp) / "artifact.json"
                cmd = [sys.executable, "-m", "cartier_lab", "verify-paper", "--seed", str(seed),
                       "--no-rerun", "--artifact", str(out)]
                subprocess.run(cmd, check=False, stdout=subprocess.DEVNULL, stderr=subprocess.DEVNULL)
                return out.read_bytes() if out.exists() else b""
        results.append(determinism_check(first, rerun))
    if args.artifact:
        Path(args.artifact).write_bytes(first)
    for r in results:
        print(r.line(), file=sys.stderr)
    result = {
        "all_passed": all(r.passed for r in results),
        "criteria": [{"number": r.number, "title": r.title, "verified": r.verified} for r in results],
    }
    out = Output(result, ["criterion", "title", "verified"],
                 [[r.number, r.title, r.verified] for r in results], ring="various", p="2,3,5", N=8)
    out.timings = {str(r.number): round(r.seconds, 3) for r in results}
    out.within_budget = {str(r.number): r.within_budget for r in results}
    if not result["all_passed"]:
        raise _Rejection("acceptance suite failed", result, output=out)
    return out


# plumbing ---------------------------------------------------------------------------------

class _Rejection(MathematicalRejection):
    def __init__(self, message, report, output=None):
        super().__init__(message)
        self.report = report
        self.output = output


def _manifest(args, out: Output) -> dict:
    return {
        "tool": "cartier-lab",
        "version": __version__,
        "command": " ".join(x for x in (args.group, getattr(args, "action", None)) if x),
        "ring": out.ring,
        "p": out.p,
        "N": out.N,
        "seed": args.seed if args.seed is not None else 0,
    }


def render(args, out: Output) -> str:
    doc = {"manifest": _manifest(args, out), "result": out.result}
    if args.format == "json":
        return json.dumps(doc, sort_keys=True, indent=2, default=str) + "\n"
    if args.format == "csv":
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(out.header)
        w.writerows(out.rows)
        return buf.getvalue()
    lines = [f"# {k}: {v}" for k, v in doc["manifest"].items()]
    if out.summary:
        lines.append(out.summary)
    widths = [max(len(str(h)), *(len(_cell(r[i])) for r in out.rows)) if out.rows else len(str(h))
              for i, h in enumerate(out.header)]
    lines.append("  ".join(str(h).ljust(w) for h, w in zip(out.header, widths)).rstrip())
    for r in out.rows:
        lines.append("  ".join(_cell(c).ljust(w) for c, w in zip(r, widths)).rstrip())
    return "\n".join(lines) + "\n"


def _emit(args, text: str, wall: float, extra: dict | None = None):
    if args.out:
        path = Path(args.out)
        path.write_text(text)
        timing = {"wall_seconds": round(wall, 3), **(extra or {})}
        Path(str(path) + ".timing.json").write_text(json.dumps(timing, sort_keys=True, indent=2) + "\n")
    else:
        sys.stdout.write(text)
        print(f"wall time {wall:.3f}s", file=sys.stderr)


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--N", type=int, default=None, help="truncation degree")
    common.add_argument("--ring", default=None, help="Z, Q, Zmod:M, GF(q), GF(q)[eps], poly:BASE:v")
    common.add_argument("--format", choices=["json", "table", "csv"], default="json")
    common.add_argument("--seed", type=int, default=None, help="seed for randomized runs (verify-paper: 42)")
    common.add_argument("--out", default=None, help="write the output here (timing goes to OUT.timing.json)")
    common.add_argument("--inline", default=None, help="input JSON given on the command line")

    parser = argparse.ArgumentParser(prog="cartier-lab", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=f"cartier-lab {__version__}")
    groups = parser.add_subparsers(dest="group", required=True)

    fgl = groups.add_parser("fgl", help="formal group laws")
    fa = fgl.add_subparsers(dest="action", required=True)
    for name in ("check", "inverse", "nseries", "height", "deform", "log", "exp"):
        sp = fa.add_parser(name, parents=[common])
        sp.add_argument("source", nargs="?", help="add, mult, honda:P:H or a JSON file")
        sp.add_argument("--deform", action="store_true", help=argparse.SUPPRESS)
        if name == "nseries":
            sp.add_argument("-n", type=int, required=True)
        if name == "height":
            sp.add_argument("-p", type=int, default=None)
        if name == "deform":
            sp.add_argument("--var", default="lam")

    witt = groups.add_parser("witt", help="p-typical Witt vectors")
    wa = witt.add_subparsers(dest="action", required=True)
    for name in ("sum-poly", "prod-poly", "fix", "kernel"):
        sp = wa.add_parser(name, parents=[common])
        sp.add_argument("-p", type=int, required=True)
        sp.add_argument("-n", type=int, required=True, help="length")
        if name == "kernel":
            sp.add_argument("-t", default="1")
            sp.add_argument("--scalar", choices=["teichmuller", "componentwise"], default="teichmuller")

    rees_p = groups.add_parser("rees", help="Rees construction")
    ra = rees_p.add_subparsers(dest="action", required=True)
    for name in ("build", "fiber"):
        sp = ra.add_parser(name, parents=[common])
        sp.add_argument("source", nargs="?")
        if name == "fiber":
            sp.add_argument("--at", type=int, choices=[0, 1], required=True)

    filt = groups.add_parser("filtration", help="filtered algebras")
    fta = filt.add_subparsers(dest="action", required=True)
    for name in ("gr", "unicity", "s0fil"):
        sp = fta.add_parser(name, parents=[common])
        if name != "s0fil":
            sp.add_argument("source", nargs="?")
        if name == "unicity":
            sp.add_argument("--ideal", default=None, help="comma-separated generators")
        if name == "s0fil":
            sp.add_argument("--char", type=int, default=0, help="0 for Q, else a prime p for F_p")

    dual = groups.add_parser("dual", help="Cartier duals")
    da = dual.add_subparsers(dest="action", required=True)
    for name in ("build", "check", "grouplikes", "weights"):
        sp = da.add_parser(name, parents=[common])
        sp.add_argument("source", nargs="?", help="add, mult, honda:P:H or a JSON law")
        sp.add_argument("--fgl", dest="source_flag", default=None, help="same as the positional source")
        sp.add_argument("--deform", action="store_true", help="use the normal-cone family of the law")
        if name == "grouplikes":
            sp.add_argument("--base", default=None, help="finite ring or algebra JSON")
        if name == "weights":
            sp.add_argument("--lam-weight", type=int, default=-1)

    verify = groups.add_parser("verify-paper", help="run the acceptance suite", parents=[common])
    verify.add_argument("--no-rerun", action="store_true", help="skip the second run used for the determinism check")
    verify.add_argument("--artifact", default=None, help=argparse.SUPPRESS)
    return parser


COMMANDS = {"fgl": cmd_fgl, "witt": cmd_witt, "rees": cmd_rees, "filtration": cmd_filtration,
            "dual": cmd_dual, "verify-paper": cmd_verify}


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    if getattr(args, "source_flag", None):
        args.source = args.source_flag
    start = time.perf_counter()
    try:
        out = COMMANDS[args.group](args)
    except _Rejection as exc:
        doc = {"manifest": _manifest(args, exc.output or Output({})), "rejected": str(exc), "report": exc.report}
        _emit(args, json.dumps(doc, sort_keys=True, indent=2, default=str) + "\n", time.perf_counter() - start)
        return 1
    except MathematicalRejection as exc:
        report = {"error": type(exc).__name__, "message": str(exc)}
        if isinstance(exc, AxiomViolation):
            report.update(exc.report())
        if isinstance(exc, WeightInhomogeneity):
            report["witnesses"] = exc.witnesses
        doc = {"manifest": _manifest(args, Output({})), "rejected": str(exc), "report": report}
        _emit(args, json.dumps(doc, sort_keys=True, indent=2, default=str) + "\n", time.perf_counter() - start)
        return 1
    except (UsageError, CartierLabError, ValueError, KeyError, ZeroDivisionError, OSError) as exc:
        print(f"cartier-lab: error: {exc}", file=sys.stderr)
        return 2
    wall = time.perf_counter() - start
    extra = {}
    if hasattr(out, "timings"):
        extra = {"criterion_seconds": out.timings, "within_budget": out.within_budget}
    _emit(args, render(args, out), wall, extra)
    return 0


if __name__ == "__main__":
    sys.exit(main())
