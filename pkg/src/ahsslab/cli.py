"""``ahsslab`` command line: cohomology tables, spectral sequences, duality checks.

Exit codes: 0 success, 2 unreadable input, 3 invalid complex, 4 a
mathematical precondition failed (skeleton violation, not a cycle, missing
orientation or subcomplex).
"""

from __future__ import annotations

import argparse
import sys
from typing import Optional, Sequence

from . import duality
from .abgroup import FGAbGroup
from .ahss import AhssInstance, CoefficientTheory
from .complexes import NotAManifold, NotRestrictedTriangulation, cohomology
from .io import DocumentParseError, DocumentValidationError, dumps_report, load_path

EXIT_OK, EXIT_PARSE, EXIT_VALIDATION, EXIT_MATH = 0, 2, 3, 4


class CommandError(Exception):
    def __init__(self, code: int, message: str):
        super().__init__(message)
        self.code = code


def _group_entry(G: FGAbGroup) -> dict:
    return {"rank": G.rank, "torsion": list(G.torsion)}


def _page_rank(r) -> int:
    return 1 << 30 if r == "inf" else r


def _parse_group(spec: str) -> FGAbGroup:
    try:
        return FGAbGroup.parse(spec)
    except ValueError as exc:
        raise CommandError(EXIT_PARSE, f"bad coefficient spec {spec!r}: {exc}") from None


def _parse_eta(spec: str) -> list[int]:
    try:
        return [int(v) for v in spec.replace(",", " ").split()]
    except ValueError:
        raise CommandError(EXIT_PARSE, f"bad eta {spec!r}: expected integers") from None


# ---------------------------------------------------------------------------
# Commands


def cmd_cohomology(path: str, coefficients: str = "Z", degree: Optional[int] = None) -> dict:
    doc = load_path(path)
    X = doc.complex
    G = _parse_group(coefficients)
    degrees = [degree] if degree is not None else list(range(max(X.dim, 0) + 1))
    table = {str(p): _group_entry(cohomology(X, G, p)) for p in degrees}
    return {
        "command": "cohomology",
        "source": path,
        "coefficients": str(G),
        "cells": list(X.cell_counts),
        "cohomology": table,
    }


def cmd_ahss(path: str, theory: str = "ordinary:Z", qmin: Optional[int] = None, qmax: Optional[int] = None,
             method: str = "auto") -> dict:
    doc = load_path(path)
    X = doc.complex
    try:
        T = CoefficientTheory.parse(theory, max(X.dim, 0), qmin, qmax)
    except ValueError as exc:
        raise CommandError(EXIT_PARSE, str(exc)) from None
    inst = AhssInstance(X, T, method=method)
    res = inst.run()
    pages = {}
    for (p, q, r), G in sorted(res.pages.items(), key=lambda kv: (_page_rank(kv[0][2]), kv[0][0], kv[0][1])):
        pages[f"{p},{q},{r}"] = _group_entry(G)
    diffs = {}
    if inst.method == "presentation":
        for q in T.rows:
            for p in range(X.dim):
                mats = inst.d1(p, q)
                if mats and mats[0].nrows and mats[0].ncols:
                    diffs[f"{p},{q},1"] = [m.tolist() for m in mats]
    for (p, q, r), M in sorted(res.differentials.items()):
        diffs[f"{p},{q},{r}"] = M.tolist()
    graded = {
        str(n): [{"p": p, **_group_entry(G)} for p, G in res.graded(n)] for n in res.total_degrees()
    }
    report = {
        "command": "ahss",
        "source": path,
        "theory": T.to_dict(),
        "method": res.method,
        "cells": list(X.cell_counts),
        "pages": pages,
        "differentials": diffs,
        "einf": {f"{p},{q}": _group_entry(G) for (p, q), G in sorted(res.einf.items())},
        "graded": graded,
        "honesty_flags": [f.to_dict() for f in res.flags],
        "unverified_cells": len(res.flags),
        "notes": res.notes,
    }
    if T.rule == "sq3z" and inst.d3_evaluations:
        report["d3_evaluations"] = {str(p): ev for p, ev in sorted(inst.d3_evaluations.items())}
    return report


def cmd_verify_gysin(path: str, theory: str = "ordinary:Z", eta: str = "1", q: int = 0) -> dict:
    doc = load_path(path)
    if doc.subcomplex is None:
        raise CommandError(EXIT_MATH, f"{path}: document has no subcomplex")
    X = doc.complex
    try:
        T = CoefficientTheory.parse(theory, max(X.dim, 0))
    except ValueError as exc:
        raise CommandError(EXIT_PARSE, str(exc)) from None
    pair = duality.build_pair(X, doc.subcomplex, doc.orientation_cycle)
    report = duality.verify_main_theorem(pair, T, _parse_eta(eta), q)
    report = {"command": "verify-gysin", "source": path, **report}
    return report


# ---------------------------------------------------------------------------
# Text rendering


def render_text(report: dict) -> str:
    lines = [f"{report['command']}: {report.get('source', '')}"]
    cmd = report["command"]
    if cmd == "cohomology":
        lines.append(f"coefficients {report['coefficients']}")
        for p, g in report["cohomology"].items():
            lines.append(f"  H^{p} = {_fmt(g)}")
    elif cmd == "ahss":
        lines.append(f"theory {report['theory']['name']} ({report['method']})")
        for key, g in report["einf"].items():
            lines.append(f"  E_inf[{key}] = {_fmt(g)}")
        for n, parts in report["graded"].items():
            lines.append(f"  graded h^{n}: " + ", ".join(f"p={e['p']}: {_fmt(e)}" for e in parts))
        lines.append(f"  unverified cells: {report['unverified_cells']}")
        for note in report["notes"]:
            lines.append(f"  note: {note}")
    else:
        lines.append(f"theory {report['theory']}  eta {report['eta']}")
        pd = report["pd_cochain"]
        lines.append(f"  PD cochain: degree {pd['degree']}, support {pd['support']}, cocycle {pd['cocycle']}")
        s = report["survival"]
        lines.append(f"  survives: {s['survives']}" + (f" (dies at r={s['died_at']})" if s["died_at"] else ""))
        if "pairings" in report:
            lines.append(f"  pairings PD {report['pairings']['pd']}  Gysin {report['pairings']['gysin']}")
        lines.append(f"  verdict: {report['verdict']}")
    return "\n".join(lines) + "\n"


def _fmt(g: dict) -> str:
    parts = []
    if g["rank"]:
        parts.append("Z" if g["rank"] == 1 else f"Z^{g['rank']}")
    parts += [f"Z/{d}" for d in g["torsion"]]
    return " + ".join(parts) or "0"


# ---------------------------------------------------------------------------
# Entry point


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="ahsslab", description="Spectral sequences and duality on simplicial complexes")
    ap.add_argument("--format", choices=("json", "text"), default="json")
    sub = ap.add_subparsers(dest="command", required=True)

    c = sub.add_parser("cohomology", help="cohomology groups with coefficients")
    c.add_argument("file")
    c.add_argument("--coefficients", default="Z")
    c.add_argument("--degree", type=int)

    a = sub.add_parser("ahss", help="Atiyah-Hirzebruch spectral sequence")
    a.add_argument("file")
    a.add_argument("--theory", default="ordinary:Z", help="ordinary:SPEC or ktheory")
    a.add_argument("--qmin", type=int)
    a.add_argument("--qmax", type=int)
    a.add_argument("--method", choices=("auto", "presentation", "invariants"), default="auto")

    v = sub.add_parser("verify-gysin", help="survival and Gysin comparison for the document's subcomplex")
    v.add_argument("file")
    v.add_argument("--theory", default="ordinary:Z")
    v.add_argument("--eta", default="1", help="coordinates of eta, e.g. '1' or '1,0'")
    v.add_argument("--q", type=int, default=0)

    for p in (c, a, v):
        p.add_argument("--format", choices=("json", "text"), default=argparse.SUPPRESS)
    return ap


def run(argv: Optional[Sequence[str]] = None) -> tuple[int, str, str]:
    """Run the CLI and return ``(exit code, stdout, stderr)``."""
    args = build_parser().parse_args(argv)
    try:
        if args.command == "cohomology":
            report = cmd_cohomology(args.file, args.coefficients, args.degree)
        elif args.command == "ahss":
            report = cmd_ahss(args.file, args.theory, args.qmin, args.qmax, args.method)
        else:
            report = cmd_verify_gysin(args.file, args.theory, args.eta, args.q)
    except CommandError as exc:
        return exc.code, "", f"error: {exc}\n"
    except DocumentParseError as exc:
        return EXIT_PARSE, "", f"parse error: {exc}\n"
    except (DocumentValidationError, NotAManifold, NotRestrictedTriangulation) as exc:
        return EXIT_VALIDATION, "", f"validation error: {exc}\n"
    except (duality.SkeletonViolation, duality.NotACycle, duality.NotOriented) as exc:
        return EXIT_MATH, "", f"{type(exc).__name__}: {exc}\n"
    out = dumps_report(report) if args.format == "json" else render_text(report)
    return EXIT_OK, out, ""


def main(argv: Optional[Sequence[str]] = None) -> int:
    code, out, err = run(argv)
    sys.stdout.write(out)
    sys.stderr.write(err)
    return code


if __name__ == "__main__":
    sys.exit(main())
