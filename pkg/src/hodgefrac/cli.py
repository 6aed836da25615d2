"""Batch command-line front end.

Exit codes: 0 ok, 2 invariant failure, 3 input error, 4 resource cap.
"""
from __future__ import annotations

import argparse
import json
import random
import sys
from fractions import Fraction
from pathlib import Path

from . import complex_core as cc
from . import fractal_builder as fb
from . import io as hio

EXIT_OK, EXIT_INVARIANT, EXIT_INPUT, EXIT_CAP = 0, 2, 3, 4


class InvariantFailure(Exception):
    pass


def _emit(text: str, out: str | None):
    if out:
        Path(out).write_text(text)
    else:
        sys.stdout.write(text)


def _rationals(text: str) -> list[Fraction]:
    try:
        return [Fraction(x) for x in text.split(",")]
    except (ValueError, ZeroDivisionError):
        raise hio.InputError(f"expected comma-separated rationals, got {text!r}") from None


def _level_complex(args) -> fb.LevelComplex:
    if args.level < 0:
        raise hio.InputError("level must be >= 0")
    return fb.build_level(args.family, args.level)


# -- commands -------------------------------------------------------------------

def cmd_build(args) -> int:
    cx = _level_complex(args)
    _emit(hio.dumps(hio.complex_to_json(cx)), args.out)
    return EXIT_OK


def cmd_verify(args) -> int:
    from .verify import failures, run_suite

    checks = run_suite(args.family, args.level, args.tol)
    lines = [f"{'ok  ' if c.ok else 'FAIL'} {c.name}" + (f": {c.detail}" if c.detail else "") for c in checks]
    bad = failures(checks)
    lines.append(f"{args.family} level {args.level}: {len(checks)} checks, {len(bad)} violations")
    _emit("\n".join(lines) + "\n", args.out)
    if bad:
        raise InvariantFailure(f"{len(bad)} invariant checks failed")
    return EXIT_OK


def _forms_doc(family: str, level: int, forms) -> dict:
    return {"family": family, "level": level, "count": len(forms), "forms": forms}


def cmd_basis(args) -> int:
    if args.level < 1:
        raise hio.InputError("basis needs level >= 1")
    if args.family == "sg":
        from . import sg_harmonic as sh

        fb.build_sg(args.level)  # applies the size cap before any work
        forms = sh.basis(args.level)
        docs = [hio.kform_to_json(h.form, h.provenance) for h in forms]
        if args.table:
            keys = fb.words_upto(args.level, 3)
            Path(args.table).write_text(hio.pairing_csv(sh.pairing_table(forms, keys, args.level)))
    else:
        from . import sg3_harmonic as s3

        fb.build_sg3(args.level)
        forms = s3.basis(args.level)
        docs = [hio.kform_to_json(h.form, f"A{h.index}@{''.join(map(str, h.word)) or '-'}") for h in forms]
        if args.table:
            rows = [(h.word, f, v) for h in forms for f, v in enumerate(s3.face_cycle_integrals(h, h.word))]
            Path(args.table).write_text(hio.face_cycle_csv(rows))
    _emit(hio.dumps(_forms_doc(args.family, args.level, docs)), args.out)
    print(f"{len(docs)} forms", file=sys.stderr)
    return EXIT_OK


def cmd_dual_basis(args) -> int:
    if args.family != "sg":
        raise hio.InputError("dual-basis is defined for the gasket (sg)")
    if args.level < 1:
        raise hio.InputError("dual-basis needs level >= 1")
    from . import sg_harmonic as sh

    fb.build_sg(args.level)
    duals, table = sh.dual_basis(args.level)
    docs = [hio.kform_to_json(h.form, h.provenance) for h in duals]
    if args.table:
        Path(args.table).write_text(hio.pairing_csv(table))
    _emit(hio.dumps(_forms_doc(args.family, args.level, docs)), args.out)
    return EXIT_OK


def cmd_spectrum(args) -> int:
    cx = _level_complex(args)
    if not 0 <= args.degree <= cx.max_degree:
        raise hio.InputError(f"degree must be in 0..{cx.max_degree}")
    if cx.count(args.degree) > 4000:
        raise fb.ResourceCapError(f"dense eigensolve of size {cx.count(args.degree)} exceeds 4000")
    rep = cc.spectrum(cx, args.degree, args.tol)
    _emit(hio.spectrum_csv(rep), args.out)
    return EXIT_OK


def _random_form(cx: cc.Complex, k: int, seed: int) -> cc.KForm:
    rng = random.Random(seed)
    return cx.form(k, [Fraction(rng.randint(-9, 9), rng.randint(1, 5)) for _ in range(cx.count(k))])


def cmd_hodge(args) -> int:
    cx = None
    if args.complex:
        cx = hio.complex_from_json(_load_json(args.complex))
    if args.input:
        f = hio.kform_from_json(_load_json(args.input), cx)
    else:
        cx = cx or _level_complex(args)
        f = _random_form(cx, args.degree, args.seed)
    parts = cc.hodge_decompose(f, args.mode)
    if args.mode == "exact":
        recon = parts.exact + parts.coexact + parts.harmonic
        if recon != f:
            raise InvariantFailure("Hodge parts do not reconstruct the input")
        doc = {name: hio.kform_to_json(getattr(parts, name)) for name in ("exact", "coexact", "harmonic")}
    else:
        doc = {name: [round(float(x), 12) for x in getattr(parts, name).to_numpy()]
               for name in ("exact", "coexact", "harmonic")}
    doc["input"] = hio.kform_to_json(f)
    _emit(hio.dumps(doc), args.out)
    return EXIT_OK


def _load_json(path: str):
    try:
        return json.loads(Path(path).read_text())
    except (OSError, json.JSONDecodeError) as exc:
        raise hio.InputError(f"cannot read {path}: {exc}") from None


def cmd_singularity(args) -> int:
    from .measure_diag import singularity_report

    bvals = _rationals(args.boundary)
    if len(bvals) != 3:
        raise hio.InputError("boundary needs three values")
    rep = singularity_report(bvals, args.edge, args.depth)
    _emit(hio.singularity_csv(rep), args.out)
    if not rep.passed:
        raise InvariantFailure("L1 lower bound violated")
    return EXIT_OK


def cmd_kusuoka(args) -> int:
    from .measure_diag import kusuoka_growth

    bvals = _rationals(args.boundary)
    if len(bvals) != 3:
        raise hio.InputError("boundary needs three values")
    growth = kusuoka_growth(bvals, args.depth, args.method, args.edge)
    _emit(hio.growth_csv(growth), args.out)
    return EXIT_OK


def cmd_trace(args) -> int:
    from .complex_core import Cell
    from .sg_harmonic import d1_approx, delta2_trace

    m, top = args.level, args.depth
    if m < 0 or top <= m:
        raise hio.InputError("need 0 <= --level < --depth")
    density = _rationals(args.density) if args.density else [Fraction(1)] * 3
    if len(density) != 3:
        raise hio.InputError("density takes one value per level-1 cell")
    if 3 ** (top + 1) > fb.DEFAULT_CELL_CAP:
        raise fb.ResourceCapError(f"depth {top} exceeds the cell cap")
    measures = {top + 1: fb.density_measure(density, 1, top + 1)}
    for n in range(top, 0, -1):
        measures[n] = measures[n + 1].coarsen()
    word = (0,) * m
    edge = fb.CellAddress(word, Cell(1, args.edge))
    cell = fb.CellAddress(word, Cell(2, 0))
    rows = []
    for n in range(max(m, 1), top + 1):
        t = delta2_trace(measures[n], edge, n)
        # level-n edge data from traces one level finer; d1_approx only reads edges inside F_word
        f1 = [Fraction(0)] * 3 ** (n + 1)
        first = fb.word_index(word, 3) * 3 ** (n - m)
        for c in range(first, first + 3 ** (n - m)):
            w = fb.index_word(c, n, 3)
            for e in range(3):
                f1[3 * c + e] = delta2_trace(measures[n + 1], fb.CellAddress(w, Cell(1, e)), n + 1)
        dd = d1_approx(f1, cell, n)
        rows.append((n, t.numerator, t.denominator, dd.numerator, dd.denominator))
    _emit(hio.table_csv(("n", "trace_num", "trace_den", "d1_num", "d1_den"), rows), args.out)
    return EXIT_OK


# -- parser -------------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="hodgefrac", description="Exact form calculus on gasket graph complexes.")
    sub = p.add_subparsers(dest="command", required=True)

    def common(sp, level=True):
        sp.add_argument("--family", choices=sorted(fb.FAMILIES), default="sg")
        if level:
            sp.add_argument("--level", type=int, default=1)
        sp.add_argument("--out", help="output file (default: stdout)")
        return sp

    common(sub.add_parser("build", help="export a level complex as JSON")).set_defaults(fn=cmd_build)
    v = common(sub.add_parser("verify", help="run the invariant suite"))
    v.add_argument("--tol", type=float, default=1e-9)
    v.set_defaults(fn=cmd_verify)
    b = common(sub.add_parser("basis", help="harmonic 1-form basis"))
    b.add_argument("--table", help="also write the cycle pairing CSV here")
    b.set_defaults(fn=cmd_basis)
    db = common(sub.add_parser("dual-basis", help="dual basis and pairing table (sg)"))
    db.add_argument("--table", help="also write the pairing CSV here")
    db.set_defaults(fn=cmd_dual_basis)
    s = common(sub.add_parser("spectrum", help="labeled Laplacian spectrum as CSV"))
    s.add_argument("--degree", type=int, default=0)
    s.add_argument("--tol", type=float, default=1e-9)
    s.set_defaults(fn=cmd_spectrum)
    h = common(sub.add_parser("hodge", help="Hodge decomposition of a form"))
    h.add_argument("--input", help="form JSON; without it a seeded random form is used")
    h.add_argument("--complex", help="complex JSON for forms on custom complexes")
    h.add_argument("--degree", type=int, default=1)
    h.add_argument("--mode", choices=("exact", "float"), default="exact")
    h.add_argument("--seed", type=int, default=0)
    h.set_defaults(fn=cmd_hodge)
    sg = sub.add_parser("singularity", help="dyadic L1 differences along an edge")
    sg.add_argument("--boundary", default="0,1,0")
    sg.add_argument("--edge", type=int, default=0)
    sg.add_argument("--depth", type=int, default=14)
    sg.add_argument("--out")
    sg.set_defaults(fn=cmd_singularity)
    k = sub.add_parser("kusuoka", help="energy-measure growth along an edge")
    k.add_argument("--boundary", default="1,0,0")
    k.add_argument("--edge", type=int, default=0)
    k.add_argument("--depth", type=int, default=25)
    k.add_argument("--method", choices=("transfer", "direct"), default="transfer")
    k.add_argument("--out")
    k.set_defaults(fn=cmd_kusuoka)
    t = sub.add_parser("trace", help="2-form trace and derivative approximants")
    t.add_argument("--level", type=int, default=1)
    t.add_argument("--depth", type=int, default=6)
    t.add_argument("--edge", type=int, default=0)
    t.add_argument("--density", help="three values, one per level-1 cell (default 1,1,1)")
    t.add_argument("--out")
    t.set_defaults(fn=cmd_trace)
    return p


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    if getattr(args, "tol", 1.0) <= 0:
        print("error: --tol must be positive", file=sys.stderr)
        return EXIT_INPUT
    try:
        return args.fn(args)
    except InvariantFailure as exc:
        print(f"invariant failure: {exc}", file=sys.stderr)
        return EXIT_INVARIANT
    except fb.ResourceCapError as exc:
        print(f"resource cap: {exc}", file=sys.stderr)
        return EXIT_CAP
    except (hio.InputError, cc.ShapeError, ValueError) as exc:
        print(f"input error: {exc}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
