"""Lossless JSON for complexes and forms, and CSV tables for reports.

Rationals are stored as separate integer ``num`` / ``den`` fields.
"""
from __future__ import annotations

import csv
import io
import json
import re
from fractions import Fraction
from typing import Any, Iterable, Mapping, Sequence

from .complex_core import Complex, KForm, SpectrumReport
from .fractal_builder import build_level


class InputError(ValueError):
    """Malformed or inconsistent input data."""


def rational(q: Fraction | int) -> dict[str, int]:
    q = Fraction(q)
    return {"num": q.numerator, "den": q.denominator}


def parse_rational(obj: Any) -> Fraction:
    try:
        num, den = obj["num"], obj["den"]
    except (TypeError, KeyError):
        raise InputError(f"expected {{num, den}}, got {obj!r}") from None
    if not isinstance(num, int) or not isinstance(den, int) or isinstance(num, bool) or isinstance(den, bool):
        raise InputError(f"num and den must be integers, got {obj!r}")
    if den == 0:
        raise InputError("zero denominator")
    return Fraction(num, den)


def dumps(obj: Any) -> str:
    return json.dumps(obj, indent=1, sort_keys=True) + "\n"


# -- forms ------------------------------------------------------------------

def kform_to_json(f: KForm, provenance: str | None = None) -> dict:
    out = {
        "complex": f.complex.id,
        "degree": f.degree,
        "values": [{"cell": i, **rational(v)} for i, v in enumerate(f.values)],
    }
    if provenance is not None:
        out["provenance"] = provenance
    return out


_LEVEL_NAME = re.compile(r"^(sg|sg3)-(\d+)$")


def complex_for_name(name: str) -> Complex:
    """Rebuild a family level complex from its id (``sg-3``, ``sg3-2``)."""
    m = _LEVEL_NAME.match(name or "")
    if not m:
        raise InputError(f"cannot rebuild complex {name!r}; pass the complex JSON as well")
    return build_level(m.group(1), int(m.group(2)))


def kform_from_json(data: Mapping, cx: Complex | None = None) -> KForm:
    if not isinstance(data, Mapping):
        raise InputError("form JSON must be an object")
    for key in ("complex", "degree", "values"):
        if key not in data:
            raise InputError(f"form JSON lacks {key!r}")
    cx = cx or complex_for_name(data["complex"])
    if cx.id != data["complex"]:
        raise InputError(f"form belongs to {data['complex']!r}, not {cx.id!r}")
    k = data["degree"]
    if not isinstance(k, int) or not 0 <= k <= cx.max_degree:
        raise InputError(f"bad degree {k!r}")
    vals = [Fraction(0)] * cx.count(k)
    seen = set()
    for entry in data["values"]:
        i = entry.get("cell") if isinstance(entry, Mapping) else None
        if not isinstance(i, int) or not 0 <= i < len(vals):
            raise InputError(f"bad cell index in {entry!r}")
        if i in seen:
            raise InputError(f"cell {i} given twice")
        seen.add(i)
        vals[i] = parse_rational(entry)
    return cx.form(k, vals)


# -- complexes ----------------------------------------------------------------

def complex_to_json(cx: Complex) -> dict:
    out = {
        "id": cx.id,
        "counts": list(cx.counts),
        "incidence": {str(k): [list(t) for t in cx.incidence_triplets(k)] for k in range(cx.max_degree)},
        "weights": [[rational(w) for w in ws] for ws in cx.weights],
    }
    if cx.labels is not None:
        out["labels"] = [list(ls) for ls in cx.labels]
    level = getattr(cx, "level", None)
    if level is not None:
        out["family"] = cx.spec.family
        out["level"] = level
    return out


def complex_from_json(data: Mapping) -> Complex:
    try:
        counts = data["counts"]
        incidence = {int(k): [tuple(t) for t in v] for k, v in data["incidence"].items()}
        weights = [[parse_rational(w) for w in ws] for ws in data["weights"]]
    except (KeyError, TypeError, ValueError, AttributeError) as exc:
        if isinstance(exc, InputError):
            raise
        raise InputError(f"malformed complex JSON: {exc}") from None
    for k, trips in incidence.items():
        for t in trips:
            if len(t) != 3 or t[2] not in (1, -1):
                raise InputError(f"bad incidence triplet {t!r} in degree {k}")
            if not (0 <= t[0] < counts[k] and 0 <= t[1] < counts[k + 1]):
                raise InputError(f"incidence {t!r} points outside the complex")
    try:
        return Complex(counts, incidence, weights, data.get("labels"), name=data.get("id"))
    except ValueError as exc:
        raise InputError(str(exc)) from None


# -- CSV tables -----------------------------------------------------------------

def table_csv(header: Sequence[str], rows: Iterable[Sequence[Any]]) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    w.writerows(rows)
    return buf.getvalue()


def spectrum_csv(rep: SpectrumReport, digits: int = 10) -> str:
    """One row per eigenpair; ``multiplicity`` is the size of its cluster."""
    rows = []
    for value, label, mult in rep.grouped():
        rows += [(rep.degree, _fmt(value, digits), label, mult)] * mult
    return table_csv(("degree", "eigenvalue", "label", "multiplicity"), rows)


def _fmt(x: float, digits: int) -> str:
    s = f"{x:.{digits}f}".rstrip("0").rstrip(".")
    return "0" if s in ("-0", "") else s


def pairing_csv(table) -> str:
    rows = []
    for r in table.rows:
        for c in table.cols:
            v = table[(r, c)]
            if v:
                rows.append((_word(r), _word(c), v.numerator, v.denominator))
    return table_csv(("omega", "omega_prime", "num", "den"), rows)


def face_cycle_csv(entries: Iterable[tuple[Sequence[int], int, Fraction]]) -> str:
    return table_csv(("word", "face", "num", "den"),
                ((_word(w), f, Fraction(v).numerator, Fraction(v).denominator) for w, f, v in entries))


def singularity_csv(rep) -> str:
    rows = [(m, x.numerator, x.denominator, b.numerator, b.denominator, int(ok)) for m, x, b, ok in rep.rows()]
    return table_csv(("m", "l1_diff_num", "l1_diff_den", "bound_num", "bound_den", "pass"), rows)


def growth_csv(growth, digits: int = 12) -> str:
    rows = []
    ratios = (None,) + growth.ratios
    for n, (mass, ratio) in enumerate(zip(growth.masses, ratios)):
        m = f"{mass.numerator}/{mass.denominator}" if isinstance(mass, Fraction) else _fmt(mass, digits)
        rows.append((n, m, "" if ratio is None else _fmt(ratio, digits)))
    return table_csv(("n", "mass", "ratio"), rows)


def _word(w: Sequence[int]) -> str:
    return "".join(map(str, w)) or "-"
