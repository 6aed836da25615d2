"""Harmonic 1-forms on the Sierpinski gasket graphs.

Orientation conventions (all exact):

* base edges run ``q0->q1``, ``q1->q2``, ``q2->q0`` (counterclockwise);
* the inner edge of child cell ``s`` is the one opposite its corner ``q_s``;
  base edge ``(s + 1) % 3``;
* the cycle ``F_w gamma`` is the sum of the three inner edges of the
  children of ``F_w``, each with coefficient +1.  With the orientation above
  this traverses the upside-down triangle clockwise;
* ``boundary_chain`` traverses the outer triangle counterclockwise.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from math import isqrt
from typing import Mapping, Sequence

from .complex_core import Chain, KForm, d, delta, integrate, harmonic_basis
from .fractal_builder import (
    SG,
    CellAddress,
    CellMeasure,
    LevelComplex,
    build_sg,
    edge_descendants,
    index_word,
    word_index,
    words,
    words_upto,
)

N_EDGES = 3
INNER = (1, 2, 0)  # base edge opposite corner s


class ConsistencyError(ArithmeticError):
    """An exact construction did not produce the structure it must have."""


@dataclass(frozen=True)
class HarmonicOneForm:
    level: int
    form: KForm
    provenance: str = "combination"

    @property
    def values(self) -> tuple[Fraction, ...]:
        return self.form.values

    def is_harmonic(self) -> bool:
        return d(self.form).is_zero() and delta(self.form).is_zero()


def inner_edge(s: int) -> int:
    return INNER[s]


# -- chains -----------------------------------------------------------------

def _subdivided(cx: LevelComplex, word: Sequence[int], base_edge: int) -> list[int]:
    coarse = word_index(word, 3) * N_EDGES + base_edge
    return edge_descendants(SG, coarse, cx.level - len(word))


def cycle_chain(cx: LevelComplex, word: Sequence[int]) -> Chain:
    """``F_word gamma`` as a 1-chain of ``cx`` (requires ``len(word) < level``)."""
    word = tuple(word)
    if len(word) >= cx.level:
        raise ValueError(f"cycle of word {word} is not resolved at level {cx.level}")
    coeffs: dict[int, int] = {}
    for s in range(3):
        for e in _subdivided(cx, word + (s,), INNER[s]):
            coeffs[e] = 1
    return cx.chain(1, coeffs)


def boundary_chain(cx: LevelComplex, word: Sequence[int] = ()) -> Chain:
    """Counterclockwise boundary of the cell ``F_word K``."""
    coeffs: dict[int, int] = {}
    for e in range(N_EDGES):
        for sub in _subdivided(cx, tuple(word), e):
            coeffs[sub] = 1
    return cx.chain(1, coeffs)


def edge_chain(cx: LevelComplex, word: Sequence[int], base_edge: int) -> Chain:
    return cx.chain(1, {e: 1 for e in _subdivided(cx, tuple(word), base_edge)})


# -- generator and extension ------------------------------------------------

def base_generator() -> HarmonicOneForm:
    """The harmonic 1-form of level 1: 2 on inner edges, -1 on outer edges."""
    cx = build_sg(1)
    basis = harmonic_basis(cx, 1)
    if len(basis) != 1:
        raise ConsistencyError(f"harmonic space at level 1 has dimension {len(basis)}")
    v = basis[0]
    ref = v.values[cx.edge_index((0,), INNER[0])]
    h = v.scale(Fraction(2) / ref)
    for s in range(3):
        for e in range(N_EDGES):
            want = 2 if e == INNER[s] else -1
            if h.values[cx.edge_index((s,), e)] != want:
                raise ConsistencyError("generator does not have the 2 / -1 pattern")
    return HarmonicOneForm(1, h, "generator")


def extend_values(values: Sequence[Fraction], check: bool = True) -> list[Fraction]:
    """One step of the local extension algorithm on raw edge values.

    Child ``s`` of a cell with edge values ``p`` gets ``p[e]/5`` on its inner
    edge and ``(3 p[e] + p[inner(s)])/5`` on its outer edge ``e``.
    """
    n_cells = len(values) // N_EDGES
    out: list[Fraction] = [Fraction(0)] * (len(values) * 3)
    for c in range(n_cells):
        p = values[c * N_EDGES:(c + 1) * N_EDGES]
        if check and sum(p) != 0:
            raise ValueError(f"cell {c} has edge sum {sum(p)}; extension needs d h = 0")
        for s in range(3):
            base = (c * 3 + s) * N_EDGES
            q = p[INNER[s]]
            for e in range(N_EDGES):
                out[base + e] = p[e] / 5 if e == INNER[s] else (3 * p[e] + q) / 5
    return out


def extend(h: HarmonicOneForm) -> HarmonicOneForm:
    finer = build_sg(h.level + 1)
    vals = extend_values(h.form.values)
    return HarmonicOneForm(h.level + 1, finer.form(1, vals), h.provenance)


def extend_to(h: HarmonicOneForm, m: int) -> HarmonicOneForm:
    if m < h.level:
        raise ValueError("cannot extend to a coarser level")
    vals = list(h.form.values)
    for _ in range(m - h.level):
        vals = extend_values(vals)
    return HarmonicOneForm(m, build_sg(m).form(1, vals), h.provenance)


def placed_values(word: Sequence[int], coefficient: Fraction | int = 1) -> tuple[int, list[Fraction]]:
    """Edge values (level ``len(word) + 1``) of the generator seated on ``F_word``."""
    level = len(word) + 1
    vals = [Fraction(0)] * (N_EDGES * 3**level)
    c = Fraction(coefficient)
    root = word_index(word, 3) * 3
    for s in range(3):
        for e in range(N_EDGES):
            vals[(root + s) * N_EDGES + e] = c * (2 if e == INNER[s] else -1)
    return level, vals


def seated(word: Sequence[int], m: int) -> HarmonicOneForm:
    """``h_w``: generator on ``F_w``, zero elsewhere, extended to level ``m``."""
    word = tuple(word)
    if len(word) >= m:
        raise ValueError(f"word {word} needs level > {len(word)}")
    level, vals = placed_values(word)
    for _ in range(m - level):
        vals = extend_values(vals)
    return HarmonicOneForm(m, build_sg(m).form(1, vals), "".join(map(str, word)) or "-")


def basis(m: int) -> list[HarmonicOneForm]:
    """``{h_w : |w| < m}``, shortest words first, lexicographic within a length."""
    if m < 1:
        raise ValueError("level must be >= 1")
    return [seated(w, m) for w in words_upto(m, 3)]


def cycle_integral(h: HarmonicOneForm, word: Sequence[int]) -> Fraction:
    return integrate(h.form, cycle_chain(h.form.complex, word))


# -- pairing and dual basis -------------------------------------------------

@dataclass(frozen=True)
class PairingTable:
    rows: tuple[tuple[int, ...], ...]
    cols: tuple[tuple[int, ...], ...]
    entries: Mapping[tuple[tuple[int, ...], tuple[int, ...]], Fraction]

    def __getitem__(self, key):
        return self.entries.get(key, Fraction(0))

    def nonzero_per_row(self) -> dict[tuple[int, ...], int]:
        out = {r: 0 for r in self.rows}
        for (r, _), v in self.entries.items():
            if v:
                out[r] += 1
        return out


def pairing_table(forms: Sequence[HarmonicOneForm], row_keys: Sequence[tuple[int, ...]], m: int) -> PairingTable:
    cx = build_sg(m)
    cols = tuple(words_upto(m, 3))
    chains = {w: cycle_chain(cx, w) for w in cols}
    entries = {}
    for key, h in zip(row_keys, forms):
        for w in cols:
            v = integrate(h.form, chains[w])
            if v:
                entries[(key, w)] = v
    return PairingTable(tuple(row_keys), cols, entries)


def dual_basis(m: int) -> tuple[list[HarmonicOneForm], PairingTable]:
    """Forms with ``int_{F_w' gamma} h~_w = [w == w']`` and the pairing of ``{h_w}``.

    Entries of the pairing vanish unless ``|w'| <= |w|`` and the diagonal is
    nonzero, so the inverse is found by substitution from the longest words
    down.
    """
    keys = words_upto(m, 3)
    prim = basis(m)
    table = pairing_table(prim, keys, m)
    for (r, c), v in table.entries.items():
        if v and len(c) > len(r) or (len(c) == len(r) and r != c and v):
            raise ConsistencyError(f"pairing is not block triangular at ({r}, {c})")
    for r in keys:
        if not table[(r, r)]:
            raise ConsistencyError(f"pairing table singular at {r}")
    by_col: dict[tuple[int, ...], list[tuple[tuple[int, ...], Fraction]]] = {w: [] for w in keys}
    for (r, c), v in table.entries.items():
        if r != c:
            by_col[c].append((r, v))
    cx = build_sg(m)
    order = sorted(keys, key=len, reverse=True)
    duals = []
    for target in keys:
        x: dict[tuple[int, ...], Fraction] = {}
        for col in order:
            if len(col) > len(target):
                continue  # those coefficients vanish
            s = sum((x.get(r, 0) * v for r, v in by_col[col]), Fraction(0))
            rhs = Fraction(int(col == target)) - s
            if rhs:
                x[col] = rhs / table[(col, col)]
        vals = [Fraction(0)] * cx.count(1)
        for w, a in x.items():
            hv = prim[keys.index(w)].values
            for i, v in enumerate(hv):
                if v:
                    vals[i] += a * v
        name = "dual(" + ("".join(map(str, target)) or "-") + ")"
        duals.append(HarmonicOneForm(m, cx.form(1, vals), name))
    return duals, table


def realize(cycle_values: Mapping[tuple[int, ...], Fraction | int], m: int) -> HarmonicOneForm:
    """Harmonic 1-form with prescribed integrals over the cycles ``F_w gamma``."""
    keys = words_upto(m, 3)
    for w in cycle_values:
        if tuple(w) not in keys:
            raise ValueError(f"cycle {w} is not resolved at level {m}")
    duals, _ = dual_basis(m)
    cx = build_sg(m)
    vals = [Fraction(0)] * cx.count(1)
    for w, c in cycle_values.items():
        hv = duals[keys.index(tuple(w))].values
        for i, v in enumerate(hv):
            if v:
                vals[i] += Fraction(c) * v
    return HarmonicOneForm(m, cx.form(1, vals), "combination")


# -- counterexamples --------------------------------------------------------

def _exact_power_half(base: Fraction, m: int) -> Fraction:
    """``base^(m/2)`` for even ``m``."""
    if m % 2:
        raise ValueError("exact mode needs even m (the amplitude is irrational otherwise)")
    return base ** (m // 2)


@dataclass(frozen=True)
class OscillationWitness:
    level: int
    amplitude: Fraction | float
    energy: Fraction | float  # renormalized graph energy E_0^m
    edge_term: Fraction | float  # unrenormalized sum of |df|^2 along the oscillating edge
    raw_energy: Fraction | float  # unrenormalized sum of |df|^2 over all edges
    variation: Fraction | float  # total variation along the oscillating edge


def oscillation_counterexample(m: int, mode: str = "exact") -> OscillationWitness:
    """Vertex function alternating ``+-2^(-m/2)`` along the bottom edge, zero elsewhere.

    In exact mode the amplitude is ``2^(-ceil(m/2))``, which equals
    ``2^(-m/2)`` for even ``m`` and stays rational for odd ``m``.

    Only the ``2^m`` cells ``F_w``, ``w in {0,1}^m``, carry nonzero differences:
    their corners 0, 1 sit on the bottom edge and corner 2 off it.
    """
    if m < 1:
        raise ValueError("m must be >= 1")
    if mode == "exact":
        amp: Fraction | float = Fraction(1, 2 ** ((m + 1) // 2))
        zero = Fraction(0)
        factor: Fraction | float = Fraction(5, 3) ** m
    elif mode == "float":
        amp, zero, factor = 2.0 ** (-m / 2), 0.0, (5 / 3) ** m
    else:
        raise ValueError(mode)
    n = 2**m
    v = [amp if j % 2 == 0 else -amp for j in range(n + 1)]
    edge_term = raw = variation = zero
    for j in range(n):
        a, b = v[j], v[j + 1]
        edge_term += (b - a) ** 2
        raw += (b - a) ** 2 + b * b + a * a  # edges 0->1, 1->2, 2->0 of the cell
        variation += abs(b - a)
    return OscillationWitness(m, amp, factor * raw, edge_term, raw, variation)


def oscillation_form(m: int) -> KForm:
    """The exact oscillating 0-form on the full level-m complex (even m)."""
    cx = build_sg(m)
    amp = _exact_power_half(Fraction(1, 2), m)
    vals = [Fraction(0)] * cx.count(0)
    for j, w in enumerate(words(m, 3, alphabet=(0, 1))):
        left, right = cx.vertex(w, 0), cx.vertex(w, 1)
        pos = word_index(w, 2)
        vals[left] = amp if pos % 2 == 0 else -amp
        vals[right] = -amp if pos % 2 == 0 else amp
    return cx.form(0, vals)


@dataclass(frozen=True)
class DivergenceWitness:
    m: int
    coefficient: Fraction | float
    norm_proxy: Fraction
    edge_value: Fraction | float
    form_values: tuple | None = field(default=None, repr=False)


def divergent_series_witness(m: int, mode: str = "exact", keep_form: bool = False) -> DivergenceWitness:
    """``sum c_w h_w`` over ``w in {0,1}^m`` with ``c_w = (3/10)^(m/2)``.

    Returns the weighted coefficient norm ``sum (5/3)^|w| c_w^2`` and the value
    on the bottom boundary edge ``q0 -> q1``.
    """
    if m < 1:
        raise ValueError("m must be >= 1")
    c2 = Fraction(3, 10) ** m
    norm = sum((Fraction(5, 3) ** m * c2 for _ in range(2**m)), Fraction(0))
    if mode == "exact":
        c: Fraction | float = _exact_power_half(Fraction(3, 10), m)
    elif mode == "float":
        c = 0.3 ** (m / 2)
    else:
        raise ValueError(mode)
    level = m + 1
    # seats are disjoint cells, so each edge gets at most one generator value
    total: dict[int, int] = {}
    for w in words(m, 3, alphabet=(0, 1)):
        root = word_index(w, 3) * 3
        for s in range(3):
            for e in range(N_EDGES):
                total[(root + s) * N_EDGES + e] = 2 if e == INNER[s] else -1
    bottom = edge_descendants(SG, 0, level)
    edge_sum = Fraction(sum(total.get(e, 0) for e in bottom))
    form_values = None
    if keep_form:
        form_values = tuple(c * total.get(i, 0) for i in range(N_EDGES * 3**level))
    return DivergenceWitness(m, c, norm, c * edge_sum if mode == "exact" else c * float(edge_sum), form_values)


# -- 2-form trace and derivative approximants -------------------------------

def _measure_at(fmu: CellMeasure, n: int) -> CellMeasure:
    if fmu.level < n:
        raise ValueError(f"measure known to level {fmu.level}, need {n}")
    while fmu.level > n:
        fmu = fmu.coarsen()
    return fmu


def touching_cells(edge_word: Sequence[int], base_edge: int, n: int) -> list[int]:
    """Level-n cells containing a sub-edge of ``F_word(base_edge)``.

    Cells meeting the edge only at a single vertex are not included.
    """
    edge_word = tuple(edge_word)
    if n < len(edge_word):
        raise ValueError("refinement level below the edge level")
    a, b = SG.edges[base_edge]
    return [word_index(edge_word + t, 3) for t in words(n - len(edge_word), 3, alphabet=(a, b))]


def delta2_trace(fmu: CellMeasure, edge: CellAddress, n: int) -> Fraction:
    """``(3/2)^n`` times the measure of the level-n cells along ``edge``."""
    if edge.base_cell.degree != 1:
        raise ValueError("trace is taken on an edge")
    mu = _measure_at(fmu, n)
    total = sum((mu.values[i] for i in touching_cells(edge.word, edge.base_cell.index, n)), Fraction(0))
    return Fraction(3, 2) ** n * total


def trace_form(fmu: CellMeasure, m: int, n: int) -> list[Fraction]:
    """Level-m edge values of :func:`delta2_trace` computed at refinement ``n``."""
    from .complex_core import Cell

    out = []
    for i in range(3**m * N_EDGES):
        c, e = divmod(i, N_EDGES)
        out.append(delta2_trace(fmu, CellAddress(index_word(c, m, 3), Cell(1, e)), n))
    return out


def d1_approx(f1: Sequence[Fraction], cell: CellAddress, n: int) -> Fraction:
    """``(2/3)^n`` times the sum of level-n edge data inside a level-m cell."""
    word = tuple(cell.word)
    if len(f1) != N_EDGES * 3**n:
        raise ValueError(f"expected {N_EDGES * 3 ** n} level-{n} edge values, got {len(f1)}")
    if n < len(word):
        raise ValueError("refinement level below the cell level")
    span = 3 ** (n - len(word))
    lo = word_index(word, 3) * span * N_EDGES
    hi = lo + span * N_EDGES
    return Fraction(2, 3) ** n * sum(f1[lo:hi], Fraction(0))


def exact_sqrt(q: Fraction) -> Fraction | None:
    """Square root of a rational square, else None."""
    if q < 0:
        return None
    a, b = isqrt(q.numerator), isqrt(q.denominator)
    return Fraction(a, b) if a * a == q.numerator and b * b == q.denominator else None
