"""Edge restrictions of harmonic functions, energy measures and Kusuoka-type weights.

Everything here lives on the Sierpinski gasket.  Harmonic functions are
described by their three boundary values; values on a cell ``F_w`` are
``M_w v = M_{w_n} ... M_{w_1} v`` with the 1/5-2/5 extension matrices.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

import numpy as np

from .complex_core import KForm
from .exact import nullspace
from .fractal_builder import (
    SG,
    CellAddress,
    CellMeasure,
    LevelComplex,
    ResourceCapError,
    extension_matrices,
    word_index,
    words,
)

SAMPLE_CAP = 2**24
GROWTH_CAP = 40
GROWTH_BASE = (17 + math.sqrt(73)) / 30

Matrix = tuple[tuple[Fraction, ...], ...]


def _mats() -> tuple[Matrix, ...]:
    return extension_matrices("sg")


def _apply(mat: Matrix, v: Sequence[Fraction]) -> tuple[Fraction, ...]:
    return tuple(sum((a * x for a, x in zip(row, v)), Fraction(0)) for row in mat)


def cell_values(boundary: Sequence[Fraction | int], word: Sequence[int]) -> tuple[Fraction, ...]:
    """Corner values on ``F_word`` of the harmonic function with these boundary values."""
    v = tuple(Fraction(x) for x in boundary)
    mats = _mats()
    for s in word:
        v = _apply(mats[s], v)
    return v


def _cell_energy(v: Sequence[Fraction]) -> Fraction:
    a, b, c = v
    return (a - b) ** 2 + (b - c) ** 2 + (c - a) ** 2


# -- edge restriction ------------------------------------------------------

@dataclass(frozen=True)
class EdgeRestriction:
    level: int
    samples: tuple[Fraction, ...]
    edge: int = 0
    word: tuple[int, ...] = ()


def restrict_harmonic(boundary: Sequence[Fraction | int], edge: int = 0, m: int = 0,
                      word: Sequence[int] = (), cap: int = SAMPLE_CAP) -> EdgeRestriction:
    """Samples at ``j / 2^m`` along a boundary edge of ``F_word``.

    The first refinement is seeded from the 1/5-2/5 rule; later ones use the
    two-branch recursion ``8/25 a + 4/5 b - 3/25 c``.
    """
    if 2**m + 1 > cap:
        raise ResourceCapError(f"2^{m}+1 samples exceed the cap {cap}")
    if not 0 <= edge < 3:
        raise ValueError(f"edge must be 0, 1 or 2, got {edge}")
    v = cell_values(boundary, word)
    tail, head = SG.edges[edge]
    other = 3 - tail - head
    a, b, c = v[tail], v[head], v[other]
    s = [a, b]
    if m >= 1:
        s = [a, (2 * a + 2 * b + c) / 5, b]
    for _ in range(m - 1):
        s = _refine(s)
    return EdgeRestriction(m, tuple(s), edge, tuple(word))


def _refine(s: list[Fraction]) -> list[Fraction]:
    out = []
    k1, k2, k3 = Fraction(8, 25), Fraction(4, 5), Fraction(-3, 25)
    for j in range(len(s) - 1):
        out.append(s[j])
        if j % 2 == 0:
            out.append(k1 * s[j] + k2 * s[j + 1] + k3 * s[j + 2])
        else:
            out.append(k1 * s[j + 1] + k2 * s[j] + k3 * s[j - 1])
    out.append(s[-1])
    return out


def _increments(r: EdgeRestriction, m: int) -> list[Fraction]:
    if m > r.level:
        raise ValueError(f"samples known to level {r.level}, need {m}")
    step = 2 ** (r.level - m)
    pts = r.samples[::step]
    return [pts[j + 1] - pts[j] for j in range(2**m)]


@dataclass(frozen=True)
class DyadicApproximant:
    level: int
    values: tuple[Fraction, ...]

    def mass(self) -> Fraction:
        return sum(self.values, Fraction(0)) / 2**self.level


def dyadic_approximant(r: EdgeRestriction, m: int) -> DyadicApproximant:
    return DyadicApproximant(m, tuple(2**m * x for x in _increments(r, m)))


def l1_difference(r: EdgeRestriction, m: int) -> Fraction:
    """``||g_{m+1} - g_m||_1`` as a sum over sibling intervals."""
    inc = _increments(r, m + 1)
    return sum((abs(inc[2 * j] - inc[2 * j + 1]) for j in range(2**m)), Fraction(0))


def l1_difference_direct(r: EdgeRestriction, m: int) -> Fraction:
    """Same quantity integrated piece by piece from the two step functions."""
    g0 = dyadic_approximant(r, m).values
    g1 = dyadic_approximant(r, m + 1).values
    width = Fraction(1, 2 ** (m + 1))
    return sum((abs(g1[i] - g0[i // 2]) * width for i in range(len(g1))), Fraction(0))


@dataclass(frozen=True)
class SingularityReport:
    boundary: tuple[Fraction, ...]
    edge: int
    differences: tuple[Fraction, ...]  # index m
    bound: Fraction

    @property
    def passed(self) -> bool:
        return all(x >= self.bound for x in self.differences)

    def rows(self):
        for m, x in enumerate(self.differences):
            yield m, x, self.bound, x >= self.bound


def singularity_report(boundary: Sequence[Fraction | int], edge: int = 0, max_level: int = 14) -> SingularityReport:
    v = tuple(Fraction(x) for x in boundary)
    if len(set(v)) == 1:
        raise ValueError("constant boundary values give the zero measure; nothing to test")
    r = restrict_harmonic(v, edge, max_level)
    bound = Fraction(3, 25) * abs(r.samples[-1] - r.samples[0])
    diffs = tuple(l1_difference(r, m) for m in range(max_level))
    return SingularityReport(v, edge, diffs, bound)


# -- energy measures -------------------------------------------------------

def energy_measure(boundary: Sequence[Fraction | int], n: int) -> CellMeasure:
    """``nu_h`` on level-n cells: renormalized energy of ``h`` on each cell."""
    mats = _mats()
    vals = [tuple(Fraction(x) for x in boundary)]
    for _ in range(n):
        vals = [_apply(mats[s], v) for v in vals for s in range(3)]
    factor = Fraction(5, 3) ** n
    return CellMeasure("sg", n, tuple(factor * _cell_energy(v) for v in vals))


def energy0(boundary: Sequence[Fraction | int]) -> Fraction:
    return _cell_energy([Fraction(x) for x in boundary])


def _energy_form() -> Matrix:
    # sum over the three edges of (x_a - x_b)^2
    two, m1 = Fraction(2), Fraction(-1)
    return ((two, m1, m1), (m1, two, m1), (m1, m1, two))


def _matmul(a: Matrix, b: Matrix) -> Matrix:
    return tuple(tuple(sum((a[i][k] * b[k][j] for k in range(3)), Fraction(0)) for j in range(3)) for i in range(3))


def _transpose(a: Matrix) -> Matrix:
    return tuple(tuple(a[j][i] for j in range(3)) for i in range(3))


def _quad(v: Sequence[Fraction], x: Matrix, w: Sequence[Fraction] | None = None) -> Fraction:
    w = v if w is None else w
    return sum((v[i] * x[i][j] * w[j] for i in range(3) for j in range(3)), Fraction(0))


def transfer(x: Matrix, alphabet: Sequence[int] = (0, 1)) -> Matrix:
    """``sum_s M_s^T X M_s`` over the symbols in ``alphabet``."""
    mats = _mats()
    out = [[Fraction(0)] * 3 for _ in range(3)]
    for s in alphabet:
        y = _matmul(_transpose(mats[s]), _matmul(x, mats[s]))
        for i in range(3):
            for j in range(3):
                out[i][j] += y[i][j]
    return tuple(tuple(r) for r in out)


def _word_matrix(word: Sequence[int]) -> Matrix:
    mats = _mats()
    acc: Matrix = tuple(tuple(Fraction(int(i == j)) for j in range(3)) for i in range(3))
    for s in word:
        acc = _matmul(mats[s], acc)
    return acc


@dataclass(frozen=True)
class Growth:
    masses: tuple  # index n = 0..depth
    method: str

    @property
    def ratios(self) -> tuple[float, ...]:
        out = []
        for a, b in zip(self.masses, self.masses[1:]):
            out.append(float(b) / float(a) if a else math.nan)
        return tuple(out)


def kusuoka_growth(boundary: Sequence[Fraction | int], n: int, method: str = "transfer",
                   edge: int = 0) -> Growth:
    """``nu_h`` of the union of level-k cells along a boundary edge, k = 0..n.

    ``method="transfer"`` is exact: the sum over words in ``{a,b}^k`` of
    ``(5/3)^k (M_w v)^T A (M_w v)`` equals ``(5/3)^k v^T T^k(A) v``.
    ``method="direct"`` sums cell energies over all ``2^k`` words in floating
    point; it is the slow cross-check.
    """
    if n < 0:
        raise ValueError("depth must be >= 0")
    if n > GROWTH_CAP or (method == "direct" and n > 30):
        raise ResourceCapError(f"depth {n} exceeds the cap for method {method!r}")
    v = tuple(Fraction(x) for x in boundary)
    alphabet = SG.edges[edge]
    if method == "transfer":
        x = _energy_form()
        masses = []
        for k in range(n + 1):
            masses.append(Fraction(5, 3) ** k * _quad(v, x))
            x = transfer(x, alphabet)
        return Growth(tuple(masses), method)
    if method == "direct":
        return Growth(tuple(direct_mass(v, k, alphabet) for k in range(n + 1)), method)
    raise ValueError(f"unknown method {method!r}")


def direct_mass(v: Sequence[Fraction | int], n: int, alphabet: Sequence[int] = (0, 1), leaf_levels: int = 18) -> float:
    """Float sum of ``(5/3)^n`` cell energies over all words in ``alphabet^n``.

    Depth-first over the leading symbols, vectorized over the last
    ``leaf_levels`` ones.
    """
    mats = np.array([[[float(x) for x in row] for row in m] for m in _mats()])
    sub = [mats[s] for s in alphabet]
    top = max(0, n - leaf_levels)
    total = 0.0

    def leaves(vals: np.ndarray, depth: int) -> float:
        for _ in range(depth):
            vals = np.concatenate([vals @ m.T for m in sub])
        a, b, c = vals[:, 0], vals[:, 1], vals[:, 2]
        return float(np.sum((a - b) ** 2 + (b - c) ** 2 + (c - a) ** 2))

    stack = [(np.array([[float(x) for x in v]]), 0)]
    while stack:  # depth-first over the first ``top`` symbols
        vals, depth = stack.pop()
        if depth == top:
            total += leaves(vals, n - top)
            continue
        for m in reversed(sub):
            stack.append((vals @ m.T, depth + 1))
    return (5 / 3) ** n * total


# -- Kusuoka measure ---------------------------------------------------------

HARMONIC_BASIS = ((Fraction(1), Fraction(0), Fraction(0)), (Fraction(0), Fraction(1), Fraction(0)))


class KusuokaMeasure:
    """``nu = nu_h1 + nu_h2`` for an energy-orthonormal pair, times a cell-constant density.

    Evaluated through the Gram matrix of a fixed harmonic basis, which gives
    the same value for every orthonormal pair.
    """

    def __init__(self, density: Sequence[Fraction | int] | None = None, density_level: int = 0):
        a = _energy_form()
        b = HARMONIC_BASIS
        g = [[_quad(b[i], a, b[j]) for j in range(2)] for i in range(2)]
        det = g[0][0] * g[1][1] - g[0][1] * g[1][0]
        self.gram_inverse = ((g[1][1] / det, -g[0][1] / det), (-g[1][0] / det, g[0][0] / det))
        self.density = tuple(Fraction(x) for x in density) if density is not None else None
        self.density_level = density_level
        if self.density is not None and len(self.density) != 3**density_level:
            raise ValueError("density needs one value per level cell")

    def _trace(self, x: Matrix) -> Fraction:
        b, gi = HARMONIC_BASIS, self.gram_inverse
        return sum((gi[i][j] * _quad(b[i], x, b[j]) for i in range(2) for j in range(2)), Fraction(0))

    def _weight(self, word: Sequence[int]) -> Fraction:
        if self.density is None:
            return Fraction(1)
        if len(word) < self.density_level:
            raise ValueError("cell coarser than the density level")
        return self.density[word_index(word[: self.density_level], 3)]

    def cell(self, word: Sequence[int]) -> Fraction:
        mw = _word_matrix(word)
        x = _matmul(_transpose(mw), _matmul(_energy_form(), mw))
        return self._weight(word) * Fraction(5, 3) ** len(word) * self._trace(x)

    def values(self, n: int) -> CellMeasure:
        return CellMeasure("sg", n, tuple(self.cell(w) for w in words(n, 3)))

    def along_edge(self, word: Sequence[int], base_edge: int, n: int) -> Fraction:
        """Mass of the level-n cells of ``F_word`` along its edge ``base_edge``."""
        word = tuple(word)
        if n < max(len(word), self.density_level):
            raise ValueError("refinement level too small")
        if len(word) < self.density_level:
            a, b = SG.edges[base_edge]
            tails = words(self.density_level - len(word), 3, alphabet=(a, b))
            return sum((self._along_fixed(word + t, base_edge, n) for t in tails), Fraction(0))
        return self._along_fixed(word, base_edge, n)

    def _along_fixed(self, word: tuple[int, ...], base_edge: int, n: int) -> Fraction:
        x = _energy_form()
        for _ in range(n - len(word)):
            x = transfer(x, SG.edges[base_edge])
        mw = _word_matrix(word)
        y = _matmul(_transpose(mw), _matmul(x, mw))
        return self._weight(word) * Fraction(5, 3) ** n * self._trace(y)


def delta2_prime_approx(fnu, edge: CellAddress, n: int) -> float:
    """``(30/(17+sqrt 73))^n`` times the ``f nu`` mass of level-n cells along ``edge``."""
    if edge.base_cell.degree != 1:
        raise ValueError("trace is taken on an edge")
    if n < len(edge.word):
        raise ValueError("refinement level below the edge level")
    if hasattr(fnu, "along_edge"):
        mass = fnu.along_edge(edge.word, edge.base_cell.index, n)
    else:
        from .sg_harmonic import touching_cells

        mu = fnu
        if mu.level < n:
            raise ValueError(f"measure known to level {mu.level}, need {n}")
        while mu.level > n:
            mu = mu.coarsen()
        mass = sum((mu.values[i] for i in touching_cells(edge.word, edge.base_cell.index, n)), Fraction(0))
    return float(mass) / GROWTH_BASE**n


# -- vertex weights from a measure ---------------------------------------------

def spline_corner_rows(depth: int) -> list[tuple[Fraction, Fraction, Fraction]]:
    """For each tail word ``t``: the corner average of ``M_t e_c``, for c = 0, 1, 2."""
    mats = _mats()
    rows = [(Fraction(1, 3),) * 3]  # row vector (1/3)(1,1,1) M_t
    for _ in range(depth):
        nxt = []
        for r in rows:
            for s in range(3):
                m = mats[s]
                nxt.append(tuple(sum((r[k] * m[k][c] for k in range(3)), Fraction(0)) for c in range(3)))
        rows = nxt
    return rows


def nu_vertex_weights(nu: CellMeasure, m: int, cx: LevelComplex | None = None) -> list[Fraction]:
    """``mu'_0`` on level-m vertices: spline integrals by corner-average quadrature.

    ``nu`` must be given on cells at level ``n >= m``; the quadrature uses the
    corner average of the level-m spline on each level-n cell.
    """
    from .fractal_builder import build_sg

    if nu.family != "sg":
        raise ValueError("vertex weights are implemented for the gasket")
    n = nu.level
    if n < m:
        raise ValueError(f"measure at level {n} is coarser than vertex level {m}")
    cx = cx or build_sg(m)
    rows = spline_corner_rows(n - m)
    span = 3 ** (n - m)
    out = [Fraction(0)] * cx.count(0)
    for p, corners in enumerate(cx.cell_vertices):
        block = nu.values[p * span:(p + 1) * span]
        for c, vtx in enumerate(corners):
            out[vtx] += sum((x * r[c] for x, r in zip(block, rows) if x), Fraction(0))
    return out


def self_similar_spline_weights() -> tuple[Fraction, Fraction, Fraction]:
    """``w`` with ``int_{F_w K} u dmu = mu(F_w K) <w, corner values of u>`` for harmonic ``u``.

    The fixed point of ``w = (1/3) sum_s M_s^T w`` with ``sum w = 1``.
    """
    mats = _mats()
    rows = []
    for i in range(3):
        row = {}
        for j in range(3):
            coef = sum((mats[s][j][i] for s in range(3)), Fraction(0)) / 3 - int(i == j)
            if coef:
                row[j] = coef
        rows.append(row)
    ns = nullspace(rows, 3)
    if len(ns) != 1:
        raise ArithmeticError("spline fixed point is not unique")
    w = [Fraction(x) for x in ns[0]]
    total = sum(w)
    return tuple(x / total for x in w)


def exact_spline_integrals(m: int, cx: LevelComplex | None = None) -> list[Fraction]:
    """``int Psi_v dmu`` for the standard measure, from the self-similar weights."""
    from .fractal_builder import build_sg

    cx = cx or build_sg(m)
    w = self_similar_spline_weights()
    out = [Fraction(0)] * cx.count(0)
    cell_mass = Fraction(1, 3**m)
    for corners in cx.cell_vertices:
        for c, vtx in enumerate(corners):
            out[vtx] += cell_mass * w[c]
    return out


def delta1_prime(f1: KForm, weights: Sequence[Fraction]) -> KForm:
    """``delta_1`` with ``(5/3)^m / mu'_0`` as the vertex factor."""
    cx: LevelComplex = f1.complex
    if f1.degree != 1:
        raise ValueError("delta1_prime takes a 1-form")
    if len(weights) != cx.count(0):
        raise ValueError("one weight per vertex required")
    b1 = cx.weights[1][0] if cx.count(1) else Fraction(1)
    vals = []
    for v in range(cx.count(0)):
        s = sum((sign * f1.values[e] for e, sign in cx.cofaces[0][v]), Fraction(0))
        vals.append(b1 / weights[v] * s)
    return cx.form(0, vals)
