"""Level-m graph complexes for the Sierpinski gasket (SG) and its 3-d analogue.

Cells of level m are addressed by words ``w`` of length m over the contraction
indices ``0..N-1``; the cell ``F_w(base)`` gets lexicographic index
``int(w, base=N)``.  Every k-cell with k >= 1 has index
``cell_index(w) * (#base k-cells) + base_index``.  Vertices are numbered level
by level (``V_0`` first, then new vertices of ``V_1``, ...), so a vertex keeps
its index in every finer complex.

Points are identified by exact barycentric keys: the numerators of the
barycentric coordinates over the common denominator ``2^m``.
"""
from __future__ import annotations

import functools
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterator, Sequence

from .complex_core import Cell, Complex, KForm, ShapeError, d, inner

DEFAULT_CELL_CAP = 2**22


class ResourceCapError(RuntimeError):
    """Requested level exceeds the configured cell cap."""


@dataclass(frozen=True)
class FractalSpec:
    family: str
    n_maps: int
    edges: tuple[tuple[int, int], ...]  # oriented tail -> head
    faces: tuple[tuple[int, int, int], ...]  # cyclic orientation
    solids: tuple[tuple[int, ...], ...]
    base_weights: tuple[Fraction, ...]  # per degree, uniform on base cells
    scaling: tuple[Fraction, ...]  # b_k per degree, same for every branch

    @property
    def max_degree(self) -> int:
        return 3 if self.solids else 2

    def base_count(self, k: int) -> int:
        return (self.n_maps, len(self.edges), len(self.faces), len(self.solids))[k]


SG = FractalSpec(
    family="sg",
    n_maps=3,
    edges=((0, 1), (1, 2), (2, 0)),
    faces=((0, 1, 2),),
    solids=(),
    base_weights=(Fraction(1, 3), Fraction(1), Fraction(1)),
    scaling=(Fraction(1, 3), Fraction(5, 3), Fraction(1, 3)),
)


def sg3_spec(energy_factor: Fraction | int = Fraction(3, 2)) -> FractalSpec:
    """Tetrahedral gasket; ``energy_factor`` is the per-level edge weight ratio."""
    return FractalSpec(
        family="sg3",
        n_maps=4,
        edges=((0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3)),
        faces=((0, 1, 2), (1, 0, 3), (2, 3, 0), (3, 2, 1)),
        solids=((0, 1, 2, 3),),
        base_weights=(Fraction(1, 4), Fraction(1), Fraction(1), Fraction(1)),
        scaling=(Fraction(1, 4), Fraction(energy_factor), Fraction(1, 4), Fraction(1, 4)),
    )


SG3 = sg3_spec()
FAMILIES = {"sg": SG, "sg3": SG3}


def family_spec(family: str | FractalSpec) -> FractalSpec:
    if isinstance(family, FractalSpec):
        return family
    try:
        return FAMILIES[family.lower()]
    except KeyError:
        raise ValueError(f"unknown family {family!r}; expected one of {sorted(FAMILIES)}") from None


def _face_sign(edge: tuple[int, int], face: tuple[int, int, int]) -> int:
    a, b = edge
    cyc = [(face[0], face[1]), (face[1], face[2]), (face[2], face[0])]
    if (a, b) in cyc:
        return 1
    if (b, a) in cyc:
        return -1
    return 0


# -- words ------------------------------------------------------------------

@dataclass(frozen=True)
class Word:
    symbols: tuple[int, ...] = ()
    n_maps: int = 3

    def __post_init__(self):
        for s in self.symbols:
            if not 0 <= s < self.n_maps:
                raise ValueError(f"symbol {s} out of range 0..{self.n_maps - 1}")

    def __len__(self) -> int:
        return len(self.symbols)

    def __add__(self, other: "Word | Sequence[int]") -> "Word":
        tail = other.symbols if isinstance(other, Word) else tuple(other)
        return Word(self.symbols + tail, self.n_maps)

    def index(self) -> int:
        return word_index(self.symbols, self.n_maps)

    def __str__(self) -> str:
        return "".join(map(str, self.symbols)) or "-"


def word_index(symbols: Sequence[int], n_maps: int) -> int:
    i = 0
    for s in symbols:
        i = i * n_maps + s
    return i


def index_word(index: int, length: int, n_maps: int) -> tuple[int, ...]:
    out = []
    for _ in range(length):
        index, s = divmod(index, n_maps)
        out.append(s)
    return tuple(reversed(out))


def words(length: int, n_maps: int, alphabet: Sequence[int] | None = None) -> Iterator[tuple[int, ...]]:
    """All words of the given length, in lexicographic order."""
    import itertools

    return itertools.product(alphabet if alphabet is not None else range(n_maps), repeat=length)


def words_upto(length: int, n_maps: int) -> list[tuple[int, ...]]:
    """Words of length < ``length``, shortest first, lexicographic within a length."""
    return [w for k in range(length) for w in words(k, n_maps)]


def point_key(symbols: Sequence[int], corner: int, n_maps: int, level: int) -> tuple[int, ...]:
    """Barycentric numerators (denominator ``2^level``) of ``F_w(q_corner)``."""
    key = [0] * n_maps
    key[corner] = 1
    scale = 1
    for s in reversed(symbols):
        key[s] += scale
        scale *= 2
    # key now has denominator 2^len(symbols)
    up = 1 << (level - len(symbols))
    return tuple(v * up for v in key)


# -- complexes --------------------------------------------------------------

class LevelComplex(Complex):
    """A :class:`Complex` for one level of a self-similar family."""

    spec: FractalSpec
    level: int
    cell_vertices: tuple[tuple[int, ...], ...]
    vertex_keys: tuple[tuple[int, ...], ...]

    @property
    def n_maps(self) -> int:
        return self.spec.n_maps

    @property
    def boundary_vertices(self) -> range:
        return range(self.spec.n_maps)

    def cell_index(self, symbols: Sequence[int]) -> int:
        if len(symbols) != self.level:
            raise ValueError(f"word of length {len(symbols)} at level {self.level}")
        return word_index(symbols, self.n_maps)

    def edge_index(self, symbols: Sequence[int], base_edge: int) -> int:
        return self.cell_index(symbols) * len(self.spec.edges) + base_edge

    def face_index(self, symbols: Sequence[int], base_face: int) -> int:
        return self.cell_index(symbols) * len(self.spec.faces) + base_face

    def vertex(self, symbols: Sequence[int], corner: int) -> int:
        return self.cell_vertices[self.cell_index(symbols)][corner]

    def vertex_index(self, key: tuple[int, ...]) -> int:
        return self._key_index[key]


def _check_cap(spec: FractalSpec, m: int, cap: int):
    biggest = spec.n_maps**m * max(len(spec.edges), len(spec.faces))
    if biggest > cap:
        raise ResourceCapError(f"{spec.family} level {m} needs {biggest} cells per degree (cap {cap})")


@functools.lru_cache(maxsize=32)
def _build(spec: FractalSpec, m: int) -> LevelComplex:
    if m < 0:
        raise ValueError("level must be >= 0")
    n = spec.n_maps
    key_index: dict[tuple[int, ...], int] = {}
    keys: list[tuple[int, ...]] = []
    for t in range(m + 1):
        for w in words(t, n):
            for corner in range(n):
                key = point_key(w, corner, n, m)
                if key not in key_index:
                    key_index[key] = len(keys)
                    keys.append(key)
    n_cells = n**m
    cell_vertices = []
    for w in words(m, n):
        cell_vertices.append(tuple(key_index[point_key(w, c, n, m)] for c in range(n)))

    ne, nf, ns = len(spec.edges), len(spec.faces), len(spec.solids)
    inc0 = []
    for c, vs in enumerate(cell_vertices):
        for e, (a, b) in enumerate(spec.edges):
            j = c * ne + e
            inc0.append((vs[a], j, -1))
            inc0.append((vs[b], j, 1))
    inc1 = []
    face_signs = [[_face_sign(edge, face) for edge in spec.edges] for face in spec.faces]
    for c in range(n_cells):
        for f in range(nf):
            for e in range(ne):
                s = face_signs[f][e]
                if s:
                    inc1.append((c * ne + e, c * nf + f, s))
    incidence = {0: inc0, 1: inc1}
    counts = [len(keys), n_cells * ne, n_cells * nf]
    if ns:
        incidence[2] = [(c * nf + f, c, 1) for c in range(n_cells) for f in range(nf)]
        counts.append(n_cells * ns)

    b = spec.scaling
    mu0 = [Fraction(0)] * len(keys)
    share = spec.base_weights[0] * b[0] ** m
    for vs in cell_vertices:
        for v in vs:
            mu0[v] += share
    weights = [mu0]
    for k in range(1, spec.max_degree + 1):
        weights.append([spec.base_weights[k] * b[k] ** m] * counts[k])

    labels = [
        [_vertex_label(key, m) for key in keys],
        [f"{_wstr(index_word(c, m, n))}:e{a}{b_}" for c in range(n_cells) for (a, b_) in spec.edges],
        [f"{_wstr(index_word(c, m, n))}:f{''.join(map(str, fc))}" for c in range(n_cells) for fc in spec.faces],
    ]
    if ns:
        labels.append([f"{_wstr(index_word(c, m, n))}:s" for c in range(n_cells)])

    cx = LevelComplex(counts, incidence, weights, labels, name=f"{spec.family}-{m}")
    cx.spec = spec
    cx.level = m
    cx.cell_vertices = tuple(cell_vertices)
    cx.vertex_keys = tuple(keys)
    cx._key_index = key_index
    return cx


def _wstr(w: Sequence[int]) -> str:
    return "".join(map(str, w)) or "-"


def _vertex_label(key: tuple[int, ...], m: int) -> str:
    return "(" + ",".join(str(Fraction(v, 2**m)) for v in key) + ")"


def build_level(family: str | FractalSpec, m: int, cell_cap: int = DEFAULT_CELL_CAP) -> LevelComplex:
    spec = family_spec(family)
    _check_cap(spec, m, cell_cap)
    return _build(spec, m)


def build_sg(m: int, cell_cap: int = DEFAULT_CELL_CAP) -> LevelComplex:
    return build_level(SG, m, cell_cap)


def build_sg3(m: int, cell_cap: int = DEFAULT_CELL_CAP, energy_factor: Fraction | int | None = None) -> LevelComplex:
    spec = SG3 if energy_factor is None else sg3_spec(energy_factor)
    return build_level(spec, m, cell_cap)


def expected_counts(family: str, m: int) -> tuple[int, ...]:
    if family == "sg":
        return ((3 ** (m + 1) + 3) // 2, 3 ** (m + 1), 3**m)
    if family == "sg3":
        return (2 * 4**m + 2, 6 * 4**m, 4 ** (m + 1), 4**m)
    raise ValueError(family)


# -- addressing -------------------------------------------------------------

@dataclass(frozen=True)
class CellAddress:
    word: tuple[int, ...]
    base_cell: Cell


def resolve(addr: CellAddress, target: LevelComplex) -> Cell:
    """The cell ``F_word(base_cell)`` of ``target``; vertex aliases coincide."""
    n = target.n_maps
    for s in addr.word:
        if not 0 <= s < n:
            raise ValueError(f"symbol {s} out of range for {target.spec.family}")
    if len(addr.word) != target.level:
        raise ValueError(f"word length {len(addr.word)} does not match level {target.level}")
    k, b = addr.base_cell.degree, addr.base_cell.index
    if not 0 <= b < target.spec.base_count(k):
        raise ValueError(f"base cell {b} does not exist in degree {k}")
    if k == 0:
        i = target.vertex(addr.word, b)
    else:
        i = word_index(addr.word, n) * target.spec.base_count(k) + b
    return Cell(k, i, target.labels[k][i] if target.labels else None)


def edge_children(spec: FractalSpec, edge: int) -> tuple[int, int]:
    """Indices at level m+1 of the two halves of level-m edge ``edge`` (tail half first)."""
    ne = len(spec.edges)
    c, e = divmod(edge, ne)
    a, b = spec.edges[e]
    n = spec.n_maps
    return (c * n + a) * ne + e, (c * n + b) * ne + e


def edge_descendants(spec: FractalSpec, edge: int, levels: int) -> list[int]:
    """The ``2^levels`` sub-edges of ``edge``, ordered from tail to head."""
    out = [edge]
    for _ in range(levels):
        out = [ch for e in out for ch in edge_children(spec, e)]
    return out


# -- energies, measures, Laplacian -----------------------------------------

def graph_energy(f0: KForm, m: int | None = None) -> Fraction:
    """Renormalized graph energy ``b_1^m * sum_edges |d f0|^2``."""
    c = f0.complex
    if f0.degree != 0:
        raise ShapeError("graph energy takes a 0-form")
    if m is not None and getattr(c, "level", m) != m:
        raise ValueError(f"form lives on level {c.level}, not {m}")
    spec: FractalSpec = c.spec
    factor = spec.base_weights[1] * spec.scaling[1] ** c.level
    return factor * sum((v * v for v in d(f0).values), Fraction(0))


@functools.lru_cache(maxsize=None)
def extension_matrices(family: str | FractalSpec) -> tuple[tuple[tuple[Fraction, ...], ...], ...]:
    """Harmonic extension maps: child ``s`` corner values from parent corner values.

    SG uses the 1/5-2/5 rule, SG3 the 1/6-1/3 rule.
    """
    spec = family_spec(family)
    n = spec.n_maps
    if spec.family == "sg":
        near, far = Fraction(2, 5), Fraction(1, 5)
    elif spec.family == "sg3":
        near, far = Fraction(1, 3), Fraction(1, 6)
    else:
        raise ValueError(spec.family)
    mats = []
    for s in range(n):
        rows = []
        for k in range(n):
            if k == s:
                rows.append(tuple(Fraction(int(j == s)) for j in range(n)))
            else:
                rows.append(tuple(near if j in (s, k) else far for j in range(n)))
        mats.append(tuple(rows))
    return tuple(mats)


def extend_values(values: Sequence[Fraction], child: int, family: str | FractalSpec) -> tuple[Fraction, ...]:
    mat = extension_matrices(family)[child]
    return tuple(sum((a * v for a, v in zip(row, values) if a), Fraction(0)) for row in mat)


def harmonic_extend0(f0: KForm, finer: LevelComplex | None = None) -> KForm:
    """Harmonic extension of a vertex function to the next level."""
    c: LevelComplex = f0.complex
    finer = finer or build_level(c.spec, c.level + 1)
    vals: list[Fraction | None] = [None] * finer.count(0)
    for i, v in enumerate(f0.values):
        vals[i] = v
    n = c.n_maps
    for ci, vs in enumerate(c.cell_vertices):
        corner_vals = [f0.values[v] for v in vs]
        for s in range(n):
            child = finer.cell_vertices[ci * n + s]
            ext = extend_values(corner_vals, s, c.spec)
            for k, v in zip(child, ext):
                if vals[k] is None:
                    vals[k] = v
    return finer.form(0, vals)


def harmonic_from_boundary(boundary: Sequence[Fraction | int], cx: LevelComplex) -> KForm:
    """Harmonic function with the given values on ``V_0``, sampled on ``cx``."""
    f = build_level(cx.spec, 0).form(0, boundary)
    for _ in range(cx.level):
        f = harmonic_extend0(f)
    return f


def restrict0(f0: KForm, coarser: LevelComplex) -> KForm:
    """Restriction of a vertex function to a coarser level (indices are stable)."""
    return coarser.form(0, f0.values[: coarser.count(0)])


@dataclass(frozen=True)
class CellMeasure:
    """Values on the level-n top cells of a family, indexed lexicographically."""

    family: str
    level: int
    values: tuple

    def total(self):
        return sum(self.values)

    def cell(self, symbols: Sequence[int]):
        return self.values[word_index(symbols, family_spec(self.family).n_maps)]

    def coarsen(self) -> "CellMeasure":
        n = family_spec(self.family).n_maps
        vals = tuple(sum(self.values[i * n:(i + 1) * n]) for i in range(len(self.values) // n))
        return CellMeasure(self.family, self.level - 1, vals)


def standard_measure(family: str | FractalSpec, n: int, branch_masses: Sequence[Fraction] | None = None) -> CellMeasure:
    """Self-similar measure with ``mu(F_w K) = prod b_0^{w_j}``."""
    spec = family_spec(family)
    b0 = tuple(Fraction(x) for x in branch_masses) if branch_masses is not None else (spec.scaling[0],) * spec.n_maps
    if len(b0) != spec.n_maps or sum(b0) != 1:
        raise ValueError("branch masses must sum to 1")
    vals = [Fraction(1)]
    for _ in range(n):
        vals = [v * b for v in vals for b in b0]
    return CellMeasure(spec.family, n, tuple(vals))


def density_measure(density: Sequence[Fraction | int], density_level: int, n: int, family: str = "sg") -> CellMeasure:
    """``f d(mu)`` for ``f`` constant on each level-``density_level`` cell."""
    spec = family_spec(family)
    if n < density_level:
        raise ValueError("measure level must be at least the density level")
    base = standard_measure(spec, n)
    per = spec.n_maps ** (n - density_level)
    return CellMeasure(spec.family, n, tuple(Fraction(density[i // per]) * v for i, v in enumerate(base.values)))


def kigami_laplacian0(f0: KForm, m: int | None = None) -> KForm:
    """Renormalized graph Laplacian ``-Delta_0^m`` on a level-m SG complex.

    Interior vertices get ``(3/2) 5^m sum_y (f(x) - f(y))``, boundary vertices
    ``3 * 5^m sum_y (f(x) - f(y))``.
    """
    c: LevelComplex = f0.complex
    if c.spec.family != "sg":
        raise ValueError("kigami_laplacian0 is defined for SG")
    m = c.level if m is None else m
    if m != c.level:
        raise ValueError("level mismatch")
    interior = Fraction(3, 2) * 5**m
    corner = 3 * 5**m
    out = [Fraction(0)] * c.count(0)
    for x, cs in enumerate(c.cofaces[0]):
        acc = Fraction(0)
        for e, _ in cs:
            (y0, _s0), (y1, _s1) = c.faces[1][e]
            y = y1 if y0 == x else y0
            acc += f0.values[x] - f0.values[y]
        out[x] = (corner if x < c.n_maps else interior) * acc
    return c.form(0, out)


def weight_recursion_holds(c: LevelComplex) -> bool:
    """Check ``mu_k^m = b_k mu_k^{m-1}`` cellwise against the coarser level."""
    if c.level == 0:
        return True
    prev = build_level(c.spec, c.level - 1)
    for k in range(1, c.max_degree + 1):
        nb = c.spec.base_count(k)
        for i, w in enumerate(c.weights[k]):
            cell, b = divmod(i, nb)
            if w != c.spec.scaling[k] * prev.weights[k][(cell // c.n_maps) * nb + b]:
                return False
    return True


__all__ = [
    "SG", "SG3", "FractalSpec", "LevelComplex", "Word", "CellAddress", "CellMeasure",
    "ResourceCapError", "build_sg", "build_sg3", "build_level", "resolve", "graph_energy",
    "standard_measure", "density_measure", "kigami_laplacian0", "harmonic_extend0",
    "harmonic_from_boundary", "extension_matrices", "edge_children", "edge_descendants",
    "expected_counts", "words", "words_upto", "word_index", "index_word", "inner",
]
