"""Harmonic 1-forms on the tetrahedral gasket graphs.

Edges of a simplex are stored as ``i -> j`` for ``i < j``.  The face cycle of
face ``(x, y, z)`` of a simplex is the triangle of midpoints
``p_xy -> p_yz -> p_zx``, traversed in the same sense as the face.  For a
closed form whose finer inner triangles inside that face all integrate to 0
(any form living one level below the word, for instance), the cycle integral
equals the integral over the face boundary, and the four of them sum to 0.
"""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from itertools import permutations
from typing import Mapping, Sequence

from .complex_core import Chain, KForm, d, delta, divergence, inner, integrate
from .exact import nullspace, solve
from .fractal_builder import SG3, LevelComplex, build_sg3, edge_descendants, word_index, words_upto

EDGES = SG3.edges
FACES = SG3.faces
N_EDGES = len(EDGES)
_EDGE_AT = {e: i for i, e in enumerate(EDGES)}
BASE_DIVERGENCE = (0, 0, 2, -2)


class ConsistencyError(ArithmeticError):
    pass


@dataclass(frozen=True)
class TetraForm:
    level: int
    form: KForm
    index: int | None = None  # which A_j, when seated
    word: tuple[int, ...] | None = None

    @property
    def values(self) -> tuple[Fraction, ...]:
        return self.form.values

    def is_harmonic(self) -> bool:
        return d(self.form).is_zero() and delta(self.form).is_zero()


def oriented(a: int, b: int) -> tuple[int, int]:
    """(edge index, sign) of the directed edge ``a -> b`` of a simplex."""
    if a < b:
        return _EDGE_AT[(a, b)], 1
    return _EDGE_AT[(b, a)], -1


def directed(values: Sequence[Fraction], a: int, b: int) -> Fraction:
    i, s = oriented(a, b)
    return s * values[i]


def opposite_face(q: int) -> int:
    for f, face in enumerate(FACES):
        if q not in face:
            return f
    raise ValueError(q)


# -- base form and rotations -------------------------------------------------

def base_form() -> KForm:
    """1-form on the six tetrahedron edges: closed on faces, divergence (0, 0, 2, -2)."""
    cx = build_sg3(0)
    rows = []
    for v in range(4):
        row = {}
        for e, (a, b) in enumerate(EDGES):
            if v == a:
                row[e] = -1
            elif v == b:
                row[e] = 1
        rows.append((row, BASE_DIVERGENCE[v]))
    for face in FACES:
        row = {}
        for i in range(3):
            e, s = oriented(face[i], face[(i + 1) % 3])
            row[e] = s
        rows.append((row, 0))
    # uniqueness: the homogeneous system has no nonzero solution
    homog = [r for r, _ in rows]
    if nullspace(homog, N_EDGES):
        raise ConsistencyError("base form is not unique")
    # square subsystem: 3 independent vertex rows and 3 independent face rows
    pick = [0, 1, 2, 4, 5, 6]
    a = [[Fraction(rows[i][0].get(j, 0)) for j in range(N_EDGES)] for i in pick]
    b = [Fraction(rows[i][1]) for i in pick]
    x = solve(a, b)
    f = cx.form(1, x)
    if tuple(divergence(f).values) != BASE_DIVERGENCE or not d(f).is_zero():
        raise ConsistencyError("base form misses its constraints")
    return f


EVEN_PERMUTATIONS = tuple(
    p for p in permutations(range(4))
    if sum(1 for i in range(4) for j in range(i + 1, 4) if p[i] > p[j]) % 2 == 0
)


def relabel(values: Sequence[Fraction], perm: Sequence[int]) -> list[Fraction]:
    """Push a simplex form forward along the vertex map ``q_i -> q_perm[i]``."""
    out = [Fraction(0)] * N_EDGES
    for e, (a, b) in enumerate(EDGES):
        i, s = oriented(perm[a], perm[b])
        out[i] = s * values[e]
    return out


def rotated_base(zero_pair: tuple[int, int], plus: int, minus: int) -> list[Fraction]:
    """Rotation of the base form with divergence +2 at ``plus``, -2 at ``minus``."""
    base = base_form().values
    for p in EVEN_PERMUTATIONS:
        if p[2] == plus and p[3] == minus and {p[0], p[1]} == set(zero_pair):
            return relabel(base, p)
    raise ValueError(f"no rotation for zeros {zero_pair}, +{plus}, -{minus}")


# -- level-1 forms ----------------------------------------------------------

def face_cycle_chain(cx: LevelComplex, word: Sequence[int], face: int) -> Chain:
    word = tuple(word)
    if len(word) >= cx.level:
        raise ValueError(f"cycle of word {word} is not resolved at level {cx.level}")
    x, y, z = FACES[face]
    coeffs: dict[int, int] = {}
    for prev, corner, nxt in ((x, y, z), (y, z, x), (z, x, y)):
        e, s = oriented(prev, nxt)
        coarse = word_index(word + (corner,), 4) * N_EDGES + e
        for sub in edge_descendants(SG3, coarse, cx.level - len(word) - 1):
            coeffs[sub] = s
    return cx.chain(1, coeffs)


def face_boundary_chain(cx: LevelComplex, word: Sequence[int], face: int) -> Chain:
    word = tuple(word)
    f = FACES[face]
    coeffs: dict[int, int] = {}
    for i in range(3):
        e, s = oriented(f[i], f[(i + 1) % 3])
        coarse = word_index(word, 4) * N_EDGES + e
        for sub in edge_descendants(SG3, coarse, cx.level - len(word)):
            coeffs[sub] = s
    return cx.chain(1, coeffs)


def face_cycle_integrals(h: TetraForm | KForm, word: Sequence[int] = ()) -> tuple[Fraction, ...]:
    """Integrals over the inner-triangle cycles of the four faces of ``F_word``."""
    form = h.form if isinstance(h, TetraForm) else h
    cx = form.complex
    return tuple(integrate(form, face_cycle_chain(cx, word, f)) for f in range(len(FACES)))


def placement(j: int) -> TetraForm:
    """Level-1 harmonic form vanishing on child ``j``.

    The other three children carry rotated base forms whose divergence
    vanishes at their outer corner and at their junction with child ``j``,
    with +-2 alternating around the remaining junction triangle.  The sign
    is fixed so the cycle of the face opposite ``q_j`` integrates to 3.
    """
    cx = build_sg3(1)
    others = [i for i in range(4) if i != j]
    vals = [Fraction(0)] * cx.count(1)
    for t, i in enumerate(others):
        nxt, prv = others[(t + 1) % 3], others[(t - 1) % 3]
        # child i corner k sits at the junction p_ik
        local = rotated_base((i, j), plus=nxt, minus=prv)
        for e in range(N_EDGES):
            vals[i * N_EDGES + e] = local[e]
    h = TetraForm(1, cx.form(1, vals), None, ())
    if not h.is_harmonic():
        raise ConsistencyError(f"placement {j} is not harmonic")
    ints = face_cycle_integrals(h)
    if ints[opposite_face(j)] < 0:
        h = TetraForm(1, h.form.scale(-1), None, ())
        ints = tuple(-v for v in ints)
    if sorted(ints) != [-1, -1, -1, 3] or ints[opposite_face(j)] != 3:
        raise ConsistencyError(f"placement {j} has face integrals {ints}")
    return h


def placements() -> list[TetraForm]:
    return [placement(j) for j in range(4)]


def level1_basis() -> list[TetraForm]:
    """A_1, A_2, A_3: Gram-Schmidt of the first three placements in the weighted product."""
    ps = placements()
    total = ps[0].form
    for p in ps[1:]:
        total = total + p.form
    if not total.is_zero():
        raise ConsistencyError("placement forms do not sum to zero")
    out: list[KForm] = []
    for p in ps[:3]:
        v = p.form
        for u in out:
            v = v - u.scale(inner(v, u) / inner(u, u))
        if v.is_zero():
            raise ConsistencyError("placement span has dimension < 3")
        out.append(v)
    return [TetraForm(1, f, i + 1, ()) for i, f in enumerate(out)]


# -- extension ---------------------------------------------------------------

MIDPOINTS = tuple((a, b) for a in range(4) for b in range(a + 1, 4))


def harmonic_map_extend(corner_values: Sequence[Fraction | int]) -> dict[tuple[int, int], Fraction]:
    """Values at the six edge midpoints by the 1/3-1/6 rule."""
    v = [Fraction(x) for x in corner_values]
    out = {}
    for a, b in MIDPOINTS:
        rest = [v[k] for k in range(4) if k not in (a, b)]
        out[(a, b)] = (v[a] + v[b]) / 3 + sum(rest) / 6
    return out


def _check_closed(p: Sequence[Fraction], c: int):
    for face in FACES:
        s = sum(directed(p, face[i], face[(i + 1) % 3]) for i in range(3))
        if s:
            raise ValueError(f"cell {c} has face sum {s}; extension needs d h = 0")


def extend_values(values: Sequence[Fraction], check: bool = True) -> list[Fraction]:
    """One refinement step of a closed 1-form on raw edge values.

    Corner edges: ``h[p_s, p_st] = h[s,t]/3 + (h[s,u] + h[s,v])/6``;
    midpoint edges: ``h[p_st, p_su] = h[t,u]/6``.
    """
    n_cells = len(values) // N_EDGES
    out = [Fraction(0)] * (len(values) * 4)
    for c in range(n_cells):
        p = values[c * N_EDGES:(c + 1) * N_EDGES]
        if check:
            _check_closed(p, c)
        for s in range(4):
            base = (c * 4 + s) * N_EDGES
            for e, (a, b) in enumerate(EDGES):
                if s in (a, b):
                    t = b if a == s else a
                    rest = [k for k in range(4) if k not in (s, t)]
                    val = directed(p, s, t) / 3 + sum(directed(p, s, k) for k in rest) / 6
                    out[base + e] = val if a == s else -val
                else:
                    out[base + e] = directed(p, a, b) / 6
    return out


def extend_form(h: TetraForm) -> TetraForm:
    finer = build_sg3(h.level + 1)
    return TetraForm(h.level + 1, finer.form(1, extend_values(h.values)), h.index, h.word)


def seated(j: int, word: Sequence[int], m: int, level1: Sequence[TetraForm] | None = None) -> TetraForm:
    """``A_j`` seated on ``F_word`` and extended to level ``m``."""
    word = tuple(word)
    if len(word) >= m:
        raise ValueError(f"word {word} needs level > {len(word)}")
    a = (level1 or level1_basis())[j - 1]
    level = len(word) + 1
    vals = [Fraction(0)] * (N_EDGES * 4**level)
    root = word_index(word, 4) * 4 * N_EDGES
    vals[root:root + len(a.values)] = a.values
    for _ in range(m - level):
        vals = extend_values(vals)
    return TetraForm(m, build_sg3(m).form(1, vals), j, word)


def basis(m: int) -> list[TetraForm]:
    """The ``4^m - 1`` seated forms, ordered by word (shortest first) then by ``j``."""
    if m < 1:
        raise ValueError("level must be >= 1")
    a = level1_basis()
    return [seated(j, w, m, a) for w in words_upto(m, 4) for j in (1, 2, 3)]


def face_boundary_integrals(h: TetraForm | KForm, word: Sequence[int] = ()) -> tuple[Fraction, ...]:
    """Integrals over the boundaries of the four faces of ``F_word``; they always sum to 0."""
    form = h.form if isinstance(h, TetraForm) else h
    cx = form.complex
    return tuple(integrate(form, face_boundary_chain(cx, word, f)) for f in range(len(FACES)))


def realize(face_data: Mapping[tuple[int, ...], Sequence[Fraction | int]], m: int,
            kind: str = "boundary") -> TetraForm:
    """Combination of ``basis(m)`` with prescribed integrals for every word of length ``< m``.

    ``kind="boundary"`` prescribes integrals over face boundaries; each
    4-vector must sum to zero and every such choice is realized.
    ``kind="cycle"`` prescribes the inner-triangle cycle integrals; those
    agree with the boundary ones only when no finer cycle carries a nonzero
    integral, so some data are not realizable and raise ``ValueError``.
    Words not mentioned get zeros.
    """
    if kind not in ("boundary", "cycle"):
        raise ValueError(kind)
    measure = face_boundary_integrals if kind == "boundary" else face_cycle_integrals
    keys = words_upto(m, 4)
    data = {w: (0, 0, 0, 0) for w in keys}
    for w, vec in face_data.items():
        w = tuple(w)
        if w not in data:
            raise ValueError(f"word {w} is not resolved at level {m}")
        if len(vec) != 4:
            raise ValueError(f"face data at {w} must have 4 entries")
        if kind == "boundary" and sum(Fraction(x) for x in vec) != 0:
            raise ValueError(f"face boundary data at {w} must sum to 0")
        data[w] = tuple(Fraction(x) for x in vec)
    forms = basis(m)
    table = [[measure(h, w) for w in keys] for h in forms]
    n = len(forms)
    # one face per word is dropped from the square system and checked afterwards
    a = [[table[ci][wi][f] for ci in range(n)] for wi in range(len(keys)) for f in range(3)]
    b = [Fraction(data[w][f]) for w in keys for f in range(3)]
    x = solve(a, b)
    for wi, w in enumerate(keys):
        got = sum((x[ci] * table[ci][wi][3] for ci in range(n)), Fraction(0))
        if got != data[w][3]:
            raise ValueError(f"face data at {w} is not realizable by harmonic forms")
    vals = [Fraction(0)] * len(forms[0].values)
    for coef, h in zip(x, forms):
        if coef:
            for i, v in enumerate(h.values):
                if v:
                    vals[i] += coef * v
    return TetraForm(m, build_sg3(m).form(1, vals))
