from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st

from hodgefrac import complex_core as cc
from hodgefrac import fractal_builder as fb
from hodgefrac import sg3_harmonic as s3
from hodgefrac.exact import rank


def test_base_form_constraints():
    f = s3.base_form()
    assert cc.divergence(f).values == (0, 0, 2, -2)
    assert cc.d(f).is_zero()


def test_rotations_place_divergence_anywhere():
    for zeros in ((0, 1), (0, 2), (1, 3), (2, 3)):
        plus, minus = [q for q in range(4) if q not in zeros]
        vals = s3.rotated_base(zeros, plus, minus)
        f = fb.build_sg3(0).form(1, vals)
        div = cc.divergence(f).values
        assert div[zeros[0]] == div[zeros[1]] == 0
        assert div[plus] == 2 and div[minus] == -2
        assert cc.d(f).is_zero()
    assert len(s3.EVEN_PERMUTATIONS) == 12


def test_placements_are_harmonic_and_sum_to_zero():
    ps = s3.placements()
    cx = fb.build_sg3(1)
    total = cx.zero_form(1)
    for j, p in enumerate(ps):
        assert p.is_harmonic()
        assert all(v == 0 for v in p.values[j * 6:(j + 1) * 6])
        ints = s3.face_cycle_integrals(p)
        assert sorted(ints) == [-1, -1, -1, 3] and sum(ints) == 0
        total = total + p.form
    assert total.is_zero()


def test_level1_basis_orthogonal():
    a = s3.level1_basis()
    assert len(a) == 3
    for i in range(3):
        for j in range(i + 1, 3):
            assert cc.inner(a[i].form, a[j].form) == 0
    assert rank([dict(enumerate(x.values)) for x in a], 24) == 3


def test_harmonic_map_examples():
    out = s3.harmonic_map_extend((1, 0, 0, 0))
    assert out[(0, 1)] == Fraction(1, 3) and out[(2, 3)] == Fraction(1, 6)
    assert set(s3.harmonic_map_extend((7, 7, 7, 7)).values()) == {7}


@settings(max_examples=50, deadline=None)
@given(st.tuples(*[st.fractions(-5, 5, max_denominator=9)] * 4))
def test_vertex_defect_scales_by_two_thirds(v):
    mids = s3.harmonic_map_extend(v)
    for q in range(4):
        near = sum(mids[tuple(sorted((q, j)))] for j in range(4) if j != q)
        far = sum(v[j] for j in range(4) if j != q)
        assert 3 * v[q] - near == Fraction(2, 3) * (3 * v[q] - far)


def test_harmonic_map_agrees_with_builder():
    c = fb.build_sg3(0)
    f = c.form(0, [1, 2, 3, 5])
    ext = fb.harmonic_extend0(f)
    fine = ext.complex
    mids = s3.harmonic_map_extend(f.values)
    for (a, b), val in mids.items():
        assert ext.values[fine.vertex((a,), b)] == val


closed = st.tuples(*[st.fractions(-4, 4, max_denominator=6)] * 3).map(
    lambda p: [p[0], p[1], p[2], p[1] - p[0], p[2] - p[0], p[2] - p[1]]
)


@settings(max_examples=50, deadline=None)
@given(closed)
def test_extension_matches_derivative_of_extended_potential(vals):
    c0 = fb.build_sg3(0)
    pot = c0.form(0, [0, vals[0], vals[1], vals[2]])
    assert cc.d(pot).values == tuple(vals)
    assert tuple(s3.extend_values(vals)) == cc.d(fb.harmonic_extend0(pot)).values


def test_extension_rejects_non_closed():
    with pytest.raises(ValueError):
        s3.extend_values([Fraction(1)] + [Fraction(0)] * 5)


def test_edge_split_and_vertex_sum_through_level3():
    h = s3.level1_basis()[1]
    for _ in range(2):
        finer = s3.extend_form(h)
        assert finer.is_harmonic()
        for e, v in enumerate(h.values):
            a, b = fb.edge_children(fb.SG3, e)
            assert finer.values[a] + finer.values[b] == v
        # outgoing sums at original vertices, cell by cell
        for c in range(len(h.values) // 6):
            p = h.values[6 * c:6 * c + 6]
            for q in range(4):
                base = (c * 4 + q) * 6
                child = finer.values[base:base + 6]
                coarse_sum = sum(s3.directed(p, q, j) for j in range(4) if j != q)
                fine_sum = sum(s3.directed(child, q, j) for j in range(4) if j != q)
                assert fine_sum == Fraction(2, 3) * coarse_sum
        h = finer
    assert h.level == 3


@pytest.mark.parametrize("m", [1, 2, 3])
def test_basis_dimension_and_rank(m):
    forms = s3.basis(m)
    assert len(forms) == 4**m - 1
    cx = fb.build_sg3(m)
    assert len(cc.harmonic_basis(cx, 1)) == 4**m - 1
    assert rank([dict(enumerate(h.values)) for h in forms], cx.count(1)) == 4**m - 1
    assert all(h.is_harmonic() for h in forms)


def test_basis_orthogonal_at_level2():
    forms = s3.basis(2)
    for i, a in enumerate(forms):
        for b in forms[i + 1:]:
            assert cc.inner(a.form, b.form) == 0


def test_face_cycles_on_the_seat_word():
    forms = s3.basis(3)
    cx = fb.build_sg3(3)
    for h in forms:
        ints = s3.face_cycle_integrals(h, h.word)
        assert sum(ints) == 0
        assert ints == s3.face_boundary_integrals(h, h.word)
        for w in fb.words_upto(3, 4):
            if len(w) > len(h.word):
                assert s3.face_cycle_integrals(h, w) == (0, 0, 0, 0)


def test_face_boundary_integrals_always_sum_to_zero():
    for h in s3.basis(2):
        for w in fb.words_upto(2, 4):
            assert sum(s3.face_boundary_integrals(h, w)) == 0


def test_coarser_cycles_see_finer_holes():
    # a form seated on F_0 leaves the inner triangles of the root faces unbalanced:
    # their sum is minus the child-0 face-boundary integrals on the root faces
    h = s3.seated(1, (0,), 2)
    root = s3.face_cycle_integrals(h, ())
    child = s3.face_boundary_integrals(h, (0,))
    assert sum(root) == -sum(child[f] for f in range(4) if 0 in s3.FACES[f]) == 3
    for f in range(4):
        assert s3.face_boundary_integrals(h, ())[f] == 0


def test_face_cycles_are_cycles():
    cx = fb.build_sg3(2)
    for f in range(4):
        assert cc.boundary(s3.face_cycle_chain(cx, (3,), f)).is_zero()


def test_realize_face_boundary_data():
    data = {(): (3, -1, -1, -1), (2,): (1, 1, -1, -1), (1, 3): (0, 2, -2, 0)}
    h = s3.realize(data, 3)
    assert h.is_harmonic()
    for w in fb.words_upto(3, 4):
        assert s3.face_boundary_integrals(h, w) == tuple(data.get(w, (0, 0, 0, 0)))
    with pytest.raises(ValueError):
        s3.realize({(): (1, 0, 0, 0)}, 2)


def test_realize_cycle_data():
    data = {(): (-1, -1, -1, 3), (2,): (1, 1, -1, -1)}
    with pytest.raises(ValueError):
        s3.realize(data, 2, kind="cycle")
    h = s3.seated(2, (1,), 2).form + s3.seated(1, (), 2).form
    want = {w: s3.face_cycle_integrals(h, w) for w in fb.words_upto(2, 4)}
    g = s3.realize(want, 2, kind="cycle")
    assert g.form == h


def test_energy_factor_is_configurable():
    c = fb.build_sg3(2, energy_factor=Fraction(2))
    assert set(c.weights[1]) == {Fraction(4)}
