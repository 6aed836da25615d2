from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from hodgefrac import complex_core as cc
from hodgefrac.fractal_builder import build_sg, build_sg3

rationals = st.fractions(min_value=-5, max_value=5, max_denominator=7)


def hollow_triangle():
    # three vertices, three edges, no face: one independent cycle
    inc = {0: [(0, 0, -1), (1, 0, 1), (1, 1, -1), (2, 1, 1), (2, 2, -1), (0, 2, 1)]}
    return cc.Complex([3, 3], inc, [[1, 2, 3], [1, 1, 2]])


def filled_square():
    # vertices 0..3, edges 01 12 23 30 02, faces (0,1,2) and (0,2,3)
    edges = [(0, 1), (1, 2), (2, 3), (3, 0), (0, 2)]
    inc0 = [t for j, (a, b) in enumerate(edges) for t in ((a, j, -1), (b, j, 1))]
    inc1 = [(0, 0, 1), (1, 0, 1), (4, 0, -1), (4, 1, 1), (2, 1, 1), (3, 1, 1)]
    w = [[1, 2, 1, 2], [3, 1, 2, 1, Fraction(1, 2)], [1, 5]]
    return cc.Complex([4, 5, 2], {0: inc0, 1: inc1}, w)


def forms(c, k):
    return st.lists(rationals, min_size=c.count(k), max_size=c.count(k)).map(lambda v: c.form(k, v))


SQUARE = filled_square()
SG2 = build_sg(2)
SG3_1 = build_sg3(1)


def test_handmade_complexes_validate():
    assert cc.validate_complex(hollow_triangle()) == []
    assert cc.validate_complex(SQUARE) == []


def test_validation_reports_parity_and_weight_problems():
    edges = [(0, 1), (1, 2), (2, 0)]
    inc0 = [t for j, (a, b) in enumerate(edges) for t in ((a, j, -1), (b, j, 1))]
    bad = cc.Complex([3, 3, 1], {0: inc0, 1: [(0, 0, 1), (1, 0, 1), (2, 0, -1)]}, [[1, 1, 0], [1, 1, 1], [1]])
    kinds = {v.kind for v in cc.validate_complex(bad)}
    assert kinds == {"parity", "weight"}
    parity = [v for v in cc.validate_complex(bad) if v.kind == "parity"]
    assert all(v.degree == 0 for v in parity)


def test_shape_errors():
    with pytest.raises(cc.ShapeError):
        SQUARE.form(1, [1, 2])
    with pytest.raises(cc.ShapeError):
        cc.inner(SQUARE.zero_form(0), SG2.zero_form(0))


def test_extreme_degrees_map_to_empty_class():
    top = SQUARE.zero_form(2)
    assert cc.d(top).values == () and cc.d(top).degree == 3
    assert cc.delta(SQUARE.zero_form(0)).degree == -1


@settings(max_examples=40, deadline=None)
@given(forms(SG2, 0))
def test_d_squared_vanishes(f):
    assert cc.d(cc.d(f)).is_zero()


@settings(max_examples=40, deadline=None)
@given(forms(SQUARE, 2))
def test_delta_squared_vanishes(f):
    assert cc.delta(cc.delta(f)).is_zero()


@settings(max_examples=30, deadline=None)
@given(st.data())
def test_delta_is_weighted_adjoint_of_d(data):
    for c in (SQUARE, SG2, SG3_1):
        for k in range(c.max_degree):
            f = data.draw(forms(c, k))
            g = data.draw(forms(c, k + 1))
            assert cc.inner(cc.d(f), g) == cc.inner(f, cc.delta(g))


@settings(max_examples=30, deadline=None)
@given(forms(SQUARE, 1), st.dictionaries(st.integers(0, 1), rationals))
def test_stokes(f, coeffs):
    ch = SQUARE.chain(2, coeffs)
    assert cc.integrate(cc.d(f), ch) == cc.integrate(f, cc.boundary(ch))


def test_boundary_of_boundary_is_zero():
    ch = SQUARE.chain(2, {0: 1, 1: 1})
    assert cc.boundary(cc.boundary(ch)).is_zero()
    assert cc.boundary(ch).coefficients == {0: 1, 1: 1, 2: 1, 3: 1}


@settings(max_examples=30, deadline=None)
@given(forms(SQUARE, 1))
def test_energy_is_laplacian_quadratic_form(f):
    assert cc.energy(f) == cc.inner(cc.laplacian_apply(f), f)
    assert cc.energy(f) >= 0


def test_laplacian_matrix_matches_apply():
    mat = cc.laplacian_matrix(SQUARE, 1)
    f = SQUARE.form(1, [1, -2, 3, Fraction(1, 2), 5])
    assert tuple(sum(a * b for a, b in zip(row, f.values)) for row in mat) == cc.laplacian_apply(f).values


def test_harmonic_space_of_hollow_triangle():
    c = hollow_triangle()
    (h,) = cc.harmonic_basis(c, 1)
    assert cc.d(h).is_zero() and cc.delta(h).is_zero()
    assert cc.harmonic_basis(c, 0)[0].values[0] != 0  # constants
    assert cc.harmonic_basis(SQUARE, 1) == []


@settings(max_examples=25, deadline=None)
@given(forms(SQUARE, 1))
def test_hodge_parts_are_orthogonal_and_reconstruct(f):
    p = cc.hodge_decompose(f)
    assert p.exact + p.coexact + p.harmonic == f
    assert cc.inner(p.exact, p.coexact) == 0
    assert cc.inner(p.exact, p.harmonic) == 0
    assert cc.inner(p.coexact, p.harmonic) == 0
    assert cc.d(p.harmonic).is_zero() and cc.delta(p.harmonic).is_zero()
    assert cc.d(p.exact).is_zero() and cc.delta(p.coexact).is_zero()


def test_float_mode_agrees_with_exact():
    c = build_sg(2)
    f = c.form(1, [Fraction((7 * i) % 11 - 5, 1 + i % 3) for i in range(c.count(1))])
    ex = cc.hodge_decompose(f)
    fl = cc.hodge_decompose(f, "float")
    for name in ("exact", "coexact", "harmonic"):
        assert np.allclose(getattr(ex, name).to_numpy(), getattr(fl, name).to_numpy(), atol=1e-10)


def test_hodge_dimensions_add_up():
    dims = cc.hodge_dimensions(SG2, 1)
    assert dims == {"total": 27, "exact": 14, "coexact": 9, "harmonic": 4}


def test_spectrum_of_level0_gasket():
    rep = cc.spectrum(build_sg(0), 0)
    assert np.allclose(rep.values(), [0, 9, 9])
    assert [p.label for p in rep.eigenpairs] == [cc.HARMONIC, cc.DELTA_SPECTRUM, cc.DELTA_SPECTRUM]


def test_spectrum_labels_cover_dimension():
    rep = cc.spectrum(SQUARE, 1)
    assert len(rep.eigenpairs) == SQUARE.count(1)
    assert len(rep.values(cc.D_SPECTRUM)) == 3  # rank of d_0
    assert len(rep.values(cc.DELTA_SPECTRUM)) == 2  # rank of delta_2


def test_replication_on_handmade_complex():
    for k in (1, 2):
        r = cc.spectral_replication(SQUARE, k)
        assert r.max_eigenvalue_gap < 1e-9
        assert r.max_transfer_residual < 1e-9


def test_spectrum_rejects_bad_tolerance():
    with pytest.raises(ValueError):
        cc.spectrum(SQUARE, 0, tol=0)
