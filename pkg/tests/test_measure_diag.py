import math
from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st

from hodgefrac import complex_core as cc
from hodgefrac import fractal_builder as fb
from hodgefrac import measure_diag as md
from hodgefrac.sg_harmonic import basis, touching_cells

triples = st.tuples(*[st.fractions(-3, 3, max_denominator=5)] * 3)


def samples_from_complex(boundary, m, edge=0):
    """Bottom-edge values read off the harmonic function on the level-m complex."""
    cx = fb.build_sg(m)
    f = fb.harmonic_from_boundary(boundary, cx)
    path = fb.edge_descendants(fb.SG, edge, m)
    tail = [next(i for i, s in cx.faces[1][e] if s < 0) for e in path]
    head = next(i for i, s in cx.faces[1][path[-1]] if s > 0)
    return tuple(f.values[v] for v in tail + [head])


def test_restriction_example():
    r = md.restrict_harmonic((0, 1, 0), 0, 1)
    assert r.samples == (0, Fraction(2, 5), 1)


@settings(max_examples=25, deadline=None)
@given(triples, st.integers(0, 2))
def test_recursion_matches_harmonic_extension(b, edge):
    for m in (2, 4):
        assert md.restrict_harmonic(b, edge, m).samples == samples_from_complex(b, m, edge)


def test_localized_restriction():
    r = md.restrict_harmonic((0, 1, 0), 1, 3, word=(2, 0))
    v = md.cell_values((0, 1, 0), (2, 0))
    assert r.samples[0] == v[1] and r.samples[-1] == v[2]
    full = samples_from_complex(v, 3, 1)
    assert r.samples == full


def test_refinement_consistency_and_constants():
    fine = md.restrict_harmonic((1, 4, -2), 0, 12)
    coarse = md.restrict_harmonic((1, 4, -2), 0, 11)
    assert fine.samples[::2] == coarse.samples
    assert set(md.restrict_harmonic((3, 3, 3), 0, 6).samples) == {3}


def test_sample_cap():
    with pytest.raises(fb.ResourceCapError):
        md.restrict_harmonic((0, 1, 0), 0, 25)


def test_dyadic_approximants():
    r = md.restrict_harmonic((0, 1, 0), 0, 6)
    assert md.dyadic_approximant(r, 0).values == (1,)
    assert md.dyadic_approximant(r, 1).values == (Fraction(4, 5), Fraction(6, 5))
    for m in range(7):
        assert md.dyadic_approximant(r, m).mass() == 1
    with pytest.raises(ValueError):
        md.dyadic_approximant(r, 7)


@settings(max_examples=25, deadline=None)
@given(triples)
def test_l1_difference_two_ways_and_bound(b):
    r = md.restrict_harmonic(b, 0, 9)
    bound = Fraction(3, 25) * abs(b[1] - b[0])
    for m in range(9):
        x = md.l1_difference(r, m)
        assert x == md.l1_difference_direct(r, m)
        # the first difference vanishes when the midpoint happens to be linear
        assert m == 0 or x >= bound


def test_singularity_report():
    rep = md.singularity_report((0, 1, 0), 0, 10)
    assert rep.passed and rep.bound == Fraction(3, 25)
    assert rep.differences[0] == Fraction(1, 5)
    assert md.singularity_report((0, 1, 1)).passed
    with pytest.raises(ValueError):
        md.singularity_report((2, 2, 2))


def test_energy_measure_mass_and_additivity():
    b = (0, 1, 3)
    prev = md.energy_measure(b, 0)
    assert prev.total() == md.energy0(b) == 14
    for n in range(1, 7):
        cur = md.energy_measure(b, n)
        assert cur.coarsen().values == prev.values
        prev = cur
    assert set(md.energy_measure((2, 2, 2), 3).values) == {0}


def test_energy_measure_matches_graph_energy_of_extension():
    b = (1, -1, 2)
    cx = fb.build_sg(3)
    assert md.energy_measure(b, 3).total() == fb.graph_energy(fb.harmonic_from_boundary(b, cx))


@pytest.mark.parametrize("seed", [(1, 0, 0), (0, 1, 0), (0, 0, 1)])
def test_growth_transfer_matches_direct_summation(seed):
    exact = md.kusuoka_growth(seed, 16)
    direct = md.kusuoka_growth(seed, 16, "direct")
    for a, b in zip(exact.masses, direct.masses):
        assert float(a) == pytest.approx(b, rel=1e-11)
    assert all(b <= a for a, b in zip(exact.masses[1:], exact.masses[2:]))


def test_growth_matches_energy_measure_cells():
    seed = (1, 0, 0)
    g = md.kusuoka_growth(seed, 4)
    mu = md.energy_measure(seed, 4)
    assert g.masses[4] == sum(mu.values[i] for i in touching_cells((), 0, 4))


def test_growth_of_constant_is_zero_and_cap():
    assert set(md.kusuoka_growth((1, 1, 1), 5).masses) == {0}
    with pytest.raises(fb.ResourceCapError):
        md.kusuoka_growth((1, 0, 0), 41)


def test_kusuoka_measure_is_pair_independent():
    k = md.KusuokaMeasure()
    e, nu = md.energy0, md.energy_measure
    a, b = (0, 1, 0), (2, 1, 0)
    ea, eb = e(a), e(b)
    assert e(tuple(x + y for x, y in zip(a, b))) == ea + eb  # energy-orthogonal pair
    for n in (1, 2, 3):
        mixed = tuple(x / ea + y / eb for x, y in zip(nu(a, n).values, nu(b, n).values))
        assert mixed == k.values(n).values
    assert k.values(0).total() == 2


def test_kusuoka_edge_mass_matches_cell_sum():
    k = md.KusuokaMeasure(density=[1, 2, 3], density_level=1)
    for word, e, n in (((), 0, 4), ((2,), 1, 4), ((0, 1), 2, 5)):
        want = sum(k.cell(fb.index_word(i, n, 3)) for i in touching_cells(word, e, n))
        assert k.along_edge(word, e, n) == want


def test_delta2_prime_approximants():
    k = md.KusuokaMeasure()
    edge = fb.CellAddress((), cc.Cell(1, 0))
    a19, a20 = (md.delta2_prime_approx(k, edge, n) for n in (19, 20))
    assert a20 / a19 == pytest.approx(1, abs=1e-3)
    zero = fb.CellMeasure("sg", 3, (Fraction(0),) * 27)
    assert md.delta2_prime_approx(zero, edge, 3) == 0
    # linearity in the density
    k2 = md.KusuokaMeasure(density=[2, 2, 2], density_level=1)
    assert md.delta2_prime_approx(k2, edge, 6) == pytest.approx(2 * md.delta2_prime_approx(k, edge, 6))
    # cell-measure input agrees with the transfer evaluation
    assert md.delta2_prime_approx(k.values(4), edge, 4) == pytest.approx(md.delta2_prime_approx(k, edge, 4))
    assert md.GROWTH_BASE == pytest.approx((17 + math.sqrt(73)) / 30)


def test_spline_weights_for_standard_measure():
    w = md.self_similar_spline_weights()
    assert w == (Fraction(1, 3),) * 3
    for m in (1, 2):
        cx = fb.build_sg(m)
        approx = md.nu_vertex_weights(fb.standard_measure("sg", m + 6), m)
        oracle = md.exact_spline_integrals(m)
        assert sum(approx) == 1
        assert max(abs(float(a - b)) for a, b in zip(approx, oracle)) < 1e-6
        assert tuple(oracle) == cx.weights[0]


def test_spline_weights_partition_any_measure():
    k = md.KusuokaMeasure()
    w = md.nu_vertex_weights(k.values(6), 1)
    assert sum(w) == 2 and all(x > 0 for x in w)


def test_delta1_prime():
    m = 2
    h = basis(m)[2]
    w_std = md.nu_vertex_weights(fb.standard_measure("sg", m + 5), m)
    assert md.delta1_prime(h.form, w_std) == cc.delta(h.form)
    w_k = md.nu_vertex_weights(md.KusuokaMeasure().values(m + 4), m)
    assert md.delta1_prime(h.form, w_k).is_zero()
    cx = h.form.complex
    f = cc.d(cx.form(0, range(cx.count(0))))
    assert md.delta1_prime(f, w_std) == cc.delta(f)
