from fractions import Fraction
from itertools import combinations

import pytest
from hypothesis import given, settings, strategies as st

from hodgefrac import complex_core as cc
from hodgefrac import fractal_builder as fb
from hodgefrac import sg_harmonic as sh

from oracles import expected_pairing


def test_generator_pattern_and_boundary_integral():
    g = sh.base_generator()
    cx = g.form.complex
    inner = {cx.edge_index((s,), sh.inner_edge(s)) for s in range(3)}
    assert all(v == (2 if i in inner else -1) for i, v in enumerate(g.values))
    assert abs(cc.integrate(g.form, sh.boundary_chain(cx))) == 6
    assert sh.cycle_integral(g, ()) == 6


def test_cycle_and_boundary_chains_are_cycles():
    cx = fb.build_sg(3)
    for w in ((), (1,), (2, 0)):
        assert cc.boundary(sh.cycle_chain(cx, w)).is_zero()
        assert cc.boundary(sh.boundary_chain(cx, w)).is_zero()
    with pytest.raises(ValueError):
        sh.cycle_chain(cx, (0, 0, 0))


def test_extension_example_cell():
    out = sh.extend_values([Fraction(-1), Fraction(-1), Fraction(2)])
    # bottom edge splits into child 0 and child 1 copies of edge 0
    assert out[0] == Fraction(-4, 5) and out[3] == Fraction(-1, 5)
    assert out[0] + out[3] == -1


def test_extension_rejects_non_closed():
    with pytest.raises(ValueError):
        sh.extend_values([Fraction(1), Fraction(0), Fraction(0)])


closed_cells = st.tuples(st.fractions(-4, 4, max_denominator=6), st.fractions(-4, 4, max_denominator=6)).map(
    lambda xy: [xy[0], xy[1], -xy[0] - xy[1]]
)


@settings(max_examples=50, deadline=None)
@given(closed_cells)
def test_extension_matches_derivative_of_extended_potential(p):
    # oracle: integrate the cell form to a potential, extend it harmonically, differentiate
    c1 = fb.build_sg(0)
    pot = c1.form(0, [0, p[0], p[0] + p[1]])
    ext = fb.harmonic_extend0(pot)
    assert tuple(sh.extend_values(p)) == cc.d(ext).values


def test_extension_to_level_8_keeps_harmonicity_and_edge_sums():
    h = sh.base_generator()
    for _ in range(7):
        finer = sh.extend(h)
        assert finer.is_harmonic()
        for e, v in enumerate(h.values):
            a, b = fb.edge_children(fb.SG, e)
            assert finer.values[a] + finer.values[b] == v
        sq, sq_f = sum(v * v for v in h.values), sum(v * v for v in finer.values)
        assert sq_f == Fraction(3, 5) * sq
        assert cc.inner(finer.form, finer.form) == cc.inner(h.form, h.form)
        h = finer
    assert h.level == 8


@pytest.mark.parametrize("m", range(1, 5))
def test_basis_size_harmonic_and_orthogonal(m):
    forms = sh.basis(m)
    assert len(forms) == (3**m - 1) // 2
    assert all(h.is_harmonic() for h in forms)
    for a, b in combinations(forms, 2):
        assert cc.inner(a.form, b.form) == 0


def test_basis_rank_equals_constraint_nullity():
    from hodgefrac.exact import rank

    for m in range(1, 5):
        cx = fb.build_sg(m)
        forms = sh.basis(m)
        assert rank([dict(enumerate(h.values)) for h in forms], cx.count(1)) == len(cc.harmonic_basis(cx, 1))


def test_pairing_table_matches_intersection_rule():
    m = 4
    keys = [w for w in fb.words_upto(m, 3) if len(w) <= 3]
    table = sh.pairing_table(sh.basis(m), fb.words_upto(m, 3), m)
    for w in keys:
        for wp in keys:
            assert table[(w, wp)] == expected_pairing(w, wp), (w, wp)
    assert max(table.nonzero_per_row().values()) <= 4


def test_dual_basis_m1_is_scaled_generator():
    (dual,), table = sh.dual_basis(1)
    assert dual.values == tuple(v / 6 for v in sh.base_generator().values)
    assert table[((), ())] == 6


@pytest.mark.parametrize("m", [2, 3])
def test_dual_basis_pairs_to_identity(m):
    duals, _ = sh.dual_basis(m)
    keys = fb.words_upto(m, 3)
    for d, w in zip(duals, keys):
        assert d.is_harmonic()
        assert d.provenance == "dual(" + ("".join(map(str, w)) or "-") + ")"
        assert [sh.cycle_integral(d, wp) for wp in keys] == [int(w == wp) for wp in keys]


def test_realize_prescribed_cycle_data():
    data = {(): 1, (1,): Fraction(-2, 3), (2, 2): 5}
    h = sh.realize(data, 3)
    assert h.is_harmonic()
    for w in fb.words_upto(3, 3):
        assert sh.cycle_integral(h, w) == data.get(w, 0)
    with pytest.raises(ValueError):
        sh.realize({(0, 0, 0): 1}, 3)


def test_oscillation_witness_reports_exact_quantities():
    for m in (2, 4, 6):
        w = sh.oscillation_counterexample(m)
        assert w.amplitude ** 2 == Fraction(1, 2**m)
        assert w.edge_term == 4
        assert w.raw_energy == 6
        assert w.energy == 6 * Fraction(5, 3) ** m
        assert w.variation == 2 * 2 ** (m // 2)


def test_oscillation_energy_matches_full_complex():
    for m in (2, 4):
        f = sh.oscillation_form(m)
        assert fb.graph_energy(f) == sh.oscillation_counterexample(m).energy


def test_oscillation_float_and_odd_modes():
    w = sh.oscillation_counterexample(3, "float")
    assert w.variation == pytest.approx(2 * 2**1.5)
    assert sh.oscillation_counterexample(3).amplitude == Fraction(1, 4)


def test_divergence_witness():
    for m in (2, 4, 6):
        w = sh.divergent_series_witness(m)
        assert w.norm_proxy == 1
        assert w.edge_value == -2 * Fraction(6, 5) ** (m // 2)
    assert sh.divergent_series_witness(2).edge_value == Fraction(-12, 5)
    assert sh.divergent_series_witness(3, "float").edge_value == pytest.approx(-2 * 1.2**1.5)
    with pytest.raises(ValueError):
        sh.divergent_series_witness(3)


def test_divergence_witness_form_is_harmonic_and_matches_edge_integral():
    m = 4
    w = sh.divergent_series_witness(m, keep_form=True)
    cx = fb.build_sg(m + 1)
    form = cx.form(1, w.form_values)
    assert cc.d(form).is_zero() and cc.delta(form).is_zero()
    assert cc.integrate(form, sh.edge_chain(cx, (), 0)) == w.edge_value


def test_trace_of_constant_density():
    for m in range(3):
        edge = fb.CellAddress((1,) * m, cc.Cell(1, 1))
        for n in range(m + 1, m + 6):
            mu = fb.standard_measure("sg", n)
            assert sh.delta2_trace(mu, edge, n) == Fraction(1, 2**m)
    zero = fb.CellMeasure("sg", 3, (Fraction(0),) * 27)
    assert sh.delta2_trace(zero, fb.CellAddress((), cc.Cell(1, 0)), 3) == 0


def test_trace_stabilizes_for_cellwise_density():
    edge = fb.CellAddress((0, 2), cc.Cell(1, 2))
    fmu = fb.density_measure([2, 5, 7], 1, 8)
    vals = {sh.delta2_trace(fmu, edge, n) for n in range(3, 9)}
    assert vals == {Fraction(2, 4)}


def test_d1_approx_vanishes_on_exact_and_harmonic_forms():
    n = 3
    cx = fb.build_sg(n)
    f0 = cx.form(0, [Fraction(i % 5 - 2, 1 + i % 3) for i in range(cx.count(0))])
    df = cc.d(f0).values
    h = sh.seated((1,), n).values
    for word in ((), (2,), (0, 1)):
        cell = fb.CellAddress(word, cc.Cell(2, 0))
        assert sh.d1_approx(df, cell, n) == 0
        assert sh.d1_approx(h, cell, n) == 0


def test_trace_then_derivative_triples_cell_mass():
    mu_fine = fb.standard_measure("sg", 6)
    for m in (0, 1, 2):
        for n in range(m + 1, 6):
            f1 = sh.trace_form(mu_fine, n, n + 1)
            for word in list(fb.words(m, 3))[:3]:
                cell = fb.CellAddress(word, cc.Cell(2, 0))
                assert sh.d1_approx(f1, cell, n) == 3 * Fraction(1, 3**m)
