"""Invariant suite run by ``hodgefrac verify``."""
from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

from . import complex_core as cc
from . import fractal_builder as fb


@dataclass(frozen=True)
class Check:
    name: str
    ok: bool
    detail: str = ""


def _d_squared_zero(c: cc.Complex) -> bool:
    for k in range(c.max_degree - 1):
        prod = cc._sparse_product(cc.d_rows(c, k + 1), cc.d_rows(c, k))
        if any(v for row in prod for v in row.values()):
            return False
    return True


def _top_laplacian_is_scalar(c: cc.Complex) -> tuple[bool, str]:
    n = c.max_degree
    ratio = c.weights[n][0] / c.weights[n - 1][0]
    want = len(c.faces[n][0]) * ratio  # 3 for triangles, 4 for tetrahedra
    rows = cc.laplacian_rows(c, n)
    for j, row in enumerate(rows):
        if {i: v for i, v in row.items() if v} != {j: want}:
            return False, f"row {j} differs from {want} * identity"
    return True, f"-Delta_{n} = {want} * identity"


def _expected_harmonic(family: str, m: int) -> int:
    return (3**m - 1) // 2 if family == "sg" else 4**m - 1


def run_suite(family: str, m: int, tol: float = 1e-9) -> list[Check]:
    spec = fb.family_spec(family)
    c = fb.build_level(spec, m)
    checks: list[Check] = []

    def add(name: str, fn: Callable[[], tuple[bool, str] | bool]):
        try:
            r = fn()
        except Exception as exc:  # a crashing check is a failed check
            checks.append(Check(name, False, f"{type(exc).__name__}: {exc}"))
            return
        ok, detail = r if isinstance(r, tuple) else (r, "")
        checks.append(Check(name, bool(ok), detail))

    add("counts", lambda: (tuple(c.counts) == fb.expected_counts(spec.family, m), str(c.counts)))
    add("structure", lambda: (not (v := cc.validate_complex(c)), f"{len(v)} violations"))
    add("d∘d = 0", lambda: _d_squared_zero(c))
    add("weight recursion", lambda: fb.weight_recursion_holds(c))
    add("measure mass 1", lambda: (sum(c.weights[0]) == 1, str(sum(c.weights[0]))))
    if m >= 1:
        add("top Laplacian scalar", lambda: _top_laplacian_is_scalar(c))
    small = (spec.family == "sg" and m <= 5) or (spec.family == "sg3" and m <= 3)
    if small:
        want = _expected_harmonic(spec.family, m)
        add("harmonic dimension", lambda: (len(cc.harmonic_basis(c, 1)) == want, f"expected {want}"))
    if spec.family == "sg" and 1 <= m <= 4:
        add("harmonic basis", lambda: _sg_basis_checks(m))
    if spec.family == "sg3" and 1 <= m <= 2:
        add("harmonic basis", lambda: _sg3_basis_checks(m))
    if m <= 3:
        add("spectral replication", lambda: _replication(c, tol))
    return checks


def _sg_basis_checks(m: int) -> tuple[bool, str]:
    from . import sg_harmonic as sh

    forms = sh.basis(m)
    if len(forms) != _expected_harmonic("sg", m):
        return False, f"{len(forms)} forms"
    if not all(h.is_harmonic() for h in forms):
        return False, "non-harmonic basis element"
    for i, h in enumerate(forms):
        for g in forms[i + 1:]:
            if cc.inner(h.form, g.form):
                return False, "basis not orthogonal"
    duals, _ = sh.dual_basis(m)
    keys = fb.words_upto(m, 3)
    for i, h in enumerate(duals):
        for j, w in enumerate(keys):
            if sh.cycle_integral(h, w) != (i == j):
                return False, f"dual pairing wrong at {keys[i]}, {w}"
    return True, f"{len(forms)} forms, orthogonal, dual pairing exact"


def _sg3_basis_checks(m: int) -> tuple[bool, str]:
    from . import sg3_harmonic as s3

    forms = s3.basis(m)
    if len(forms) != _expected_harmonic("sg3", m):
        return False, f"{len(forms)} forms"
    if not all(h.is_harmonic() for h in forms):
        return False, "non-harmonic basis element"
    for h in forms:
        if sum(s3.face_cycle_integrals(h, h.word)) != 0:
            return False, "face integrals do not sum to 0"
    return True, f"{len(forms)} forms"


def _replication(c: cc.Complex, tol: float) -> tuple[bool, str]:
    worst = 0.0
    for k in range(1, c.max_degree + 1):
        r = cc.spectral_replication(c, k, tol)
        scale = max(1.0, float(max(r.upper, default=1.0)))
        worst = max(worst, r.max_eigenvalue_gap / scale, r.max_transfer_residual / scale)
    return worst <= tol * 10, f"max relative gap {worst:.2e}"


def failures(checks: list[Check]) -> list[Check]:
    return [c for c in checks if not c.ok]


__all__ = ["Check", "run_suite", "failures"]
