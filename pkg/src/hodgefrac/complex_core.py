"""Forms, derivatives and Laplacians on finite graph complexes.

A :class:`Complex` is a leveled family of cells ``E_0, ..., E_n`` with signed
incidences between adjacent degrees and positive rational weights on every
cell.  All of the calculus here is exact (``fractions.Fraction``); only the
spectral routines drop to double precision.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Mapping, Sequence

import numpy as np

from . import exact

Incidence = tuple[tuple[int, int], ...]

_ids = itertools.count()


class ShapeError(ValueError):
    """Forms or chains combined across mismatched degrees or complexes."""


@dataclass(frozen=True)
class Cell:
    degree: int
    index: int
    label: str | None = None


@dataclass(frozen=True)
class Violation:
    """One failed identity found by :func:`validate_complex`."""

    kind: str  # "sign", "parity", "chain", "weight"
    degree: int
    cells: tuple[int, ...]
    detail: str


class Complex:
    """Immutable graph complex.

    ``incidence[k]`` lists triplets ``(i, j, sign)`` with ``i`` a k-cell and
    ``j`` a (k+1)-cell, for ``k = 0 .. max_degree - 1``.
    """

    def __init__(
        self,
        counts: Sequence[int],
        incidence: Mapping[int, Iterable[tuple[int, int, int]]],
        weights: Sequence[Sequence[Fraction | int]],
        labels: Sequence[Sequence[str]] | None = None,
        name: str | None = None,
    ):
        self.counts = tuple(int(c) for c in counts)
        self.max_degree = len(self.counts) - 1
        self.id = name or f"complex-{next(_ids)}"
        if len(weights) != len(self.counts):
            raise ShapeError("need one weight vector per degree")
        self.weights = tuple(tuple(Fraction(w) for w in ws) for ws in weights)
        for k, ws in enumerate(self.weights):
            if len(ws) != self.counts[k]:
                raise ShapeError(f"degree {k}: {len(ws)} weights for {self.counts[k]} cells")
        self.labels = tuple(tuple(ls) for ls in labels) if labels is not None else None
        # faces[k][j]: ((i, sign), ...) for the (k-1)-cells of k-cell j
        faces: list[list[list[tuple[int, int]]]] = [[[] for _ in range(n)] for n in self.counts]
        cofaces: list[list[list[tuple[int, int]]]] = [[[] for _ in range(n)] for n in self.counts]
        for k in range(self.max_degree):
            for i, j, s in incidence.get(k, ()):
                faces[k + 1][j].append((i, int(s)))
                cofaces[k][i].append((j, int(s)))
        self.faces: tuple[tuple[Incidence, ...], ...] = tuple(
            tuple(tuple(sorted(fs)) for fs in per) for per in faces
        )
        self.cofaces: tuple[tuple[Incidence, ...], ...] = tuple(
            tuple(tuple(sorted(cs)) for cs in per) for per in cofaces
        )

    def __repr__(self) -> str:
        return f"Complex({self.id!r}, counts={self.counts})"

    def count(self, k: int) -> int:
        return self.counts[k] if 0 <= k <= self.max_degree else 0

    def cells(self, k: int) -> list[Cell]:
        labels = self.labels[k] if self.labels is not None else [None] * self.count(k)
        return [Cell(k, i, labels[i]) for i in range(self.count(k))]

    def incidence_triplets(self, k: int) -> list[tuple[int, int, int]]:
        return [(i, j, s) for j, fs in enumerate(self.faces[k + 1]) for i, s in fs]

    def weight(self, k: int) -> tuple[Fraction, ...]:
        return self.weights[k] if 0 <= k <= self.max_degree else ()

    # -- constructors for forms and chains --------------------------------
    def form(self, k: int, values: Iterable[Fraction | int]) -> "KForm":
        return KForm(self, k, tuple(Fraction(v) for v in values))

    def zero_form(self, k: int) -> "KForm":
        return KForm(self, k, (Fraction(0),) * self.count(k))

    def indicator(self, k: int, i: int) -> "KForm":
        vals = [Fraction(0)] * self.count(k)
        vals[i] = Fraction(1)
        return KForm(self, k, tuple(vals))

    def chain(self, k: int, coefficients: Mapping[int, Fraction | int]) -> "Chain":
        return Chain(self, k, {i: Fraction(a) for i, a in coefficients.items() if a != 0})


@dataclass(frozen=True, eq=False)
class KForm:
    complex: Complex
    degree: int
    values: tuple[Fraction, ...]

    def __post_init__(self):
        if len(self.values) != self.complex.count(self.degree):
            raise ShapeError(
                f"{len(self.values)} values for {self.complex.count(self.degree)} cells of degree {self.degree}"
            )

    def __eq__(self, other):
        if not isinstance(other, KForm):
            return NotImplemented
        return self.complex is other.complex and self.degree == other.degree and self.values == other.values

    def __hash__(self):
        return hash((id(self.complex), self.degree, self.values))

    def _check(self, other: "KForm"):
        if self.complex is not other.complex or self.degree != other.degree:
            raise ShapeError("forms live on different complexes or degrees")

    def __add__(self, other: "KForm") -> "KForm":
        self._check(other)
        return KForm(self.complex, self.degree, tuple(a + b for a, b in zip(self.values, other.values)))

    def __sub__(self, other: "KForm") -> "KForm":
        self._check(other)
        return KForm(self.complex, self.degree, tuple(a - b for a, b in zip(self.values, other.values)))

    def __neg__(self) -> "KForm":
        return KForm(self.complex, self.degree, tuple(-a for a in self.values))

    def scale(self, c: Fraction | int) -> "KForm":
        c = Fraction(c)
        return KForm(self.complex, self.degree, tuple(c * a for a in self.values))

    __rmul__ = scale

    def is_zero(self) -> bool:
        return not any(self.values)

    def to_numpy(self) -> np.ndarray:
        return np.array([float(v) for v in self.values])


@dataclass(frozen=True)
class Chain:
    complex: Complex
    degree: int
    coefficients: Mapping[int, Fraction] = field(default_factory=dict)

    def __post_init__(self):
        n = self.complex.count(self.degree)
        for i in self.coefficients:
            if not 0 <= i < n:
                raise ShapeError(f"cell {i} does not exist in degree {self.degree}")

    def __add__(self, other: "Chain") -> "Chain":
        if other.complex is not self.complex or other.degree != self.degree:
            raise ShapeError("chains live on different complexes or degrees")
        out = dict(self.coefficients)
        for i, a in other.coefficients.items():
            out[i] = out.get(i, 0) + a
        return self.complex.chain(self.degree, out)

    def scale(self, c: Fraction | int) -> "Chain":
        return self.complex.chain(self.degree, {i: c * a for i, a in self.coefficients.items()})

    def is_zero(self) -> bool:
        return not any(self.coefficients.values())


# -- validation -------------------------------------------------------------

def validate_complex(c: Complex) -> list[Violation]:
    """List every broken incidence, parity, chain or weight condition."""
    out: list[Violation] = []
    for k in range(c.max_degree + 1):
        for i, w in enumerate(c.weights[k]):
            if w <= 0:
                out.append(Violation("weight", k, (i,), f"weight {w} is not positive"))
    for k in range(1, c.max_degree + 1):
        for j, fs in enumerate(c.faces[k]):
            seen = set()
            for i, s in fs:
                if s not in (-1, 1):
                    out.append(Violation("sign", k, (i, j), f"sign {s} not in {{-1, +1}}"))
                if i in seen:
                    out.append(Violation("sign", k, (i, j), "repeated incidence"))
                seen.add(i)
    # chain condition: interior degrees need a face and a coface
    for k in range(c.max_degree + 1):
        for i in range(c.count(k)):
            if k > 0 and not c.faces[k][i]:
                out.append(Violation("chain", k, (i,), "no face in degree k-1"))
            if k < c.max_degree and not c.cofaces[k][i]:
                out.append(Violation("chain", k, (i,), "no coface in degree k+1"))
    # sum_{e_k} sgn(e_{k-1}, e_k) sgn(e_k, e_{k+1}) = 0
    for k in range(1, c.max_degree):
        for j, fs in enumerate(c.faces[k + 1]):
            acc: dict[int, int] = {}
            for e, s1 in fs:
                for v, s0 in c.faces[k][e]:
                    acc[v] = acc.get(v, 0) + s0 * s1
            for v, total in sorted(acc.items()):
                if total:
                    out.append(
                        Violation("parity", k - 1, (v, j), f"sum of sign products is {total}, expected 0")
                    )
    return out


# -- operators --------------------------------------------------------------

def d(f: KForm) -> KForm:
    """Exterior derivative; maps the top degree into the empty class."""
    c, k = f.complex, f.degree
    if k >= c.max_degree:
        return KForm(c, k + 1, ())
    vals = []
    for fs in c.faces[k + 1]:
        acc = Fraction(0)
        for i, s in fs:
            acc += f.values[i] if s > 0 else -f.values[i]
        vals.append(acc)
    return KForm(c, k + 1, tuple(vals))


def delta(f: KForm) -> KForm:
    """Weighted adjoint of :func:`d`; degree 0 maps into the empty class."""
    c, k = f.complex, f.degree
    if k <= 0:
        return KForm(c, k - 1, ())
    mu, mu_low = c.weights[k], c.weights[k - 1]
    vals = []
    for i, cs in enumerate(c.cofaces[k - 1]):
        acc = Fraction(0)
        for j, s in cs:
            t = mu[j] * f.values[j]
            acc += t if s > 0 else -t
        vals.append(acc / mu_low[i])
    return KForm(c, k - 1, tuple(vals))


def divergence(f: KForm) -> KForm:
    """Unweighted signed incidence sum ``sum_e sgn(v, e) f(e)``.

    Differs from :func:`delta` by a per-cell positive factor when weights are
    constant on the upper degree, so it shares the kernel in that case.
    """
    c, k = f.complex, f.degree
    if k <= 0:
        return KForm(c, k - 1, ())
    vals = []
    for cs in c.cofaces[k - 1]:
        vals.append(sum((f.values[j] if s > 0 else -f.values[j] for j, s in cs), Fraction(0)))
    return KForm(c, k - 1, tuple(vals))


def inner(f: KForm, g: KForm) -> Fraction:
    f._check(g)
    mu = f.complex.weight(f.degree)
    return sum((m * a * b for m, a, b in zip(mu, f.values, g.values) if a and b), Fraction(0))


def energy(f: KForm, g: KForm | None = None) -> Fraction:
    """``<df, dg> + <delta f, delta g>``; absent terms at extreme degrees vanish."""
    g = f if g is None else g
    f._check(g)
    return inner(d(f), d(g)) + inner(delta(f), delta(g))


def laplacian_apply(f: KForm) -> KForm:
    """Apply ``-Delta_k = delta d + d delta``."""
    a = delta(d(f)) if f.degree < f.complex.max_degree else f.complex.zero_form(f.degree)
    b = d(delta(f)) if f.degree > 0 else f.complex.zero_form(f.degree)
    return a + b


def d_rows(c: Complex, k: int) -> list[dict[int, int]]:
    """Sparse rows of the matrix of ``d_k``."""
    if k >= c.max_degree:
        return []
    return [{i: s for i, s in fs} for fs in c.faces[k + 1]]


def delta_rows(c: Complex, k: int) -> list[dict[int, Fraction]]:
    """Sparse rows of the matrix of ``delta_k``."""
    if k <= 0:
        return []
    mu, mu_low = c.weights[k], c.weights[k - 1]
    return [{j: s * mu[j] / mu_low[i] for j, s in cs} for i, cs in enumerate(c.cofaces[k - 1])]


def _dense(rows: list[Mapping[int, Fraction | int]], ncols: int) -> list[list[Fraction]]:
    out = []
    for r in rows:
        row = [Fraction(0)] * ncols
        for j, v in r.items():
            row[j] = Fraction(v)
        out.append(row)
    return out


def _sparse_product(a: list[Mapping[int, Fraction | int]], b: list[Mapping[int, Fraction | int]]) -> list[dict[int, Fraction]]:
    out = []
    for row in a:
        acc: dict[int, Fraction] = {}
        for j, v in row.items():
            for kk, w in b[j].items():
                acc[kk] = acc.get(kk, 0) + v * w
        out.append({kk: Fraction(v) for kk, v in acc.items() if v})
    return out


def laplacian_rows(c: Complex, k: int) -> list[dict[int, Fraction]]:
    n = c.count(k)
    rows: list[dict[int, Fraction]] = [{} for _ in range(n)]
    if k < c.max_degree:
        for i, r in enumerate(_sparse_product(delta_rows(c, k + 1), d_rows(c, k))):
            rows[i] = r
    if k > 0:
        for i, r in enumerate(_sparse_product(d_rows(c, k - 1), delta_rows(c, k))):
            for j, v in r.items():
                nv = rows[i].get(j, 0) + v
                if nv:
                    rows[i][j] = nv
                else:
                    rows[i].pop(j, None)
    return rows


def laplacian_matrix(c: Complex, k: int) -> list[list[Fraction]]:
    """Dense exact matrix of ``-Delta_k`` on the coordinate basis of ``D_k``."""
    return _dense(laplacian_rows(c, k), c.count(k))


def harmonic_basis(c: Complex, k: int) -> list[KForm]:
    """Integer basis of ``ker d_k  ∩  ker delta_k``."""
    n = c.count(k)
    rows: list[Mapping[int, Fraction | int]] = list(d_rows(c, k))
    if k > 0:
        # rows of delta scaled by mu_{k-1}: same kernel, fewer denominators
        mu = c.weights[k]
        rows += [{j: s * mu[j] for j, s in cs} for cs in c.cofaces[k - 1]]
    return [c.form(k, v) for v in exact.nullspace(rows, n)]


# -- chains -----------------------------------------------------------------

def boundary(ch: Chain) -> Chain:
    c, k = ch.complex, ch.degree
    if k < 1:
        raise ShapeError("boundary of a 0-chain is undefined")
    out: dict[int, Fraction] = {}
    for j, a in ch.coefficients.items():
        for i, s in c.faces[k][j]:
            out[i] = out.get(i, 0) + s * a
    return c.chain(k - 1, out)


def integrate(f: KForm, ch: Chain) -> Fraction:
    if f.complex is not ch.complex or f.degree != ch.degree:
        raise ShapeError("form and chain must share complex and degree")
    return sum((a * f.values[i] for i, a in ch.coefficients.items()), Fraction(0))


# -- Hodge decomposition ----------------------------------------------------

@dataclass(frozen=True)
class HodgeParts:
    exact: KForm
    coexact: KForm
    harmonic: KForm


class _RangeProjector:
    """Exact weighted orthogonal projection onto the span of given columns."""

    def __init__(self, columns: list[dict[int, Fraction]], weights: Sequence[Fraction], n: int):
        # keep a maximal independent subset of the spanning columns
        ech = exact.Echelon(n)
        basis = [col for col in columns if ech.add(col)]
        self.basis = basis
        self.weights = weights
        gram = [[self._ip(a, b) for b in basis] for a in basis]
        self.gram_inv = exact.inverse(gram) if basis else []
        self.n = n

    def _ip(self, a: Mapping[int, Fraction], b: Mapping[int, Fraction]) -> Fraction:
        if len(a) > len(b):
            a, b = b, a
        return sum((self.weights[i] * v * b[i] for i, v in a.items() if i in b), Fraction(0))

    def project(self, values: Sequence[Fraction]) -> list[Fraction]:
        if not self.basis:
            return [Fraction(0)] * self.n
        rhs = [sum((self.weights[i] * v * values[i] for i, v in col.items()), Fraction(0)) for col in self.basis]
        coef = exact.matvec(self.gram_inv, rhs)
        out = [Fraction(0)] * self.n
        for a, col in zip(coef, self.basis):
            if a:
                for i, v in col.items():
                    out[i] += a * v
        return out


class HodgeProjector:
    """Reusable Hodge splitting of ``D_k`` for one complex and degree."""

    def __init__(self, c: Complex, k: int, mode: str = "exact"):
        if mode not in ("exact", "float"):
            raise ValueError(f"unknown mode {mode!r}")
        self.complex, self.degree, self.mode = c, k, mode
        n = c.count(k)
        # columns of d_{k-1} (images of indicator (k-1)-forms)
        d_cols: list[dict[int, Fraction]] = []
        if k > 0:
            for cs in c.cofaces[k - 1]:
                d_cols.append({j: Fraction(s) for j, s in cs})
        # columns of delta_{k+1}
        dl_cols: list[dict[int, Fraction]] = []
        if k < c.max_degree:
            mu, mu_low = c.weights[k + 1], c.weights[k]
            for j, fs in enumerate(c.faces[k + 1]):
                dl_cols.append({i: s * mu[j] / mu_low[i] for i, s in fs})
        if mode == "exact":
            self._exact = _RangeProjector(d_cols, c.weights[k], n)
            self._coexact = _RangeProjector(dl_cols, c.weights[k], n)
        else:
            w = np.sqrt(np.array([float(x) for x in c.weights[k]]))
            self._w = w
            self._A = self._float_basis(d_cols, n, w)
            self._B = self._float_basis(dl_cols, n, w)

    @staticmethod
    def _float_basis(cols, n, w):
        if not cols:
            return np.zeros((n, 0))
        m = np.zeros((n, len(cols)))
        for j, col in enumerate(cols):
            for i, v in col.items():
                m[i, j] = float(v)
        # orthonormal basis of range in the weighted inner product
        u, s, _ = np.linalg.svd(w[:, None] * m, full_matrices=False)
        r = int(np.sum(s > s.max() * 1e-12)) if s.size else 0
        return u[:, :r]

    def decompose(self, f: KForm) -> HodgeParts:
        if f.complex is not self.complex or f.degree != self.degree:
            raise ShapeError("form does not belong to this projector")
        c, k = self.complex, self.degree
        if self.mode == "exact":
            ex = self._exact.project(f.values)
            co = self._coexact.project(f.values)
            harm = [a - b - e for a, b, e in zip(f.values, ex, co)]
            return HodgeParts(c.form(k, ex), c.form(k, co), c.form(k, harm))
        x = self._w * f.to_numpy()
        ex = self._A @ (self._A.T @ x)
        co = self._B @ (self._B.T @ x)
        hm = x - ex - co
        return HodgeParts(*(_FloatForm(c, k, v / self._w) for v in (ex, co, hm)))


@dataclass(frozen=True, eq=False)
class _FloatForm:
    """Floating-point stand-in for :class:`KForm` (float Hodge mode)."""

    complex: Complex
    degree: int
    array: np.ndarray

    def to_numpy(self) -> np.ndarray:
        return self.array


def hodge_decompose(f: KForm, mode: str = "exact") -> HodgeParts:
    return HodgeProjector(f.complex, f.degree, mode).decompose(f)


def hodge_dimensions(c: Complex, k: int) -> dict[str, int]:
    """Ranks of ``d_{k-1}``, ``delta_{k+1}`` and the harmonic nullity."""
    n = c.count(k)
    exact_dim = exact.rank(([{j: s for j, s in cs} for cs in c.cofaces[k - 1]] if k > 0 else []), n)
    coexact_dim = exact.rank(({i: s for i, s in fs} for fs in c.faces[k + 1]) if k < c.max_degree else [], n)
    return {"total": n, "exact": exact_dim, "coexact": coexact_dim, "harmonic": n - exact_dim - coexact_dim}


# -- spectra ----------------------------------------------------------------

HARMONIC, D_SPECTRUM, DELTA_SPECTRUM = "harmonic", "d-spectrum", "delta-spectrum"


@dataclass(frozen=True)
class Eigenpair:
    eigenvalue: float
    eigenvector: np.ndarray
    label: str


@dataclass(frozen=True)
class SpectrumReport:
    degree: int
    eigenpairs: tuple[Eigenpair, ...]
    tol: float

    def values(self, label: str | None = None) -> np.ndarray:
        return np.array(sorted(p.eigenvalue for p in self.eigenpairs if label is None or p.label == label))

    def grouped(self) -> list[tuple[float, str, int]]:
        """(eigenvalue, label, multiplicity) with near-equal values merged."""
        scale = max((abs(p.eigenvalue) for p in self.eigenpairs), default=1.0) or 1.0
        rows: list[list] = []
        for p in sorted(self.eigenpairs, key=lambda p: (p.label, p.eigenvalue)):
            if rows and rows[-1][1] == p.label and abs(rows[-1][0] - p.eigenvalue) <= self.tol * max(scale, 1.0):
                rows[-1][2] += 1
            else:
                rows.append([p.eigenvalue, p.label, 1])
        rows.sort(key=lambda r: (r[0], r[1]))
        return [(float(v), lab, m) for v, lab, m in rows]


class EigensolverError(ArithmeticError):
    pass


def _float_matrix(rows: list[Mapping[int, Fraction | int]], ncols: int) -> np.ndarray:
    m = np.zeros((len(rows), ncols))
    for i, r in enumerate(rows):
        for j, v in r.items():
            m[i, j] = float(v)
    return m


def _sym_eigh(m: np.ndarray, w: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Eigenpairs of ``m`` (self-adjoint for weights ``w``) via ``W^1/2 M W^-1/2``."""
    if m.shape[0] == 0:
        return np.zeros(0), np.zeros((0, 0))
    sw = np.sqrt(w)
    s = sw[:, None] * m / sw[None, :]
    s = 0.5 * (s + s.T)
    try:
        vals, vecs = np.linalg.eigh(s)
    except np.linalg.LinAlgError as exc:
        raise EigensolverError(str(exc)) from exc
    return vals, vecs / sw[:, None]


def spectrum(c: Complex, k: int, tol: float = 1e-9) -> SpectrumReport:
    """Full eigendecomposition of ``-Delta_k`` with Hodge labels.

    The exact part ``d delta`` and the coexact part ``delta d`` commute and
    multiply to zero, so their nonzero eigenpairs are eigenpairs of the sum
    and carry their label by construction.  The zero eigenspace of the sum is
    the harmonic space.
    """
    if tol <= 0:
        raise ValueError("tol must be positive")
    n = c.count(k)
    w = np.array([float(x) for x in c.weights[k]])
    lap = _float_matrix(laplacian_rows(c, k), n)
    full_vals, full_vecs = _sym_eigh(lap, w)
    scale = float(np.max(np.abs(full_vals))) if n else 0.0
    cut = tol * scale if scale > 0 else tol

    pairs: list[Eigenpair] = []
    if k > 0:
        a = _float_matrix(_sparse_product(d_rows(c, k - 1), delta_rows(c, k)), n)
        vals, vecs = _sym_eigh(a, w)
        pairs += [Eigenpair(float(v), vecs[:, i], D_SPECTRUM) for i, v in enumerate(vals) if abs(v) >= cut]
    if k < c.max_degree:
        b = _float_matrix(_sparse_product(delta_rows(c, k + 1), d_rows(c, k)), n)
        vals, vecs = _sym_eigh(b, w)
        pairs += [Eigenpair(float(v), vecs[:, i], DELTA_SPECTRUM) for i, v in enumerate(vals) if abs(v) >= cut]
    for i, v in enumerate(full_vals):
        if abs(v) < cut:
            pairs.append(Eigenpair(float(v), full_vecs[:, i], HARMONIC))
    if len(pairs) != n:
        raise EigensolverError(f"labeled {len(pairs)} eigenpairs for dimension {n}")
    pairs.sort(key=lambda p: p.eigenvalue)
    return SpectrumReport(k, tuple(pairs), tol)


@dataclass(frozen=True)
class ReplicationCheck:
    lower: np.ndarray  # nonzero delta-spectrum of -Delta_{k-1}
    upper: np.ndarray  # nonzero d-spectrum of -Delta_k
    max_eigenvalue_gap: float
    max_transfer_residual: float


def spectral_replication(c: Complex, k: int, tol: float = 1e-9) -> ReplicationCheck:
    """Compare delta-spectrum of ``-Delta_{k-1}`` with d-spectrum of ``-Delta_k``.

    The transfer residual is ``|-Delta_k (d f) - lambda d f|`` (weighted norm)
    for each unit-norm delta-eigenform ``f`` of degree k-1.
    """
    if k < 1:
        raise ValueError("replication needs k >= 1")
    lo = spectrum(c, k - 1, tol)
    hi = spectrum(c, k, tol)
    lower = lo.values(DELTA_SPECTRUM)
    upper = hi.values(D_SPECTRUM)
    gap = float(np.max(np.abs(lower - upper))) if lower.shape == upper.shape and lower.size else (
        0.0 if lower.size == upper.size == 0 else float("inf")
    )
    lap_hi = _float_matrix(laplacian_rows(c, k), c.count(k))
    dm = _float_matrix(d_rows(c, k - 1), c.count(k - 1))
    w_lo = np.array([float(x) for x in c.weights[k - 1]])
    w_hi = np.array([float(x) for x in c.weights[k]])
    worst = 0.0
    for p in lo.eigenpairs:
        if p.label != DELTA_SPECTRUM:
            continue
        f = p.eigenvector / np.sqrt(np.sum(w_lo * p.eigenvector**2))
        df = dm @ f
        r = lap_hi @ df - p.eigenvalue * df
        worst = max(worst, float(np.sqrt(np.sum(w_hi * r**2))))
    return ReplicationCheck(lower, upper, gap, worst)
