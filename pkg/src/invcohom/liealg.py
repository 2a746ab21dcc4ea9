"""Lie algebras given by rational structure constants.

Vectors of the ambient algebra are sequences of Fractions in the basis
``e_0, ..., e_{dim-1}``.  A :class:`Subalgebra` carries its own basis (the
``L_j``) and the structure constants it induces in that basis.

The identities checked here are the purely algebraic ones: the sub-Laplacian
``-sum L_j^2`` commutes with every ``L`` in the subalgebra, and the
bilinear identity ``sum [L, L_j] f(L_j) = -sum L_j f([L, L_j])``.  Both hold
when the basis is orthonormal for an ad-invariant metric; the ``*_unchecked``
entry points skip that precondition so the failures can be inspected.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from itertools import combinations
from typing import NamedTuple, Sequence

from .exactlin import ExactMatrix, parse_rational, rank, solve


class StructureError(ValueError):
    """Raised when an algebra, subalgebra or metric violates its invariants."""


def _vec(x) -> tuple[Fraction, ...]:
    return tuple(parse_rational(c) if isinstance(c, str) else Fraction(c) for c in x)


@dataclass(frozen=True)
class StructureConstants:
    """``c[i][j][k]`` is the coefficient of ``e_k`` in ``[e_i, e_j]``."""

    dim: int
    c: tuple

    @classmethod
    def from_brackets(cls, dim: int, brackets) -> "StructureConstants":
        """Build from entries ``(i, j, k, coeff)`` (0-based) for ``[e_i, e_j]``.

        The antisymmetric partner ``[e_j, e_i]`` is filled in; giving both
        orders with inconsistent values raises StructureError.
        """
        c = [[[Fraction(0)] * dim for _ in range(dim)] for _ in range(dim)]
        given = {}
        for i, j, k, coeff in brackets:
            v = parse_rational(coeff) if isinstance(coeff, str) else Fraction(coeff)
            if not all(0 <= t < dim for t in (i, j, k)):
                raise StructureError(f"bracket index out of range: {(i, j, k)}")
            if i == j and v != 0:
                raise StructureError(f"[e{i+1}, e{i+1}] must vanish")
            if (j, i, k) in given and given[(j, i, k)] != -v:
                raise StructureError(f"inconsistent antisymmetric pair at {(i, j, k)}")
            given[(i, j, k)] = v
            c[i][j][k] = v
            c[j][i][k] = -v
        return cls(dim, _freeze(c))

    @classmethod
    def from_array(cls, c) -> "StructureConstants":
        dim = len(c)
        arr = [[[Fraction(x) for x in row] for row in plane] for plane in c]
        return cls(dim, _freeze(arr))

    @classmethod
    def abelian(cls, dim: int) -> "StructureConstants":
        return cls.from_brackets(dim, [])

    def bracket(self, x: Sequence, y: Sequence) -> tuple[Fraction, ...]:
        out = [Fraction(0)] * self.dim
        for i, xi in enumerate(x):
            if not xi:
                continue
            for j, yj in enumerate(y):
                if not yj:
                    continue
                s = xi * yj
                cij = self.c[i][j]
                for k in range(self.dim):
                    if cij[k]:
                        out[k] += s * cij[k]
        return tuple(out)

    def basis_vector(self, i: int) -> tuple[Fraction, ...]:
        return tuple(Fraction(int(k == i)) for k in range(self.dim))

    def is_antisymmetric(self) -> bool:
        return all(self.c[i][j][k] == -self.c[j][i][k]
                   for i in range(self.dim) for j in range(self.dim) for k in range(self.dim))

    def is_abelian(self) -> bool:
        return all(x == 0 for plane in self.c for row in plane for x in row)


def _freeze(c):
    return tuple(tuple(tuple(row) for row in plane) for plane in c)


class JacobiResult(NamedTuple):
    ok: bool
    triple: tuple[int, int, int] | None = None
    residual: tuple[Fraction, ...] | None = None


def check_jacobi(sc: StructureConstants) -> JacobiResult:
    """Check ``[[x,y],z] + [[y,z],x] + [[z,x],y] = 0`` on all basis triples.

    Triples with a repeated index hold by antisymmetry, so only ``i < j < k``
    are expanded.  On failure the first violating triple (0-based) and its
    residual vector are returned.
    """
    if not sc.is_antisymmetric():
        raise StructureError("structure constants are not antisymmetric")
    e = [sc.basis_vector(i) for i in range(sc.dim)]
    for i, j, k in combinations(range(sc.dim), 3):
        a = sc.bracket(sc.bracket(e[i], e[j]), e[k])
        b = sc.bracket(sc.bracket(e[j], e[k]), e[i])
        d = sc.bracket(sc.bracket(e[k], e[i]), e[j])
        res = tuple(x + y + z for x, y, z in zip(a, b, d))
        if any(res):
            return JacobiResult(False, (i, j, k), res)
    return JacobiResult(True)


@dataclass(frozen=True)
class Metric:
    """Symmetric positive definite Gram matrix on the ambient algebra."""

    gram: tuple

    def __post_init__(self):
        g = self.gram
        n = len(g)
        if any(len(row) != n for row in g):
            raise StructureError("gram matrix must be square")
        if any(g[i][j] != g[j][i] for i in range(n) for j in range(n)):
            raise StructureError("gram matrix is not symmetric")
        for k in range(1, n + 1):
            if _det([row[:k] for row in g[:k]]) <= 0:
                raise StructureError(f"gram matrix is not positive definite (minor {k})")

    @classmethod
    def from_rows(cls, rows) -> "Metric":
        return cls(tuple(_vec(r) for r in rows))

    @classmethod
    def identity(cls, n: int) -> "Metric":
        return cls(tuple(tuple(Fraction(int(i == j)) for j in range(n)) for i in range(n)))

    def inner(self, x: Sequence, y: Sequence) -> Fraction:
        total = Fraction(0)
        for i, xi in enumerate(x):
            if xi:
                row = self.gram[i]
                for j, yj in enumerate(y):
                    if yj and row[j]:
                        total += xi * row[j] * yj
        return total


def _det(m) -> Fraction:
    a = [[Fraction(x) for x in row] for row in m]
    n = len(a)
    det = Fraction(1)
    for c in range(n):
        p = next((r for r in range(c, n) if a[r][c]), None)
        if p is None:
            return Fraction(0)
        if p != c:
            a[c], a[p] = a[p], a[c]
            det = -det
        det *= a[c][c]
        for r in range(c + 1, n):
            f = a[r][c] / a[c][c]
            if f:
                a[r] = [x - f * y for x, y in zip(a[r], a[c])]
    return det


def is_ad_invariant(sc: StructureConstants, metric: Metric) -> bool:
    """True iff ``<[X,Y],Z> + <Y,[X,Z]> = 0`` for all basis triples."""
    e = [sc.basis_vector(i) for i in range(sc.dim)]
    for x in e:
        for y in e:
            xy = sc.bracket(x, y)
            for z in e:
                if metric.inner(xy, z) + metric.inner(y, sc.bracket(x, z)) != 0:
                    return False
    return True


@dataclass(frozen=True)
class Subalgebra:
    """A subalgebra spanned by rational rows of ``basis`` (ambient coordinates).

    Construction checks that the rows are independent and that the span is
    closed under the bracket (involutivity); ``structure`` holds the induced
    constants in the subalgebra's own basis.
    """

    ambient: StructureConstants
    basis: tuple
    structure: StructureConstants = field(init=False, compare=False)

    def __post_init__(self):
        rows = tuple(_vec(r) for r in self.basis)
        object.__setattr__(self, "basis", rows)
        dim = self.ambient.dim
        if any(len(r) != dim for r in rows):
            raise StructureError("subalgebra basis rows have the wrong length")
        if rows and rank(ExactMatrix(rows)) != len(rows):
            raise StructureError("subalgebra basis rows are linearly dependent")
        n = len(rows)
        c = [[[Fraction(0)] * n for _ in range(n)] for _ in range(n)]
        for a in range(n):
            for b in range(a + 1, n):
                br = self.ambient.bracket(rows[a], rows[b])
                coords = self.coords(br)
                if coords is None:
                    raise StructureError(
                        f"bracket of basis rows {a + 1} and {b + 1} leaves the subalgebra")
                for k, v in enumerate(coords):
                    c[a][b][k] = v
                    c[b][a][k] = -v
        object.__setattr__(self, "structure", StructureConstants(n, _freeze(c)))

    @classmethod
    def full(cls, sc: StructureConstants) -> "Subalgebra":
        return cls(sc, tuple(sc.basis_vector(i) for i in range(sc.dim)))

    @property
    def n(self) -> int:
        return len(self.basis)

    def coords(self, x: Sequence) -> tuple[Fraction, ...] | None:
        """Coordinates of an ambient vector in the subalgebra basis, or None."""
        if not self.basis:
            return () if not any(x) else None
        M = ExactMatrix(self.basis).transpose()
        sol = solve(M, list(x))
        if sol is None:
            return None
        return tuple(s.re for s in sol)

    def vector(self, coords: Sequence) -> tuple[Fraction, ...]:
        """Ambient vector with the given subalgebra coordinates."""
        out = [Fraction(0)] * self.ambient.dim
        for a, row in zip(coords, self.basis):
            if a:
                for k, r in enumerate(row):
                    out[k] += a * r
        return tuple(out)

    def is_orthonormal(self, metric: Metric) -> bool:
        return all(metric.inner(self.basis[a], self.basis[b]) == int(a == b)
                   for a in range(self.n) for b in range(self.n))


def _require_orthonormal(v: Subalgebra, metric: Metric):
    if not v.is_orthonormal(metric):
        raise StructureError("subalgebra basis is not orthonormal for the metric")


def commutator_matrix_unchecked(v: Subalgebra, L: Sequence) -> ExactMatrix:
    """``c`` with ``[L, L_j] = sum_k c[j][k] L_k``, for any ambient L.

    Raises StructureError if some bracket leaves the subalgebra.
    """
    rows = []
    for j, Lj in enumerate(v.basis):
        coords = v.coords(v.ambient.bracket(L, Lj))
        if coords is None:
            raise StructureError(f"[L, L_{j + 1}] is not in the subalgebra")
        rows.append(list(coords))
    return ExactMatrix(rows, cols=v.n)


def commutator_coeffs(v: Subalgebra, metric: Metric, L: Sequence) -> ExactMatrix:
    """Matrix ``c[j][k] = <[L, L_j], L_k>`` of ad_L on an orthonormal basis of v."""
    _require_orthonormal(v, metric)
    L = _vec(L)
    if v.coords(L) is None:
        raise StructureError("L is not an element of the subalgebra")
    c = commutator_matrix_unchecked(v, L)
    for j, Lj in enumerate(v.basis):
        br = v.ambient.bracket(L, Lj)
        for k, Lk in enumerate(v.basis):
            if metric.inner(br, Lk) != c[j, k]:
                raise StructureError("bracket coefficients disagree with the metric pairing")
    return c


class PBW2Element:
    """Element of the universal enveloping algebra of degree at most 2.

    Stored in PBW normal form relative to the ambient basis: a constant, a
    linear part, and quadratic monomials ``e_i e_j`` with ``i <= j``.  Any
    product ``e_i e_j`` with ``i > j`` is rewritten as
    ``e_j e_i + [e_i, e_j]`` on entry.
    """

    __slots__ = ("algebra", "constant", "linear", "quadratic")

    def __init__(self, algebra: StructureConstants, constant=0, linear=None, quadratic=None):
        self.algebra = algebra
        self.constant = Fraction(constant)
        self.linear = [Fraction(0)] * algebra.dim
        self.quadratic: dict[tuple[int, int], Fraction] = {}
        if linear is not None:
            for k, x in enumerate(linear):
                self.linear[k] += Fraction(x)
        for (i, j), x in (quadratic or {}).items():
            self.add_product(i, j, Fraction(x))

    def add_product(self, i: int, j: int, coeff: Fraction):
        """Add ``coeff * e_i e_j``, normalizing the order."""
        if not coeff:
            return
        if i > j:
            for k, ck in enumerate(self.algebra.c[i][j]):
                if ck:
                    self.linear[k] += coeff * ck
            i, j = j, i
        new = self.quadratic.get((i, j), Fraction(0)) + coeff
        if new:
            self.quadratic[(i, j)] = new
        else:
            self.quadratic.pop((i, j), None)

    def add_linear_product(self, x: Sequence, y: Sequence, coeff=1):
        """Add ``coeff * x y`` for two vectors x, y of the algebra."""
        coeff = Fraction(coeff)
        for i, xi in enumerate(x):
            if xi:
                for j, yj in enumerate(y):
                    if yj:
                        self.add_product(i, j, coeff * xi * yj)

    def normalized(self) -> "PBW2Element":
        """Re-run normalization; a normal form is a fixed point."""
        return PBW2Element(self.algebra, self.constant, self.linear, dict(self.quadratic))

    def commutator_with(self, L: Sequence) -> "PBW2Element":
        """``[L, self]`` using that ad_L is a derivation of the enveloping algebra."""
        sc = self.algebra
        out = PBW2Element(sc)
        out.linear = list(sc.bracket(L, self.linear))
        for (i, j), x in self.quadratic.items():
            ei, ej = sc.basis_vector(i), sc.basis_vector(j)
            out.add_linear_product(sc.bracket(L, ei), ej, x)
            out.add_linear_product(ei, sc.bracket(L, ej), x)
        return out

    def is_zero(self) -> bool:
        return not self.constant and not any(self.linear) and not self.quadratic

    def __eq__(self, other):
        if not isinstance(other, PBW2Element):
            return NotImplemented
        return (self.algebra == other.algebra and self.constant == other.constant
                and self.linear == other.linear and self.quadratic == other.quadratic)

    __hash__ = None

    def terms(self) -> list[tuple[str, Fraction]]:
        """Human-readable monomials (1-based labels) in a fixed order."""
        out = []
        if self.constant:
            out.append(("1", self.constant))
        out.extend((f"e{k + 1}", x) for k, x in enumerate(self.linear) if x)
        out.extend((f"e{i + 1}e{j + 1}", x) for (i, j), x in sorted(self.quadratic.items()))
        return out

    def __repr__(self):
        if self.is_zero():
            return "PBW2Element(0)"
        return "PBW2Element(" + " + ".join(f"{x}*{m}" for m, x in self.terms()) + ")"


def sublaplacian(v: Subalgebra) -> PBW2Element:
    """``-sum_j L_j^2`` in PBW normal form."""
    out = PBW2Element(v.ambient)
    for Lj in v.basis:
        out.add_linear_product(Lj, Lj, -1)
    return out


def sublaplacian_commutator_unchecked(v: Subalgebra, L: Sequence) -> PBW2Element:
    """``[L, Delta_v]`` for an arbitrary ambient vector L, no preconditions."""
    return sublaplacian(v).commutator_with(_vec(L))


def sublaplacian_commutator(v: Subalgebra, metric: Metric, i: int) -> PBW2Element:
    """``[L_i, Delta_v]``; zero when the basis is orthonormal for an ad-invariant metric."""
    _require_orthonormal(v, metric)
    if not is_ad_invariant(v.ambient, metric):
        raise StructureError("metric is not ad-invariant")
    return sublaplacian_commutator_unchecked(v, v.basis[i])


def fund_identity_residual_unchecked(v: Subalgebra, L: Sequence) -> ExactMatrix:
    """Expand both sides of ``sum_j [L,L_j] f(L_j) = -sum_j L_j f([L,L_j])``.

    With ``f_b = f(L_b)`` symbolic, each side is a bilinear expression in the
    pairs ``L_a f_b``; the returned matrix holds LHS minus RHS coefficients.
    """
    c = commutator_matrix_unchecked(v, _vec(L))
    n = v.n
    lhs = [[Fraction(0)] * n for _ in range(n)]
    rhs = [[Fraction(0)] * n for _ in range(n)]
    for j in range(n):
        for k in range(n):
            cjk = c[j, k].re
            if cjk:
                lhs[k][j] += cjk      # [L, L_j] = sum_k c_jk L_k, applied to f_j
                rhs[j][k] -= cjk      # -L_j applied to f([L, L_j]) = sum_k c_jk f_k
    return ExactMatrix([[lhs[a][b] - rhs[a][b] for b in range(n)] for a in range(n)], cols=n)


def fund_identity_residual(v: Subalgebra, metric: Metric, L: Sequence) -> ExactMatrix:
    """Residual matrix of the bilinear identity; equals ``c + c^T``."""
    commutator_coeffs(v, metric, L)
    return fund_identity_residual_unchecked(v, L)


# Bundled algebras used by the tests and the example configs.

def su2() -> StructureConstants:
    """[e1,e2]=e3, [e2,e3]=e1, [e3,e1]=e2."""
    return StructureConstants.from_brackets(3, [(0, 1, 2, 1), (1, 2, 0, 1), (2, 0, 1, 1)])


def su2_plus_r() -> StructureConstants:
    return StructureConstants.from_brackets(4, [(0, 1, 2, 1), (1, 2, 0, 1), (2, 0, 1, 1)])


def affine_line() -> StructureConstants:
    """The 2-dimensional nonabelian algebra [e1,e2]=e2 (admits no ad-invariant metric)."""
    return StructureConstants.from_brackets(2, [(0, 1, 1, 1)])
