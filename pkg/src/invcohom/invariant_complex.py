"""The complex of invariant forms on a Lie subalgebra.

Degree-q forms are vectors over the lexicographically ordered strictly
increasing index tuples of ``range(n)``; ``tau_J`` with increasing ``J`` is the
positive basis element.  The differential on 1-forms is
``d tau_k = -sum_{i<j} s_ij^k tau_i ^ tau_j`` (``s`` are the subalgebra's
own structure constants) and is extended to higher degree as a graded
derivation.  Indices are 0-based throughout; reports print them 1-based.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from itertools import combinations, permutations
from math import comb
from typing import Mapping, Sequence

from .exactlin import ZERO, ExactMatrix, GaussianRational, rank, right_inverse_on_range
from .liealg import StructureError, Subalgebra, commutator_matrix_unchecked


def multi_indices(n: int, q: int) -> list[tuple[int, ...]]:
    """Strictly increasing q-tuples of ``range(n)`` in lexicographic order."""
    return list(combinations(range(n), q))


def binomial_dims(n: int) -> tuple[int, ...]:
    return tuple(comb(n, q) for q in range(n + 1))


def merge_sign(a: Sequence[int], b: Sequence[int]) -> tuple[int, tuple[int, ...] | None]:
    """``tau_a ^ tau_b = sign * tau_K``; returns ``(0, None)`` on a repeated index."""
    if set(a) & set(b):
        return 0, None
    inversions = sum(1 for x in a for y in b if x > y)
    return (-1 if inversions % 2 else 1), tuple(sorted((*a, *b)))


def _perm_sign(p: Sequence[int]) -> int:
    p = list(p)
    sign = 1
    for i in range(len(p)):
        while p[i] != i:
            j = p[i]
            p[i], p[j] = p[j], p[i]
            sign = -sign
    return sign


class InvariantForm:
    """A constant-coefficient q-form ``sum_J u_J tau_J`` on an n-dimensional algebra."""

    __slots__ = ("degree", "n", "coeffs")

    def __init__(self, degree: int, n: int, coeffs: Mapping | None = None):
        if not 0 <= degree <= n:
            raise ValueError(f"degree {degree} out of range for n = {n}")
        self.degree = degree
        self.n = n
        self.coeffs: dict[tuple[int, ...], GaussianRational] = {}
        for J, x in (coeffs or {}).items():
            J = tuple(J)
            if len(J) != degree or any(not 0 <= j < n for j in J):
                raise ValueError(f"index {J} does not fit degree {degree}, n = {n}")
            x = GaussianRational.coerce(x)
            if len(set(J)) < len(J) or not x:
                continue
            order = sorted(range(degree), key=lambda k: J[k])
            K = tuple(J[k] for k in order)
            x = x if _perm_sign(order) > 0 else -x
            self._add(K, x)

    def _add(self, K, x):
        new = self.coeffs.get(K, ZERO) + x
        if new:
            self.coeffs[K] = new
        else:
            self.coeffs.pop(K, None)

    @classmethod
    def basis(cls, n: int, J: Sequence[int]) -> "InvariantForm":
        return cls(len(J), n, {tuple(J): 1})

    @classmethod
    def from_vector(cls, degree: int, n: int, vec: Sequence) -> "InvariantForm":
        return cls(degree, n, dict(zip(multi_indices(n, degree), vec)))

    def to_vector(self) -> list[GaussianRational]:
        return [self.coeffs.get(J, ZERO) for J in multi_indices(self.n, self.degree)]

    def is_zero(self) -> bool:
        return not self.coeffs

    def __add__(self, other: "InvariantForm") -> "InvariantForm":
        self._same_space(other)
        out = InvariantForm(self.degree, self.n, self.coeffs)
        for K, x in other.coeffs.items():
            out._add(K, x)
        return out

    def __neg__(self):
        return InvariantForm(self.degree, self.n, {K: -x for K, x in self.coeffs.items()})

    def __sub__(self, other):
        return self + (-other)

    def scale(self, s) -> "InvariantForm":
        s = GaussianRational.coerce(s)
        return InvariantForm(self.degree, self.n, {K: s * x for K, x in self.coeffs.items()})

    def _same_space(self, other):
        if (self.degree, self.n) != (other.degree, other.n):
            raise ValueError("forms live in different spaces")

    def __eq__(self, other):
        if not isinstance(other, InvariantForm):
            return NotImplemented
        return (self.degree, self.n, self.coeffs) == (other.degree, other.n, other.coeffs)

    __hash__ = None

    def wedge(self, other: "InvariantForm") -> "InvariantForm":
        if self.n != other.n:
            raise ValueError("forms on different algebras")
        if self.degree + other.degree > self.n:
            raise ValueError(f"wedge of degrees {self.degree} and {other.degree} exceeds n = {self.n}")
        out = InvariantForm(self.degree + other.degree, self.n)
        for J, x in self.coeffs.items():
            for K, y in other.coeffs.items():
                s, M = merge_sign(J, K)
                if s:
                    out._add(M, x * y if s > 0 else -(x * y))
        return out

    def evaluate(self, vectors: Sequence[Sequence]) -> GaussianRational:
        """``u(X_1, ..., X_q)`` for vectors given in coordinates of the basis."""
        if len(vectors) != self.degree:
            raise ValueError("wrong number of arguments")
        X = [[GaussianRational.coerce(c) for c in v] for v in vectors]
        total = ZERO
        for J, u in self.coeffs.items():
            det = ZERO
            for p in permutations(range(self.degree)):
                term = GaussianRational(_perm_sign(p))
                for a in range(self.degree):
                    term = term * X[a][J[p[a]]]
                    if not term:
                        break
                det = det + term
            total = total + u * det
        return total

    def __repr__(self):
        if not self.coeffs:
            return f"InvariantForm(degree={self.degree}, 0)"
        terms = " + ".join(f"({x})tau{''.join(str(j + 1) for j in J)}"
                           for J, x in sorted(self.coeffs.items()))
        return f"InvariantForm(degree={self.degree}, {terms})"


@dataclass(frozen=True)
class ComplexMatrices:
    """Matrices ``T[q]`` of the differential from degree q to q+1, with right inverses."""

    n: int
    T: tuple
    S: tuple

    def rank(self, q: int) -> int:
        if 0 <= q < self.n:
            return rank(self.T[q])
        return 0


def _degree_one_images(v: Subalgebra) -> list[InvariantForm]:
    s = v.structure.c
    n = v.n
    if n < 2:
        return [None] * n   # no 2-forms, and nothing of degree 1 is ever differentiated
    out = []
    for k in range(n):
        coeffs = {(i, j): -s[i][j][k] for i, j in combinations(range(n), 2) if s[i][j][k]}
        out.append(InvariantForm(2, n, coeffs))
    return out


def differential(v: Subalgebra, u: InvariantForm, _d1=None) -> InvariantForm:
    """Apply the invariant differential to ``u`` by the graded Leibniz rule."""
    n = v.n
    if u.degree == n:
        raise ValueError("no forms above the top degree")
    d1 = _d1 if _d1 is not None else _degree_one_images(v)
    out = InvariantForm(u.degree + 1, n)
    for J, x in u.coeffs.items():
        out = out + _d_basis(J, n, d1).scale(x)
    return out


def _d_basis(J, n, d1) -> InvariantForm:
    q = len(J)
    out = InvariantForm(q + 1, n)
    for p, j in enumerate(J):
        left = InvariantForm.basis(n, J[:p])
        right = InvariantForm.basis(n, J[p + 1:])
        term = left.wedge(d1[j]).wedge(right)
        out = out + (term if p % 2 == 0 else -term)
    return out


def ce_differential(v: Subalgebra, check: bool = True) -> ComplexMatrices:
    """The matrices of the invariant differential in every degree, with right inverses.

    ``T[0]`` is the zero map on constants.  With ``check`` the composite of
    consecutive matrices must vanish; it fails precisely when the
    structure constants violate the Jacobi identity.
    """
    n = v.n
    d1 = _degree_one_images(v)
    Ts = []
    for q in range(n):
        cols = [_d_basis(J, n, d1).to_vector() for J in multi_indices(n, q)]
        rows = comb(n, q + 1)
        Ts.append(ExactMatrix([[cols[c][r] for c in range(len(cols))] for r in range(rows)],
                              cols=len(cols)))
    if check:
        for q in range(n - 1):
            if not (Ts[q + 1] @ Ts[q]).is_zero():
                raise StructureError(f"differential does not square to zero in degree {q}")
    return ComplexMatrices(n, tuple(Ts), tuple(right_inverse_on_range(T) for T in Ts))


def invariant_cohomology_dims(v: Subalgebra, cm: ComplexMatrices | None = None) -> tuple[int, ...]:
    cm = cm or ce_differential(v)
    return cohomology_dims_from(cm.n, [rank(T) for T in cm.T])


def cohomology_dims_from(n: int, ranks: Sequence[int]) -> tuple[int, ...]:
    """``dim H^q = C(n,q) - rank T_q - rank T_{q-1}`` given the ranks of ``T_0..T_{n-1}``."""
    out = []
    for q in range(n + 1):
        r_out = ranks[q] if q < n else 0
        r_in = ranks[q - 1] if q >= 1 else 0
        out.append(comb(n, q) - r_out - r_in)
    return tuple(out)


def contract(L: Sequence, u: InvariantForm) -> InvariantForm:
    """Interior product ``iota_L u`` with L in basis coordinates."""
    if u.degree == 0:
        raise ValueError("cannot contract a 0-form")
    L = [GaussianRational.coerce(x) for x in L]
    if len(L) != u.n:
        raise ValueError("vector length does not match the algebra")
    out = InvariantForm(u.degree - 1, u.n)
    for J, x in u.coeffs.items():
        for p, j in enumerate(J):
            if L[j]:
                term = x * L[j]
                out._add(J[:p] + J[p + 1:], term if p % 2 == 0 else -term)
    return out


def _lie_derivative_of_coframe(v: Subalgebra, L: Sequence) -> list[InvariantForm]:
    """``Lie_L tau_m = -sum_k C[k][m] tau_k`` where ``[L, L_k] = sum_m C[k][m] L_m``."""
    Lamb = v.vector([Fraction(GaussianRational.coerce(x).re) for x in L])
    C = commutator_matrix_unchecked(v, Lamb)
    n = v.n
    return [InvariantForm(1, n, {(k,): -C[k, m] for k in range(n)}) for m in range(n)]


def invariant_lie_derivative(v: Subalgebra, L: Sequence, u: InvariantForm) -> InvariantForm:
    """Lie derivative of an invariant form along L (basis coordinates, real).

    On invariant forms only the bracket terms survive:
    ``(Lie_L u)(X_1..X_q) = -sum_k u(X_1, .., [L, X_k], .., X_q)``.
    """
    if any(GaussianRational.coerce(x).im for x in L):
        raise ValueError("L must be real")
    if u.degree == 0:
        return InvariantForm(0, u.n)
    lt = _lie_derivative_of_coframe(v, L)
    n = u.n
    out = InvariantForm(u.degree, n)
    for J, x in u.coeffs.items():
        for p, j in enumerate(J):
            term = InvariantForm.basis(n, J[:p]).wedge(lt[j]).wedge(InvariantForm.basis(n, J[p + 1:]))
            out = out + term.scale(x)
    return out


def cartan_check(v: Subalgebra, L: Sequence, u: InvariantForm) -> InvariantForm:
    """``Lie_L u - iota_L d u - d iota_L u``; identically zero when everything is consistent."""
    lie = invariant_lie_derivative(v, L, u)
    n = v.n
    if u.degree < n:
        a = contract(L, differential(v, u))
    else:
        a = InvariantForm(u.degree, n)
    if u.degree > 0:
        b = differential(v, contract(L, u))
    else:
        b = InvariantForm(0, n)
    return lie - a - b


def alternating_sum_differential(v: Subalgebra, u: InvariantForm) -> InvariantForm:
    """Differential computed from the invariant formula by evaluation.

    ``(du)(X_0..X_q) = sum_{i<j} (-1)^{i+j} u([X_i, X_j], X_0, ..^i..^j.., X_q)``
    evaluated on basis tuples; independent of the Leibniz construction.
    """
    n = v.n
    q = u.degree
    s = v.structure
    e = [[GaussianRational(int(a == b)) for b in range(n)] for a in range(n)]
    coeffs = {}
    for K in multi_indices(n, q + 1):
        X = [e[k] for k in K]
        total = ZERO
        for i, j in combinations(range(q + 1), 2):
            br = [GaussianRational(x) for x in s.c[K[i]][K[j]]]
            rest = [X[t] for t in range(q + 1) if t not in (i, j)]
            val = u.evaluate([br] + rest)
            total = total + (val if (i + j) % 2 == 0 else -val)
        coeffs[K] = total
    return InvariantForm(q + 1, n, coeffs)


def koszul_matrix(symbol: Sequence, q: int) -> ExactMatrix:
    """Matrix of ``w ^ .`` from degree q to q+1 for a symbol vector ``w``.

    The entry at ``(K, K minus j)`` is ``w_j (-1)^p`` with p the position of j in K.
    """
    w = [GaussianRational.coerce(x) for x in symbol]
    n = len(w)
    if not 0 <= q < n:
        raise ValueError(f"degree {q} out of range for n = {n}")
    src = {J: c for c, J in enumerate(multi_indices(n, q))}
    rows = []
    for K in multi_indices(n, q + 1):
        row = [ZERO] * len(src)
        for p, j in enumerate(K):
            if w[j]:
                row[src[K[:p] + K[p + 1:]]] = w[j] if p % 2 == 0 else -w[j]
        rows.append(row)
    return ExactMatrix(rows, cols=len(src))
