"""Abelian structures on the torus, analysed one Fourier mode at a time.

A structure is a rational ``n x N`` matrix ``A``: row j holds the
coefficients of the vector field ``L_j = sum_k A[j][k] d/dx_k``.  On the
exponential ``exp(i xi.x)`` each ``L_j`` acts as multiplication by ``i b_j``
with ``b = A xi``, so the complex at a mode is the Koszul complex of wedging
with ``i b``; it is exact unless ``b = 0``.

Internally a mode keeps the integer vector ``D b`` where ``D`` is the common
denominator of ``A``.  All kernel tests and small-divisor comparisons run on
those integers, which matters for the deep Liouville truncations whose
denominators have tens of thousands of digits.
"""

from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property
from itertools import product
from math import comb, factorial, isqrt, lcm
from typing import Callable, Iterable, Sequence

from .exactlin import (ExactMatrix, GaussianRational, integer_lattice_kernel,
                       min_norm_solution, parse_rational, rank)
from .invariant_complex import InvariantForm, binomial_dims, contract, koszul_matrix


def liouville_slope(depth: int) -> Fraction:
    """``sum_{j=1..depth} 10**(-j!)``, a rational truncation of a Liouville number."""
    if depth < 1:
        raise ValueError("depth must be at least 1")
    return sum((Fraction(1, 10 ** factorial(j)) for j in range(1, depth + 1)), Fraction(0))


def _as_fraction(x) -> Fraction:
    if isinstance(x, str):
        return parse_rational(x)
    if isinstance(x, float):
        raise TypeError("floats are not exact; pass a Fraction or a 'p/q' string")
    return Fraction(x)


class TorusStructure:
    """Rank-n abelian structure on the N-torus given by a rational matrix."""

    def __init__(self, A: Sequence[Sequence], name: str | None = None):
        rows = tuple(tuple(_as_fraction(x) for x in row) for row in A)
        if not rows or not rows[0]:
            raise ValueError("coefficient matrix must be nonempty")
        N = len(rows[0])
        if any(len(r) != N for r in rows):
            raise ValueError("ragged coefficient matrix")
        self.A = rows
        self.n = len(rows)
        self.N = N
        self.name = name
        self.D = lcm(*(x.denominator for row in rows for x in row))
        self.D2 = self.D * self.D
        self.A_int = tuple(tuple(x.numerator * (self.D // x.denominator) for x in row)
                           for row in rows)
        if rank(ExactMatrix(self.A_int)) != self.n:
            raise ValueError("rows of the coefficient matrix are linearly dependent")

    def __repr__(self):
        label = f" {self.name!r}" if self.name else ""
        return f"TorusStructure{label}(n={self.n}, N={self.N})"

    def scaled(self, c) -> "TorusStructure":
        c = _as_fraction(c)
        if c <= 0:
            raise ValueError("scale must be positive")
        return TorusStructure([[c * x for x in row] for row in self.A], self.name)

    def mode(self, xi: Sequence[int]) -> "Mode":
        xi = tuple(int(x) for x in xi)
        if len(xi) != self.N:
            raise ValueError(f"mode of length {len(xi)} on a {self.N}-torus")
        b_num = tuple(sum(a * x for a, x in zip(row, xi) if x) for row in self.A_int)
        return Mode(xi, b_num, self.D, self.D2)


@dataclass(frozen=True)
class Mode:
    """Fourier mode ``xi`` with symbol ``b = b_num / denom``."""

    xi: tuple[int, ...]
    b_num: tuple[int, ...]
    denom: int = 1
    denom2: int = field(default=0, repr=False, compare=False)

    def __post_init__(self):
        if not self.denom2:
            object.__setattr__(self, "denom2", self.denom * self.denom)

    @cached_property
    def b(self) -> tuple[Fraction, ...]:
        return tuple(Fraction(x, self.denom) for x in self.b_num)

    @property
    def n(self) -> int:
        return len(self.b_num)

    @property
    def lam(self) -> int:
        """Laplace eigenvalue ``|xi|^2``."""
        return sum(x * x for x in self.xi)

    @cached_property
    def b_num_norm2(self) -> int:
        return sum(x * x for x in self.b_num)


    @cached_property
    def b_norm2(self) -> Fraction:
        """``|b|^2``, the scalar by which the sub-Laplacian acts on this mode."""
        return Fraction(self.b_num_norm2, self.denom2)

    def is_kernel(self) -> bool:
        return not any(self.b_num)

    def symbol(self) -> list[GaussianRational]:
        """``(i b_1, ..., i b_n)``, the action of the ``L_j``."""
        return [GaussianRational(0, x) for x in self.b]

    def is_witness(self, nu: int) -> bool:
        """Strict small-divisor inequality ``0 < |b|^2 < (1 + lam)^(-2 nu)``."""
        s = self.b_num_norm2
        return s > 0 and s * (1 + self.lam) ** (2 * nu) < self.denom2

    def threshold(self, nu: int) -> Fraction:
        return Fraction(1, (1 + self.lam) ** (2 * nu))


@dataclass(frozen=True)
class ModeForm:
    mode: Mode
    form: InvariantForm

    def __post_init__(self):
        if self.form.n != self.mode.n:
            raise ValueError("form and mode have different rank")


def mode_differential(m: Mode, q: int) -> ExactMatrix:
    """Matrix of the differential from degree q to q+1 at mode m."""
    return koszul_matrix(m.symbol(), q)


def apply_mode_differential(m: Mode, u: InvariantForm) -> InvariantForm:
    M = mode_differential(m, u.degree)
    return InvariantForm.from_vector(u.degree + 1, u.n, M.apply(u.to_vector()))


def mode_cohomology_dims(m: Mode) -> tuple[int, ...]:
    """Cohomology of the Koszul complex at one mode, by exact ranks.

    Ranks are computed on the integer symbol ``D b`` (a nonzero rescaling of
    ``i b`` does not change any rank).
    """
    n = m.n
    if m.is_kernel():
        return binomial_dims(n)
    ranks = [rank(koszul_matrix(m.b_num, q)) for q in range(n)]
    return tuple(comb(n, q) - (ranks[q] if q < n else 0) - (ranks[q - 1] if q else 0)
                 for q in range(n + 1))


def _check_radius(R: int) -> int:
    if int(R) != R or R < 0:
        raise ValueError("truncation radius must be a nonnegative integer")
    return int(R)


def enumerate_xi(N: int, R: int) -> Iterable[tuple[int, ...]]:
    """All ``xi`` with ``|xi|_inf <= R``, lexicographically."""
    R = _check_radius(R)
    return product(range(-R, R + 1), repeat=N)


def parallel_map(fn: Callable, items: Sequence, jobs: int = 1) -> list:
    """Order-preserving map, optionally over a thread pool."""
    if jobs <= 1 or len(items) < 2:
        return [fn(x) for x in items]
    with ThreadPoolExecutor(max_workers=jobs) as pool:
        return list(pool.map(fn, items, chunksize=max(1, len(items) // (4 * jobs))))


def kernel_modes(ts: TorusStructure, R: int) -> list[Mode]:
    """Modes in the sup-norm ball of radius R annihilated by every ``L_j``."""
    out = []
    for xi in enumerate_xi(ts.N, R):
        m = ts.mode(xi)
        if m.is_kernel():
            out.append(m)
    return out


def truncated_cohomology_table(ts: TorusStructure, R: int, jobs: int = 1) -> tuple[int, ...]:
    """Total cohomology dimension in each degree over all modes of radius R."""
    modes = [ts.mode(xi) for xi in enumerate_xi(ts.N, R)]
    per_mode = parallel_map(mode_cohomology_dims, modes, jobs)
    totals = [0] * (ts.n + 1)
    for dims in per_mode:
        for q, d in enumerate(dims):
            totals[q] += d
    return tuple(totals)


def truncated_cohomology_dims(ts: TorusStructure, R: int, q: int, jobs: int = 1) -> int:
    if not 0 <= q <= ts.n:
        raise ValueError(f"degree {q} out of range for n = {ts.n}")
    return truncated_cohomology_table(ts, R, jobs)[q]


def leaf_closure(ts: TorusStructure) -> tuple[int, bool]:
    """Dimension of the closure of the leaf through the origin, and whether the leaf is closed."""
    lattice = integer_lattice_kernel(ExactMatrix(ts.A))
    closure_dim = ts.N - len(lattice)
    return closure_dim, closure_dim == ts.n


def sphere_points(N: int, lam: int) -> list[tuple[int, ...]]:
    """Integer vectors with ``|xi|^2 = lam``, lexicographically."""
    if lam < 0:
        return []
    if N == 0:
        return [()] if lam == 0 else []
    r = isqrt(lam)
    out = []
    for x in range(-r, r + 1):
        out.extend((x, *rest) for rest in sphere_points(N - 1, lam - x * x))
    return out


def eigenspace_split(ts: TorusStructure, lam: int) -> tuple[int, int, int]:
    """``(dim E, dim K, dim R)`` for the Laplace eigenvalue ``lam``."""
    pts = sphere_points(ts.N, lam)
    k = sum(1 for xi in pts if ts.mode(xi).is_kernel())
    E = len(pts)
    assert k + (E - k) == E
    return E, k, E - k


@dataclass(frozen=True)
class Witness:
    nu: int
    mode: Mode
    b_norm2: Fraction
    threshold: Fraction


@dataclass(frozen=True)
class RationalCertificate:
    """``lower_bound <= |b|^2`` for every mode with ``b != 0``.

    ``observed_min`` is the smallest nonzero ``|b|^2`` inside the truncation.
    ``complete_levels`` lists the levels nu for which the radius already
    contains every mode that could violate the bound, so an empty witness
    list at that level is a statement about all modes.
    """

    lower_bound: Fraction
    observed_min: Fraction | None
    complete_levels: tuple[int, ...]


@dataclass(frozen=True)
class SolvabilityReport:
    nu_max: int
    radius: int
    witnesses: tuple[Witness, ...]
    certificate: RationalCertificate | None = None
    modes_scanned: int = 0

    def witnesses_at(self, nu: int) -> list[Witness]:
        return [w for w in self.witnesses if w.nu == nu]


def _scan_mode(args):
    ts, xi, nu_max = args
    m = ts.mode(xi)
    if m.is_kernel():
        return m, ()
    return m, tuple(nu for nu in range(1, nu_max + 1) if m.is_witness(nu))


def solvability_profile(ts: TorusStructure, nu_max: int, R: int, jobs: int = 1) -> SolvabilityReport:
    """Every mode of radius R with ``0 < |b|^2 < (1 + lam)^(-2 nu)``, for each ``nu <= nu_max``."""
    if nu_max < 1:
        raise ValueError("nu_max must be at least 1")
    items = [(ts, xi, nu_max) for xi in enumerate_xi(ts.N, R)]
    scanned = parallel_map(_scan_mode, items, jobs)
    witnesses = []
    min_num = None
    for m, levels in scanned:
        if m.is_kernel():
            continue
        s = m.b_num_norm2
        if min_num is None or s < min_num:
            min_num = s
        for nu in levels:
            witnesses.append(Witness(nu, m, m.b_norm2, m.threshold(nu)))
    witnesses.sort(key=lambda w: (w.nu, w.mode.xi))
    D2 = ts.D2
    # |b|^2 >= 1/D^2, so a level-nu witness needs (1 + lam)^nu < D, i.e. lam < R^2 suffices
    complete = tuple(nu for nu in range(1, nu_max + 1) if (1 + R * R) ** nu >= ts.D)
    cert = RationalCertificate(Fraction(1, D2),
                               None if min_num is None else Fraction(min_num, D2),
                               complete)
    return SolvabilityReport(nu_max, R, tuple(witnesses), cert, len(items))


def koszul_homotopy(mf: ModeForm) -> ModeForm:
    """``v = sum_j L_j (iota_{L_j} f)`` for a closed form f of positive degree.

    At a mode this is contraction with ``i b``, and ``d v = -|b|^2 f``.
    """
    m, f = mf.mode, mf.form
    if f.degree == 0:
        raise ValueError("the homotopy lowers degree; f must have positive degree")
    if f.degree < f.n and not apply_mode_differential(m, f).is_zero():
        raise ValueError("form is not closed at this mode")
    return ModeForm(m, contract(m.symbol(), f))


def approximation_modes(ts: TorusStructure, denominators: Iterable[int]) -> list[Mode]:
    """Modes built from simultaneous rational approximations of the last column.

    Requires ``A = [I_n | a]`` with a single extra column.  For a denominator
    Q the mode is ``(-round(Q a_1), ..., -round(Q a_n), Q)``, whose symbol is
    the vector of approximation errors ``Q a_j - round(Q a_j)``.
    """
    n, N = ts.n, ts.N
    if N != n + 1 or any(ts.A[j][k] != (j == k) for j in range(n) for k in range(n)):
        raise ValueError("approximation modes need A = [I | a] with one extra column")
    a = [row[n] for row in ts.A]
    return [ts.mode([-round(Q * aj) for aj in a] + [Q]) for Q in denominators]


@dataclass(frozen=True)
class ChainRow:
    nu: int
    mode: Mode
    pivot: int
    coefficient_norms2: tuple[Fraction, ...]
    forcing_norm2: Fraction
    threshold: Fraction
    decay_ok: bool
    solution: InvariantForm
    solution_mass: Fraction
    lower_bound: Fraction
    floor: Fraction
    bound_ok: bool


def _chain_row(nu: int, m: Mode, q: int) -> ChainRow:
    n = m.n
    S = tuple(range(q + 1))
    b2 = [Fraction(x * x, m.denom * m.denom) for x in m.b_num]
    num2 = [x * x for x in m.b_num]
    pivot = max(S, key=lambda j: (num2[j], -j))
    I = tuple(j for j in S if j != pivot)
    # the forcing form is d(phi tau_I); solve on the integer symbol, same solution set
    sym = [GaussianRational(0, x) for x in m.b_num]
    src = InvariantForm.basis(n, I)
    f = InvariantForm.from_vector(q + 1, n, koszul_matrix(sym, q).apply(src.to_vector()))
    M = koszul_matrix(sym, q)
    u_vec = min_norm_solution(M, f.to_vector())
    if u_vec is None:
        raise ArithmeticError("mode equation unexpectedly inconsistent")
    u = InvariantForm.from_vector(q, n, u_vec)
    if InvariantForm.from_vector(q + 1, n, M.apply(u_vec)) != f:
        raise ArithmeticError("solution check failed")
    mass = sum((u.coeffs[tuple(k for k in S if k != j)].abs2()
                for j in S if tuple(k for k in S if k != j) in u.coeffs), Fraction(0))
    lower = Fraction(num2[pivot], sum(num2[j] for j in S))
    forcing = sum((b2[j] for j in range(n) if j not in I), Fraction(0))
    thr = m.threshold(nu)
    floor = Fraction(1, q + 1)
    return ChainRow(nu, m, pivot, tuple(b2), forcing, thr, forcing < thr, u, mass, lower,
                    floor, mass >= lower >= floor)


def counterexample_witness_chain(ts: TorusStructure, q: int, count: int,
                                 candidates: Iterable[Mode] | None = None,
                                 R: int | None = None) -> list[ChainRow]:
    """Table of witness modes with the solution lower bound at each.

    Candidates are scanned in order; the next row at level nu is the first
    candidate satisfying the level-nu inequality.  Without candidates the
    modes of radius R are used, sorted by eigenvalue.  Each row solves the
    mode equation ``d u = d(phi tau_I)`` in degree q exactly (minimal norm)
    and checks that the relevant coefficients of u carry mass at least
    ``|b_pivot|^2 / sum |b_j|^2 >= 1/(q+1)``, however small ``b`` is.
    """
    if q < 0 or q + 1 > ts.n:
        raise ValueError(f"need 0 <= q and q + 1 <= n = {ts.n}")
    if count < 0:
        raise ValueError("count must be nonnegative")
    if candidates is None:
        if R is None:
            raise ValueError("pass candidate modes or a truncation radius")
        candidates = sorted((ts.mode(xi) for xi in enumerate_xi(ts.N, R)),
                            key=lambda m: (m.lam, m.xi))
    rows = []
    nu = 1
    for m in candidates:
        if len(rows) >= count:
            break
        if m.is_witness(nu):
            rows.append(_chain_row(nu, m, q))
            nu += 1
    return rows

