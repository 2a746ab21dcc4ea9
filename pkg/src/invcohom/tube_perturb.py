"""Tube structures over a torus base and perturbed de Rham complexes.

A tube structure on ``T^d x T^m`` is fixed by m closed real 1-forms on the
base ``T^d``.  Each form is a trigonometric polynomial: a constant vector
``a`` plus finitely many modes ``eta -> c(eta)``.  Closedness at a mode
means ``c(eta)`` is parallel to ``eta``, so ``c(eta) = s eta`` and the form
differs from its constant part by ``d psi`` with ``psi(eta) = -i s``.

For a fiber frequency ``xi`` the relevant complex is ``d + i omega_xi ^``
with ``omega_xi = sum_k xi_k omega_k``.  After removing the exact part only
the constant ``a_xi = sum_k xi_k a_k`` matters, and on the base mode ``eta``
the complex is the Koszul complex of ``i (eta + a_xi)``.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from functools import cached_property
from math import comb, lcm
from typing import Mapping, Sequence

from .exactlin import (ZERO, ExactMatrix, GaussianRational, hermite_normal_form,
                       integer_lattice_kernel, kernel_basis, parse_rational, rank)
from .invariant_complex import binomial_dims, koszul_matrix
from .torus_arena import enumerate_xi, parallel_map


class ClosednessError(ValueError):
    """A mode coefficient is not parallel to its frequency."""

    def __init__(self, eta, residual):
        self.eta = tuple(eta)
        self.residual = residual
        terms = ", ".join(f"({a + 1},{b + 1}): {x}" for (a, b), x in sorted(residual.items()))
        super().__init__(f"form is not closed at mode {self.eta}; 2-form residual {{{terms}}}")


def _frac(x) -> Fraction:
    if isinstance(x, str):
        return parse_rational(x)
    if isinstance(x, float):
        raise TypeError("floats are not exact")
    return Fraction(x)


class FourierOneForm:
    """Real 1-form ``sum_l (a_l + sum_eta c_l(eta) e^{i eta.x}) dx_l`` on ``T^d``."""

    __slots__ = ("d", "constant", "modes")

    def __init__(self, d: int, constant: Sequence, modes: Mapping | None = None):
        self.d = d
        self.constant = tuple(_frac(x) for x in constant)
        if len(self.constant) != d:
            raise ValueError("constant part has the wrong length")
        table = {}
        for eta, c in (modes or {}).items():
            eta = tuple(int(e) for e in eta)
            if len(eta) != d:
                raise ValueError(f"mode {eta} has the wrong length")
            if not any(eta):
                raise ValueError("the zero mode belongs in the constant part")
            c = tuple(GaussianRational.coerce(x) for x in c)
            if len(c) != d:
                raise ValueError(f"coefficient at {eta} has the wrong length")
            if any(c):
                table[eta] = c
        for eta, c in table.items():
            neg = tuple(-e for e in eta)
            if table.get(neg, (ZERO,) * d) != tuple(x.conjugate() for x in c):
                raise ValueError(f"form is not real: coefficients at {eta} and {neg} are not conjugate")
        self.modes = dict(sorted(table.items()))

    def is_invariant(self) -> bool:
        return not self.modes

    def closedness_residual(self) -> dict[tuple[int, ...], dict[tuple[int, int], GaussianRational]]:
        """Coefficients ``eta_a c_b - eta_b c_a`` of ``d omega`` at every failing mode."""
        out = {}
        for eta, c in self.modes.items():
            res = {}
            for a in range(self.d):
                for b in range(a + 1, self.d):
                    x = c[b] * eta[a] - c[a] * eta[b]
                    if x:
                        res[(a, b)] = x
            if res:
                out[eta] = res
        return out

    def __eq__(self, other):
        if not isinstance(other, FourierOneForm):
            return NotImplemented
        return (self.d, self.constant, self.modes) == (other.d, other.constant, other.modes)

    __hash__ = None

    def __repr__(self):
        return f"FourierOneForm(d={self.d}, constant={[str(x) for x in self.constant]}, modes={len(self.modes)})"


def invariant_representative(omega: FourierOneForm) -> tuple[tuple[Fraction, ...], dict]:
    """Split ``omega = a + d psi`` with a constant.

    Returns ``(a, psi)`` where ``psi`` maps each nonzero mode to its
    coefficient.  Raises ClosednessError at the first non-closed mode.
    """
    psi = {}
    for eta, c in omega.modes.items():
        k = next(i for i, e in enumerate(eta) if e)
        s = c[k] / eta[k]
        if any(c[a] != s * eta[a] for a in range(omega.d)):
            raise ClosednessError(eta, omega.closedness_residual()[eta])
        psi[eta] = s * GaussianRational(0, -1)
    a = omega.constant
    if reconstruct(omega.d, a, psi) != omega:
        raise ArithmeticError("reconstruction identity failed")
    return a, psi


def reconstruct(d: int, a: Sequence, psi: Mapping) -> FourierOneForm:
    """The form ``a + d psi``: the coefficient at ``eta`` is ``i eta psi(eta)``."""
    modes = {eta: tuple(GaussianRational(0, e) * p for e in eta) for eta, p in psi.items()}
    return FourierOneForm(d, a, modes)


@dataclass(frozen=True)
class TubeSystem:
    omegas: tuple

    def __post_init__(self):
        if not self.omegas:
            raise ValueError("a tube system needs at least one form")
        if len({w.d for w in self.omegas}) != 1:
            raise ValueError("all forms must live on the same base torus")

    @property
    def m(self) -> int:
        return len(self.omegas)

    @property
    def d(self) -> int:
        return self.omegas[0].d

    def constants(self) -> list[tuple[Fraction, ...]]:
        """Invariant parts ``a_k``, after checking every form is closed."""
        return list(self._constants)

    @cached_property
    def _constants(self) -> tuple:
        return tuple(invariant_representative(w)[0] for w in self.omegas)

    def combined_constant(self, xi: Sequence[int]) -> tuple[Fraction, ...]:
        """``a_xi = sum_k xi_k a_k``."""
        if len(xi) != self.m:
            raise ValueError("fiber mode has the wrong length")
        out = [Fraction(0)] * self.d
        for x, a in zip(xi, self._constants):
            for l in range(self.d):
                out[l] += x * a[l]
        return tuple(out)


@dataclass(frozen=True)
class NormalizationEntry:
    k: int
    constant: tuple
    psi: dict
    residual_zero: bool


def normalization_check(ts: TubeSystem) -> list[NormalizationEntry]:
    """For each form, the potential ``psi_k`` and whether ``d psi_k = omega_k - a_k`` exactly."""
    out = []
    for k, w in enumerate(ts.omegas):
        a, psi = invariant_representative(w)
        out.append(NormalizationEntry(k, a, psi, reconstruct(w.d, a, psi) == w))
    return out


@dataclass(frozen=True)
class GammaGroup:
    generators: tuple
    rank: int


def gamma_group(ts: TubeSystem) -> GammaGroup:
    """Lattice of fiber modes ``xi`` with ``sum_k xi_k a_k`` integral.

    Solved as the integer kernel of ``[a_1 .. a_m | -I_d]`` acting on
    ``(xi, z)``; the projection to ``xi`` is injective, and its image is put
    in Hermite normal form.
    """
    consts = ts.constants()
    m, d = ts.m, ts.d
    M = [[consts[k][l] for k in range(m)] + [Fraction(-int(l == j)) for j in range(d)]
         for l in range(d)]
    kernel = integer_lattice_kernel(ExactMatrix(M))
    gens = hermite_normal_form([v[:m] for v in kernel])
    return GammaGroup(tuple(tuple(g) for g in gens), len(gens))


def in_gamma(ts: TubeSystem, xi: Sequence[int]) -> bool:
    return all(x.denominator == 1 for x in ts.combined_constant(xi))


def _base_mode_dims(shift_num: Sequence[int]) -> tuple[int, ...]:
    d = len(shift_num)
    if not any(shift_num):
        return binomial_dims(d)
    ranks = [rank(koszul_matrix(shift_num, q)) for q in range(d)]
    return tuple(comb(d, q) - (ranks[q] if q < d else 0) - (ranks[q - 1] if q else 0)
                 for q in range(d + 1))


def _integer_shifts(a_xi: Sequence[Fraction], R: int):
    """``den * (eta + a_xi)`` for every base mode eta of radius R."""
    den = lcm(*(x.denominator for x in a_xi)) if a_xi else 1
    scaled = [x.numerator * (den // x.denominator) for x in a_xi]
    for eta in enumerate_xi(len(a_xi), R):
        yield eta, tuple(den * e + s for e, s in zip(eta, scaled))


def perturbed_cohomology_table(ts: TubeSystem, xi: Sequence[int], R: int) -> tuple[int, ...]:
    """Truncated cohomology of ``d + i omega_xi ^`` in every degree."""
    a_xi = ts.combined_constant(xi)
    totals = [0] * (ts.d + 1)
    for _, shift in _integer_shifts(a_xi, R):
        for q, x in enumerate(_base_mode_dims(shift)):
            totals[q] += x
    return tuple(totals)


def perturbed_cohomology_dims(ts: TubeSystem, xi: Sequence[int], q: int, R: int) -> int:
    if not 0 <= q <= ts.d:
        raise ValueError(f"degree {q} out of range for d = {ts.d}")
    return perturbed_cohomology_table(ts, xi, R)[q]


def kernel_search(ts: TubeSystem, xi: Sequence[int], R: int) -> list[tuple[int, ...]]:
    """Base modes of radius R carrying a nonzero function killed by ``d + i omega_xi``.

    Brute force: the degree-0 Koszul matrix at each mode is tested for a
    nontrivial kernel, with no use of the lattice description.
    """
    a_xi = ts.combined_constant(xi)
    found = []
    for eta in enumerate_xi(ts.d, R):
        sym = [GaussianRational(0, e + a) for e, a in zip(eta, a_xi)]
        if kernel_basis(koszul_matrix(sym, 0)):
            found.append(tuple(eta))
    return found


@dataclass(frozen=True)
class CorollaryCheck:
    q: int
    radius: int
    lhs: int
    rhs: int

    @property
    def equal(self) -> bool:
        return self.lhs == self.rhs


def corollary_dimension_check(ts: TubeSystem, q: int, R: int, jobs: int = 1) -> CorollaryCheck:
    """Sum of perturbed dims over fiber modes vs ``#(Gamma in the ball) * C(d, q)``."""
    xis = list(enumerate_xi(ts.m, R))
    tables = parallel_map(lambda xi: perturbed_cohomology_table(ts, xi, R), xis, jobs)
    lhs = sum(t[q] for t in tables)
    rhs = sum(1 for xi in xis if in_gamma(ts, xi)) * comb(ts.d, q)
    return CorollaryCheck(q, R, lhs, rhs)
