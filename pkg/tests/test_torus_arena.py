from fractions import Fraction
from itertools import product
from math import comb, factorial

import pytest
from hypothesis import assume, given, strategies as st

from invcohom.exactlin import I, ExactMatrix, GaussianRational, kernel_basis, rank
from invcohom.invariant_complex import InvariantForm, contract, multi_indices
from invcohom.torus_arena import (Mode, ModeForm, TorusStructure, apply_mode_differential,
                                  approximation_modes, counterexample_witness_chain,
                                  eigenspace_split, enumerate_xi, kernel_modes, koszul_homotopy,
                                  leaf_closure, liouville_slope, mode_cohomology_dims,
                                  mode_differential, parallel_map, solvability_profile,
                                  sphere_points, truncated_cohomology_dims,
                                  truncated_cohomology_table)

from oracles import brute_kernel_modes
from strategies import small_fractions

ALPHA = Fraction(110001, 1000000)
HALF = TorusStructure([[1, Fraction(1, 2)]])
IDENT = TorusStructure([[1, 0], [0, 1]])
LIOU = TorusStructure([[1, ALPHA]])
CIRCLE = TorusStructure([[1]])


def mode_with_b(b):
    b = [Fraction(x) for x in b]
    from math import lcm
    D = lcm(*(x.denominator for x in b))
    return Mode((), tuple(int(x * D) for x in b), D)


def test_liouville_slope():
    assert liouville_slope(3) == ALPHA
    assert liouville_slope(1) == Fraction(1, 10)
    with pytest.raises(ValueError):
        liouville_slope(0)


def test_structure_validation():
    with pytest.raises(ValueError):
        TorusStructure([[1, 2], [2, 4]])
    with pytest.raises(ValueError):
        TorusStructure([[1, 2], [1]])
    with pytest.raises(TypeError):
        TorusStructure([[1.0, 0.5]])
    m = HALF.mode((3, -2))
    assert m.b == (Fraction(2),) and m.lam == 13 and m.b_norm2 == 4


# per-mode complexes

def test_mode_differential_examples():
    assert mode_differential(mode_with_b([0, 0]), 0).is_zero()
    assert mode_differential(mode_with_b([Fraction(3, 2)]), 0) == ExactMatrix([[I * Fraction(3, 2)]])
    m = mode_with_b([1, Fraction(1, 2)])
    T0, T1 = mode_differential(m, 0), mode_differential(m, 1)
    assert T0 == ExactMatrix([[I], [I * Fraction(1, 2)]])
    assert T1 == ExactMatrix([[-I * Fraction(1, 2), I]])
    assert (T1 @ T0).is_zero()


def test_mode_cohomology_examples():
    assert mode_cohomology_dims(mode_with_b([1, Fraction(1, 2)])) == (0, 0, 0)
    assert mode_cohomology_dims(mode_with_b([0, 0])) == (1, 2, 1)
    assert mode_cohomology_dims(mode_with_b([5])) == (0, 0)


@given(st.lists(small_fractions, min_size=1, max_size=4))
def test_mode_d_squared_zero(b):
    m = mode_with_b(b)
    for q in range(m.n - 1):
        assert (mode_differential(m, q + 1) @ mode_differential(m, q)).is_zero()


def test_koszul_sign_convention():
    # wedge and contraction with the same vector s anticommute to (s.s) id;
    # with s = i b that is -|b|^2, and pairing with the conjugate gives +|b|^2
    m = mode_with_b([2, Fraction(1, 3), -1])
    s = m.symbol()
    sbar = [x.conjugate() for x in s]
    for q in range(1, 3):
        for J in multi_indices(3, q):
            u = InvariantForm.basis(3, J)
            eps_iota = apply_mode_differential(m, contract(s, u))
            iota_eps = contract(s, apply_mode_differential(m, u))
            assert eps_iota + iota_eps == u.scale(-m.b_norm2)
            plus = apply_mode_differential(m, contract(sbar, u)) + contract(sbar, apply_mode_differential(m, u))
            assert plus == u.scale(m.b_norm2)


# kernel modes, truncated cohomology, leaves

def test_kernel_modes_examples():
    assert [m.xi for m in kernel_modes(HALF, 4)] == [(-2, 4), (-1, 2), (0, 0), (1, -2), (2, -4)]
    assert [m.xi for m in kernel_modes(IDENT, 3)] == [(0, 0)]
    assert [m.xi for m in kernel_modes(LIOU, 4)] == [(0, 0)]


def test_truncated_dims_examples():
    assert truncated_cohomology_dims(HALF, 4, 0) == 5
    assert truncated_cohomology_dims(HALF, 4, 1) == 5
    assert truncated_cohomology_dims(IDENT, 2, 1) == 2
    assert truncated_cohomology_dims(LIOU, 4, 1) == 1
    with pytest.raises(ValueError):
        truncated_cohomology_dims(HALF, 4, 2)
    with pytest.raises(ValueError):
        truncated_cohomology_table(HALF, -1)


def test_leaf_closure_examples():
    assert leaf_closure(HALF) == (1, True)
    assert leaf_closure(LIOU) == (1, True)
    assert leaf_closure(IDENT) == (2, True)
    # rational directions always close up: the lattice kernel has rank N - n
    assert leaf_closure(TorusStructure([[1, 0, Fraction(1, 2)]])) == (1, True)


def test_eigenspace_examples():
    for ts in (HALF, IDENT, LIOU):
        assert eigenspace_split(ts, 0) == (1, 1, 0)
    assert sorted(sphere_points(2, 5)) == sorted([(1, 2), (1, -2), (-1, 2), (-1, -2),
                                                  (2, 1), (2, -1), (-2, 1), (-2, -1)])
    assert eigenspace_split(HALF, 5) == (8, 2, 6)
    assert eigenspace_split(IDENT, 1) == (4, 0, 4)
    assert eigenspace_split(HALF, 3) == (0, 0, 0)


@st.composite
def torus_structures(draw):
    N = draw(st.integers(1, 3))
    n = draw(st.integers(1, N))
    A = [[draw(st.sampled_from([0, 0, 1, -1, Fraction(1, 2), Fraction(2, 3), 2]))
          for _ in range(N)] for _ in range(n)]
    assume(rank(ExactMatrix(A)) == n)
    return TorusStructure(A)


@given(torus_structures(), st.integers(0, 2))
def test_tensor_formula(ts, R):
    kernel = kernel_modes(ts, R)
    assert [m.xi for m in kernel] == brute_kernel_modes(ts.A, R)
    table = truncated_cohomology_table(ts, R)
    assert table == tuple(len(kernel) * comb(ts.n, q) for q in range(ts.n + 1))


@given(torus_structures(), st.sampled_from([Fraction(1, 3), Fraction(2), Fraction(5, 7)]))
def test_scaling_invariance(ts, c):
    sc = ts.scaled(c)
    assert [m.xi for m in kernel_modes(sc, 2)] == [m.xi for m in kernel_modes(ts, 2)]
    assert leaf_closure(sc) == leaf_closure(ts)
    assert truncated_cohomology_table(sc, 1) == truncated_cohomology_table(ts, 1)
    for xi in enumerate_xi(ts.N, 1):
        assert mode_cohomology_dims(sc.mode(xi)) == mode_cohomology_dims(ts.mode(xi))


@given(torus_structures(), st.integers(0, 12))
def test_eigenspace_split_sums(ts, lam):
    E, K, R = eigenspace_split(ts, lam)
    assert K + R == E
    assert E == sum(1 for xi in enumerate_xi(ts.N, 4) if sum(x * x for x in xi) == lam)


def test_parallel_map_preserves_order():
    items = list(range(50))
    assert parallel_map(lambda x: x * x, items, 4) == [x * x for x in items]
    assert truncated_cohomology_table(HALF, 6, jobs=4) == truncated_cohomology_table(HALF, 6)


# solvability profile

def _witness_oracle(A, nu_max, R):
    """All (nu, xi) with 0 < |b|^2 < (1+lam)^(-2 nu), by direct Fraction arithmetic."""
    out = []
    for xi in product(range(-R, R + 1), repeat=len(A[0])):
        b = [sum(Fraction(a) * x for a, x in zip(row, xi)) for row in A]
        s = sum(x * x for x in b)
        lam = sum(x * x for x in xi)
        for nu in range(1, nu_max + 1):
            if 0 < s < Fraction(1, (1 + lam) ** (2 * nu)):
                out.append((nu, xi))
    return sorted(out)


def test_profile_rational_line():
    rep = solvability_profile(HALF, 2, 100)
    assert rep.witnesses == ()
    assert rep.certificate.lower_bound == Fraction(1, 4)
    assert rep.certificate.observed_min == Fraction(1, 4)
    assert rep.certificate.complete_levels == (1, 2)
    assert rep.modes_scanned == 201 ** 2


def test_profile_circle_has_no_witnesses():
    assert solvability_profile(CIRCLE, 3, 50).witnesses == ()


def test_profile_rational_witness_exists_below_denominator():
    # |b|^2 = 1/9 < 1/4 at xi = (0, 1): rational slopes can have low-level witnesses
    rep = solvability_profile(TorusStructure([[1, Fraction(1, 3)]]), 1, 2)
    assert (0, 1) in [w.mode.xi for w in rep.witnesses]


def test_profile_liouville_line_matches_oracle():
    rep = solvability_profile(LIOU, 2, 100, jobs=2)
    got = [(w.nu, w.mode.xi) for w in rep.witnesses]
    assert got == _witness_oracle([[1, ALPHA]], 2, 100)
    assert got == [(1, (-1, 9)), (1, (0, -1)), (1, (0, 1)), (1, (1, -9)), (2, (0, -1)), (2, (0, 1))]
    for w in rep.witnesses:
        assert 0 < w.b_norm2 < w.threshold


def test_near_miss_mode_is_not_a_witness():
    m = LIOU.mode((11, -100))
    assert m.b == (Fraction(-1, 10000),)
    assert m.b_norm2 == Fraction(1, 10 ** 8)
    assert m.threshold(1) == Fraction(1, 102454884)
    assert not m.is_witness(1)


def test_profile_rejects_bad_level():
    with pytest.raises(ValueError):
        solvability_profile(HALF, 0, 3)


# homotopy

def test_homotopy_examples():
    zero = mode_with_b([0, 0])
    f = InvariantForm(1, 2, {(0,): 3})
    assert koszul_homotopy(ModeForm(zero, f)).form.is_zero()

    m = mode_with_b([2])
    c = GaussianRational(Fraction(1, 3), 2)
    v = koszul_homotopy(ModeForm(m, InvariantForm(1, 1, {(0,): c}))).form
    assert v == InvariantForm(0, 1, {(): I * 2 * c})
    assert apply_mode_differential(m, v) == InvariantForm(1, 1, {(0,): -4 * c})

    m = mode_with_b([1, Fraction(1, 2)])
    f = InvariantForm(1, 2, {(0,): I, (1,): I * Fraction(1, 2)})
    v = koszul_homotopy(ModeForm(m, f)).form
    assert apply_mode_differential(m, v) == f.scale(Fraction(-5, 4))


def test_homotopy_rejects_non_closed_and_degree_zero():
    m = mode_with_b([1, Fraction(1, 2)])
    with pytest.raises(ValueError, match="not closed"):
        koszul_homotopy(ModeForm(m, InvariantForm(1, 2, {(0,): I * Fraction(1, 2), (1,): -I})))
    with pytest.raises(ValueError):
        koszul_homotopy(ModeForm(m, InvariantForm(0, 2, {(): 1})))
    with pytest.raises(ValueError):
        ModeForm(m, InvariantForm(0, 3))


@given(st.sampled_from([HALF, IDENT, LIOU, TorusStructure([[1, 2, 0], [0, 1, Fraction(1, 3)]])]),
       st.data())
def test_homotopy_identity(ts, data):
    xi = data.draw(st.tuples(*[st.integers(-10, 10)] * ts.N))
    m = ts.mode(xi)
    q = data.draw(st.integers(1, ts.n))
    g = InvariantForm.from_vector(q - 1, ts.n, [data.draw(small_fractions)
                                                for _ in multi_indices(ts.n, q - 1)])
    f = apply_mode_differential(m, g)
    v = koszul_homotopy(ModeForm(m, f)).form
    assert apply_mode_differential(m, v) + f.scale(m.b_norm2) == InvariantForm(q, ts.n)


# witness chain

PAIR_ALPHA = liouville_slope(8)
PAIR = TorusStructure([[1, 0, PAIR_ALPHA], [0, 1, PAIR_ALPHA]])
DENOMS = [10 ** factorial(j) for j in range(1, 8)]


def test_approximation_modes():
    (m,) = approximation_modes(TorusStructure([[1, ALPHA]]), [100])
    assert m.xi == (-11, 100)
    with pytest.raises(ValueError):
        approximation_modes(IDENT, [10])


def test_chain_on_liouville_pair():
    rows = counterexample_witness_chain(PAIR, 1, 3, approximation_modes(PAIR, DENOMS))
    assert [r.nu for r in rows] == [1, 2, 3]
    assert [r.mode.xi[2] for r in rows] == [10 ** 6, 10 ** 120, 10 ** 5040]
    for r in rows:
        m = r.mode
        b = [PAIR_ALPHA * m.xi[2] + m.xi[0], PAIR_ALPHA * m.xi[2] + m.xi[1]]
        assert m.b == tuple(b)
        # independent check of the inequality and of the decay of the forcing term
        assert 0 < b[0] ** 2 + b[1] ** 2 < Fraction(1, (1 + m.lam) ** (2 * r.nu))
        # f = d(phi tau_I) keeps only the coefficient outside I
        assert r.coefficient_norms2 == (b[0] ** 2, b[1] ** 2)
        assert r.forcing_norm2 == b[r.pivot] ** 2
        assert r.decay_ok and r.forcing_norm2 < r.threshold
        # the solution solves d u = f with f = d(phi tau_I)
        sym = [GaussianRational(0, x) for x in m.b_num]
        f = apply_mode_differential(Mode((), m.b_num, 1), InvariantForm.basis(2, (1 - r.pivot,)))
        assert apply_mode_differential(Mode((), m.b_num, 1), r.solution) == f
        # minimal norm: orthogonal to the closed 1-forms (multiples of the symbol)
        u = r.solution.to_vector()
        assert sum((a * s.conjugate() for a, s in zip(u, sym)), GaussianRational(0)) == 0
        assert r.solution_mass == sum((x.abs2() for x in u), Fraction(0))
        assert r.lower_bound == Fraction(1, 2) == r.floor
        assert r.solution_mass >= Fraction(1, 2) and r.bound_ok


def test_chain_skips_non_witness_candidates():
    # the first two convergents fail the level-1 inequality
    cands = approximation_modes(PAIR, DENOMS[:2])
    assert not any(m.is_witness(1) for m in cands)
    assert counterexample_witness_chain(PAIR, 1, 3, cands) == []


def test_chain_rational_is_empty():
    assert counterexample_witness_chain(HALF, 0, 3, R=30) == []
    assert counterexample_witness_chain(IDENT, 1, 2, R=10) == []


def test_chain_single_field():
    ts = TorusStructure([[1, PAIR_ALPHA]])
    rows = counterexample_witness_chain(ts, 0, 3, approximation_modes(ts, DENOMS))
    assert [r.nu for r in rows] == [1, 2, 3]
    for r in rows:
        # L u = L phi has the unique solution u = phi
        assert r.solution == InvariantForm(0, 1, {(): 1})
        assert r.solution_mass == r.lower_bound == r.floor == 1
        assert r.forcing_norm2 == r.mode.b_norm2 < r.threshold


def test_chain_argument_errors():
    with pytest.raises(ValueError):
        counterexample_witness_chain(LIOU, 1, 3, R=5)
    with pytest.raises(ValueError):
        counterexample_witness_chain(LIOU, 0, 3)
