"""Unit and property tests for bit-packed GF(2) linear algebra.

Brute-force oracles live at the top of this file and are deliberately
dumb: they enumerate spans and subsets directly so the fast routines
have something independent to agree with.
"""

import math
import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from parityks.gf2core import (
    AffineSolutionSet,
    Gf2Matrix,
    Gf2Vector,
    dual_basis,
    enumerate_span,
    kernel_basis,
    row_reduce,
    sample_coset,
    solve_affine,
    span_weight_histogram,
)


# ---------------------------------------------------------------------------
# Oracles


def oracle_span(bit_rows):
    """All XOR combinations of the given rows, as a set of ints."""
    out = {0}
    for r in bit_rows:
        out |= {x ^ r for x in out}
    return out


def oracle_rank(bit_rows):
    return int(math.log2(len(oracle_span(bit_rows))))


def oracle_solutions(bit_rows, ncols, target_bits):
    """All x with M x^T = target, by brute force over 2^ncols subsets."""
    sols = []
    for x in range(1 << ncols):
        syndrome = 0
        for i, row in enumerate(bit_rows):
            syndrome |= ((row & x).bit_count() & 1) << i
        if syndrome == target_bits:
            sols.append(x)
    return sols


def matrix_from_bit_rows(bit_rows, cols):
    return Gf2Matrix.from_bit_rows(bit_rows, cols)


# Pasch configuration: 6 points (rows), 4 blocks (columns), each point in
# exactly two blocks, all-minus sign row appended.
PASCH_POINT_ROWS = [0b0011, 0b0101, 0b1001, 0b0110, 0b1010, 0b1100]
PASCH_H_PRIME = PASCH_POINT_ROWS + [0b1111]

# Mermin square: 9 observables (rows) in 6 contexts (columns 0-2 rows of the
# square, columns 3-5 its columns); observable (i, j) lies in contexts i and
# 3 + j.  Sign row: only the square's third column multiplies to -I.
MERMIN_H_ROWS = [
    (1 << i) | (1 << (3 + j)) for i in range(3) for j in range(3)
]
MERMIN_H_PRIME = MERMIN_H_ROWS + [0b100000]


# ---------------------------------------------------------------------------
# Gf2Vector / Gf2Matrix basics


def test_vector_construction_and_weight():
    v = Gf2Vector.from_coords([1, 0, 1, 1])
    assert v.length == 4
    assert v.bits == 0b1101
    assert v.weight == 3
    assert v.support() == (0, 2, 3)
    assert [v.bit(i) for i in range(4)] == [1, 0, 1, 1]


def test_vector_rejects_out_of_range_bits():
    with pytest.raises(ValueError):
        Gf2Vector(3, 0b1000)


def test_vector_xor_and_dot():
    a = Gf2Vector(5, 0b10110)
    b = Gf2Vector(5, 0b00111)
    assert (a ^ b).bits == 0b10001
    assert a.dot(b) == 0
    assert a.dot(Gf2Vector(5, 0b00100)) == 1


def test_matrix_requires_uniform_row_length():
    with pytest.raises(ValueError):
        Gf2Matrix.from_rows([Gf2Vector(3, 0b101), Gf2Vector(4, 0b1)])


def test_matrix_mul_vec():
    m = matrix_from_bit_rows([0b11, 0b10], 2)
    x = Gf2Vector(2, 0b01)
    assert m.mul_vec(x).bits == 0b01


# ---------------------------------------------------------------------------
# row_reduce


def test_row_reduce_identity():
    m = Gf2Matrix.identity(2)
    reduced, rank, pivots = row_reduce(m)
    assert rank == 2
    assert pivots == [0, 1]
    assert reduced.row_bits() == [0b01, 0b10]


def test_row_reduce_zero_matrix():
    m = Gf2Matrix.zero(3, 5)
    _, rank, pivots = row_reduce(m)
    assert rank == 0
    assert pivots == []


def test_row_reduce_dependent_rows():
    # Oracle: the span of {110, 011, 101} has 4 elements, so rank is 2.
    rows = [0b110, 0b011, 0b101]
    assert len(oracle_span(rows)) == 4
    _, rank, _ = row_reduce(matrix_from_bit_rows(rows, 3))
    assert rank == oracle_rank(rows) == 2


@given(
    st.integers(1, 8).flatmap(
        lambda c: st.lists(st.integers(0, (1 << c) - 1), min_size=0, max_size=8).map(
            lambda rows: (rows, c)
        )
    )
)
def test_row_reduce_rank_matches_span_oracle(rows_cols):
    rows, cols = rows_cols
    _, rank, pivots = row_reduce(matrix_from_bit_rows(rows, cols))
    assert rank == oracle_rank(rows)
    assert len(pivots) == rank
    assert pivots == sorted(pivots)


# ---------------------------------------------------------------------------
# kernel_basis


def test_kernel_of_identity_is_trivial():
    assert kernel_basis(Gf2Matrix.identity(4)) == []


def test_kernel_of_zero_map_is_everything():
    basis = kernel_basis(Gf2Matrix.zero(1, 3))
    assert len(basis) == 3
    assert len(oracle_span([v.bits for v in basis])) == 8


@given(
    st.integers(1, 10).flatmap(
        lambda c: st.lists(st.integers(0, (1 << c) - 1), min_size=1, max_size=8).map(
            lambda rows: (rows, c)
        )
    )
)
def test_kernel_vectors_annihilate_and_count(rows_cols):
    rows, cols = rows_cols
    m = matrix_from_bit_rows(rows, cols)
    basis = kernel_basis(m)
    _, rank, _ = row_reduce(m)
    assert rank + len(basis) == cols
    for v in basis:
        assert m.mul_vec(v).bits == 0
    # Independence: the span has full size.
    assert len(oracle_span([v.bits for v in basis])) == 1 << len(basis)


# ---------------------------------------------------------------------------
# solve_affine


def test_solve_affine_parity_equation():
    m = matrix_from_bit_rows([0b11], 2)
    sol = solve_affine(m, Gf2Vector(1, 1))
    assert sol.offset is not None
    assert sol.offset.weight == 1
    assert len(sol.kernel_basis) == 1


def test_solve_affine_pasch_is_inconsistent():
    # Oracle: brute force over all 2^4 block subsets finds no solution.
    target = 1 << 6
    assert oracle_solutions(PASCH_H_PRIME, 4, target) == []
    m = matrix_from_bit_rows(PASCH_H_PRIME, 4)
    sol = solve_affine(m, Gf2Vector.unit(7, 6))
    assert sol.offset is None


def test_solve_affine_mermin_square():
    m = matrix_from_bit_rows(MERMIN_H_PRIME, 6)
    target = Gf2Vector.unit(10, 9)
    sol = solve_affine(m, target)
    assert sol.offset is not None
    all_ones = Gf2Vector.ones(6)
    members = {sol.offset.bits ^ c for c in oracle_span([v.bits for v in sol.kernel_basis])}
    assert all_ones.bits in members
    # The Mermin square admits exactly one parity proof.
    assert sol.kernel_basis == ()
    assert sol.offset == all_ones


def test_solve_affine_substitution_random():
    rng = random.Random(20260815)
    for _ in range(1000):
        cols = rng.randrange(1, 33)
        rows = rng.randrange(1, 12)
        bit_rows = [rng.getrandbits(cols) for _ in range(rows)]
        m = matrix_from_bit_rows(bit_rows, cols)
        target = Gf2Vector(rows, rng.getrandbits(rows))
        sol = solve_affine(m, target)
        if sol.offset is None:
            # Verified inconsistent: target not in the column span.
            aug = [r | (((target.bits >> i) & 1) << cols) for i, r in enumerate(bit_rows)]
            _, rank_aug, _ = row_reduce(matrix_from_bit_rows(aug, cols + 1))
            _, rank_m, _ = row_reduce(m)
            assert rank_aug == rank_m + 1
        else:
            assert m.mul_vec(sol.offset) == target
            for v in sol.kernel_basis:
                assert m.mul_vec(sol.offset ^ v) == target


def test_solve_affine_count_matches_brute_force():
    rng = random.Random(7)
    for _ in range(100):
        cols = rng.randrange(1, 11)
        rows = rng.randrange(1, 7)
        bit_rows = [rng.getrandbits(cols) for _ in range(rows)]
        target_bits = rng.getrandbits(rows)
        expected = oracle_solutions(bit_rows, cols, target_bits)
        sol = solve_affine(matrix_from_bit_rows(bit_rows, cols), Gf2Vector(rows, target_bits))
        if not expected:
            assert sol.offset is None
        else:
            got = {sol.offset.bits ^ c for c in oracle_span([v.bits for v in sol.kernel_basis])}
            assert got == set(expected)


# ---------------------------------------------------------------------------
# dual_basis


def test_dual_of_full_space_is_zero():
    basis = [Gf2Vector.unit(3, i) for i in range(3)]
    assert dual_basis(basis) == []


def test_dual_of_zero_space_is_everything():
    dual = dual_basis([], length=4)
    assert len(dual) == 4


@given(
    st.integers(1, 12).flatmap(
        lambda n: st.lists(st.integers(0, (1 << n) - 1), min_size=0, max_size=6).map(
            lambda rows: (rows, n)
        )
    )
)
@settings(max_examples=60)
def test_dual_is_involution_on_spans(rows_n):
    rows, n = rows_n
    basis = [Gf2Vector(n, r) for r in rows]
    dual = dual_basis(basis, length=n)
    span = oracle_span(rows)
    dual_span = oracle_span([v.bits for v in dual])
    assert len(span) * len(dual_span) == 1 << n
    for s in span:
        for t in dual_span:
            assert (s & t).bit_count() & 1 == 0
    double = dual_basis(dual, length=n)
    assert oracle_span([v.bits for v in double]) == span


# ---------------------------------------------------------------------------
# enumerate_span


def test_enumerate_empty_basis():
    seen = []
    enumerate_span([], lambda v, w: seen.append((v.bits, w)), length=5)
    assert seen == [(0, 0)]


def test_enumerate_gray_property():
    basis = [Gf2Vector(6, b) for b in (0b000111, 0b011100, 0b110011)]
    seen = []
    enumerate_span(basis, lambda v, w: seen.append(v.bits))
    assert len(seen) == 8
    assert len(set(seen)) == 8
    basis_bits = {b.bits for b in basis}
    for prev, cur in zip(seen, seen[1:]):
        assert prev ^ cur in basis_bits


@given(
    st.integers(1, 10).flatmap(
        lambda n: st.lists(st.integers(0, (1 << n) - 1), min_size=0, max_size=7).map(
            lambda rows: (rows, n)
        )
    )
)
@settings(max_examples=40)
def test_enumerate_visits_each_span_element_once_with_weights(rows_n):
    rows, n = rows_n
    basis = [Gf2Vector(n, r) for r in rows]
    visits = []
    enumerate_span(basis, lambda v, w: visits.append((v.bits, w)), length=n)
    assert len(visits) == 1 << len(basis)
    assert {b for b, _ in visits} == oracle_span(rows)
    for bits, w in visits:
        assert w == bits.bit_count()


def test_enumerate_distinct_at_dim_16():
    rng = random.Random(3)
    basis = []
    while len(basis) < 16:
        cand = rng.getrandbits(24)
        if oracle_rank(basis + [cand]) == len(basis) + 1:
            basis.append(cand)
    seen = set()
    enumerate_span([Gf2Vector(24, b) for b in basis], lambda v, w: seen.add(v.bits))
    assert len(seen) == 1 << 16


# ---------------------------------------------------------------------------
# span_weight_histogram (partitioned enumerate_span)


@given(
    st.integers(1, 12).flatmap(
        lambda n: st.tuples(
            st.lists(st.integers(0, (1 << n) - 1), min_size=0, max_size=8),
            st.integers(0, (1 << n) - 1),
            st.just(n),
        )
    )
)
@settings(max_examples=40, deadline=None)
def test_histogram_matches_visitor_route(rows_offset_n):
    rows, offset_bits, n = rows_offset_n
    basis = [Gf2Vector(n, r) for r in rows]
    offset = Gf2Vector(n, offset_bits)
    tally = [0] * (n + 1)

    def visit(v, w):
        tally[(v.bits ^ offset_bits).bit_count()] += 1

    enumerate_span(basis, visit, length=n)
    assert span_weight_histogram(basis, length=n, offset=offset) == tally


def test_histogram_threads_merge_consistently():
    rng = random.Random(11)
    basis = [Gf2Vector(40, rng.getrandbits(40)) for _ in range(18)]
    one = span_weight_histogram(basis, length=40, threads=1)
    four = span_weight_histogram(basis, length=40, threads=4)
    assert one == four
    assert sum(one) == 1 << 18


# ---------------------------------------------------------------------------
# sample_coset


def build_coset_dim_10():
    # 22 independent rows over 32 columns leave a kernel of dimension 10.
    rng = random.Random(99)
    bit_rows = [(1 << i) | (rng.getrandbits(10) << 22) for i in range(22)]
    m = matrix_from_bit_rows(bit_rows, 32)
    x0 = Gf2Vector(32, rng.getrandbits(32))
    return m, solve_affine(m, m.mul_vec(x0))


def test_sample_requires_consistency():
    m = matrix_from_bit_rows(PASCH_H_PRIME, 4)
    sol = solve_affine(m, Gf2Vector.unit(7, 6))
    with pytest.raises(ValueError):
        sample_coset(sol, seed=0)


def test_sample_deterministic_and_in_coset():
    m, sol = build_coset_dim_10()
    target = m.mul_vec(sol.offset)
    a = sample_coset(sol, seed=42)
    b = sample_coset(sol, seed=42)
    assert a == b
    assert m.mul_vec(a) == target


def test_sample_kernel_dim_zero_returns_offset():
    m = Gf2Matrix.identity(4)
    sol = solve_affine(m, Gf2Vector(4, 0b1010))
    assert sample_coset(sol, seed=5) == sol.offset


def test_sample_dim_one_hits_both_elements():
    m = matrix_from_bit_rows([0b11], 2)
    sol = solve_affine(m, Gf2Vector(1, 1))
    seen = {sample_coset(sol, seed=s).bits for s in range(32)}
    assert seen == {0b01, 0b10}


def test_sample_uniformity_chi_square():
    # 10^5 seeded samples over a coset of 1024 elements: every element's
    # count stays within 5 sigma of the uniform mean, and the chi-square
    # statistic stays within 5 sigma of its dof.
    m, sol = build_coset_dim_10()
    n_samples = 100_000
    counts = {}
    for seed in range(n_samples):
        v = sample_coset(sol, seed)
        counts[v.bits] = counts.get(v.bits, 0) + 1
    assert len(counts) == 1024
    mean = n_samples / 1024
    sigma = math.sqrt(n_samples * (1 / 1024) * (1 - 1 / 1024))
    for c in counts.values():
        assert abs(c - mean) <= 5 * sigma
    chi2 = sum((c - mean) ** 2 / mean for c in counts.values())
    dof = 1023
    assert abs(chi2 - dof) <= 5 * math.sqrt(2 * dof)
