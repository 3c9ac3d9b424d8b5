"""Tests for weight distributions, MacWilliams duals, and coset tallies.

Oracles here are deliberately naive: full enumeration of spans and cosets,
and the character-sum definition of the Krawtchouk kernel. The module under
test must agree with them exactly.
"""

import random
from math import comb

import pytest

from parityks.budget import Budget
from parityks.errors import BudgetError, CapError, InvariantError
from parityks.gf2core import Gf2Matrix, Gf2Vector, dual_basis, row_reduce
from parityks.weightdist import (
    WeightDistribution,
    coset_distribution,
    exhaustive_distribution,
    krawtchouk,
    macwilliams_transform,
)


# ---------------------------------------------------------------------------
# Oracles (frozen; do not "optimize" these)
# ---------------------------------------------------------------------------


def oracle_span(bits_list):
    """All span elements as ints, as a set."""
    out = {0}
    for b in bits_list:
        out |= {x ^ b for x in out}
    return out


def oracle_tally(words, n):
    counts = [0] * (n + 1)
    for w in words:
        counts[w.bit_count()] += 1
    return tuple(counts)


def oracle_coset_tally(bits_list, offset_bits, n):
    return oracle_tally({x ^ offset_bits for x in oracle_span(bits_list)}, n)


def oracle_krawtchouk(n, j, i):
    """Character sum over all words of weight j against a fixed v of weight i."""
    v = (1 << i) - 1
    total = 0
    for x in range(1 << n):
        if x.bit_count() == j:
            total += -1 if (x & v).bit_count() & 1 else 1
    return total


def random_independent_basis(rng, n, k):
    """k independent vectors of length n (requires k <= n)."""
    while True:
        rows = [Gf2Vector(n, rng.getrandbits(n) | 1 << rng.randrange(n)) for _ in range(k)]
        _, rank, _ = row_reduce(Gf2Matrix.from_rows(rows)) if rows else (None, 0, None)
        if rank == k:
            return rows


def vectors(n, *bits):
    return [Gf2Vector(n, b) for b in bits]


# ---------------------------------------------------------------------------
# WeightDistribution type
# ---------------------------------------------------------------------------


def test_distribution_validates_shape_and_sign():
    with pytest.raises(ValueError):
        WeightDistribution(3, (1, 0, 0))
    with pytest.raises(ValueError):
        WeightDistribution(2, (1, -1, 0))


def test_distribution_accessors():
    d = WeightDistribution(3, (1, 0, 3, 0))
    assert d.total == 4
    assert d[2] == 3
    assert d.nonzero_items() == [(0, 1), (2, 3)]


def test_distribution_json_round_trip_uses_decimal_strings():
    big = 2853536011543567360
    d = WeightDistribution(4, (1, 0, big, 0, 2))
    obj = d.to_json_obj()
    assert obj == {"n": 4, "counts": [[0, "1"], [2, str(big)], [4, "2"]]}
    assert WeightDistribution.from_json_obj(obj) == d


# ---------------------------------------------------------------------------
# Krawtchouk kernel
# ---------------------------------------------------------------------------


def test_krawtchouk_row_zero_and_column_zero():
    for n in range(0, 12):
        for i in range(n + 1):
            assert krawtchouk(n, 0, i) == 1
        for j in range(n + 1):
            assert krawtchouk(n, j, 0) == comb(n, j)


def test_krawtchouk_matches_character_sum():
    for n in range(1, 9):
        for j in range(n + 1):
            for i in range(n + 1):
                assert krawtchouk(n, j, i) == oracle_krawtchouk(n, j, i)


def test_krawtchouk_alternating_sum_vanishes():
    # sum_j K_j(i) = 0 for i > 0: character sum over the whole cube.
    assert sum(krawtchouk(4, j, 1) for j in range(5)) == 0
    for i in range(1, 7):
        assert sum(krawtchouk(6, j, i) for j in range(7)) == 0


def test_krawtchouk_rejects_out_of_range():
    with pytest.raises(ValueError):
        krawtchouk(4, 5, 0)
    with pytest.raises(ValueError):
        krawtchouk(4, 0, -1)


# ---------------------------------------------------------------------------
# Exhaustive distributions
# ---------------------------------------------------------------------------


def test_exhaustive_empty_basis_is_origin_spike():
    d = exhaustive_distribution([], length=5)
    assert d.counts == (1, 0, 0, 0, 0, 0)


def test_exhaustive_full_space_is_binomial():
    n = 9
    d = exhaustive_distribution([Gf2Vector.unit(n, i) for i in range(n)])
    assert d.counts == tuple(comb(n, i) for i in range(n + 1))


def test_exhaustive_matches_oracle_on_random_spans():
    rng = random.Random(20260815)
    for _ in range(60):
        n = rng.randrange(1, 14)
        k = rng.randrange(0, min(n, 9) + 1)
        basis = random_independent_basis(rng, n, k)
        d = exhaustive_distribution(basis, length=n)
        assert d.counts == oracle_tally(oracle_span([v.bits for v in basis]), n)
        assert d.total == 1 << k


def test_exhaustive_offset_matches_coset_oracle():
    rng = random.Random(4)
    for _ in range(40):
        n = rng.randrange(1, 12)
        k = rng.randrange(0, min(n, 8) + 1)
        basis = random_independent_basis(rng, n, k)
        off = rng.getrandbits(n)
        d = exhaustive_distribution(basis, length=n, offset=Gf2Vector(n, off))
        assert d.counts == oracle_coset_tally([v.bits for v in basis], off, n)


def test_exhaustive_cap_refuses_then_override_allows():
    basis = [Gf2Vector.unit(6, i) for i in range(5)]
    with pytest.raises(CapError):
        exhaustive_distribution(basis, cap=4)
    assert exhaustive_distribution(basis, cap=5).total == 32


def test_exhaustive_respects_expired_time_budget():
    basis = [Gf2Vector.unit(20, i) for i in range(18)]
    budget = Budget(time_limit_s=0.0)
    with pytest.raises(BudgetError):
        exhaustive_distribution(basis, budget=budget)


# ---------------------------------------------------------------------------
# MacWilliams transform
# ---------------------------------------------------------------------------


def test_transform_full_space_gives_zero_code():
    n = 7
    full = WeightDistribution(n, tuple(comb(n, i) for i in range(n + 1)))
    dual = macwilliams_transform(full, dim=n)
    assert dual.counts == (1,) + (0,) * n


def test_transform_repetition_code_gives_even_weight_code():
    rep = WeightDistribution(3, (1, 0, 0, 1))
    assert macwilliams_transform(rep, dim=1).counts == (1, 0, 3, 0)


def test_transform_matches_exhaustive_dual_tally():
    rng = random.Random(99)
    for _ in range(60):
        n = rng.randrange(1, 15)
        k = rng.randrange(0, n + 1)
        basis = random_independent_basis(rng, n, k)
        dist = exhaustive_distribution(basis, length=n)
        dual = macwilliams_transform(dist, dim=k)
        assert dual.counts == exhaustive_distribution(dual_basis(basis, n), length=n).counts
        assert dual.total == 1 << (n - k)


def test_transform_is_an_involution():
    rng = random.Random(7)
    for _ in range(40):
        n = rng.randrange(1, 15)
        k = rng.randrange(0, n + 1)
        dist = exhaustive_distribution(random_independent_basis(rng, n, k), length=n)
        assert macwilliams_transform(macwilliams_transform(dist, k), n - k) == dist


def test_transform_rejects_non_code_distribution():
    # (1,3,0,0) is not the distribution of any linear code of dim 2.
    with pytest.raises(InvariantError):
        macwilliams_transform(WeightDistribution(3, (1, 3, 0, 0)), dim=2)


# ---------------------------------------------------------------------------
# Coset distributions
# ---------------------------------------------------------------------------


def test_coset_trivial_code_is_spike_at_offset_weight():
    d = coset_distribution([], Gf2Vector(6, 0b101100))
    assert d.counts == (0, 0, 0, 1, 0, 0, 0)


def test_coset_even_weight_code_odd_offset():
    even4 = vectors(4, 0b0011, 0b0110, 0b1100)
    d = coset_distribution(even4, Gf2Vector(4, 0b1000))
    assert d.counts == (0, 4, 0, 4, 0)


def test_coset_delegates_when_offset_in_code():
    even4 = vectors(4, 0b0011, 0b0110, 0b1100)
    d = coset_distribution(even4, Gf2Vector(4, 0b0110))
    assert d.counts == (1, 0, 6, 0, 1)


def test_coset_even_code_even_offset_outside_code():
    # D spanned by 1100 and 0011; offset 1010 is even but not in D, and the
    # all-ones vector lies in the dual yet is orthogonal to the offset.
    basis = vectors(4, 0b1100, 0b0011)
    d = coset_distribution(basis, Gf2Vector(4, 0b1010))
    assert d.counts == oracle_coset_tally([0b1100, 0b0011], 0b1010, 4)


def test_coset_matches_oracle_500_random_trials():
    rng = random.Random(20260815)
    for _ in range(500):
        n = rng.randrange(1, 17)
        k = rng.randrange(0, min(n, 8) + 1)
        basis = random_independent_basis(rng, n, k)
        off = rng.getrandbits(n)
        d = coset_distribution(basis, Gf2Vector(n, off))
        assert d.counts == oracle_coset_tally([v.bits for v in basis], off, n)
        assert d.total == 1 << k


def test_coset_accepts_dependent_generating_set():
    # Span semantics, not multiset: a repeated generator must not change the tally.
    basis = vectors(4, 0b0011, 0b0110, 0b0101)
    d = coset_distribution(basis, Gf2Vector(4, 0b1000))
    assert d.total == 4
    assert d.counts == oracle_coset_tally([0b0011, 0b0110], 0b1000, 4)
