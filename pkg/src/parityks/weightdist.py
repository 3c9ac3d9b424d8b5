"""Weight distributions of binary codes, dual codes, and cosets.

All counts are exact Python integers. The dual-side route (Krawtchouk sums
over the dual distribution) is what makes large-dimension cosets tractable:
a coset of a dimension-k code costs 2^(n-k) enumeration instead of 2^k.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from math import comb
from typing import Any, Dict, List, Optional, Sequence, Tuple

from .budget import Budget
from .errors import CapError, InvariantError
from .gf2core import Gf2Matrix, Gf2Vector, dual_basis, row_reduce, span_weight_histogram

SPAN_CAP = 44


@dataclass(frozen=True, slots=True)
class WeightDistribution:
    """Counts A_0..A_n of words per Hamming weight."""

    length: int
    counts: Tuple[int, ...]

    def __post_init__(self) -> None:
        if len(self.counts) != self.length + 1:
            raise ValueError("counts must have length n + 1")
        if any(c < 0 for c in self.counts):
            raise ValueError("counts must be non-negative")

    @property
    def total(self) -> int:
        return sum(self.counts)

    def __getitem__(self, weight: int) -> int:
        return self.counts[weight]

    def nonzero_items(self) -> List[Tuple[int, int]]:
        return [(w, c) for w, c in enumerate(self.counts) if c]

    def to_json_obj(self) -> Dict[str, Any]:
        # Counts as decimal strings: they exceed double precision well before
        # they exceed anyone's patience.
        return {"n": self.length, "counts": [[w, str(c)] for w, c in self.nonzero_items()]}

    @classmethod
    def from_json_obj(cls, obj: Dict[str, Any]) -> "WeightDistribution":
        n = int(obj["n"])
        counts = [0] * (n + 1)
        for w, c in obj["counts"]:
            counts[int(w)] = int(c)
        return cls(n, tuple(counts))


@lru_cache(maxsize=None)
def krawtchouk(n: int, j: int, i: int) -> int:
    """K_j(i; n) = sum_k (-1)^k C(i,k) C(n-i, j-k)."""
    if not (0 <= i <= n and 0 <= j <= n):
        raise ValueError("krawtchouk arguments out of range")
    return sum((-1) ** k * comb(i, k) * comb(n - i, j - k) for k in range(min(i, j) + 1))


def _reduced_basis(basis: Sequence[Gf2Vector], length: int) -> List[Gf2Vector]:
    if not basis:
        return []
    reduced, rank, _ = row_reduce(Gf2Matrix.from_rows(list(basis)))
    return [reduced.row(i) for i in range(rank)]


def _infer_length(basis: Sequence[Gf2Vector], length: Optional[int]) -> int:
    if length is None:
        if not basis:
            raise ValueError("length required for an empty basis")
        return basis[0].length
    return length


def exhaustive_distribution(
    basis: Sequence[Gf2Vector],
    length: Optional[int] = None,
    offset: Optional[Gf2Vector] = None,
    cap: int = SPAN_CAP,
    threads: int = 1,
    budget: Optional[Budget] = None,
) -> WeightDistribution:
    """Weight tally of span(basis) (or offset + span) by full enumeration.

    The basis is reduced first, so the result counts the span as a set and
    sums to 2^rank.
    """
    n = _infer_length(basis, length)
    reduced = _reduced_basis(basis, n)
    if len(reduced) > cap:
        raise CapError(f"span dimension {len(reduced)} exceeds enumeration cap {cap}")
    hist = span_weight_histogram(reduced, length=n, offset=offset, threads=threads, budget=budget)
    return WeightDistribution(n, tuple(hist))


def _krawtchouk_sum(counts: Sequence[int], n: int, w: int) -> int:
    return sum(c * krawtchouk(n, w, i) for i, c in enumerate(counts) if c)


def macwilliams_transform(dist: WeightDistribution, dim: int) -> WeightDistribution:
    """Distribution of the dual of a dimension-dim code with distribution dist.

    B_j = 2^-dim * sum_i A_i K_j(i; n). Non-integral or negative outputs mean
    the input was not the distribution of a linear code of that dimension.
    """
    n = dist.length
    denom = 1 << dim
    out = []
    for j in range(n + 1):
        num = _krawtchouk_sum(dist.counts, n, j)
        if num < 0 or num % denom:
            raise InvariantError(
                f"transform output B_{j} = {num}/{denom} is not a non-negative integer"
            )
        out.append(num // denom)
    result = WeightDistribution(n, tuple(out))
    if result.total != 1 << (n - dim):
        raise InvariantError("transform output does not sum to 2^(n - dim)")
    return result


def coset_distribution(
    kernel_basis: Sequence[Gf2Vector],
    offset: Gf2Vector,
    cap: int = SPAN_CAP,
    threads: int = 1,
    budget: Optional[Budget] = None,
) -> WeightDistribution:
    """Exact weight distribution of the coset offset + span(kernel_basis).

    Works dual-side: with D = span(kernel_basis) and a = offset outside D,
    N_w = 2^-(n-k) * [2 * sum_{v in E} K_w(wt v) - sum_{v in D-perp} K_w(wt v)]
    where E = D-perp intersected with the hyperplane orthogonal to a. When a
    lies in D the coset is D itself and the plain transform of D-perp applies.
    When the all-ones vector lies in D-perp and has odd overlap with a, E
    alone determines D-perp (complementing coordinates maps E onto its
    complement), halving the enumeration.
    """
    n = offset.length
    basis = _reduced_basis(kernel_basis, n)
    k = len(basis)
    if k == 0:
        counts = [0] * (n + 1)
        counts[offset.weight] = 1
        return WeightDistribution(n, tuple(counts))

    dual = dual_basis(basis, n)
    dots = [v.dot(offset) for v in dual]
    if not any(dots):
        dual_dist = exhaustive_distribution(dual, length=n, cap=cap, threads=threads, budget=budget)
        return macwilliams_transform(dual_dist, dim=n - k)

    ones = Gf2Vector.ones(n)
    ones_in_dual = all(b.weight % 2 == 0 for b in basis)
    pivot = ones if (ones_in_dual and ones.dot(offset) == 1) else dual[dots.index(1)]
    e_gen = [v ^ pivot if d else v for v, d in zip(dual, dots) if v != pivot]
    e_basis = _reduced_basis(e_gen, n)
    if len(e_basis) != len(dual) - 1:
        raise InvariantError("hyperplane section of the dual has unexpected dimension")

    e_dist = exhaustive_distribution(e_basis, length=n, cap=cap, threads=threads, budget=budget)
    if pivot == ones:
        dual_counts = [e_dist.counts[w] + e_dist.counts[n - w] for w in range(n + 1)]
    else:
        shifted = exhaustive_distribution(
            e_basis, length=n, offset=pivot, cap=cap, threads=threads, budget=budget
        )
        dual_counts = [e + s for e, s in zip(e_dist.counts, shifted.counts)]

    denom = 1 << (n - k)
    out = []
    for w in range(n + 1):
        num = 2 * _krawtchouk_sum(e_dist.counts, n, w) - _krawtchouk_sum(dual_counts, n, w)
        if num < 0 or num % denom:
            raise InvariantError(
                f"coset count N_{w} = {num}/{denom} is not a non-negative integer"
            )
        out.append(num // denom)
    result = WeightDistribution(n, tuple(out))
    if result.total != 1 << k:
        raise InvariantError("coset distribution does not sum to 2^dim")
    return result
