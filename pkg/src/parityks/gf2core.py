"""Bit-packed exact linear algebra over GF(2).

Vectors and matrices carry their coordinates in Python integers, one bit
per coordinate with bit i holding coordinate i.  Everything is exact and
immutable; the only mutable state in this module is thread-local scratch
inside the histogram kernel.
"""

from __future__ import annotations

import random
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Callable, List, Optional, Sequence, Tuple

import numpy as np

from .budget import Budget

__all__ = [
    "Gf2Vector",
    "Gf2Matrix",
    "AffineSolutionSet",
    "row_reduce",
    "kernel_basis",
    "solve_affine",
    "dual_basis",
    "enumerate_span",
    "span_weight_histogram",
    "sample_coset",
]


@dataclass(frozen=True, slots=True)
class Gf2Vector:
    """Binary vector of fixed length."""

    length: int
    bits: int

    def __post_init__(self) -> None:
        if self.length < 0:
            raise ValueError("length must be non-negative")
        if self.bits < 0 or self.bits >> self.length:
            raise ValueError("bits set beyond vector length")

    @classmethod
    def zero(cls, length: int) -> "Gf2Vector":
        return cls(length, 0)

    @classmethod
    def ones(cls, length: int) -> "Gf2Vector":
        return cls(length, (1 << length) - 1)

    @classmethod
    def unit(cls, length: int, index: int) -> "Gf2Vector":
        return cls(length, 1 << index)

    @classmethod
    def from_coords(cls, coords: Sequence[int]) -> "Gf2Vector":
        bits = 0
        for i, c in enumerate(coords):
            if c not in (0, 1):
                raise ValueError("coordinates must be 0 or 1")
            bits |= c << i
        return cls(len(coords), bits)

    @classmethod
    def from_support(cls, support: Sequence[int], length: int) -> "Gf2Vector":
        bits = 0
        for i in support:
            bits |= 1 << i
        return cls(length, bits)

    @property
    def weight(self) -> int:
        return self.bits.bit_count()

    def bit(self, index: int) -> int:
        if not 0 <= index < self.length:
            raise IndexError("coordinate out of range")
        return (self.bits >> index) & 1

    def support(self) -> Tuple[int, ...]:
        return tuple(i for i in range(self.length) if (self.bits >> i) & 1)

    def dot(self, other: "Gf2Vector") -> int:
        if self.length != other.length:
            raise ValueError("dot product needs equal lengths")
        return (self.bits & other.bits).bit_count() & 1

    def __xor__(self, other: "Gf2Vector") -> "Gf2Vector":
        if self.length != other.length:
            raise ValueError("xor needs equal lengths")
        return Gf2Vector(self.length, self.bits ^ other.bits)

    def to01(self) -> str:
        return "".join(str((self.bits >> i) & 1) for i in range(self.length))

    def __repr__(self) -> str:  # pragma: no cover - debugging aid
        return f"Gf2Vector({self.length}, 0b{self.bits:0{max(self.length, 1)}b})"


@dataclass(frozen=True, slots=True)
class Gf2Matrix:
    """Matrix over GF(2), stored as one Gf2Vector per row."""

    rows: int
    cols: int
    row_data: Tuple[Gf2Vector, ...]

    def __post_init__(self) -> None:
        if len(self.row_data) != self.rows:
            raise ValueError("row count mismatch")
        for r in self.row_data:
            if r.length != self.cols:
                raise ValueError("all rows must have length equal to cols")

    @classmethod
    def from_rows(cls, rows: Sequence[Gf2Vector]) -> "Gf2Matrix":
        if not rows:
            raise ValueError("from_rows needs at least one row; use zero()")
        cols = rows[0].length
        return cls(len(rows), cols, tuple(rows))

    @classmethod
    def from_bit_rows(cls, bit_rows: Sequence[int], cols: int) -> "Gf2Matrix":
        return cls(len(bit_rows), cols, tuple(Gf2Vector(cols, b) for b in bit_rows))

    @classmethod
    def zero(cls, rows: int, cols: int) -> "Gf2Matrix":
        return cls(rows, cols, tuple(Gf2Vector(cols, 0) for _ in range(rows)))

    @classmethod
    def identity(cls, n: int) -> "Gf2Matrix":
        return cls(n, n, tuple(Gf2Vector(n, 1 << i) for i in range(n)))

    def row(self, i: int) -> Gf2Vector:
        return self.row_data[i]

    def row_bits(self) -> List[int]:
        return [r.bits for r in self.row_data]

    def mul_vec(self, x: Gf2Vector) -> Gf2Vector:
        """Return m @ x^T as a vector of length `rows`."""
        if x.length != self.cols:
            raise ValueError("vector length must equal cols")
        out = 0
        for i, r in enumerate(self.row_data):
            out |= ((r.bits & x.bits).bit_count() & 1) << i
        return Gf2Vector(self.rows, out)

    def with_row_appended(self, v: Gf2Vector) -> "Gf2Matrix":
        if v.length != self.cols:
            raise ValueError("appended row must have length cols")
        return Gf2Matrix(self.rows + 1, self.cols, self.row_data + (v,))

    def transpose(self) -> "Gf2Matrix":
        cols = []
        for j in range(self.cols):
            bits = 0
            for i, r in enumerate(self.row_data):
                bits |= ((r.bits >> j) & 1) << i
            cols.append(Gf2Vector(self.rows, bits))
        return Gf2Matrix(self.cols, self.rows, tuple(cols))


@dataclass(frozen=True, slots=True)
class AffineSolutionSet:
    """Solution set of m x^T = target: offset + span(kernel_basis).

    `offset` is None exactly when the system is inconsistent; an empty
    solution set is a first-class answer, not an error.
    """

    offset: Optional[Gf2Vector]
    kernel_basis: Tuple[Gf2Vector, ...]

    @property
    def consistent(self) -> bool:
        return self.offset is not None

    @property
    def dimension(self) -> int:
        return len(self.kernel_basis)

    def count(self) -> int:
        return 0 if self.offset is None else 1 << self.dimension

    def element(self, coefficients: int) -> Gf2Vector:
        if self.offset is None:
            raise ValueError("solution set is empty")
        bits = self.offset.bits
        for i, v in enumerate(self.kernel_basis):
            if (coefficients >> i) & 1:
                bits ^= v.bits
        return Gf2Vector(self.offset.length, bits)


def _rref_bits(bit_rows: List[int], cols: int) -> Tuple[List[int], List[int]]:
    """In-place reduced row echelon form; returns (rows, pivot_columns)."""
    rows = list(bit_rows)
    pivot_cols: List[int] = []
    r = 0
    for c in range(cols):
        mask = 1 << c
        pivot = next((i for i in range(r, len(rows)) if rows[i] & mask), None)
        if pivot is None:
            continue
        rows[r], rows[pivot] = rows[pivot], rows[r]
        for i in range(len(rows)):
            if i != r and rows[i] & mask:
                rows[i] ^= rows[r]
        pivot_cols.append(c)
        r += 1
        if r == len(rows):
            break
    return rows, pivot_cols


def row_reduce(m: Gf2Matrix) -> Tuple[Gf2Matrix, int, List[int]]:
    """Reduced row echelon form, rank, and pivot column indices."""
    rows, pivot_cols = _rref_bits(m.row_bits(), m.cols)
    reduced = Gf2Matrix.from_bit_rows(rows, m.cols) if rows else Gf2Matrix.zero(0, m.cols)
    return reduced, len(pivot_cols), pivot_cols


def _kernel_from_rref(rref_rows: List[int], pivot_cols: List[int], cols: int) -> List[int]:
    pivot_set = set(pivot_cols)
    basis = []
    for f in range(cols):
        if f in pivot_set:
            continue
        bits = 1 << f
        fmask = 1 << f
        for r, pc in enumerate(pivot_cols):
            if rref_rows[r] & fmask:
                bits |= 1 << pc
        basis.append(bits)
    return basis


def kernel_basis(m: Gf2Matrix) -> List[Gf2Vector]:
    """Basis of {x : m x^T = 0}; length equals cols - rank."""
    rows, pivot_cols = _rref_bits(m.row_bits(), m.cols)
    return [Gf2Vector(m.cols, b) for b in _kernel_from_rref(rows, pivot_cols, m.cols)]


def solve_affine(m: Gf2Matrix, target: Gf2Vector) -> AffineSolutionSet:
    """Solve m x^T = target; inconsistency yields an absent offset."""
    if target.length != m.rows:
        raise ValueError("target length must equal row count")
    # Augment each row with its target bit, but never pivot on that column.
    aug = [r | (((target.bits >> i) & 1) << m.cols) for i, r in enumerate(m.row_bits())]
    rows, pivot_cols = _rref_bits_limited(aug, m.cols)
    tmask = 1 << m.cols
    for i in range(len(pivot_cols), len(rows)):
        if rows[i] & tmask:
            return AffineSolutionSet(None, ())
    offset_bits = 0
    for r, pc in enumerate(pivot_cols):
        if rows[r] & tmask:
            offset_bits |= 1 << pc
    matrix_part = [row & ~tmask for row in rows]
    kernel = _kernel_from_rref(matrix_part, pivot_cols, m.cols)
    return AffineSolutionSet(
        Gf2Vector(m.cols, offset_bits),
        tuple(Gf2Vector(m.cols, b) for b in kernel),
    )


def _rref_bits_limited(bit_rows: List[int], pivot_limit: int) -> Tuple[List[int], List[int]]:
    """RREF that only pivots on columns < pivot_limit."""
    rows = list(bit_rows)
    pivot_cols: List[int] = []
    r = 0
    for c in range(pivot_limit):
        mask = 1 << c
        pivot = next((i for i in range(r, len(rows)) if rows[i] & mask), None)
        if pivot is None:
            continue
        rows[r], rows[pivot] = rows[pivot], rows[r]
        for i in range(len(rows)):
            if i != r and rows[i] & mask:
                rows[i] ^= rows[r]
        pivot_cols.append(c)
        r += 1
        if r == len(rows):
            break
    return rows, pivot_cols


def _infer_length(basis: Sequence[Gf2Vector], length: Optional[int]) -> int:
    if length is None:
        if not basis:
            raise ValueError("length is required for an empty basis")
        length = basis[0].length
    for v in basis:
        if v.length != length:
            raise ValueError("basis vectors must share a common length")
    return length


def dual_basis(basis: Sequence[Gf2Vector], length: Optional[int] = None) -> List[Gf2Vector]:
    """Basis of the dual space span(basis)^perp."""
    n = _infer_length(basis, length)
    if not basis:
        return [Gf2Vector.unit(n, i) for i in range(n)]
    return kernel_basis(Gf2Matrix.from_rows(list(basis)))


def enumerate_span(
    basis: Sequence[Gf2Vector],
    visitor: Callable[[Gf2Vector, int], None],
    length: Optional[int] = None,
) -> None:
    """Visit every span element exactly once, in Gray-code order.

    Successive elements differ by exactly one basis vector; the Hamming
    weight handed to the visitor is maintained incrementally from the
    popcount delta of the flipped block.
    """
    n = _infer_length(basis, length)
    bits = [v.bits for v in basis]
    weights = [b.bit_count() for b in bits]
    cur = 0
    w = 0
    visitor(Gf2Vector(n, 0), 0)
    for t in range(1, 1 << len(bits)):
        i = (t & -t).bit_length() - 1
        w += weights[i] - 2 * (cur & bits[i]).bit_count()
        cur ^= bits[i]
        visitor(Gf2Vector(n, cur), w)


def _bits_to_words(bits: int, n_words: int) -> np.ndarray:
    words = np.empty(n_words, dtype=np.uint64)
    for k in range(n_words):
        words[k] = (bits >> (64 * k)) & 0xFFFFFFFFFFFFFFFF
    return words


def _histogram_partition(
    states: np.ndarray,
    low_words: np.ndarray,
    n: int,
    budget: Optional[Budget],
) -> np.ndarray:
    """Gray-walk the low coefficients over a block of prepared states.

    States are kept word-major (one contiguous array per 64-bit word) so
    each step is a scalar broadcast xor plus contiguous popcounts; per-word
    popcounts fit uint8 and their sum fits uint8/uint16 depending on n.
    """
    hist = np.zeros(n + 1, dtype=np.int64)
    n_words = states.shape[1]
    word_arrays = [np.ascontiguousarray(states[:, j]) for j in range(n_words)]
    n_streams = states.shape[0]
    wsum_dtype = np.uint8 if n <= 255 else np.uint16
    wsum = np.empty(n_streams, dtype=wsum_dtype)
    cnt = np.empty(n_streams, dtype=np.uint8)
    steps = 1 << low_words.shape[0]
    for t in range(steps):
        if t:
            i = (t & -t).bit_length() - 1
            for j in range(n_words):
                wj = low_words[i, j]
                if wj:
                    np.bitwise_xor(word_arrays[j], wj, out=word_arrays[j])
        np.bitwise_count(word_arrays[0], out=wsum, casting="unsafe")
        for j in range(1, n_words):
            np.bitwise_count(word_arrays[j], out=cnt)
            np.add(wsum, cnt, out=wsum, casting="unsafe")
        hist += np.bincount(wsum, minlength=n + 1)
        if budget is not None and t % 4096 == 0:
            budget.check_time("span weight histogram")
    return hist


def span_weight_histogram(
    basis: Sequence[Gf2Vector],
    length: Optional[int] = None,
    offset: Optional[Gf2Vector] = None,
    threads: int = 1,
    budget: Optional[Budget] = None,
) -> List[int]:
    """Exact weight tally of (offset +) span(basis).

    This is the partitioned form of enumerate_span: coefficient space is
    split into disjoint sub-spans (fixing the high coefficient bits) whose
    weight tallies are merged, so the result equals feeding every span
    element through a per-element visitor.
    """
    n = _infer_length(basis, length) if (basis or length is None) else length
    if offset is not None and offset.length != n:
        raise ValueError("offset length mismatch")
    k = len(basis)
    offset_bits = offset.bits if offset is not None else 0
    if k == 0:
        hist = [0] * (n + 1)
        hist[offset_bits.bit_count()] += 1
        return hist

    n_words = (n + 63) // 64 if n else 1
    vec_words = np.vstack([_bits_to_words(v.bits, n_words) for v in basis])

    # Streams hold the high coefficients; the Gray walk covers the low ones.
    stream_bits = min(k, 16)
    low_words = vec_words[: k - stream_bits]
    high_words = vec_words[k - stream_bits :]
    n_streams = 1 << stream_bits
    if budget is not None:
        budget.charge_memory(4 * n_streams * n_words * 8, "span weight histogram")
    states = np.empty((n_streams, n_words), dtype=np.uint64)
    states[0] = _bits_to_words(offset_bits, n_words)
    for i in range(stream_bits):
        half = 1 << i
        np.bitwise_xor(states[:half], high_words[i], out=states[half : 2 * half])

    threads = max(1, threads)
    if threads == 1 or n_streams < 2 * threads:
        hist = _histogram_partition(states, low_words, n, budget)
    else:
        chunks = np.array_split(states, threads, axis=0)
        with ThreadPoolExecutor(max_workers=threads) as pool:
            parts = list(
                pool.map(lambda c: _histogram_partition(c, low_words, n, budget), chunks)
            )
        hist = sum(parts)

    result = [int(x) for x in hist]
    if sum(result) != 1 << k:
        raise AssertionError("histogram lost span elements")
    return result


def sample_coset(sol: AffineSolutionSet, seed: int) -> Gf2Vector:
    """Uniform sample from the solution coset, deterministic per seed."""
    if sol.offset is None:
        raise ValueError("cannot sample from an empty solution set")
    k = len(sol.kernel_basis)
    coeffs = random.Random(seed).getrandbits(k) if k else 0
    return sol.element(coeffs)
