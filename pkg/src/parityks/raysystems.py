"""Ray systems: built-in constructions, file ingestion, and basis search.

A ray is a projective point stored as a canonical primitive representative,
so parallel vectors collapse to the same ray. Orthogonal bases are exactly
the d-cliques of the orthogonality graph.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass
from fractions import Fraction
from itertools import combinations, permutations, product
from math import gcd, lcm
from pathlib import Path
from typing import Any, Dict, List, Sequence, Tuple, Union

from .errors import InputError
from .exactalg import (
    ExactMatrix,
    ExactScalar,
    PauliOperator,
    inner_product,
    parse_scalar,
    pauli_to_matrix,
)
from .gf2core import Gf2Vector

__all__ = [
    "RaySystem",
    "BasisSet",
    "canonical_ray",
    "ray_system_from_vectors",
    "build_600cell",
    "build_60_105",
    "build_e8_roots",
    "load_rays",
    "find_cliques_of_size",
    "find_bases",
]

Ray = Tuple[ExactScalar, ...]


@dataclass(frozen=True)
class RaySystem:
    """Canonical rays plus their orthogonality graph as per-ray bitsets."""

    dimension: int
    rays: Tuple[Ray, ...]
    adjacency: Tuple[int, ...]


@dataclass(frozen=True)
class BasisSet:
    dimension: int
    bases: Tuple[Tuple[int, ...], ...]

    def to_json_obj(self) -> Dict[str, Any]:
        return {"dimension": self.dimension, "bases": [list(b) for b in self.bases]}

    @classmethod
    def from_json_obj(cls, obj: Dict[str, Any]) -> "BasisSet":
        return cls(int(obj["dimension"]), tuple(tuple(int(i) for i in b) for b in obj["bases"]))


def canonical_ray(v: Sequence[ExactScalar]) -> Ray:
    """Primitive integral representative of the projective class of v.

    Scale so the first nonzero coordinate is 1, clear all denominators,
    then divide out the common content. Parallel vectors map to identical
    tuples, which makes duplicate detection a dictionary lookup.
    """
    first = next((x for x in v if not x.is_zero), None)
    if first is None:
        raise ValueError("zero vector has no projective class")
    inv = first.inverse()
    scaled = [(inv * x) for x in v]
    den = 1
    for x in scaled:
        for f in (x.a, x.b, x.c, x.d):
            den = lcm(den, f.denominator)
    nums: List[List[int]] = []
    content = 0
    for x in scaled:
        parts = [int(f * den) for f in (x.a, x.b, x.c, x.d)]
        nums.append(parts)
        content = gcd(content, *map(abs, parts))
    return tuple(
        ExactScalar(*(Fraction(p // content) for p in parts)) for parts in nums
    )


def ray_system_from_vectors(
    vectors: Sequence[Sequence[ExactScalar]],
    dimension: int,
    warn_on_merge: bool = False,
) -> RaySystem:
    """Canonicalize, collapse parallel vectors, and build the orthogonality graph."""
    index: Dict[Ray, int] = {}
    merged = 0
    for v in vectors:
        if len(v) != dimension:
            raise ValueError(f"vector of length {len(v)} in dimension-{dimension} system")
        ray = canonical_ray(tuple(v))
        if ray in index:
            merged += 1
        else:
            index[ray] = len(index)
    if merged and warn_on_merge:
        warnings.warn(f"merged {merged} parallel ray(s)", UserWarning, stacklevel=2)
    rays = tuple(index)
    n = len(rays)
    adjacency = [0] * n
    for i in range(n):
        for j in range(i + 1, n):
            if inner_product(rays[i], rays[j]).is_zero:
                adjacency[i] |= 1 << j
                adjacency[j] |= 1 << i
    return RaySystem(dimension, rays, tuple(adjacency))


def load_rays(path: Union[str, Path], dimension: int) -> RaySystem:
    """Read a ray file (see the scalar text format), with line-level errors."""
    text = Path(path).read_text(encoding="utf-8")
    vectors: List[Ray] = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        try:
            vec = tuple(parse_scalar(tok) for tok in line.split(","))
        except ValueError as exc:
            raise InputError(f"line {lineno}: {exc}") from exc
        if len(vec) != dimension:
            raise InputError(
                f"line {lineno}: dimension mismatch (got {len(vec)}, want {dimension})"
            )
        if all(x.is_zero for x in vec):
            raise InputError(f"line {lineno}: zero vector is not a ray")
        vectors.append(vec)
    return ray_system_from_vectors(vectors, dimension, warn_on_merge=True)


# ---------------------------------------------------------------------------
# Built-in systems
# ---------------------------------------------------------------------------

_EVEN_PERMS4 = tuple(
    p for p in permutations(range(4))
    if sum(p[i] > p[j] for i in range(4) for j in range(i + 1, 4)) % 2 == 0
)


def build_600cell() -> RaySystem:
    """60 rays in C^4 from the 120 vertices of the 600-cell (unit icosians)."""
    one = ExactScalar.one()
    zero = ExactScalar.zero()
    phi = ExactScalar(Fraction(1, 2), Fraction(1, 2))        # (1 + sqrt5)/2
    inv_phi = ExactScalar(Fraction(-1, 2), Fraction(1, 2))   # phi - 1
    vecs: List[Ray] = []
    for i in range(4):
        for s in (1, -1):
            vecs.append(tuple(s * one if j == i else zero for j in range(4)))
    for signs in product((1, -1), repeat=4):
        vecs.append(tuple(s * one for s in signs))
    for s1, s2, s3 in product((1, -1), repeat=3):
        base = (s1 * phi, s2 * one, s3 * inv_phi, zero)
        for perm in _EVEN_PERMS4:
            vecs.append(tuple(base[p] for p in perm))
    return ray_system_from_vectors(vecs, 4)


def _two_qubit_pauli(code: int) -> PauliOperator:
    return PauliOperator(2, Gf2Vector(2, code >> 2), Gf2Vector(2, code & 3))


def _symplectic(p: int, q: int) -> int:
    return (((p >> 2) & q).bit_count() + ((q >> 2) & p).bit_count()) % 2


def build_60_105() -> RaySystem:
    """60 rays in C^4: joint eigenrays of the 15 maximal commuting Pauli triples."""
    triples = sorted({
        tuple(sorted((p, q, p ^ q)))
        for p in range(1, 16)
        for q in range(p + 1, 16)
        if _symplectic(p, q) == 0
    })
    assert len(triples) == 15
    eye = ExactMatrix.identity(4)
    vecs: List[Ray] = []
    for p, q, _ in triples:
        mp = pauli_to_matrix(_two_qubit_pauli(p))
        mq = pauli_to_matrix(_two_qubit_pauli(q))
        for s1, s2 in product((1, -1), repeat=2):
            proj = (eye + (mp if s1 > 0 else -mp)) * (eye + (mq if s2 > 0 else -mq))
            row = next(r for r in proj.entries if any(not x.is_zero for x in r))
            vecs.append(row)
    return ray_system_from_vectors(vecs, 4)


def build_e8_roots() -> RaySystem:
    """120 rational rays in dimension 8: the antipodal pairs of E8 roots."""
    one = ExactScalar.one()
    zero = ExactScalar.zero()
    vecs: List[Ray] = []
    for i, j in combinations(range(8), 2):
        for si, sj in product((1, -1), repeat=2):
            vecs.append(tuple(
                si * one if k == i else (sj * one if k == j else zero) for k in range(8)
            ))
    for signs in product((1, -1), repeat=8):
        if signs.count(-1) % 2 == 0:
            vecs.append(tuple(s * one for s in signs))
    return ray_system_from_vectors(vecs, 8)


# ---------------------------------------------------------------------------
# Clique search
# ---------------------------------------------------------------------------


def find_cliques_of_size(adjacency: Sequence[int], size: int) -> List[Tuple[int, ...]]:
    """All cliques of exactly `size` vertices, lexicographically ordered.

    Ordered extension over vertex bitsets: each vertex only extends with
    higher-numbered common neighbors, so every clique is emitted once.
    """
    out: List[Tuple[int, ...]] = []
    if size == 0:
        return [()]

    adj = list(adjacency)

    def extend(prefix: Tuple[int, ...], cand: int, need: int) -> None:
        while cand:
            if cand.bit_count() < need:
                return
            i = (cand & -cand).bit_length() - 1
            cand &= cand - 1
            if need == 1:
                out.append(prefix + (i,))
            else:
                nxt = cand & adj[i]
                if nxt.bit_count() >= need - 1:
                    extend(prefix + (i,), nxt, need - 1)

    extend((), (1 << len(adj)) - 1, size)
    return out


def find_bases(rs: RaySystem) -> BasisSet:
    """All orthogonal bases: d-cliques of the orthogonality graph."""
    return BasisSet(rs.dimension, tuple(find_cliques_of_size(rs.adjacency, rs.dimension)))
