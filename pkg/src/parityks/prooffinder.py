"""Constraint systems and parity-proof search.

A constraint is a set of commuting observables with eigenvalues in {-1, +1}
whose product is +I or -I. A parity proof is a set of constraints in which
every observable occurs an even number of times while an odd number of the
selected constraints have product -I; no assignment of +-1 values to the
observables can satisfy all of them, which is the contradiction the proof
exhibits. Such subsets are exactly the solutions x of H'x = (0,...,0,1)
where H is the observable/constraint incidence matrix over GF(2) and the
appended row marks the -I constraints. Counting, uniform sampling,
exhaustive listing, minimum-size search and size distributions therefore
all reduce to linear algebra on H'.

Two builders produce systems from collections of orthogonal bases: the
basis-product route (one all-minus constraint per basis, built from the d
ray reflections) and the general route (constraints assembled from the
signed projector sums O_B(lambda), matched across bases up to sign).
"""

from __future__ import annotations

from bisect import bisect_right
from collections import Counter
from dataclasses import dataclass, field
from itertools import combinations
from math import comb
from typing import (
    Callable,
    Dict,
    FrozenSet,
    Hashable,
    List,
    Mapping,
    NamedTuple,
    Optional,
    Sequence,
    Tuple,
    Union,
)

import numpy as np

from .budget import Budget
from .errors import BudgetError, CapError, InputError, InvariantError
from .exactalg import (
    ExactMatrix,
    ObservableInterner,
    OrthogonalBasis,
    PauliOperator,
    mermin_square,
    observable_from_basis,
    pauli_product,
    pauli_to_matrix,
    ray_reflection,
)
from .gf2core import (
    AffineSolutionSet,
    Gf2Matrix,
    Gf2Vector,
    enumerate_span,
    kernel_basis,
    sample_coset,
    solve_affine,
)
from .raysystems import BasisSet, RaySystem
from .weightdist import SPAN_CAP, WeightDistribution, coset_distribution

__all__ = [
    "Constraint",
    "ConstraintSystem",
    "BasisFamilyEntry",
    "BasisConstraintFamily",
    "ParityProof",
    "build_constraint_system",
    "build_ray_constraints",
    "build_general_constraints",
    "build_mermin_constraints",
    "solve_proof_space",
    "count_proofs",
    "enumerate_proofs",
    "sample_proof",
    "min_weight_proofs",
    "proof_size_distribution",
    "validate_proof",
    "proof_to_json_obj",
]

# Streaming more than 2^24 proofs without a time-limited budget is refused.
ENUMERATION_CAP_LOG2 = 24
# Implicit memory allowance for the meet-in-the-middle store when no budget
# is supplied, in MiB.
_DEFAULT_MITM_MEM_MB = 4096.0
_MITM_STORE_BYTES_PER_ENTRY = 20  # raw + sorted syndromes (8+8) and order (4)


class Constraint(NamedTuple):
    """One constraint: its observable labels and its product sign."""

    observables: FrozenSet[Hashable]
    sign: int


@dataclass(frozen=True)
class ParityProof:
    """A validated selection of constraints forming a parity proof."""

    constraints: Tuple[int, ...]
    observables: Tuple[Hashable, ...]
    minus_count: int

    @property
    def size(self) -> int:
        return len(self.constraints)


@dataclass(frozen=True)
class BasisFamilyEntry:
    """Per-basis record of the admissible lambdas and the space they span.

    ``lambdas`` lists the retained exponent vectors (first coordinate zero,
    nonzero, matched across bases), ``observable_ids`` / ``epsilons`` give
    the interned identity and sign flip of each O_B(lambda), and ``u_basis``
    spans the subsets T with sum zero, as characteristic vectors over the
    positions of ``lambdas``.
    """

    basis_index: int
    lambdas: Tuple[Gf2Vector, ...]
    observable_ids: Tuple[int, ...]
    epsilons: Tuple[int, ...]
    u_basis: Tuple[Gf2Vector, ...]

    @property
    def n_B(self) -> int:
        return len(self.lambdas)


@dataclass(frozen=True)
class BasisConstraintFamily:
    """All per-basis constraint spaces produced by the general builder."""

    dimension: int
    entries: Tuple[BasisFamilyEntry, ...]


@dataclass(frozen=True)
class ConstraintSystem:
    """An immutable constraint system with its GF(2) encoding.

    ``H`` has one row per observable and one column per constraint;
    ``p`` marks the -I constraints and ``H_prime`` is ``H`` with ``p``
    appended as the last row. ``source_indices[j]`` is the position the
    j-th retained constraint had in the builder's input, so results can be
    reported against the caller's numbering even after pruning.
    ``matrices`` (optional) maps observable labels to exact matrices and
    switches on matrix-level validation.
    """

    label: str
    observables: Tuple[Hashable, ...]
    constraints: Tuple[Constraint, ...]
    H: Gf2Matrix
    p: Gf2Vector
    H_prime: Gf2Matrix
    source_indices: Tuple[int, ...]
    matrices: Optional[Mapping[Hashable, ExactMatrix]] = field(
        default=None, compare=False, repr=False
    )


def _normalize_constraints(
    constraints: Sequence[Tuple[Sequence[Hashable], int]],
) -> List[Constraint]:
    out = []
    for pos, item in enumerate(constraints):
        try:
            members, sign = item
        except (TypeError, ValueError):
            raise InputError(f"constraint {pos}: expected (observables, sign) pair")
        fs = frozenset(members)
        if not fs:
            raise InputError(f"constraint {pos}: no observables")
        if sign not in (1, -1):
            raise InputError(f"constraint {pos}: sign must be +1 or -1, got {sign!r}")
        out.append(Constraint(fs, sign))
    return out


def _prune_constraints(constraints: Sequence[Constraint]) -> List[int]:
    # A constraint containing an observable that occurs in fewer than two
    # retained constraints can never participate in a proof; dropping it can
    # expose further singletons, so iterate to the fixed point.
    active = list(range(len(constraints)))
    while True:
        counts: Counter = Counter()
        for j in active:
            counts.update(constraints[j].observables)
        kept = [
            j
            for j in active
            if all(counts[o] >= 2 for o in constraints[j].observables)
        ]
        if len(kept) == len(active):
            return kept
        active = kept


def _validate_constraint_matrices(
    constraint: Constraint,
    matrices: Mapping[Hashable, ExactMatrix],
    where: str,
) -> None:
    try:
        mats = [matrices[o] for o in sorted(constraint.observables)]
    except KeyError as exc:
        raise InputError(f"{where}: no matrix supplied for observable {exc.args[0]!r}")
    for i in range(len(mats)):
        for j in range(i + 1, len(mats)):
            if mats[i] * mats[j] != mats[j] * mats[i]:
                raise InvariantError(f"{where}: observables do not commute")
    prod = mats[0]
    for m in mats[1:]:
        prod = prod * m
    if constraint.sign == -1:
        prod = -prod
    if not prod.is_identity():
        raise InvariantError(
            f"{where}: product of observables is not {constraint.sign:+d}*I"
        )


def build_constraint_system(
    label: str,
    constraints: Sequence[Tuple[Sequence[Hashable], int]],
    matrices: Optional[Mapping[Hashable, ExactMatrix]] = None,
    validate: Optional[bool] = None,
    prune: bool = True,
) -> ConstraintSystem:
    """Assemble a constraint system from (observables, sign) pairs.

    Observable labels may be any hashable, mutually sortable values. With
    ``prune`` (default) constraints that cannot occur in any proof are
    removed before the incidence matrix is built. When ``matrices`` are
    supplied each constraint is checked exactly (commutation and product
    sign) unless ``validate=False``.
    """
    normalized = _normalize_constraints(constraints)
    if validate is None:
        validate = matrices is not None
    if validate:
        if matrices is None:
            raise InputError("validation requires observable matrices")
        for pos, c in enumerate(normalized):
            _validate_constraint_matrices(c, matrices, f"constraint {pos}")
    kept = _prune_constraints(normalized) if prune else list(range(len(normalized)))
    retained = [normalized[j] for j in kept]
    observables = tuple(sorted(set().union(*[c.observables for c in retained])
                               if retained else ()))
    index = {o: i for i, o in enumerate(observables)}
    n = len(retained)
    bit_rows = [0] * (len(observables) + 1)
    for j, c in enumerate(retained):
        for o in c.observables:
            bit_rows[index[o]] |= 1 << j
        if c.sign == -1:
            bit_rows[len(observables)] |= 1 << j
    h = Gf2Matrix.from_bit_rows(bit_rows[:-1], n)
    p = Gf2Vector(n, bit_rows[-1])
    h_prime = Gf2Matrix.from_bit_rows(bit_rows, n)
    return ConstraintSystem(
        label=label,
        observables=observables,
        constraints=tuple(retained),
        H=h,
        p=p,
        H_prime=h_prime,
        source_indices=tuple(kept),
        matrices=matrices,
    )


def _basis_tuples(bases: Union[BasisSet, Sequence[Sequence[int]]]) -> Tuple[Tuple[int, ...], ...]:
    if isinstance(bases, BasisSet):
        return bases.bases
    return tuple(tuple(b) for b in bases)


def _check_bases(basis_list: Tuple[Tuple[int, ...], ...], rs: RaySystem) -> None:
    d = rs.dimension
    for b, basis in enumerate(basis_list):
        if len(set(basis)) != d:
            raise InputError(f"basis {b}: expected {d} distinct ray indices")
        for r in basis:
            if not 0 <= r < len(rs.rays):
                raise InputError(f"basis {b}: ray index {r} out of range")


def build_ray_constraints(
    bases: Union[BasisSet, Sequence[Sequence[int]]],
    rs: RaySystem,
    label: str = "ray",
    validate: bool = False,
) -> ConstraintSystem:
    """One all-minus constraint per basis, from the d ray reflections.

    The product of the reflections through the rays of an orthogonal basis
    acts as -1 on every basis vector, so every constraint has sign -I and
    the sign row of the resulting system is all ones. Observables are the
    ray indices. With ``validate`` the reflection matrices are attached and
    every constraint is re-checked exactly (this also verifies that
    distinct rays yield distinct observables).
    """
    basis_list = _basis_tuples(bases)
    _check_bases(basis_list, rs)
    cons = [(frozenset(b), -1) for b in basis_list]
    matrices = None
    if validate:
        used = sorted(set().union(*[set(b) for b in basis_list]) if basis_list else ())
        matrices = {r: ray_reflection(rs.rays[r]) for r in used}
        interner = ObservableInterner()
        for r in used:
            interner.intern(matrices[r])
        if len(interner) != len(used):
            raise InvariantError("two rays define the same reflection observable")
    return build_constraint_system(label, cons, matrices=matrices, validate=validate)


def build_general_constraints(
    bases: Union[BasisSet, Sequence[Sequence[int]]],
    rs: RaySystem,
    mode: str = "full",
    label: Optional[str] = None,
    cap: int = 1 << 20,
    validate: bool = False,
) -> Tuple[ConstraintSystem, BasisConstraintFamily]:
    """Constraints from signed projector sums O_B(lambda), matched across bases.

    For each basis B and each nonzero lambda with first coordinate zero,
    O_B(lambda) = sum_i (-1)^(lambda_i) P_i is interned up to overall sign
    across all bases. Observables appearing in only one basis are deleted.
    The subsets T of the survivors with sum(lambda) = 0 form a GF(2) space
    U_B per basis; each nonempty T yields a constraint whose sign is the
    product of the interning sign flips of its members.

    Mode ``full`` emits one constraint per basis per nonempty T (capped at
    ``cap`` expansions per basis), so Hamming weights of solutions are
    proof sizes. Mode ``basis_columns`` emits only a basis of each U_B,
    which keeps the system small but makes solution weights meaningless as
    proof sizes. Returns the system and the per-basis family records.
    """
    if mode not in ("full", "basis_columns"):
        raise InputError(f"unknown general-constraint mode {mode!r}")
    basis_list = _basis_tuples(bases)
    _check_bases(basis_list, rs)
    d = rs.dimension
    K = [Gf2Vector(d, bits) for bits in range(2, 1 << d, 2)]
    interner = ObservableInterner()
    per_basis: List[List[Tuple[Gf2Vector, int, int]]] = []
    bases_per_oid: Dict[int, set] = {}
    for b, basis in enumerate(basis_list):
        ob = OrthogonalBasis(tuple(rs.rays[r] for r in basis))
        row = []
        for lam in K:
            oid, flipped = interner.intern(observable_from_basis(ob, lam))
            row.append((lam, oid, -1 if flipped else 1))
            bases_per_oid.setdefault(oid, set()).add(b)
        per_basis.append(row)

    entries = []
    cons: List[Tuple[FrozenSet[int], int]] = []
    sign_seen: Dict[FrozenSet[int], int] = {}
    for b, row in enumerate(per_basis):
        kept = [(lam, oid, eps) for lam, oid, eps in row if len(bases_per_oid[oid]) >= 2]
        if not kept:
            continue
        lambdas = tuple(lam for lam, _, _ in kept)
        oids = tuple(oid for _, oid, _ in kept)
        epss = tuple(eps for _, _, eps in kept)
        coord_rows = [
            Gf2Vector(
                len(kept),
                sum(1 << i for i, lam in enumerate(lambdas) if lam.bit(r)),
            )
            for r in range(d)
        ]
        u_basis = tuple(kernel_basis(Gf2Matrix.from_rows(coord_rows)))
        entries.append(BasisFamilyEntry(b, lambdas, oids, epss, u_basis))

        def emit(t: Gf2Vector) -> None:
            support = t.support()
            members = frozenset(oids[i] for i in support)
            sign = 1
            for i in support:
                sign *= epss[i]
            prev = sign_seen.setdefault(members, sign)
            if prev != sign:
                raise InvariantError(
                    "identical observable sets produced with conflicting signs"
                )
            cons.append((members, sign))

        if mode == "full":
            if (1 << len(u_basis)) > cap:
                raise CapError(
                    f"basis {b} expands to 2^{len(u_basis)} constraints in full "
                    f"mode (cap {cap}); use mode='basis_columns'"
                )
            enumerate_span(
                u_basis, lambda v, _c: emit(v) if v.bits else None
            )
        else:
            for t in u_basis:
                emit(t)

    used = sorted({o for members, _ in cons for o in members})
    matrices = {oid: interner.canonical(oid) for oid in used}
    cs = build_constraint_system(
        label or f"general-{mode}",
        cons,
        matrices=matrices,
        validate=validate,
        prune=False,
    )
    return cs, BasisConstraintFamily(dimension=d, entries=tuple(entries))


def build_mermin_constraints() -> ConstraintSystem:
    """The two-qubit 3x3 operator square as an explicit constraint system.

    Observables are numbered 0..8 in row-major grid order and kept as the
    raw tensor-product matrices; the three rows and first two columns
    multiply to +I and the last column to -I, giving six constraints whose
    unique parity proof uses all of them.
    """
    grid = mermin_square()
    ops = [op for row in grid for op in row]
    matrices = {i: pauli_to_matrix(op) for i, op in enumerate(ops)}
    contexts = [(0, 1, 2), (3, 4, 5), (6, 7, 8), (0, 3, 6), (1, 4, 7), (2, 5, 8)]
    cons = []
    for ctx in contexts:
        product = pauli_product([ops[i] for i in ctx])
        if product.x_bits.bits or product.z_bits.bits:
            raise InvariantError("operator square context is not +-I")
        cons.append((frozenset(ctx), product.sign))
    return build_constraint_system("mermin", cons, matrices=matrices, validate=True)


def solve_proof_space(cs: ConstraintSystem) -> AffineSolutionSet:
    """Solutions of H'x = (0,...,0,1): the proofs as indicator vectors."""
    target = Gf2Vector.unit(cs.H_prime.rows, cs.H_prime.rows - 1)
    return solve_affine(cs.H_prime, target)


def count_proofs(cs: ConstraintSystem) -> int:
    """Number of parity proofs: zero, or 2^k straight from the solve."""
    return solve_proof_space(cs).count()


def _combinatorial_check(cs: ConstraintSystem, indices: Sequence[int]) -> ParityProof:
    counts: Counter = Counter()
    minus = 0
    for j in indices:
        c = cs.constraints[j]
        counts.update(c.observables)
        if c.sign == -1:
            minus += 1
    odd = [o for o, k in counts.items() if k % 2]
    if odd:
        raise InvariantError(
            f"observable {min(odd)!r} occurs an odd number of times"
        )
    if minus % 2 == 0:
        raise InvariantError(f"{minus} constraints of sign -I: need an odd number")
    return ParityProof(
        constraints=tuple(indices),
        observables=tuple(sorted(counts)),
        minus_count=minus,
    )


def validate_proof(cs: ConstraintSystem, indices: Sequence[int]) -> ParityProof:
    """Independently re-check a candidate proof; returns it on success.

    Verifies even occurrence of every observable and an odd count of -I
    constraints by direct tallying, plus the exact matrix identity of every
    selected constraint when the system carries matrices.
    """
    idx = tuple(sorted(indices))
    if len(set(idx)) != len(idx):
        raise InputError("constraint indices must be distinct")
    if idx and not (0 <= idx[0] and idx[-1] < len(cs.constraints)):
        raise InputError("constraint index out of range")
    proof = _combinatorial_check(cs, idx)
    if cs.matrices is not None:
        for j in idx:
            _validate_constraint_matrices(cs.constraints[j], cs.matrices, f"constraint {j}")
    return proof


def proof_to_json_obj(cs: ConstraintSystem, proof: ParityProof) -> dict:
    """JSON-ready form of a proof, re-validated before export."""
    checked = validate_proof(cs, proof.constraints)
    return {
        "system": cs.label,
        "constraints": list(checked.constraints),
        "size": checked.size,
        "observables": list(checked.observables),
        "validated": True,
    }


def enumerate_proofs(
    cs: ConstraintSystem,
    visitor: Callable[[ParityProof], None],
    budget: Optional[Budget] = None,
    validate: bool = False,
) -> None:
    """Visit every parity proof of the system.

    Walks offset + span of the solution space in Gray-code order. Systems
    with more than 2^24 proofs are refused unless a time-limited budget is
    supplied; sampling or minimum-weight search are the practical tools at
    that scale. ``validate`` re-checks each proof before visiting it.
    """
    sol = solve_proof_space(cs)
    if not sol.consistent:
        return
    if sol.dimension > ENUMERATION_CAP_LOG2 and (
        budget is None or budget.time_limit_s is None
    ):
        raise CapError(
            f"system has 2^{sol.dimension} proofs; pass a time-limited budget "
            "to stream anyway, or use sample_proof/min_weight_proofs"
        )
    state = {"ticks": 0}

    def visit(v: Gf2Vector, _c: int) -> None:
        x = v ^ sol.offset
        indices = x.support()
        proof = (
            validate_proof(cs, indices)
            if validate
            else _combinatorial_check(cs, indices)
        )
        visitor(proof)
        state["ticks"] += 1
        if budget is not None and state["ticks"] % 4096 == 0:
            budget.check_time("proof enumeration")

    enumerate_span(sol.kernel_basis, visit, length=sol.offset.length)


def sample_proof(cs: ConstraintSystem, seed: int) -> ParityProof:
    """Uniformly sample one parity proof; deterministic in ``seed``."""
    sol = solve_proof_space(cs)
    if not sol.consistent:
        raise InputError("system has no parity proofs to sample")
    x = sample_coset(sol, seed)
    return validate_proof(cs, x.support())


def proof_size_distribution(
    cs: ConstraintSystem,
    cap: int = SPAN_CAP,
    threads: int = 1,
    budget: Optional[Budget] = None,
) -> WeightDistribution:
    """Tally proofs by constraint count without listing them.

    Computes the weight distribution of the solution coset of H'. For the
    all-minus basis-product systems this runs through the dual-enumeration
    plus transform path of ``weightdist.coset_distribution``. Solution
    weights equal proof sizes except for ``basis_columns`` systems, whose
    compressed columns make weights unrelated to sizes.
    """
    sol = solve_proof_space(cs)
    n = len(cs.constraints)
    if not sol.consistent:
        return WeightDistribution(n, (0,) * (n + 1))
    return coset_distribution(
        sol.kernel_basis, sol.offset, cap=cap, threads=threads, budget=budget
    )


# ---------------------------------------------------------------------------
# Meet in the middle
# ---------------------------------------------------------------------------


def _column_syndromes(cs: ConstraintSystem) -> List[int]:
    n = len(cs.constraints)
    syn = [0] * n
    for i, rb in enumerate(cs.H_prime.row_bits()):
        while rb:
            j = (rb & -rb).bit_length() - 1
            rb &= rb - 1
            syn[j] |= 1 << i
    return syn


def _colex_unrank(rank: int, size: int, comb_cols: List[List[int]]) -> List[int]:
    # comb_cols[i][t] = C(t, i); the largest t with C(t, i) <= rank is the
    # top element, then recurse on the remainder.
    out = []
    for i in range(size, 0, -1):
        t = bisect_right(comb_cols[i], rank) - 1
        out.append(t)
        rank -= comb_cols[i][t]
    out.reverse()
    return out


def _mask_of(indices: Sequence[int]) -> int:
    m = 0
    for i in indices:
        m |= 1 << i
    return m


def _mitm_store_bytes(n: int, w: int) -> int:
    lo = w // 2
    entries = sum(comb(n, j) for j in range(min(lo, n) + 1))
    probe_block = comb(n - 1, w - lo - 1) * 8 if w > lo else 0
    return entries * _MITM_STORE_BYTES_PER_ENTRY + probe_block


def _check_mitm_memory(n: int, w: int, budget: Optional[Budget]) -> None:
    limit_mb = _DEFAULT_MITM_MEM_MB
    if budget is not None and budget.mem_limit_mb is not None:
        limit_mb = budget.mem_limit_mb
    need = _mitm_store_bytes(n, w)
    if need <= limit_mb * (1 << 20):
        return
    feasible = 0
    for cand in range(w - 1, 0, -1):
        if _mitm_store_bytes(n, cand) <= limit_mb * (1 << 20):
            feasible = cand
            break
    raise BudgetError(
        f"meet-in-the-middle at w={w} needs about "
        f"{need / (1 << 20):.0f} MiB for its tables (limit {limit_mb:.0f} MiB); "
        f"the largest feasible w is {feasible}"
    )


def _store_sizes_for_probe(b: int, half_lo: int, w: int) -> List[int]:
    return [a for a in (b - 1, b) if 0 <= a <= half_lo and a + b <= w and a <= b]


def _mitm_array(
    n: int,
    w: int,
    col_syn: List[int],
    target: int,
    budget: Optional[Budget],
) -> set:
    half_lo, half_hi = w // 2, w - w // 2
    syn_np = np.array(col_syn, dtype=np.uint64)
    target_np = np.uint64(target)
    comb_cols = [[comb(t, i) for t in range(n + 1)] for i in range(half_hi + 1)]

    levels = [np.zeros(1, dtype=np.uint64)]
    for j in range(1, half_lo + 1):
        parts = []
        prev = levels[j - 1]
        for t in range(j - 1, n):
            c = comb_cols[j - 1][t]
            if c:
                parts.append(prev[:c] ^ syn_np[t])
        levels.append(
            np.concatenate(parts) if parts else np.empty(0, dtype=np.uint64)
        )
        if budget is not None:
            budget.check_time("meet-in-the-middle store")

    sorted_store = []
    for vals in levels:
        order = np.argsort(vals, kind="stable").astype(np.uint32)
        sorted_store.append((vals[order], order))

    found: set = set()

    def match_block(keys: np.ndarray, b: int, supports: Callable[[int], List[int]]) -> None:
        for a in _store_sizes_for_probe(b, half_lo, w):
            sa, order = sorted_store[a]
            if not len(sa):
                continue
            lo = np.searchsorted(sa, keys, side="left")
            hi = np.searchsorted(sa, keys, side="right")
            for pos in np.nonzero(hi > lo)[0].tolist():
                z_mask = _mask_of(supports(pos))
                for q in range(lo[pos], hi[pos]):
                    y = _colex_unrank(int(order[q]), a, comb_cols)
                    x = _mask_of(y) ^ z_mask
                    if x:
                        found.add(x)

    chunk = 1 << 22
    for b in range(min(half_hi, half_lo) + 1):
        vals = levels[b]
        for start in range(0, max(len(vals), 1), chunk):
            stop = min(start + chunk, len(vals))
            keys = vals[start:stop] ^ target_np
            match_block(
                keys,
                b,
                lambda pos, _b=b, _s=start: _colex_unrank(_s + pos, _b, comb_cols),
            )
            if budget is not None:
                budget.check_time("meet-in-the-middle probe")
    if half_hi > half_lo:
        b = half_hi
        prev = levels[half_lo]
        for t in range(b - 1, n):
            c = comb_cols[b - 1][t]
            if not c:
                continue
            for start in range(0, c, chunk):
                stop = min(start + chunk, c)
                keys = prev[start:stop] ^ syn_np[t] ^ target_np
                match_block(
                    keys,
                    b,
                    lambda pos, _t=t, _s=start: _colex_unrank(_s + pos, b - 1, comb_cols)
                    + [_t],
                )
                if budget is not None:
                    budget.check_time("meet-in-the-middle probe")
    return found


def _mitm_hashmap(
    n: int,
    w: int,
    col_syn: List[int],
    target: int,
    budget: Optional[Budget],
) -> set:
    half_lo, half_hi = w // 2, w - w // 2
    if budget is None and comb(n, min(half_hi, n)) > 1 << 24:
        raise BudgetError(
            "hashmap meet-in-the-middle would enumerate more than 2^24 probe "
            "subsets; supply a budget or use method='array'"
        )
    store: List[Dict[int, List[int]]] = [dict() for _ in range(half_lo + 1)]
    for a in range(half_lo + 1):
        for combo in combinations(range(n), a):
            syn = 0
            for j in combo:
                syn ^= col_syn[j]
            store[a].setdefault(syn, []).append(_mask_of(combo))
        if budget is not None:
            budget.check_time("meet-in-the-middle store")
    found: set = set()
    for b in range(half_hi + 1):
        sizes = _store_sizes_for_probe(b, half_lo, w)
        if not sizes:
            continue
        for combo in combinations(range(n), b):
            syn = target
            for j in combo:
                syn ^= col_syn[j]
            z_mask = _mask_of(combo)
            for a in sizes:
                for y_mask in store[a].get(syn, ()):
                    x = y_mask ^ z_mask
                    if x:
                        found.add(x)
        if budget is not None:
            budget.check_time("meet-in-the-middle probe")
    return found


def min_weight_proofs(
    cs: ConstraintSystem,
    w: int,
    method: Optional[str] = None,
    budget: Optional[Budget] = None,
    threads: int = 1,
) -> List[ParityProof]:
    """All parity proofs of size at most ``w``, deduplicated and sorted.

    Splits each candidate x into halves y + z: syndromes H'y of all subsets
    up to size floor(w/2) are tabulated, then subsets up to size ceil(w/2)
    probe the table for partners summing to the target. The ``array``
    method packs syndromes into 64-bit words with sorted-array lookups;
    ``hashmap`` uses plain dictionaries, works for any H' height, and
    serves as the slow reference path. Defaults to ``array`` when H' fits
    64 rows. ``threads`` is accepted for interface stability; the search
    is single-process.
    """
    del threads
    n = len(cs.constraints)
    if w <= 0 or n == 0:
        return []
    w = min(w, n)
    rows = cs.H_prime.rows
    if method is None:
        method = "array" if rows <= 64 else "hashmap"
    if method not in ("array", "hashmap"):
        raise InputError(f"unknown meet-in-the-middle method {method!r}")
    if method == "array" and rows > 64:
        raise InputError("array method requires H' to have at most 64 rows")
    col_syn = _column_syndromes(cs)
    target = 1 << (rows - 1)
    if method == "array":
        _check_mitm_memory(n, w, budget)
        found = _mitm_array(n, w, col_syn, target, budget)
    else:
        found = _mitm_hashmap(n, w, col_syn, target, budget)
    proofs = []
    for mask in found:
        indices = []
        m = mask
        while m:
            j = (m & -m).bit_length() - 1
            m &= m - 1
            indices.append(j)
        syn = 0
        for j in indices:
            syn ^= col_syn[j]
        if syn != target:
            raise InvariantError("meet-in-the-middle produced a non-solution")
        proofs.append(_combinatorial_check(cs, indices))
    proofs.sort(key=lambda pr: (pr.size, pr.constraints))
    return proofs
