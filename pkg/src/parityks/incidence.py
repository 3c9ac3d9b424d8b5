"""Parity proofs on abstract incidence structures.

An incidence structure is a set of points together with blocks of size at
least three such that every point lies in an even number of blocks.  Points
stand for observables and blocks for constraints, so the structure is the
combinatorial skeleton of a parity proof.  This module generates the
structures arising from connected cubic graphs (points are edges, one block
per vertex), assigns free-group generator words to points by completing
blocks, and decides each structure: either no assignment of observables can
ever produce a proof, certified by a complete rewrite system that reduces
the all-blocks product word to the empty word, or a concrete multi-qubit
Pauli assignment is found by search.  Certification screens labelings in a
finite class-two quotient where triviality is linear algebra, then reads
the canonical complete system off that quotient's Cayley graph (with
Knuth-Bendix completion as construction of last resort).  Found assignments
are re-validated with exact matrix arithmetic; impossibility is only ever
reported with a certificate.
"""

import heapq
import itertools
import json
import logging
import random
from collections import Counter
from dataclasses import dataclass
from typing import (
    Callable,
    Dict,
    FrozenSet,
    Iterable,
    List,
    Optional,
    Sequence,
    Set,
    Tuple,
)

import networkx as nx

from .errors import InputError, InvariantError, PhaseError
from .exactalg import (
    PauliOperator,
    pauli_commute,
    pauli_product,
    pauli_to_matrix,
)
from .gf2core import Gf2Vector
from .prooffinder import ConstraintSystem, ParityProof, build_constraint_system, validate_proof

logger = logging.getLogger(__name__)

COMPLETE = "complete"
CAPPED = "capped"

NO_PROOF_POSSIBLE = "no_proof_possible"
PROOF_FOUND = "proof_found"
INCONCLUSIVE = "inconclusive"

Word = Tuple[int, ...]


@dataclass(frozen=True)
class IncidenceStructure:
    """Points 0..n-1 and blocks of points; every point in evenly many blocks."""

    points: Tuple[int, ...]
    blocks: Tuple[FrozenSet[int], ...]


def build_structure(n_points: int, blocks: Iterable[Iterable[int]]) -> IncidenceStructure:
    if not isinstance(n_points, int) or n_points < 0:
        raise InputError("point count must be a nonnegative integer")
    cooked: List[FrozenSet[int]] = []
    for raw in blocks:
        block = frozenset(raw)
        for p in block:
            if not isinstance(p, int) or not 0 <= p < n_points:
                raise InputError(f"unknown point {p!r} in block")
        if len(block) < 3:
            raise InputError("every block needs at least three points")
        cooked.append(block)
    if len(set(cooked)) != len(cooked):
        raise InputError("blocks must be distinct")
    occurrence = Counter(p for b in cooked for p in b)
    for p, count in occurrence.items():
        if count % 2:
            raise InputError(f"point {p} occurs in an odd number of blocks ({count}); even required")
    return IncidenceStructure(tuple(range(n_points)), tuple(cooked))


def structure_to_json_obj(inc: IncidenceStructure) -> dict:
    return {"points": len(inc.points), "blocks": [sorted(b) for b in inc.blocks]}


def structure_from_json_obj(obj: object) -> IncidenceStructure:
    if not isinstance(obj, dict) or "points" not in obj or "blocks" not in obj:
        raise InputError('structure JSON needs "points" and "blocks" keys')
    n = obj["points"]
    blocks = obj["blocks"]
    if not isinstance(n, int) or not isinstance(blocks, list):
        raise InputError('"points" must be an integer and "blocks" a list')
    for b in blocks:
        if not isinstance(b, list) or not all(isinstance(p, int) for p in b):
            raise InputError("each block must be a list of integer points")
    return build_structure(n, blocks)


def load_structure(path) -> IncidenceStructure:
    try:
        with open(path, "r", encoding="utf-8") as fh:
            obj = json.load(fh)
    except (OSError, json.JSONDecodeError) as exc:
        raise InputError(f"cannot read structure JSON: {exc}") from exc
    return structure_from_json_obj(obj)


# ---------------------------------------------------------------------------
# cubic graph generation and ingestion


def _min_encoding(m: int, nbr: Sequence[int]) -> Tuple[Tuple[int, ...], Tuple[int, ...]]:
    """Lexicographically minimal column-major adjacency encoding.

    Branch and bound over vertex placements; candidates are explored in
    ascending column order (grouped by degree as a tie break) so the first
    leaf is already a good bound and worse prefixes prune immediately.
    """
    deg = [nbr[v].bit_count() for v in range(m)]
    best_bits: Optional[List[int]] = None
    best_order: Optional[List[int]] = None
    order: List[int] = []
    placed = [False] * m
    bits: List[int] = []

    def place(k: int) -> None:
        nonlocal best_bits, best_order
        if k == m:
            if best_bits is None or bits < best_bits:
                best_bits = bits.copy()
                best_order = order.copy()
            return
        cands = []
        for v in range(m):
            if not placed[v]:
                col = tuple((nbr[v] >> order[i]) & 1 for i in range(k))
                cands.append((col, deg[v], v))
        cands.sort()
        for col, _, v in cands:
            if best_bits is not None:
                prefix = bits + list(col)
                if prefix > best_bits[: len(prefix)]:
                    break
            order.append(v)
            placed[v] = True
            bits.extend(col)
            place(k + 1)
            del bits[len(bits) - len(col):]
            placed[v] = False
            order.pop()

    place(0)
    assert best_bits is not None and best_order is not None
    return tuple(best_bits), tuple(best_order)


def _graph_key(n: int, edges: Iterable[Tuple[int, int]]) -> Tuple:
    """Isomorphism-invariant key; isolated vertices only contribute a count."""
    adj = [0] * n
    for u, v in edges:
        adj[u] |= 1 << v
        adj[v] |= 1 << u
    active = [v for v in range(n) if adj[v]]
    if not active:
        return (0, ())
    index = {v: i for i, v in enumerate(active)}
    nbr = [0] * len(active)
    for v in active:
        mask = adj[v]
        while mask:
            low = mask & -mask
            nbr[index[v]] |= 1 << index[low.bit_length() - 1]
            mask ^= low
    bits, _ = _min_encoding(len(active), nbr)
    return (len(active), bits)


def _structure_from_graph(n: int, edges: Iterable[Tuple[int, int]]) -> IncidenceStructure:
    """Canonically relabel, then take edges as points and vertices as blocks."""
    nbr = [0] * n
    for u, v in edges:
        nbr[u] |= 1 << v
        nbr[v] |= 1 << u
    _, order = _min_encoding(n, nbr)
    position = {v: i for i, v in enumerate(order)}
    relabeled = sorted(
        (min(position[u], position[v]), max(position[u], position[v])) for u, v in edges
    )
    blocks = [
        [e for e, (a, b) in enumerate(relabeled) if a == vertex or b == vertex]
        for vertex in range(n)
    ]
    return build_structure(len(relabeled), blocks)


def generate_cubic_structures(n: int) -> List[IncidenceStructure]:
    """One incidence structure per isomorphism class of connected cubic graphs.

    Completion search: repeatedly bring the smallest vertex of degree < 3 up
    to degree 3 by attaching it to later non-saturated vertices, deduplicating
    partial graphs by canonical form after each completion step.
    """
    if not isinstance(n, int) or n % 2:
        raise InputError("cubic graphs need an even vertex count")
    if not 4 <= n <= 12:
        raise InputError("vertex count must be between 4 and 12")
    frontier: Dict[Tuple, Tuple[Tuple[int, int], ...]] = {_graph_key(n, ()): ()}
    finished: Dict[Tuple, Tuple[Tuple[int, int], ...]] = {}
    while frontier:
        next_frontier: Dict[Tuple, Tuple[Tuple[int, int], ...]] = {}
        for key, edges in frontier.items():
            deg = [0] * n
            adj = [0] * n
            for u, v in edges:
                deg[u] += 1
                deg[v] += 1
                adj[u] |= 1 << v
                adj[v] |= 1 << u
            u = next((v for v in range(n) if deg[v] < 3), None)
            if u is None:
                finished.setdefault(key, edges)
                continue
            cands = [v for v in range(u + 1, n) if deg[v] < 3 and not (adj[u] >> v) & 1]
            for chosen in itertools.combinations(cands, 3 - deg[u]):
                grown = edges + tuple((u, v) for v in chosen)
                next_frontier.setdefault(_graph_key(n, grown), grown)
        frontier = next_frontier
    out = []
    for key in sorted(finished):
        edges = finished[key]
        graph = nx.Graph(list(edges))
        if graph.number_of_nodes() == n and nx.is_connected(graph):
            out.append(_structure_from_graph(n, edges))
    return out


def load_graph6(path, on_reject: Optional[Callable[[int, str], None]] = None) -> List[IncidenceStructure]:
    """Read graph6 lines, keeping connected cubic graphs as structures.

    Lines describing other graphs are reported to ``on_reject(line_number,
    reason)`` (logged by default); malformed lines raise InputError.
    """

    def reject(lineno: int, reason: str) -> None:
        if on_reject is not None:
            on_reject(lineno, reason)
        else:
            logger.warning("graph6 line %d skipped: %s", lineno, reason)

    out = []
    with open(path, "rb") as fh:
        lines = fh.read().splitlines()
    for lineno, raw in enumerate(lines, 1):
        line = raw.strip()
        if not line:
            continue
        if line.startswith(b">>graph6<<"):
            line = line[len(b">>graph6<<"):]
        try:
            graph = nx.from_graph6_bytes(line)
        except Exception as exc:
            raise InputError(f"line {lineno}: malformed graph6 ({exc})") from exc
        if any(d != 3 for _, d in graph.degree()):
            reject(lineno, "every vertex must have degree 3")
            continue
        if not nx.is_connected(graph):
            reject(lineno, "graph is not connected")
            continue
        out.append(_structure_from_graph(graph.number_of_nodes(), graph.edges()))
    return out


# ---------------------------------------------------------------------------
# generator assignment


@dataclass(frozen=True)
class GeneratorAssignment:
    """Word over generators for each point; signs are globally irrelevant
    because every point occurs an even number of times in the full product."""

    words: Tuple[Word, ...]
    generator_count: int
    generator_points: Tuple[int, ...]


def _greedy_assignment(
    inc: IncidenceStructure,
) -> Tuple[List[Word], List[int], Dict[int, int]]:
    """Words, generator points, and the block that forced each forced point."""
    n = len(inc.points)
    blocks_sorted = [tuple(sorted(b)) for b in inc.blocks]
    holders: List[List[int]] = [[] for _ in range(n)]
    for bi, block in enumerate(blocks_sorted):
        for p in block:
            holders[p].append(bi)
    words: List[Optional[Word]] = [None] * n
    generator_points: List[int] = []
    forcing_block: Dict[int, int] = {}
    for p in range(n):
        forced: Optional[Word] = None
        for bi in holders[p]:
            others = [q for q in blocks_sorted[bi] if q != p]
            if all(words[q] is not None for q in others):
                forced = tuple(itertools.chain.from_iterable(words[q] for q in others))
                forcing_block[p] = bi
                break
        if forced is None:
            words[p] = (len(generator_points),)
            generator_points.append(p)
        else:
            words[p] = forced
    return [w for w in words if w is not None], generator_points, forcing_block


def assign_generators(inc: IncidenceStructure) -> GeneratorAssignment:
    """Greedy block completion in point-index order.

    A point whose block is one short of fully assigned receives the
    concatenation of the other words in that block (the first such block in
    block order); otherwise it becomes a fresh generator.
    """
    words, generator_points, _ = _greedy_assignment(inc)
    return GeneratorAssignment(tuple(words), len(generator_points), tuple(generator_points))


def product_word(ga: GeneratorAssignment, inc: IncidenceStructure) -> Word:
    """Concatenation over all blocks of all member words; the proof criterion
    is whether this word can be shown trivial."""
    return tuple(
        letter
        for block in inc.blocks
        for p in sorted(block)
        for letter in ga.words[p]
    )


# ---------------------------------------------------------------------------
# Knuth-Bendix completion over shortlex


@dataclass(frozen=True)
class RewriteSystem:
    alphabet: int
    rules: Tuple[Tuple[Word, Word], ...]
    status: str


class _RuleIndex:
    """Live rewrite rules bucketed by the first letter of the left side."""

    def __init__(self) -> None:
        self.by_id: Dict[int, Tuple[bytes, bytes]] = {}
        self.buckets: Dict[int, List[Tuple[bytes, bytes, int]]] = {}
        self.max_lhs = 1

    def add(self, rid: int, lhs: bytes, rhs: bytes) -> None:
        self.by_id[rid] = (lhs, rhs)
        self.buckets.setdefault(lhs[0], []).append((lhs, rhs, rid))
        if len(lhs) > self.max_lhs:
            self.max_lhs = len(lhs)

    def remove(self, rid: int) -> None:
        lhs, rhs = self.by_id.pop(rid)
        self.buckets[lhs[0]].remove((lhs, rhs, rid))

    def replace_rhs(self, rid: int, rhs: bytes) -> None:
        lhs, old = self.by_id[rid]
        self.by_id[rid] = (lhs, rhs)
        bucket = self.buckets[lhs[0]]
        bucket[bucket.index((lhs, old, rid))] = (lhs, rhs, rid)

    def reduce(self, word: bytes) -> bytes:
        buckets = self.buckets
        i = 0
        while i < len(word):
            bucket = buckets.get(word[i])
            hit = None
            if bucket:
                for lhs, rhs, _ in bucket:
                    if word.startswith(lhs, i):
                        hit = (lhs, rhs)
                        break
            if hit is None:
                i += 1
            else:
                lhs, rhs = hit
                word = word[:i] + rhs + word[i + len(lhs):]
                i = max(0, i - self.max_lhs + 1)
        return word


def _kb_complete(
    equations: List[Tuple[bytes, bytes]], max_rules: int, max_len: int
) -> Tuple[List[Tuple[bytes, bytes]], bool]:
    index = _RuleIndex()
    agenda: List[Tuple[int, int, bytes, bytes]] = []
    counter = itertools.count()
    capped = False
    budget = 200 * max_rules  # liveness guard against add/retire churn

    def push(left: bytes, right: bytes) -> None:
        heapq.heappush(agenda, (max(len(left), len(right)), next(counter), left, right))

    for left, right in equations:
        push(left, right)
    while agenda:
        budget -= 1
        if budget < 0:
            capped = True
            break
        _, _, left, right = heapq.heappop(agenda)
        left = index.reduce(left)
        right = index.reduce(right)
        if left == right:
            continue
        lhs, rhs = (left, right) if (len(left), left) > (len(right), right) else (right, left)
        if len(lhs) > max_len:
            capped = True
            continue
        if len(index.by_id) >= max_rules:
            capped = True
            break
        rid = next(counter)
        older = list(index.by_id.items())
        index.add(rid, lhs, rhs)
        # rules whose left side the new rule rewrites come back as equations;
        # right sides are renormalized in place
        for oid, (olhs, orhs) in older:
            if lhs in olhs:
                index.remove(oid)
                push(olhs, orhs)
            elif lhs in orhs:
                index.replace_rhs(oid, index.reduce(orhs))
        for oid, other in list(index.by_id.items()):
            for (al, ar), (bl, br) in (((lhs, rhs), other), (other, (lhs, rhs))):
                for k in range(1, min(len(al), len(bl))):
                    if al[-k:] == bl[:k]:
                        push(ar + bl[k:], al[:-k] + br)
                start = 0
                while True:
                    j = al.find(bl, start)
                    if j < 0:
                        break
                    if not (oid == rid and j == 0 and len(al) == len(bl)):
                        push(ar, al[:j] + br + al[j + len(bl):])
                    start = j + 1
    return sorted(index.by_id.values(), key=lambda r: (len(r[0]), r[0])), capped


def knuth_bendix(
    ga: GeneratorAssignment,
    inc: IncidenceStructure,
    extra_commuting: Sequence[Tuple[int, int]] = (),
    *,
    max_rules: int = 50000,
    max_word_len: int = 64,
) -> RewriteSystem:
    """Complete the presentation given by same-block commutation and point
    involutions, optionally with extra commuting point pairs.

    Letters 0..g-1 are the generators; each forced point also gets a letter,
    defined by a contraction rule from the block that forced it.  That is the
    same group (substituting the definitions recovers the word relations) but
    keeps every relation short, which is what lets completion terminate.
    Hitting the rule-count or word-length cap yields status ``capped``; only
    a ``complete`` system certifies word equality.
    """
    if len(inc.points) > 255:
        raise InputError("at most 255 points supported")
    _, generator_points, forcing_block = _greedy_assignment(inc)
    if tuple(generator_points) != ga.generator_points:
        raise InputError("assignment does not belong to this structure")
    letter: Dict[int, int] = {p: i for i, p in enumerate(generator_points)}
    for p in sorted(set(range(len(inc.points))) - set(generator_points)):
        letter[p] = len(letter)
    blocks_sorted = [tuple(sorted(b)) for b in inc.blocks]
    equations: List[Tuple[bytes, bytes]] = []
    for p in range(len(inc.points)):
        equations.append((bytes((letter[p], letter[p])), b""))
    for block in blocks_sorted:
        for u, v in itertools.combinations(block, 2):
            equations.append(
                (bytes((letter[u], letter[v])), bytes((letter[v], letter[u])))
            )
    for p, bi in forcing_block.items():
        others = bytes(letter[q] for q in blocks_sorted[bi] if q != p)
        equations.append((others, bytes((letter[p],))))
    for u, v in extra_commuting:
        if not (0 <= u < len(inc.points) and 0 <= v < len(inc.points)):
            raise InputError("extra commuting pairs must name points")
        equations.append(
            (bytes((letter[u], letter[v])), bytes((letter[v], letter[u])))
        )
    rules, capped = _kb_complete(equations, max_rules, max_word_len)
    return RewriteSystem(
        len(inc.points),
        tuple((tuple(lhs), tuple(rhs)) for lhs, rhs in rules),
        CAPPED if capped else COMPLETE,
    )


def normal_form(rs: RewriteSystem, word: Sequence[int]) -> Word:
    """Rewrite to an irreducible word; unique exactly when rs is complete."""
    if any(not 0 <= letter < rs.alphabet for letter in word):
        raise InputError("word uses letters outside the alphabet")
    index = _RuleIndex()
    for rid, (lhs, rhs) in enumerate(rs.rules):
        index.add(rid, bytes(lhs), bytes(rhs))
    return tuple(index.reduce(bytes(word)))


# ---------------------------------------------------------------------------
# finite quotient model

Element = Tuple[int, int]


class _Class2Model:
    """Finite quotient of the point group where word triviality is linear.

    Every population sends each point to a sign times a Hermitian Pauli.
    The square of any product of two such operators is a scalar, so the
    relations "(uv)^2 is a central involution" hold in every population on
    top of the structural ones; the quotient by them has nilpotency class
    two and exponent four.  Its elements are pairs (a, c): a holds letter
    parities, c holds one commutator coordinate per letter pair, and
    multiplication collects letters past each other.  Relators then reduce
    to a pivot table over the a-part plus a central F2 span, which makes
    membership (and hence triviality of the product word) and the group
    order pure linear algebra.  Triviality here is sound for impossibility:
    the point group maps onto this quotient, so a word trivial in no
    labeling of this quotient is trivial in no population.
    """

    def __init__(
        self,
        inc: IncidenceStructure,
        extra_commuting: Sequence[Tuple[int, int]] = (),
    ) -> None:
        m = len(inc.points)
        self.m = m
        words, generator_points, forcing_block = _greedy_assignment(inc)
        letter: Dict[int, int] = {p: i for i, p in enumerate(generator_points)}
        for p in sorted(set(range(m)) - set(generator_points)):
            letter[p] = len(letter)
        self.letter = letter
        blocks_sorted = [tuple(sorted(b)) for b in inc.blocks]

        relators: List[Element] = []
        for p, bi in forcing_block.items():
            others = tuple(letter[q] for q in blocks_sorted[bi] if q != p)
            relators.append(self.word_elem(others + (letter[p],)))
        pairs = [
            (u, v)
            for block in blocks_sorted
            for u, v in itertools.combinations(block, 2)
        ]
        for u, v in extra_commuting:
            if not (0 <= u < m and 0 <= v < m):
                raise InputError("extra commuting pairs must name points")
            pairs.append((u, v))
        for u, v in pairs:
            lu, lv = letter[u], letter[v]
            relators.append(self.word_elem((lu, lv, lu, lv)))

        # normal closure: commutators of relator letter-parities with every
        # letter are central, and so are squares and pairwise commutators of
        # the pivot elements below
        central: Set[int] = set()
        for a_r, _ in relators:
            for k in range(m):
                c = self._comm(a_r, 1 << k)
                if c:
                    central.add(c)
        pivots: Dict[int, Element] = {}
        for elem in relators:
            while elem[0]:
                top = elem[0].bit_length() - 1
                if top in pivots:
                    elem = self._mul(pivots[top], elem)
                else:
                    pivots[top] = elem
                    elem = (0, 0)
            if elem[1]:
                central.add(elem[1])
        self.pivots = pivots
        self.zbasis: Dict[int, int] = {}
        for c in sorted(central):
            self._zinsert(c)
        plist = sorted(pivots.items())
        for _, e in plist:
            self._zinsert(self._mul(e, e)[1])
        for (_, e1), (_, e2) in itertools.combinations(plist, 2):
            prod = self._mul(e1, e2)
            self._zinsert(self._mul(prod, prod)[1])

        cdim = m * (m - 1) // 2
        self.order = 1 << ((m - len(pivots)) + (cdim - len(self.zbasis)))
        free = tuple(
            letter[p]
            for bi, block in enumerate(blocks_sorted)
            if bi not in forcing_block.values()
            for p in block
        )
        self.product_word_trivial = self.reduce(self.word_elem(free)) == (0, 0)

    @staticmethod
    def _pos(i: int, j: int) -> int:
        return i * (i - 1) // 2 + j

    def _comm(self, a: int, b: int) -> int:
        c = 0
        ai = a
        while ai:
            i = ai.bit_length() - 1
            ai &= ~(1 << i)
            bj = b & ~(1 << i)
            while bj:
                j = bj.bit_length() - 1
                bj &= ~(1 << j)
                c ^= 1 << self._pos(max(i, j), min(i, j))
        return c

    def _mul(self, x: Element, y: Element) -> Element:
        a1, c1 = x
        a2, c2 = y
        c = c1 ^ c2
        ai = a1
        while ai:
            i = ai.bit_length() - 1
            ai &= ~(1 << i)
            aj = a2 & ((1 << i) - 1)
            while aj:
                j = aj.bit_length() - 1
                aj &= ~(1 << j)
                c ^= 1 << self._pos(i, j)
        return (a1 ^ a2, c)

    def word_elem(self, word: Sequence[int]) -> Element:
        elem: Element = (0, 0)
        for ltr in word:
            elem = self._mul(elem, (1 << ltr, 0))
        return elem

    def _zinsert(self, c: int) -> None:
        while c:
            top = c.bit_length() - 1
            if top in self.zbasis:
                c ^= self.zbasis[top]
            else:
                self.zbasis[top] = c
                return

    def reduce(self, elem: Element) -> Element:
        for bit in range(self.m - 1, -1, -1):
            if elem[0] >> bit & 1 and bit in self.pivots:
                elem = self._mul(self.pivots[bit], elem)
        c = elem[1]
        for top in range(c.bit_length() - 1, -1, -1):
            if c >> top & 1 and top in self.zbasis:
                c ^= self.zbasis[top]
        return (elem[0], c)


def _canonical_cayley_system(
    model: _Class2Model, max_rules: int
) -> Optional[RewriteSystem]:
    """The reduced complete shortlex system of the model's quotient group.

    Breadth-first search from the identity assigns every element its
    shortlex-least word.  A word is irreducible under the canonical system
    exactly when it is such a least word, every factor of a least word is
    itself least, so the rules are the one-letter extensions of least words
    that stop being least, kept only when their proper suffix is least.
    The result is the unique reduced complete system for the group and
    needs no completion run.
    """
    m = model.m
    gens = [(1 << a, 0) for a in range(m)]
    state_id: Dict[Element, int] = {model.reduce((0, 0)): 0}
    elems: List[Element] = [model.reduce((0, 0))]
    word_of: List[Word] = [()]
    suffix_state: List[int] = [0]
    delta: List[List[int]] = [[-1] * m]
    frontier = [0]
    while frontier:
        next_frontier: List[int] = []
        for s in frontier:
            for a in range(m):
                t_elem = model.reduce(model._mul(elems[s], gens[a]))
                t = state_id.get(t_elem)
                if t is None:
                    t = len(word_of)
                    state_id[t_elem] = t
                    elems.append(t_elem)
                    word_of.append(word_of[s] + (a,))
                    delta.append([-1] * m)
                    # the suffix of a least word is least, so its state sits
                    # in an earlier layer whose edges are already filled
                    suffix_state.append(
                        delta[suffix_state[s]][a] if word_of[s] else 0
                    )
                    next_frontier.append(t)
                delta[s][a] = t
        frontier = next_frontier
    rules: List[Tuple[Word, Word]] = []
    for s, word in enumerate(word_of):
        for a in range(m):
            t = delta[s][a]
            candidate = word + (a,)
            if word_of[t] == candidate:
                continue
            # keep the rule only if the proper suffix is itself least
            if word:
                sfx_t = delta[suffix_state[s]][a]
                if word[1:] + (a,) != word_of[sfx_t]:
                    continue
            rules.append((candidate, word_of[t]))
            if len(rules) > max_rules:
                return None
    rules.sort(key=lambda r: (len(r[0]), r[0]))
    return RewriteSystem(m, tuple(rules), COMPLETE)


# ---------------------------------------------------------------------------
# populations and decisions


def populate_structure(
    inc: IncidenceStructure, operators: Sequence[PauliOperator]
) -> Tuple[ConstraintSystem, ParityProof]:
    """Check that per-point operators turn every block into a constraint and
    the whole structure into a parity proof; returns the validated system."""
    ops = list(operators)
    if len(ops) != len(inc.points):
        raise InputError("exactly one operator per point required")
    if ops and any(op.qubits != ops[0].qubits for op in ops):
        raise InputError("all operators must act on the same qubit count")
    for p, op in enumerate(ops):
        if not (op.x_bits.bits or op.z_bits.bits):
            raise InputError(f"point {p} carries the identity, which has no -1 eigenvalue")
    ids = [("-" if op.sign < 0 else "+") + op.label for op in ops]
    constraints = []
    for block in inc.blocks:
        pts = sorted(block)
        for i, j in itertools.combinations(pts, 2):
            if ids[i] == ids[j]:
                raise InputError("observables within a block must be distinct")
            if not pauli_commute(ops[i], ops[j]):
                raise InputError("observables within a block must commute")
        try:
            product = pauli_product([ops[p] for p in pts])
        except PhaseError as exc:
            raise InputError(f"block product is not +/-I: {exc}") from exc
        if product.x_bits.bits or product.z_bits.bits:
            raise InputError("every block product must be +/-I")
        constraints.append((frozenset(ids[p] for p in pts), product.sign))
    if sum(1 for _, sign in constraints if sign < 0) % 2 == 0:
        raise InputError("a parity proof needs an odd number of -I blocks")
    tally = Counter(oid for members, _ in constraints for oid in members)
    if any(count % 2 for count in tally.values()):
        raise InputError("every observable must occur an even number of times")
    matrices = {ids[p]: pauli_to_matrix(ops[p]) for p in range(len(ops))}
    cs = build_constraint_system(
        "incidence", constraints, matrices=matrices, prune=False, validate=True
    )
    proof = validate_proof(cs, range(len(cs.constraints)))
    return cs, proof


@dataclass(frozen=True)
class Certificate:
    """Complete rewrite system witnessing impossibility.

    The system lives on a relabeled copy of the structure: the generator
    assignment, and with it the product word, depends on how points and
    blocks are ordered, while the existence of a proof does not, so the
    witness may use whichever labeling lets the product word die.
    ``point_map[p]`` is the point of ``structure`` carrying original point p.
    """

    structure: IncidenceStructure
    point_map: Tuple[int, ...]
    system: RewriteSystem


def validate_certificate(inc: IncidenceStructure, cert: Certificate) -> None:
    """Raise unless cert is a complete system killing the product word of a
    faithful relabeling of inc."""
    if cert.system.status != COMPLETE:
        raise InvariantError("certificate system is not complete")
    if sorted(cert.point_map) != list(range(len(inc.points))):
        raise InvariantError("certificate point map is not a bijection")
    mapped = {frozenset(cert.point_map[p] for p in b) for b in inc.blocks}
    if mapped != set(cert.structure.blocks):
        raise InvariantError("certificate structure does not match the input")
    ga = assign_generators(cert.structure)
    if normal_form(cert.system, product_word(ga, cert.structure)) != ():
        raise InvariantError("certificate does not kill the product word")


@dataclass(frozen=True)
class Decision:
    status: str
    assignment: Optional[Tuple[PauliOperator, ...]]
    qubits: Optional[int]
    certificate: Optional[Certificate] = None


def _pmul(a: Tuple[int, int, int], b: Tuple[int, int, int]) -> Tuple[int, int, int]:
    # phase exponent accumulates mod 4 under i^k X^x Z^z composition
    return (
        (a[0] + b[0] + 2 * (a[2] & b[1]).bit_count()) % 4,
        a[1] ^ b[1],
        a[2] ^ b[2],
    )


def _search_assignment(
    inc: IncidenceStructure,
    ga: GeneratorAssignment,
    qubits: int,
    anticommuting: Set[Tuple[int, int]],
    node_cap: int,
) -> Optional[List[PauliOperator]]:
    """Depth-first search over Pauli vectors for the generators.

    Only the unsigned parts are searched: flipping a generator sign flips
    evenly many point signs in every accounting of the overall parity, so
    the product of block signs depends on the vectors alone.  Signs are
    recovered at a successful leaf by solving a small linear system that
    separates any same-block points that landed on the same matrix.  The
    first generator is pinned to X on qubit zero: conjugation by any
    Clifford maps populations to populations, and the Clifford group is
    transitive on nontrivial Paulis, so the restriction loses nothing.
    """
    g = ga.generator_count
    if g == 0:
        return None
    mask = (1 << qubits) - 1
    words = ga.words
    n = len(words)
    blocks_sorted = [tuple(sorted(b)) for b in inc.blocks]
    gen_of_point = {p: i for i, p in enumerate(ga.generator_points)}
    points_at: List[List[int]] = [[] for _ in range(g)]
    for p, word in enumerate(words):
        points_at[max(word)].append(p)
    pair_depth: Dict[Tuple[int, int], int] = {}
    for block in blocks_sorted:
        for u, v in itertools.combinations(block, 2):
            pair_depth[(u, v)] = max(max(words[u]), max(words[v]))
    pairs_at: List[List[Tuple[int, int]]] = [[] for _ in range(g)]
    for pair, depth in pair_depth.items():
        pairs_at[depth].append(pair)
    blocks_at: List[List[int]] = [[] for _ in range(g)]
    for bi, block in enumerate(blocks_sorted):
        blocks_at[max(max(words[p]) for p in block)].append(bi)
    # generator-pair requirements: same block forces commutation, learned
    # facts force anticommutation
    gen_checks: List[List[Tuple[int, int]]] = [[] for _ in range(g)]
    required: Dict[Tuple[int, int], int] = {}
    for block in blocks_sorted:
        for u, v in itertools.combinations(block, 2):
            if u in gen_of_point and v in gen_of_point:
                i, j = sorted((gen_of_point[u], gen_of_point[v]))
                required[(i, j)] = 0
    for i, j in anticommuting:
        key = tuple(sorted((i, j)))
        required.setdefault(key, 1)
    for (i, j), want in required.items():
        gen_checks[j].append((i, want))
    word_parity = [0] * n
    for p, word in enumerate(words):
        for letter in word:
            word_parity[p] ^= 1 << letter

    values: List[Optional[Tuple[int, int, int]]] = [None] * g
    point_vals: List[Optional[Tuple[int, int, int]]] = [None] * n
    block_signs: List[int] = [0] * len(blocks_sorted)
    nodes = 0

    def sym(a: Tuple[int, int, int], b: Tuple[int, int, int]) -> int:
        return ((a[1] & b[2]).bit_count() + (a[2] & b[1]).bit_count()) & 1

    def leaf_signs() -> Optional[List[PauliOperator]]:
        # any same-block pair sharing a matrix must be sign-separated, and
        # pairs differing only in sign must not be merged; both are linear
        # conditions on the generator sign vector
        rows: List[Tuple[int, int]] = []
        for block in blocks_sorted:
            for u, v in itertools.combinations(block, 2):
                pu, pv = point_vals[u], point_vals[v]
                if (pu[1], pu[2]) == (pv[1], pv[2]):
                    want = 1 if pu[0] == pv[0] else 0
                    rows.append((word_parity[u] ^ word_parity[v], want))
        basis: Dict[int, Tuple[int, int]] = {}
        for vec, want in rows:
            while vec:
                top = vec.bit_length() - 1
                if top not in basis:
                    basis[top] = (vec, want)
                    break
                bv, bw = basis[top]
                vec ^= bv
                want ^= bw
            else:
                if want:
                    return None
        signs = 0
        for top in sorted(basis):
            vec, want = basis[top]
            if (signs & vec).bit_count() % 2 != want:
                signs ^= 1 << top
        ops = []
        for p in range(n):
            phase, x, z = point_vals[p]
            base = ((phase - (x & z).bit_count()) % 4) // 2
            flip = (base + (signs & word_parity[p]).bit_count()) % 2
            ops.append(
                PauliOperator(
                    qubits,
                    Gf2Vector(qubits, x),
                    Gf2Vector(qubits, z),
                    -1 if flip else 1,
                )
            )
        return ops

    def place(i: int) -> Optional[List[PauliOperator]]:
        nonlocal nodes
        candidates = (
            ((1, 0),)
            if i == 0
            else ((v >> qubits, v & mask) for v in range(1, 1 << (2 * qubits)))
        )
        for x, z in candidates:
            nodes += 1
            if nodes > node_cap:
                return None
            val = ((x & z).bit_count() % 4, x, z)
            ok = True
            for j, want in gen_checks[i]:
                if sym(values[j], val) != want:
                    ok = False
                    break
            if not ok:
                continue
            values[i] = val
            for p in points_at[i]:
                acc = values[words[p][0]]
                for letter in words[p][1:]:
                    acc = _pmul(acc, values[letter])
                if (acc[0] - (acc[1] & acc[2]).bit_count()) % 2 or not (acc[1] | acc[2]):
                    ok = False
                    break
                point_vals[p] = acc
            if ok:
                for u, v in pairs_at[i]:
                    if sym(point_vals[u], point_vals[v]):
                        ok = False
                        break
            if ok:
                for bi in blocks_at[i]:
                    pts = blocks_sorted[bi]
                    acc = point_vals[pts[0]]
                    for p in pts[1:]:
                        acc = _pmul(acc, point_vals[p])
                    if acc[1] or acc[2] or acc[0] % 2:
                        ok = False
                        break
                    block_signs[bi] = 1 if acc[0] == 0 else -1
            if ok:
                if i + 1 == g:
                    parity = 1
                    for s in block_signs:
                        parity *= s
                    if parity == -1:
                        found = leaf_signs()
                        if found is not None:
                            return found
                else:
                    found = place(i + 1)
                    if found is not None:
                        return found
            values[i] = None
        return None

    return place(0)


def _labelings(
    inc: IncidenceStructure, trials: int
) -> Iterable[Tuple[IncidenceStructure, Tuple[int, ...]]]:
    """The structure itself, then deterministic random relabelings."""
    n = len(inc.points)
    yield inc, tuple(range(n))
    rng = random.Random(0x1C0FFEE)
    for _ in range(trials):
        perm = list(range(n))
        rng.shuffle(perm)
        blocks = [sorted(perm[p] for p in b) for b in inc.blocks]
        rng.shuffle(blocks)
        yield build_structure(n, blocks), tuple(perm)


def _learned_anticommutations(
    inc: IncidenceStructure, ga: GeneratorAssignment
) -> Set[Tuple[int, int]]:
    """Generator pairs that must anticommute in any population with a proof:
    assuming they commute collapses the product word in the finite quotient,
    which would force overall parity +1."""
    in_same_block = {
        tuple(sorted(pair))
        for block in inc.blocks
        for pair in itertools.combinations(block, 2)
    }
    learned: Set[Tuple[int, int]] = set()
    for a, b in itertools.combinations(range(ga.generator_count), 2):
        u, v = ga.generator_points[a], ga.generator_points[b]
        if tuple(sorted((u, v))) in in_same_block:
            continue
        if _Class2Model(inc, extra_commuting=((u, v),)).product_word_trivial:
            learned.add((a, b))
    return learned


_CAYLEY_MAX_ORDER = 1 << 16


def decide_structure(
    inc: IncidenceStructure,
    search_qubits: int = 2,
    *,
    kb_max_rules: int = 50000,
    kb_max_word_len: int = 64,
    search_cap: int = 500_000_000,
    relabel_trials: int = 64,
) -> Decision:
    """Certify impossibility via rewriting, or find a Pauli population.

    Impossibility is screened in a sound finite quotient across relabelings
    (the product word and its group depend on the labeling, proof existence
    does not); a labeling where the word dies is then certified with the
    quotient's canonical complete rewrite system, falling back to direct
    completion when the quotient is too large.  NoProofPossible always
    carries such a certificate.  Otherwise a Pauli assignment search runs
    at 2..search_qubits qubits, pruned by commutation requirements and by
    anticommutation facts learned from the quotient.  Exhausting the search
    (or its node cap) without a certificate is Inconclusive.
    """
    ga = assign_generators(inc)
    hits: List[Tuple[int, int, IncidenceStructure, Tuple[int, ...], _Class2Model]] = []
    for trial, (relabeled, pmap) in enumerate(_labelings(inc, relabel_trials)):
        model = _Class2Model(relabeled)
        if model.product_word_trivial:
            hits.append((model.order, trial, relabeled, pmap, model))
    hits.sort(key=lambda h: (h[0], h[1]))
    for order, _, relabeled, pmap, model in hits[:3]:
        if order <= _CAYLEY_MAX_ORDER:
            # canonical systems of quotients this size can exceed the
            # completion budget while remaining cheap to hold and apply
            system = _canonical_cayley_system(model, 3 * kb_max_rules)
        else:
            rga = assign_generators(relabeled)
            system = knuth_bendix(
                rga, relabeled, max_rules=kb_max_rules, max_word_len=kb_max_word_len
            )
            if system.status != COMPLETE or normal_form(
                system, product_word(rga, relabeled)
            ) != ():
                system = None
        if system is not None:
            cert = Certificate(relabeled, pmap, system)
            validate_certificate(inc, cert)
            return Decision(NO_PROOF_POSSIBLE, None, None, cert)
    anticommuting = _learned_anticommutations(inc, ga)
    for qubits in range(2, search_qubits + 1):
        ops = _search_assignment(inc, ga, qubits, anticommuting, search_cap)
        if ops is None:
            continue
        try:
            populate_structure(inc, ops)
        except InputError as exc:
            raise InvariantError(f"search produced an invalid population: {exc}") from exc
        return Decision(PROOF_FOUND, tuple(ops), qubits)
    return Decision(INCONCLUSIVE, None, None)


def decision_to_json_obj(inc: IncidenceStructure, decision: Decision) -> dict:
    obj = {
        "points": len(inc.points),
        "blocks": [sorted(b) for b in inc.blocks],
        "status": decision.status,
    }
    if decision.assignment is not None:
        obj["qubits"] = decision.qubits
        obj["assignment"] = [
            {
                "x": op.x_bits.to01(),
                "z": op.z_bits.to01(),
                "sign": op.sign,
                "label": op.label,
            }
            for op in decision.assignment
        ]
    if decision.certificate is not None:
        cert = decision.certificate
        obj["certificate"] = {
            "point_map": list(cert.point_map),
            "alphabet": cert.system.alphabet,
            "rules": len(cert.system.rules),
        }
    return obj
