"""Exact arithmetic over Q(sqrt5)(i): scalars, matrices, observables, Paulis.

Scalars are a + b*sqrt5 + c*i + d*i*sqrt5 with rational a, b, c, d. This
field covers every built-in ray system (sqrt5 for the 600-cell, i for the
two-qubit system, rationals for the E8 roots) while keeping equality exact
and decidable. Observables never introduce square roots: they are signed
sums of cached projectors, or reflections, per their defining formulas.
"""

from __future__ import annotations

import threading
from dataclasses import dataclass, field
from enum import Enum
from fractions import Fraction
from typing import Dict, List, Optional, Sequence, Tuple, Union

from .errors import PhaseError
from .gf2core import Gf2Vector

ScalarLike = Union["ExactScalar", int, Fraction]

__all__ = [
    "ExactScalar",
    "ExactMatrix",
    "OrthogonalBasis",
    "PauliOperator",
    "ProductSign",
    "ObservableInterner",
    "inner_product",
    "observable_from_basis",
    "ray_reflection",
    "sign_canonical",
    "product_sign",
    "pauli_product",
    "pauli_commute",
    "pauli_to_matrix",
    "tensor",
    "mermin_square",
    "parse_scalar",
    "scalar_to_text",
    "parse_rays_text",
    "rays_to_text",
]


def _real_sign(a: Fraction, b: Fraction) -> int:
    """Sign of a + b*sqrt5 as a real number, decided rationally."""
    if a == 0 and b == 0:
        return 0
    if a >= 0 and b >= 0:
        return 1
    if a <= 0 and b <= 0:
        return -1
    # opposite signs: |a| vs |b|*sqrt5 decided by squaring
    if a > 0:
        return 1 if a * a > 5 * b * b else -1
    return 1 if 5 * b * b > a * a else -1


@dataclass(frozen=True, slots=True)
class ExactScalar:
    """a + b*sqrt5 + c*i + d*i*sqrt5 with exact rational coefficients."""

    a: Fraction = Fraction(0)
    b: Fraction = Fraction(0)
    c: Fraction = Fraction(0)
    d: Fraction = Fraction(0)

    def __post_init__(self) -> None:
        for name in ("a", "b", "c", "d"):
            v = getattr(self, name)
            if not isinstance(v, Fraction):
                object.__setattr__(self, name, Fraction(v))

    @classmethod
    def zero(cls) -> "ExactScalar":
        return _ZERO

    @classmethod
    def one(cls) -> "ExactScalar":
        return _ONE

    @classmethod
    def i(cls) -> "ExactScalar":
        return _I

    @classmethod
    def sqrt5(cls) -> "ExactScalar":
        return _SQRT5

    @classmethod
    def from_rational(cls, value: Union[int, Fraction]) -> "ExactScalar":
        return cls(Fraction(value))

    @property
    def is_zero(self) -> bool:
        return not (self.a or self.b or self.c or self.d)

    @property
    def is_real(self) -> bool:
        return not (self.c or self.d)

    def conjugate(self) -> "ExactScalar":
        return ExactScalar(self.a, self.b, -self.c, -self.d)

    def real_sign(self) -> int:
        return _real_sign(self.a, self.b)

    def imag_sign(self) -> int:
        return _real_sign(self.c, self.d)

    def inverse(self) -> "ExactScalar":
        if self.is_zero:
            raise ZeroDivisionError("inverse of zero scalar")
        norm = self.conjugate() * self  # e + f*sqrt5 > 0
        e, f = norm.a, norm.b
        den = e * e - 5 * f * f  # rational norm of e + f*sqrt5, nonzero
        inv_norm = ExactScalar(e / den, -f / den)
        return self.conjugate() * inv_norm

    def __add__(self, other: ScalarLike) -> "ExactScalar":
        o = _coerce(other)
        if o is None:
            return NotImplemented
        return ExactScalar(self.a + o.a, self.b + o.b, self.c + o.c, self.d + o.d)

    __radd__ = __add__

    def __sub__(self, other: ScalarLike) -> "ExactScalar":
        o = _coerce(other)
        if o is None:
            return NotImplemented
        return ExactScalar(self.a - o.a, self.b - o.b, self.c - o.c, self.d - o.d)

    def __rsub__(self, other: ScalarLike) -> "ExactScalar":
        o = _coerce(other)
        if o is None:
            return NotImplemented
        return o - self

    def __neg__(self) -> "ExactScalar":
        return ExactScalar(-self.a, -self.b, -self.c, -self.d)

    def __mul__(self, other: ScalarLike) -> "ExactScalar":
        o = _coerce(other)
        if o is None:
            return NotImplemented
        a1, b1, c1, d1 = self.a, self.b, self.c, self.d
        a2, b2, c2, d2 = o.a, o.b, o.c, o.d
        return ExactScalar(
            a1 * a2 + 5 * b1 * b2 - c1 * c2 - 5 * d1 * d2,
            a1 * b2 + b1 * a2 - c1 * d2 - d1 * c2,
            a1 * c2 + c1 * a2 + 5 * (b1 * d2 + d1 * b2),
            a1 * d2 + d1 * a2 + b1 * c2 + c1 * b2,
        )

    __rmul__ = __mul__

    def __truediv__(self, other: ScalarLike) -> "ExactScalar":
        o = _coerce(other)
        if o is None:
            return NotImplemented
        return self * o.inverse()

    def __repr__(self) -> str:  # pragma: no cover - debugging aid
        return f"ExactScalar({scalar_to_text(self)!r})"


def _coerce(x: ScalarLike) -> Optional[ExactScalar]:
    if isinstance(x, ExactScalar):
        return x
    if isinstance(x, (int, Fraction)):
        return ExactScalar(Fraction(x))
    return None


_ZERO = ExactScalar()
_ONE = ExactScalar(Fraction(1))
_I = ExactScalar(c=Fraction(1))
_SQRT5 = ExactScalar(b=Fraction(1))


def _entry_sign(s: ExactScalar) -> int:
    """Lexicographic sign: real part first, imaginary part breaks ties."""
    return s.real_sign() or s.imag_sign()


# ---------------------------------------------------------------------------
# Text format: entries like 1/2, -1/3*w5, 3/4*im, 1/2+1/2*im*w5
# ---------------------------------------------------------------------------

_SLOTS = {frozenset(): "a", frozenset({"w5"}): "b",
          frozenset({"im"}): "c", frozenset({"im", "w5"}): "d"}


def parse_scalar(text: str) -> ExactScalar:
    t = text.strip().replace(" ", "")
    terms = [p for p in t.replace("-", "+-").split("+") if p]
    if not terms:
        raise ValueError(f"empty scalar entry {text!r}")
    parts = {"a": Fraction(0), "b": Fraction(0), "c": Fraction(0), "d": Fraction(0)}
    for term in terms:
        coeff, *markers = term.split("*")
        key = _SLOTS.get(frozenset(markers))
        if key is None or len(markers) != len(set(markers)):
            raise ValueError(f"bad term {term!r} in scalar entry {text!r}")
        try:
            parts[key] += Fraction(coeff)
        except (ValueError, ZeroDivisionError) as exc:
            raise ValueError(f"bad coefficient {coeff!r} in scalar entry {text!r}") from exc
    return ExactScalar(parts["a"], parts["b"], parts["c"], parts["d"])


def scalar_to_text(s: ExactScalar) -> str:
    terms = []
    for frac, suffix in ((s.a, ""), (s.b, "*w5"), (s.c, "*im"), (s.d, "*im*w5")):
        if frac:
            terms.append(f"{frac.numerator}/{frac.denominator}{suffix}")
    if not terms:
        return "0/1"
    return "+".join(terms).replace("+-", "-")


def parse_rays_text(text: str) -> List[Tuple[ExactScalar, ...]]:
    rays = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        try:
            rays.append(tuple(parse_scalar(tok) for tok in line.split(",")))
        except ValueError as exc:
            raise ValueError(f"line {lineno}: {exc}") from exc
    return rays


def rays_to_text(rays: Sequence[Sequence[ExactScalar]]) -> str:
    return "\n".join(",".join(scalar_to_text(s) for s in ray) for ray in rays) + "\n"


# ---------------------------------------------------------------------------
# Matrices
# ---------------------------------------------------------------------------


@dataclass(frozen=True, slots=True)
class ExactMatrix:
    dim: int
    entries: Tuple[Tuple[ExactScalar, ...], ...]

    def __post_init__(self) -> None:
        if len(self.entries) != self.dim or any(len(r) != self.dim for r in self.entries):
            raise ValueError("entries must form a dim x dim square")

    @classmethod
    def from_rows(cls, rows: Sequence[Sequence[ExactScalar]]) -> "ExactMatrix":
        return cls(len(rows), tuple(tuple(r) for r in rows))

    @classmethod
    def identity(cls, dim: int) -> "ExactMatrix":
        return cls(dim, tuple(
            tuple(_ONE if i == j else _ZERO for j in range(dim)) for i in range(dim)
        ))

    @classmethod
    def zero(cls, dim: int) -> "ExactMatrix":
        return cls(dim, ((_ZERO,) * dim,) * dim)

    def __add__(self, other: "ExactMatrix") -> "ExactMatrix":
        if self.dim != other.dim:
            raise ValueError("dimension mismatch")
        return ExactMatrix(self.dim, tuple(
            tuple(x + y for x, y in zip(r1, r2))
            for r1, r2 in zip(self.entries, other.entries)
        ))

    def __sub__(self, other: "ExactMatrix") -> "ExactMatrix":
        return self + (-other)

    def __neg__(self) -> "ExactMatrix":
        return ExactMatrix(self.dim, tuple(tuple(-x for x in r) for r in self.entries))

    def __mul__(self, other: "ExactMatrix") -> "ExactMatrix":
        if not isinstance(other, ExactMatrix):
            return NotImplemented
        if self.dim != other.dim:
            raise ValueError("dimension mismatch")
        cols = tuple(zip(*other.entries))
        return ExactMatrix(self.dim, tuple(
            tuple(sum((x * y for x, y in zip(row, col)), _ZERO) for col in cols)
            for row in self.entries
        ))

    def scale(self, s: ScalarLike) -> "ExactMatrix":
        sc = _coerce(s)
        if sc is None:
            raise TypeError("scale expects a scalar")
        return ExactMatrix(self.dim, tuple(tuple(sc * x for x in r) for r in self.entries))

    def dagger(self) -> "ExactMatrix":
        return ExactMatrix(self.dim, tuple(
            tuple(self.entries[j][i].conjugate() for j in range(self.dim))
            for i in range(self.dim)
        ))

    def trace(self) -> ExactScalar:
        return sum((self.entries[i][i] for i in range(self.dim)), _ZERO)

    def is_identity(self) -> bool:
        return self == ExactMatrix.identity(self.dim)


# ---------------------------------------------------------------------------
# Orthogonal bases and observables
# ---------------------------------------------------------------------------


def inner_product(u: Sequence[ExactScalar], v: Sequence[ExactScalar]) -> ExactScalar:
    """Hermitian inner product, conjugate-linear in the first argument."""
    if len(u) != len(v):
        raise ValueError("length mismatch")
    return sum((x.conjugate() * y for x, y in zip(u, v)), _ZERO)


def _outer_projector(v: Sequence[ExactScalar]) -> ExactMatrix:
    """v-dagger v / <v, v> as a matrix; v is a row vector."""
    norm = inner_product(v, v)
    inv = norm.inverse()
    return ExactMatrix.from_rows(
        [[x.conjugate() * y * inv for y in v] for x in v]
    )


@dataclass(frozen=True)
class OrthogonalBasis:
    """A complete orthogonal basis with its projectors precomputed."""

    vectors: Tuple[Tuple[ExactScalar, ...], ...]
    projectors: Tuple[ExactMatrix, ...] = field(init=False, compare=False, repr=False)

    def __post_init__(self) -> None:
        vecs = tuple(tuple(v) for v in self.vectors)
        object.__setattr__(self, "vectors", vecs)
        d = len(vecs)
        if d < 2 or any(len(v) != d for v in vecs):
            raise ValueError("need d vectors of length d with d >= 2")
        if any(all(x.is_zero for x in v) for v in vecs):
            raise ValueError("basis vectors must be nonzero")
        for i in range(d):
            for j in range(i + 1, d):
                if not inner_product(vecs[i], vecs[j]).is_zero:
                    raise ValueError(f"vectors {i} and {j} are not orthogonal")
        object.__setattr__(self, "projectors", tuple(_outer_projector(v) for v in vecs))

    @property
    def dim(self) -> int:
        return len(self.vectors)


def observable_from_basis(basis: OrthogonalBasis, lam: Gf2Vector) -> ExactMatrix:
    """Sum of projectors signed by lambda: eigenvalue (-1)^lambda_i on b_i."""
    if lam.length != basis.dim:
        raise ValueError("lambda length must equal basis dimension")
    total = ExactMatrix.zero(basis.dim)
    for i, p in enumerate(basis.projectors):
        total = total + (-p if lam.bit(i) else p)
    return total


def ray_reflection(v: Sequence[ExactScalar]) -> ExactMatrix:
    """I - 2 v-dagger v / <v, v>: reflection across the hyperplane of v."""
    v = tuple(v)
    if all(x.is_zero for x in v):
        raise ValueError("cannot reflect across the zero vector")
    return ExactMatrix.identity(len(v)) - _outer_projector(v).scale(2)


def sign_canonical(m: ExactMatrix) -> Tuple[ExactMatrix, bool]:
    """Fix the sign by making the first nonzero entry (row-major) positive."""
    for row in m.entries:
        for e in row:
            s = _entry_sign(e)
            if s:
                return (-m, True) if s < 0 else (m, False)
    raise ValueError("zero matrix has no canonical sign")


class ProductSign(Enum):
    PLUS_I = "plus_identity"
    MINUS_I = "minus_identity"
    NOT_SCALAR = "not_scalar"


def product_sign(ms: Sequence[ExactMatrix]) -> ProductSign:
    """Classify the ordered product of ms as +I, -I, or anything else."""
    if not ms:
        return ProductSign.PLUS_I
    acc = ms[0]
    for m in ms[1:]:
        acc = acc * m
    eye = ExactMatrix.identity(acc.dim)
    if acc == eye:
        return ProductSign.PLUS_I
    if acc == -eye:
        return ProductSign.MINUS_I
    return ProductSign.NOT_SCALAR


# ---------------------------------------------------------------------------
# Pauli operators in symplectic form
# ---------------------------------------------------------------------------

_LABEL_BITS = {"I": (0, 0), "X": (1, 0), "Z": (0, 1), "Y": (1, 1)}
_BITS_LABEL = {v: k for k, v in _LABEL_BITS.items()}


@dataclass(frozen=True, slots=True)
class PauliOperator:
    """sign times the Hermitian Pauli W(x,z) = tensor_k i^(x_k z_k) X^x_k Z^z_k."""

    qubits: int
    x_bits: Gf2Vector
    z_bits: Gf2Vector
    sign: int = 1

    def __post_init__(self) -> None:
        if self.x_bits.length != self.qubits or self.z_bits.length != self.qubits:
            raise ValueError("bit vector length must equal qubit count")
        if self.sign not in (1, -1):
            raise ValueError("sign must be +1 or -1")

    @classmethod
    def from_label(cls, label: str, sign: int = 1) -> "PauliOperator":
        try:
            pairs = [_LABEL_BITS[ch] for ch in label]
        except KeyError as exc:
            raise ValueError(f"bad Pauli label {label!r}") from exc
        return cls(
            len(label),
            Gf2Vector.from_coords([p[0] for p in pairs]),
            Gf2Vector.from_coords([p[1] for p in pairs]),
            sign,
        )

    @property
    def label(self) -> str:
        return "".join(
            _BITS_LABEL[(self.x_bits.bit(k), self.z_bits.bit(k))]
            for k in range(self.qubits)
        )

    def __repr__(self) -> str:  # pragma: no cover - debugging aid
        s = "-" if self.sign < 0 else ""
        return f"PauliOperator({s}{self.label})"


def pauli_product(ps: Sequence[PauliOperator]) -> PauliOperator:
    """Ordered product; PhaseError when the total phase is +/-i.

    Intermediate +/-i phases are fine as long as they cancel overall, so the
    phase exponent is accumulated mod 4 across the whole fold.
    """
    if not ps:
        raise ValueError("empty Pauli product has no qubit count")
    n = ps[0].qubits
    if any(p.qubits != n for p in ps):
        raise ValueError("qubit count mismatch")
    x_acc = z_acc = 0
    k = 0
    sign = 1
    for p in ps:
        sign *= p.sign
        x2, z2 = p.x_bits.bits, p.z_bits.bits
        e1 = (x_acc & z_acc).bit_count()
        e2 = (x2 & z2).bit_count()
        x3, z3 = x_acc ^ x2, z_acc ^ z2
        k = (k + e1 + e2 - (x3 & z3).bit_count() + 2 * (z_acc & x2).bit_count()) % 4
        x_acc, z_acc = x3, z3
    if k % 2:
        raise PhaseError("product carries a +/-i phase")
    if k == 2:
        sign = -sign
    return PauliOperator(n, Gf2Vector(n, x_acc), Gf2Vector(n, z_acc), sign)


def pauli_commute(p: PauliOperator, q: PauliOperator) -> bool:
    """True iff the symplectic form x_p.z_q + z_p.x_q vanishes."""
    return (p.x_bits.dot(q.z_bits) ^ p.z_bits.dot(q.x_bits)) == 0


def tensor(a: ExactMatrix, b: ExactMatrix) -> ExactMatrix:
    db = b.dim
    dim = a.dim * db
    rows = []
    for i in range(dim):
        rows.append(tuple(
            a.entries[i // db][j // db] * b.entries[i % db][j % db] for j in range(dim)
        ))
    return ExactMatrix(dim, tuple(rows))


_SINGLE_QUBIT = {
    (0, 0): ExactMatrix.identity(2),
    (1, 0): ExactMatrix.from_rows([[_ZERO, _ONE], [_ONE, _ZERO]]),
    (0, 1): ExactMatrix.from_rows([[_ONE, _ZERO], [_ZERO, -_ONE]]),
    (1, 1): ExactMatrix.from_rows([[_ZERO, -_I], [_I, _ZERO]]),
}


def pauli_to_matrix(p: PauliOperator) -> ExactMatrix:
    """Dense form; qubit 0 is the leftmost (slowest) tensor factor."""
    acc = _SINGLE_QUBIT[(p.x_bits.bit(0), p.z_bits.bit(0))]
    for qubit in range(1, p.qubits):
        acc = tensor(acc, _SINGLE_QUBIT[(p.x_bits.bit(qubit), p.z_bits.bit(qubit))])
    return acc if p.sign == 1 else -acc


def mermin_square() -> Tuple[Tuple[PauliOperator, ...], ...]:
    """The 3x3 grid of two-qubit observables whose rows and columns are
    contexts; every context multiplies to +I except the third column (-I)."""
    labels = (("XI", "IX", "XX"), ("IY", "YI", "YY"), ("XY", "YX", "ZZ"))
    return tuple(tuple(PauliOperator.from_label(s) for s in row) for row in labels)


class ObservableInterner:
    """Assigns stable integer ids to matrices up to sign.

    Insert-or-get is serialized by a lock so concurrent callers agree on
    the id assignment.
    """

    def __init__(self) -> None:
        self._ids: Dict[ExactMatrix, int] = {}
        self._canonicals: List[ExactMatrix] = []
        self._lock = threading.Lock()

    def intern(self, m: ExactMatrix) -> Tuple[int, bool]:
        canon, flipped = sign_canonical(m)
        with self._lock:
            oid = self._ids.get(canon)
            if oid is None:
                oid = len(self._canonicals)
                self._ids[canon] = oid
                self._canonicals.append(canon)
        return oid, flipped

    def canonical(self, oid: int) -> ExactMatrix:
        return self._canonicals[oid]

    def __len__(self) -> int:
        return len(self._canonicals)
