"""Tests for exact Q(sqrt5)(i) arithmetic, observables, and Pauli operators.

Floating-point complex arithmetic serves as an independent oracle for the
field operations; dense exact matrices serve as the oracle for the
symplectic Pauli representation.
"""

import math
import random
from fractions import Fraction

import pytest

from parityks.errors import PhaseError
from parityks.exactalg import (
    ExactMatrix,
    ExactScalar,
    ObservableInterner,
    OrthogonalBasis,
    PauliOperator,
    ProductSign,
    mermin_square,
    observable_from_basis,
    parse_rays_text,
    parse_scalar,
    pauli_commute,
    pauli_product,
    pauli_to_matrix,
    product_sign,
    ray_reflection,
    rays_to_text,
    scalar_to_text,
    sign_canonical,
    tensor,
)
from parityks.gf2core import Gf2Vector

ONE = ExactScalar.one()
ZERO = ExactScalar.zero()
IM = ExactScalar.i()
W5 = ExactScalar.sqrt5()


def to_complex(s: ExactScalar) -> complex:
    r5 = math.sqrt(5)
    return complex(float(s.a) + float(s.b) * r5, float(s.c) + float(s.d) * r5)


def random_scalar(rng, allow_zero=True) -> ExactScalar:
    while True:
        parts = [Fraction(rng.randint(-9, 9), rng.randint(1, 9)) for _ in range(4)]
        s = ExactScalar(*parts)
        if allow_zero or not s.is_zero:
            return s


def random_matrix(rng, d) -> ExactMatrix:
    return ExactMatrix.from_rows(
        [[random_scalar(rng) for _ in range(d)] for _ in range(d)]
    )


def sv(x) -> ExactScalar:
    return ExactScalar.from_rational(x)


# ---------------------------------------------------------------------------
# Scalar field
# ---------------------------------------------------------------------------


def test_scalar_arithmetic_matches_complex_floats():
    rng = random.Random(1)
    for _ in range(300):
        x, y = random_scalar(rng), random_scalar(rng)
        assert to_complex(x + y) == pytest.approx(to_complex(x) + to_complex(y))
        assert to_complex(x - y) == pytest.approx(to_complex(x) - to_complex(y))
        assert to_complex(x * y) == pytest.approx(to_complex(x) * to_complex(y), abs=1e-9)
        assert to_complex(x.conjugate()) == pytest.approx(to_complex(x).conjugate())


def test_scalar_inverse_and_conjugate_norm():
    rng = random.Random(2)
    for _ in range(200):
        x = random_scalar(rng, allow_zero=False)
        assert x * x.inverse() == ONE
        norm = x.conjugate() * x
        assert norm.c == 0 and norm.d == 0
        assert norm.real_sign() == 1
    with pytest.raises(ZeroDivisionError):
        ZERO.inverse()


def test_scalar_real_sign_against_float_oracle():
    rng = random.Random(3)
    cases = [(9, -4), (-9, 4), (2, -1), (-2, 1), (0, 1), (0, -1), (1, 0), (0, 0)]
    cases += [(rng.randint(-50, 50), rng.randint(-50, 50)) for _ in range(500)]
    for a, b in cases:
        s = ExactScalar(Fraction(a), Fraction(b))
        value = a + b * math.sqrt(5)
        expect = 0 if value == 0 else (1 if value > 0 else -1)
        assert s.real_sign() == expect, (a, b)


def test_scalar_mixed_operand_types():
    assert ONE + 1 == sv(2)
    assert 2 * W5 == W5 + W5
    assert W5 * W5 == sv(5)
    assert IM * IM == sv(-1)
    assert (IM * W5) * (IM * W5) == sv(-5)


# ---------------------------------------------------------------------------
# Text format
# ---------------------------------------------------------------------------


def test_parse_scalar_basic_forms():
    assert parse_scalar("1/2") == ExactScalar(Fraction(1, 2))
    assert parse_scalar("-1/3*w5") == ExactScalar(Fraction(0), Fraction(-1, 3))
    assert parse_scalar("2/1*im") == ExactScalar(c=Fraction(2))
    assert parse_scalar("-3/4*im*w5") == ExactScalar(d=Fraction(-3, 4))
    assert parse_scalar("1/1+1/1*w5") == ONE + W5
    assert parse_scalar("1/2-1/3*im") == ExactScalar(Fraction(1, 2), c=Fraction(-1, 3))
    assert parse_scalar("0/1") == ZERO


def test_scalar_text_round_trip():
    rng = random.Random(4)
    for _ in range(200):
        s = random_scalar(rng)
        assert parse_scalar(scalar_to_text(s)) == s


def test_parse_scalar_rejects_garbage():
    for bad in ["", "1/2*foo", "w5", "1/0", "1//2", "+"]:
        with pytest.raises(ValueError):
            parse_scalar(bad)


def test_rays_text_round_trip_with_comments():
    text = "# two rays\n1/1,0/1\n\n0/1,1/2+1/2*im\n"
    rays = parse_rays_text(text)
    assert rays == [(ONE, ZERO), (ZERO, ExactScalar(Fraction(1, 2), c=Fraction(1, 2)))]
    assert parse_rays_text(rays_to_text(rays)) == rays


# ---------------------------------------------------------------------------
# Matrices
# ---------------------------------------------------------------------------


def test_matrix_identity_and_product():
    rng = random.Random(5)
    m = random_matrix(rng, 3)
    eye = ExactMatrix.identity(3)
    assert m * eye == m and eye * m == m


def test_matrix_dagger_antihomomorphism():
    rng = random.Random(6)
    for _ in range(20):
        m1, m2 = random_matrix(rng, 2), random_matrix(rng, 2)
        assert (m1 * m2).dagger() == m2.dagger() * m1.dagger()
        assert (m1 * m2).trace() == (m2 * m1).trace()


# ---------------------------------------------------------------------------
# Orthogonal bases and observables
# ---------------------------------------------------------------------------

HADAMARD4 = [
    [sv(1), sv(1), sv(1), sv(1)],
    [sv(1), sv(1), sv(-1), sv(-1)],
    [sv(1), sv(-1), sv(1), sv(-1)],
    [sv(1), sv(-1), sv(-1), sv(1)],
]


def random_basis_2d(rng) -> OrthogonalBasis:
    u1, u2 = random_scalar(rng, allow_zero=False), random_scalar(rng)
    return OrthogonalBasis(((u1, u2), (-u2.conjugate(), u1.conjugate())))


def test_basis_rejects_bad_input():
    with pytest.raises(ValueError):
        OrthogonalBasis(((ONE, ZERO), (ONE, ONE)))
    with pytest.raises(ValueError):
        OrthogonalBasis(((ONE, ZERO), (ZERO, ZERO)))
    with pytest.raises(ValueError):
        OrthogonalBasis(((ONE, ZERO),))


def test_projectors_resolve_identity():
    rng = random.Random(7)
    bases = [OrthogonalBasis(tuple(tuple(r) for r in HADAMARD4))]
    bases += [random_basis_2d(rng) for _ in range(10)]
    for basis in bases:
        total = ExactMatrix.zero(basis.dim)
        for p in basis.projectors:
            assert p * p == p
            assert p.dagger() == p
            total = total + p
        assert total == ExactMatrix.identity(basis.dim)


def test_observable_trivial_lambdas():
    basis = OrthogonalBasis(tuple(tuple(r) for r in HADAMARD4))
    eye = ExactMatrix.identity(4)
    assert observable_from_basis(basis, Gf2Vector(4, 0)) == eye
    assert observable_from_basis(basis, Gf2Vector.ones(4)) == -eye


def test_observable_standard_basis_gives_z():
    basis = OrthogonalBasis(((ONE, ZERO), (ZERO, ONE)))
    z = ExactMatrix.from_rows([[ONE, ZERO], [ZERO, -ONE]])
    assert observable_from_basis(basis, Gf2Vector.from_coords([0, 1])) == z


def test_observable_group_law_and_involution():
    rng = random.Random(8)
    bases = [OrthogonalBasis(tuple(tuple(r) for r in HADAMARD4))]
    bases += [random_basis_2d(rng) for _ in range(6)]
    for basis in bases:
        d = basis.dim
        lams = (
            [Gf2Vector(d, bits) for bits in range(1 << d)]
            if d == 2
            else [Gf2Vector(d, rng.getrandbits(d)) for _ in range(6)]
        )
        for lam in lams:
            obs = observable_from_basis(basis, lam)
            assert obs.dagger() == obs
            assert obs * obs == ExactMatrix.identity(d)
            for mu in lams[:4]:
                lhs = obs * observable_from_basis(basis, mu)
                assert lhs == observable_from_basis(basis, lam ^ mu)


# ---------------------------------------------------------------------------
# Ray reflections
# ---------------------------------------------------------------------------


def test_reflection_small_cases():
    assert ray_reflection((ONE, ZERO)) == ExactMatrix.from_rows(
        [[-ONE, ZERO], [ZERO, ONE]]
    )
    minus_x = ExactMatrix.from_rows([[ZERO, -ONE], [-ONE, ZERO]])
    assert ray_reflection((ONE, ONE)) == minus_x


def test_reflection_scale_invariance_and_involution():
    rng = random.Random(9)
    scales = [sv(2), W5 + 1, IM, IM * W5 - sv(3)]
    for _ in range(100):
        d = rng.choice([2, 3])
        v = tuple(random_scalar(rng) for _ in range(d))
        if all(x.is_zero for x in v):
            continue
        s = ray_reflection(v)
        assert s.dagger() == s
        assert s * s == ExactMatrix.identity(d)
        alpha = rng.choice(scales)
        assert ray_reflection(tuple(alpha * x for x in v)) == s
    with pytest.raises(ValueError):
        ray_reflection((ZERO, ZERO))


# ---------------------------------------------------------------------------
# Sign canonicalization and product classification
# ---------------------------------------------------------------------------


def test_sign_canonical_basics():
    eye = ExactMatrix.identity(3)
    canon, flipped = sign_canonical(-eye)
    assert canon == eye and flipped
    canon, flipped = sign_canonical(eye)
    assert canon == eye and not flipped


def test_sign_canonical_is_sign_blind():
    rng = random.Random(10)
    for _ in range(50):
        m = random_matrix(rng, 2)
        m = m + m.dagger()
        if all(e.is_zero for row in m.entries for e in row):
            continue
        assert sign_canonical(m)[0] == sign_canonical(-m)[0]


def test_sign_canonical_uses_first_nonzero_entry():
    m = ExactMatrix.from_rows([[ZERO, -W5], [ONE, ZERO]])
    canon, flipped = sign_canonical(m)
    assert flipped and canon.entries[0][1] == W5
    # imaginary tie-break when the real part vanishes
    m2 = ExactMatrix.from_rows([[-IM, ZERO], [ZERO, IM]])
    canon2, flipped2 = sign_canonical(m2)
    assert flipped2 and canon2.entries[0][0] == IM


def test_mermin_dense_sign_identification():
    xy = pauli_to_matrix(PauliOperator.from_label("XY"))
    yx = pauli_to_matrix(PauliOperator.from_label("YX"))
    zz = pauli_to_matrix(PauliOperator.from_label("ZZ"))
    assert sign_canonical(xy * yx)[0] == sign_canonical(zz)[0]


def test_product_sign_on_mermin_square():
    grid = mermin_square()
    dense = [[pauli_to_matrix(p) for p in row] for row in grid]
    for row in dense:
        assert product_sign(row) == ProductSign.PLUS_I
    for j in range(3):
        col = [dense[i][j] for i in range(3)]
        expect = ProductSign.MINUS_I if j == 2 else ProductSign.PLUS_I
        assert product_sign(col) == expect
    assert product_sign([dense[0][0], pauli_to_matrix(PauliOperator.from_label("IY"))]) \
        == ProductSign.NOT_SCALAR


# ---------------------------------------------------------------------------
# Pauli operators
# ---------------------------------------------------------------------------


def test_pauli_product_small_identities():
    x = PauliOperator.from_label("X")
    z = PauliOperator.from_label("Z")
    assert pauli_product([x, x]) == PauliOperator.from_label("I")
    xx = PauliOperator.from_label("XX")
    yy = PauliOperator.from_label("YY")
    zz = PauliOperator.from_label("ZZ")
    assert pauli_product([xx, yy, zz]) == PauliOperator.from_label("II", sign=-1)
    # odd intermediate phases that cancel overall
    assert pauli_product([x, z, x, z]) == PauliOperator.from_label("I", sign=-1)
    with pytest.raises(PhaseError):
        pauli_product([x, z])


def test_pauli_commute_matches_symplectic_form():
    x, z = PauliOperator.from_label("X"), PauliOperator.from_label("Z")
    assert not pauli_commute(x, z)
    assert pauli_commute(PauliOperator.from_label("XI"), PauliOperator.from_label("IX"))
    assert pauli_commute(PauliOperator.from_label("XX"), PauliOperator.from_label("YY"))


def test_pauli_dense_forms_are_binary_observables():
    for code in range(64):
        label = "".join("IXZY"[(code >> (2 * k)) & 3] for k in range(3))
        p = PauliOperator.from_label(label)
        m = pauli_to_matrix(p)
        assert m.dagger() == m
        assert m * m == ExactMatrix.identity(8)
        expect_trace = ExactScalar.from_rational(8 if label == "III" else 0)
        assert m.trace() == expect_trace


def test_pauli_to_matrix_is_explicit_tensor():
    x = ExactMatrix.from_rows([[ZERO, ONE], [ONE, ZERO]])
    y = ExactMatrix.from_rows([[ZERO, -IM], [IM, ZERO]])
    z = ExactMatrix.from_rows([[ONE, ZERO], [ZERO, -ONE]])
    assert pauli_to_matrix(PauliOperator.from_label("X")) == x
    assert pauli_to_matrix(PauliOperator.from_label("Y")) == y
    assert pauli_to_matrix(PauliOperator.from_label("Z")) == z
    assert pauli_to_matrix(PauliOperator.from_label("XY")) == tensor(x, y)
    assert pauli_to_matrix(PauliOperator.from_label("ZX", sign=-1)) == -tensor(z, x)


def test_pauli_products_exhaustive_against_dense_oracle_2q():
    ops = []
    for code in range(16):
        label = "".join("IXZY"[(code >> (2 * k)) & 3] for k in range(2))
        ops.append(PauliOperator.from_label(label))
    for p in ops:
        for q in ops:
            dense = pauli_to_matrix(p) * pauli_to_matrix(q)
            try:
                r = pauli_product([p, q])
            except PhaseError:
                # dense product must be imaginary: +/- i times a sign-free Pauli
                scaled = dense.scale(IM)
                ok = any(
                    scaled == pauli_to_matrix(w).scale(sgn)
                    for w in ops
                    for sgn in (ONE, -ONE)
                )
                assert ok
            else:
                assert dense == pauli_to_matrix(r)


def test_pauli_triple_products_random_against_dense_oracle_3q():
    rng = random.Random(11)
    for _ in range(150):
        labels = ["".join(rng.choice("IXYZ") for _ in range(3)) for _ in range(3)]
        ps = [PauliOperator.from_label(s) for s in labels]
        dense = pauli_to_matrix(ps[0]) * pauli_to_matrix(ps[1]) * pauli_to_matrix(ps[2])
        try:
            r = pauli_product(ps)
        except PhaseError:
            assert dense.scale(IM).dagger() == dense.scale(IM)  # i*M Hermitian: phase odd
        else:
            assert dense == pauli_to_matrix(r)


def test_pauli_product_requires_matching_width_and_input():
    with pytest.raises(ValueError):
        pauli_product([])
    with pytest.raises(ValueError):
        pauli_product([PauliOperator.from_label("X"), PauliOperator.from_label("XX")])


# ---------------------------------------------------------------------------
# Mermin square and interning
# ---------------------------------------------------------------------------


def test_mermin_square_row_and_column_signs():
    grid = mermin_square()
    assert len(grid) == 3 and all(len(row) == 3 for row in grid)
    for row in grid:
        assert pauli_product(list(row)) == PauliOperator.from_label("II")
    for j in range(3):
        col = [grid[i][j] for i in range(3)]
        expect = PauliOperator.from_label("II", sign=-1 if j == 2 else 1)
        assert pauli_product(col) == expect
    flat = [p for row in grid for p in row]
    assert len({(p.x_bits, p.z_bits) for p in flat}) == 9
    assert all(p.sign == 1 for p in flat)


def test_interner_partitions_by_sign_equivalence():
    interner = ObservableInterner()
    grid = [pauli_to_matrix(p) for row in mermin_square() for p in row]
    ids = {}
    for m in grid + [-m for m in grid]:
        oid, flipped = interner.intern(m)
        ids.setdefault(oid, []).append((m, flipped))
    assert len(interner) == 9
    # oracle: pairwise +/- comparison must give the same partition
    for oid, members in ids.items():
        base = members[0][0]
        for m, _ in members[1:]:
            assert m == base or m == -base
    for m in grid:
        oid_plus, f_plus = interner.intern(m)
        oid_minus, f_minus = interner.intern(-m)
        assert oid_plus == oid_minus and f_plus != f_minus
    for oid in range(len(interner)):
        assert sign_canonical(interner.canonical(oid))[0] == interner.canonical(oid)
