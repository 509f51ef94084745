"""Tests for the exact ring backends and the alternative-ring toolkit."""

from __future__ import annotations

import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from rootforge.algebra import (
    NotInvertible,
    alternative_identity_suite,
    associator,
    cayley_dickson_double,
    integers,
    inv_alter_check,
    matrix_ring,
    nucleus_member,
    polynomial_ring,
    product_ring,
    split_octonion_iso,
    try_invert,
    zmod,
    zorn,
    zorn_basis,
)


def test_modular_arithmetic_is_canonical_and_exact():
    ring = zmod(7)
    a = ring.from_int(5)
    b = ring.from_int(4)
    assert a + b == ring.from_int(2)
    assert a - b == ring.one
    assert a * b == ring.from_int(6)
    assert -a == ring.from_int(2)
    assert a + 3 == ring.one  # ints coerce
    assert 3 * a == ring.one
    assert a ** 0 == ring.one
    assert a ** 2 == ring.from_int(4)
    assert ring.from_int(-1) == ring.from_int(6)
    assert list(ring.elements()) == [ring.from_int(i) for i in range(7)]


def test_try_invert_returns_values_not_exceptions():
    assert try_invert(zmod(5).from_int(2)) == zmod(5).from_int(3)
    failure = try_invert(integers().from_int(2))
    assert isinstance(failure, NotInvertible)
    assert failure.witness == 2
    zero_divisor = try_invert(zmod(4).from_int(2))
    assert isinstance(zero_divisor, NotInvertible)
    assert zero_divisor.witness == 2  # 2 * 2 = 0 mod 4
    assert try_invert(integers().from_int(-1)) == integers().from_int(-1)


def test_negative_powers_go_through_the_inverse():
    ring = zmod(11)
    x = ring.from_int(3)
    assert x ** -1 == ring.from_int(4)
    assert x ** -2 == ring.from_int(5)
    with pytest.raises(NotInvertible):
        zmod(4).from_int(2) ** -1


def test_elements_of_different_backends_do_not_mix():
    with pytest.raises(ValueError):
        zmod(5).one + zmod(7).one
    with pytest.raises(ValueError):
        associator(zmod(5).one, zmod(5).one, zmod(7).one)


def test_matrix_ring_inverts_units_and_certifies_singular_matrices():
    M = matrix_ring(zmod(5), 3)
    rng = random.Random(0)
    found = 0
    while found < 25:
        x = M.sample(rng)
        inv = try_invert(x)
        if isinstance(inv, NotInvertible):
            continue
        assert x * inv == M.one and inv * x == M.one
        found += 1
    singular = M.from_rows([[1, 2, 0], [2, 4, 0], [0, 0, 1]])
    failure = try_invert(singular)
    assert isinstance(failure, NotInvertible)
    assert failure.witness[0] == "column"


def test_matrix_star_is_the_transpose_antiautomorphism():
    M = matrix_ring(zmod(7), 2)
    rng = random.Random(1)
    for _ in range(30):
        x, y = M.sample(rng), M.sample(rng)
        assert (x * y).star() == y.star() * x.star()
        assert x.star().star() == x
    assert sum(1 for _ in matrix_ring(zmod(2), 2).elements()) == 16


def test_polynomial_backend_multiplies_and_inverts_monomials():
    P = polynomial_ring(integers())
    lam = P.variable_power(1)
    expr = (lam + 1) * (lam ** -1 + 1)
    assert expr == lam + 2 + lam ** -1
    assert try_invert(lam ** 3) == lam ** -3
    assert try_invert(-lam) == -(lam ** -1)
    failure = try_invert(lam + 1)
    assert isinstance(failure, NotInvertible)
    scaled = try_invert(P.variable_power(2, coeff=2))
    assert isinstance(scaled, NotInvertible)  # 2 is not a unit in Z


def test_polynomial_star_inverts_the_variable():
    P = polynomial_ring(integers())
    lam = P.variable_power(1)
    x = 3 * lam ** 2 - lam + 1
    assert x.star() == 3 * lam ** -2 - lam ** -1 + 1
    assert x.star().star() == x


@settings(max_examples=50, deadline=None)
@given(st.lists(st.tuples(st.integers(-3, 3), st.integers(-4, 4)), max_size=4),
       st.lists(st.tuples(st.integers(-3, 3), st.integers(-4, 4)), max_size=4))
def test_polynomial_star_is_an_antiautomorphism(terms_a, terms_b):
    P = polynomial_ring(integers())
    a = P.element(tuple((e, c) for e, c in terms_a))
    b = P.element(tuple((e, c) for e, c in terms_b))
    assert (a * b).star() == b.star() * a.star()
    assert (a + b).star() == a.star() + b.star()


ZORN_EPSILON = {(0, 1, 2): 1, (1, 2, 0): 1, (2, 0, 1): 1,
                (1, 0, 2): -1, (0, 2, 1): -1, (2, 1, 0): -1}


def test_zorn_basis_satisfies_the_split_octonion_table():
    ring = zorn(zmod(7))
    e, f, u = zorn_basis(ring)[0], zorn_basis(ring)[1], zorn_basis(ring)[2:5]
    v = zorn_basis(ring)[5:]
    zero = ring.zero
    assert e * e == e and f * f == f and e * f == zero and f * e == zero
    assert e + f == ring.one
    for i in range(3):
        assert e * u[i] == u[i] and u[i] * f == u[i]
        assert u[i] * e == zero and f * u[i] == zero
        assert f * v[i] == v[i] and v[i] * e == v[i]
        assert e * v[i] == zero and v[i] * f == zero
        for j in range(3):
            eps = ZORN_EPSILON.get((i, j, 3 - i - j), 0) if i != j else 0
            k = 3 - i - j if i != j else 0
            assert u[i] * u[j] == (eps * v[k] if eps else zero)
            assert v[i] * v[j] == (-eps * u[k] if eps else zero)
            assert u[i] * v[j] == (e if i == j else zero)
            assert v[j] * u[i] == (f if i == j else zero)


def test_zorn_norm_is_multiplicative_and_controls_inversion():
    ring = zorn(zmod(5))
    rng = random.Random(2)
    for _ in range(200):
        x, y = ring.sample(rng), ring.sample(rng)
        assert ring.scalar_norm(x * y) == ring.scalar_norm(x) * ring.scalar_norm(y)
        assert x * x.star() == x.star() * x
        inv = try_invert(x)
        if isinstance(inv, NotInvertible):
            assert ring.scalar_norm(x) == zmod(5).zero
        else:
            assert x * inv == ring.one and inv * x == ring.one
    nilpotent = zorn_basis(ring)[2]
    failure = try_invert(nilpotent)
    assert isinstance(failure, NotInvertible)


def test_zorn_trace_and_conjugation_are_scalar_valued():
    ring = zorn(zmod(5))
    rng = random.Random(3)
    for _ in range(50):
        x = ring.sample(rng)
        trace = x + x.star()
        a, v, w, b = trace.payload
        assert v == (0, 0, 0) and w == (0, 0, 0) and a == b
        norm = x.norm()
        a, v, w, b = norm.payload
        assert v == (0, 0, 0) and w == (0, 0, 0) and a == b
        assert a == ring.scalar_norm(x).payload


@settings(max_examples=60, deadline=None)
@given(st.lists(st.integers(0, 4), min_size=24, max_size=24))
def test_zorn_satisfies_the_middle_moufang_identity(flat):
    ring = zorn(zmod(5))
    x = ring.from_coords(flat[0:8])
    y = ring.from_coords(flat[8:16])
    z = ring.from_coords(flat[16:24])
    assert (x * y) * (z * x) == (x * (y * z)) * x


def test_alternative_suite_is_exhaustive_on_small_commutative_rings():
    report = alternative_identity_suite(zmod(3), budget=30)
    assert report.ok and report.exhaustive and report.checked == 27
    as_dict = report.to_dict()
    assert as_dict["ok"] and as_dict["failures"] == []


def test_alternative_suite_accepts_split_octonions():
    report = alternative_identity_suite(zorn(zmod(3)), budget=500, seed=5)
    assert report.ok
    assert not report.exhaustive and report.checked == 500


def test_alternative_suite_rejects_the_sedenion_double():
    sedenions = cayley_dickson_double(zorn(zmod(3)), 1)
    report = alternative_identity_suite(sedenions, budget=400, seed=6)
    assert not report.ok
    assert report.failures[0]["witness"]


class _CorruptedZorn(type(zorn(zmod(3)))):
    """A Zorn backend with one sign error planted in the product."""

    def _mul(self, p, q):
        a, v, w, b = super()._mul(p, q)
        return (a, v, (self.base._neg(w[0]), w[1], w[2]), b)


def test_alternative_suite_detects_a_planted_sign_error():
    report = alternative_identity_suite(_CorruptedZorn(zmod(3)), budget=400, seed=7)
    assert not report.ok
    names = {f["identity"] for f in report.failures}
    assert names - {"associator skew-symmetry"}, names


def test_nucleus_membership_separates_scalars_from_generic_elements():
    ring = zorn(zmod(3))
    assert nucleus_member(ring, ring.from_int(2), budget=600, seed=8)
    assert not nucleus_member(ring, zorn_basis(ring)[2], budget=600, seed=8)
    M = matrix_ring(zmod(3), 2)
    rng = random.Random(9)
    for _ in range(5):
        assert nucleus_member(M, M.sample(rng), budget=200, seed=10)


def test_inversion_lemma_on_a_worked_modular_pair():
    ring = zmod(5)
    x, y = ring.one, ring.from_int(2)
    u_inv = try_invert(ring.one + x * y)  # 1 + xy = 3, inverse 2
    assert u_inv == ring.from_int(2)
    assert ring.one - (y * u_inv) * x == ring.from_int(2)  # (1+yx)^{-1}
    report = inv_alter_check(x, y, budget=5)
    assert report.ok and report.exhaustive is False


def test_inversion_lemma_over_split_octonions():
    ring = zorn(zmod(7))
    rng = random.Random(11)
    verified = 0
    while verified < 15:
        x, y = ring.sample(rng), ring.sample(rng)
        if isinstance(try_invert(ring.one + x * y), NotInvertible):
            continue
        report = inv_alter_check(x, y, budget=40, seed=12)
        assert report.ok, report.failures
        verified += 1


def test_inversion_lemma_reports_failed_preconditions():
    ring = zmod(4)
    report = inv_alter_check(ring.one, ring.one, budget=4)
    assert not report.ok
    assert report.failures[0]["identity"].startswith("precondition")


def test_cayley_dickson_pairs_multiply_by_the_doubling_formula():
    K = zmod(7)
    D = cayley_dickson_double(K, 1)
    a, b, c, d = (K.from_int(v) for v in (2, 3, 4, 5))
    prod = D.from_pair(a, b) * D.from_pair(c, d)
    # over a commutative base with trivial star: (ac + db, da + bc)
    assert prod == D.from_pair(a * c + d * b, d * a + b * c)
    x = D.from_pair(a, b)
    assert x.star() == D.from_pair(a, -b)
    assert x * try_invert(x) == D.one


def test_cayley_dickson_tower_stays_alternative_through_dimension_eight():
    K = zmod(3)
    four_dim = cayley_dickson_double(cayley_dickson_double(K, 1), 1)
    eight_dim = cayley_dickson_double(four_dim, 1)
    assert alternative_identity_suite(four_dim, budget=300, seed=13).ok
    assert alternative_identity_suite(eight_dim, budget=300, seed=14).ok
    rng = random.Random(15)
    for _ in range(100):
        x, y = eight_dim.sample(rng), eight_dim.sample(rng)
        assert (x * y).norm() == x.norm() * y.norm()
        assert (x * y).star() == y.star() * x.star()


def test_product_ring_operates_componentwise():
    P = product_ring([zmod(3), zmod(5)])
    x = P.element((2, 4))
    y = P.element((2, 2))
    assert x * y == P.element((1, 3))
    assert x + y == P.element((1, 1))
    assert try_invert(x) == P.element((2, 4))
    failure = try_invert(P.element((0, 2)))
    assert isinstance(failure, NotInvertible)
    assert failure.witness[0] == 0
    assert P.size == 15 and len(list(P.elements())) == 15


def _cayley_dickson_octonion_coordinates(modulus):
    K = zmod(modulus)
    level1 = cayley_dickson_double(K, 1)
    level2 = cayley_dickson_double(level1, 1)
    level3 = cayley_dickson_double(level2, 1)

    def flatten(p, depth=3):
        if depth == 0:
            return [p]
        return flatten(p[0], depth - 1) + flatten(p[1], depth - 1)

    def unflatten(coords, depth=3):
        if depth == 0:
            return coords[0]
        half = len(coords) // 2
        return (unflatten(coords[:half], depth - 1),
                unflatten(coords[half:], depth - 1))

    def mul(u, v):
        return flatten(level3._mul(unflatten(list(u)), unflatten(list(v))))

    return K, flatten(level3._one()), mul


def test_split_octonion_recognition_of_the_cayley_dickson_tower():
    K, one_coords, mul = _cayley_dickson_octonion_coordinates(5)
    iso = split_octonion_iso(K, one_coords, mul)
    rng = random.Random(16)
    for _ in range(150):
        u = [rng.randrange(5) for _ in range(8)]
        v = [rng.randrange(5) for _ in range(8)]
        assert iso.to_zorn(mul(u, v)) == iso.to_zorn(u) * iso.to_zorn(v)
        assert list(iso.from_zorn(iso.to_zorn(u))) == u
    assert iso.to_zorn(one_coords) == iso.zorn.one


def test_split_octonion_recognition_is_stable_under_a_change_of_basis():
    field = zmod(3)
    ring = zorn(field)
    M8 = matrix_ring(field, 8)
    rng = random.Random(17)
    while True:  # a random unimodular coordinate change
        change = M8.sample(rng)
        change_inv = try_invert(change)
        if not isinstance(change_inv, NotInvertible):
            break

    def apply(matrix, coords):
        rows = matrix.payload
        return [sum(r * c for r, c in zip(row, coords)) % 3 for row in rows]

    def mul(u, v):
        left = ring.from_coords(apply(change_inv, u))
        right = ring.from_coords(apply(change_inv, v))
        return apply(change, ring.coords(left * right))

    one_coords = apply(change, ring.coords(ring.one))
    iso = split_octonion_iso(field, one_coords, mul)
    for _ in range(100):
        u = [rng.randrange(3) for _ in range(8)]
        v = [rng.randrange(3) for _ in range(8)]
        assert iso.to_zorn(mul(u, v)) == iso.to_zorn(u) * iso.to_zorn(v)


def test_split_octonion_recognition_rejects_non_composition_algebras():
    K = zmod(5)

    def mul(u, v):  # componentwise product: wrong Peirce shape
        return [(a * b) % 5 for a, b in zip(u, v)]

    with pytest.raises((ValueError, AssertionError)):
        split_octonion_iso(K, [1] * 8, mul)
