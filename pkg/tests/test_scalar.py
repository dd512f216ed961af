from fractions import Fraction

import pytest
from hypothesis import given, strategies as st

from geomforge.scalar import (
    GF, H, FieldAuto, Quaternion, Sigma, apply_sigma, format_quaternion, is_irreducible,
    parse_quaternion, parse_scalar_structure, quat_norm,
)

ORDERS = [2, 3, 4, 5, 7, 8, 9, 16, 25, 27]

rationals = st.fractions(min_value=-20, max_value=20, max_denominator=12)
quaternions = st.builds(Quaternion, rationals, rationals, rationals, rationals)
nonzero_quaternions = quaternions.filter(bool)


def test_prime_field_gf2():
    F = GF(2)
    assert list(F.elements()) == [0, 1]
    assert F.add(1, 1) == 0


def test_gf4_modulus_is_the_only_irreducible_quadratic():
    F = GF(2, 2)
    assert F.modulus == (1, 1, 1)
    quadratics = [(a, b, 1) for a in range(2) for b in range(2)]
    assert [m for m in quadratics if is_irreducible(m, 2)] == [(1, 1, 1)]


def test_gf9_multiplicative_group_cyclic():
    F = GF(3, 2)
    g = F.primitive
    powers = {F.pow(g, i) for i in range(8)}
    assert powers == set(F.nonzero())


@pytest.mark.parametrize("q", ORDERS)
def test_field_axioms_exhaustive(q):
    F = GF(q)
    els = list(F.elements())
    for a in els:
        assert F.add(a, F.neg(a)) == 0
        if a:
            assert F.mul(a, F.inv(a)) == 1
    for a in els[:6]:
        for b in els:
            for c in els[:6]:
                assert F.mul(a, F.add(b, c)) == F.add(F.mul(a, b), F.mul(a, c))
                assert F.mul(F.mul(a, b), c) == F.mul(a, F.mul(b, c))


@pytest.mark.parametrize("q", ORDERS)
def test_frobenius_orbits_divide_degree(q):
    F = GF(q)
    for a in F.elements():
        orbit = {a}
        x = F.frobenius(a)
        while x != a:
            orbit.add(x)
            x = F.frobenius(x)
        assert F.k % len(orbit) == 0


@pytest.mark.parametrize("q", [4, 8, 9, 27])
def test_automorphism_group_cyclic_of_order_k(q):
    F = GF(q)
    sigma = FieldAuto(F, 1)
    assert sigma.order == F.k
    composed = FieldAuto(F, 0)
    for _ in range(F.k):
        composed = composed.compose(sigma)
    assert composed.is_identity
    assert all(sigma.inverse()(sigma(a)) == a for a in F.elements())


def test_gf4_frobenius_swaps_omega():
    F = GF(4)
    omega = 2
    assert F.frobenius(omega) == F.mul(omega, omega)
    assert F.frobenius(F.frobenius(omega)) == omega


def test_identity_sigma_over_gf2():
    assert all(apply_sigma(a, Sigma.identity(), GF(2)) == a for a in (0, 1))


def test_conjugation_negates_i():
    i = parse_quaternion("i")
    assert apply_sigma(i, Sigma.conjugation(), H) == -i


def test_field_codes_stable():
    assert [GF(8).mul(3, b) for b in range(8)] == [GF(2, 3).mul(3, b) for b in range(8)]
    # x^3 + x^2 + 1 precedes x^3 + x + 1 when coefficients are read low degree first
    assert GF(8).modulus == (1, 0, 1, 1)


def test_rejects_bad_orders():
    with pytest.raises(ValueError):
        GF(6)
    with pytest.raises(ValueError):
        GF(4, 1)


def test_prime_field_parse_reduces():
    assert GF(3).parse("-1") == 2
    assert GF(5).parse("7") == 2
    with pytest.raises(ValueError):
        GF(4).parse("4")


def test_norms():
    assert quat_norm(H.one) == 1
    assert quat_norm(parse_quaternion("i+j")) == 2


def test_quaternion_units_relations():
    i, j, k = (parse_quaternion(s) for s in "ijk")
    assert i * j == k and j * k == i and k * i == j
    assert i * j == -(j * i)
    assert i * i == Quaternion(-1)


def test_quaternion_literals_round_trip():
    for text in ["0", "1", "-3/4", "i", "1/2-i+3/2j-k", "2+7k"]:
        assert parse_quaternion(format_quaternion(parse_quaternion(text))) == parse_quaternion(text)
    assert parse_quaternion("1/2+i") == Quaternion(Fraction(1, 2), 1, 0, 0)


def test_scalar_structure_names():
    assert parse_scalar_structure("GF(9)") == GF(9)
    assert parse_scalar_structure("GF(3^2)") == GF(9)
    assert parse_scalar_structure("H(Q)") is H
    with pytest.raises(ValueError):
        parse_scalar_structure("R")


@given(quaternions, quaternions)
def test_norm_multiplicative(x, y):
    assert quat_norm(x * y) == quat_norm(x) * quat_norm(y)


@given(nonzero_quaternions)
def test_inverse_and_its_norm(x):
    assert x * x.inverse() == H.one == x.inverse() * x
    assert quat_norm(x.inverse()) == 1 / quat_norm(x)


@given(quaternions, quaternions, quaternions)
def test_quaternion_associative(x, y, z):
    assert (x * y) * z == x * (y * z)


@given(quaternions)
def test_conjugation_is_an_involution(x):
    s = Sigma.conjugation()
    assert apply_sigma(apply_sigma(x, s, H), s, H) == x


@given(quaternions, quaternions)
def test_conjugation_reverses_products(x, y):
    assert (x * y).conj() == y.conj() * x.conj()


@given(st.sampled_from(ORDERS), st.data())
def test_frobenius_is_a_ring_map(q, data):
    F = GF(q)
    a = data.draw(st.integers(0, q - 1))
    b = data.draw(st.integers(0, q - 1))
    assert F.frobenius(F.add(a, b)) == F.add(F.frobenius(a), F.frobenius(b))
    assert F.frobenius(F.mul(a, b)) == F.mul(F.frobenius(a), F.frobenius(b))
