import numpy as np
import pytest

from eulercs.errors import DivisionByZero, FieldTooLarge, InvalidPrime
from eulercs.fields import (build_field, field_inv, find_irreducible, is_prime)

SMALL_PRIMES = [2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41, 43, 47, 53, 59, 61]


def test_find_irreducible_degree_one_is_x():
    assert find_irreducible(2, 1) == [0, 1]
    assert find_irreducible(7, 1) == [0, 1]


def test_find_irreducible_gf4():
    # x^2 + x + 1; the other three monic quadratics over GF(2) have roots
    assert find_irreducible(2, 2) == [1, 1, 1]


def test_find_irreducible_gf9():
    # x^2 + 1 has no root mod 3
    assert find_irreducible(3, 2) == [1, 0, 1]


def test_find_irreducible_rejects_composite():
    with pytest.raises(InvalidPrime):
        find_irreducible(4, 2)


def test_gf2_is_xor_and():
    F = build_field(2, 1)
    for a in range(2):
        for b in range(2):
            assert F.add(a, b) == a ^ b
            assert F.mul(a, b) == a & b


def test_gf4_multiplication():
    F = build_field(2, 2)
    assert F.mul(2, 2) == 3  # x * x = x + 1 mod x^2+x+1


def test_gf5_matches_mod5():
    F = build_field(5, 1)
    assert F.add(3, 4) == 2
    assert F.mul(3, 4) == 2


@pytest.mark.parametrize("p", SMALL_PRIMES)
def test_prime_fields_are_mod_p(p):
    F = build_field(p, 1)
    a = np.arange(p)
    assert np.array_equal(F.add_table, (a[:, None] + a[None, :]) % p)
    assert np.array_equal(F.mul_table, (a[:, None] * a[None, :]) % p)


def test_field_cap():
    with pytest.raises(FieldTooLarge):
        build_field(2, 5, cap=16)


def test_inverse_examples():
    assert field_inv(build_field(5, 1), 2) == 3
    assert field_inv(build_field(2, 2), 2) == 3
    assert field_inv(build_field(7, 1), 1) == 1


def test_inverse_of_zero_raises():
    with pytest.raises(DivisionByZero):
        field_inv(build_field(5, 1), 0)


def check_field_axioms(F):
    """Exhaustive abelian-group + distributivity check over all triples."""
    q = F.q
    add, mul = F.add_table, F.mul_table
    assert np.array_equal(add, add.T)
    assert np.array_equal(mul, mul.T)
    assert np.array_equal(add[0], np.arange(q))
    assert np.array_equal(mul[1], np.arange(q))
    assert np.array_equal(mul[0], np.zeros(q, dtype=np.int64))
    # every element has an additive inverse; every nonzero a multiplicative one
    assert all((add[a] == 0).any() for a in range(q))
    assert all((mul[a] == 1).any() for a in range(1, q))
    # nonzero elements closed under multiplication
    assert (mul[1:, 1:] != 0).all()
    a = np.arange(q)
    A, B, C = np.ix_(a, a, a)
    assert np.array_equal(add[add[A, B], C], add[A, add[B, C]])
    assert np.array_equal(mul[mul[A, B], C], mul[A, mul[B, C]])
    assert np.array_equal(mul[A, add[B, C]], add[mul[A, B], mul[A, C]])


@pytest.mark.parametrize("p,r", [(2, 2), (2, 3), (3, 2), (5, 2), (2, 4),
                                 (3, 3), (7, 2), (2, 5), (2, 6)])
def test_extension_field_axioms(p, r):
    check_field_axioms(build_field(p, r))


def test_is_prime_small():
    primes = {n for n in range(200) if is_prime(n)}
    assert 2 in primes and 97 in primes
    assert all(not is_prime(a * b) for a in range(2, 14) for b in range(2, 14))
