from __future__ import annotations

import random

import pytest
from sympy import factorint

from core.bigmod import (
    Factor,
    OracleRequired,
    SemiprimeContext,
    Unit,
    Zero,
    ceil_sqrt,
    crt_combine,
    crt_split,
    gcd,
    inverse_or_factor,
    iroot_floor,
    is_perfect_square,
    isqrt_exact,
    jacobi,
    sieve_primes,
)


@pytest.mark.parametrize("bad", [4, 21, 49, 1, 3839985129719 * 2])
def test_context_rejects_bad_moduli(bad):
    with pytest.raises(ValueError):
        SemiprimeContext(bad)


def test_context_rejects_bad_tuning():
    with pytest.raises(ValueError):
        SemiprimeContext(35, theta=1)
    with pytest.raises(ValueError):
        SemiprimeContext(35, hasse_scale_c=0)


def test_context_oracle_is_validated_and_required():
    ctx = SemiprimeContext(35)
    assert not ctx.has_oracle
    with pytest.raises(OracleRequired):
        ctx.p

    with_oracle = ctx.with_oracle(5, 7)
    assert (with_oracle.p, with_oracle.q) == (5, 7)

    with pytest.raises(ValueError):
        SemiprimeContext(35, oracle=(1, 35))
    with pytest.raises(ValueError):
        SemiprimeContext(5 * 11 * 13, oracle=(5, 143))


def test_inverse_or_factor_three_outcomes():
    assert inverse_or_factor(2, 35) == Unit(18)
    assert inverse_or_factor(14, 35) == Factor(7)
    assert inverse_or_factor(70, 35) == Zero()


def test_jacobi_never_needs_the_factors():
    # (2/5) = -1, (2/7) = +1
    assert jacobi(2, 35) == -1
    assert jacobi(-1, 35) == jacobi(-1, 5) * jacobi(-1, 7)
    assert jacobi(7, 35) == 0
    with pytest.raises(ValueError):
        jacobi(3, 10)


def test_integer_roots_and_gcd():
    assert isqrt_exact(4900) == 70
    assert isqrt_exact(4901) is None
    assert is_perfect_square(1959588 ** 2)
    assert not is_perfect_square(3839985129719)
    assert not is_perfect_square(-4)
    assert ceil_sqrt(49) == 7
    assert ceil_sqrt(50) == 8
    assert iroot_floor(10 ** 12 + 5, 3) == 10 ** 4
    assert gcd(-12, 18) == 6
    with pytest.raises(ValueError):
        gcd(0, 0)


def test_crt_roundtrip_in_oracle_mode():
    ctx = SemiprimeContext(35, oracle=(5, 7))
    assert crt_combine(2, 3, ctx) == 17
    assert crt_split(17, ctx) == (2, 3)
    with pytest.raises(OracleRequired):
        crt_combine(2, 3, SemiprimeContext(35))


def test_sieve_primes():
    assert sieve_primes(10) == (2, 3, 5, 7)
    assert sieve_primes(2) == (2,)
    assert len(sieve_primes(2000)) == 303
    with pytest.raises(ValueError):
        sieve_primes(1)


def _legendre_by_squaring(a: int, r: int) -> int:
    a %= r
    if a == 0:
        return 0
    return 1 if a in {x * x % r for x in range(1, r)} else -1


@pytest.mark.parametrize("n", [3, 5, 7, 13, 15, 35, 45, 143, 221])
def test_jacobi_against_squares(n):
    factors = factorint(n)
    for a in range(-n, 2 * n):
        expected = 1
        for r, e in factors.items():
            expected *= _legendre_by_squaring(a, r) ** e
        assert jacobi(a, n) == expected, (a, n)


def test_jacobi_is_multiplicative():
    rng = random.Random(11)
    for _ in range(500):
        a, b = rng.randrange(-10 ** 12, 10 ** 12), rng.randrange(-10 ** 12, 10 ** 12)
        m, n = 2 * rng.randrange(1, 10 ** 9) + 1, 2 * rng.randrange(1, 10 ** 9) + 1
        assert jacobi(a * b, n) == jacobi(a, n) * jacobi(b, n)
        assert jacobi(a, m * n) == jacobi(a, m) * jacobi(a, n)


def test_isqrt_exact_on_large_squares():
    rng = random.Random(12)
    for _ in range(500):
        s = rng.randrange(1, 2 ** 128)
        assert isqrt_exact(s * s) == s
        assert isqrt_exact(s * s + rng.randint(1, 2 * s)) is None
