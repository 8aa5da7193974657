# core/bigmod.py
"""
Modular arithmetic over Z_N for a two-prime modulus N = pq.

Everything that divides by a residue goes through inverse_or_factor(): a
non-invertible denominator is not an error here, it is the factor we are
looking for. Residues are normalised to [0, N) on entry.

The optional oracle (p, q) exists for test mode only (CRT, reductions,
ground truth). The attack path never reads it.
"""
from __future__ import annotations

import logging
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from typing import Optional, Tuple, Union

import gmpy2
import sympy

logger = logging.getLogger("EC2FactorLab.core.bigmod")


class OracleRequired(RuntimeError):
    """An oracle-only operation was called on a context without (p, q)."""


# ------------------------------ context --------------------------------------

@dataclass(frozen=True)
class SemiprimeContext:
    """
    The modulus under attack plus its tuning constants.

    N:              odd, coprime to 6, not a perfect square
    theta:          balance bound, p < q < theta * p
    hasse_scale_c:  scale of the Hasse window, r = ceil(c * sqrt(N))
    oracle:         (p, q) with p * q == N, test mode only
    """
    N: int
    theta: Fraction = Fraction(4)
    hasse_scale_c: Fraction = Fraction(1)
    oracle: Optional[Tuple[int, int]] = None

    def __post_init__(self) -> None:
        N = int(self.N)
        object.__setattr__(self, "N", N)
        object.__setattr__(self, "theta", Fraction(self.theta))
        object.__setattr__(self, "hasse_scale_c", Fraction(self.hasse_scale_c))

        if N < 5 or N % 2 == 0 or N % 3 == 0:
            raise ValueError(f"N must be odd, coprime to 6 and at least 5 (got {N}).")
        if is_perfect_square(N):
            raise ValueError(f"N = {N} is a perfect square, not a product of distinct primes.")
        if self.theta <= 1:
            raise ValueError("theta must be greater than 1.")
        if self.hasse_scale_c <= 0:
            raise ValueError("hasse_scale_c must be positive.")

        if self.oracle is not None:
            p, q = (int(v) for v in self.oracle)
            object.__setattr__(self, "oracle", (p, q))
            if p * q != N or p == q or min(p, q) <= 3:
                raise ValueError(f"Oracle ({p}, {q}) is not a factorization of N into distinct primes > 3.")
            if not (sympy.isprime(p) and sympy.isprime(q)):
                raise ValueError(f"Oracle ({p}, {q}) contains a composite.")

    @property
    def has_oracle(self) -> bool:
        return self.oracle is not None

    @property
    def p(self) -> int:
        return self._require_oracle()[0]

    @property
    def q(self) -> int:
        return self._require_oracle()[1]

    def _require_oracle(self) -> Tuple[int, int]:
        if self.oracle is None:
            raise OracleRequired("This operation needs the oracle factorization (test mode).")
        return self.oracle

    def with_oracle(self, p: int, q: int) -> "SemiprimeContext":
        return SemiprimeContext(self.N, self.theta, self.hasse_scale_c, (p, q))


ModulusLike = Union[int, SemiprimeContext]


def _modulus(m: ModulusLike) -> int:
    return m.N if isinstance(m, SemiprimeContext) else int(m)


# --------------------------- inversion outcomes ------------------------------

@dataclass(frozen=True)
class Unit:
    inverse: int


@dataclass(frozen=True)
class Factor:
    """A proper divisor g of N, 1 < g < N."""
    g: int


@dataclass(frozen=True)
class Zero:
    pass


InverseOutcome = Union[Unit, Factor, Zero]


# ------------------------------ primitives -----------------------------------

def gcd(a: int, b: int) -> int:
    if a == 0 and b == 0:
        raise ValueError("gcd(0, 0) is undefined.")
    return int(gmpy2.gcd(a, b))


def inverse_or_factor(a: int, ctx: ModulusLike) -> InverseOutcome:
    N = _modulus(ctx)
    a %= N
    if a == 0:
        return Zero()
    g = int(gmpy2.gcd(a, N))
    if g == 1:
        return Unit(int(gmpy2.invert(a, N)))
    return Factor(g)


def jacobi(a: int, n: int) -> int:
    """Jacobi symbol (a/n) for odd positive n, by reciprocity (never factors n)."""
    if n <= 0 or n % 2 == 0:
        raise ValueError(f"Jacobi symbol needs an odd positive modulus (got {n}).")
    return int(gmpy2.jacobi(a % n, n))


def isqrt_exact(a: int) -> Optional[int]:
    if a < 0:
        raise ValueError("isqrt_exact needs a nonnegative argument.")
    s, rem = gmpy2.isqrt_rem(a)
    return int(s) if rem == 0 else None


def is_perfect_square(a: int) -> bool:
    return a >= 0 and bool(gmpy2.is_square(a))


def ceil_sqrt(a: int) -> int:
    s = int(gmpy2.isqrt(a))
    return s if s * s == a else s + 1


def iroot_floor(a: int, k: int) -> int:
    root, _exact = gmpy2.iroot(a, k)
    return int(root)


def crt_combine(a_p: int, a_q: int, ctx: SemiprimeContext) -> int:
    """
    The residue mod N that reduces to a_p mod p and a_q mod q.

    Args:
        a_p: residue modulo p.
        a_q: residue modulo q.
        ctx: context carrying the oracle factors.

    Raises:
        OracleRequired: when ctx has no (p, q).
    """
    p, q = ctx._require_oracle()
    h = ((a_q - a_p) * int(gmpy2.invert(p, q))) % q
    return (a_p + p * h) % ctx.N


def crt_split(a: int, ctx: SemiprimeContext) -> Tuple[int, int]:
    p, q = ctx._require_oracle()
    return a % p, a % q


@lru_cache(maxsize=16)
def sieve_primes(bound: int) -> Tuple[int, ...]:
    """Primes <= bound in ascending order."""
    if bound < 2:
        raise ValueError(f"sieve bound must be at least 2 (got {bound}).")
    primes = tuple(int(l) for l in sympy.primerange(2, bound + 1))
    logger.debug("sieved %d primes up to %d", len(primes), bound)
    return primes
