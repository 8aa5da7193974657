# core/multiplier.py
"""
Hasse windows, decomposition multipliers M_t and order recovery.

M_t = prod_{l <= t} l^nu_l, where nu_l is the largest exponent with l^nu_l
inside the Hasse window. staged_multiply() applies the prime powers in
ascending order to a point, so the first prime at which the point leaves the
affine part is t_min. recover_order() then pins down the common order d, or
finds the factor that the order split exposes.
"""
from __future__ import annotations

import logging
from dataclasses import dataclass
from fractions import Fraction
from typing import List, Optional, Sequence, Tuple, Union

import gmpy2

from core.bigmod import Factor, SemiprimeContext, ceil_sqrt, sieve_primes
from core.curve import (
    AdditionTally,
    AnyCurve,
    EqualOrdersSignal,
    Finite,
    Identity,
    IDENTITY,
    PointZN,
    as_weierstrass,
    scalar_mul,
)

logger = logging.getLogger("EC2FactorLab.core.multiplier")

Factorization = Tuple[Tuple[int, int], ...]


def factorization_value(factors: Sequence[Tuple[int, int]]) -> int:
    value = 1
    for l, e in factors:
        value *= l ** e
    return value


# ------------------------------- windows -------------------------------------

@dataclass(frozen=True)
class HasseWindow:
    r: int
    bound: int

    def __post_init__(self) -> None:
        if self.r < 2 or self.bound <= self.r:
            raise ValueError(f"invalid Hasse window r={self.r}, bound={self.bound}.")

    @classmethod
    def from_scale(cls, r: int) -> "HasseWindow":
        # floor(r + 1 + 2*sqrt(r)) computed exactly
        return cls(r, r + 1 + int(gmpy2.isqrt(4 * r)))

    @classmethod
    def from_modulus(cls, N: int, c: Fraction = Fraction(1)) -> "HasseWindow":
        c = Fraction(c)
        # ceil(c * sqrt(N)) = ceil(ceil(sqrt(a^2 N)) / b) for c = a/b
        s = ceil_sqrt(c.numerator ** 2 * N)
        r = -(-s // c.denominator)
        return cls.from_scale(max(r, 2))

    @classmethod
    def from_context(cls, ctx: SemiprimeContext) -> "HasseWindow":
        return cls.from_modulus(ctx.N, ctx.hasse_scale_c)


def hasse_exponent(l: int, w: HasseWindow) -> int:
    """
    Largest k with l^k <= w.bound.

    Args:
        l: prime, at least 2.
        w: Hasse window.

    Returns:
        The exponent nu_l, 0 when l itself is above the window.
    """
    if l < 2:
        raise ValueError("l must be at least 2.")
    k, power = 0, l
    while power <= w.bound:
        k += 1
        power *= l
    return k


@dataclass(frozen=True)
class Multiplier:
    t: int
    factors: Factorization
    value: int

    @property
    def bits(self) -> int:
        return self.value.bit_length()


def build_multiplier(t: int, w: HasseWindow) -> Multiplier:
    """
    M_t, the product of l^nu_l over the primes l <= t.

    Args:
        t: prime bound, at least 2.
        w: Hasse window fixing the exponents.

    Returns:
        Multiplier with the factorization and its value.
    """
    if t < 2:
        raise ValueError("t must be at least 2.")
    factors = tuple((l, hasse_exponent(l, w)) for l in sieve_primes(t))
    factors = tuple((l, e) for l, e in factors if e > 0)
    return Multiplier(t, factors, factorization_value(factors))


# ---------------------------- separation report ------------------------------

@dataclass(frozen=True)
class Separated:
    g: int
    at_prime: int
    t_min: int
    additions: int = 0


@dataclass(frozen=True)
class NonSeparating:
    t_min: int
    order: Factorization
    additions: int = 0

    @property
    def d(self) -> int:
        return factorization_value(self.order)


@dataclass(frozen=True)
class StillFinite:
    t_max: int
    point: PointZN
    additions: int = 0


SeparationReport = Union[Separated, NonSeparating, StillFinite]


def staged_multiply(
    curve: AnyCurve,
    Q: PointZN,
    t_max: int,
    w: HasseWindow,
) -> SeparationReport:
    """
    Multiply Q by l^nu_l for l = 2, 3, 5, ... up to t_max.

    Returns:
        Separated when a step exposes a factor, NonSeparating with t_min and
        the common order when Q reaches O at both primes together, else
        StillFinite.
    """
    if not isinstance(Q, Finite):
        raise ValueError("staged_multiply needs a finite starting point.")
    curve = as_weierstrass(curve)
    tally = AdditionTally()
    R: PointZN = Q
    for l in sieve_primes(t_max):
        e = hasse_exponent(l, w)
        if e == 0:
            # every later prime lies outside the window as well
            break
        out = scalar_mul(l ** e, R, curve, tally)
        if isinstance(out, Factor):
            logger.debug("factor %d at stage l=%d", out.g, l)
            return Separated(out.g, l, l, tally.count)
        if isinstance(out, EqualOrdersSignal):
            logger.debug("both orders are %d-smooth; recovering d", l)
            return recover_order(curve, Q, l, w, tally)
        R = out.point
    return StillFinite(t_max, R, tally.count)


# ------------------------------ order recovery -------------------------------

class _FactorFound(Exception):
    def __init__(self, g: int, at_prime: int):
        super().__init__(g, at_prime)
        self.g = g
        self.at_prime = at_prime


def recover_order(
    curve: AnyCurve,
    Q: PointZN,
    B: int,
    w: HasseWindow,
    tally: Optional[AdditionTally] = None,
) -> Union[Separated, NonSeparating]:
    """
    Exponent of every prime l <= B in the common order of Q mod p and mod q.

    For each l, M' = M_B / l^nu_l is applied first (shared through a product
    tree), then l is applied one step at a time until the point becomes the
    global identity. A factor on the way means the l-parts of the two local
    orders differ.
    """
    curve = as_weierstrass(curve)
    tally = tally if tally is not None else AdditionTally()
    powers = [(l, hasse_exponent(l, w)) for l in sieve_primes(B)]
    powers = [(l, e) for l, e in powers if e > 0]
    exponents: List[Tuple[int, int]] = []
    try:
        _descend(curve, Q, powers, exponents, tally)
    except _FactorFound as hit:
        return Separated(hit.g, hit.at_prime, B, tally.count)
    order = tuple(sorted((l, e) for l, e in exponents if e > 0))
    logger.debug("recovered order %s", order)
    return NonSeparating(B, order, tally.count)


def _descend(
    curve,
    R: PointZN,
    powers: List[Tuple[int, int]],
    exponents: List[Tuple[int, int]],
    tally: AdditionTally,
) -> None:
    # R is Q multiplied by every prime power outside `powers`
    if isinstance(R, Identity):
        exponents.extend((l, 0) for l, _ in powers)
        return
    if len(powers) == 1:
        l, e = powers[0]
        exponents.append((l, _leaf_exponent(curve, R, l, e, tally)))
        return
    half = len(powers) // 2
    left, right = powers[:half], powers[half:]
    _descend(curve, _apply(curve, R, right, tally, left[0][0]), left, exponents, tally)
    _descend(curve, _apply(curve, R, left, tally, right[0][0]), right, exponents, tally)


def _apply(curve, R: PointZN, powers, tally: AdditionTally, at_prime: int) -> PointZN:
    out = scalar_mul(factorization_value(powers), R, curve, tally)
    if isinstance(out, Factor):
        raise _FactorFound(out.g, at_prime)
    if isinstance(out, EqualOrdersSignal):
        return IDENTITY
    return out.point


def _leaf_exponent(curve, R: PointZN, l: int, e: int, tally: AdditionTally) -> int:
    for j in range(1, e + 1):
        out = scalar_mul(l, R, curve, tally)
        if isinstance(out, Factor):
            raise _FactorFound(out.g, l)
        if isinstance(out, EqualOrdersSignal):
            return j
        R = out.point
    raise ValueError(f"M_B * Q is still finite after the full power of {l}; no signal to recover.")
