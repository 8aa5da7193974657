# core/curve.py
"""
Elliptic curves over Z_N in root form (b1, b2) and short Weierstrass form
(B1, B2), the group law with factor-revealing outcomes, scalar
multiplication, quadratic twists and oracle-mode reductions to F_p, F_q.

Points are affine plus a global identity. Every denominator is tested with a
gcd against N before it is inverted, so a step either yields a point, a proper
divisor of N, or the signal that the result is the identity at both primes.
"""
from __future__ import annotations

import logging
import math
import random
from dataclasses import dataclass
from functools import lru_cache
from typing import Dict, List, Optional, Tuple, Union

import gmpy2
import sympy
from sympy.ntheory import sqrt_mod

from core.bigmod import (
    Factor,
    SemiprimeContext,
    crt_combine,
    gcd,
    jacobi,
)

logger = logging.getLogger("EC2FactorLab.core.curve")

# Group orders of local curves are counted point by point below this size and
# with baby-step giant-step above it.
ENUMERATION_LIMIT = 100_000


# ------------------------------- points --------------------------------------

@dataclass(frozen=True)
class Finite:
    x: int
    y: int


@dataclass(frozen=True)
class Identity:
    """The global point at infinity O = (0:1:0)."""


IDENTITY = Identity()
PointZN = Union[Finite, Identity]


@dataclass(frozen=True)
class PointResult:
    point: PointZN


@dataclass(frozen=True)
class EqualOrdersSignal:
    """A denominator vanished at both primes: the result is O at p and at q."""


AddOutcome = Union[PointResult, Factor, EqualOrdersSignal]


@dataclass
class AdditionTally:
    count: int = 0


# ------------------------------- curves --------------------------------------

@dataclass(frozen=True)
class CurveW:
    """y^2 = x^3 + B1*x + B2 over Z_N."""
    B1: int
    B2: int
    modulus: int

    def __post_init__(self) -> None:
        N = int(self.modulus)
        object.__setattr__(self, "modulus", N)
        object.__setattr__(self, "B1", int(self.B1) % N)
        object.__setattr__(self, "B2", int(self.B2) % N)
        if self.discriminant_gcd() == N:
            raise ValueError(f"Curve ({self.B1}, {self.B2}) is singular modulo every prime of {N}.")

    def discriminant_gcd(self) -> int:
        N = self.modulus
        return gcd((4 * pow(self.B1, 3, N) + 27 * pow(self.B2, 2, N)) % N, N)

    def rhs(self, x: int) -> int:
        N = self.modulus
        return (x * x * x + self.B1 * x + self.B2) % N

    def contains(self, P: PointZN) -> bool:
        if isinstance(P, Identity):
            return True
        return (P.y * P.y - self.rhs(P.x)) % self.modulus == 0

    def reduce(self, r: int) -> "LocalCurve":
        return LocalCurve(self.B1 % r, self.B2 % r, r)


@dataclass(frozen=True)
class CurveE2:
    """y^2 = (x - b1)(x - b2)(x + b1 + b2) over Z_N (full rational 2-torsion)."""
    b1: int
    b2: int
    modulus: int

    def __post_init__(self) -> None:
        N = int(self.modulus)
        object.__setattr__(self, "modulus", N)
        object.__setattr__(self, "b1", int(self.b1) % N)
        object.__setattr__(self, "b2", int(self.b2) % N)
        if self.discriminant_gcd() == N:
            raise ValueError(f"Roots of ({self.b1}, {self.b2}) collide modulo every prime of {N}.")

    @property
    def b3(self) -> int:
        return (-(self.b1 + self.b2)) % self.modulus

    def discriminant_gcd(self) -> int:
        b1, b2, N = self.b1, self.b2, self.modulus
        return gcd(((b1 - b2) * (2 * b1 + b2) * (b1 + 2 * b2)) % N, N)

    def rhs(self, x: int) -> int:
        b1, b2, N = self.b1, self.b2, self.modulus
        return (x - b1) * (x - b2) * (x + b1 + b2) % N

    def contains(self, P: PointZN) -> bool:
        if isinstance(P, Identity):
            return True
        return (P.y * P.y - self.rhs(P.x)) % self.modulus == 0

    def two_torsion(self) -> Tuple[Finite, Finite, Finite]:
        return Finite(self.b1, 0), Finite(self.b2, 0), Finite(self.b3, 0)

    def to_weierstrass(self) -> CurveW:
        return e2_to_weierstrass(self)


AnyCurve = Union[CurveW, CurveE2]


def e2_to_weierstrass(c: CurveE2) -> CurveW:
    # monic cubic with roots summing to zero: no x^2 term
    b1, b2, N = c.b1, c.b2, c.modulus
    return CurveW((b1 * b2 - (b1 + b2) ** 2) % N, (b1 * b2 * (b1 + b2)) % N, N)


def as_weierstrass(c: AnyCurve) -> CurveW:
    return c if isinstance(c, CurveW) else e2_to_weierstrass(c)


# ------------------------------ group law ------------------------------------

def negate(P: PointZN, c: AnyCurve) -> PointZN:
    if isinstance(P, Identity):
        return P
    return Finite(P.x, (-P.y) % c.modulus)


def add(P: PointZN, Q: PointZN, c: AnyCurve) -> AddOutcome:
    """
    Affine sum P + Q over Z_N.

    Every denominator goes through a gcd with N first. A proper divisor means
    the two primes disagree (one sum is O, or chord at one prime and tangent at
    the other) and is returned as a Factor.

    Args:
        P: first summand, affine or the global identity.
        Q: second summand.
        c: curve in either form; root form is converted once.

    Returns:
        PointResult with the sum, Factor(g) with 1 < g < N, or
        EqualOrdersSignal when the sum is O at both primes.
    """
    if isinstance(P, Identity):
        return PointResult(Q)
    if isinstance(Q, Identity):
        return PointResult(P)

    w = as_weierstrass(c)
    N = w.modulus
    dx = (Q.x - P.x) % N
    g1 = gcd(dx, N)
    if 1 < g1 < N:
        return Factor(g1)

    if g1 == 1:
        lam = (Q.y - P.y) * int(gmpy2.invert(dx, N)) % N
    else:
        # same x at both primes: Q = -P or Q = P componentwise
        g2 = gcd((P.y + Q.y) % N, N)
        if g2 == N:
            return EqualOrdersSignal()
        if g2 > 1:
            return Factor(g2)
        two_y = (2 * P.y) % N
        g3 = gcd(two_y, N)
        if g3 == N:
            return EqualOrdersSignal()
        if g3 > 1:
            return Factor(g3)
        lam = (3 * P.x * P.x + w.B1) * int(gmpy2.invert(two_y, N)) % N

    x3 = (lam * lam - P.x - Q.x) % N
    y3 = (lam * (P.x - x3) - P.y) % N
    return PointResult(Finite(x3, y3))


def scalar_mul(
    m: int,
    P: PointZN,
    c: AnyCurve,
    tally: Optional[AdditionTally] = None,
) -> AddOutcome:
    """
    Left-to-right double-and-add.

    A global identity in the middle of the chain is kept as the neutral element;
    a Factor aborts at once. If m*P is the identity the result is
    EqualOrdersSignal, otherwise PointResult(m*P). m = 0 gives PointResult(O).
    """
    if m < 0:
        raise ValueError("scalar must be nonnegative.")
    if m == 0:
        return PointResult(IDENTITY)

    R: PointZN = P
    for bit in bin(m)[3:]:
        out = add(R, R, c)
        if tally is not None:
            tally.count += 1
        if isinstance(out, Factor):
            return out
        R = IDENTITY if isinstance(out, EqualOrdersSignal) else out.point
        if bit == "1":
            out = add(R, P, c)
            if tally is not None:
                tally.count += 1
            if isinstance(out, Factor):
                return out
            R = IDENTITY if isinstance(out, EqualOrdersSignal) else out.point

    if isinstance(R, Identity):
        return EqualOrdersSignal()
    return PointResult(R)


# ------------------------------- twists --------------------------------------

def twist(c: CurveW, tau: int) -> Union[CurveW, Factor]:
    """
    Quadratic twist y^2 = x^3 + tau^2*B1*x + tau^3*B2.

    Args:
        c: curve to twist.
        tau: twist parameter, nonzero modulo N.

    Returns:
        The twisted curve, or Factor when tau shares a prime with N.
    """
    N = c.modulus
    tau %= N
    g = gcd(tau, N)
    if g == N:
        raise ValueError("twist parameter must be nonzero modulo N.")
    if g > 1:
        return Factor(g)
    return CurveW(tau * tau * c.B1, pow(tau, 3, N) * c.B2, N)


def twist_e2(c: CurveE2, tau: int) -> Union[CurveE2, Factor]:
    N = c.modulus
    tau %= N
    g = gcd(tau, N)
    if g == N:
        raise ValueError("twist parameter must be nonzero modulo N.")
    if g > 1:
        return Factor(g)
    return CurveE2(tau * c.b1, tau * c.b2, N)


@dataclass(frozen=True)
class TwistChoice:
    tau: int
    signs: Tuple[int, int]
    within_log_bound: bool


def find_twist(c: CurveW, signs: Tuple[int, int], ctx: SemiprimeContext, limit: int = 1_000_000) -> TwistChoice:
    """
    Least tau >= 1 with Legendre symbols (tau/p, tau/q) == signs (oracle mode).

    The twist by such a tau multiplies the traces by the signs:
    (a_p, a_q) -> (signs[0] * a_p, signs[1] * a_q).
    """
    p, q = ctx.p, ctx.q
    if any(s not in (-1, 1) for s in signs):
        raise ValueError("signs must be a pair of +1/-1.")
    for tau in range(1, limit + 1):
        if jacobi(tau, p) == signs[0] and jacobi(tau, q) == signs[1]:
            return TwistChoice(tau, tuple(signs), tau <= math.log(ctx.N) ** 2)
    raise ValueError(f"no twist parameter below {limit} with signs {signs}.")


# --------------------------- curves over F_r ---------------------------------

LocalPoint = Optional[Tuple[int, int]]  # None is the point at infinity


@dataclass(frozen=True)
class LocalCurve:
    """y^2 = x^3 + A*x + B over the prime field F_r (oracle/test mode)."""
    A: int
    B: int
    r: int

    def rhs(self, x: int) -> int:
        return (x * x * x + self.A * x + self.B) % self.r

    def contains(self, P: LocalPoint) -> bool:
        return P is None or (P[1] * P[1] - self.rhs(P[0])) % self.r == 0

    def is_singular(self) -> bool:
        return (4 * self.A ** 3 + 27 * self.B ** 2) % self.r == 0

    def add(self, P: LocalPoint, Q: LocalPoint) -> LocalPoint:
        if P is None:
            return Q
        if Q is None:
            return P
        r = self.r
        if P[0] == Q[0]:
            if (P[1] + Q[1]) % r == 0:
                return None
            lam = (3 * P[0] * P[0] + self.A) * int(gmpy2.invert(2 * P[1], r)) % r
        else:
            lam = (Q[1] - P[1]) * int(gmpy2.invert(Q[0] - P[0], r)) % r
        x3 = (lam * lam - P[0] - Q[0]) % r
        return x3, (lam * (P[0] - x3) - P[1]) % r

    def mul(self, k: int, P: LocalPoint) -> LocalPoint:
        R: LocalPoint = None
        addend = P
        while k > 0:
            if k & 1:
                R = self.add(R, addend)
            addend = self.add(addend, addend)
            k >>= 1
        return R

    def points(self) -> List[Tuple[int, int]]:
        """All affine points, for small fields."""
        out: List[Tuple[int, int]] = []
        r = self.r
        for x in range(r):
            v = self.rhs(x)
            if v == 0:
                out.append((x, 0))
            elif jacobi(v, r) == 1:
                y = int(sqrt_mod(v, r))
                out.extend(sorted({(x, y), (x, r - y)}))
        return out

    def random_point(self, rng: random.Random) -> Tuple[int, int]:
        r = self.r
        while True:
            x = rng.randrange(r)
            v = self.rhs(x)
            if v == 0:
                return x, 0
            if jacobi(v, r) == 1:
                y = int(sqrt_mod(v, r))
                return x, (y if rng.random() < 0.5 else r - y)

    def group_order(self) -> int:
        return _group_order(self.A, self.B, self.r)

    def trace(self) -> int:
        return self.r + 1 - self.group_order()

    def point_order(self, P: LocalPoint) -> int:
        return self.order_from_multiple(P, self.group_order())

    def order_from_multiple(self, P: LocalPoint, multiple: int) -> int:
        if P is None:
            return 1
        k = multiple
        for l in sympy.factorint(multiple):
            while k % l == 0 and self.mul(k // l, P) is None:
                k //= l
        return k


def _count_points(c: LocalCurve) -> int:
    r = c.r
    total = 1
    for x in range(r):
        total += 1 + jacobi(c.rhs(x), r)
    return total


def _multiple_in_window(c: LocalCurve, P: Tuple[int, int], lo: int, hi: int) -> int:
    """Some k in [lo, hi] with k*P = O, by baby-step giant-step."""
    m = int(gmpy2.isqrt(hi - lo)) + 1
    table: Dict[LocalPoint, int] = {}
    jP: LocalPoint = None
    for j in range(m):
        neg = None if jP is None else (jP[0], (-jP[1]) % c.r)
        table.setdefault(neg, j)
        jP = c.add(jP, P)
    giant = c.mul(m, P)
    S = c.mul(lo, P)
    base = lo
    while base <= hi:
        j = table.get(S)
        if j is not None and 0 < base + j <= hi:
            return base + j
        S = c.add(S, giant)
        base += m
    raise RuntimeError(f"no multiple of the point order in [{lo}, {hi}] (r={c.r}).")


def _bsgs_order(c: LocalCurve, max_points: int = 40) -> Optional[int]:
    r = c.r
    width = int(gmpy2.isqrt(4 * r))
    lo, hi = r + 1 - width, r + 1 + width
    rng = random.Random(f"{c.A}:{c.B}:{r}")
    L = 1
    for _ in range(max_points):
        P = c.random_point(rng)
        k = _multiple_in_window(c, P, lo, hi)
        L = math.lcm(L, c.order_from_multiple(P, k))
        first = -(-lo // L) * L
        if first <= hi and first + L > hi:
            return first
    return None


@lru_cache(maxsize=4096)
def _group_order(A: int, B: int, r: int) -> int:
    c = LocalCurve(A, B, r)
    if r < ENUMERATION_LIMIT:
        return _count_points(c)
    order = _bsgs_order(c)
    if order is None:
        logger.info("BSGS did not pin the order at r=%d; counting points", r)
        order = _count_points(c)
    return order


# ------------------------------ oracle mode ----------------------------------

@dataclass(frozen=True)
class OracleReduction:
    point_p: LocalPoint
    point_q: LocalPoint
    curve_p: LocalCurve
    curve_q: LocalCurve
    group_order_p: int
    group_order_q: int
    trace_p: int
    trace_q: int
    order_p: int
    order_q: int


def oracle_reduce(P: PointZN, c: AnyCurve, ctx: SemiprimeContext) -> OracleReduction:
    p, q = ctx.p, ctx.q
    w = as_weierstrass(c)
    cp, cq = w.reduce(p), w.reduce(q)
    if isinstance(P, Identity):
        Pp: LocalPoint = None
        Pq: LocalPoint = None
    else:
        Pp, Pq = (P.x % p, P.y % p), (P.x % q, P.y % q)
    Ep, Eq = cp.group_order(), cq.group_order()
    return OracleReduction(
        point_p=Pp,
        point_q=Pq,
        curve_p=cp,
        curve_q=cq,
        group_order_p=Ep,
        group_order_q=Eq,
        trace_p=p + 1 - Ep,
        trace_q=q + 1 - Eq,
        order_p=cp.order_from_multiple(Pp, Ep),
        order_q=cq.order_from_multiple(Pq, Eq),
    )


def crt_point(Pp: Tuple[int, int], Pq: Tuple[int, int], ctx: SemiprimeContext) -> Finite:
    """Glue two affine local points into one point over Z_N."""
    return Finite(crt_combine(Pp[0], Pq[0], ctx), crt_combine(Pp[1], Pq[1], ctx))
