# core/consistent.py
"""
Non-separating decomposition: when Q has the same order d modulo p and q,
N written in base d is the product (d*r_p + t_p)(d*r_q + t_q) and the digit
quadratic c2*x^2 + c1*x + c0 has the rational roots -t_p/r_p and -t_q/r_q.
"""
from __future__ import annotations

import logging
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterator, List, Optional, Tuple, Union

from core.bigmod import gcd, iroot_floor, isqrt_exact

logger = logging.getLogger("EC2FactorLab.core.consistent")

Digits = Tuple[int, int, int]

# (k1, k2): c0 += k1*d, c1 += k2*d - k1, c2 -= k2; canonical digits first
CARRIES: Tuple[Tuple[int, int], ...] = (
    (0, 0),
    (1, 0), (-1, 0), (0, 1), (0, -1),
    (1, 1), (1, -1), (-1, 1), (-1, -1),
)

# attempts kept on a report; the sweep itself may be longer
ATTEMPT_LOG = 64


def carry_bounds(N: int, d: int, theta: Fraction = Fraction(4)) -> Tuple[int, int]:
    """
    Largest |k1| and |k2| a true digit pattern can need.

    With p < q < theta*p every trace obeys |t_r| <= 2*sqrt(q_max) + 1, so
    |c0| = |t_p*t_q| and |c1| = |r_p*t_q + r_q*t_p| are bounded, and the
    carries follow by dividing those bounds by d.

    Args:
        N: the modulus.
        d: common point order, base of the digits.
        theta: balance bound between the two primes.

    Returns:
        (K1, K2), both at least 1.
    """
    theta = Fraction(theta)
    q_max = iroot_floor(N * theta.numerator // theta.denominator, 2) + 1
    t_max = 2 * iroot_floor(q_max, 2) + 2
    r_max = (q_max + t_max) // d + 1
    k1 = t_max * t_max // d + 2
    k2 = (2 * r_max * t_max + k1) // d + 2
    return k1, k2


def carry_sweep(k1_max: int, k2_max: int) -> Iterator[Tuple[int, int]]:
    """CARRIES first, then every other (k1, k2) in the box by growing size."""
    yield from CARRIES
    rest = [
        (k1, k2)
        for k1 in range(-k1_max, k1_max + 1)
        for k2 in range(-k2_max, k2_max + 1)
        if max(abs(k1), abs(k2)) > 1
    ]
    rest.sort(key=lambda k: (max(abs(k[0]), abs(k[1])), abs(k[0]) + abs(k[1]), k))
    yield from rest


def digits_base_d(N: int, d: int) -> Digits:
    """
    Canonical base-d digits of N.

    Args:
        N: the modulus.
        d: base, with d^2 <= N < d^3.

    Returns:
        (c2, c1, c0) with N = c0 + c1*d + c2*d^2 and 0 <= c_i < d.

    Raises:
        ValueError: when N does not have exactly three digits in base d.
    """
    if d < 2:
        raise ValueError("d must be at least 2.")
    if d * d > N:
        raise ValueError(f"d = {d} exceeds sqrt(N); the leading digit would be zero.")
    if d ** 3 <= N:
        raise ValueError(f"N needs more than three digits in base {d}.")
    rest, c0 = divmod(N, d)
    c2, c1 = divmod(rest, d)
    return c2, c1, c0


@dataclass(frozen=True)
class DigitSolution:
    r_p: int
    t_p: int
    r_q: int
    t_q: int
    p: int
    q: int


def solve_digit_quadratic(
    c2: int,
    c1: int,
    c0: int,
    d: int,
    N: int,
    allow_negative_traces: bool = False,
) -> Optional[DigitSolution]:
    """
    Rational roots -t/r of c2*x^2 + c1*x + c0 and the primes d*r + t.

    Returns None unless both roots are rational with t >= 1 (any nonzero t
    when allow_negative_traces is set) and the two candidates multiply to N.
    """
    if c2 < 1:
        raise ValueError("leading digit c2 must be at least 1.")
    disc = c1 * c1 - 4 * c2 * c0
    if disc < 0:
        return None
    s = isqrt_exact(disc)
    if s is None:
        return None

    pairs: List[Tuple[int, int]] = []
    for root in (Fraction(-c1 + s, 2 * c2), Fraction(-c1 - s, 2 * c2)):
        r, t = root.denominator, -root.numerator
        if t == 0 or (t < 0 and not allow_negative_traces):
            return None
        pairs.append((r, t))

    (r_p, t_p), (r_q, t_q) = pairs
    p, q = d * r_p + t_p, d * r_q + t_q
    if p <= 1 or q <= 1 or p == q or p * q != N:
        return None
    if p > q:
        r_p, t_p, r_q, t_q, p, q = r_q, t_q, r_p, t_p, q, p
    return DigitSolution(r_p, t_p, r_q, t_q, p, q)


# ------------------------------ decomposition --------------------------------

@dataclass(frozen=True)
class Factored:
    p: int
    q: int
    digits: Optional[Digits] = None
    solution: Optional[DigitSolution] = None


@dataclass(frozen=True)
class NotConsistent:
    reason: str


@dataclass
class DecomposeReport:
    d: int
    result: Union[Factored, NotConsistent]
    attempts: List[Digits] = field(default_factory=list)
    tried: int = 0

    @property
    def ok(self) -> bool:
        return isinstance(self.result, Factored)

    def record(self, digits: Digits) -> None:
        self.tried += 1
        if len(self.attempts) < ATTEMPT_LOG:
            self.attempts.append(digits)


def _raw_digits(N: int, d: int) -> Digits:
    rest, c0 = divmod(N, d)
    c2, c1 = divmod(rest, d)
    return c2, c1, c0


def consistent_decompose(N: int, d: int, theta: Fraction = Fraction(4)) -> DecomposeReport:
    """
    Split N from the common order d by sweeping carries over its base-d digits.

    The canonical digits come first, then the eight single carries, then the
    remaining carries allowed by carry_bounds. A negative trace turns a digit
    negative, which is what the larger carries absorb.

    Args:
        N: the modulus.
        d: common order of Q modulo p and q.
        theta: balance bound p < q < theta*p, sizes the sweep.

    Returns:
        DecomposeReport whose result is Factored (p * q == N) or NotConsistent.
    """
    if d < 2:
        raise ValueError("d must be at least 2.")
    g = gcd(d, N)
    if 1 < g < N:
        p, q = sorted((g, N // g))
        logger.info("d shares the factor %d with N", g)
        return DecomposeReport(d, Factored(p, q))
    if d ** 3 <= N:
        return DecomposeReport(d, NotConsistent(f"d = {d} is below the cube root of N"))

    report = DecomposeReport(d, NotConsistent("no digit pattern gave rational roots"))
    c2, c1, c0 = _raw_digits(N, d)
    for k1, k2 in carry_sweep(*carry_bounds(N, d, theta)):
        digits = (c2 - k2, c1 - k1 + k2 * d, c0 + k1 * d)
        if digits[0] < 1:
            continue
        report.record(digits)
        sol = solve_digit_quadratic(*digits, d, N, allow_negative_traces=True)
        if sol is not None:
            logger.debug("digits %s split N (carry %d, %d)", digits, k1, k2)
            report.result = Factored(sol.p, sol.q, digits, sol)
            return report
    logger.debug("no carry split N over %d digit patterns (d=%d)", report.tried, d)
    return report


def giant_step_coppersmith_prepass(N: int, d: int, B: int) -> List[int]:
    """Approximations k*d - 1 of a prime, one per hypothesis E_r = k*d, k <= B."""
    if d < 1 or B < 1:
        raise ValueError("d and B must be positive.")
    if (d * B) ** 2 < N:
        raise ValueError("d * B must be at least sqrt(N).")
    return [k * d - 1 for k in range(1, B + 1)]
