# core/triples.py
"""
Admissible triples (x, y, b1) on the even-order family, Knapp's halving
criterion and the oracle-mode separation predicates.

Attack mode draws triples through a rational parametrization that only needs
inversions mod N:

    c  = t^2 / (x - b1)
    b2 = (c*x - x - b1) / (1 + c)
    y  = t * (x - b2)

Since x + b1 + b2 = c*(x - b2), the right-hand side equals
c*(x - b1)*(x - b2)^2 = y^2, so the point lies on its curve identically.
Oracle mode additionally solves u^2 + b1*u - K = 0 for the second root.
"""
from __future__ import annotations

import itertools
import logging
import math
import random
from dataclasses import dataclass
from typing import Dict, List, Optional, Tuple, Union

import gmpy2
from sympy.ntheory import sqrt_mod

from core.bigmod import (
    Factor,
    ModulusLike,
    SemiprimeContext,
    Zero,
    _modulus,
    crt_combine,
    gcd,
    inverse_or_factor,
    jacobi,
)
from core.curve import CurveE2, CurveW, Finite, oracle_reduce

logger = logging.getLogger("EC2FactorLab.core.triples")

DEFAULT_MAX_DRAWS = 10_000
SWEEP_LIMIT = 20_000
EXHAUSTIVE_LIMIT = 150


class DrawBudgetExceeded(RuntimeError):
    """No admissible triple was found within the draw budget."""


def nu2(n: int) -> int:
    if n == 0:
        raise ValueError("nu2(0) is undefined.")
    return int(gmpy2.bit_scan1(abs(n)))


def nondegenerate_gcd(b1: int, b2: int, N: int) -> int:
    """gcd((b2 - b1)(2*b1 + b2)(2*b2 + b1), N)."""
    return gcd(((b2 - b1) * (2 * b1 + b2) * (2 * b2 + b1)) % N, N)


# ------------------------------- triples -------------------------------------

@dataclass(frozen=True)
class AdmissibleTriple:
    x: int
    y: int
    b1: int
    b2: int
    modulus: int
    draws: int = 1

    def __post_init__(self) -> None:
        N = self.modulus
        if jacobi(self.x - self.b1, N) != -1:
            raise ValueError("jacobi(x - b1, N) must be -1.")
        if nondegenerate_gcd(self.b1, self.b2, N) != 1:
            raise ValueError("the three roots must stay distinct modulo every prime of N.")
        if not self.curve.contains(self.point):
            raise ValueError("(x, y) is not on the curve defined by (b1, b2).")

    @property
    def curve(self) -> CurveE2:
        return CurveE2(self.b1, self.b2, self.modulus)

    @property
    def weierstrass(self) -> CurveW:
        return self.curve.to_weierstrass()

    @property
    def point(self) -> Finite:
        return Finite(self.x % self.modulus, self.y % self.modulus)


def generate_triple(
    ctx: ModulusLike,
    rng: random.Random,
    max_draws: int = DEFAULT_MAX_DRAWS,
) -> Union[AdmissibleTriple, Factor]:
    N = _modulus(ctx)
    for draw in range(1, max_draws + 1):
        x, b1, t = rng.randrange(N), rng.randrange(N), rng.randrange(N)
        u = (x - b1) % N
        j = jacobi(u, N)
        if j == 0:
            if u != 0:
                return Factor(gcd(u, N))
            continue
        if j == 1:
            continue

        c = t * t * int(gmpy2.invert(u, N)) % N
        den = inverse_or_factor(1 + c, N)
        if isinstance(den, Factor):
            return den
        if isinstance(den, Zero):
            continue
        b2 = (c * x - x - b1) * den.inverse % N
        y = t * (x - b2) % N

        g = nondegenerate_gcd(b1, b2, N)
        if 1 < g < N:
            return Factor(g)
        if g == N:
            continue
        logger.debug("admissible triple after %d draws", draw)
        return AdmissibleTriple(x, y, b1, b2, N, draw)
    raise DrawBudgetExceeded(f"no admissible triple in {max_draws} draws.")


def jacobi_split_frequency(ctx: ModulusLike, samples: int, seed: int = 0) -> float:
    """Share of uniform (x, b1) draws with jacobi(x - b1, N) == -1."""
    if samples <= 0:
        raise ValueError("samples must be positive.")
    N = _modulus(ctx)
    rng = random.Random(seed)
    hits = sum(1 for _ in range(samples) if jacobi(rng.randrange(N) - rng.randrange(N), N) == -1)
    return hits / samples


# ----------------------------- second root -----------------------------------

@dataclass(frozen=True)
class NotSquare:
    """The discriminant is a non-residue modulo at least one prime."""
    at_prime: int


@dataclass(frozen=True)
class B2Roots:
    roots: Tuple[int, ...]
    discriminant: int


def solve_b2_quadratic(x: int, y: int, b1: int, ctx: SemiprimeContext) -> Union[B2Roots, NotSquare, Factor]:
    """
    All roots u mod N of u^2 + b1*u - (x^2 + x*b1 - y^2/(x - b1)).

    Each root gives a curve through (x, y) with roots b1, u. Square roots are
    taken componentwise and glued, so up to four roots come back.
    """
    p, q = ctx.p, ctx.q
    N = ctx.N
    inv = inverse_or_factor(x - b1, N)
    if isinstance(inv, Factor):
        return inv
    if isinstance(inv, Zero):
        raise ValueError("x must differ from b1 modulo N.")
    K = (x * x + x * b1 - y * y * inv.inverse) % N
    disc = (b1 * b1 + 4 * K) % N

    local: Dict[int, List[int]] = {}
    for r in (p, q):
        dr = disc % r
        half = (r + 1) // 2
        if dr == 0:
            local[r] = [(-b1) * half % r]
            continue
        if jacobi(dr, r) == -1:
            return NotSquare(r)
        s = int(sqrt_mod(dr, r))
        local[r] = sorted({(-b1 + s) * half % r, (-b1 - s) * half % r})

    roots = sorted({crt_combine(up, uq, ctx) for up, uq in itertools.product(local[p], local[q])})
    return B2Roots(tuple(roots), disc)


# ------------------------------- halving -------------------------------------

def is_halvable(point: Tuple[int, int], b1: int, b2: int, r: int) -> bool:
    """Knapp: (x, y) = 2*P for some P over F_r iff x-b1, x-b2, x+b1+b2 are squares (0 included)."""
    x = point[0]
    return all(jacobi(v, r) != -1 for v in (x - b1, x - b2, x + b1 + b2))


# ------------------------- separation predicates -----------------------------

@dataclass(frozen=True)
class SeparationPredicateReport:
    legendre_p: int
    legendre_q: int
    e4: int
    nu2_p: int
    nu2_q: int
    nu2_Ep: int
    nu2_Eq: int

    @property
    def applicable(self) -> bool:
        return self.nu2_Ep >= self.nu2_Eq and self.legendre_p == -1 and self.legendre_q == 1

    @property
    def lhs(self) -> bool:
        return self.nu2_p > self.nu2_q

    @property
    def rhs(self) -> bool:
        return self.e4 == 1

    @property
    def agrees(self) -> Optional[bool]:
        if not self.applicable:
            return None
        return self.lhs == self.rhs


def theorem1_predicate(tr: AdmissibleTriple, ctx: SemiprimeContext) -> SeparationPredicateReport:
    """Both sides of the sign-split biconditional, evaluated from ground truth."""
    red = oracle_reduce(tr.point, tr.curve, ctx)
    return SeparationPredicateReport(
        legendre_p=jacobi(tr.x - tr.b1, ctx.p),
        legendre_q=jacobi(tr.x - tr.b1, ctx.q),
        e4=jacobi(tr.x - tr.b2, ctx.q),
        nu2_p=nu2(red.order_p),
        nu2_q=nu2(red.order_q),
        nu2_Ep=nu2(red.group_order_p),
        nu2_Eq=nu2(red.group_order_q),
    )


@dataclass(frozen=True)
class Theorem1Sweep:
    admissible_points: int
    applicable: int
    agree: int
    disagree: int


def _local_profile(b1: int, b2: int, r: int) -> Tuple[int, List[Tuple[Tuple[int, int], int]]]:
    c = CurveE2(b1, b2, r).to_weierstrass().reduce(r)
    E = c.group_order()
    return E, [(P, nu2(c.order_from_multiple(P, E))) for P in c.points()]


def sweep_theorem1(ctx: SemiprimeContext) -> Theorem1Sweep:
    """
    Exhaustive check over every nondegenerate (b1, b2) mod N and every affine
    point with jacobi(x - b1, N) == -1. Meant for N below SWEEP_LIMIT.
    """
    N, p, q = ctx.N, ctx.p, ctx.q
    if N > SWEEP_LIMIT:
        raise ValueError(f"sweep_theorem1 enumerates Z_N^2; N must be at most {SWEEP_LIMIT}.")
    total = applicable = agree = disagree = 0
    for b1 in range(N):
        for b2 in range(N):
            if nondegenerate_gcd(b1, b2, N) != 1:
                continue
            Ep, pts_p = _local_profile(b1, b2, p)
            Eq, pts_q = _local_profile(b1, b2, q)
            for (Pp, np_), (Pq, nq_) in itertools.product(pts_p, pts_q):
                lp, lq = jacobi(Pp[0] - b1, p), jacobi(Pq[0] - b1, q)
                if lp * lq != -1:
                    continue
                total += 1
                report = SeparationPredicateReport(lp, lq, jacobi(Pq[0] - b2, q), np_, nq_, nu2(Ep), nu2(Eq))
                if not report.applicable:
                    continue
                applicable += 1
                if report.agrees:
                    agree += 1
                else:
                    disagree += 1
    logger.info("sweep N=%d: %d points, %d applicable, %d agree, %d disagree",
                N, total, applicable, agree, disagree)
    return Theorem1Sweep(total, applicable, agree, disagree)


# --------------------------- separating fraction -----------------------------

@dataclass(frozen=True)
class FractionEstimate:
    hits: int
    admissible: int
    samples: int
    frequency: float
    half_width: float


def _classify_uniform(x: int, y: int, b1: int, ctx: SemiprimeContext) -> Tuple[bool, bool]:
    """(admissible, separating) for a raw triple from Z_N^3."""
    N = ctx.N
    if jacobi(x - b1, N) != -1:
        return False, False
    solved = solve_b2_quadratic(x, y, b1, ctx)
    if not isinstance(solved, B2Roots):
        return False, False
    admissible = False
    for b2 in solved.roots:
        if nondegenerate_gcd(b1, b2, N) != 1:
            continue
        admissible = True
        red = oracle_reduce(Finite(x, y), CurveE2(b1, b2, N), ctx)
        if nu2(red.order_p) != nu2(red.order_q):
            return True, True
    return admissible, False


def _estimate(hits: int, admissible: int, samples: int) -> FractionEstimate:
    f = hits / samples
    half = 1.96 * math.sqrt(f * (1 - f) / samples)
    return FractionEstimate(hits, admissible, samples, f, half)


def estimate_separating_fraction(
    ctx: SemiprimeContext,
    samples: int,
    seed: int = 0,
    sampling: str = "uniform",
) -> FractionEstimate:
    """
    Monte-Carlo share of separating triples with a 95% binomial half-width.

    uniform:      (x, y, b1) drawn from Z_N^3; hits are admissible triples
                  whose 2-adic point orders differ at p and q.
    parametrized: triples from generate_triple(); a Factor counts as a hit.
    """
    if samples <= 0:
        raise ValueError("samples must be positive.")
    if sampling not in ("uniform", "parametrized"):
        raise ValueError(f"unknown sampling mode {sampling!r}.")
    rng = random.Random(seed)
    N = ctx.N
    hits = admissible = 0
    for _ in range(samples):
        if sampling == "uniform":
            adm, sep = _classify_uniform(rng.randrange(N), rng.randrange(N), rng.randrange(N), ctx)
        else:
            tr = generate_triple(ctx, rng)
            if isinstance(tr, Factor):
                adm, sep = True, True
            else:
                red = oracle_reduce(tr.point, tr.curve, ctx)
                adm, sep = True, nu2(red.order_p) != nu2(red.order_q)
        admissible += adm
        hits += sep
    return _estimate(hits, admissible, samples)


def exhaustive_separating_fraction(ctx: SemiprimeContext) -> FractionEstimate:
    """Exact share over all of Z_N^3 (tiny N only)."""
    N = ctx.N
    if N > EXHAUSTIVE_LIMIT:
        raise ValueError(f"exhaustive enumeration needs N <= {EXHAUSTIVE_LIMIT}.")
    hits = admissible = 0
    for x, y, b1 in itertools.product(range(N), repeat=3):
        adm, sep = _classify_uniform(x, y, b1, ctx)
        admissible += adm
        hits += sep
    return FractionEstimate(hits, admissible, N ** 3, hits / N ** 3, 0.0)
