# core/smallroots.py
"""
Factoring with known high bits: given p_tilde with |p - p_tilde| <= X for an
unknown divisor p of N, find p.

The lattice is spanned by the shifted polynomials

    x^max(0, i-m) * (x + p_tilde)^min(i, m) * N^max(0, m-i),   i < m + t

evaluated at x*X. Each of them vanishes modulo p^m at x0 = p - p_tilde, so a
short enough reduced vector is an integer polynomial with x0 as a true root.
Radii larger than one lattice can handle are split into consecutive chunks.
"""
from __future__ import annotations

import logging
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, List, Optional, Sequence, Tuple

import sympy

from core.bigmod import ceil_sqrt, iroot_floor
from core.consistent import giant_step_coppersmith_prepass
from infra.pool import ordered_map, spawn_pool

logger = logging.getLogger("EC2FactorLab.core.smallroots")

DEFAULT_M = 3
DEFAULT_T = 4
# below this chunk exponent the interval is scanned directly
MIN_CHUNK_BITS = 3


# --------------------------------- LLL ---------------------------------------

@dataclass(frozen=True)
class IntegerLattice:
    basis: tuple

    def __post_init__(self) -> None:
        rows = tuple(tuple(int(v) for v in row) for row in self.basis)
        if not rows or any(len(r) != len(rows[0]) for r in rows):
            raise ValueError("lattice basis must be a non-empty list of equal-length rows.")
        object.__setattr__(self, "basis", rows)
        gram = sympy.Matrix(rows) * sympy.Matrix(rows).T
        if gram.det() == 0:
            raise ValueError("lattice basis rows are linearly dependent.")

    @classmethod
    def from_rows(cls, rows: Sequence[Sequence[int]]) -> "IntegerLattice":
        return cls(tuple(tuple(r) for r in rows))

    @property
    def dimension(self) -> int:
        return len(self.basis)

    def rows(self) -> List[List[int]]:
        return [list(r) for r in self.basis]


def _dot(a: Sequence[int], b: Sequence[int]) -> int:
    return sum(x * y for x, y in zip(a, b))


def lll_reduce(L: IntegerLattice, delta: Fraction = Fraction(3, 4)) -> IntegerLattice:
    """
    Integral LLL: Gram-Schmidt data kept as integers d_i and lambda_ij, so
    every step is exact. Output is size-reduced and satisfies the Lovasz
    condition with the given delta.
    """
    delta = Fraction(delta)
    if not Fraction(1, 4) < delta <= 1:
        raise ValueError("delta must lie in (1/4, 1].")
    n = L.dimension
    if n == 1:
        return L
    dn, dd = delta.numerator, delta.denominator

    b = [None] + L.rows()  # 1-based
    d = [0] * (n + 1)
    d[0] = 1
    lam = [[0] * (n + 1) for _ in range(n + 1)]
    d[1] = _dot(b[1], b[1])
    k, kmax = 2, 1

    def reduce(k: int, l: int) -> None:
        if 2 * abs(lam[k][l]) > d[l]:
            qq = (2 * lam[k][l] + d[l]) // (2 * d[l])
            b[k] = [u - qq * v for u, v in zip(b[k], b[l])]
            lam[k][l] -= qq * d[l]
            for i in range(1, l):
                lam[k][i] -= qq * lam[l][i]

    def swap(k: int) -> None:
        b[k], b[k - 1] = b[k - 1], b[k]
        for j in range(1, k - 1):
            lam[k][j], lam[k - 1][j] = lam[k - 1][j], lam[k][j]
        l = lam[k][k - 1]
        B = (d[k - 2] * d[k] + l * l) // d[k - 1]
        for i in range(k + 1, kmax + 1):
            t = lam[i][k]
            lam[i][k] = (d[k] * lam[i][k - 1] - l * t) // d[k - 1]
            lam[i][k - 1] = (B * t + l * lam[i][k]) // d[k]
        d[k - 1] = B

    while k <= n:
        if k > kmax:
            kmax = k
            for j in range(1, k + 1):
                u = _dot(b[k], b[j])
                for i in range(1, j):
                    u = (d[i] * u - lam[k][i] * lam[j][i]) // d[i - 1]
                if j < k:
                    lam[k][j] = u
                else:
                    if u == 0:
                        raise ValueError("lattice basis rows are linearly dependent.")
                    d[k] = u
        reduce(k, k - 1)
        if dd * d[k] * d[k - 2] < dn * d[k - 1] ** 2 - dd * lam[k][k - 1] ** 2:
            swap(k)
            k = max(2, k - 1)
        else:
            for l in range(k - 2, 0, -1):
                reduce(k, l)
            k += 1
    return IntegerLattice.from_rows(b[1:])


# ---------------------------- integer roots ----------------------------------

def _eval(coeffs: Sequence[int], x: int) -> int:
    acc = 0
    for c in reversed(coeffs):
        acc = acc * x + c
    return acc


def _trim(coeffs: Sequence[int]) -> List[int]:
    out = list(coeffs)
    while out and out[-1] == 0:
        out.pop()
    return out


def _sign(v: int) -> int:
    return (v > 0) - (v < 0)


def _crossings(coeffs: List[int], lo: int, hi: int) -> List[int]:
    """Integers a in [lo, hi] where h(a) == 0 or h changes sign on (a, a+1)."""
    h = _trim(coeffs)
    if len(h) <= 1:
        return []
    derivative = [c * i for i, c in enumerate(h)][1:]
    breakpoints = {lo, hi}
    for a in _crossings(derivative, lo, hi):
        breakpoints.add(a)
        if a + 1 <= hi:
            breakpoints.add(a + 1)
    pts = sorted(breakpoints)
    found = set()
    for i, u in enumerate(pts):
        if _eval(h, u) == 0:
            found.add(u)
        if i + 1 == len(pts):
            break
        v = pts[i + 1]
        su, sv = _sign(_eval(h, u)), _sign(_eval(h, v))
        if su and sv and su != sv:
            while v - u > 1:
                mid = (u + v) // 2
                sm = _sign(_eval(h, mid))
                if sm == 0:
                    u = mid
                    break
                if sm == su:
                    u = mid
                else:
                    v = mid
            found.add(u)
    return sorted(found)


def integer_roots(coeffs: Sequence[int], lo: int, hi: int) -> List[int]:
    """Integer roots in [lo, hi] of the polynomial sum(coeffs[k] * x^k)."""
    h = _trim(coeffs)
    if not h:
        raise ValueError("the zero polynomial has every integer as a root.")
    return [a for a in _crossings(h, lo, hi) if _eval(h, a) == 0]


# ---------------------------- high-bits lattice ------------------------------

@dataclass(frozen=True)
class HighBitsInstance:
    N: int
    p_tilde: int
    X: int

    def __post_init__(self) -> None:
        if not 0 <= self.X < self.p_tilde < self.N:
            raise ValueError(f"need 0 <= X < p_tilde < N (got X={self.X}, p_tilde={self.p_tilde}).")

    @classmethod
    def from_approximation(cls, N: int, approx: int, radius: int) -> "HighBitsInstance":
        """Clamp the radius so the search interval stays positive."""
        if not 1 < approx < N:
            raise ValueError("approximation must lie strictly between 1 and N.")
        return cls(N, approx, max(0, min(radius, approx - 1)))

    @property
    def interval(self):
        return self.p_tilde - self.X, self.p_tilde + self.X


def lattice_radius(N: int, p_low: int, m: int = DEFAULT_M, t: int = DEFAULT_T) -> int:
    """
    Largest power of two that one lattice of dimension m + t is guaranteed to
    cover for a divisor p >= p_low. Zero means: too small, scan instead.
    """
    n = m + t
    bits = (2 / (n - 1)) * (
        m * (p_low.bit_length() - 1)
        - m * (m + 1) / (2 * n) * N.bit_length()
        - 0.5 * math.log2(n)
        - (n - 1) / 4
    )
    e = math.floor(bits) - 1
    return 0 if e < MIN_CHUNK_BITS else 1 << e


def shifted_polynomial_basis(N: int, p_tilde: int, X: int, m: int = DEFAULT_M, t: int = DEFAULT_T) -> List[List[int]]:
    x = sympy.Symbol("x")
    n = m + t
    rows: List[List[int]] = []
    for i in range(n):
        poly = sympy.Poly(x ** max(0, i - m) * (x + p_tilde) ** min(i, m) * N ** max(0, m - i), x)
        coeffs = [int(c) for c in reversed(poly.all_coeffs())]
        rows.append([coeffs[k] * X ** k if k < len(coeffs) else 0 for k in range(n)])
    return rows


def _attempt(N: int, center: int, Xc: int, m: int, t: int) -> List[int]:
    reduced = lll_reduce(IntegerLattice.from_rows(shifted_polynomial_basis(N, center, Xc, m, t)))
    found: List[int] = []
    for vec in reduced.rows()[:2]:
        coeffs = []
        for k, v in enumerate(vec):
            c, rem = divmod(v, Xc ** k)
            if rem:
                break
            coeffs.append(c)
        else:
            if not _trim(coeffs):
                continue
            for r in integer_roots(coeffs, -Xc, Xc):
                p = center + r
                if 1 < p < N and N % p == 0:
                    found.append(p)
    return found


def factor_high_bits(
    inst: HighBitsInstance,
    m: int = DEFAULT_M,
    t: int = DEFAULT_T,
    should_stop: Optional[Callable[[], bool]] = None,
) -> Optional[int]:
    """Divisor p of N with |p - p_tilde| <= X, or None."""
    N = inst.N
    lo, hi = inst.interval
    Xc = lattice_radius(N, max(lo, 2), m, t)
    if Xc == 0:
        for p in range(max(lo, 2), hi + 1):
            if N % p == 0 and p < N:
                return p
        return None

    center, chunks = lo + Xc, 0
    while center - Xc <= hi:
        if should_stop is not None and should_stop():
            return None
        chunks += 1
        hits = [p for p in _attempt(N, center, Xc, m, t) if lo <= p <= hi]
        if hits:
            logger.debug("high-bits hit %d after %d lattice(s)", hits[0], chunks)
            return min(hits)
        center += 2 * Xc + 1
    return None


# ------------------------------- bridge --------------------------------------

@dataclass(frozen=True)
class BridgeHit:
    p: int
    q: int
    k: int


def corollary_radius(N: int) -> int:
    """ceil(2 * N^(1/4)) + 1."""
    return ceil_sqrt(4 * ceil_sqrt(N)) + 1


def _bridge_job(args: Tuple[int, int, int]) -> Optional[int]:
    N, approx, X = args
    return factor_high_bits(HighBitsInstance.from_approximation(N, approx, X))


def corollary_bridge(
    N: int,
    d: int,
    B: int,
    theta: Fraction = Fraction(4),
    should_stop: Optional[Callable[[], bool]] = None,
    workers: int = 1,
) -> Optional[BridgeHit]:
    """
    Run the high-bits search on p_tilde = k*d - 1 for k = 1..B.

    Candidates outside the balanced range of theta are skipped. With workers > 1
    the candidates run in batches of `workers` on a spawn pool; the smallest
    hitting k wins either way, so the result does not depend on the pool.

    Args:
        N: the modulus.
        d: common order, every E_r = k*d is a hypothesis.
        B: largest cofactor k tried.
        theta: balance bound p < q < theta*p.
        should_stop: polled between candidates (between batches with a pool).
        workers: process count.

    Returns:
        BridgeHit(p, q, k) for the first k that splits N, else None.
    """
    theta = Fraction(theta)
    X = corollary_radius(N)
    lo = iroot_floor(N * theta.denominator // theta.numerator, 2) - X
    hi = ceil_sqrt(N * theta.numerator // theta.denominator + 1) + X
    candidates = [
        (k, approx)
        for k, approx in enumerate(giant_step_coppersmith_prepass(N, d, B), start=1)
        if lo <= approx <= hi and approx > 1
    ]
    with spawn_pool(workers) as pool:
        step = 1 if pool is None else workers
        for start in range(0, len(candidates), step):
            if should_stop is not None and should_stop():
                return None
            chunk = candidates[start:start + step]
            if pool is None:
                inst = HighBitsInstance.from_approximation(N, chunk[0][1], X)
                found = [factor_high_bits(inst, should_stop=should_stop)]
            else:
                found = ordered_map(_bridge_job, [(N, approx, X) for _, approx in chunk], pool)
            for (k, _), p in zip(chunk, found):
                if p is not None:
                    a, b = sorted((p, N // p))
                    logger.info("high-bits route split N at k=%d", k)
                    return BridgeHit(a, b, k)
    return None
