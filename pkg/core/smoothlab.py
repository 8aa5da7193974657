# core/smoothlab.py
"""
Smooth-part statistics over intervals around x + 1.

v(x, B, beta) counts the m with |m - (x+1)| <= floor(sqrt(x)) whose largest
B-smooth divisor is at least m^beta. conjecture_table() compares the share
f = v / total at B = L(alpha, x) with the density bound
L(x)^-((1 - theta*(1 - beta)) / (2*alpha)) for a grid of theta.
"""
from __future__ import annotations

import csv
import logging
import math
import random
from dataclasses import dataclass
from fractions import Fraction
from pathlib import Path
from typing import Dict, Iterable, List, Optional, Sequence, Tuple

import gmpy2

from core.bigmod import sieve_primes
from core.curve import LocalCurve
from infra.pool import ordered_map, spawn_pool

logger = logging.getLogger("EC2FactorLab.core.smoothlab")

SIEVE_LIMIT = 10 ** 8
SEGMENT = 1 << 16
CSV_COLUMNS = ("x", "B", "beta", "theta", "v", "total", "f", "bound", "pass")


def smooth_part(m: int, B: int) -> int:
    """Largest divisor of m whose prime factors are all <= B."""
    if m < 1:
        raise ValueError("m must be positive.")
    if B < 2:
        return 1
    s, rest = 1, m
    for l in sieve_primes(B):
        if l * l > rest:
            break
        while rest % l == 0:
            rest //= l
            s *= l
    # what is left is 1 or a prime
    if 1 < rest <= B:
        s *= rest
    return s


def _beats_power(s: int, m: int, beta: Fraction) -> bool:
    """s >= m^beta, exactly: s^b >= m^a for beta = a/b."""
    a, b = beta.numerator, beta.denominator
    return s ** b >= m ** a


def interval_bounds(x: int, width: str = "conjecture") -> Tuple[int, int]:
    """
    conjecture: |m - (x+1)| <= floor(sqrt(x))
    hasse:      |m - (x+1)| <= floor(2*sqrt(x))
    """
    if width == "conjecture":
        h = int(gmpy2.isqrt(x))
    elif width == "hasse":
        h = int(gmpy2.isqrt(4 * x))
    else:
        raise ValueError(f"unknown interval width {width!r}.")
    return x + 1 - h, x + 1 + h


@dataclass(frozen=True)
class SmoothnessSample:
    x: int
    B: int
    beta: Fraction
    v: int
    total: int

    @property
    def f(self) -> float:
        return self.v / self.total

    @property
    def side_condition(self) -> bool:
        return self.v >= 3


def _count_segment(args: Tuple[int, int, int, Fraction]) -> int:
    """v over the slots lo..hi, sieving the smooth part one prime power at a time."""
    lo, hi, B, beta = args
    size = hi - lo + 1
    smooth = [1] * size
    if B >= 2:
        for l in sieve_primes(B):
            if l > hi:
                break
            pk = l
            while pk <= hi:
                for i in range((-lo) % pk, size, pk):
                    smooth[i] *= l
                pk *= l
    return sum(1 for i in range(size) if _beats_power(smooth[i], lo + i, beta))


def count_v(
    x: int,
    B: int,
    beta: Fraction,
    width: str = "conjecture",
    workers: int = 1,
    segment: int = SEGMENT,
) -> SmoothnessSample:
    """
    Count the m around x + 1 whose B-smooth part is at least m^beta.

    The interval is sieved in segments of `segment` slots; with workers > 1
    the segments are spread over a spawn pool. The count is the same for any
    segment size and worker count.

    Args:
        x: center minus one, at least 16.
        B: smoothness bound.
        beta: exponent in [0, 1].
        width: "conjecture" or "hasse" interval.
        workers: process count.
        segment: slots per segment.

    Returns:
        SmoothnessSample with v and the interval size.
    """
    if x < 16:
        raise ValueError("x must be at least 16.")
    beta = Fraction(beta)
    if not 0 <= beta <= 1:
        raise ValueError("beta must lie in [0, 1].")
    if segment < 1:
        raise ValueError("segment must be positive.")
    lo, hi = interval_bounds(x, width)
    total = hi - lo + 1
    if total > SIEVE_LIMIT:
        raise ValueError(f"interval of {total} integers exceeds the sieve limit.")

    segments = [(a, min(a + segment - 1, hi), B, beta) for a in range(lo, hi + 1, segment)]
    with spawn_pool(workers) as pool:
        v = sum(ordered_map(_count_segment, segments, pool))
    return SmoothnessSample(x, B, beta, v, total)


# ------------------------------ L-function -----------------------------------

@dataclass(frozen=True)
class LFunctionPoint:
    alpha: float
    x: int
    value: float

    @property
    def log_value(self) -> float:
        return math.log(self.value)


def l_function(alpha: float, x: int) -> LFunctionPoint:
    """L(alpha, x) = exp(alpha * sqrt(log x * log log x)) in double precision."""
    if x < 16:
        raise ValueError("x must be at least 16.")
    lx = math.log(x)
    return LFunctionPoint(float(alpha), x, math.exp(float(alpha) * math.sqrt(lx * math.log(lx))))


def smoothness_bound(alpha: float, x: int) -> int:
    return max(2, int(l_function(alpha, x).value))


def dickman_rho(u: float, step: float = 1e-3) -> float:
    """Coarse Dickman rho by stepping the delay equation u*rho'(u) = -rho(u-1)."""
    if u <= 1:
        return 1.0 if u >= 0 else 0.0
    n = int(round(1 / step))
    rho = [1.0] * (n + 1)
    steps = int(math.ceil((u - 1) / step))
    for i in range(n + 1, n + steps + 1):
        t = i * step
        rho.append(rho[i - 1] - step * rho[i - 1 - n] / t)
    return max(rho[-1], 0.0)


# ------------------------------ conjecture -----------------------------------

@dataclass(frozen=True)
class ConjectureRow:
    x: int
    B: int
    beta: Fraction
    theta: Fraction
    v: int
    total: int
    f: float
    bound: float
    passed: bool

    def as_csv_row(self) -> Dict[str, str]:
        return {
            "x": str(self.x),
            "B": str(self.B),
            "beta": str(self.beta),
            "theta": str(self.theta),
            "v": str(self.v),
            "total": str(self.total),
            "f": f"{self.f:.6g}",
            "bound": f"{self.bound:.6g}",
            "pass": "1" if self.passed else "0",
        }


@dataclass(frozen=True)
class ConjectureTable:
    rows: Tuple[ConjectureRow, ...]
    least_theta: Optional[Fraction]
    greatest_passing_theta: Optional[Fraction]


def conjecture_bound(alpha: float, x: int, beta: Fraction, theta: Fraction) -> float:
    exponent = (1 - float(theta) * (1 - float(beta))) / (2 * float(alpha))
    return math.exp(-exponent * l_function(1.0, x).log_value)


def conjecture_table(
    x_list: Sequence[int],
    alpha: float,
    beta: Fraction,
    theta_grid: Iterable[Fraction] = (Fraction(0),),
    width: str = "conjecture",
    workers: int = 1,
) -> ConjectureTable:
    """
    One row per (x, theta). least_theta is the smallest grid value for which
    the bound holds at every scale; greatest_passing_theta is the largest.
    """
    beta = Fraction(beta)
    thetas = sorted(Fraction(t) for t in theta_grid)
    if not thetas or any(t < 0 for t in thetas):
        raise ValueError("theta grid must be non-empty and nonnegative.")

    rows: List[ConjectureRow] = []
    holds = {t: True for t in thetas}
    for x in x_list:
        B = smoothness_bound(alpha, x)
        sample = count_v(x, B, beta, width, workers=workers)
        logger.info("x=%d B=%d beta=%s v=%d/%d", x, B, beta, sample.v, sample.total)
        for theta in thetas:
            bound = conjecture_bound(alpha, x, beta, theta)
            ok = sample.f >= bound
            holds[theta] = holds[theta] and ok
            rows.append(ConjectureRow(x, B, beta, theta, sample.v, sample.total, sample.f, bound, ok))

    passing = [t for t in thetas if holds[t]]
    return ConjectureTable(
        rows=tuple(rows),
        least_theta=passing[0] if passing else None,
        greatest_passing_theta=passing[-1] if passing else None,
    )


def write_csv(rows: Iterable[ConjectureRow], path) -> Path:
    out = Path(path)
    out.parent.mkdir(parents=True, exist_ok=True)
    with out.open("w", newline="", encoding="utf-8") as fh:
        writer = csv.DictWriter(fh, fieldnames=CSV_COLUMNS)
        writer.writeheader()
        for row in rows:
            writer.writerow(row.as_csv_row())
    return out


# ------------------------- curve orders (oracle) -----------------------------

def sample_curve_orders(r: int, count: int, seed: int = 0) -> List[int]:
    """#E(F_r) for `count` random nonsingular short Weierstrass curves."""
    if r < 5:
        raise ValueError("r must be a prime of at least 5.")
    rng = random.Random(seed)
    orders: List[int] = []
    while len(orders) < count:
        c = LocalCurve(rng.randrange(r), rng.randrange(r), r)
        if c.is_singular():
            continue
        orders.append(c.group_order())
    return orders


def curve_order_frequency(r: int, B: int, beta: Fraction, count: int, seed: int = 0) -> float:
    """Share of sampled curve orders E with s_B(E) >= E^beta."""
    if count <= 0:
        raise ValueError("count must be positive.")
    beta = Fraction(beta)
    orders = sample_curve_orders(r, count, seed)
    hits = sum(1 for E in orders if _beats_power(smooth_part(E, B), E, beta))
    return hits / count
