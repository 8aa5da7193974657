# services/pipeline.py
"""
End-to-end factoring loop, pair classification and the Example-1 replay.

One trial:
  1. draw an admissible triple (or take an injected curve/point pair)
  2. staged multiplication by M_t for t <= B            -> t_min
  3. a factor on the way                                -> Separated
  4. equal orders: recover d
  5. d^8 <= N^3 (threshold exponent 3/8 by default)     -> NotConsistent
  6. base-d digit decomposition                         -> Consistent
  7. (d * B')^2 > N: high-bits search on k*d - 1        -> CoppersmithHit
  8. otherwise                                          -> NotConsistent

Trials are numbered globally across the B schedule. Each trial seeds its own
random.Random from (seed, B, trial id), so the log is the same whether trials
run in one process or in a pool; the lowest successful trial id wins.
"""
from __future__ import annotations

import dataclasses
import hashlib
import json
import logging
import math
import random
import time
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Any, Callable, Dict, List, Mapping, Optional, Sequence, Tuple

import sympy

from core.bigmod import Factor, SemiprimeContext, gcd
from core.consistent import Factored, consistent_decompose, digits_base_d, solve_digit_quadratic
from core.curve import AnyCurve, CurveE2, CurveW, Finite, oracle_reduce
from core.multiplier import (
    HasseWindow,
    NonSeparating,
    Separated,
    StillFinite,
    build_multiplier,
    hasse_exponent,
    staged_multiply,
)
from core.smallroots import corollary_bridge
from core.triples import generate_triple
from infra.config import parse_int, parse_int_list, parse_rational
from infra.logging import log_trial_event
from infra.pool import spawn_pool

logger = logging.getLogger("EC2FactorLab.services.pipeline")

SEPARATED = "Separated"
CONSISTENT = "Consistent"
COPPERSMITH_HIT = "CoppersmithHit"
STILL_FINITE = "StillFinite"
NOT_CONSISTENT = "NotConsistent"
OUTCOMES = (SEPARATED, CONSISTENT, COPPERSMITH_HIT, STILL_FINITE, NOT_CONSISTENT)

DEFAULT_SCHEDULE = (2000, 8000, 32000, 128000, 512000, 1000000)


# ------------------------------- config --------------------------------------

@dataclass(frozen=True)
class PipelineConfig:
    b_schedule: Tuple[int, ...] = DEFAULT_SCHEDULE
    trial_budget: int = 32
    seed: int = 0
    hasse_scale_c: Fraction = Fraction(1)
    consistency_threshold_exponent: Fraction = Fraction(3, 8)
    coppersmith_cofactor_bound: int = 16
    workers: int = 1
    max_draws: int = 10_000
    theta: Fraction = Fraction(4)

    def __post_init__(self) -> None:
        sched = tuple(int(b) for b in self.b_schedule)
        object.__setattr__(self, "b_schedule", sched)
        for name in ("hasse_scale_c", "consistency_threshold_exponent", "theta"):
            object.__setattr__(self, name, Fraction(getattr(self, name)))
        if not sched or any(b < 2 for b in sched):
            raise ValueError("b_schedule must be a non-empty list of bounds >= 2.")
        if any(a >= b for a, b in zip(sched, sched[1:])):
            raise ValueError("b_schedule must be strictly ascending.")
        for name in ("trial_budget", "coppersmith_cofactor_bound", "workers", "max_draws"):
            if getattr(self, name) < 1:
                raise ValueError(f"{name} must be positive.")
        if self.hasse_scale_c <= 0:
            raise ValueError("hasse_scale_c must be positive.")
        if not 0 < self.consistency_threshold_exponent < 1:
            raise ValueError("consistency_threshold_exponent must lie in (0, 1).")

    @classmethod
    def from_mapping(cls, data: Mapping[str, Any]) -> "PipelineConfig":
        parsers: Dict[str, Callable[[Any], Any]] = {
            "b_schedule": lambda v: tuple(parse_int_list(v)),
            "trial_budget": parse_int,
            "seed": parse_int,
            "hasse_scale_c": parse_rational,
            "consistency_threshold_exponent": parse_rational,
            "coppersmith_cofactor_bound": parse_int,
            "workers": parse_int,
            "max_draws": parse_int,
            "theta": parse_rational,
        }
        unknown = set(data) - set(parsers)
        if unknown:
            raise ValueError(f"unknown config keys: {', '.join(sorted(unknown))}")
        return cls(**{k: parsers[k](v) for k, v in data.items()})

    def with_overrides(self, **changes: Any) -> "PipelineConfig":
        return dataclasses.replace(self, **{k: v for k, v in changes.items() if v is not None})

    def schedule_up_to(self, b_max: Optional[int]) -> Tuple[int, ...]:
        if b_max is None:
            return self.b_schedule
        kept = tuple(b for b in self.b_schedule if b < b_max)
        return kept + (b_max,)


# ------------------------------- records -------------------------------------

@dataclass(frozen=True)
class TrialRecord:
    trial: int
    b: int
    outcome: str
    t_min: Optional[int] = None
    d: Optional[int] = None
    factor: Optional[int] = None
    ms: float = 0.0
    additions: int = 0
    triple: str = ""

    def to_json(self) -> Dict[str, Any]:
        def big(v: Optional[int]) -> Optional[str]:
            return None if v is None else str(v)
        return {
            "trial": self.trial,
            "b": self.b,
            "t_min": self.t_min,
            "outcome": self.outcome,
            "d": big(self.d),
            "factor": big(self.factor),
            "ms": round(self.ms, 3),
            "additions": self.additions,
            "triple": self.triple,
        }


@dataclass
class FactorReport:
    N: int
    p: Optional[int] = None
    q: Optional[int] = None
    route: Optional[str] = None
    records: List[TrialRecord] = field(default_factory=list)
    elapsed: float = 0.0
    cancelled: bool = False

    @property
    def factored(self) -> bool:
        return self.p is not None

    @property
    def counts(self) -> Dict[str, int]:
        out = {k: 0 for k in OUTCOMES}
        for r in self.records:
            out[r.outcome] += 1
        return out

    @property
    def additions(self) -> int:
        return sum(r.additions for r in self.records)

    def to_json_lines(self) -> str:
        return "".join(json.dumps(r.to_json()) + "\n" for r in self.records)

    def summary(self) -> Dict[str, Any]:
        return {
            "N": str(self.N),
            "p": None if self.p is None else str(self.p),
            "q": None if self.q is None else str(self.q),
            "route": self.route,
            "trials": len(self.records),
            "counts": self.counts,
            "additions": self.additions,
            "elapsed": round(self.elapsed, 3),
            "cancelled": self.cancelled,
        }


def _digest(*values: int) -> str:
    return hashlib.blake2b(":".join(str(v) for v in values).encode(), digest_size=6).hexdigest()


def _proper_factor(N: int, g: Optional[int]) -> Optional[int]:
    if g is None or not 1 < g < N or N % g:
        return None
    return g


# -------------------------------- trials -------------------------------------

InjectedPair = Tuple[AnyCurve, Finite]


def run_trial(
    N: int,
    cfg: PipelineConfig,
    b: int,
    trial: int,
    injected: Optional[InjectedPair] = None,
) -> TrialRecord:
    t0 = time.perf_counter()

    def done(outcome: str, **kw: Any) -> TrialRecord:
        ms = (time.perf_counter() - t0) * 1000.0
        if "factor" in kw:
            kw["factor"] = _proper_factor(N, kw["factor"])
            if kw["factor"] is None:
                outcome = NOT_CONSISTENT
        return TrialRecord(trial, b, outcome, ms=ms, **kw)

    if injected is not None:
        curve, Q = injected
        w = curve if isinstance(curve, CurveW) else curve.to_weierstrass()
        digest = _digest(Q.x, Q.y, w.B1, w.B2)
    else:
        rng = random.Random(f"{cfg.seed}:{b}:{trial}")
        tr = generate_triple(N, rng, cfg.max_draws)
        if isinstance(tr, Factor):
            return done(SEPARATED, factor=tr.g)
        curve, Q = tr.curve, tr.point
        digest = _digest(tr.x, tr.y, tr.b1, tr.b2)

    window = HasseWindow.from_modulus(N, cfg.hasse_scale_c)
    report = staged_multiply(curve, Q, b, window)
    if isinstance(report, Separated):
        return done(SEPARATED, t_min=report.t_min, factor=report.g,
                    additions=report.additions, triple=digest)
    if isinstance(report, StillFinite):
        return done(STILL_FINITE, additions=report.additions, triple=digest)

    assert isinstance(report, NonSeparating)
    d, common = report.d, dict(t_min=report.t_min, d=report.d, additions=report.additions, triple=digest)
    e = cfg.consistency_threshold_exponent
    if d ** e.denominator <= N ** e.numerator:
        return done(NOT_CONSISTENT, **common)

    dec = consistent_decompose(N, d, cfg.theta)
    if isinstance(dec.result, Factored):
        return done(CONSISTENT, factor=dec.result.p, **common)

    bc = min(b, cfg.coppersmith_cofactor_bound)
    if (d * bc) ** 2 > N:
        hit = corollary_bridge(N, d, bc, cfg.theta)
        if hit is not None:
            return done(COPPERSMITH_HIT, factor=hit.p, **common)
    return done(NOT_CONSISTENT, **common)


def _trial_job(args: Tuple[int, PipelineConfig, int, int, Optional[InjectedPair]]) -> TrialRecord:
    return run_trial(*args)


def run_algorithm_a(
    N: int,
    cfg: Optional[PipelineConfig] = None,
    b_max: Optional[int] = None,
    initial_pairs: Sequence[InjectedPair] = (),
    should_stop: Optional[Callable[[], bool]] = None,
    on_trial: Optional[Callable[[TrialRecord], None]] = None,
) -> FactorReport:
    """
    Factor N or report exhaustion. initial_pairs are tried first, as trials
    1..k under the first bound of the schedule.
    """
    cfg = cfg or PipelineConfig()
    ctx = SemiprimeContext(N, theta=cfg.theta, hasse_scale_c=cfg.hasse_scale_c)
    N = ctx.N
    report = FactorReport(N)
    t0 = time.perf_counter()

    jobs: List[Tuple[int, PipelineConfig, int, int, Optional[InjectedPair]]] = []
    trial = 0
    for i, b in enumerate(cfg.schedule_up_to(b_max)):
        if i == 0:
            for pair in initial_pairs:
                trial += 1
                jobs.append((N, cfg, b, trial, pair))
        for _ in range(cfg.trial_budget):
            trial += 1
            jobs.append((N, cfg, b, trial, None))

    with spawn_pool(cfg.workers) as pool:
        batch = max(1, 2 * cfg.workers)
        for start in range(0, len(jobs), batch):
            if should_stop is not None and should_stop():
                report.cancelled = True
                break
            chunk = jobs[start:start + batch]
            results = pool.map(_trial_job, chunk) if pool is not None else None
            for k, job in enumerate(chunk):
                if results is None:
                    if k and should_stop is not None and should_stop():
                        report.cancelled = True
                        break
                    rec = _trial_job(job)
                else:
                    rec = results[k]
                report.records.append(rec)
                log_trial_event(rec.to_json())
                if on_trial is not None:
                    on_trial(rec)
                if rec.factor is not None:
                    report.p, report.q = sorted((rec.factor, N // rec.factor))
                    report.route = rec.outcome
                    break
            if report.factored or report.cancelled:
                break

    report.elapsed = time.perf_counter() - t0
    if report.factored:
        assert report.p * report.q == N and 1 < report.p < N
        logger.info("N=%d factored as %d * %d via %s after %d trial(s)",
                    N, report.p, report.q, report.route, len(report.records))
    else:
        logger.info("N=%d not factored after %d trial(s)", N, len(report.records))
    return report


# ---------------------------- pair inspection --------------------------------

def build_pair(N: int, b1: int, b2: int, x: int, y: int, form: str = "root") -> InjectedPair:
    """Curve/point from CLI input; form 'root' reads (b1, b2) as roots, 'weierstrass' as (B1, B2)."""
    if form == "root":
        curve: AnyCurve = CurveE2(b1, b2, N)
    elif form == "weierstrass":
        curve = CurveW(b1, b2, N)
    else:
        raise ValueError(f"unknown curve form {form!r}.")
    Q = Finite(x % N, y % N)
    if not curve.contains(Q):
        raise ValueError("the point is not on the curve.")
    return curve, Q


# ---------------------------- classification ---------------------------------

@dataclass(frozen=True)
class PairClassification:
    clause: Optional[str]
    clause_i: bool
    clause_ii: bool
    clause_iii: bool
    t_min: Optional[int]
    l_min: Optional[int]
    order_p: int
    order_q: int
    group_order_p: int
    group_order_q: int
    trace_p: int
    trace_q: int
    largest_prime_p: int
    largest_prime_q: int
    corollary_p: bool
    corollary_q: bool


def _largest_prime(n: int) -> int:
    return max(sympy.factorint(n), default=1)


def _valuation(n: int, l: int) -> int:
    k = 0
    while n % l == 0:
        n //= l
        k += 1
    return k


def _cover_prime(order: int, w: HasseWindow) -> Optional[int]:
    """Least prime t with order | M_t, or None when some exponent exceeds the window."""
    t = 1
    for l, e in sympy.factorint(order).items():
        if e > hasse_exponent(l, w):
            return None
        t = max(t, l)
    return t if t > 1 else 2


def corollary_check(ord_r: int, E_r: int, B: int, N: int) -> bool:
    """ord_r >= E_r^beta for some beta > 1 - 2 log B / log N."""
    if E_r <= 1 or ord_r >= E_r:
        return True
    return math.log(ord_r) / math.log(E_r) > 1 - 2 * math.log(B) / math.log(N)


def classify_pair(curve: AnyCurve, Q: Finite, B: int, ctx: SemiprimeContext) -> PairClassification:
    """Which clause of the B-decomposition definition the pair satisfies (oracle mode)."""
    N = ctx.N
    red = oracle_reduce(Q, curve, ctx)
    w = HasseWindow.from_context(ctx)
    op, oq = red.order_p, red.order_q

    covers = [t for t in (_cover_prime(op, w), _cover_prime(oq, w)) if t is not None]
    t_min = min(covers) if covers else None
    split = [l for l in sympy.factorint(op * oq) if _valuation(op, l) != _valuation(oq, l)]
    l_min = min(split) if split else None

    clause_i = t_min is not None and l_min is not None and max(t_min, l_min) <= B

    c = ctx.hasse_scale_c
    a, b = c.numerator, c.denominator
    A = max(1, min(abs(red.trace_p), abs(red.trace_q)))
    d = op
    clause_ii = (
        op == oq
        and t_min is not None and t_min <= B
        and d ** 8 * b ** 8 >= a ** 8 * N ** 3
        and d ** 4 * b ** 4 >= a ** 4 * N * A ** 4
    )

    M_B = build_multiplier(B, w).value if B >= 2 else 1
    clause_iii = any(gcd(M_B, E) * B >= E for E in (red.group_order_p, red.group_order_q))

    clause = "i" if clause_i else "ii" if clause_ii else "iii" if clause_iii else None
    return PairClassification(
        clause=clause,
        clause_i=clause_i,
        clause_ii=clause_ii,
        clause_iii=clause_iii,
        t_min=t_min,
        l_min=l_min,
        order_p=op,
        order_q=oq,
        group_order_p=red.group_order_p,
        group_order_q=red.group_order_q,
        trace_p=red.trace_p,
        trace_q=red.trace_q,
        largest_prime_p=_largest_prime(op),
        largest_prime_q=_largest_prime(oq),
        corollary_p=corollary_check(op, red.group_order_p, B, N),
        corollary_q=corollary_check(oq, red.group_order_q, B, N),
    )


# ------------------------------ Example 1 ------------------------------------

EXAMPLE_N = 3839985129719
EXAMPLE_CURVE = (1594604, 450302)
EXAMPLE_POINT = (540525859015, 1621377667969)
EXAMPLE_C = Fraction(3, 4)


class DemoMismatch(RuntimeError):
    """A replayed value differs from the published one."""


@dataclass(frozen=True)
class DemoStep:
    name: str
    expected: Any
    actual: Any

    @property
    def ok(self) -> bool:
        return self.expected == self.actual


@dataclass
class DemoTranscript:
    steps: List[DemoStep] = field(default_factory=list)
    ms: float = 0.0

    @property
    def ok(self) -> bool:
        return all(s.ok for s in self.steps)

    def lines(self) -> List[str]:
        return [f"{'ok ' if s.ok else 'BAD'} {s.name:<10} {s.actual}"
                + ("" if s.ok else f" (expected {s.expected})") for s in self.steps]


def example_pair() -> InjectedPair:
    return CurveW(*EXAMPLE_CURVE, EXAMPLE_N), Finite(*EXAMPLE_POINT)


def demo_example(strict: bool = True) -> DemoTranscript:
    t0 = time.perf_counter()
    out = DemoTranscript()

    def check(name: str, expected: Any, actual: Any) -> None:
        out.steps.append(DemoStep(name, expected, actual))

    N = EXAMPLE_N
    curve, Q = example_pair()
    window = HasseWindow.from_modulus(N, EXAMPLE_C)
    check("M_B", 557256278016, build_multiplier(3, window).value)

    rep = staged_multiply(curve, Q, 3, window)
    check("t_min", 3, getattr(rep, "t_min", None))
    d = rep.d if isinstance(rep, NonSeparating) else None
    check("d", 279936, d)
    if d is not None:
        c2, c1, c0 = digits_base_d(N, d)
        check("digits", (49, 504, 1271), (c2, c1, c0))
        check("disc", 4900, c1 * c1 - 4 * c2 * c0)
        sol = solve_digit_quadratic(c2, c1, c0, d, N)
        if sol is not None:
            check("roots", (Fraction(-31, 7), Fraction(-41, 7)),
                  (Fraction(-sol.t_p, sol.r_p), Fraction(-sol.t_q, sol.r_q)))
            check("system", (7, 31, 7, 41), (sol.r_p, sol.t_p, sol.r_q, sol.t_q))
            check("p", 1959583, sol.p)
            check("q", 1959593, sol.q)
        else:
            check("p", 1959583, None)

    out.ms = (time.perf_counter() - t0) * 1000.0
    if strict and not out.ok:
        bad = ", ".join(s.name for s in out.steps if not s.ok)
        raise DemoMismatch(f"Example-1 replay differs at: {bad}")
    return out
