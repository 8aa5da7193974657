from __future__ import annotations

import json
import random
from fractions import Fraction

import pytest
from sympy import nextprime

from core.bigmod import SemiprimeContext
from core.curve import CurveW, Finite, crt_point
from services.pipeline import (
    CONSISTENT,
    EXAMPLE_C,
    EXAMPLE_N,
    EXAMPLE_POINT,
    OUTCOMES,
    PipelineConfig,
    build_pair,
    classify_pair,
    corollary_check,
    demo_example,
    example_pair,
    run_algorithm_a,
    run_trial,
)

MID_N = 1009 * 2003


def test_config_validation():
    with pytest.raises(ValueError):
        PipelineConfig(b_schedule=(8000, 2000))
    with pytest.raises(ValueError):
        PipelineConfig(b_schedule=())
    with pytest.raises(ValueError):
        PipelineConfig(workers=0)
    with pytest.raises(ValueError):
        PipelineConfig(consistency_threshold_exponent=Fraction(1))


def test_config_from_mapping_and_overrides():
    cfg = PipelineConfig.from_mapping({"b_schedule": "100,200", "hasse_scale_c": "3/4", "trial_budget": "4"})
    assert cfg.b_schedule == (100, 200)
    assert cfg.hasse_scale_c == Fraction(3, 4)
    assert cfg.trial_budget == 4

    assert cfg.with_overrides(seed=None, workers=3).workers == 3
    assert cfg.with_overrides(seed=None).seed == 0
    assert cfg.schedule_up_to(150) == (100, 150)
    assert cfg.schedule_up_to(None) == (100, 200)

    with pytest.raises(ValueError):
        PipelineConfig.from_mapping({"bogus": 1})


def test_demo_replays_example():
    transcript = demo_example()
    assert transcript.ok
    names = [s.name for s in transcript.steps]
    assert names[:3] == ["M_B", "t_min", "d"]
    assert "p" in names and "q" in names
    assert all(line.startswith("ok") for line in transcript.lines())


def test_injected_example_pair_is_consistent():
    cfg = PipelineConfig(b_schedule=(3,), trial_budget=1, hasse_scale_c=EXAMPLE_C)
    seen = []
    report = run_algorithm_a(EXAMPLE_N, cfg, initial_pairs=[example_pair()], on_trial=seen.append)
    assert report.factored
    assert (report.p, report.q) == (1959583, 1959593)
    assert report.route == CONSISTENT
    assert len(report.records) == 1 and seen == report.records

    rec = report.records[0].to_json()
    assert rec["trial"] == 1
    assert rec["outcome"] == CONSISTENT
    assert rec["t_min"] == 3
    assert rec["d"] == "279936"
    assert rec["factor"] == "1959583"


def test_run_trial_is_deterministic_apart_from_timing():
    cfg = PipelineConfig(seed=9)
    a = run_trial(MID_N, cfg, 2000, 5).to_json()
    b = run_trial(MID_N, cfg, 2000, 5).to_json()
    a.pop("ms"), b.pop("ms")
    assert a == b
    assert a["outcome"] in OUTCOMES


def test_small_modulus_is_factored():
    report = run_algorithm_a(MID_N, PipelineConfig(seed=1))
    assert report.factored
    assert (report.p, report.q) == (1009, 2003)
    assert sum(report.counts.values()) == len(report.records)

    lines = report.to_json_lines().splitlines()
    assert len(lines) == len(report.records)
    assert json.loads(lines[-1])["factor"] in ("1009", "2003")

    summary = report.summary()
    assert summary["p"] == "1009"
    assert summary["trials"] == len(report.records)


def test_cancelled_before_first_trial():
    report = run_algorithm_a(MID_N, PipelineConfig(), should_stop=lambda: True)
    assert report.cancelled
    assert not report.factored
    assert report.records == []


def test_bad_modulus_is_rejected():
    with pytest.raises(ValueError):
        run_algorithm_a(MID_N * 3)


def test_build_pair_checks_the_point():
    curve, Q = build_pair(EXAMPLE_N, 1594604, 450302, *EXAMPLE_POINT, form="weierstrass")
    assert Q == Finite(*EXAMPLE_POINT)
    with pytest.raises(ValueError):
        build_pair(EXAMPLE_N, 1594604, 450302, EXAMPLE_POINT[0], EXAMPLE_POINT[1] + 1, form="weierstrass")
    with pytest.raises(ValueError):
        build_pair(EXAMPLE_N, 1, 2, 3, 4, form="edwards")


def test_classify_example_is_consistent_clause():
    ctx = SemiprimeContext(EXAMPLE_N, hasse_scale_c=EXAMPLE_C, oracle=(1959583, 1959593))
    curve, Q = example_pair()
    cls = classify_pair(curve, Q, 3, ctx)
    assert cls.clause == "ii"
    assert not cls.clause_i
    assert cls.t_min == 3
    assert cls.l_min is None
    assert cls.order_p == cls.order_q == 279936
    assert (cls.trace_p, cls.trace_q) == (32, 42)
    assert cls.largest_prime_p == 3


def test_corollary_check():
    assert corollary_check(100, 100, 10, 10 ** 6)
    assert corollary_check(1, 1, 10, 10 ** 6)
    assert not corollary_check(2, 10 ** 6, 10, 10 ** 12)


@pytest.mark.parametrize("N, p", [(35, 5), (143, 11), (MID_N, 1009)])
def test_tiny_moduli_split_quickly(N, p):
    report = run_algorithm_a(N, PipelineConfig(b_schedule=(2000,), trial_budget=16, seed=2))
    assert report.factored
    assert report.p == p
    assert report.p * report.q == N


def test_prime_input_never_yields_a_factor():
    report = run_algorithm_a(101, PipelineConfig(b_schedule=(50, 2000), trial_budget=8))
    assert not report.factored
    assert len(report.records) == 16
    assert all(r.factor is None for r in report.records)


def test_classify_two_adic_split_is_clause_i():
    ctx = SemiprimeContext(143, oracle=(11, 13))
    curve = CurveW(1, 1, 143)
    # order 2 modulo 11, odd 2-part or a different 3-part modulo 13
    Q = crt_point((2, 0), (0, 1), ctx)
    cls = classify_pair(curve, Q, 19, ctx)
    assert cls.clause == "i"
    assert cls.order_p == 2
    assert cls.l_min in (2, 3)


def test_classify_below_t_min_is_none():
    ctx = SemiprimeContext(EXAMPLE_N, hasse_scale_c=EXAMPLE_C, oracle=(1959583, 1959593))
    curve, Q = example_pair()
    cls = classify_pair(curve, Q, 2, ctx)
    assert cls.clause is None
    assert not (cls.clause_i or cls.clause_ii or cls.clause_iii)


def test_factors_a_batch_of_semiprimes():
    rng = random.Random(31)
    for _ in range(8):
        p = nextprime(rng.randrange(10 ** 4, 10 ** 5))
        q = nextprime(p + rng.randrange(1, 2 * p))
        report = run_algorithm_a(p * q, PipelineConfig(seed=rng.randrange(1000)))
        assert report.factored, (p, q)
        assert (report.p, report.q) == (p, q)


def _log_without_timing(report):
    rows = [record.to_json() for record in report.records]
    for row in rows:
        row.pop("ms")
    return rows


def test_worker_count_does_not_change_the_log():
    cfg = PipelineConfig(seed=4, b_schedule=(50, 2000), trial_budget=6)
    serial = run_algorithm_a(MID_N, cfg)
    pooled = run_algorithm_a(MID_N, cfg.with_overrides(workers=3))
    assert (serial.p, serial.q) == (pooled.p, pooled.q)
    assert _log_without_timing(serial) == _log_without_timing(pooled)
