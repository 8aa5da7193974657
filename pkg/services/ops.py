# services/ops.py
"""
Job factory for the desktop front-end.

Turns raw text from the input fields into ready-to-start workers so UI
handlers stay tiny and consistent:

- Factor: modulus plus optional seed, trial budget, B cap, worker count and
          Hasse scale. Empty fields mean "use the configured default".
- Demo:   the Example-1 pair injected as trial 1 under c = 3/4.
- Smooth lab: comma-separated scales, alpha, beta and an optional theta grid.

All parsing errors surface as ValueError with a message fit for a dialog.
"""

from __future__ import annotations

from fractions import Fraction
from typing import Dict, Optional

from infra.config import env_workers, parse_int, parse_int_list, parse_rational
from services.pipeline import EXAMPLE_C, EXAMPLE_N, PipelineConfig, example_pair
from workers.trials import FactorWorker, SmoothLabWorker


def _opt(text: Optional[str]) -> Optional[str]:
    if text is None:
        return None
    text = str(text).strip()
    return text or None


def build_config(fields: Dict[str, str], base: Optional[PipelineConfig] = None) -> PipelineConfig:
    """
    Apply non-empty UI fields on top of `base`.

    Recognised keys: seed, trials, workers, c.
    """
    base = base or PipelineConfig(workers=env_workers())
    seed, trials, workers, c = (_opt(fields.get(k)) for k in ("seed", "trials", "workers", "c"))
    return base.with_overrides(
        seed=parse_int(seed) if seed else None,
        trial_budget=parse_int(trials) if trials else None,
        workers=parse_int(workers) if workers else None,
        hasse_scale_c=parse_rational(c) if c else None,
    )


def factor_job(fields: Dict[str, str], base: Optional[PipelineConfig] = None, parent=None) -> FactorWorker:
    """
    Build a FactorWorker from the form.

    Args:
        fields: raw strings keyed N, seed, trials, b_max, workers, c.
        base:   config loaded from file, if any.
        parent: Optional QObject parent.

    Returns:
        FactorWorker ready to start.
    """
    n_text = _opt(fields.get("N"))
    if n_text is None:
        raise ValueError("Enter a modulus N.")
    N = parse_int(n_text)
    b_max = _opt(fields.get("b_max"))
    return FactorWorker(N, build_config(fields, base), parse_int(b_max) if b_max else None, parent=parent)


def demo_job(parent=None) -> FactorWorker:
    cfg = PipelineConfig(hasse_scale_c=EXAMPLE_C, trial_budget=1)
    return FactorWorker(EXAMPLE_N, cfg, initial_pairs=[example_pair()], parent=parent)


def smooth_lab_job(fields: Dict[str, str], parent=None) -> SmoothLabWorker:
    xs = parse_int_list(fields.get("x", ""))
    if not xs:
        raise ValueError("Enter at least one scale x.")
    alpha = float(parse_rational(fields.get("alpha") or "0.7071"))
    beta = parse_rational(fields.get("beta") or "1")
    thetas_text = _opt(fields.get("theta_grid"))
    thetas = [parse_rational(t) for t in thetas_text.split(",")] if thetas_text else [Fraction(0)]
    return SmoothLabWorker(xs, alpha, beta, thetas, parent=parent)
