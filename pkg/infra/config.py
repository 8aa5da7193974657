# infra/config.py
"""
Input parsing and configuration sources.

Precedence for pipeline settings: CLI flags > JSON file (--config) >
EC2FACTOR_WORKERS > defaults; each layer is applied with merge_overrides().
Rationals are accepted as "a/b", decimals ("0.75") or integers.
"""
from __future__ import annotations

import json
import os
from fractions import Fraction
from pathlib import Path
from typing import Any, Dict, List, Optional, Union

WORKERS_ENV = "EC2FACTOR_WORKERS"


def parse_rational(value: Union[str, int, float, Fraction]) -> Fraction:
    if isinstance(value, Fraction):
        return value
    if isinstance(value, bool):
        raise ValueError(f"not a rational number: {value!r}")
    if isinstance(value, (int, float)):
        return Fraction(str(value))
    text = str(value).strip()
    if not text:
        raise ValueError("empty rational.")
    try:
        return Fraction(text)
    except (ValueError, ZeroDivisionError) as e:
        raise ValueError(f"not a rational number: {text!r}") from e


def parse_int(value: Union[str, int]) -> int:
    """Decimal integers, with optional underscores or a power form such as 10^6."""
    if isinstance(value, bool):
        raise ValueError(f"not an integer: {value!r}")
    if isinstance(value, int):
        return value
    text = str(value).strip().replace("_", "")
    if "^" in text:
        base, _, exp = text.partition("^")
        return parse_int(base) ** parse_int(exp)
    try:
        return int(text)
    except ValueError as e:
        raise ValueError(f"not an integer: {text!r}") from e


def parse_int_list(value: Union[str, List[Any]]) -> List[int]:
    items = value if isinstance(value, list) else [v for v in str(value).split(",") if v.strip()]
    return [parse_int(v) for v in items]


def load_config_file(path: Union[str, Path]) -> Dict[str, Any]:
    p = Path(path)
    if not p.exists():
        raise FileNotFoundError(f"Config file not found: {p}")
    try:
        data = json.loads(p.read_text(encoding="utf-8"))
    except json.JSONDecodeError as e:
        raise ValueError(f"Config file {p} is not valid JSON: {e}") from e
    if not isinstance(data, dict):
        raise ValueError(f"Config file {p} must hold a JSON object.")
    return data


def env_workers(default: Optional[int] = 1) -> Optional[int]:
    """EC2FACTOR_WORKERS as a positive int, or `default` when unset."""
    raw = os.environ.get(WORKERS_ENV, "").strip()
    if not raw:
        return default
    n = parse_int(raw)
    if n < 1:
        raise ValueError(f"{WORKERS_ENV} must be a positive integer.")
    return n


def merge_overrides(base: Dict[str, Any], overrides: Dict[str, Optional[Any]]) -> Dict[str, Any]:
    """Later sources win; None means 'not given'."""
    out = dict(base)
    out.update({k: v for k, v in overrides.items() if v is not None})
    return out
