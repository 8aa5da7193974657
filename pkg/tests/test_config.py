from __future__ import annotations

import json
from fractions import Fraction

import pytest

from infra.config import (
    WORKERS_ENV,
    env_workers,
    load_config_file,
    merge_overrides,
    parse_int,
    parse_int_list,
    parse_rational,
)


def test_parse_int_forms():
    assert parse_int("10^6") == 10 ** 6
    assert parse_int(" 1_000 ") == 1000
    assert parse_int(7) == 7
    for bad in ("", "1.5", "abc", True):
        with pytest.raises(ValueError):
            parse_int(bad)


def test_parse_rational_forms():
    assert parse_rational("3/4") == Fraction(3, 4)
    assert parse_rational("0.75") == Fraction(3, 4)
    assert parse_rational(2) == Fraction(2)
    assert parse_rational(0.5) == Fraction(1, 2)
    for bad in ("", "1/0", "three"):
        with pytest.raises(ValueError):
            parse_rational(bad)


def test_parse_int_list():
    assert parse_int_list("1, 2,3,") == [1, 2, 3]
    assert parse_int_list([4, "10^2"]) == [4, 100]
    assert parse_int_list("") == []


def test_env_workers(monkeypatch):
    monkeypatch.delenv(WORKERS_ENV, raising=False)
    assert env_workers(2) == 2
    monkeypatch.setenv(WORKERS_ENV, "4")
    assert env_workers() == 4
    monkeypatch.setenv(WORKERS_ENV, "0")
    with pytest.raises(ValueError):
        env_workers()


def test_load_config_file(tmp_path):
    good = tmp_path / "cfg.json"
    good.write_text(json.dumps({"seed": 3}), encoding="utf-8")
    assert load_config_file(good) == {"seed": 3}

    with pytest.raises(FileNotFoundError):
        load_config_file(tmp_path / "nope.json")

    broken = tmp_path / "broken.json"
    broken.write_text("{seed: 3", encoding="utf-8")
    with pytest.raises(ValueError):
        load_config_file(broken)

    listed = tmp_path / "list.json"
    listed.write_text("[1, 2]", encoding="utf-8")
    with pytest.raises(ValueError):
        load_config_file(listed)


def test_merge_overrides_skips_missing_values():
    merged = merge_overrides({"seed": 1, "workers": 2}, {"seed": None, "workers": 4, "theta": 3})
    assert merged == {"seed": 1, "workers": 4, "theta": 3}
