# infra/paths.py
from __future__ import annotations

import os
from pathlib import Path

APP_NAME = "EC2FactorLab"


def get_appdata_root() -> Path:
    """
    Data root, first match wins:
      1) $EC2FACTOR_HOME
      2) %LOCALAPPDATA%/EC2FactorLab (Windows)
      3) $XDG_STATE_HOME/EC2FactorLab
      4) ~/.local/state/EC2FactorLab
    """
    home = os.environ.get("EC2FACTOR_HOME")
    if home:
        return Path(home)
    local = os.environ.get("LOCALAPPDATA")
    if local:
        return Path(local) / APP_NAME
    state = os.environ.get("XDG_STATE_HOME")
    if state:
        return Path(state) / APP_NAME
    return Path.home() / ".local" / "state" / APP_NAME


def get_logs_dir() -> Path:
    p = get_appdata_root() / "logs"
    p.mkdir(parents=True, exist_ok=True)
    return p


def get_runs_dir() -> Path:
    """Default folder for JSON-lines trial logs and CSV tables."""
    p = get_appdata_root() / "runs"
    p.mkdir(parents=True, exist_ok=True)
    return p
