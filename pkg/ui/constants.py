# ui/constants.py
"""
User-facing strings for EC2 Factor Lab (window and CLI).
Centralized for easy maintenance and consistency.
"""

from core.version import APP_NAME, __version__ as APP_VERSION


# ===== Window and Dialog Titles =====
MAIN_WINDOW_TITLE = f"{APP_NAME} {APP_VERSION}"
MENU_HELP = "Help"
MENU_ABOUT = "About"

DIALOG_ERROR = "Error"
DIALOG_INFORMATION = "Information"
DIALOG_ABOUT = "About"

# ===== Group Box Titles =====
GROUP_MODULUS = "Modulus"
GROUP_SETTINGS = "Trial settings"
GROUP_SMOOTH = "Smooth lab"
GROUP_PROGRESS = "Progress"

# ===== Button Labels =====
BTN_START = "Factor"
BTN_DEMO = "Example 1"
BTN_SMOOTH = "Run table"
BTN_CANCEL = "Cancel"

# ===== Labels =====
LABEL_N = "N:"
LABEL_SEED = "Seed:"
LABEL_TRIALS = "Trials per B:"
LABEL_BMAX = "B max:"
LABEL_WORKERS = "Workers:"
LABEL_C = "Hasse scale c:"
LABEL_X = "Scales x:"
LABEL_ALPHA = "alpha:"
LABEL_BETA = "beta:"
LABEL_THETA = "theta grid:"
LABEL_TRIAL_PROGRESS = "Trials:"

PLACEHOLDER_N = "odd modulus coprime to 6, e.g. 3839985129719"
PLACEHOLDER_DEFAULT = "default"

# ===== Status Messages =====
STATUS_READY = "Ready."
STATUS_TRIAL = "Trial {trial} (B={b}): {outcome}"
STATUS_FACTORED = "N = {p} * {q} via {route} after {trials} trial(s), {elapsed}s."
STATUS_EXHAUSTED = "No factor after {trials} trial(s). Raise B max or the trial budget."
STATUS_CANCELLED = "Operation cancelled."
STATUS_TABLE_ROW = "x={x} theta={theta}: f={f} bound={bound} pass={passed}"

MSG_EXIT_WHILE_BUSY = "A computation is still running. Cancel it and exit?"
CONFIRM_HEADER = "Confirm"

# ===== CLI =====
CLI_DESCRIPTION = "Even-order elliptic-curve factoring of two-prime moduli."
CLI_DEMO_OK = "Example 1 reproduced in {ms:.1f} ms."
CLI_DEMO_BAD = "Example 1 replay MISMATCH."
CLI_EXHAUSTED = "not factored: {trials} trial(s), outcomes {counts}"

HELP_TEXT = f"""{APP_NAME} v{APP_VERSION}

1. Enter an odd modulus N coprime to 6
2. Optionally set the seed, trials per bound, B max and workers
3. Press Factor; every trial is listed in the console
4. Example 1 replays the published worked example

Smooth lab: comma-separated scales x, alpha and beta, then Run table."""
