# core/version.py
APP_NAME = "EC2 Factor Lab"
__version__ = "0.1"  # <- bump this for every release
DISPLAY_NAME = f"{APP_NAME} v{__version__}"
