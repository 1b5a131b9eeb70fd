"""Minimal-variance aggregation of black-box models."""

from _mevagg import *  # noqa: F401,F403
from _mevagg import __version__  # noqa: F401
