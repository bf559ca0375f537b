"""Optimal and equilibrium barrier dividend policies under a moment constraint."""

from ._core import *  # noqa: F401,F403
from ._core import __version__  # noqa: F401
