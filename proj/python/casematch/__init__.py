"""Interpretable similar-case matching pipeline."""

from casematch._core import *  # noqa: F401,F403
from casematch._core import __doc__  # noqa: F401
