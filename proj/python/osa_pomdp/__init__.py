"""Python bindings for the opportunistic spectrum access solver and simulator."""

from ._core import *  # noqa: F401,F403
from ._core import __version__, OsaError  # noqa: F401
