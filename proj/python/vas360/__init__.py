"""Python bindings for the vas360 library."""

from ._core import *  # noqa: F401,F403
from ._core import Error, InvalidArgument, OutOfRange, ParseError

__version__ = "0.1.0"
