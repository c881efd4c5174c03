"""Python access to the mixfd simulator and fitting pipeline."""

from ._core import *  # noqa: F401,F403
from ._core import __doc__  # noqa: F401
