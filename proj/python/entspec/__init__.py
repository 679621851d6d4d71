"""Information-spectrum entanglement-cost toolkit (pybind11 core)."""

from ._entspec import *  # noqa: F401,F403
from ._entspec import __doc__  # noqa: F401
