"""Effect-measure algebra, switch mechanisms and odds-ratio checks."""

from ._effstab import *  # noqa: F401,F403
from ._effstab import __doc__  # noqa: F401
