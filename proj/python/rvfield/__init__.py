"""Multivector fields in (k, n) signatures: stress tensor, Pi and Omega fluxes."""

from ._core import *  # noqa: F401,F403
from ._core import __doc__  # noqa: F401
