"""Adiabatic state transfer and entanglement distribution on
anti-ferromagnetic Heisenberg spin networks.

Spins, magnetizations and total-spin values are exchanged as doubled
integers (``twice_spin``), so a spin-1/2 site is ``1`` and a spin-1 site
is ``2``.
"""

from ._spinnet import *  # noqa: F401,F403
from ._spinnet import __version__  # noqa: F401
