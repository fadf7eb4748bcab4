"""Spectra, Berry curvature and geometric phases of the one- and two-qubit quantum Rabi model.

Energies and times are in units of the field frequency omega_c.
"""

from ._core import *  # noqa: F401,F403

__version__ = "0.1.0"
