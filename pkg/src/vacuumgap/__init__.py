"""Casimir and Casimir-Polder energies for flat and corrugated bodies.

Natural units (hbar = c = k_B = 1) throughout the library; the command-line
front end handles SI conversion.
"""

from . import casimir_polder, errors, gratings, lifshitz, materials, quadrature, reflection, units

__all__ = [
    "casimir_polder",
    "errors",
    "gratings",
    "lifshitz",
    "materials",
    "quadrature",
    "reflection",
    "units",
]

__version__ = "0.1.0"
