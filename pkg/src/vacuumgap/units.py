"""Conversion between SI inputs/outputs and the internal natural units.

Internally everything is hbar = c = k_B = 1 with energies in eV, so lengths
are 1/eV. Core modules never see SI; only the CLI converts. Constants are
CODATA-fixed values, written once here so the CSV round-trip test can use
the very same binary factors.
"""

from __future__ import annotations

HBARC_EV_NM = 197.3269804  # eV nm
EV_J = 1.602176634e-19  # J per eV
KB_EV_PER_K = 8.617333262e-5  # eV per kelvin

_EV_INV_M = HBARC_EV_NM * 1e-9  # meters per 1/eV

# output conversion factors, by natural-unit dimension
ENERGY_PER_AREA_SI = EV_J / _EV_INV_M**2  # eV^3 -> J/m^2
PRESSURE_SI = EV_J / _EV_INV_M**3  # eV^4 -> Pa
ENERGY_SI = EV_J  # eV -> J
FORCE_SI = EV_J / _EV_INV_M  # eV^2 -> N


def nm_to_natural(length_nm: float) -> float:
    """nm -> 1/eV."""
    return length_nm / HBARC_EV_NM


def kelvin_to_ev(t_kelvin: float) -> float:
    return t_kelvin * KB_EV_PER_K


def nm3_to_natural(volume_nm3: float) -> float:
    """Polarizability volume nm^3 -> 1/eV^3."""
    return volume_nm3 / HBARC_EV_NM**3
