"""Physical constants and unit helpers.

Unit conventions used throughout the package: energies in MeV, lengths in
fm, masses in MeV/c^2, wave vectors in fm^-1.  Velocity-bearing quantities
(sigma*v, reactivities) carry an implicit factor of c, i.e. they are quoted
in fm^2*c.
"""

from __future__ import annotations

import numpy as np

HBARC_MEV_FM = 197.3269804  # hbar*c (CODATA)
AMU_MEV = 931.49410242  # atomic mass unit in MeV/c^2 (CODATA)
KEV = 1e-3  # one keV in MeV


def wave_number(energy_mev, mass_mev):
    """Free wave vector k = sqrt(2 m E)/hbar in fm^-1 for E in MeV, m in MeV/c^2."""
    return np.sqrt(2.0 * mass_mev * energy_mev) / HBARC_MEV_FM


def kinetic_energy(k_inv_fm, mass_mev):
    """Kinetic energy (hbar k)^2 / (2 m) in MeV; even in k."""
    return (HBARC_MEV_FM * k_inv_fm) ** 2 / (2.0 * mass_mev)


def reduced_mass_amu(m_a_amu: float, m_b_amu: float) -> float:
    """Reduced mass m_a*m_b/(m_a+m_b) of two nuclei, from a.m.u. to MeV/c^2."""
    if m_a_amu <= 0 or m_b_amu <= 0:
        raise ValueError("nucleus masses must be positive")
    return AMU_MEV * m_a_amu * m_b_amu / (m_a_amu + m_b_amu)
