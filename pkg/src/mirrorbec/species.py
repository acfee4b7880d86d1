"""Atomic species used as the mirror medium."""
from dataclasses import dataclass

import numpy as np
from scipy import constants

ATOMIC_MASS_UNIT = constants.physical_constants["atomic mass constant"][0]


@dataclass(frozen=True)
class AtomSpecies:
    """Two-level atom parameters.

    Attributes
    ----------
    resonance_wavelength : float
        Optical resonance wavelength in metres.
    linewidth : float
        Natural linewidth in Hz (the same unit as detunings).
    mass : float
        Atomic mass in kg.
    number_density : float
        Number density in m^-3.
    """

    resonance_wavelength: float
    linewidth: float
    mass: float
    number_density: float

    def __post_init__(self):
        for name in ("resonance_wavelength", "linewidth", "mass", "number_density"):
            value = getattr(self, name)
            if not np.isfinite(value) or value <= 0:
                raise ValueError(f"{name} must be finite and strictly positive, got {value!r}")

    @property
    def reduced_wavelength(self):
        return self.resonance_wavelength / (2 * np.pi)

    @property
    def wavenumber(self):
        return 2 * np.pi / self.resonance_wavelength

    @property
    def rescaled_density(self):
        """Dimensionless density: (lambda / 2 pi)^3 * N / V."""
        return self.reduced_wavelength**3 * self.number_density


# 10^14 cm^-3 expressed in m^-3
RUBIDIUM_87 = AtomSpecies(
    resonance_wavelength=780e-9,
    linewidth=6e6,
    mass=86.909180527 * ATOMIC_MASS_UNIT,
    number_density=1e14 * 1e6,
)


def recoil_energy(species):
    """Single-photon recoil energy h^2 / (2 m lambda^2) in joules."""
    return constants.h**2 / (2 * species.mass * species.resonance_wavelength**2)
