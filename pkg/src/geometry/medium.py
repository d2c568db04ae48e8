#!/usr/bin/env python3
"""
Elastic Medium - Lamé constants, density, frequency and wavenumbers
"""

import logging
from dataclasses import dataclass
from typing import Dict

import numpy as np

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class ElasticMedium:
    """
    Homogeneous isotropic elastic background.

    kappa_s = ω√(ρ/μ) is the shear wavenumber and
    kappa_p = ω√(ρ/(λ+2μ)) the compressional one.
    """
    lam: float
    mu: float
    rho: float
    omega: float

    def __post_init__(self):
        if self.mu <= 0:
            raise ValueError("mu must be positive")
        if self.lam + self.mu <= 0:
            raise ValueError("lambda + mu must be positive")
        if self.rho <= 0:
            raise ValueError("rho must be positive")
        if self.omega <= 0:
            raise ValueError("omega must be positive")

    @property
    def kappa_s(self) -> float:
        return self.omega * np.sqrt(self.rho / self.mu)

    @property
    def kappa_p(self) -> float:
        return self.omega * np.sqrt(self.rho / (self.lam + 2.0 * self.mu))

    @property
    def shear_wavelength(self) -> float:
        return 2.0 * np.pi / self.kappa_s

    @property
    def compressional_wavelength(self) -> float:
        return 2.0 * np.pi / self.kappa_p

    def with_frequency(self, omega: float) -> 'ElasticMedium':
        return ElasticMedium(lam=self.lam, mu=self.mu, rho=self.rho, omega=omega)

    def to_dict(self) -> Dict:
        return {'lambda': self.lam, 'mu': self.mu, 'rho': self.rho, 'omega': self.omega}
