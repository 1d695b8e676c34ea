"""Electron probability density behind the slab and its stationary z-envelope.

To first order in the light field, for z >= 0,

    rho / rho0 = 1 - beta S(z Phi_b) sin(pi d / 2 d0) cos(k x - omega t + z Phi_o)

with Phi_b = (2 p0 - p_{1z} - p_{-1z}) / 2 hbar and Phi_o = (p_{1z} - p_{-1z}) / 2 hbar.
S is sin for the theoretical phase and cos for the phase the experiments show
(maximum at the film surface).

Units: x in angstrom, z in cm, t in seconds.
"""

import logging
import math
from dataclasses import dataclass, field
from enum import Enum
from functools import cached_property
from typing import List, Sequence

import numpy as np
import pandas as pd
from scipy import optimize

from beating import optical_wavenumber, stationary_wavenumber
from common import DomainError, NumericalFailureError, OutputSizeError
from kinematics import ANGSTROM_PER_CM, ElectronBeam, LaserField

logger = logging.getLogger(__name__)

DEFAULT_MODULATION_DEPTH = 0.35
DEFAULT_THICKNESS_ANGSTROM = 1000.0
DEFAULT_OPTIMUM_THICKNESS_ANGSTROM = 1007.0

GRID_STEPS_PER_BEAT = 1000
GOLDEN_TOLERANCE = 1e-9
# refined peaks this far (relative) past z_max are taken to sit on it
BOUNDARY_SLACK = 1e-8

MAX_GRID_ROWS = 10_000_000


class PhaseConvention(str, Enum):
    SINE_THEORY = "sine_theory"
    COSINE_EXPERIMENT = "cosine_experiment"


@dataclass(frozen=True)
class PatternParams:
    """Inputs to the density pattern."""
    beam: ElectronBeam
    laser: LaserField
    x_wavenumber: float
    beta_mod: float = DEFAULT_MODULATION_DEPTH
    d: float = DEFAULT_THICKNESS_ANGSTROM
    d0: float = DEFAULT_OPTIMUM_THICKNESS_ANGSTROM
    phase_convention: PhaseConvention = field(default=PhaseConvention.SINE_THEORY)

    def __post_init__(self):
        if not 0 <= self.beta_mod <= 1:
            raise DomainError(f"Modulation depth must be in [0, 1], got {self.beta_mod!r}")
        if not (self.d > 0 and self.d0 > 0):
            raise DomainError(f"Thicknesses must be > 0, got d={self.d!r}, d0={self.d0!r}")
        object.__setattr__(self, 'phase_convention', PhaseConvention(self.phase_convention))

    @cached_property
    def stationary_wavenumber_cm(self) -> float:
        """Phi_b in rad/cm."""
        return stationary_wavenumber(self.beam, self.laser, self.x_wavenumber) * ANGSTROM_PER_CM

    @cached_property
    def optical_wavenumber_cm(self) -> float:
        """Phi_o in rad/cm."""
        return optical_wavenumber(self.beam, self.laser, self.x_wavenumber) * ANGSTROM_PER_CM

    @cached_property
    def amplitude(self) -> float:
        """beta sin(pi d / 2 d0), the largest possible |rho/rho0 - 1|."""
        return self.beta_mod * thickness_factor(self.d, self.d0)


@dataclass(frozen=True)
class PatternSample:
    x: float
    z: float
    t: float
    rho_ratio: float


@dataclass(frozen=True)
class EnvelopeMaximum:
    z: float
    amplitude: float


def thickness_factor(d: float, d0: float) -> float:
    """Photon-exchange factor sin(pi d / 2 d0).

    Raises:
        DomainError: If d or d0 is not positive
    """
    if not (d > 0 and d0 > 0):
        raise DomainError(f"Thicknesses must be > 0, got d={d!r}, d0={d0!r}")
    return math.sin(math.pi * d / (2.0 * d0))


def beat_wavelength_cm(params: PatternParams) -> float:
    """Period in z of the stationary factor, 2 pi / Phi_b."""
    return 2.0 * math.pi / params.stationary_wavenumber_cm


def _stationary_factor(params: PatternParams, z):
    phase = np.asarray(z, dtype=float) * params.stationary_wavenumber_cm
    if params.phase_convention is PhaseConvention.SINE_THEORY:
        return np.sin(phase)
    return np.cos(phase)


def _check_z(z) -> None:
    if np.any(np.asarray(z) < 0):
        raise DomainError("z must be >= 0 (region beyond the slab exit face)")


def rho_ratio(params: PatternParams, x, z, t):
    """Vectorized rho/rho0 over broadcastable x (A), z (cm) and t (s)."""
    _check_z(z)
    x = np.asarray(x, dtype=float)
    z = np.asarray(z, dtype=float)
    t = np.asarray(t, dtype=float)
    travelling = np.cos(
        params.x_wavenumber * x - params.laser.angular_frequency * t
        + z * params.optical_wavenumber_cm
    )
    return 1.0 - params.amplitude * _stationary_factor(params, z) * travelling


def density(params: PatternParams, x: float, z: float, t: float) -> PatternSample:
    """Electron probability density ratio at one point.

    Raises:
        DomainError: If z < 0
    """
    value = rho_ratio(params, x, z, t)
    return PatternSample(x=float(x), z=float(z), t=float(t), rho_ratio=float(value))


def envelope(params: PatternParams, z):
    """Local modulation amplitude at z, maximized over x and t."""
    _check_z(z)
    values = abs(params.amplitude) * np.abs(_stationary_factor(params, z))
    return float(values) if np.ndim(values) == 0 else values


def envelope_extrema(params: PatternParams, z_max: float) -> List[EnvelopeMaximum]:
    """Positions of the envelope maxima in [0, z_max], sorted by z.

    Scans a uniform grid at lambda_b / 1000 and refines each bracketed maximum
    by golden-section search. A peak the refinement places within
    BOUNDARY_SLACK of z_max is reported at z_max.

    Raises:
        DomainError: If z_max is not positive
        NumericalFailureError: If a refinement leaves its bracket
    """
    if not z_max > 0:
        raise DomainError(f"z_max must be > 0, got {z_max!r}")

    step = beat_wavelength_cm(params) / GRID_STEPS_PER_BEAT
    # run the grid past z_max so a peak at or just below z_max is still bracketed
    count = int(math.floor(z_max / step)) + 3
    grid = step * np.arange(count)
    values = envelope(params, grid)

    maxima: List[EnvelopeMaximum] = []
    if values[0] > values[1]:
        maxima.append(EnvelopeMaximum(z=0.0, amplitude=float(values[0])))

    def negative_envelope(z):
        return -envelope(params, abs(z))

    for i in range(1, count - 1):
        if not (values[i] >= values[i - 1] and values[i] > values[i + 1]):
            continue
        left = i - 1
        while left > 0 and values[left] >= values[i]:
            left -= 1
        bracket = (grid[left], grid[i], grid[i + 1])
        result = optimize.minimize_scalar(
            negative_envelope, bracket=bracket, method='golden',
            tol=GOLDEN_TOLERANCE
        )
        z_peak = float(result.x)
        if not bracket[0] <= z_peak <= bracket[2]:
            raise NumericalFailureError(
                f"Golden-section refinement left its bracket near z={grid[i]:.6g} cm"
            )
        if z_peak > z_max:
            if z_peak - z_max > BOUNDARY_SLACK * z_max:
                continue
            z_peak = z_max
        maxima.append(EnvelopeMaximum(z=z_peak, amplitude=envelope(params, z_peak)))

    logger.debug(f"Found {len(maxima)} envelope maxima in [0, {z_max:g}] cm")
    return maxima


def pattern_grid(params: PatternParams, x_values: Sequence[float],
                 z_values: Sequence[float], t_values: Sequence[float],
                 max_rows: int = MAX_GRID_ROWS) -> pd.DataFrame:
    """Evaluate rho/rho0 on a tensor grid, x-major then z then t.

    Raises:
        OutputSizeError: If the grid has more than max_rows points
        DomainError: If any z is negative
    """
    x_values = np.asarray(x_values, dtype=float)
    z_values = np.asarray(z_values, dtype=float)
    t_values = np.asarray(t_values, dtype=float)
    rows = x_values.size * z_values.size * t_values.size
    if rows > max_rows:
        raise OutputSizeError(f"Pattern grid has {rows} rows, limit is {max_rows}")

    xx, zz, tt = np.meshgrid(x_values, z_values, t_values, indexing='ij')
    values = rho_ratio(params, xx, zz, tt)
    return pd.DataFrame({
        'x': xx.ravel(),
        'z': zz.ravel(),
        't': tt.ravel(),
        'rho_ratio': values.ravel(),
    })
