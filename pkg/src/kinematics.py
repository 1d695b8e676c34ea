"""Relativistic electron and photon kinematics.

Canonical units are eV for energies (momenta are carried as p*c in eV) and
angstrom for lengths. Angles are radians.
"""

import logging
import math
import numbers
from dataclasses import dataclass
from typing import Dict, Tuple

from common import DomainError, EvanescentSidebandError

logger = logging.getLogger(__name__)


ELECTRON_REST_ENERGY_EV = 510998.95
HC_EV_ANGSTROM = 12398.42
SPEED_OF_LIGHT_ANGSTROM_PER_S = 2.99792458e18
HBAR_C_EV_ANGSTROM = HC_EV_ANGSTROM / (2.0 * math.pi)

ANGSTROM_PER_CM = 1.0e8

SIDEBAND_ORDERS = (-1, 0, 1)

CONSTANT_TABLE: Dict[str, Dict[str, object]] = {
    'electron_rest_energy': {
        'symbol': 'mc^2',
        'value': ELECTRON_REST_ENERGY_EV,
        'unit': 'eV',
        'source': 'CODATA 2018 electron mass energy equivalent',
    },
    'hc': {
        'symbol': 'hc',
        'value': HC_EV_ANGSTROM,
        'unit': 'eV*angstrom',
        'source': 'CODATA 2018 h*c/e, rounded to 7 significant digits',
    },
    'hbar_c': {
        'symbol': 'hbar*c',
        'value': HBAR_C_EV_ANGSTROM,
        'unit': 'eV*angstrom',
        'source': 'derived: hc / 2pi',
    },
    'speed_of_light': {
        'symbol': 'c',
        'value': SPEED_OF_LIGHT_ANGSTROM_PER_S,
        'unit': 'angstrom/s',
        'source': 'SI defined value',
    },
    'angstrom_per_cm': {
        'symbol': 'cm',
        'value': ANGSTROM_PER_CM,
        'unit': 'angstrom',
        'source': 'unit conversion',
    },
}


def constant_table() -> Dict[str, Dict[str, object]]:
    """Copy of the physical constant table with source annotations."""
    return {name: dict(entry) for name, entry in CONSTANT_TABLE.items()}


@dataclass(frozen=True)
class ElectronBeam:
    """Relativistic state of the incident electron."""
    kinetic_energy: float
    rest_energy: float
    total_energy: float
    momentum_c: float
    beta: float

    @property
    def gamma(self) -> float:
        return self.total_energy / self.rest_energy

    def mass_shell_residual(self) -> float:
        """Relative mismatch of E0^2 = (mc^2)^2 + (p0 c)^2."""
        lhs = self.total_energy ** 2
        return abs(lhs - self.rest_energy ** 2 - self.momentum_c ** 2) / lhs


@dataclass(frozen=True)
class LaserField:
    """Laser light in vacuum."""
    vacuum_wavelength: float
    photon_energy: float
    angular_frequency: float
    vacuum_wavenumber: float


@dataclass(frozen=True)
class Sideband:
    """One electron plane-wave component after exchanging `order` photons."""
    order: int
    energy: float
    px_c: float
    pz_c: float

    def mass_shell_residual(self, rest_energy: float) -> float:
        lhs = self.energy ** 2
        return abs(lhs - rest_energy ** 2 - self.px_c ** 2 - self.pz_c ** 2) / lhs


@dataclass(frozen=True)
class SidebandSet:
    """The n = -1, 0, +1 sidebands plus the momentum combinations that set the beat.

    stationary_deficit_c is 2*p0 - p_{+1,z} - p_{-1,z} and optical_splitting_c
    is p_{+1,z} - p_{-1,z}, both times c in eV.
    """
    members: Tuple[Sideband, Sideband, Sideband]
    rest_energy: float
    x_wavenumber: float
    stationary_deficit_c: float
    optical_splitting_c: float

    def __getitem__(self, order: int) -> Sideband:
        for member in self.members:
            if member.order == order:
                return member
        raise KeyError(order)

    def max_mass_shell_residual(self) -> float:
        return max(m.mass_shell_residual(self.rest_energy) for m in self.members)


def _require_positive(value: float, name: str) -> None:
    if (isinstance(value, bool) or not isinstance(value, numbers.Real)
            or not math.isfinite(value) or value <= 0):
        raise DomainError(f"{name} must be a positive finite number, got {value!r}")


def electron_from_kinetic(kinetic_energy: float,
                          rest_energy: float = ELECTRON_REST_ENERGY_EV) -> ElectronBeam:
    """Build the electron state from its kinetic energy.

    Args:
        kinetic_energy: Kinetic energy E0 - mc^2 in eV
        rest_energy: Electron rest energy in eV

    Returns:
        ElectronBeam on the mass shell

    Raises:
        DomainError: If kinetic_energy is not positive
    """
    _require_positive(kinetic_energy, "kinetic_energy")
    kinetic_energy = float(kinetic_energy)
    total = rest_energy + kinetic_energy
    # (E0 - mc^2)(E0 + mc^2) avoids cancellation at low energy
    momentum_c = math.sqrt(kinetic_energy * (kinetic_energy + 2.0 * rest_energy))
    return ElectronBeam(
        kinetic_energy=float(kinetic_energy),
        rest_energy=float(rest_energy),
        total_energy=total,
        momentum_c=momentum_c,
        beta=momentum_c / total,
    )


def laser_from_wavelength(vacuum_wavelength: float) -> LaserField:
    """Build the laser field from its vacuum wavelength in angstrom.

    Raises:
        DomainError: If the wavelength is not positive
    """
    _require_positive(vacuum_wavelength, "vacuum_wavelength")
    vacuum_wavelength = float(vacuum_wavelength)
    return LaserField(
        vacuum_wavelength=float(vacuum_wavelength),
        photon_energy=HC_EV_ANGSTROM / vacuum_wavelength,
        angular_frequency=2.0 * math.pi * SPEED_OF_LIGHT_ANGSTROM_PER_S / vacuum_wavelength,
        vacuum_wavenumber=2.0 * math.pi / vacuum_wavelength,
    )


def sidebands(beam: ElectronBeam, laser: LaserField, x_wavenumber: float) -> SidebandSet:
    """Sideband energies and momenta for photon exchange with x-momentum hbar*k.

    Args:
        beam: Incident electron
        laser: Laser field (photon_energy may be 0 for the degenerate limit)
        x_wavenumber: Wavenumber of the light along x inside the slab, rad/angstrom

    Returns:
        SidebandSet for n = -1, 0, +1

    Raises:
        DomainError: If x_wavenumber is negative
        EvanescentSidebandError: If a sideband has no real forward momentum
    """
    if not math.isfinite(x_wavenumber) or x_wavenumber < 0:
        raise DomainError(f"x_wavenumber must be >= 0, got {x_wavenumber!r}")

    rest = beam.rest_energy
    photon = laser.photon_energy
    kick = HBAR_C_EV_ANGSTROM * x_wavenumber

    members = []
    # p0^2 - p_nz^2, exact in terms of the inputs
    momentum_square_drop = {}
    for order in SIDEBAND_ORDERS:
        energy = beam.total_energy + order * photon
        px_c = order * kick
        kinetic = beam.kinetic_energy + order * photon
        pz_square = kinetic * (kinetic + 2.0 * rest) - px_c ** 2
        if pz_square < 0:
            raise EvanescentSidebandError(
                f"Sideband n={order:+d} is evanescent: (p_z c)^2 = {pz_square:.6g} eV^2 "
                f"for T={beam.kinetic_energy:g} eV, hbar*omega={photon:g} eV, k={x_wavenumber:g}/A"
            )
        members.append(Sideband(order=order, energy=energy, px_c=px_c, pz_c=math.sqrt(pz_square)))
        momentum_square_drop[order] = px_c ** 2 \
            - order * photon * (2.0 * beam.total_energy + order * photon)

    by_order = {m.order: m for m in members}
    p0 = by_order[0].pz_c
    stationary = 0.0
    for order in (1, -1):
        stationary += momentum_square_drop[order] / (p0 + by_order[order].pz_c)

    upper, lower = by_order[1].pz_c, by_order[-1].pz_c
    optical = 4.0 * beam.total_energy * photon / (upper + lower) if upper + lower > 0 else 0.0

    logger.debug(
        f"Sidebands at k={x_wavenumber:.6g}/A: deficit={stationary:.6g} eV, "
        f"splitting={optical:.6g} eV"
    )
    return SidebandSet(
        members=tuple(members),
        rest_energy=rest,
        x_wavenumber=float(x_wavenumber),
        stationary_deficit_c=stationary,
        optical_splitting_c=optical,
    )
