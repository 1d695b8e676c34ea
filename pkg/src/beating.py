"""Beat-wavelength predictions for the long spatial modulation of the electron beam.

All lambda_b values are returned in cm. The exact path works from the full
relativistic sideband momenta; the other variants are the small hbar*omega/E0
expansions of it.
"""

import logging
import math
from dataclasses import dataclass, field
from enum import Enum
from typing import Any, Dict, Iterable, Optional

import numpy as np

from common import (
    DomainError, NoSuchModeError, NotARadiationModeError, UnreachableTargetError
)
from kinematics import (
    ANGSTROM_PER_CM, HBAR_C_EV_ANGSTROM, ElectronBeam, LaserField, sidebands
)
from waveguide import ModeSolution, Slab, solve_tm_mode

logger = logging.getLogger(__name__)


class ModelVariant(str, Enum):
    """Model that produced a beat wavelength."""
    EXACT = "exact"
    PLANEWAVE = "planewave"
    BASE = "base"
    TM_MODE = "tm_mode"
    RADIATION_MODE = "radiation_mode"


@dataclass(frozen=True)
class BeatPrediction:
    """A beat wavelength (cm) and the inputs that produced it."""
    lambda_b: float
    variant: ModelVariant
    inputs: Dict[str, Any] = field(default_factory=dict)

    def to_record(self) -> Dict[str, Any]:
        """Flat mapping for CSV/JSON output."""
        record = {'variant': self.variant.value, 'lambda_b_cm': self.lambda_b}
        record.update(self.inputs)
        return record


@dataclass(frozen=True)
class RadiationAngles:
    """Angles a radiation mode needs to produce a target beat wavelength."""
    alpha_internal: float
    theta_external: float
    prediction: BeatPrediction

    @property
    def alpha_internal_degrees(self) -> float:
        return math.degrees(self.alpha_internal)

    @property
    def theta_external_degrees(self) -> float:
        return math.degrees(self.theta_external)


def _echo(beam: ElectronBeam, laser: LaserField, **extra) -> Dict[str, Any]:
    inputs = {
        'kinetic_energy_ev': beam.kinetic_energy,
        'beta': beam.beta,
        'wavelength_angstrom': laser.vacuum_wavelength,
    }
    inputs.update(extra)
    return inputs


def base_wavelength_cm(beam: ElectronBeam, laser: LaserField) -> float:
    """lambda_b0 = 2 lambda_p (E0 / hbar omega) (v0/c)^3, in cm."""
    lambda_angstrom = 2.0 * laser.vacuum_wavelength \
        * (beam.total_energy / laser.photon_energy) * beam.beta ** 3
    return lambda_angstrom / ANGSTROM_PER_CM


def _expanded(beam: ElectronBeam, laser: LaserField, effective_index_squared: float) -> float:
    # lambda_b0 / (1 - beta^2 (1 - n^2 cos^2 alpha))
    denominator = 1.0 - beam.beta ** 2 * (1.0 - effective_index_squared)
    return base_wavelength_cm(beam, laser) / denominator


def beat_base(beam: ElectronBeam, laser: LaserField) -> BeatPrediction:
    """Base beat wavelength lambda_b0, the vacuum-like (n cos alpha = 1) value."""
    return BeatPrediction(
        lambda_b=base_wavelength_cm(beam, laser),
        variant=ModelVariant.BASE,
        inputs=_echo(beam, laser),
    )


def beat_planewave(beam: ElectronBeam, laser: LaserField, n: float) -> BeatPrediction:
    """Beat wavelength when the light in the slab is a plane wave along x.

    Raises:
        DomainError: If n < 1
    """
    if not n >= 1:
        raise DomainError(f"Refractive index must be >= 1, got {n!r}")
    return BeatPrediction(
        lambda_b=_expanded(beam, laser, n ** 2),
        variant=ModelVariant.PLANEWAVE,
        inputs=_echo(beam, laser, refractive_index=n),
    )


def beat_tm(beam: ElectronBeam, laser: LaserField, n: float, alpha: float) -> BeatPrediction:
    """Beat wavelength when the light is a TM mode with internal angle alpha.

    Raises:
        DomainError: If n < 1 or alpha outside [0, pi/2)
    """
    if not n >= 1:
        raise DomainError(f"Refractive index must be >= 1, got {n!r}")
    if not 0 <= alpha < 0.5 * math.pi:
        raise DomainError(f"Internal angle must be in [0, pi/2), got {alpha!r}")
    return BeatPrediction(
        lambda_b=_expanded(beam, laser, (n * math.cos(alpha)) ** 2),
        variant=ModelVariant.TM_MODE,
        inputs=_echo(beam, laser, refractive_index=n, alpha_deg=math.degrees(alpha)),
    )


def stationary_wavenumber(beam: ElectronBeam, laser: LaserField, x_wavenumber: float) -> float:
    """(2 p0 - p_{1z} - p_{-1z}) / 2 hbar in rad/angstrom."""
    bands = sidebands(beam, laser, x_wavenumber)
    return bands.stationary_deficit_c / (2.0 * HBAR_C_EV_ANGSTROM)


def optical_wavenumber(beam: ElectronBeam, laser: LaserField, x_wavenumber: float) -> float:
    """(p_{1z} - p_{-1z}) / 2 hbar in rad/angstrom."""
    bands = sidebands(beam, laser, x_wavenumber)
    return bands.optical_splitting_c / (2.0 * HBAR_C_EV_ANGSTROM)


def beat_exact(beam: ElectronBeam, laser: LaserField, x_wavenumber: float) -> BeatPrediction:
    """Beat wavelength 4 pi hbar / (2 p0 - p_{1z} - p_{-1z}) from the full sideband momenta.

    Raises:
        EvanescentSidebandError: If a sideband does not propagate
        DomainError: If the sidebands are degenerate (no beat)
    """
    deficit = sidebands(beam, laser, x_wavenumber).stationary_deficit_c
    if not deficit > 0:
        raise DomainError(
            f"Sidebands are degenerate (momentum deficit {deficit!r} eV); no beat"
        )
    lambda_angstrom = 4.0 * math.pi * HBAR_C_EV_ANGSTROM / deficit
    return BeatPrediction(
        lambda_b=lambda_angstrom / ANGSTROM_PER_CM,
        variant=ModelVariant.EXACT,
        inputs=_echo(beam, laser, x_wavenumber=x_wavenumber),
    )


def optical_modulation_period(beam: ElectronBeam, laser: LaserField,
                              x_wavenumber: float) -> float:
    """z-period in angstrom of the travelling optical modulation, 4 pi hbar / (p_{1z} - p_{-1z}).

    Returns math.inf when the sidebands coincide.
    """
    splitting = sidebands(beam, laser, x_wavenumber).optical_splitting_c
    if splitting == 0:
        return math.inf
    return 4.0 * math.pi * HBAR_C_EV_ANGSTROM / abs(splitting)


def invert_radiation_angle(beam: ElectronBeam, laser: LaserField, n: float,
                           lambda_b_target: float) -> RadiationAngles:
    """Angles for which the TM-mode expression reaches a target above lambda_b0.

    Solves lambda_b0 / (1 - beta^2 (1 - n^2 cos^2 alpha)) = target for
    n^2 cos^2 alpha in closed form. The vacuum-side angle between the input
    light and the slab surface follows from x-phase matching, cos(theta) = n cos(alpha).

    Args:
        beam: Incident electron
        laser: Laser field
        n: Slab refractive index
        lambda_b_target: Target beat wavelength in cm

    Returns:
        RadiationAngles with the internal and external angles in radians

    Raises:
        DomainError: If n <= 1 or the target is not positive
        NotARadiationModeError: If the target does not exceed lambda_b0
        UnreachableTargetError: If no real angle reaches the target
    """
    if not n > 1:
        raise DomainError(f"Refractive index must be > 1, got {n!r}")
    if not lambda_b_target > 0:
        raise DomainError(f"Target beat wavelength must be > 0, got {lambda_b_target!r}")

    base = base_wavelength_cm(beam, laser)
    if lambda_b_target <= base:
        raise NotARadiationModeError(
            f"Target {lambda_b_target:g} cm does not exceed lambda_b0 = {base:.6g} cm; "
            "a guided mode already covers it"
        )

    effective_index_squared = 1.0 - (1.0 - base / lambda_b_target) / beam.beta ** 2
    if effective_index_squared < 0:
        raise UnreachableTargetError(
            f"Target {lambda_b_target:g} cm needs n^2 cos^2(alpha) = {effective_index_squared:.6g} < 0"
        )
    cos_theta = math.sqrt(effective_index_squared)
    if cos_theta > 1:
        raise UnreachableTargetError(
            f"Target {lambda_b_target:g} cm needs cos(theta) = {cos_theta:.6g} > 1"
        )

    theta = math.acos(cos_theta)
    alpha = math.acos(cos_theta / n)
    prediction = BeatPrediction(
        lambda_b=_expanded(beam, laser, effective_index_squared),
        variant=ModelVariant.RADIATION_MODE,
        inputs=_echo(
            beam, laser,
            refractive_index=n,
            alpha_deg=math.degrees(alpha),
            theta_external_deg=math.degrees(theta),
        ),
    )
    logger.debug(
        f"Radiation mode for {lambda_b_target:g} cm: alpha={math.degrees(alpha):.4f} deg, "
        f"theta={math.degrees(theta):.4f} deg"
    )
    return RadiationAngles(alpha_internal=alpha, theta_external=theta, prediction=prediction)


def beat_guided_mode(beam: ElectronBeam, laser: LaserField, slab: Slab,
                     mode_index: int = 0) -> BeatPrediction:
    """Solve TM_m for the slab and return its beat wavelength with the mode echoed."""
    mode: ModeSolution = solve_tm_mode(slab, laser, mode_index)
    prediction = beat_tm(beam, laser, slab.refractive_index, mode.alpha)
    inputs = dict(prediction.inputs)
    inputs.update({
        'material': slab.material,
        'thickness_angstrom': slab.thickness,
        'mode_index': mode.mode_index,
        'effective_index': mode.effective_index,
    })
    return BeatPrediction(lambda_b=prediction.lambda_b, variant=ModelVariant.TM_MODE, inputs=inputs)


def guided_upper_bound(beam: ElectronBeam, laser: LaserField,
                       n_values: Iterable[float],
                       thickness_values: Iterable[float]) -> Optional[BeatPrediction]:
    """Largest TM0 prediction over a grid of refractive indices and thicknesses.

    This is the best a guided mode can do under formal optimization of n and d;
    it stays below lambda_b0 because n cos(alpha) > 1.
    """
    best: Optional[BeatPrediction] = None
    thicknesses = list(thickness_values)
    for n in np.asarray(list(n_values), dtype=float):
        for d in thicknesses:
            try:
                prediction = beat_guided_mode(beam, laser, Slab(float(d), float(n)), 0)
            except NoSuchModeError:
                continue
            if best is None or prediction.lambda_b > best.lambda_b:
                best = prediction
    return best
