"""TM modes of a symmetric vacuum-clad dielectric slab.

A guided TM_m mode is written as two plane waves travelling at angles +/-alpha
to the slab plane (the x axis). With k0 the vacuum wavenumber,

    kappa = n k0 sin(alpha)                 transverse wavenumber inside
    gamma = k0 sqrt(n^2 cos^2(alpha) - 1)   decay rate outside

and the mode condition is tan(kappa d / 2 - m pi / 2) = n^2 gamma / kappa.
"""

import logging
import math
from dataclasses import dataclass
from typing import List

from scipy import optimize

from common import DomainError, NoSuchModeError, NumericalFailureError
from kinematics import LaserField

logger = logging.getLogger(__name__)

BRACKET_EPSILON = 1e-9
SOLVER_RTOL = 1e-12
SOLVER_XTOL = 1e-15
SOLVER_MAXITER = 200


@dataclass(frozen=True)
class Slab:
    """Dielectric film between z = -d and z = 0, thickness in angstrom."""
    thickness: float
    refractive_index: float
    material: str = ""

    def __post_init__(self):
        if not math.isfinite(self.thickness) or self.thickness <= 0:
            raise DomainError(f"Slab thickness must be > 0, got {self.thickness!r}")
        if not math.isfinite(self.refractive_index) or self.refractive_index <= 1:
            raise DomainError(
                f"Slab refractive index must be > 1 for guided modes, got {self.refractive_index!r}"
            )

    @property
    def critical_angle(self) -> float:
        """Largest internal angle to the x axis still totally reflected."""
        return math.acos(1.0 / self.refractive_index)


@dataclass(frozen=True)
class ModeSolution:
    """A guided TM mode."""
    mode_index: int
    alpha: float
    kappa: float
    gamma: float
    residual: float
    refractive_index: float

    @property
    def alpha_degrees(self) -> float:
        return math.degrees(self.alpha)

    @property
    def effective_index(self) -> float:
        """n cos(alpha); above 1 for every guided mode."""
        return self.refractive_index * math.cos(self.alpha)


def tm_cutoff_thickness(laser: LaserField, refractive_index: float, mode_index: int) -> float:
    """Thickness above which TM_m is guided: m * lambda_p / (2 sqrt(n^2 - 1)).

    Args:
        laser: Laser field
        refractive_index: Slab refractive index
        mode_index: Mode number m (TM0 has no cutoff)

    Returns:
        Cutoff thickness in angstrom

    Raises:
        DomainError: If n <= 1 or m < 0
    """
    if not refractive_index > 1:
        raise DomainError(f"No guided modes for refractive index {refractive_index!r} <= 1")
    if mode_index < 0:
        raise DomainError(f"Mode index must be >= 0, got {mode_index}")
    if mode_index == 0:
        return 0.0
    return mode_index * laser.vacuum_wavelength / (2.0 * math.sqrt(refractive_index ** 2 - 1.0))


def tm_mode_count(slab: Slab, laser: LaserField) -> int:
    """Number of guided TM modes; a thickness exactly at a cutoff does not add a mode."""
    count = 1
    while tm_cutoff_thickness(laser, slab.refractive_index, count) < slab.thickness:
        count += 1
    return count


def _wavenumbers(alpha: float, slab: Slab, laser: LaserField):
    n = slab.refractive_index
    k0 = laser.vacuum_wavenumber
    kappa = n * k0 * math.sin(alpha)
    gamma = k0 * math.sqrt(max((n * math.cos(alpha)) ** 2 - 1.0, 0.0))
    return kappa, gamma


def _phase_mismatch(alpha: float, slab: Slab, laser: LaserField, mode_index: int) -> float:
    # kappa d/2 - m pi/2 - atan(n^2 gamma/kappa), scaled by pi/2; increasing in alpha
    kappa, gamma = _wavenumbers(alpha, slab, laser)
    n_squared = slab.refractive_index ** 2
    phase = 0.5 * kappa * slab.thickness - 0.5 * mode_index * math.pi \
        - math.atan2(n_squared * gamma, kappa)
    return phase / (0.5 * math.pi)


def dispersion_residual(candidate_alpha: float, slab: Slab, laser: LaserField,
                        mode_index: int) -> float:
    """Signed, normalized TM dispersion mismatch at an internal angle.

    Zero exactly at a mode. Negative below the TM_m root and positive above it.

    Raises:
        DomainError: If the angle is outside (0, arccos(1/n))
    """
    if not 0 < candidate_alpha < slab.critical_angle:
        raise DomainError(
            f"Angle {candidate_alpha!r} rad is outside the guided range "
            f"(0, {slab.critical_angle:.6g})"
        )
    if mode_index < 0:
        raise DomainError(f"Mode index must be >= 0, got {mode_index}")
    return _phase_mismatch(candidate_alpha, slab, laser, mode_index)


def solver_bracket(slab: Slab):
    """Angle interval searched by solve_tm_mode."""
    return BRACKET_EPSILON, slab.critical_angle - BRACKET_EPSILON


def solve_tm_mode(slab: Slab, laser: LaserField, mode_index: int = 0) -> ModeSolution:
    """Solve the TM_m dispersion relation for the internal angle alpha.

    Args:
        slab: Dielectric slab
        laser: Laser field
        mode_index: Mode number m

    Returns:
        ModeSolution for TM_m

    Raises:
        NoSuchModeError: If TM_m is not guided at this thickness
        NumericalFailureError: If the root is not bracketed or bisection fails
    """
    count = tm_mode_count(slab, laser)
    if mode_index < 0 or mode_index >= count:
        raise NoSuchModeError(
            f"TM{mode_index} is not guided at d={slab.thickness:g} A, n={slab.refractive_index:g} "
            f"({count} guided mode{'s' if count != 1 else ''})"
        )

    lower, upper = solver_bracket(slab)
    f_lower = _phase_mismatch(lower, slab, laser, mode_index)
    f_upper = _phase_mismatch(upper, slab, laser, mode_index)
    if not (f_lower < 0 < f_upper):
        raise NumericalFailureError(
            f"TM{mode_index} root not bracketed in ({lower:.3g}, {upper:.6g}) rad: "
            f"residuals {f_lower:.3g}, {f_upper:.3g}"
        )

    try:
        alpha, result = optimize.bisect(
            _phase_mismatch, lower, upper,
            args=(slab, laser, mode_index),
            xtol=SOLVER_XTOL, rtol=SOLVER_RTOL, maxiter=SOLVER_MAXITER,
            full_output=True, disp=False
        )
    except (ValueError, RuntimeError) as e:
        raise NumericalFailureError(f"TM{mode_index} bisection failed: {e}") from e

    if not result.converged:
        raise NumericalFailureError(
            f"TM{mode_index} bisection did not converge after {result.iterations} iterations"
        )

    kappa, gamma = _wavenumbers(alpha, slab, laser)
    residual = _phase_mismatch(alpha, slab, laser, mode_index)
    logger.debug(
        f"TM{mode_index}: alpha={math.degrees(alpha):.6f} deg after {result.iterations} "
        f"iterations, residual={residual:.3g}"
    )
    return ModeSolution(
        mode_index=mode_index,
        alpha=alpha,
        kappa=kappa,
        gamma=gamma,
        residual=residual,
        refractive_index=slab.refractive_index,
    )


def guided_modes(slab: Slab, laser: LaserField) -> List[ModeSolution]:
    """Solve every guided TM mode of the slab, TM0 first."""
    return [solve_tm_mode(slab, laser, m) for m in range(tm_mode_count(slab, laser))]
