"""Tests for kinematics.py - electron, photon and sideband states."""
import math
import os
import sys
from dataclasses import replace

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from scipy import constants

sys.path.insert(0, os.path.join(os.path.dirname(os.path.dirname(os.path.abspath(__file__))), 'src'))

from common import DomainError, EvanescentSidebandError
from kinematics import (
    ELECTRON_REST_ENERGY_EV, HBAR_C_EV_ANGSTROM, HC_EV_ANGSTROM,
    SPEED_OF_LIGHT_ANGSTROM_PER_S, constant_table, electron_from_kinetic,
    laser_from_wavelength, sidebands
)


@pytest.fixture
def beam():
    return electron_from_kinetic(50_000.0)


@pytest.fixture
def laser():
    return laser_from_wavelength(4880.0)


class TestConstants:
    """Cross-check the constant table against scipy.constants."""

    def test_rest_energy(self):
        """Test the electron rest energy against CODATA."""
        mev = constants.physical_constants['electron mass energy equivalent in MeV'][0]
        assert ELECTRON_REST_ENERGY_EV == pytest.approx(mev * 1e6, rel=1e-8)

    def test_hc(self):
        """Test hc against CODATA."""
        hc = constants.h * constants.c / constants.e * 1e10
        assert HC_EV_ANGSTROM == pytest.approx(hc, rel=1e-7)

    def test_speed_of_light(self):
        """Test the speed of light in angstrom per second."""
        assert SPEED_OF_LIGHT_ANGSTROM_PER_S == constants.c * 1e10

    def test_hbar_c(self):
        """Test hbar c."""
        assert HBAR_C_EV_ANGSTROM * 2 * math.pi == pytest.approx(HC_EV_ANGSTROM, rel=1e-15)

    def test_table_has_sources(self):
        """Test every constant names its source."""
        table = constant_table()
        for entry in table.values():
            assert {'symbol', 'value', 'unit', 'source'} <= set(entry)

    def test_table_is_a_copy(self):
        """Test edits to a returned table do not leak into the next call."""
        table = constant_table()
        table['hc']['value'] = 0.0
        assert constant_table()['hc']['value'] == HC_EV_ANGSTROM


class TestElectronFromKinetic:
    """Tests for the electron state."""

    def test_fifty_kev(self, beam):
        """Test the 50 keV electron."""
        assert beam.beta == pytest.approx(0.41269, abs=1e-5)
        assert beam.total_energy == pytest.approx(560998.95)
        assert beam.gamma == pytest.approx(1.0978476, rel=1e-6)

    def test_mass_shell(self, beam):
        """Test the electron sits on the mass shell."""
        assert beam.mass_shell_residual() <= 1e-12

    @pytest.mark.parametrize("bad", [0.0, -1.0, float('nan'), float('inf')])
    def test_rejects_non_positive(self, bad):
        """Test non-positive and non-finite energies are refused."""
        with pytest.raises(DomainError):
            electron_from_kinetic(bad)

    def test_numpy_scalars_accepted(self):
        """Test numpy integer and float inputs are treated like Python numbers."""
        state = electron_from_kinetic(np.int64(50000))
        assert state.beta == pytest.approx(0.41269, abs=1e-5)
        assert type(state.kinetic_energy) is float
        assert electron_from_kinetic(np.float32(50000.0)).beta == pytest.approx(0.41269, abs=1e-5)

    @pytest.mark.parametrize("bad", [True, "50000", None])
    def test_rejects_non_numbers(self, bad):
        """Test inputs that are not real numbers are refused."""
        with pytest.raises(DomainError):
            electron_from_kinetic(bad)

    @given(st.floats(min_value=1.0, max_value=1e7, allow_nan=False, allow_infinity=False))
    @settings(max_examples=200)
    def test_mass_shell_property(self, kinetic):
        """Test the mass shell holds across energies."""
        state = electron_from_kinetic(kinetic)
        assert state.mass_shell_residual() <= 1e-12
        assert 0 < state.beta < 1


class TestLaserFromWavelength:
    """Tests for the laser state."""

    def test_argon_line(self, laser):
        """Test the 4880 A argon line."""
        assert laser.photon_energy == pytest.approx(2.540660, rel=1e-6)
        assert laser.vacuum_wavenumber * laser.vacuum_wavelength == pytest.approx(2 * math.pi)
        assert laser.angular_frequency == pytest.approx(3.8599e15, rel=1e-4)

    def test_energy_ratio(self, beam, laser):
        """Test the electron to photon energy ratio."""
        assert beam.total_energy / laser.photon_energy == pytest.approx(220808, rel=1e-5)

    def test_rejects_zero(self):
        """Test a zero wavelength is refused."""
        with pytest.raises(DomainError):
            laser_from_wavelength(0.0)

    def test_numpy_wavelength(self):
        """Test a numpy integer wavelength builds the same field."""
        assert laser_from_wavelength(np.int64(4880)) == laser_from_wavelength(4880.0)


class TestSidebands:
    """Tests for the n = -1, 0, +1 sidebands."""

    def test_orders_and_energies(self, beam, laser):
        """Test sideband orders and energies."""
        bands = sidebands(beam, laser, 0.0)
        assert [m.order for m in bands.members] == [-1, 0, 1]
        assert bands[1].energy - bands[0].energy == pytest.approx(laser.photon_energy)
        assert bands[0].pz_c == beam.momentum_c

    def test_mass_shell(self, beam, laser):
        """Test every sideband sits on the mass shell."""
        bands = sidebands(beam, laser, 1.559 * laser.vacuum_wavenumber)
        assert bands.max_mass_shell_residual() <= 1e-12

    def test_unknown_order(self, beam, laser):
        """Test asking for a missing order."""
        with pytest.raises(KeyError):
            sidebands(beam, laser, 0.0)[2]

    def test_x_momentum_is_shared(self, beam, laser):
        """Test the sidebands share the photon x-momentum."""
        k = 1.43 * laser.vacuum_wavenumber
        bands = sidebands(beam, laser, k)
        assert bands[1].px_c == pytest.approx(HBAR_C_EV_ANGSTROM * k)
        assert bands[-1].px_c == pytest.approx(-HBAR_C_EV_ANGSTROM * k)

    def test_deficit_matches_direct_difference(self, beam, laser):
        """Test the stable deficit against the direct difference."""
        bands = sidebands(beam, laser, 1.559 * laser.vacuum_wavenumber)
        direct = 2 * bands[0].pz_c - bands[1].pz_c - bands[-1].pz_c
        assert bands.stationary_deficit_c == pytest.approx(direct, rel=1e-4)
        splitting = bands[1].pz_c - bands[-1].pz_c
        assert bands.optical_splitting_c == pytest.approx(splitting, rel=1e-9)

    def test_deficit_grows_with_light_momentum(self, beam, laser):
        """Test the deficit grows with k."""
        k0 = laser.vacuum_wavenumber
        deficits = [sidebands(beam, laser, f * k0).stationary_deficit_c for f in (0.0, 1.0, 1.5)]
        assert 0 < deficits[0] < deficits[1] < deficits[2]

    def test_degenerate_without_photon_energy(self, beam, laser):
        """Test zero photon energy gives no deficit."""
        dark = replace(laser, photon_energy=0.0)
        bands = sidebands(beam, dark, 0.0)
        assert bands.stationary_deficit_c == 0.0
        assert bands.optical_splitting_c == 0.0

    def test_negative_wavenumber(self, beam, laser):
        """Test a negative x-wavenumber is refused."""
        with pytest.raises(DomainError):
            sidebands(beam, laser, -1e-3)

    def test_evanescent(self, beam, laser):
        """Test a huge k makes a sideband evanescent."""
        with pytest.raises(EvanescentSidebandError) as exc_info:
            sidebands(beam, laser, 1000.0)
        assert "evanescent" in str(exc_info.value)


class TestLimits:
    """Limiting and ordering behaviour."""

    def test_momentum_at_fifty_kev(self, beam):
        """Test the 50 keV momentum."""
        assert beam.momentum_c == pytest.approx(231_517, abs=1)

    def test_slow_electron(self):
        """Test a slow electron stays accurate."""
        state = electron_from_kinetic(1e-6)
        assert state.beta < 1e-5
        assert state.total_energy == pytest.approx(ELECTRON_REST_ENERGY_EV, rel=1e-12)

    def test_beta_increasing(self):
        """Test beta grows with energy."""
        betas = [electron_from_kinetic(t).beta for t in (1e2, 1e3, 1e4, 1e5, 1e6, 1e7)]
        assert betas == sorted(betas)
        assert betas[-1] < 1

    def test_doubling_wavelength_halves_photon_energy(self, laser):
        """Test photon energy scales as 1/lambda."""
        assert laser_from_wavelength(9760.0).photon_energy == pytest.approx(
            laser.photon_energy / 2, rel=1e-15)

    def test_sideband_ordering(self, beam, laser):
        """Test sideband momenta are ordered by energy."""
        bands = sidebands(beam, laser, 1.559 * laser.vacuum_wavenumber)
        assert bands[1].pz_c > bands[0].pz_c > bands[-1].pz_c
