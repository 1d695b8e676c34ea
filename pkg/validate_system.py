#!/usr/bin/env python3
"""Installation check for Beatlength: imports, configuration and headline numbers."""

import sys
import os
import math
from pathlib import Path

# Add src to path
sys.path.insert(0, str(Path(__file__).parent / 'src'))


def test_imports():
    """Test that all modules can be imported."""
    print("Testing imports...")
    errors = []

    modules = [
        'common',
        'kinematics',
        'waveguide',
        'beating',
        'pattern',
        'report',
        'cli'
    ]

    for module in modules:
        try:
            __import__(module)
            print(f"  ✓ {module}")
        except Exception as e:
            print(f"  ✗ {module}: {e}")
            errors.append(f"{module}: {e}")

    return errors


def test_config():
    """Test configuration loading and validation."""
    print("\nTesting configuration...")
    errors = []

    try:
        from common import load_config
        materials, defaults = load_config()
        print(f"  ✓ Config loaded successfully")

        for label in materials.labels():
            if materials.has_index(label):
                print(f"  ✓ {label}: n = {materials.index_of(label)}")
            else:
                print(f"  ⚠ {label}: no refractive index on record")
                print(f"    (Reports will list it as unavailable)")

        print(f"  ✓ Beam: {defaults['kinetic_energy_kev']} keV, "
              f"laser: {defaults['wavelength_angstrom']} A")

    except Exception as e:
        errors.append(f"Config test failed: {e}")
        print(f"  ✗ Config test failed: {e}")

    return errors


def test_directories():
    """Test directory structure."""
    print("\nTesting directory structure...")
    errors = []

    for dir_name in ['src', 'bin', 'config', 'tests']:
        if Path(dir_name).exists():
            print(f"  ✓ {dir_name}/ exists")
        else:
            errors.append(f"Missing directory: {dir_name}/")
            print(f"  ✗ {dir_name}/ missing")

    return errors


def test_scripts():
    """Test that shell scripts exist and are executable."""
    print("\nTesting shell scripts...")
    errors = []

    for script in ['bin/run_discrepancy_report.sh']:
        script_path = Path(script)
        if script_path.exists():
            if os.access(script_path, os.X_OK):
                print(f"  ✓ {script} (executable)")
            else:
                print(f"  ⚠ {script} (not executable)")
                print(f"    Run: chmod +x {script}")
        else:
            errors.append(f"Missing script: {script}")
            print(f"  ✗ {script} missing")

    return errors


def _check(label, value, expected, tolerance, errors):
    if math.isclose(value, expected, abs_tol=tolerance):
        print(f"  ✓ {label} = {value:.6g}")
    else:
        errors.append(f"{label} = {value:.6g}, expected {expected} +/- {tolerance}")
        print(f"  ✗ {label} = {value:.6g} (expected {expected})")


def test_reference_values():
    """Test the 50 keV / 4880 A reference numbers."""
    print("\nTesting reference values...")
    errors = []

    try:
        from beating import beat_base, beat_planewave, beat_tm, invert_radiation_angle
        from kinematics import electron_from_kinetic, laser_from_wavelength
        from waveguide import Slab, solve_tm_mode, tm_cutoff_thickness

        beam = electron_from_kinetic(50_000.0)
        laser = laser_from_wavelength(4880.0)
        mode = solve_tm_mode(Slab(1000.0, 1.559), laser, 0)

        _check("beta", beam.beta, 0.41269, 1e-5, errors)
        _check("lambda_b0 [cm]", beat_base(beam, laser).lambda_b, 1.5147, 1e-4, errors)
        _check("plane wave, n=1.559 [cm]",
               beat_planewave(beam, laser, 1.559).lambda_b, 1.218, 1e-3, errors)
        _check("TM1 cutoff, n=1.559 [A]", tm_cutoff_thickness(laser, 1.559, 1), 2040.1, 0.1, errors)
        _check("TM0 alpha [deg]", mode.alpha_degrees, 46.13, 0.02, errors)
        _check("TM0 lambda_b [cm]", beat_tm(beam, laser, 1.559, mode.alpha).lambda_b,
               1.4727, 5e-4, errors)
        _check("radiation theta for 1.70 cm [deg]",
               invert_radiation_angle(beam, laser, 1.559, 1.70).theta_external_degrees,
               53.12, 0.05, errors)

    except Exception as e:
        errors.append(f"Reference value test failed: {e}")
        print(f"  ✗ Test failed: {e}")

    return errors


def main():
    """Run all validation tests."""
    print("=" * 60)
    print("Beatlength System Validation")
    print("=" * 60)
    print()

    all_errors = []

    all_errors.extend(test_imports())
    all_errors.extend(test_config())
    all_errors.extend(test_directories())
    all_errors.extend(test_scripts())
    all_errors.extend(test_reference_values())

    # Summary
    print()
    print("=" * 60)
    print("Validation Summary")
    print("=" * 60)

    if not all_errors:
        print()
        print("✅ ALL TESTS PASSED!")
        print()
        print("Next steps:")
        print("  1. Run the report: ./bin/run_discrepancy_report.sh")
        print("  2. Try a prediction: PYTHONPATH=src python src/cli.py predict SiO2 tm0")
        print()
        return 0
    else:
        print()
        print(f"❌ {len(all_errors)} ISSUE(S) FOUND:")
        print()
        for i, error in enumerate(all_errors, 1):
            print(f"  {i}. {error}")
        print()
        print("Please fix these issues before using Beatlength.")
        print()
        return 1


if __name__ == "__main__":
    sys.exit(main())
