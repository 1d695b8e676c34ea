"""Command-line front end for Beatlength.

Subcommands: predict, scan, report, pattern, modes, constants.
"""

import argparse
import logging
import math
import re
import sys
from dataclasses import dataclass, replace
from typing import Any, Dict, List, Optional, Sequence

import numpy as np
import pandas as pd

from beating import (
    BeatPrediction, beat_base, beat_exact, beat_guided_mode, beat_planewave, beat_tm,
    invert_radiation_angle
)
from common import (
    EXIT_OK, VERSION, BeatlengthError, OutputSizeError, UsageError, configure_logging, exit_code_for,
    format_csv, format_json, load_config_dict, material_table_from_config, write_output
)
from kinematics import (
    LaserField, ElectronBeam, constant_table, electron_from_kinetic, laser_from_wavelength
)
from pattern import PatternParams, envelope_extrema, pattern_grid
from report import RADIATION_ANGLE_NOTE, build_report, experiments_from_config, ExperimentRecord
from waveguide import Slab, guided_modes, solve_tm_mode, tm_cutoff_thickness

# Configure logging
logging.basicConfig(
    level=logging.INFO,
    format='%(asctime)s - %(name)s - %(levelname)s - %(message)s'
)
logger = logging.getLogger(__name__)

SIMPLE_VARIANTS = ('base', 'planewave', 'exact', 'radiation')
SCAN_AXES = ('kinetic_energy', 'refractive_index', 'thickness')
TM_VARIANT = re.compile(r'^tm(\d+)$')


@dataclass(frozen=True)
class Variant:
    """A model variant requested on the command line."""
    name: str
    mode_index: Optional[int] = None

    @property
    def label(self) -> str:
        return f"tm{self.mode_index}" if self.name == 'tm' else self.name


def parse_variant(token: str) -> Variant:
    """Parse 'base', 'planewave', 'exact', 'radiation' or 'tm<m>'.

    Raises:
        UsageError: For any other token
    """
    token = token.strip().lower()
    if token in SIMPLE_VARIANTS:
        return Variant(token)
    match = TM_VARIANT.match(token)
    if match:
        return Variant('tm', int(match.group(1)))
    raise UsageError(
        f"Unknown model variant '{token}'. Use one of: {', '.join(SIMPLE_VARIANTS)}, tm<m>"
    )


def _is_variant(token: str) -> bool:
    return token.lower() in SIMPLE_VARIANTS or bool(TM_VARIANT.match(token.lower()))


# ============================================================================
# Parameter resolution (flag > config > built-in default)
# ============================================================================

@dataclass
class Context:
    """Resolved inputs shared by every subcommand."""
    config: dict
    beam: ElectronBeam
    laser: LaserField
    material: Optional[str]
    refractive_index: Optional[float]
    thickness: float
    output_format: str
    precision: str


def _pick(flag_value, default):
    return default if flag_value is None else flag_value


def resolve_context(args: argparse.Namespace, material: Optional[str] = None) -> Context:
    """Merge command-line flags over the loaded configuration."""
    config = load_config_dict(args.config)
    configure_logging(config, args.log_level)
    defaults = config['defaults']
    materials = material_table_from_config(config)

    kinetic_kev = _pick(args.kinetic_energy_kev, defaults['kinetic_energy_kev'])
    wavelength = _pick(args.wavelength_angstrom, defaults['wavelength_angstrom'])
    thickness = _pick(args.thickness_angstrom, defaults['thickness_angstrom'])

    material = material or args.material
    refractive_index = args.n
    if material and material not in materials.entries:
        raise UsageError(f"Unknown material '{material}'. Known: {', '.join(materials.labels())}")
    if refractive_index is None:
        if material:
            refractive_index = materials.index_of(material)
        elif materials.has_index(defaults.get('material') or ''):
            material = defaults['material']
            refractive_index = materials.index_of(material)

    return Context(
        config=config,
        beam=electron_from_kinetic(kinetic_kev * 1000.0),
        laser=laser_from_wavelength(wavelength),
        material=material,
        refractive_index=refractive_index,
        thickness=thickness,
        output_format=_pick(args.format, config['output']['format']),
        precision=_pick(args.precision, config['output']['precision']),
    )


def _require_index(ctx: Context) -> float:
    if ctx.refractive_index is None:
        raise UsageError("A refractive index is required: give a material or --n")
    return ctx.refractive_index


def predict_variant(ctx: Context, variant: Variant, alpha_deg: Optional[float] = None,
                    target_cm: Optional[float] = None) -> BeatPrediction:
    """Dispatch one prediction for the resolved context."""
    beam, laser = ctx.beam, ctx.laser
    if variant.name == 'base':
        return beat_base(beam, laser)
    if variant.name == 'planewave':
        return beat_planewave(beam, laser, _require_index(ctx))
    if variant.name == 'exact':
        n = _require_index(ctx)
        alpha = math.radians(alpha_deg) if alpha_deg is not None else 0.0
        return beat_exact(beam, laser, n * laser.vacuum_wavenumber * math.cos(alpha))
    if variant.name == 'radiation':
        if target_cm is None:
            raise UsageError("The radiation variant needs --target-cm")
        logger.warning(RADIATION_ANGLE_NOTE)
        return invert_radiation_angle(beam, laser, _require_index(ctx), target_cm).prediction
    # tm<m>
    n = _require_index(ctx)
    if alpha_deg is not None:
        return beat_tm(beam, laser, n, math.radians(alpha_deg))
    slab = Slab(ctx.thickness, n, ctx.material or "")
    return beat_guided_mode(beam, laser, slab, variant.mode_index)


def _emit_table(frame: pd.DataFrame, ctx: Context, args: argparse.Namespace) -> None:
    if ctx.output_format == 'json':
        text = format_json(frame.to_dict(orient='records'), ctx.precision)
    else:
        text = format_csv(frame, ctx.precision)
    write_output(text, args.output)


# ============================================================================
# Subcommands
# ============================================================================

def cmd_predict(args: argparse.Namespace) -> int:
    """Print one beat-wavelength prediction with its input echo."""
    tokens = list(args.target)
    if len(tokens) > 2:
        raise UsageError("predict takes at most MATERIAL and VARIANT")
    material, variant_token = None, args.variant
    for token in tokens:
        if _is_variant(token):
            variant_token = token
        else:
            material = token
    variant = parse_variant(variant_token or 'planewave')

    ctx = resolve_context(args, material)
    prediction = predict_variant(ctx, variant, args.alpha_deg, args.target_cm)
    record = {'material': ctx.material or ''}
    record.update(prediction.to_record())
    logger.info(f"{variant.label}: lambda_b = {prediction.lambda_b:.4g} cm")
    _emit_table(pd.DataFrame([record]), ctx, args)
    return EXIT_OK


def scan_grid(start: float, stop: float, steps: int) -> np.ndarray:
    """Inclusive uniform grid for a scan.

    Raises:
        UsageError: If the range is not positive and increasing or steps < 2
    """
    if steps < 2:
        raise UsageError(f"A scan needs at least 2 steps, got {steps}")
    if not (math.isfinite(start) and math.isfinite(stop) and 0 < start < stop):
        raise UsageError(f"Scan range must satisfy 0 < start < stop, got [{start}, {stop}]")
    return np.linspace(start, stop, steps)


def run_scan(ctx: Context, axis: str, values: Sequence[float], variant: Variant,
             alpha_deg: Optional[float] = None) -> pd.DataFrame:
    """Evaluate a variant along one axis; rows follow the grid order."""
    if axis not in SCAN_AXES:
        raise UsageError(f"Unknown scan axis '{axis}'. Use one of: {', '.join(SCAN_AXES)}")

    column = {'kinetic_energy': 'kinetic_energy_kev',
              'refractive_index': 'refractive_index',
              'thickness': 'thickness_angstrom'}[axis]
    rows: List[Dict[str, Any]] = []
    for value in values:
        point = replace(ctx)
        if axis == 'kinetic_energy':
            point.beam = electron_from_kinetic(float(value) * 1000.0)
        elif axis == 'refractive_index':
            point.refractive_index = float(value)
        else:
            point.thickness = float(value)
        prediction = predict_variant(point, variant, alpha_deg)
        row = {column: float(value), 'variant': variant.label, 'lambda_b_cm': prediction.lambda_b}
        if 'alpha_deg' in prediction.inputs:
            row['alpha_deg'] = prediction.inputs['alpha_deg']
        rows.append(row)
    return pd.DataFrame(rows)


def cmd_scan(args: argparse.Namespace) -> int:
    """Tabulate lambda_b along kinetic energy, refractive index or thickness."""
    variant = parse_variant(args.variant or 'planewave')
    values = scan_grid(args.start, args.stop, args.steps)
    ctx = resolve_context(args)
    frame = run_scan(ctx, args.axis, values, variant, args.alpha_deg)
    logger.info(f"Scanned {args.axis} over {len(frame)} points ({variant.label})")
    _emit_table(frame, ctx, args)
    return EXIT_OK


def cmd_report(args: argparse.Namespace) -> int:
    """Compare predictions with the published beat wavelengths."""
    ctx = resolve_context(args)
    if args.experiment:
        experiments = [ExperimentRecord(value, None, 'command-line') for value in args.experiment]
    else:
        experiments = experiments_from_config(ctx.config)

    report = build_report(
        experiments,
        material_table_from_config(ctx.config),
        ctx.beam, ctx.laser, ctx.thickness,
        gap_threshold=ctx.config['report']['gap_threshold'],
    )
    if ctx.output_format == 'json':
        write_output(format_json(report.to_document(), ctx.precision), args.output)
    else:
        write_output(format_csv(report.to_frame(), ctx.precision), args.output)
    return EXIT_OK


def pattern_params(ctx: Context, args: argparse.Namespace) -> PatternParams:
    """Pattern inputs with the light wavenumber of the requested variant."""
    defaults = ctx.config['defaults']
    variant = parse_variant(args.variant or 'tm0')
    n = _require_index(ctx)
    k0 = ctx.laser.vacuum_wavenumber
    if variant.name == 'tm':
        mode = solve_tm_mode(Slab(ctx.thickness, n, ctx.material or ""), ctx.laser,
                             variant.mode_index)
        x_wavenumber = n * k0 * math.cos(mode.alpha)
    elif variant.name == 'planewave':
        x_wavenumber = n * k0
    else:
        raise UsageError("pattern supports the planewave and tm<m> variants")

    return PatternParams(
        beam=ctx.beam,
        laser=ctx.laser,
        x_wavenumber=x_wavenumber,
        beta_mod=_pick(args.beta_mod, defaults['modulation_depth']),
        d=ctx.thickness,
        d0=_pick(args.d0_angstrom, defaults['optimum_thickness_angstrom']),
        phase_convention=_pick(args.phase_convention, defaults['phase_convention']),
    )


def _axis(start: float, stop: float, steps: int, name: str) -> np.ndarray:
    if steps < 1:
        raise UsageError(f"{name} grid needs at least 1 point")
    if steps == 1:
        return np.array([start], dtype=float)
    return np.linspace(start, stop, steps)


def cmd_pattern(args: argparse.Namespace) -> int:
    """Tabulate rho/rho0 on an (x, z, t) grid, or the envelope maxima."""
    ctx = resolve_context(args)
    params = pattern_params(ctx, args)

    if args.extrema:
        maxima = envelope_extrema(params, args.z_stop)
        frame = pd.DataFrame([{'z': m.z, 'amplitude': m.amplitude} for m in maxima],
                             columns=['z', 'amplitude'])
    else:
        max_rows = ctx.config['output']['max_rows']
        rows = args.x_steps * args.z_steps * args.t_steps
        if rows > max_rows:
            raise OutputSizeError(f"Pattern grid has {rows} rows, limit is {max_rows}")
        frame = pattern_grid(
            params,
            _axis(args.x_start, args.x_stop, args.x_steps, 'x'),
            _axis(args.z_start, args.z_stop, args.z_steps, 'z'),
            _axis(args.t_start, args.t_stop, args.t_steps, 't'),
            max_rows=max_rows,
        )
    _emit_table(frame, ctx, args)
    return EXIT_OK


def cmd_modes(args: argparse.Namespace) -> int:
    """List the guided TM modes of the slab."""
    ctx = resolve_context(args)
    n = _require_index(ctx)
    slab = Slab(ctx.thickness, n, ctx.material or "")
    rows = []
    for mode in guided_modes(slab, ctx.laser):
        rows.append({
            'mode_index': mode.mode_index,
            'cutoff_thickness_angstrom': tm_cutoff_thickness(ctx.laser, n, mode.mode_index),
            'alpha_deg': mode.alpha_degrees,
            'effective_index': mode.effective_index,
            'kappa_per_angstrom': mode.kappa,
            'gamma_per_angstrom': mode.gamma,
            'lambda_b_cm': beat_tm(ctx.beam, ctx.laser, n, mode.alpha).lambda_b,
        })
    _emit_table(pd.DataFrame(rows), ctx, args)
    return EXIT_OK


def cmd_constants(args: argparse.Namespace) -> int:
    """Dump the physical constant table as JSON."""
    write_output(format_json(constant_table(), 'full'), args.output)
    return EXIT_OK


# ============================================================================
# Parser
# ============================================================================

def _common_flags() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument('--config', help="YAML configuration file (or $BEATLENGTH_CONFIG)")
    common.add_argument('--material', help="Material label from the configuration")
    common.add_argument('--n', type=float, help="Refractive index (overrides the material)")
    common.add_argument('--kinetic-energy-kev', type=float, help="Electron kinetic energy in keV")
    common.add_argument('--wavelength-angstrom', type=float, help="Laser vacuum wavelength in A")
    common.add_argument('--thickness-angstrom', type=float, help="Slab thickness in A")
    common.add_argument('--variant', help="base, planewave, exact, radiation or tm<m>")
    common.add_argument('--phase-convention', choices=['sine_theory', 'cosine_experiment'])
    common.add_argument('--output', help="Write to this file instead of stdout")
    common.add_argument('--format', choices=['csv', 'json'])
    common.add_argument('--precision', choices=['full', 'default'])
    common.add_argument('--log-level', help="DEBUG, INFO, WARNING or ERROR")
    return common


def build_parser() -> argparse.ArgumentParser:
    common = _common_flags()
    parser = argparse.ArgumentParser(
        prog='beatlength',
        description="Beat-wavelength predictions for electrons crossing a laser-lit film"
    )
    parser.add_argument('--version', action='version', version=f"beatlength {VERSION}")
    sub = parser.add_subparsers(dest='command', required=True)

    predict = sub.add_parser('predict', parents=[common], help="One prediction")
    predict.add_argument('target', nargs='*', metavar='MATERIAL|VARIANT')
    predict.add_argument('--alpha-deg', type=float, help="Internal angle for tm/exact variants")
    predict.add_argument('--target-cm', type=float, help="Target lambda_b for the radiation variant")
    predict.set_defaults(handler=cmd_predict)

    scan = sub.add_parser('scan', parents=[common], help="Parameter scan as CSV")
    scan.add_argument('axis', choices=SCAN_AXES)
    scan.add_argument('start', type=float)
    scan.add_argument('stop', type=float)
    scan.add_argument('--steps', type=int, default=11)
    scan.add_argument('--alpha-deg', type=float)
    scan.set_defaults(handler=cmd_scan)

    report = sub.add_parser('report', parents=[common], help="Theory vs experiment")
    report.add_argument('--experiment', type=float, action='append',
                        help="Observed lambda_b in cm (repeatable; replaces the defaults)")
    report.set_defaults(handler=cmd_report)

    pattern = sub.add_parser('pattern', parents=[common], help="Density pattern grid")
    pattern.add_argument('--beta-mod', type=float)
    pattern.add_argument('--d0-angstrom', type=float)
    pattern.add_argument('--x-start', type=float, default=0.0)
    pattern.add_argument('--x-stop', type=float, default=0.0)
    pattern.add_argument('--x-steps', type=int, default=1)
    pattern.add_argument('--z-start', type=float, default=0.0)
    pattern.add_argument('--z-stop', type=float, default=3.0)
    pattern.add_argument('--z-steps', type=int, default=1001)
    pattern.add_argument('--t-start', type=float, default=0.0)
    pattern.add_argument('--t-stop', type=float, default=0.0)
    pattern.add_argument('--t-steps', type=int, default=1)
    pattern.add_argument('--extrema', action='store_true',
                         help="Emit envelope maxima in [0, z-stop] instead of the grid")
    pattern.set_defaults(handler=cmd_pattern)

    modes = sub.add_parser('modes', parents=[common], help="Guided TM modes")
    modes.set_defaults(handler=cmd_modes)

    constants = sub.add_parser('constants', parents=[common], help="Constant table as JSON")
    constants.set_defaults(handler=cmd_constants)
    return parser


def main(argv: Optional[Sequence[str]] = None) -> int:
    """Entry point; returns the process exit code."""
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.handler(args)
    except BeatlengthError as e:
        logger.error(str(e))
        return exit_code_for(e)


if __name__ == "__main__":
    sys.exit(main())
