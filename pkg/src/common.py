"""Common utilities for Beatlength: errors, configuration, logging and output."""

import copy
import io
import json
import logging
import math
import os
import sys
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Dict, Mapping, Optional, Tuple

import numpy as np
import pandas as pd
import yaml

VERSION = "0.1.0"

CONFIG_ENV_VAR = "BEATLENGTH_CONFIG"
LOG_FORMAT = '%(asctime)s - %(name)s - %(levelname)s - %(message)s'

# Configure logging
logging.basicConfig(
    level=logging.INFO,
    format=LOG_FORMAT
)
logger = logging.getLogger(__name__)


# ============================================================================
# Errors
# ============================================================================

class BeatlengthError(Exception):
    """Base class for every error raised by the toolkit."""


class DomainError(BeatlengthError, ValueError):
    """Input outside the physical domain of an operation."""


class EvanescentSidebandError(DomainError):
    """A sideband has no real forward momentum (outside the propagating regime)."""


class NoSuchModeError(DomainError):
    """Requested TM mode is not guided at this thickness."""


class NotARadiationModeError(DomainError):
    """Target beat wavelength does not exceed the base value."""


class UnreachableTargetError(DomainError):
    """Target beat wavelength cannot be produced by any incidence angle."""


class ConfigError(BeatlengthError, ValueError):
    """Configuration document could not be parsed or validated."""


class UsageError(BeatlengthError):
    """Command-line arguments are inconsistent."""


class OutputSizeError(UsageError):
    """Requested output grid is too large."""


class NumericalFailureError(BeatlengthError, RuntimeError):
    """A numerical search did not bracket or did not converge."""


EXIT_OK = 0
EXIT_USAGE = 2
EXIT_DOMAIN = 3
EXIT_NUMERICAL = 4


def exit_code_for(error: BaseException) -> int:
    """Map an exception to the CLI exit code."""
    if isinstance(error, UsageError):
        return EXIT_USAGE
    if isinstance(error, NumericalFailureError):
        return EXIT_NUMERICAL
    if isinstance(error, (DomainError, ConfigError)):
        return EXIT_DOMAIN
    return 1


# ============================================================================
# Configuration
# ============================================================================

DEFAULT_CONFIG: Dict[str, Any] = {
    'materials': {
        'SrF2': {'refractive_index': 1.43},
        'SiO2': {'refractive_index': 1.559},
        'Al2O3': {'refractive_index': None},
    },
    'defaults': {
        'material': 'SiO2',
        'kinetic_energy_kev': 50.0,
        'wavelength_angstrom': 4880.0,
        'thickness_angstrom': 1000.0,
        'modulation_depth': 0.35,
        'optimum_thickness_angstrom': 1007.0,
        'phase_convention': 'sine_theory',
    },
    'experiments': [
        {'lambda_b_cm': 1.70, 'uncertainty_cm': None, 'source': 'observation-a'},
        {'lambda_b_cm': 1.75, 'uncertainty_cm': None, 'source': 'observation-b'},
        {'lambda_b_cm': 1.73, 'uncertainty_cm': 0.01, 'source': 'observation-c'},
    ],
    'report': {
        'gap_threshold': 0.10,
    },
    'output': {
        'format': 'csv',
        'precision': 'default',
        'max_rows': 10_000_000,
    },
    'logging': {
        'level': 'INFO',
        'format': LOG_FORMAT,
    },
}


@dataclass(frozen=True)
class MaterialTable:
    """Refractive indices at the laser wavelength, keyed by material label.

    A label mapped to None is a known material whose index was never
    supplied; it stays listed so reports can say so.
    """
    entries: Mapping[str, Optional[float]] = field(default_factory=dict)

    def __post_init__(self):
        for label, index in self.entries.items():
            if index is not None and not index > 1:
                raise ConfigError(
                    f"materials.{label}.refractive_index must be > 1, got {index}"
                )

    def labels(self):
        return list(self.entries)

    def has_index(self, label: str) -> bool:
        return self.entries.get(label) is not None

    def index_of(self, label: str) -> float:
        """Refractive index of a material.

        Raises:
            UsageError: If the label is unknown
            DomainError: If the material has no index on record
        """
        if label not in self.entries:
            raise UsageError(
                f"Unknown material '{label}'. Known: {', '.join(self.entries)}"
            )
        index = self.entries[label]
        if index is None:
            raise DomainError(
                f"Refractive index of {label} is unavailable; supply it with --n"
            )
        return index


def deep_merge(base: dict, override: dict) -> dict:
    """Deep merge two dictionaries.

    Args:
        base: Base dictionary (defaults or system config)
        override: Override dictionary (user config)

    Returns:
        Merged dictionary where override values take precedence
    """
    result = base.copy()

    for key, value in override.items():
        if key in result and isinstance(result[key], dict) and isinstance(value, dict):
            result[key] = deep_merge(result[key], value)
        else:
            result[key] = value

    return result


def ensure_absolute_path(path: str, reference_file: str = None) -> str:
    """Convert relative path to absolute path.

    Args:
        path: Path to convert (may be relative or absolute)
        reference_file: Reference file for relative path resolution
                       (defaults to project root, 2 levels up from this file)

    Returns:
        Absolute path as string
    """
    path_obj = Path(path)
    if path_obj.is_absolute():
        return str(path_obj)

    if reference_file is None:
        project_root = Path(__file__).parent.parent
    else:
        project_root = Path(reference_file).parent

    return str(project_root / path_obj)


def read_yaml_document(path: Path) -> dict:
    """Parse one YAML configuration file.

    Raises:
        ConfigError: On syntax errors (with line/column) or a non-mapping document
    """
    try:
        with open(path, 'r') as f:
            document = yaml.safe_load(f)
    except yaml.YAMLError as e:
        mark = getattr(e, 'problem_mark', None)
        where = f" at line {mark.line + 1}, column {mark.column + 1}" if mark else ""
        problem = getattr(e, 'problem', None) or str(e)
        raise ConfigError(f"Invalid YAML syntax in {path}{where}: {problem}") from e

    if document is None:
        return {}
    if not isinstance(document, dict):
        raise ConfigError(f"Configuration in {path} must be a mapping")
    return document


def _positive_number(section: dict, key: str, prefix: str) -> None:
    value = section.get(key)
    if not isinstance(value, (int, float)) or isinstance(value, bool) \
            or not math.isfinite(value) or value <= 0:
        raise ConfigError(f"{prefix}.{key} must be a positive number, got {value!r}")


def validate_config(config: dict) -> dict:
    """Validate a merged configuration dictionary.

    Raises:
        ConfigError: If any section is malformed
    """
    for section in ('materials', 'defaults', 'experiments', 'report', 'output', 'logging'):
        if section not in config:
            raise ConfigError(f"Missing required configuration section: {section}")

    materials = config['materials']
    if not isinstance(materials, dict):
        raise ConfigError("'materials' section must be a mapping")
    for label, entry in materials.items():
        if entry is None:
            entry = {}
        if not isinstance(entry, dict):
            raise ConfigError(f"materials.{label} must be a mapping")
        index = entry.get('refractive_index')
        if index is not None:
            if not isinstance(index, (int, float)) or isinstance(index, bool):
                raise ConfigError(f"materials.{label}.refractive_index must be a number")
            if index <= 1:
                raise ConfigError(
                    f"materials.{label}.refractive_index must be > 1, got {index}"
                )

    defaults = config['defaults']
    if not isinstance(defaults, dict):
        raise ConfigError("'defaults' section must be a mapping")
    for key in ('kinetic_energy_kev', 'wavelength_angstrom', 'thickness_angstrom',
                'optimum_thickness_angstrom'):
        _positive_number(defaults, key, 'defaults')

    depth = defaults.get('modulation_depth')
    if not isinstance(depth, (int, float)) or not 0 <= depth <= 1:
        raise ConfigError(f"defaults.modulation_depth must be in [0, 1], got {depth!r}")

    if defaults.get('phase_convention') not in ('sine_theory', 'cosine_experiment'):
        raise ConfigError(
            "defaults.phase_convention must be 'sine_theory' or 'cosine_experiment'"
        )

    experiments = config['experiments']
    if not isinstance(experiments, list):
        raise ConfigError("'experiments' section must be a list")
    for i, record in enumerate(experiments):
        if not isinstance(record, dict):
            raise ConfigError(f"experiments[{i}] must be a mapping")
        _positive_number(record, 'lambda_b_cm', f"experiments[{i}]")

    threshold = config['report'].get('gap_threshold')
    if not isinstance(threshold, (int, float)) or threshold < 0:
        raise ConfigError("report.gap_threshold must be a non-negative number")

    output = config['output']
    if output.get('format') not in ('csv', 'json'):
        raise ConfigError("output.format must be 'csv' or 'json'")
    if output.get('precision') not in ('full', 'default'):
        raise ConfigError("output.precision must be 'full' or 'default'")
    max_rows = output.get('max_rows')
    if not isinstance(max_rows, int) or max_rows < 1:
        raise ConfigError("output.max_rows must be a positive integer")

    level = str(config['logging'].get('level', 'INFO')).upper()
    if level not in ('DEBUG', 'INFO', 'WARNING', 'ERROR', 'CRITICAL'):
        raise ConfigError(f"logging.level is not a valid level: {level}")

    return config


def load_config_dict(config_path: Optional[str] = None,
                     user_config_path: str = "config/user_config.yaml",
                     system_config_path: str = "config/system_config.yaml") -> dict:
    """Load and validate configuration, merged over the built-in defaults.

    Resolution order:
    1. An explicit file (argument, else the BEATLENGTH_CONFIG environment variable)
    2. Split mode: system_config.yaml with user_config.yaml overrides
    3. Built-in defaults only

    Args:
        config_path: Path to a single configuration file
        user_config_path: Path to user config file
        system_config_path: Path to system config file

    Returns:
        Validated configuration dictionary

    Raises:
        ConfigError: If a file is unreadable or the configuration is invalid
    """
    config = copy.deepcopy(DEFAULT_CONFIG)
    explicit = config_path or os.environ.get(CONFIG_ENV_VAR)

    if explicit:
        explicit_file = Path(explicit)
        if not explicit_file.exists():
            raise ConfigError(f"Configuration file not found: {explicit}")
        logger.info(f"Loading configuration from {explicit_file}")
        config = deep_merge(config, read_yaml_document(explicit_file))
    else:
        system_file = Path(ensure_absolute_path(system_config_path))
        user_file = Path(ensure_absolute_path(user_config_path))
        if system_file.exists():
            logger.info("Loading split configuration (system + user)")
            config = deep_merge(config, read_yaml_document(system_file))
            if user_file.exists():
                config = deep_merge(config, read_yaml_document(user_file))
        else:
            logger.debug("No configuration files found, using built-in defaults")

    validate_config(config)
    logger.debug("Configuration loaded and validated successfully")
    return config


def material_table_from_config(config: dict) -> MaterialTable:
    """Build the material table from a validated configuration."""
    entries = {}
    for label, entry in config['materials'].items():
        entries[label] = (entry or {}).get('refractive_index')
    return MaterialTable(entries=entries)


def load_config(config_path: Optional[str] = None) -> Tuple[MaterialTable, dict]:
    """Load materials plus default beam/laser/slab parameters.

    Returns:
        (material table, defaults section)
    """
    config = load_config_dict(config_path)
    return material_table_from_config(config), dict(config['defaults'])


def configure_logging(config: dict, level: Optional[str] = None) -> None:
    """Apply the logging section of the configuration to the root logger."""
    logging_config = config.get('logging', {})
    level_name = str(level or logging_config.get('level', 'INFO')).upper()
    logging.basicConfig(
        level=getattr(logging, level_name, logging.INFO),
        format=logging_config.get('format', LOG_FORMAT),
        force=True
    )


# ============================================================================
# Output Helpers - CSV and JSON emitters
# ============================================================================

SIGNIFICANT_DIGITS = 6


def round_significant(value: Any, digits: int = SIGNIFICANT_DIGITS) -> Any:
    """Round floats to a number of significant digits, leaving other values alone."""
    if isinstance(value, float) and math.isfinite(value):
        return float(f"{value:.{digits}g}")
    if isinstance(value, dict):
        return {k: round_significant(v, digits) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [round_significant(v, digits) for v in value]
    return value


def provenance_line() -> str:
    return f"# beatlength {VERSION}\n"


def format_csv(frame: pd.DataFrame, precision: str = 'default') -> str:
    """Render a table as CSV with a provenance comment line.

    Args:
        frame: Table to render
        precision: 'full' for round-trip floats, 'default' for 6 significant digits

    Returns:
        CSV text with LF line endings
    """
    float_format = None if precision == 'full' else f"%.{SIGNIFICANT_DIGITS}g"
    buffer = io.StringIO()
    buffer.write(provenance_line())
    frame.to_csv(buffer, index=False, float_format=float_format, lineterminator='\n')
    return buffer.getvalue()


def _json_default(value: Any) -> Any:
    # numpy scalars coming out of DataFrames
    if isinstance(value, np.generic):
        return value.item()
    raise TypeError(f"Object of type {type(value).__name__} is not JSON serializable")


def format_json(data: Any, precision: str = 'default') -> str:
    """Render a document as JSON wrapped with the version string."""
    if precision != 'full':
        data = round_significant(data)
    document = {'version': VERSION, 'data': data}
    return json.dumps(document, indent=2, default=_json_default) + "\n"


def write_output(text: str, output_path: Optional[str] = None, stream=None) -> None:
    """Write rendered output to a file or a stream (stdout by default)."""
    if output_path:
        path = Path(output_path)
        path.parent.mkdir(parents=True, exist_ok=True)
        with open(path, 'w', newline='\n') as f:
            f.write(text)
        logger.info(f"Output written to {path}")
    else:
        (stream or sys.stdout).write(text)
