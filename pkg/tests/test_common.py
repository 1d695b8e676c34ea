"""Tests for common.py utilities."""
import pytest
from pathlib import Path
import io
import json
import sys
import os

import pandas as pd

# Add src directory to path for imports
sys.path.insert(0, os.path.join(os.path.dirname(os.path.dirname(os.path.abspath(__file__))), 'src'))

from common import (
    CONFIG_ENV_VAR, DEFAULT_CONFIG, EXIT_DOMAIN, EXIT_NUMERICAL, EXIT_USAGE, VERSION,
    ConfigError, DomainError, EvanescentSidebandError, MaterialTable, NoSuchModeError,
    NumericalFailureError, OutputSizeError, UsageError,
    deep_merge, ensure_absolute_path, exit_code_for, format_csv, format_json,
    load_config, load_config_dict, material_table_from_config,
    round_significant, validate_config, write_output
)

FIXTURE = os.path.join(os.path.dirname(os.path.abspath(__file__)), 'fixtures', 'config_test.yaml')


@pytest.fixture(autouse=True)
def no_env_config(monkeypatch):
    monkeypatch.delenv(CONFIG_ENV_VAR, raising=False)


class TestLoadConfig:
    """Tests for configuration loading."""

    def test_load_config_valid(self):
        """Test loading the fixture merges over the built-in defaults."""
        config = load_config_dict(FIXTURE)
        assert config['defaults']['material'] == 'TestGlass'
        assert config['defaults']['kinetic_energy_kev'] == 40.0
        # Built-in materials survive the merge
        assert config['materials']['SrF2']['refractive_index'] == 1.43
        assert config['output']['format'] == 'json'

    def test_load_config_returns_table_and_defaults(self):
        """Test the (materials, defaults) pair."""
        materials, defaults = load_config(FIXTURE)
        assert materials.index_of('TestGlass') == 1.5
        assert not materials.has_index('Unknown')
        assert defaults['phase_convention'] == 'cosine_experiment'

    def test_load_config_missing_file(self):
        """Test error handling for a missing explicit config."""
        with pytest.raises(ConfigError) as exc_info:
            load_config_dict("nonexistent.yaml")
        assert "not found" in str(exc_info.value).lower()

    def test_load_config_invalid_yaml_reports_line(self, tmp_path):
        """Test YAML syntax errors carry the line and column."""
        config_file = tmp_path / "bad_config.yaml"
        config_file.write_text("defaults:\n  material: SiO2\n  thickness_angstrom: [1000\n")

        with pytest.raises(ConfigError) as exc_info:
            load_config_dict(str(config_file))
        message = str(exc_info.value)
        assert "yaml" in message.lower()
        assert "line" in message

    def test_load_config_non_mapping(self, tmp_path):
        """Test a YAML list at top level is rejected."""
        config_file = tmp_path / "list.yaml"
        config_file.write_text("- 1\n- 2\n")
        with pytest.raises(ConfigError):
            load_config_dict(str(config_file))

    def test_empty_file_uses_defaults(self, tmp_path):
        """Test an empty file yields the built-in defaults."""
        config_file = tmp_path / "empty.yaml"
        config_file.write_text("")
        config = load_config_dict(str(config_file))
        assert config['defaults'] == DEFAULT_CONFIG['defaults']

    def test_env_var_is_used(self, tmp_path, monkeypatch):
        """Test $BEATLENGTH_CONFIG is read when no path is given."""
        config_file = tmp_path / "env.yaml"
        config_file.write_text("defaults:\n  kinetic_energy_kev: 30\n")
        monkeypatch.setenv(CONFIG_ENV_VAR, str(config_file))
        config = load_config_dict()
        assert config['defaults']['kinetic_energy_kev'] == 30

    def test_explicit_path_beats_env_var(self, tmp_path, monkeypatch):
        """Test an explicit path takes precedence over the environment."""
        env_file = tmp_path / "env.yaml"
        env_file.write_text("defaults:\n  kinetic_energy_kev: 30\n")
        monkeypatch.setenv(CONFIG_ENV_VAR, str(env_file))
        config = load_config_dict(FIXTURE)
        assert config['defaults']['kinetic_energy_kev'] == 40.0

    def test_split_mode(self, tmp_path):
        """Test system + user files merge with user precedence."""
        system = tmp_path / "system.yaml"
        user = tmp_path / "user.yaml"
        system.write_text("report:\n  gap_threshold: 0.2\ndefaults:\n  thickness_angstrom: 900\n")
        user.write_text("defaults:\n  thickness_angstrom: 1100\n")
        config = load_config_dict(user_config_path=str(user), system_config_path=str(system))
        assert config['report']['gap_threshold'] == 0.2
        assert config['defaults']['thickness_angstrom'] == 1100

    def test_no_files_uses_defaults(self, tmp_path):
        """Test missing split files fall back to built-ins."""
        config = load_config_dict(
            user_config_path=str(tmp_path / "none_user.yaml"),
            system_config_path=str(tmp_path / "none_system.yaml"),
        )
        assert config['materials']['SiO2']['refractive_index'] == 1.559

    def test_defaults_not_mutated(self, tmp_path):
        """Test loading never mutates DEFAULT_CONFIG."""
        config_file = tmp_path / "c.yaml"
        config_file.write_text("materials:\n  SiO2:\n    refractive_index: 1.46\n")
        load_config_dict(str(config_file))
        assert DEFAULT_CONFIG['materials']['SiO2']['refractive_index'] == 1.559

    def test_shipped_config_files_are_valid(self):
        """Test the repository's split configuration loads."""
        config = load_config_dict()
        assert config['materials']['SiO2']['refractive_index'] == 1.559
        assert len(config['experiments']) == 3


class TestValidateConfig:
    """Tests for configuration validation."""

    def _config(self, **overrides):
        return deep_merge(DEFAULT_CONFIG, overrides)

    def test_defaults_are_valid(self):
        """Test the built-in defaults validate."""
        assert validate_config(self._config()) is not None

    def test_missing_section(self):
        """Test a missing section is reported."""
        config = self._config()
        del config['report']
        with pytest.raises(ConfigError) as exc_info:
            validate_config(config)
        assert "report" in str(exc_info.value)

    def test_index_not_above_one(self):
        """Test a material index of 1 or less is refused."""
        with pytest.raises(ConfigError) as exc_info:
            validate_config(self._config(materials={'Bad': {'refractive_index': 0.9}}))
        assert "Bad" in str(exc_info.value)

    def test_negative_energy(self):
        """Test a negative beam energy is refused."""
        with pytest.raises(ConfigError):
            validate_config(self._config(defaults={'kinetic_energy_kev': -5}))

    def test_modulation_depth_range(self):
        """Test the modulation depth must lie in [0, 1]."""
        with pytest.raises(ConfigError):
            validate_config(self._config(defaults={'modulation_depth': 1.5}))

    def test_phase_convention(self):
        """Test an unknown phase convention is refused."""
        with pytest.raises(ConfigError):
            validate_config(self._config(defaults={'phase_convention': 'tangent'}))

    def test_experiment_must_be_positive(self):
        """Test experiment values must be positive."""
        with pytest.raises(ConfigError):
            validate_config(self._config(experiments=[{'lambda_b_cm': 0}]))

    def test_output_format(self):
        """Test an unknown output format is refused."""
        with pytest.raises(ConfigError):
            validate_config(self._config(output={'format': 'xml'}))

    def test_logging_level(self):
        """Test an unknown logging level is refused."""
        with pytest.raises(ConfigError):
            validate_config(self._config(logging={'level': 'LOUD'}))

    def test_config_error_is_value_error(self):
        """Test ConfigError is a ValueError."""
        assert issubclass(ConfigError, ValueError)


class TestMaterialTable:
    """Tests for the material table."""

    def test_from_config(self):
        """Test building the table from configuration."""
        table = material_table_from_config(DEFAULT_CONFIG)
        assert table.labels() == ['SrF2', 'SiO2', 'Al2O3']
        assert table.index_of('SrF2') == 1.43

    def test_unknown_label(self):
        """Test looking up an unknown material."""
        table = MaterialTable({'SiO2': 1.559})
        with pytest.raises(UsageError):
            table.index_of('Glass')

    def test_unavailable_index(self):
        """Test a material recorded without an index."""
        table = MaterialTable({'Al2O3': None})
        with pytest.raises(DomainError) as exc_info:
            table.index_of('Al2O3')
        assert "unavailable" in str(exc_info.value)

    def test_rejects_index_below_one(self):
        """Test the table refuses indices below 1."""
        with pytest.raises(ConfigError):
            MaterialTable({'Air': 1.0})


class TestDeepMerge:
    """Tests for deep_merge function."""

    def test_deep_merge_simple(self):
        """Test simple dictionary merge."""
        base = {'a': 1, 'b': 2}
        override = {'b': 3, 'c': 4}
        assert deep_merge(base, override) == {'a': 1, 'b': 3, 'c': 4}

    def test_deep_merge_nested(self):
        """Test nested dictionary merge."""
        base = {'defaults': {'material': 'SiO2', 'thickness_angstrom': 1000}}
        override = {'defaults': {'thickness_angstrom': 1200}}
        result = deep_merge(base, override)
        assert result['defaults'] == {'material': 'SiO2', 'thickness_angstrom': 1200}

    def test_deep_merge_replaces_lists(self):
        """Test that lists are replaced, not concatenated."""
        result = deep_merge({'experiments': [1, 2]}, {'experiments': [3]})
        assert result['experiments'] == [3]

    def test_deep_merge_does_not_mutate_base(self):
        """Test merging leaves the base dictionary untouched."""
        base = {'a': {'b': 1}}
        deep_merge(base, {'a': {'b': 2}})
        assert base == {'a': {'b': 1}}


class TestEnsureAbsolutePath:
    """Tests for ensure_absolute_path."""

    def test_absolute_path_unchanged(self, tmp_path):
        """Test an absolute path is returned as is."""
        assert ensure_absolute_path(str(tmp_path)) == str(tmp_path)

    def test_relative_to_project_root(self):
        """Test relative paths resolve against the project root."""
        result = Path(ensure_absolute_path("config/system_config.yaml"))
        assert result.is_absolute()
        assert result.exists()

    def test_relative_to_reference_file(self, tmp_path):
        """Test relative paths resolve against a reference file."""
        reference = tmp_path / "config.yaml"
        assert ensure_absolute_path("data", str(reference)) == str(tmp_path / "data")


class TestExitCodes:
    """Tests for the error to exit code mapping."""

    @pytest.mark.parametrize("error,code", [
        (UsageError("x"), EXIT_USAGE),
        (OutputSizeError("x"), EXIT_USAGE),
        (DomainError("x"), EXIT_DOMAIN),
        (NoSuchModeError("x"), EXIT_DOMAIN),
        (EvanescentSidebandError("x"), EXIT_DOMAIN),
        (ConfigError("x"), EXIT_DOMAIN),
        (NumericalFailureError("x"), EXIT_NUMERICAL),
    ])
    def test_mapping(self, error, code):
        """Test each error class maps to its exit code."""
        assert exit_code_for(error) == code


class TestOutputHelpers:
    """Tests for CSV/JSON emitters."""

    def test_round_significant(self):
        """Test rounding nested values to six significant digits."""
        assert round_significant(1.2345678912) == 1.23457
        assert round_significant({'a': [1.0000004, 'x']}) == {'a': [1.0, 'x']}
        assert round_significant(7) == 7

    def test_csv_has_provenance_and_lf(self):
        """Test CSV output has the version line and LF endings."""
        text = format_csv(pd.DataFrame({'a': [1.0], 'b': ['x']}))
        assert text.startswith(f"# beatlength {VERSION}\n")
        assert "\r" not in text

    def test_csv_full_precision_round_trips(self):
        """Test full-precision CSV reads back exactly."""
        values = [1.5146870921034567, 0.1 + 0.2, 2.0 / 3.0]
        text = format_csv(pd.DataFrame({'v': values}), precision='full')
        parsed = pd.read_csv(io.StringIO(text), comment='#', float_precision='round_trip')
        assert parsed['v'].tolist() == values

    def test_csv_default_precision(self):
        """Test default CSV precision."""
        text = format_csv(pd.DataFrame({'v': [2.0 / 3.0]}))
        assert "0.666667" in text
        assert "0.6666666" not in text

    def test_json_document(self):
        """Test the JSON document wraps data with the version."""
        document = json.loads(format_json({'lambda_b_cm': 1.2345678912}))
        assert document['version'] == VERSION
        assert document['data']['lambda_b_cm'] == 1.23457

    def test_json_full_precision(self):
        """Test full-precision JSON keeps every digit."""
        value = 1.5146870921034567
        document = json.loads(format_json([value], 'full'))
        assert document['data'] == [value]

    def test_json_numpy_scalars(self):
        """Test numpy scalars serialize as plain numbers."""
        frame = pd.DataFrame({'mode_index': [0, 1], 'flag': [True, False]})
        document = json.loads(format_json(frame.to_dict(orient='records')))
        assert document['data'][1] == {'mode_index': 1, 'flag': False}

    def test_write_output_to_stream(self):
        """Test writing to a stream."""
        stream = io.StringIO()
        write_output("hello\n", stream=stream)
        assert stream.getvalue() == "hello\n"

    def test_write_output_to_file(self, tmp_path):
        """Test writing to a file in a new directory."""
        target = tmp_path / "out" / "table.csv"
        write_output("a\n1\n", str(target))
        assert target.read_text() == "a\n1\n"
