"""Theory-versus-experiment discrepancy report for the beat wavelength."""

import logging
from dataclasses import dataclass, field
from typing import Any, Dict, List, Optional, Sequence

import pandas as pd

from beating import (
    BeatPrediction, ModelVariant, beat_base, beat_guided_mode, beat_planewave,
    invert_radiation_angle
)
from common import BeatlengthError, DomainError, MaterialTable
from kinematics import ElectronBeam, LaserField
from waveguide import Slab

logger = logging.getLogger(__name__)

DEFAULT_GAP_THRESHOLD = 0.10
UPPER_LIMIT_LABEL = "upper_limit"
RADIATION_ANGLE_NOTE = (
    "Radiation-mode angles depend on the assumed refractive index; "
    "the 53-63 degree range is reproduced with n = 1.559"
)


@dataclass(frozen=True)
class ExperimentRecord:
    """One published beat-wavelength measurement, in cm."""
    lambda_b_observed: float
    uncertainty: Optional[float] = None
    source_tag: str = ""

    def __post_init__(self):
        if not self.lambda_b_observed > 0:
            raise DomainError(
                f"Observed beat wavelength must be > 0, got {self.lambda_b_observed!r}"
            )
        if self.uncertainty is not None and self.uncertainty < 0:
            raise DomainError(f"Uncertainty must be >= 0, got {self.uncertainty!r}")


@dataclass
class DiscrepancyReport:
    """Cross-tabulation of model predictions against every experiment."""
    rows: List[Dict[str, Any]] = field(default_factory=list)
    experiments: List[Dict[str, Any]] = field(default_factory=list)
    summary: Dict[str, Any] = field(default_factory=dict)

    def to_frame(self) -> pd.DataFrame:
        return pd.DataFrame(self.rows, columns=REPORT_COLUMNS)

    def to_document(self) -> Dict[str, Any]:
        return {'rows': self.rows, 'experiments': self.experiments, 'summary': self.summary}


REPORT_COLUMNS = [
    'material', 'variant', 'refractive_index', 'predicted_cm', 'observed_cm',
    'source', 'relative_gap', 'flagged', 'note',
]


def experiments_from_config(config: dict) -> List[ExperimentRecord]:
    """Experiment records from the 'experiments' section of a configuration."""
    return [
        ExperimentRecord(
            lambda_b_observed=float(entry['lambda_b_cm']),
            uncertainty=entry.get('uncertainty_cm'),
            source_tag=str(entry.get('source', '')),
        )
        for entry in config.get('experiments', [])
    ]


def relative_gap(observed: float, predicted: float) -> float:
    """Signed gap observed / predicted - 1."""
    return observed / predicted - 1.0


def _material_predictions(beam: ElectronBeam, laser: LaserField, label: str, n: float,
                          thickness: float) -> List[BeatPrediction]:
    predictions = [beat_planewave(beam, laser, n)]
    try:
        predictions.append(beat_guided_mode(beam, laser, Slab(thickness, n, label), 0))
    except BeatlengthError as e:
        logger.warning(f"No TM0 prediction for {label}: {e}")
    return predictions


def build_report(experiments: Sequence[ExperimentRecord], materials: MaterialTable,
                 beam: ElectronBeam, laser: LaserField, thickness: float,
                 gap_threshold: float = DEFAULT_GAP_THRESHOLD) -> DiscrepancyReport:
    """Compare every model prediction with every experiment.

    Each material with a known index contributes a plane-wave and a TM0 row per
    experiment; the upper-limit row (lambda_b0) is always present. Materials
    without an index are listed once with a note.

    Args:
        experiments: Measurements to compare against
        materials: Refractive index table
        beam: Incident electron
        laser: Laser field
        thickness: Slab thickness in angstrom for the TM0 rows
        gap_threshold: |gap| above which a row is flagged

    Returns:
        DiscrepancyReport

    Raises:
        DomainError: If no experiments are given
    """
    if not experiments:
        raise DomainError("At least one experiment record is required")

    upper_limit = beat_base(beam, laser)
    candidates = [(UPPER_LIMIT_LABEL, None, upper_limit)]
    unavailable = []
    for label in materials.labels():
        if not materials.has_index(label):
            logger.warning(f"Material {label} has no refractive index; skipped in report")
            unavailable.append(label)
            continue
        n = materials.index_of(label)
        for prediction in _material_predictions(beam, laser, label, n, thickness):
            candidates.append((label, n, prediction))

    report = DiscrepancyReport()
    for record in experiments:
        gaps = []
        for label, n, prediction in candidates:
            gap = relative_gap(record.lambda_b_observed, prediction.lambda_b)
            gaps.append((abs(gap), gap, label, prediction))
            report.rows.append({
                'material': label,
                'variant': prediction.variant.value,
                'refractive_index': n,
                'predicted_cm': prediction.lambda_b,
                'observed_cm': record.lambda_b_observed,
                'source': record.source_tag,
                'relative_gap': gap,
                'flagged': abs(gap) > gap_threshold,
                'note': '',
            })

        _, best_gap, best_label, best_prediction = min(gaps, key=lambda item: item[0])
        limit_gap = relative_gap(record.lambda_b_observed, upper_limit.lambda_b)
        summary = {
            'observed_cm': record.lambda_b_observed,
            'uncertainty_cm': record.uncertainty,
            'source': record.source_tag,
            'best_material': best_label,
            'best_variant': best_prediction.variant.value,
            'best_predicted_cm': best_prediction.lambda_b,
            'best_gap': best_gap,
            'upper_limit_gap': limit_gap,
            'flagged': abs(best_gap) > gap_threshold,
        }
        summary.update(_radiation_angles(beam, laser, materials, record.lambda_b_observed))
        report.experiments.append(summary)

    for label in unavailable:
        report.rows.append({
            'material': label, 'variant': '', 'refractive_index': None,
            'predicted_cm': None, 'observed_cm': None, 'source': '',
            'relative_gap': None, 'flagged': False, 'note': 'n unavailable',
        })

    limit_gaps = [e['upper_limit_gap'] for e in report.experiments]
    minimum_gap = min(limit_gaps)
    report.summary = {
        'upper_limit_cm': upper_limit.lambda_b,
        'minimum_gap_to_upper_limit': minimum_gap,
        'maximum_gap_to_upper_limit': max(limit_gaps),
        'gap_threshold': gap_threshold,
        'exceeds_threshold': minimum_gap > gap_threshold,
        'materials_without_index': unavailable,
        'radiation_angle_note': RADIATION_ANGLE_NOTE,
    }
    logger.info(
        f"Report: lambda_b0={upper_limit.lambda_b:.4f} cm, minimum gap "
        f"{minimum_gap:.1%} over {len(experiments)} experiment(s)"
    )
    return report


def _radiation_angles(beam: ElectronBeam, laser: LaserField, materials: MaterialTable,
                      observed: float) -> Dict[str, Any]:
    angles = {}
    for label in materials.labels():
        if not materials.has_index(label):
            continue
        key = f"radiation_theta_deg_{label}"
        try:
            result = invert_radiation_angle(beam, laser, materials.index_of(label), observed)
            angles[key] = result.theta_external_degrees
        except BeatlengthError:
            angles[key] = None
    return angles


def is_upper_limit_row(row: Dict[str, Any]) -> bool:
    return row['material'] == UPPER_LIMIT_LABEL and row['variant'] == ModelVariant.BASE.value
