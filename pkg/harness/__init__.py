"""
Pakiet eksperymentów: metryki, manifest przebiegu i orkiestracja
"""
from .metrics import MetricsTable, accuracy, fidelity, fpr_fnr, mean_ci
from .manifest import RunManifest
from .experiment import ExperimentConfig, ExperimentRunner, run_experiment, table_from_manifest

__all__ = [
    'MetricsTable',
    'accuracy',
    'fidelity',
    'fpr_fnr',
    'mean_ci',
    'RunManifest',
    'ExperimentConfig',
    'ExperimentRunner',
    'run_experiment',
    'table_from_manifest'
]
