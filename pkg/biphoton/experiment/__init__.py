"""
Experiment package: scenario definitions and the scan runner.
"""

from biphoton.experiment.scenarios import Mode, ScanResult, Scenario, ScenarioConfig
from biphoton.experiment.runner import ExperimentRunner

__all__ = ['ExperimentRunner', 'Mode', 'ScanResult', 'Scenario', 'ScenarioConfig']
