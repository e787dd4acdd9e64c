"""Failure-mode power management for zonal MVDC shipboard microgrids."""

from .model import (
    ConfigurationError,
    EsmSpec,
    FaultSet,
    GeneratorSpec,
    LoadProfile,
    NetworkTopology,
    NonVitalBlock,
    PenaltyConfig,
    PropulsionSpec,
    Schedule,
    ShipScenario,
    SolveReport,
    VoyageSpec,
    derive_h_bound,
    derive_xi_l_bound,
    load_scenario,
    save_scenario,
    validate_scenario,
)
from .fault_analysis import FaultMode, IslandPartition, partition

__all__ = [
    "ConfigurationError",
    "EsmSpec",
    "FaultMode",
    "FaultSet",
    "GeneratorSpec",
    "IslandPartition",
    "LoadProfile",
    "NetworkTopology",
    "NonVitalBlock",
    "PenaltyConfig",
    "PropulsionSpec",
    "Schedule",
    "ShipScenario",
    "SolveReport",
    "VoyageSpec",
    "derive_h_bound",
    "derive_xi_l_bound",
    "load_scenario",
    "partition",
    "save_scenario",
    "validate_scenario",
]

__version__ = "0.1.0"
