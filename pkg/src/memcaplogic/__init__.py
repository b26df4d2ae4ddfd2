"""Simulation of logic circuits built from bistable membrane memcapacitors.

Devices are integrated in dimensionless units; pulses of amplitude beta
applied to one-, two- or three-device circuits leave each membrane in one of
two wells, read as bits. Truth tables over the stored input bits identify
the logic operation a pulse pair performs.
"""

from . import kernel
from .circuit import CircuitState, Topology, coupled_rhs, divider_reduced, divider_triple
from .device import (
    DeviceParams,
    LogicBit,
    MembraneState,
    PhysicalParams,
    binarize,
    capacitance,
    init_state,
    potential_energy,
    rhs,
    rhs_resistive,
    rhs_resistive_expanded,
    to_dimensionless,
)
from .errors import CollapseError, ConfigError, DomainError, MemcapError, SimulationError
from .logic import (
    UNSETTLED_MARK,
    NotCurve,
    OperationMap,
    TruthTableResult,
    code_name,
    compute_code,
    not_search,
    sensitivity_flags,
    sweep_map,
    truth_table,
)
from .simulator import PulseSpec, SimConfig, Trajectory, integrate, pulse_value, single_shot

__version__ = "0.1.0"

__all__ = [
    "CircuitState", "Topology", "coupled_rhs", "divider_reduced", "divider_triple",
    "DeviceParams", "LogicBit", "MembraneState", "PhysicalParams", "binarize", "capacitance",
    "init_state", "potential_energy", "rhs", "rhs_resistive", "rhs_resistive_expanded",
    "to_dimensionless", "CollapseError", "ConfigError", "DomainError", "MemcapError",
    "SimulationError", "UNSETTLED_MARK", "NotCurve", "OperationMap", "TruthTableResult",
    "code_name", "compute_code", "not_search", "sensitivity_flags", "sweep_map", "truth_table",
    "PulseSpec", "SimConfig", "Trajectory", "integrate", "pulse_value", "single_shot", "kernel",
]
