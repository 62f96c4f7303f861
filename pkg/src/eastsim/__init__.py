"""Deterministic simulator of temperature-aware transmission power control
in wireless sensor networks."""

__version__ = "0.1.0"

from .config import SimConfig, fingerprint, parse_config, serialize_config, validate
from .engine import EnergyLedger, RoundRecord, SimResult, run_simulation
from .errors import ConfigError, DataError, EastSimError, SimulationComplete, UsageError
from .protocol import (
    CadenceParams,
    ControllerState,
    ControlTraffic,
    Region,
    RegionConfig,
    RegionPartition,
    classical_assign,
    east_assign,
    estimate_rssi_loss,
    init_desired_neighbors,
    needs_closed_loop,
    partition_regions,
)
from .radio import (
    EnergyModelParams,
    LinkBudgetParams,
    PrrParams,
    dbm_to_watts,
    free_space_base_requirement,
    power_level_for_rssi_loss,
    prr_from_margin,
    required_transmit_power,
    rssi_loss_from_temperature,
    rx_energy,
    tx_energy,
    watts_to_dbm,
)
from .report import (
    ComparisonReport,
    FigureSeries,
    RegionSummary,
    compare_runs,
    emit_figure_data,
    summarize,
)
from .topology import (
    Deployment,
    NodeState,
    Position,
    TemperatureProcess,
    deploy_random,
    distance,
    load_temperature_trace,
    substream,
    temperature_at,
)
