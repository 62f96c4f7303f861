"""Region-based transmission power controller and the max-power baseline.

A reference node estimates each neighbor's temperature-induced power loss
via beacon/ACK exchanges. Nodes are split once into three regions (A: high
loss, B: medium, C: low); each region carries a loss threshold, the power
level compensating that threshold, and a desired neighbor count. Per round
each node's level follows three rules:

  (i)   loss >= threshold and n_current >= n_desired -> region threshold level
  (ii)  loss >= threshold and n_current <  n_desired -> own compensation
        level, never decreasing
  (iii) loss <  threshold                            -> level unchanged

The baseline assigns every node the worst-case compensation level and
re-estimates losses every round.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum
from typing import Iterable, Mapping, Optional

from .errors import ConfigError, SimulationComplete
from .radio import power_level_for_rssi_loss, rssi_loss_from_temperature
from .topology import Deployment, NodeState

# Desired neighbor count per region sits this far below the initial count.
DESIRED_NEIGHBOR_DEFICIT = 5


class Region(Enum):
    A = "A"
    B = "B"
    C = "C"


REGIONS = (Region.A, Region.B, Region.C)


@dataclass(frozen=True)
class RegionConfig:
    """Partition cuts and per-region controller thresholds.

    Nodes with loss above ``boundary_high_dbm`` land in A, between the two
    boundaries in B, and at or below ``boundary_low_dbm`` in C. Threshold
    power levels are always derived from the threshold losses through the
    compensation curve, never stored independently.
    """

    boundary_high_dbm: float = -0.61
    boundary_low_dbm: float = -5.17
    threshold_loss_dbm: Mapping[Region, float] = field(
        default_factory=lambda: {Region.A: 3.78, Region.B: -0.61, Region.C: -5.17}
    )

    def threshold_level_dbm(self, region: Region) -> float:
        return power_level_for_rssi_loss(self.threshold_loss_dbm[region])

    @property
    def threshold_levels_dbm(self) -> dict[Region, float]:
        return {r: self.threshold_level_dbm(r) for r in REGIONS}


@dataclass(frozen=True)
class CadenceParams:
    """Closed-loop schedule: run an exchange every ``period_rounds`` rounds,
    or sooner when some node's predicted loss drifts more than ``drift_dbm``
    from its last measured value."""

    period_rounds: int = 10
    drift_dbm: float = 1.0


@dataclass
class RegionPartition:
    assignment: dict[int, Region]
    counts: dict[Region, int]


@dataclass
class ControllerState:
    """Per-region feedback state owned by the engine."""

    n_current: dict[Region, int]
    n_desired: dict[Region, int]
    last_closed_loop_round: dict[Region, Optional[int]]
    last_estimated_loss: dict[int, float]

    def errors(self) -> dict[Region, int]:
        """Feedback error per region: desired minus current neighbor count."""
        return {r: self.n_desired[r] - self.n_current[r] for r in self.n_desired}


@dataclass
class ControlTraffic:
    beacons_sent: int = 0
    acks_sent: int = 0


def estimate_rssi_loss(
    deployment: Deployment,
    temps_c: Mapping[int, float],
    traffic: ControlTraffic,
) -> dict[int, float]:
    """Beacon/ACK exchange: measure every alive node's current power loss.

    Costs one broadcast beacon plus one ACK per alive node. Estimation is
    noise-free: the measured loss is the temperature relation evaluated at
    the node's current temperature.
    """
    alive = [node for node in deployment.nodes if node.alive]
    if not alive:
        raise SimulationComplete("no alive nodes remain")
    traffic.beacons_sent += 1
    traffic.acks_sent += len(alive)
    return {node.node_id: rssi_loss_from_temperature(temps_c[node.node_id]) for node in alive}


def partition_regions(losses_dbm: Mapping[int, float], cfg: RegionConfig) -> RegionPartition:
    """Assign each node a region by loss severity."""
    if not losses_dbm:
        raise ValueError("cannot partition an empty loss map")
    assignment: dict[int, Region] = {}
    counts = {r: 0 for r in REGIONS}
    for node_id in sorted(losses_dbm):
        loss = losses_dbm[node_id]
        if loss > cfg.boundary_high_dbm:
            region = Region.A
        elif loss > cfg.boundary_low_dbm:
            region = Region.B
        else:
            region = Region.C
        assignment[node_id] = region
        counts[region] += 1
    return RegionPartition(assignment=assignment, counts=counts)


def init_desired_neighbors(
    partition: RegionPartition, *, allow_small: bool = False
) -> dict[Region, int]:
    """Desired neighbor count per region: initial count minus 5.

    A region with 5 or fewer nodes is degenerate (its desired count would
    drop below 1) and rejected unless ``allow_small`` floors the result at 1,
    which the engine uses for desk-scale networks.
    """
    desired: dict[Region, int] = {}
    for region in REGIONS:
        count = partition.counts.get(region, 0)
        if count <= DESIRED_NEIGHBOR_DEFICIT and not allow_small:
            raise ConfigError(
                f"region {region.value} has {count} nodes; at least "
                f"{DESIRED_NEIGHBOR_DEFICIT + 1} are required"
            )
        desired[region] = max(count - DESIRED_NEIGHBOR_DEFICIT, 1)
    return desired


def east_assign(
    node: NodeState,
    region: Region,
    loss_dbm: float,
    state: ControllerState,
    cfg: RegionConfig,
) -> float:
    """New power level for one node under the three-rule table."""
    threshold_loss = cfg.threshold_loss_dbm[region]
    if loss_dbm >= threshold_loss:
        if state.n_current[region] >= state.n_desired[region]:
            return cfg.threshold_level_dbm(region)
        return max(node.assigned_level_dbm, power_level_for_rssi_loss(loss_dbm))
    return node.assigned_level_dbm


def classical_assign(t_max_c: float) -> float:
    """Baseline level: compensation for the worst-case temperature.

    Constant across nodes and rounds; every node transmits as if it sat at
    the hottest configured temperature.
    """
    return power_level_for_rssi_loss(rssi_loss_from_temperature(t_max_c))


def needs_closed_loop(
    region: Region,
    round_idx: int,
    state: ControllerState,
    cadence: CadenceParams,
    predicted_loss_dbm: Mapping[int, float],
    members: Iterable[int],
) -> bool:
    """Whether a region must run a beacon/ACK exchange this round.

    True when no exchange has happened yet, the period has elapsed, or some
    member's locally predicted loss drifted past the drift bound since the
    last exchange. Rounds returning False cost the region no control packets.
    """
    last = state.last_closed_loop_round.get(region)
    if last is None:
        return True
    if round_idx - last >= cadence.period_rounds:
        return True
    drift = max(
        (abs(predicted_loss_dbm[i] - state.last_estimated_loss[i]) for i in members),
        default=0.0,
    )
    return drift > cadence.drift_dbm
