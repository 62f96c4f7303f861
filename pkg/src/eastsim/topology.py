"""Node deployment, distance geometry and the per-round temperature process.

One root seed drives everything; independent substreams are derived by
hashing a purpose label (and node id) so that, for example, re-rolling
temperatures never perturbs node placement.
"""

from __future__ import annotations

import hashlib
import math
import random
from dataclasses import dataclass, field
from typing import TYPE_CHECKING, Optional

from .errors import ConfigError, DataError

if TYPE_CHECKING:
    from .protocol import Region

TRACE_HEADER = ["node", "round", "temp_c"]


def substream(seed: int, *labels: object) -> random.Random:
    """Independent RNG stream for (seed, purpose label, ...)."""
    key = ":".join([str(seed), *(str(label) for label in labels)])
    digest = hashlib.sha256(key.encode("ascii")).digest()
    return random.Random(int.from_bytes(digest[:8], "big"))


@dataclass(frozen=True)
class Position:
    x_m: float
    y_m: float


def distance(a: Position, b: Position) -> float:
    """Euclidean distance in meters."""
    return math.hypot(a.x_m - b.x_m, a.y_m - b.y_m)


@dataclass
class TemperatureProcess:
    """Per-node per-round temperature source.

    Synthetic mode: a per-node Gaussian random walk started at the node's
    base temperature, clamped to [t_min_c, t_max_c] after every step.
    Trace mode: exact lookup in a dense (node, round) table.
    """

    mode: str = "synthetic"
    t_min_c: float = -10.0
    t_max_c: float = 53.0
    walk_sigma_c: float = 0.5
    trace: Optional[dict[tuple[int, int], float]] = None
    trace_nodes: int = 0
    trace_rounds: int = 0


@dataclass
class NodeState:
    """Mutable per-node simulation state."""

    node_id: int
    pos: Position
    base_temp_c: float
    current_temp_c: float
    battery_j: float
    assigned_level_dbm: float = 0.0
    assigned_pt_dbm: float = 0.0
    alive: bool = True
    region: Optional["Region"] = None


@dataclass
class Deployment:
    nodes: list[NodeState] = field(default_factory=list)
    reference_pos: Position = Position(0.0, 0.0)
    area_side_m: float = 100.0
    seed: int = 0


def deploy_random(
    n: int,
    area_side_m: float,
    seed: int,
    t_min_c: float = -10.0,
    t_max_c: float = 53.0,
    initial_battery_j: float = 2.0,
) -> Deployment:
    """Place ``n`` nodes uniformly in the square, reference at the left-edge midpoint.

    Node ``i`` draws its position from substream (seed, "deploy", i) and its
    base temperature uniformly in [t_min_c, t_max_c] from
    (seed, "base-temp", i), so placements are independent of node count.
    """
    if n < 1:
        raise ConfigError(f"node count must be >= 1, got {n}")
    if not (area_side_m > 0.0):
        raise ConfigError(f"area side must be positive, got {area_side_m}")
    nodes = []
    for i in range(n):
        rng = substream(seed, "deploy", i)
        pos = Position(rng.uniform(0.0, area_side_m), rng.uniform(0.0, area_side_m))
        base = substream(seed, "base-temp", i).uniform(t_min_c, t_max_c)
        nodes.append(
            NodeState(
                node_id=i,
                pos=pos,
                base_temp_c=base,
                current_temp_c=base,
                battery_j=initial_battery_j,
            )
        )
    reference = Position(0.0, area_side_m / 2.0)
    return Deployment(nodes=nodes, reference_pos=reference, area_side_m=area_side_m, seed=seed)


def walk_stream(seed: int, node_id: int) -> random.Random:
    """The substream feeding a node's temperature random walk."""
    return substream(seed, "temp-walk", node_id)


def _clamp(value: float, lo: float, hi: float) -> float:
    return min(max(value, lo), hi)


def temperature_at(node: NodeState, round_idx: int, proc: TemperatureProcess, seed: int) -> float:
    """Temperature of ``node`` at ``round_idx``.

    Synthetic mode replays the node's walk from round 0 (round 0 is the base
    temperature); trace mode is an exact table lookup.
    """
    if round_idx < 0:
        raise ValueError(f"round index must be >= 0, got {round_idx}")
    if proc.mode == "trace":
        if proc.trace is None or (node.node_id, round_idx) not in proc.trace:
            raise DataError(f"trace has no entry for node {node.node_id}, round {round_idx}")
        return proc.trace[(node.node_id, round_idx)]
    rng = walk_stream(seed, node.node_id)
    temp = node.base_temp_c
    for _ in range(round_idx):
        temp = _clamp(temp + proc.walk_sigma_c * rng.gauss(0.0, 1.0), proc.t_min_c, proc.t_max_c)
    return temp


def load_temperature_trace(
    path: str, t_min_c: float = -10.0, t_max_c: float = 53.0
) -> TemperatureProcess:
    """Load a dense per-node per-round temperature table.

    Format: header ``node,round,temp_c``, one row per (node, round) pair,
    zero-based dense indices. Values must lie within [t_min_c, t_max_c].
    """
    try:
        with open(path, "r", encoding="utf-8") as fh:
            lines = fh.read().splitlines()
    except FileNotFoundError:
        raise ConfigError(f"temperature trace not found: {path}") from None
    if not lines:
        raise DataError(f"{path}: empty trace file")
    header = [col.strip() for col in lines[0].split(",")]
    if header != TRACE_HEADER:
        raise DataError(f"{path}: expected header {','.join(TRACE_HEADER)!r}, got {lines[0]!r}")

    trace: dict[tuple[int, int], float] = {}
    for line_no, line in enumerate(lines[1:], start=2):
        if not line.strip():
            continue
        fields = [col.strip() for col in line.split(",")]
        if len(fields) != 3:
            raise DataError(f"{path}: row {line_no}: expected 3 fields, got {len(fields)}")
        try:
            node_id, round_idx, temp = int(fields[0]), int(fields[1]), float(fields[2])
        except ValueError:
            raise DataError(f"{path}: row {line_no}: malformed values {line!r}") from None
        if node_id < 0 or round_idx < 0:
            raise DataError(f"{path}: row {line_no}: negative node or round index")
        if not (t_min_c <= temp <= t_max_c):
            raise DataError(
                f"{path}: row {line_no}: temperature {temp} outside "
                f"declared range [{t_min_c}, {t_max_c}]"
            )
        if (node_id, round_idx) in trace:
            raise DataError(f"{path}: row {line_no}: duplicate entry for ({node_id}, {round_idx})")
        trace[(node_id, round_idx)] = temp

    if not trace:
        raise DataError(f"{path}: trace contains no rows")
    n_nodes = max(node_id for node_id, _ in trace) + 1
    n_rounds = max(round_idx for _, round_idx in trace) + 1
    for node_id in range(n_nodes):
        for round_idx in range(n_rounds):
            if (node_id, round_idx) not in trace:
                raise DataError(f"{path}: missing entry for node {node_id}, round {round_idx}")
    return TemperatureProcess(
        mode="trace",
        t_min_c=t_min_c,
        t_max_c=t_max_c,
        walk_sigma_c=0.0,
        trace=trace,
        trace_nodes=n_nodes,
        trace_rounds=n_rounds,
    )
