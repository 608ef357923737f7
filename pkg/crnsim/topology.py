"""
Random geometric CR network: node placement, unit-disk neighborhoods, per-node
available channel sets (Acs) and the spread of PR nodes over channels.
"""

import json
import logging
import math
from dataclasses import dataclass
from functools import cached_property
from pathlib import Path
from typing import Any

import networkx as nx
import numpy as np

from .errors import InvalidConfigError, SimulationError, SpectrumDomainError
from .spectrum import ChannelView, SlotFrame

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class Topology:
    """Immutable CR network snapshot shared by every run that uses it."""
    positions: tuple[tuple[float, float], ...]
    radius: float
    area_side: float
    adjacency: tuple[tuple[int, ...], ...]
    acs: tuple[frozenset[int], ...]
    pr_assignment: tuple[int, ...]
    channels: int

    @classmethod
    def from_positions(
        cls,
        positions,
        radius: float,
        acs,
        channels: int,
        pr_assignment=None,
        area_side: float | None = None
    ) -> "Topology":
        """
        Build a topology from explicit coordinates, deriving adjacency with the disk rule.

        Args:
            positions: (x, y) pairs in meters
            radius: transmission range R in meters
            acs: one channel collection per node
            channels: total channel count
            pr_assignment: PR nodes per channel (default: none)
            area_side: side of the deployment square (default: bounding box)
        """
        if radius <= 0:
            raise InvalidConfigError(f"radius must be positive, got {radius}")
        coords = np.asarray(positions, dtype=float).reshape(-1, 2)
        if len(acs) != len(coords):
            raise InvalidConfigError(
                f"got {len(acs)} channel sets for {len(coords)} nodes"
            )
        acs_sets = tuple(frozenset(int(c) for c in node_acs) for node_acs in acs)
        for node, node_acs in enumerate(acs_sets):
            if any(not 0 <= c < channels for c in node_acs):
                raise InvalidConfigError(f"node {node} lists a channel outside [0, {channels})")

        if pr_assignment is None:
            pr_assignment = (0,) * channels
        if len(pr_assignment) != channels:
            raise InvalidConfigError("pr_assignment needs one entry per channel")

        if area_side is None:
            area_side = float(coords.max()) if len(coords) else 0.0

        return cls(
            positions=tuple((float(x), float(y)) for x, y in coords),
            radius=float(radius),
            area_side=float(area_side),
            adjacency=_disk_adjacency(coords, radius),
            acs=acs_sets,
            pr_assignment=tuple(int(c) for c in pr_assignment),
            channels=channels,
        )

    @property
    def n(self) -> int:
        return len(self.positions)

    @property
    def total_pr(self) -> int:
        return sum(self.pr_assignment)

    def neighbors(self, node: int) -> tuple[int, ...]:
        return self.adjacency[node]

    def in_range(self, a: int, b: int) -> bool:
        return b in self._neighbor_sets[a]

    @cached_property
    def _neighbor_sets(self) -> tuple[frozenset[int], ...]:
        return tuple(frozenset(adj) for adj in self.adjacency)

    @cached_property
    def channel_degree(self) -> np.ndarray:
        """channel_degree[i, c] = neighbors of i whose Acs contains c."""
        membership = np.zeros((self.n, self.channels), dtype=np.int64)
        for node, node_acs in enumerate(self.acs):
            for channel in node_acs:
                membership[node, channel] = 1
        adjacency = np.zeros((self.n, self.n), dtype=np.int64)
        for node, adj in enumerate(self.adjacency):
            adjacency[node, list(adj)] = 1
        return adjacency @ membership

    def mean_degree(self) -> float:
        if self.n == 0:
            return 0.0
        return sum(len(adj) for adj in self.adjacency) / self.n

    def to_graph(self) -> nx.Graph:
        """networkx view with node attributes pos and acs."""
        graph = nx.Graph()
        for node in range(self.n):
            graph.add_node(node, pos=self.positions[node], acs=sorted(self.acs[node]))
        for node, adj in enumerate(self.adjacency):
            graph.add_edges_from((node, other) for other in adj if other > node)
        return graph

    def is_connected(self) -> bool:
        if self.n == 0:
            return False
        return nx.is_connected(self.to_graph())


@dataclass(frozen=True)
class NodeView:
    """Everything a CR node knows locally when it picks channels."""
    node_id: int
    acs: frozenset[int]
    channel_views: dict[int, ChannelView]
    neighbor_acs: tuple[frozenset[int], ...]

    def views(self) -> list[ChannelView]:
        """Channel views ordered by channel id."""
        return [self.channel_views[c] for c in sorted(self.channel_views)]


def _disk_adjacency(coords: np.ndarray, radius: float) -> tuple[tuple[int, ...], ...]:
    if len(coords) == 0:
        return ()
    diff = coords[:, None, :] - coords[None, :, :]
    dist_sq = np.einsum('ijk,ijk->ij', diff, diff)
    within = dist_sq <= radius * radius
    np.fill_diagonal(within, False)
    return tuple(tuple(int(j) for j in np.flatnonzero(row)) for row in within)


def spread_pr_nodes(pr_count: int, channels: int) -> tuple[int, ...]:
    """Round-robin PR nodes over channels; counts differ by at most one."""
    if channels < 1:
        raise InvalidConfigError(f"channels must be positive, got {channels}")
    if pr_count < 0:
        raise InvalidConfigError(f"PR count must be non-negative, got {pr_count}")
    base, extra = divmod(pr_count, channels)
    return tuple(base + (1 if c < extra else 0) for c in range(channels))


def generate(
    n: int,
    area_side: float,
    radius: float,
    channels: int,
    acs_size: int,
    pr_count: int,
    rng: np.random.Generator,
    require_connected: bool = False,
    max_attempts: int = 100
) -> Topology:
    """
    Draw a random CR network.

    Positions are i.i.d. uniform on the square, each Acs is a uniform acs_size-subset of
    all channels. With require_connected the whole draw is repeated until the graph is
    connected, up to max_attempts times.
    """
    if n < 1:
        raise InvalidConfigError(f"node count must be positive, got {n}")
    if not 1 <= acs_size <= channels:
        raise InvalidConfigError(
            f"acs_size must lie in [1, channels={channels}], got {acs_size}"
        )
    if radius <= 0 or area_side <= 0:
        raise InvalidConfigError("radius and area_side must be positive")

    pr_assignment = spread_pr_nodes(pr_count, channels)

    for attempt in range(1, max_attempts + 1):
        coords = rng.uniform(0.0, area_side, size=(n, 2))
        acs = [
            frozenset(int(c) for c in rng.choice(channels, size=acs_size, replace=False))
            for _ in range(n)
        ]
        topology = Topology.from_positions(
            coords, radius, acs, channels, pr_assignment=pr_assignment, area_side=area_side
        )
        if not require_connected or topology.is_connected():
            if attempt > 1:
                logger.debug("connected topology after %d attempts", attempt)
            return topology

    raise InvalidConfigError(
        f"no connected topology within {max_attempts} attempts; "
        f"raise radius or max_topology_attempts"
    )


def cr_neighbor_count(topology: Topology, node: int, channel: int) -> int:
    """Neighbors of node that can use channel (CR_n)."""
    if channel not in topology.acs[node]:
        raise SpectrumDomainError(f"channel {channel} is not in node {node}'s Acs")
    return int(topology.channel_degree[node, channel])


def ttl_for(area_side: float, radius: float) -> int:
    """Hop budget needed to cross the deployment square: ceil(2a / R)."""
    if radius <= 0:
        raise InvalidConfigError(f"radius must be positive, got {radius}")
    return math.ceil(2 * area_side / radius)


def node_view(topology: Topology, node: int, pr_frames: dict[int, SlotFrame]) -> NodeView:
    """Assemble a node's channel views from this round's frames and its neighborhood."""
    views = {}
    for channel in sorted(topology.acs[node]):
        frame = pr_frames.get(channel)
        if frame is None:
            raise SimulationError(f"no PR frame for channel {channel} (node {node})")
        views[channel] = ChannelView.from_frame(
            channel, frame, cr_neighbor_count(topology, node, channel)
        )

    return NodeView(
        node_id=node,
        acs=topology.acs[node],
        channel_views=views,
        neighbor_acs=tuple(topology.acs[other] for other in topology.adjacency[node]),
    )


def topology_to_dict(topology: Topology) -> dict[str, Any]:
    """JSON-ready form; adjacency is rebuilt from positions on load."""
    return {
        'n': topology.n,
        'channels': topology.channels,
        'radius': topology.radius,
        'area_side': topology.area_side,
        'positions': [list(p) for p in topology.positions],
        'acs': [sorted(node_acs) for node_acs in topology.acs],
        'pr_assignment': list(topology.pr_assignment),
        'mean_degree': round(topology.mean_degree(), 6),
        'connected': topology.is_connected(),
    }


def topology_from_dict(data: dict[str, Any]) -> Topology:
    try:
        return Topology.from_positions(
            data['positions'],
            data['radius'],
            data['acs'],
            data['channels'],
            pr_assignment=data.get('pr_assignment'),
            area_side=data.get('area_side'),
        )
    except KeyError as e:
        raise InvalidConfigError(f"topology data lacks field {e.args[0]!r}") from e


def save_topology(topology: Topology, path: Path) -> None:
    """Write a topology as JSON."""
    with open(path, 'w', encoding='utf-8') as f:
        json.dump(topology_to_dict(topology), f, indent=2)


def load_topology(path: Path) -> Topology:
    """Read a topology written by save_topology."""
    try:
        with open(path, encoding='utf-8') as f:
            data = json.load(f)
    except (OSError, json.JSONDecodeError) as e:
        raise InvalidConfigError(f"could not load topology from {path}: {e}") from e
    return topology_from_dict(data)
