"""
One TTL-bounded dissemination run in synchronized hops.

Per hop: PR frames are redrawn, every node that received the message in the previous
hop transmits once per decided channel in a random free slot, every node still without
the message tunes to its receive channels, and receptions are resolved slot by slot.
"""

import logging
from collections import defaultdict
from dataclasses import dataclass, field

import numpy as np

from .config import DEFAULT_TAU_T
from .errors import InvalidConfigError, NoChannelError, SimulationError
from .spectrum import PrActivityModel, SlotFrame
from .strategy import StrategyConfig, decide
from .topology import Topology, node_view

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class Transmission:
    sender: int
    channel: int
    slot: int
    hop: int


@dataclass(frozen=True)
class ReceptionEvent:
    """listener decoded the copy sender put on (channel, slot)."""
    listener: int
    sender: int
    channel: int
    slot: int


@dataclass(frozen=True)
class Resolution:
    """Outcome of one hop's channel contention."""
    events: tuple[ReceptionEvent, ...]
    collisions: int
    interrupted: int


@dataclass(frozen=True)
class HopRecord:
    hop: int
    transmissions: tuple[Transmission, ...]
    receptions: tuple[ReceptionEvent, ...]
    new_receivers: frozenset[int]
    collisions: int
    interrupted: int
    # (sender, channel) pairs with no free slot left
    suppressed: tuple[tuple[int, int], ...]


@dataclass
class DisseminationTrace:
    """Everything that happened while one packet flooded the network."""
    source: int
    n: int
    ttl: int
    hops: list[HopRecord] = field(default_factory=list)
    tx_counts: dict[int, int] = field(default_factory=dict)

    @property
    def receivers_by_hop(self) -> list[frozenset[int]]:
        return [record.new_receivers for record in self.hops]

    @property
    def reached(self) -> frozenset[int]:
        """Nodes other than the source that got the message."""
        reached: set[int] = set()
        for receivers in self.receivers_by_hop:
            reached |= receivers
        return frozenset(reached)

    @property
    def collisions(self) -> int:
        return sum(record.collisions for record in self.hops)

    @property
    def receptions(self) -> int:
        return sum(len(record.receptions) for record in self.hops)

    @property
    def suppressed(self) -> int:
        return sum(len(record.suppressed) for record in self.hops)


def resolve_receptions(
    transmissions: list[Transmission],
    listeners: dict[int, frozenset[int]],
    topology: Topology,
    pr_frames: dict[int, SlotFrame]
) -> Resolution:
    """
    A listener decodes a copy iff the sender is in range, the listener is tuned to the
    channel, the slot is free of PR activity and no other in-range sender used the same
    channel and slot.

    Collisions and PR interruptions are counted per (listener, channel, slot) cell.
    """
    heard: dict[tuple[int, int, int], list[Transmission]] = defaultdict(list)
    for tx in transmissions:
        for listener in topology.neighbors(tx.sender):
            rx_channels = listeners.get(listener)
            if rx_channels is not None and tx.channel in rx_channels:
                heard[(listener, tx.channel, tx.slot)].append(tx)

    events = []
    collisions = 0
    interrupted = 0
    for (listener, channel, slot) in sorted(heard):
        frame = pr_frames.get(channel)
        if frame is None:
            raise SimulationError(f"no PR frame for channel {channel}")
        senders = heard[(listener, channel, slot)]
        if frame.is_occupied(slot):
            interrupted += 1
        elif len(senders) > 1:
            collisions += 1
        else:
            events.append(ReceptionEvent(listener, senders[0].sender, channel, slot))

    return Resolution(events=tuple(events), collisions=collisions, interrupted=interrupted)


def run_dissemination(
    topology: Topology,
    strategy_cfg: StrategyConfig,
    ttl: int,
    pr_model: PrActivityModel,
    rng: np.random.Generator,
    source: int | None = None,
    total_slots: int = DEFAULT_TAU_T,
    pr_rng: np.random.Generator | None = None
) -> DisseminationTrace:
    """
    Flood one packet from source for at most ttl hops.

    Args:
        topology: network to flood
        strategy_cfg: channel-selection strategy
        ttl: hop budget
        pr_model: PR activity redrawn every hop
        rng: stream for channel and slot draws
        source: originating node (default: uniform draw from rng)
        total_slots: slots per channel frame
        pr_rng: stream for PR frames (default: rng); sharing it across strategies gives
            every strategy the same PR activity

    Returns:
        DisseminationTrace of the run
    """
    if ttl < 0:
        raise InvalidConfigError(f"ttl must be non-negative, got {ttl}")
    if topology.n == 0:
        raise InvalidConfigError("cannot disseminate over an empty topology")
    if pr_rng is None:
        pr_rng = rng
    if source is None:
        source = int(rng.integers(topology.n))
    elif not 0 <= source < topology.n:
        raise InvalidConfigError(f"source {source} outside [0, {topology.n})")

    kind = strategy_cfg.kind
    trace = DisseminationTrace(source=source, n=topology.n, ttl=ttl)
    holders = {source}
    pending = [source]

    for hop in range(1, ttl + 1):
        if not pending:
            break

        frames = pr_model.draw_frames(total_slots, pr_rng)

        transmissions = []
        suppressed = []
        for node in pending:
            decision = _decide_or_none(kind, topology, node, frames, strategy_cfg, rng)
            if decision is None:
                continue
            for channel in decision.tx_channels:
                trace.tx_counts[node] = trace.tx_counts.get(node, 0) + 1
                free = frames[channel].free_slots()
                if not free:
                    suppressed.append((node, channel))
                    continue
                slot = free[int(rng.integers(len(free)))]
                transmissions.append(Transmission(node, channel, slot, hop))

        listeners = {}
        for node in range(topology.n):
            if node in holders:
                continue
            decision = _decide_or_none(kind, topology, node, frames, strategy_cfg, rng)
            if decision is not None:
                listeners[node] = frozenset(decision.rx_channels)

        resolution = resolve_receptions(transmissions, listeners, topology, frames)
        new_receivers = frozenset(event.listener for event in resolution.events)
        holders |= new_receivers
        pending = sorted(new_receivers)

        trace.hops.append(HopRecord(
            hop=hop,
            transmissions=tuple(transmissions),
            receptions=resolution.events,
            new_receivers=new_receivers,
            collisions=resolution.collisions,
            interrupted=resolution.interrupted,
            suppressed=tuple(suppressed),
        ))
        logger.debug(
            "hop %d: %d tx, %d new receivers, %d collisions, %d interrupted, %d suppressed",
            hop, len(transmissions), len(new_receivers), resolution.collisions,
            resolution.interrupted, len(suppressed),
        )

    return trace


def _decide_or_none(kind, topology, node, frames, cfg, rng):
    try:
        return decide(kind, node_view(topology, node, frames), cfg, rng)
    except NoChannelError as e:
        logger.debug("node %d stays idle: %s", node, e)
        return None
