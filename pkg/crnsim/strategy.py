"""
Channel-selection strategies.

SURF weighs every channel in the node's Acs by P_w = exp(-PR_o) * CR_o, where CR_o
scores how close the channel's competing CR neighbor count is to the tenancy factor
beta, and picks the heaviest channel. RD picks uniformly. SB transmits on a greedy
essential channel set and listens on one random channel; CA transmits the same way but
listens on its whole Acs.
"""

import math
from dataclasses import dataclass
from enum import StrEnum

import numpy as np

from .config import (
    DEFAULT_TIE_TOLERANCE,
    OCCUPANCY_LITERAL,
    OCCUPANCY_NORMALIZED,
    STRATEGY_CA,
    STRATEGY_RD,
    STRATEGY_SB,
    STRATEGY_SURF,
)
from .errors import InvalidConfigError, NoChannelError, SpectrumDomainError
from .spectrum import ChannelView
from .topology import NodeView


class StrategyKind(StrEnum):
    SURF = STRATEGY_SURF
    RD = STRATEGY_RD
    SB = STRATEGY_SB
    CA = STRATEGY_CA


class OccupancyMode(StrEnum):
    NORMALIZED = OCCUPANCY_NORMALIZED
    LITERAL = OCCUPANCY_LITERAL


@dataclass(frozen=True)
class StrategyConfig:
    """Which strategy a run uses and how SURF scores channels."""
    kind: StrategyKind
    beta: int
    occupancy_mode: OccupancyMode = OccupancyMode.NORMALIZED
    tie_tolerance: float = DEFAULT_TIE_TOLERANCE

    def __post_init__(self):
        try:
            object.__setattr__(self, 'kind', StrategyKind(self.kind))
            object.__setattr__(self, 'occupancy_mode', OccupancyMode(self.occupancy_mode))
        except ValueError as e:
            raise InvalidConfigError(str(e)) from e
        if isinstance(self.beta, bool) or not isinstance(self.beta, int) or self.beta < 1:
            raise InvalidConfigError(f"beta must be a positive integer, got {self.beta!r}")
        if self.tie_tolerance < 0:
            raise InvalidConfigError("tie tolerance must be non-negative")


@dataclass(frozen=True)
class ChannelDecision:
    """Channels a node sends on and listens on for one hop."""
    tx_channels: tuple[int, ...]
    rx_channels: tuple[int, ...]


@dataclass(frozen=True)
class WeightedChannel:
    channel_id: int
    p_w: float
    pr_occupancy: float
    cr_occupancy: float


def cr_occupancy(
    cr_n: int,
    beta: int,
    tau_a: int,
    tau_t: int,
    cr_as: float,
    mode: OccupancyMode = OccupancyMode.NORMALIZED
) -> float:
    """
    CR occupancy score of a channel.

    Below beta the score grows as the neighbor count approaches beta, at beta it is
    CR_as, above beta it decays with the count. Normalized mode measures free slots as a
    fraction of the frame (A = tau_a / tau_t) so all three branches are fractions;
    literal mode uses the raw slot count.
    """
    if tau_t < 1:
        raise SpectrumDomainError(f"tau_t must be at least 1, got {tau_t}")
    if not 0 <= tau_a <= tau_t:
        raise SpectrumDomainError(f"tau_a must lie in [0, {tau_t}], got {tau_a}")
    if cr_n < 0:
        raise SpectrumDomainError(f"CR neighbor count must be non-negative, got {cr_n}")

    if OccupancyMode(mode) is OccupancyMode.NORMALIZED:
        available = tau_a / tau_t
        frame_scale = 1
    else:
        available = float(tau_a)
        frame_scale = tau_t

    if cr_n < beta:
        return available / (beta - cr_n)
    if cr_n == beta:
        return cr_as
    return available / (frame_scale * cr_n)


def surf_weight(pr_o: float, cr_o: float) -> float:
    """Availability level P_w = exp(-PR_o) * CR_o."""
    if not 0.0 <= pr_o <= 1.0:
        raise SpectrumDomainError(f"PR occupancy must lie in [0, 1], got {pr_o}")
    if cr_o < 0:
        raise SpectrumDomainError(f"CR occupancy must be non-negative, got {cr_o}")
    return math.exp(-pr_o) * cr_o


def weigh_channels(views: list[ChannelView], cfg: StrategyConfig) -> list[WeightedChannel]:
    """Score each view: CR occupancy first, then P_w."""
    weighted = []
    for view in views:
        cr_o = cr_occupancy(
            view.cr_neighbors,
            cfg.beta,
            view.available_slots,
            view.total_slots,
            view.cr_available_share,
            cfg.occupancy_mode,
        )
        weighted.append(WeightedChannel(
            channel_id=view.channel_id,
            p_w=surf_weight(view.pr_occupancy, cr_o),
            pr_occupancy=view.pr_occupancy,
            cr_occupancy=cr_o,
        ))
    return weighted


def select_weighted(
    weighted: list[WeightedChannel],
    rng: np.random.Generator,
    tolerance: float = DEFAULT_TIE_TOLERANCE
) -> int:
    """
    Pick the heaviest channel. Equal weights (relative tolerance) fall back to the lower
    PR occupancy, then to a uniform draw among what is left.
    """
    if not weighted:
        raise NoChannelError("no channel to select from")

    best = max(w.p_w for w in weighted)
    heaviest = [w for w in weighted if math.isclose(w.p_w, best, rel_tol=tolerance)]
    if len(heaviest) == 1:
        return heaviest[0].channel_id

    lowest_pr = min(w.pr_occupancy for w in heaviest)
    remaining = sorted(
        w.channel_id for w in heaviest
        if math.isclose(w.pr_occupancy, lowest_pr, rel_tol=tolerance)
    )
    if len(remaining) == 1:
        return remaining[0]
    return remaining[int(rng.integers(len(remaining)))]


def surf_select(views: list[ChannelView], cfg: StrategyConfig, rng: np.random.Generator) -> int:
    if not views:
        raise NoChannelError("SURF needs at least one channel view")
    ids = [view.channel_id for view in views]
    if len(set(ids)) != len(ids):
        raise SpectrumDomainError(f"duplicate channel ids in views: {ids}")
    return select_weighted(weigh_channels(views, cfg), rng, cfg.tie_tolerance)


def rd_select(acs, rng: np.random.Generator) -> int:
    """Uniformly random member of the channel set."""
    channels = sorted(acs)
    if not channels:
        raise NoChannelError("cannot pick a random channel from an empty Acs")
    return channels[int(rng.integers(len(channels)))]


def essential_channel_set(own_acs, neighbor_acs) -> frozenset[int]:
    """
    Greedy set cover: the fewest own channels (approximately) such that every neighbor
    sharing at least one channel with us can be reached on one of them.

    Each step takes the channel covering the most still-uncovered neighbors, lowest
    channel id on ties.
    """
    own = sorted(own_acs)
    uncovered = [frozenset(acs) for acs in neighbor_acs if not frozenset(acs).isdisjoint(own)]
    chosen: set[int] = set()

    while uncovered:
        best_channel, best_count = None, 0
        for channel in own:
            count = sum(1 for acs in uncovered if channel in acs)
            if count > best_count:
                best_channel, best_count = channel, count
        chosen.add(best_channel)
        uncovered = [acs for acs in uncovered if best_channel not in acs]

    return frozenset(chosen)


def uncoverable_neighbors(own_acs, neighbor_acs) -> list[int]:
    """Indices of neighbors sharing no channel with own_acs."""
    own = frozenset(own_acs)
    return [i for i, acs in enumerate(neighbor_acs) if own.isdisjoint(acs)]


def decide(
    kind: StrategyKind,
    view: NodeView,
    cfg: StrategyConfig,
    rng: np.random.Generator
) -> ChannelDecision:
    """Channels a node would send and listen on this hop under the given strategy."""
    kind = StrategyKind(kind)

    if kind is StrategyKind.SURF:
        channel = surf_select(view.views(), cfg, rng)
        return ChannelDecision(tx_channels=(channel,), rx_channels=(channel,))

    if kind is StrategyKind.RD:
        tx = rd_select(view.acs, rng)
        rx = rd_select(view.acs, rng)
        return ChannelDecision(tx_channels=(tx,), rx_channels=(rx,))

    ecs = tuple(sorted(essential_channel_set(view.acs, view.neighbor_acs)))
    if kind is StrategyKind.SB:
        return ChannelDecision(tx_channels=ecs, rx_channels=(rd_select(view.acs, rng),))
    return ChannelDecision(tx_channels=ecs, rx_channels=tuple(sorted(view.acs)))
