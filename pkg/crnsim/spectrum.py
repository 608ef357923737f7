"""
Slotted channels, PR activity and the availability quantities every strategy reads.

Each channel is divided into total_slots time slots; PR activity occupies some of them
for one dissemination round. PR_o is the occupied fraction, tau_a the free slot count
and CR_as = 1 - PR_o the share left for CR nodes.
"""

from dataclasses import dataclass, field

import numpy as np

from .errors import InvalidConfigError, SpectrumDomainError


@dataclass(frozen=True)
class SlotFrame:
    """PR occupancy of one channel's slots during one round."""
    total_slots: int
    occupied: frozenset[int] = field(default_factory=frozenset)

    def __post_init__(self):
        if self.total_slots < 0:
            raise InvalidConfigError(f"total_slots must be non-negative, got {self.total_slots}")
        object.__setattr__(self, 'occupied', frozenset(int(s) for s in self.occupied))
        bad = [s for s in self.occupied if not 0 <= s < self.total_slots]
        if bad:
            raise InvalidConfigError(
                f"slot index {min(bad)} outside [0, {self.total_slots})"
            )

    @property
    def occupied_slots(self) -> int:
        """tau_o"""
        return len(self.occupied)

    @property
    def available_slots(self) -> int:
        """tau_a"""
        return self.total_slots - len(self.occupied)

    def free_slots(self) -> list[int]:
        """Free slot indices in ascending order."""
        return [s for s in range(self.total_slots) if s not in self.occupied]

    def is_occupied(self, slot: int) -> bool:
        return slot in self.occupied


@dataclass(frozen=True)
class ChannelView:
    """One CR node's local knowledge of one channel."""
    channel_id: int
    pr_occupancy: float
    available_slots: int
    cr_available_share: float
    cr_neighbors: int
    total_slots: int

    @classmethod
    def from_frame(cls, channel_id: int, frame: SlotFrame, cr_neighbors: int) -> "ChannelView":
        """Derive PR_o, tau_a and CR_as from a realized frame."""
        pr_o = pr_occupancy(frame)
        return cls(
            channel_id=channel_id,
            pr_occupancy=pr_o,
            available_slots=frame.available_slots,
            cr_available_share=cr_available_share(pr_o),
            cr_neighbors=cr_neighbors,
            total_slots=frame.total_slots,
        )


@dataclass(frozen=True)
class PrActivityModel:
    """
    Stochastic PR traffic: every PR node is active in a round with probability
    activity_probability and then occupies one uniformly chosen slot.

    pr_nodes_per_channel[c] is the number of PR nodes bound to channel c.
    """
    activity_probability: float
    pr_nodes_per_channel: tuple[int, ...]

    def __post_init__(self):
        if not 0.0 <= self.activity_probability <= 1.0:
            raise InvalidConfigError(
                f"activity probability must lie in [0, 1], got {self.activity_probability}"
            )
        if any(count < 0 for count in self.pr_nodes_per_channel):
            raise InvalidConfigError("PR node counts must be non-negative")

    def draw_frames(self, total_slots: int, rng: np.random.Generator) -> dict[int, SlotFrame]:
        """Draw one round of frames, channel by channel in ascending id order."""
        return {
            channel: generate_pr_activity(count, total_slots, self.activity_probability, rng)
            for channel, count in enumerate(self.pr_nodes_per_channel)
        }


def pr_occupancy(frame: SlotFrame) -> float:
    """Fraction of the frame's slots occupied by PR activity."""
    if frame.total_slots == 0:
        raise InvalidConfigError("cannot compute PR occupancy of a frame with zero slots")
    return frame.occupied_slots / frame.total_slots


def cr_available_share(pr_occupancy: float) -> float:
    """Spectrum share left to CR nodes, 1 - PR_o."""
    if not 0.0 <= pr_occupancy <= 1.0:
        raise SpectrumDomainError(f"PR occupancy must lie in [0, 1], got {pr_occupancy}")
    return 1.0 - pr_occupancy


def generate_pr_activity(
    pr_count: int,
    total_slots: int,
    activity_probability: float,
    rng: np.random.Generator
) -> SlotFrame:
    """
    Realize one round of PR occupancy on a channel.

    Two active PR nodes picking the same slot occupy it once.
    """
    if pr_count <= 0 or total_slots <= 0:
        return SlotFrame(total_slots=max(total_slots, 0))

    active = int(np.count_nonzero(rng.random(pr_count) < activity_probability))
    if active == 0:
        return SlotFrame(total_slots=total_slots)

    slots = rng.integers(0, total_slots, size=active)
    return SlotFrame(total_slots=total_slots, occupied=frozenset(slots.tolist()))
