"""
Configuration constants and the experiment configuration for the CRN simulator.
"""

import json
import os
from dataclasses import asdict, dataclass, fields, replace
from pathlib import Path
from typing import Any

from .errors import InvalidConfigError
from .topology import ttl_for

# Strategy kinds
STRATEGY_SURF = "SURF"
STRATEGY_RD = "RD"
STRATEGY_SB = "SB"
STRATEGY_CA = "CA"
VALID_STRATEGIES = [STRATEGY_SURF, STRATEGY_RD, STRATEGY_SB, STRATEGY_CA]

# CR occupancy modes
OCCUPANCY_NORMALIZED = "normalized"
OCCUPANCY_LITERAL = "literal"
VALID_OCCUPANCY_MODES = [OCCUPANCY_NORMALIZED, OCCUPANCY_LITERAL]

TTL_AUTO = "auto"

# Scenario defaults (Ch=5 campaign)
DEFAULT_N_CR = 70
DEFAULT_N_PR = 30
DEFAULT_TAU_T = 6
DEFAULT_RADIUS = 250.0
DEFAULT_AREA_SIDE = 707.0
DEFAULT_RUNS = 1000
DEFAULT_MASTER_SEED = 1
DEFAULT_ACTIVITY_PROB = 0.5
DEFAULT_TIE_TOLERANCE = 1e-9
DEFAULT_MAX_TOPOLOGY_ATTEMPTS = 100

# Channel count, Acs size and tenancy factor travel together
SCENARIO_PRESETS: dict[str, dict[str, int]] = {
    "ch5": {"channels": 5, "acs_size": 3, "beta": 10},
    "ch15": {"channels": 15, "acs_size": 8, "beta": 18},
}
DEFAULT_PRESET = "ch5"

# Worker pool
THREADS_ENV_VAR = "CRNSIM_THREADS"
DEFAULT_THREADS = 1

# Normal-approximation confidence interval
CI95_Z = 1.96

# Output files and their column order
HOPS_CSV = "hops.csv"
DELIVERY_CSV = "delivery.csv"
SUMMARY_CSV = "summary.csv"
BETA_SWEEP_CSV = "beta_sweep.csv"
HOPS_COLUMNS = ["strategy", "channels", "beta", "hop", "mean_acc_receivers", "ci95"]
DELIVERY_COLUMNS = ["strategy", "channels", "beta", "node_id", "delivery_ratio", "ci95"]
SUMMARY_COLUMNS = [
    "strategy", "channels", "beta", "runs", "mean_tx_per_node", "pct_nodes_reached", "ci95",
]
BETA_SWEEP_COLUMNS = ["beta", "pct_nodes_reached", "collision_rate", "ci95"]
CSV_FLOAT_FORMAT = "%.6f"
CSV_MISSING = "NA"

TRACE_FILE_TEMPLATE = "traces_{strategy}.jsonl"

_INT_FIELDS = ("n_cr", "n_pr", "channels", "acs_size", "beta", "tau_t", "runs",
               "master_seed", "max_topology_attempts")
_FLOAT_FIELDS = ("radius", "area_side", "activity_prob", "tie_tolerance")
_BOOL_FIELDS = ("require_connected", "dump_traces")


@dataclass(frozen=True)
class ExperimentConfig:
    """All parameters of one dissemination campaign."""
    n_cr: int = DEFAULT_N_CR
    n_pr: int = DEFAULT_N_PR
    channels: int = SCENARIO_PRESETS[DEFAULT_PRESET]["channels"]
    acs_size: int = SCENARIO_PRESETS[DEFAULT_PRESET]["acs_size"]
    beta: int = SCENARIO_PRESETS[DEFAULT_PRESET]["beta"]
    tau_t: int = DEFAULT_TAU_T
    radius: float = DEFAULT_RADIUS
    area_side: float = DEFAULT_AREA_SIDE
    ttl: int | str = TTL_AUTO
    runs: int = DEFAULT_RUNS
    master_seed: int = DEFAULT_MASTER_SEED
    strategies: tuple[str, ...] = tuple(VALID_STRATEGIES)
    activity_prob: float = DEFAULT_ACTIVITY_PROB
    occupancy_mode: str = OCCUPANCY_NORMALIZED
    preset: str = DEFAULT_PRESET
    require_connected: bool = False
    max_topology_attempts: int = DEFAULT_MAX_TOPOLOGY_ATTEMPTS
    tie_tolerance: float = DEFAULT_TIE_TOLERANCE
    dump_traces: bool = False

    def __post_init__(self):
        self.validate()

    @classmethod
    def from_dict(cls, data: dict[str, Any]) -> "ExperimentConfig":
        """
        Build a validated config from a plain mapping.

        A "preset" key fills channels, acs_size and beta; explicit keys override it.
        """
        known = {f.name for f in fields(cls)}
        unknown = sorted(set(data) - known)
        if unknown:
            raise InvalidConfigError(f"unknown config key(s): {', '.join(unknown)}")

        preset = data.get("preset", DEFAULT_PRESET)
        if preset not in SCENARIO_PRESETS:
            raise InvalidConfigError(
                f"preset must be one of {sorted(SCENARIO_PRESETS)}, got {preset!r}"
            )

        values: dict[str, Any] = {**SCENARIO_PRESETS[preset], **data, "preset": preset}
        if "strategies" in values:
            values["strategies"] = parse_strategies(values["strategies"])

        return cls(**values)

    @classmethod
    def load(cls, path: Path) -> "ExperimentConfig":
        """Load a config from a JSON file."""
        try:
            with open(path, encoding='utf-8') as f:
                data = json.load(f)
        except FileNotFoundError as e:
            raise InvalidConfigError(f"config file not found: {path}") from e
        except json.JSONDecodeError as e:
            raise InvalidConfigError(f"config file {path} is not valid JSON: {e}") from e

        if not isinstance(data, dict):
            raise InvalidConfigError(f"config file {path} must hold a JSON object")
        return cls.from_dict(data)

    def with_overrides(self, **overrides: Any) -> "ExperimentConfig":
        """Return a validated copy with the given fields replaced (None values skipped)."""
        changes = {k: v for k, v in overrides.items() if v is not None}
        if "strategies" in changes:
            changes["strategies"] = parse_strategies(changes["strategies"])
        if "preset" in changes:
            preset = changes["preset"]
            if preset not in SCENARIO_PRESETS:
                raise InvalidConfigError(
                    f"preset must be one of {sorted(SCENARIO_PRESETS)}, got {preset!r}"
                )
            changes = {**SCENARIO_PRESETS[preset], **changes}
        return replace(self, **changes)

    def validate(self) -> None:
        """Raise InvalidConfigError on the first offending field."""
        for name in _INT_FIELDS:
            value = getattr(self, name)
            if isinstance(value, bool) or not isinstance(value, int):
                raise InvalidConfigError(f"{name} must be an integer, got {value!r}")
        for name in _FLOAT_FIELDS:
            value = getattr(self, name)
            if isinstance(value, bool) or not isinstance(value, (int, float)):
                raise InvalidConfigError(f"{name} must be a number, got {value!r}")
        for name in _BOOL_FIELDS:
            if not isinstance(getattr(self, name), bool):
                raise InvalidConfigError(f"{name} must be true or false")

        for name in ("n_cr", "channels", "acs_size", "beta", "tau_t", "runs",
                     "max_topology_attempts"):
            if getattr(self, name) < 1:
                raise InvalidConfigError(f"{name} must be positive, got {getattr(self, name)}")
        if self.n_pr < 0:
            raise InvalidConfigError(f"n_pr must be non-negative, got {self.n_pr}")
        if self.master_seed < 0:
            raise InvalidConfigError(f"master_seed must be non-negative, got {self.master_seed}")
        if self.acs_size > self.channels:
            raise InvalidConfigError(
                f"acs_size ({self.acs_size}) cannot exceed channels ({self.channels})"
            )
        if self.radius <= 0 or self.area_side <= 0:
            raise InvalidConfigError("radius and area_side must be positive")
        if not 0.0 <= self.activity_prob <= 1.0:
            raise InvalidConfigError(
                f"activity_prob must lie in [0, 1], got {self.activity_prob}"
            )
        if self.tie_tolerance < 0:
            raise InvalidConfigError("tie_tolerance must be non-negative")
        if self.occupancy_mode not in VALID_OCCUPANCY_MODES:
            raise InvalidConfigError(
                f"occupancy_mode must be one of {VALID_OCCUPANCY_MODES}, "
                f"got {self.occupancy_mode!r}"
            )
        if self.ttl != TTL_AUTO:
            if isinstance(self.ttl, bool) or not isinstance(self.ttl, int) or self.ttl < 0:
                raise InvalidConfigError(
                    f"ttl must be '{TTL_AUTO}' or a non-negative integer, got {self.ttl!r}"
                )
        parse_strategies(self.strategies)

    def resolved_ttl(self) -> int:
        """TTL as an integer, deriving it from the area and radius when set to auto."""
        if self.ttl == TTL_AUTO:
            return ttl_for(self.area_side, self.radius)
        return int(self.ttl)

    def to_dict(self) -> dict[str, Any]:
        """Plain JSON-ready representation."""
        data = asdict(self)
        data["strategies"] = list(self.strategies)
        return data


def parse_strategies(value: Any) -> tuple[str, ...]:
    """Normalize "SURF,RD" / ["surf", "rd"] into a validated tuple of strategy names."""
    if isinstance(value, str):
        items = [part.strip() for part in value.split(',') if part.strip()]
    elif isinstance(value, (list, tuple)):
        items = [str(part).strip() for part in value]
    else:
        raise InvalidConfigError("strategies must be a list or comma-separated string")

    names = tuple(item.upper() for item in items)
    if not names:
        raise InvalidConfigError("at least one strategy is required")
    bad = [name for name in names if name not in VALID_STRATEGIES]
    if bad:
        raise InvalidConfigError(
            f"unknown strategy {bad[0]!r}; choose from {','.join(VALID_STRATEGIES)}"
        )
    if len(set(names)) != len(names):
        raise InvalidConfigError("strategies must not repeat")
    return names


def parse_betas(value: str) -> list[int]:
    """Parse a comma-separated list of positive tenancy factors."""
    parts = [part.strip() for part in value.split(',') if part.strip()]
    if not parts:
        raise InvalidConfigError("beta list must not be empty")
    try:
        betas = [int(part) for part in parts]
    except ValueError as e:
        raise InvalidConfigError(f"beta values must be integers: {value!r}") from e
    if any(beta < 1 for beta in betas):
        raise InvalidConfigError("beta values must be positive")
    return betas


def resolve_threads(cli_value: int | None) -> int:
    """Worker count from the CLI flag, falling back to CRNSIM_THREADS, then 1."""
    if cli_value is not None:
        threads = cli_value
    else:
        raw = os.environ.get(THREADS_ENV_VAR)
        if raw is None or not raw.strip():
            return DEFAULT_THREADS
        try:
            threads = int(raw)
        except ValueError as e:
            raise InvalidConfigError(f"{THREADS_ENV_VAR} must be an integer, got {raw!r}") from e
    if threads < 1:
        raise InvalidConfigError(f"thread count must be positive, got {threads}")
    return threads
