"""
Aggregation of dissemination traces into per-hop and per-node metrics with 95%
normal-approximation confidence intervals, and the CSV tables they are published in.
"""

import math
from dataclasses import dataclass
from pathlib import Path

import numpy as np
import pandas as pd

from .config import (
    BETA_SWEEP_COLUMNS,
    CI95_Z,
    CSV_FLOAT_FORMAT,
    CSV_MISSING,
    DELIVERY_COLUMNS,
    HOPS_COLUMNS,
    SUMMARY_COLUMNS,
)
from .engine import DisseminationTrace
from .errors import InsufficientSamplesError


@dataclass(frozen=True)
class ExperimentResult:
    """
    One strategy's campaign summary.

    CI half-widths are None when fewer than two samples exist; delivery entries are None
    for nodes that were the source in every run.
    """
    strategy: str
    channels: int
    beta: int
    runs: int
    n: int
    ttl: int
    hop_mean: tuple[float, ...]
    hop_ci: tuple[float | None, ...]
    delivery: tuple[float | None, ...]
    delivery_ci: tuple[float | None, ...]
    mean_tx_per_node: float
    reached_fraction: float
    reached_ci: float | None
    mean_collision_rate: float
    collision_rate_ci: float | None


def accumulative_receivers(trace: DisseminationTrace, ttl: int | None = None) -> list[int]:
    """
    Distinct non-source nodes reached by the end of each hop, padded with the last value
    or cut to exactly ttl entries (default: the trace's own ttl).
    """
    horizon = trace.ttl if ttl is None else ttl
    curve = []
    reached: set[int] = set()
    for receivers in trace.receivers_by_hop[:horizon]:
        reached |= receivers - {trace.source}
        curve.append(len(reached))

    last = curve[-1] if curve else 0
    curve.extend([last] * max(0, horizon - len(curve)))
    return curve


def delivery_samples(traces: list[DisseminationTrace], n: int) -> list[list[int]]:
    """Per node, one 0/1 sample per run in which the node was not the source."""
    samples: list[list[int]] = [[] for _ in range(n)]
    for trace in traces:
        reached = trace.reached
        for node in range(n):
            if node != trace.source:
                samples[node].append(1 if node in reached else 0)
    return samples


def delivery_ratio(traces: list[DisseminationTrace], n: int) -> list[float | None]:
    """Fraction of packets each node received, over packets it did not originate."""
    if not traces:
        raise InsufficientSamplesError("delivery ratio needs at least one trace")
    return [
        sum(node_samples) / len(node_samples) if node_samples else None
        for node_samples in delivery_samples(traces, n)
    ]


def ci95(samples) -> tuple[float, float]:
    """(mean, 1.96 * s / sqrt(n)) with s the sample standard deviation."""
    values = np.asarray(samples, dtype=float)
    if values.size < 2:
        raise InsufficientSamplesError(f"ci95 needs at least 2 samples, got {values.size}")
    mean = float(values.mean())
    half_width = CI95_Z * float(values.std(ddof=1)) / math.sqrt(values.size)
    return mean, half_width


def collision_rate(trace: DisseminationTrace) -> float:
    """Share of contended cells lost to collisions; 0 when nothing was heard."""
    contended = trace.collisions + trace.receptions
    return trace.collisions / contended if contended else 0.0


def mean_tx_per_node(traces: list[DisseminationTrace]) -> float:
    """Mean transmission attempts of nodes that transmitted at least once."""
    total = sum(sum(trace.tx_counts.values()) for trace in traces)
    transmitters = sum(len(trace.tx_counts) for trace in traces)
    return total / transmitters if transmitters else 0.0


def _mean_and_ci(samples) -> tuple[float, float | None]:
    if len(samples) == 0:
        return 0.0, None
    if len(samples) < 2:
        return float(samples[0]), None
    return ci95(samples)


def aggregate(
    traces: list[DisseminationTrace],
    strategy: str,
    channels: int,
    beta: int,
    ttl: int
) -> ExperimentResult:
    """Reduce one strategy's traces, in run order, to an ExperimentResult."""
    if not traces:
        raise InsufficientSamplesError("cannot aggregate an empty list of traces")
    n = traces[0].n

    curves = np.array([accumulative_receivers(trace, ttl) for trace in traces], dtype=float)
    hop_mean, hop_ci = [], []
    for hop in range(ttl):
        mean, half = _mean_and_ci(curves[:, hop])
        hop_mean.append(mean)
        hop_ci.append(half)

    delivery, delivery_ci = [], []
    for node_samples in delivery_samples(traces, n):
        if not node_samples:
            delivery.append(None)
            delivery_ci.append(None)
            continue
        mean, half = _mean_and_ci(node_samples)
        delivery.append(mean)
        delivery_ci.append(half)

    others = max(n - 1, 1)
    reached, reached_ci = _mean_and_ci([len(trace.reached) / others for trace in traces])
    rate, rate_ci = _mean_and_ci([collision_rate(trace) for trace in traces])

    return ExperimentResult(
        strategy=strategy,
        channels=channels,
        beta=beta,
        runs=len(traces),
        n=n,
        ttl=ttl,
        hop_mean=tuple(hop_mean),
        hop_ci=tuple(hop_ci),
        delivery=tuple(delivery),
        delivery_ci=tuple(delivery_ci),
        mean_tx_per_node=mean_tx_per_node(traces),
        reached_fraction=reached,
        reached_ci=reached_ci,
        mean_collision_rate=rate,
        collision_rate_ci=rate_ci,
    )


def _nan(value: float | None) -> float:
    return math.nan if value is None else float(value)


def _pct(value: float | None) -> float:
    return math.nan if value is None else 100.0 * value


def hops_table(results: list[ExperimentResult]) -> pd.DataFrame:
    rows = [
        (r.strategy, r.channels, r.beta, hop + 1, r.hop_mean[hop], _nan(r.hop_ci[hop]))
        for r in results
        for hop in range(r.ttl)
    ]
    return pd.DataFrame(rows, columns=HOPS_COLUMNS)


def delivery_table(results: list[ExperimentResult]) -> pd.DataFrame:
    rows = [
        (r.strategy, r.channels, r.beta, node, _nan(r.delivery[node]), _nan(r.delivery_ci[node]))
        for r in results
        for node in range(r.n)
    ]
    return pd.DataFrame(rows, columns=DELIVERY_COLUMNS)


def summary_table(results: list[ExperimentResult]) -> pd.DataFrame:
    """pct_nodes_reached and its ci95 are percentages of the N - 1 non-source nodes."""
    rows = [
        (r.strategy, r.channels, r.beta, r.runs, r.mean_tx_per_node,
         _pct(r.reached_fraction), _pct(r.reached_ci))
        for r in results
    ]
    return pd.DataFrame(rows, columns=SUMMARY_COLUMNS)


def beta_sweep_table(results: list[ExperimentResult]) -> pd.DataFrame:
    rows = [
        (r.beta, _pct(r.reached_fraction), r.mean_collision_rate, _pct(r.reached_ci))
        for r in results
    ]
    return pd.DataFrame(rows, columns=BETA_SWEEP_COLUMNS)


def write_csv(table: pd.DataFrame, path: Path) -> None:
    """Fixed float format, NA for missing values, LF line endings."""
    table.to_csv(
        path,
        index=False,
        float_format=CSV_FLOAT_FORMAT,
        na_rep=CSV_MISSING,
        lineterminator="\n",
    )
