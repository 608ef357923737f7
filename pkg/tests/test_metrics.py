"""Tests for the metrics module."""

import numpy as np
import pandas as pd
import pytest

from crnsim.engine import DisseminationTrace, HopRecord, run_dissemination
from crnsim.errors import InsufficientSamplesError
from crnsim.metrics import (
    accumulative_receivers,
    aggregate,
    ci95,
    collision_rate,
    delivery_ratio,
    delivery_table,
    hops_table,
    mean_tx_per_node,
    summary_table,
    write_csv,
)
from crnsim.spectrum import PrActivityModel
from crnsim.strategy import StrategyConfig
from crnsim.topology import Topology


def hop(number, receivers, collisions=0):
    return HopRecord(
        hop=number,
        transmissions=(),
        receptions=(),
        new_receivers=frozenset(receivers),
        collisions=collisions,
        interrupted=0,
        suppressed=(),
    )


def make_trace(source, n, receivers_by_hop, ttl=6, tx_counts=None):
    return DisseminationTrace(
        source=source,
        n=n,
        ttl=ttl,
        hops=[hop(i + 1, r) for i, r in enumerate(receivers_by_hop)],
        tx_counts=tx_counts or {},
    )


@pytest.fixture
def traces():
    """Four runs over five nodes, always from node 0."""
    return [
        make_trace(0, 5, [{1, 2}, {3}], tx_counts={0: 1, 1: 1, 2: 1}),
        make_trace(0, 5, [{1}], tx_counts={0: 1, 1: 1}),
        make_trace(0, 5, [{1, 2}, {3, 4}], tx_counts={0: 2, 1: 1, 2: 3}),
        make_trace(0, 5, [], tx_counts={0: 1}),
    ]


class TestAccumulativeReceivers:
    """Tests for the per-hop receiver curve."""

    def test_running_total(self):
        trace = make_trace(0, 4, [{1, 2}, {3}], ttl=2)
        assert accumulative_receivers(trace) == [2, 3]

    def test_padded_to_ttl(self):
        trace = make_trace(0, 4, [{1, 2}, {3}])
        assert accumulative_receivers(trace) == [2, 3, 3, 3, 3, 3]

    def test_cut_to_shorter_ttl(self):
        """Test an explicit ttl below the trace length keeps only the first ttl hops."""
        trace = make_trace(0, 5, [{1}, {2}, {3}])
        assert accumulative_receivers(trace, ttl=2) == [1, 2]
        assert accumulative_receivers(trace, ttl=0) == []

    def test_nothing_received(self):
        assert accumulative_receivers(make_trace(0, 4, [], ttl=3)) == [0, 0, 0]

    def test_monotone(self, traces):
        for trace in traces:
            curve = accumulative_receivers(trace)
            assert all(a <= b for a, b in zip(curve, curve[1:]))


class TestDeliveryRatio:
    """Tests for delivery_ratio."""

    def test_three_of_four(self):
        runs = [make_trace(0, 2, r) for r in ([{1}], [{1}], [{1}], [])]
        assert delivery_ratio(runs, 2) == [None, 0.75]

    def test_source_every_run_is_none(self, traces):
        ratios = delivery_ratio(traces, 5)
        assert ratios[0] is None
        assert ratios[1] == pytest.approx(0.75)
        assert ratios[4] == pytest.approx(0.25)

    def test_no_traces(self):
        with pytest.raises(InsufficientSamplesError):
            delivery_ratio([], 3)

    def test_matches_mean_final_receivers(self, traces):
        """Test mean per-node delivery equals mean reached share with a fixed source."""
        ratios = [r for r in delivery_ratio(traces, 5) if r is not None]
        final = [accumulative_receivers(t)[-1] / 4 for t in traces]
        assert np.mean(ratios) == pytest.approx(np.mean(final))


class TestCi95:
    """Tests for the normal-approximation interval."""

    def test_constant_samples(self):
        assert ci95([0.5, 0.5, 0.5]) == (0.5, 0.0)

    def test_alternating_samples(self):
        mean, half_width = ci95([0, 1, 0, 1])
        assert mean == 0.5
        assert half_width == pytest.approx(0.565803, abs=1e-6)

    def test_single_sample(self):
        with pytest.raises(InsufficientSamplesError):
            ci95([1.0])

    def test_shrinks_with_sample_size(self):
        """Test quadrupling the samples halves the interval."""
        rng = np.random.default_rng(6)
        _, small = ci95(rng.random(2500) < 0.5)
        _, large = ci95(rng.random(10_000) < 0.5)
        assert small / large == pytest.approx(2.0, rel=0.05)


class TestRunMetrics:
    """Tests for collision rate and transmissions per node."""

    def test_collision_rate(self):
        trace = DisseminationTrace(source=0, n=3, ttl=1, hops=[hop(1, set(), collisions=1)])
        assert collision_rate(trace) == 1.0

    def test_collision_rate_idle(self):
        assert collision_rate(make_trace(0, 3, [])) == 0.0

    def test_mean_tx_per_node(self, traces):
        assert mean_tx_per_node(traces) == pytest.approx(12 / 9)

    def test_mean_tx_without_transmitters(self):
        assert mean_tx_per_node([make_trace(0, 3, [])]) == 0.0


class TestAggregate:
    """Tests for aggregate and the CSV tables."""

    def test_summary_values(self, traces):
        result = aggregate(traces, "CA", 5, 10, 6)
        assert result.runs == 4
        assert len(result.hop_mean) == 6
        assert result.hop_mean[0] == pytest.approx(5 / 4)
        assert result.hop_mean[-1] == pytest.approx(2.0)
        assert result.reached_fraction == pytest.approx(0.5)
        assert result.delivery[0] is None
        assert result.delivery_ci[0] is None

    def test_line_ca_always_delivers(self):
        topology = Topology.from_positions(
            [(i * 100.0, 0.0) for i in range(4)], 150.0, [{0}] * 4, 1
        )
        runs = [
            run_dissemination(topology, StrategyConfig("CA", 10), 6, PrActivityModel(0.5, (0,)),
                              np.random.default_rng(seed), source=0)
            for seed in range(5)
        ]
        result = aggregate(runs, "CA", 1, 10, 6)
        assert result.delivery == (None, 1.0, 1.0, 1.0)
        assert result.reached_fraction == 1.0

    def test_empty(self):
        with pytest.raises(InsufficientSamplesError):
            aggregate([], "CA", 5, 10, 6)

    def test_hops_csv(self, tmp_path, traces):
        path = tmp_path / "hops.csv"
        write_csv(hops_table([aggregate(traces, "SURF", 5, 10, 6)]), path)
        lines = path.read_text().splitlines()
        assert lines[0] == "strategy,channels,beta,hop,mean_acc_receivers,ci95"
        assert len(lines) == 7
        assert lines[1].startswith("SURF,5,10,1,1.250000,")

    def test_single_run_writes_na(self, tmp_path):
        result = aggregate([make_trace(0, 3, [{1}])], "RD", 5, 10, 2)
        path = tmp_path / "summary.csv"
        write_csv(summary_table([result]), path)
        lines = path.read_text().splitlines()
        assert lines[0] == "strategy,channels,beta,runs,mean_tx_per_node,pct_nodes_reached,ci95"
        assert lines[1] == "RD,5,10,1,0.000000,50.000000,NA"

    def test_delivery_table_rows(self, traces):
        table = delivery_table([aggregate(traces, "SB", 5, 10, 6)])
        assert list(table["node_id"]) == [0, 1, 2, 3, 4]
        assert pd.isna(table["delivery_ratio"][0])
