"""Tests for the topology module."""

import math
from collections import Counter

import numpy as np
import pytest

from crnsim.errors import InvalidConfigError, SimulationError, SpectrumDomainError
from crnsim.spectrum import SlotFrame
from crnsim.topology import (
    Topology,
    cr_neighbor_count,
    generate,
    load_topology,
    node_view,
    save_topology,
    spread_pr_nodes,
    topology_from_dict,
    topology_to_dict,
    ttl_for,
)


@pytest.fixture
def ch5_topology():
    """Ch=5 scenario network."""
    return generate(
        n=70, area_side=707.0, radius=250.0, channels=5, acs_size=3, pr_count=30,
        rng=np.random.default_rng(5),
    )


@pytest.fixture
def small_topology():
    """Three nodes on a line, 100 m apart, R = 150 m."""
    return Topology.from_positions(
        [(0, 0), (100, 0), (200, 0)],
        radius=150.0,
        acs=[{0, 1}, {0, 2}, {1, 2}],
        channels=3,
        pr_assignment=(1, 1, 1),
    )


class TestGenerate:
    """Tests for random network generation."""

    def test_ch5_parameters(self, ch5_topology):
        """Test every node gets 3 channels and each channel gets 6 PR nodes."""
        assert ch5_topology.n == 70
        assert all(len(acs) == 3 for acs in ch5_topology.acs)
        assert all(acs <= set(range(5)) for acs in ch5_topology.acs)
        assert ch5_topology.pr_assignment == (6, 6, 6, 6, 6)
        assert ch5_topology.total_pr == 30

    def test_positions_inside_square(self, ch5_topology):
        for x, y in ch5_topology.positions:
            assert 0 <= x <= 707.0
            assert 0 <= y <= 707.0

    def test_single_node(self):
        topology = generate(1, 707.0, 250.0, 5, 3, 30, np.random.default_rng(0))
        assert topology.neighbors(0) == ()
        assert topology.mean_degree() == 0.0

    def test_symmetric_irreflexive(self, ch5_topology):
        for node in range(ch5_topology.n):
            assert node not in ch5_topology.neighbors(node)
            for other in ch5_topology.neighbors(node):
                assert ch5_topology.in_range(other, node)

    def test_deterministic(self):
        first = generate(30, 500.0, 200.0, 5, 3, 10, np.random.default_rng(3))
        second = generate(30, 500.0, 200.0, 5, 3, 10, np.random.default_rng(3))
        assert first == second

    def test_mean_degree_range(self):
        """Test the average neighbor count of the Ch=5 scenario."""
        rng = np.random.default_rng(11)
        degrees = [
            generate(70, 707.0, 250.0, 5, 3, 30, rng).mean_degree()
            for _ in range(50)
        ]
        assert 18 <= float(np.mean(degrees)) <= 28

    def test_acs_uniform(self):
        """Test each channel appears in about acs_size / channels of all Acs."""
        rng = np.random.default_rng(17)
        counts = Counter()
        nodes = 0
        for _ in range(100):
            topology = generate(100, 707.0, 250.0, 5, 3, 0, rng)
            nodes += topology.n
            for acs in topology.acs:
                counts.update(acs)
        for channel in range(5):
            assert counts[channel] / nodes == pytest.approx(0.6, abs=0.02)

    def test_acs_size_bounds(self):
        with pytest.raises(InvalidConfigError):
            generate(10, 707.0, 250.0, 5, 6, 30, np.random.default_rng(0))
        with pytest.raises(InvalidConfigError):
            generate(10, 707.0, 250.0, 5, 0, 30, np.random.default_rng(0))

    def test_require_connected(self):
        topology = generate(
            40, 707.0, 250.0, 5, 3, 30, np.random.default_rng(4),
            require_connected=True, max_attempts=200,
        )
        assert topology.is_connected()

    def test_require_connected_gives_up(self):
        """Test an unreachable connectivity demand fails with a config error."""
        with pytest.raises(InvalidConfigError, match="connected"):
            generate(
                20, 10_000.0, 1.0, 5, 3, 30, np.random.default_rng(0),
                require_connected=True, max_attempts=3,
            )


class TestDiskRule:
    """Tests for unit-disk adjacency."""

    def test_within_range(self):
        topology = Topology.from_positions([(0, 0), (200, 0)], 250.0, [{0}, {0}], 1)
        assert topology.in_range(0, 1)
        assert topology.neighbors(0) == (1,)

    def test_out_of_range(self):
        topology = Topology.from_positions([(0, 0), (300, 0)], 250.0, [{0}, {0}], 1)
        assert not topology.in_range(0, 1)
        assert topology.neighbors(1) == ()

    def test_boundary_included(self):
        """Test a node exactly R away is a neighbor."""
        topology = Topology.from_positions([(0, 0), (150, 200)], 250.0, [{0}, {0}], 1)
        assert topology.in_range(0, 1)

    def test_graph_view(self, small_topology):
        graph = small_topology.to_graph()
        assert sorted(graph.edges) == [(0, 1), (1, 2)]
        assert graph.nodes[2]['acs'] == [1, 2]
        assert small_topology.is_connected()


class TestSpreadPrNodes:
    """Tests for PR placement over channels."""

    def test_even(self):
        assert spread_pr_nodes(30, 15) == (2,) * 15

    def test_uneven(self):
        assert spread_pr_nodes(7, 3) == (3, 2, 2)

    def test_invalid(self):
        with pytest.raises(InvalidConfigError):
            spread_pr_nodes(5, 0)


class TestCrNeighborCount:
    """Tests for cr_neighbor_count."""

    def test_counts_channel_users(self, small_topology):
        assert cr_neighbor_count(small_topology, 1, 0) == 1
        assert cr_neighbor_count(small_topology, 1, 2) == 1
        assert cr_neighbor_count(small_topology, 0, 0) == 1
        assert cr_neighbor_count(small_topology, 0, 1) == 0

    def test_bounded_by_degree(self, ch5_topology):
        for node in range(ch5_topology.n):
            for channel in ch5_topology.acs[node]:
                count = cr_neighbor_count(ch5_topology, node, channel)
                assert 0 <= count <= len(ch5_topology.neighbors(node))

    def test_channel_outside_acs(self, small_topology):
        with pytest.raises(SpectrumDomainError):
            cr_neighbor_count(small_topology, 0, 2)


class TestTtlFor:
    """Tests for the hop budget."""

    @pytest.mark.parametrize("area_side,radius,expected", [
        (707.0, 250.0, 6),
        (500.0, 500.0, 2),
        (707.0, 707.0, 2),
    ])
    def test_values(self, area_side, radius, expected):
        assert ttl_for(area_side, radius) == expected

    def test_matches_ceiling(self):
        assert ttl_for(707.0, 250.0) == math.ceil(2 * 707.0 / 250.0)

    def test_zero_radius(self):
        with pytest.raises(InvalidConfigError):
            ttl_for(707.0, 0.0)


class TestNodeView:
    """Tests for node_view."""

    def test_views(self, small_topology):
        frames = {
            0: SlotFrame(6, {0, 1, 2}),
            1: SlotFrame(6),
            2: SlotFrame(6, {5}),
        }
        view = node_view(small_topology, 1, frames)
        assert view.acs == {0, 2}
        assert sorted(view.channel_views) == [0, 2]
        assert view.channel_views[0].pr_occupancy == pytest.approx(0.5)
        assert view.channel_views[0].available_slots == 3
        assert view.channel_views[2].cr_available_share == pytest.approx(5 / 6)
        assert view.channel_views[2].cr_neighbors == 1
        assert view.neighbor_acs == (frozenset({0, 1}), frozenset({1, 2}))

    def test_views_ordered(self, small_topology):
        frames = {c: SlotFrame(6) for c in range(3)}
        view = node_view(small_topology, 2, frames)
        assert [v.channel_id for v in view.views()] == [1, 2]

    def test_missing_frame(self, small_topology):
        with pytest.raises(SimulationError):
            node_view(small_topology, 0, {0: SlotFrame(6)})


class TestPersistence:
    """Tests for topology JSON files."""

    def test_dict_round_trip(self, ch5_topology):
        restored = topology_from_dict(topology_to_dict(ch5_topology))
        assert restored.adjacency == ch5_topology.adjacency
        assert restored.acs == ch5_topology.acs
        assert restored.pr_assignment == ch5_topology.pr_assignment

    def test_save_and_load(self, tmp_path, small_topology):
        path = tmp_path / "topology.json"
        save_topology(small_topology, path)
        assert load_topology(path) == small_topology

    def test_missing_field(self):
        with pytest.raises(InvalidConfigError, match="positions"):
            topology_from_dict({'radius': 1.0, 'acs': [], 'channels': 1})

    def test_unreadable_file(self, tmp_path):
        path = tmp_path / "broken.json"
        path.write_text("{not json")
        with pytest.raises(InvalidConfigError):
            load_topology(path)
