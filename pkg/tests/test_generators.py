import numpy as np
import pytest

from netflowdist.errors import InputError, ScenarioError, StateError
from netflowdist.generators import (
    BRIDGE_PARAMS,
    SbmParams,
    absent_bridges,
    add_bridges_variant,
    bridge_deletion_scenario,
    fixed_bridge_scenario,
    inter_block_edges,
    sample_sbm,
    two_block_params,
    two_sbm_scenario,
)
from netflowdist.graph import complete_graph, frobenius_laplacian_distance, hamming_distance, is_connected


def edge_set(g):
    return set(g.edges())


class TestSbmParams:
    @pytest.mark.parametrize(
        "sizes,probs",
        [
            ((), []),
            ((0, 3), [[0.5, 0.5], [0.5, 0.5]]),
            ((2, 2), [[0.5, 0.1], [0.2, 0.5]]),
            ((2, 2), [[1.5, 0.1], [0.1, 0.5]]),
            ((2,), [[0.5, 0.1], [0.1, 0.5]]),
        ],
    )
    def test_invalid(self, sizes, probs):
        with pytest.raises(InputError):
            SbmParams(sizes, probs)


class TestSampleSbm:
    def test_p_one_single_block(self):
        assert sample_sbm(SbmParams((6,), [[1.0]]), 3) == complete_graph(6)

    def test_all_zero(self):
        g = sample_sbm(two_block_params(0, 0, 0), 5)
        assert g.n_edges == 0

    def test_deterministic(self):
        p = two_block_params(0.5, 0.5, 0.2)
        assert sample_sbm(p, 11) == sample_sbm(p, 11)
        assert sample_sbm(p, 11) != sample_sbm(p, 12)

    def test_traversal_order(self):
        # first uniform variate decides pair (0, 1), the next (0, 2), ...
        p = SbmParams((4,), [[0.5]])
        u = np.random.Generator(np.random.PCG64(7)).random(6)
        iu, iv = np.triu_indices(4, 1)
        expected = {(int(a), int(b)) for a, b, x in zip(iu, iv, u) if x < 0.5}
        assert edge_set(sample_sbm(p, 7)) == expected

    def test_mean_edge_count(self):
        p = two_block_params(0.8, 0.8, 0.05)
        counts = np.array([sample_sbm(p, s).n_edges for s in range(1000)])
        mean = 0.8 * 45 * 2 + 0.05 * 100
        var = 90 * 0.8 * 0.2 + 100 * 0.05 * 0.95
        assert abs(counts.mean() - mean) <= 3 * np.sqrt(var / len(counts))


@pytest.fixture(scope="module", params=[0, 1, 7])
def bundle(request):
    return bridge_deletion_scenario(seed=request.param)


class TestBridgeDeletion:
    def test_shape(self, bundle):
        assert len(bundle) == 7
        assert all(g.n == 20 for g in bundle.graphs)
        assert bundle.labels == tuple(f"G{k}" for k in range(1, 8))
        assert bundle.ground_truth == (0, 1, 0, 0, 0, 1, 0)

    def test_parent(self, bundle):
        parent = bundle.graphs[0]
        assert is_connected(parent)
        assert len(inter_block_edges(parent, (10, 10))) == 2

    def test_children(self, bundle):
        parent = bundle.graphs[0]
        for k, child in enumerate(bundle.graphs[1:], start=2):
            removed = edge_set(parent) - edge_set(child)
            assert len(removed) == 1 and edge_set(child) <= edge_set(parent)
            assert hamming_distance(parent, child) == 1
            crossing = len(inter_block_edges(child, (10, 10)))
            assert crossing == (1 if k in (2, 6) else 2)
        # one bridge survives, so the bridge-deleted children stay connected
        assert is_connected(bundle.graphs[1]) and is_connected(bundle.graphs[5])

    def test_edits_are_vertex_disjoint(self, bundle):
        parent = bundle.graphs[0]
        removed = [next(iter(edge_set(parent) - edge_set(c))) for c in bundle.graphs[1:]]
        nodes = [x for e in removed for x in e]
        assert len(set(nodes)) == 12

    def test_exact_baselines(self, bundle):
        kids = bundle.graphs[1:]
        for i, a in enumerate(kids):
            for b in kids[i + 1:]:
                assert hamming_distance(a, b) == 2
                assert frobenius_laplacian_distance(a, b) == pytest.approx(2 * np.sqrt(2), abs=1e-12)

    def test_deterministic(self):
        a, b = bridge_deletion_scenario(seed=3), bridge_deletion_scenario(seed=3)
        assert a.graphs == b.graphs

    def test_wrong_block_count(self):
        with pytest.raises(InputError):
            bridge_deletion_scenario(SbmParams((20,), [[0.5]]))

    def test_budget_exhausted(self):
        with pytest.raises(ScenarioError):
            bridge_deletion_scenario(two_block_params(0.75, 0.6, 0.0), seed=0, max_attempts=5)


class TestAddBridges:
    def test_empty(self):
        b = bridge_deletion_scenario(seed=0)
        assert add_bridges_variant(b, []).graphs == b.graphs

    def test_adds_everywhere(self):
        b = bridge_deletion_scenario(seed=0)
        pairs = absent_bridges(b, 2)
        assert all(u + 10 == v for u, v in pairs)
        assert not any(g.has_edge(*pairs[0]) for g in b.graphs)
        out = add_bridges_variant(b, pairs[:1])
        for before, after in zip(b.graphs, out.graphs):
            assert len(inter_block_edges(after, (10, 10))) == len(inter_block_edges(before, (10, 10))) + 1
        assert out.labels == b.labels and out.ground_truth == b.ground_truth

    def test_existing_edge(self):
        b = bridge_deletion_scenario(seed=0)
        u, v = inter_block_edges(b.graphs[0], (10, 10))[0]
        with pytest.raises(StateError):
            add_bridges_variant(b, [(u, v)])

    def test_must_cross(self):
        with pytest.raises(InputError):
            add_bridges_variant(bridge_deletion_scenario(seed=0), [(0, 1)])


class TestFixedBridge:
    def test_p_zero(self):
        b = fixed_bridge_scenario(0.0, seed=1)
        for k, g in enumerate(b.graphs):
            nb = 5 if k < 10 else 10
            assert edge_set(g) == {(i, 10 + i) for i in range(nb)}

    def test_shape(self):
        b = fixed_bridge_scenario(0.8, seed=0)
        assert len(b) == 20 and all(g.n == 20 for g in b.graphs)
        assert b.ground_truth == (0,) * 10 + (1,) * 10

    def test_cross_group_hamming(self):
        b = fixed_bridge_scenario(0.8, seed=2)
        for g in b.graphs[:10]:
            for h in b.graphs[10:]:
                assert hamming_distance(g, h) >= 5
                bridge_diff = set(inter_block_edges(g, (10, 10))) ^ set(inter_block_edges(h, (10, 10)))
                assert len(bridge_diff) == 5

    def test_invalid_p(self):
        with pytest.raises(InputError):
            fixed_bridge_scenario(1.2)


class TestTwoSbm:
    def test_shape(self):
        b = two_sbm_scenario(0)
        assert len(b) == 20 and all(g.n == 20 for g in b.graphs)
        assert b.ground_truth == (0,) * 10 + (1,) * 10

    def test_determinism(self):
        assert two_sbm_scenario(4).graphs == two_sbm_scenario(4).graphs
        assert two_sbm_scenario(4).graphs != two_sbm_scenario(5).graphs

    def test_inter_block_means(self):
        g1, g2 = [], []
        for seed in range(60):
            b = two_sbm_scenario(seed)
            g1 += [len(inter_block_edges(g, (10, 10))) for g in b.graphs[:10]]
            g2 += [len(inter_block_edges(g, (10, 10))) for g in b.graphs[10:]]
        se1 = np.sqrt(100 * 0.05 * 0.95 / len(g1))
        se2 = np.sqrt(100 * 0.10 * 0.90 / len(g2))
        assert abs(np.mean(g1) - 5) <= 3 * se1
        assert abs(np.mean(g2) - 10) <= 3 * se2


def test_default_bridge_params():
    assert BRIDGE_PARAMS.block_sizes == (10, 10)
    np.testing.assert_array_equal(BRIDGE_PARAMS.link_probs, [[0.75, 0.04], [0.04, 0.6]])
