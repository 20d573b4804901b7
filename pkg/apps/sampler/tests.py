import numpy as np
from django.test import SimpleTestCase
from scipy import stats
from scipy.sparse import csr_matrix
from scipy.sparse.csgraph import shortest_path

from apps.graphgen.distributions import power_law_distribution, sample_degree_sequence
from apps.graphgen.graph import Graph, configuration_model, giant_component

from .bfs import (
    bfs_tree,
    coupled_bfs,
    exploration_times,
    tree_degree_histogram,
    visibility_columns,
)
from .exceptions import SamplingError


def star(leaves):
    return Graph.from_edges(leaves + 1, [0] * leaves, list(range(1, leaves + 1)))


def random_graph(n, seed, simplify=True):
    dist = power_law_distribution(2.5, max(n - 1, 2))
    return configuration_model(sample_degree_sequence(dist, n, seed), seed, simplify)


def graph_distances(g, root):
    matrix = csr_matrix(
        (np.ones(g.indices.size), g.indices, g.indptr), shape=(g.n, g.n)
    )
    return shortest_path(matrix, unweighted=True, indices=root)


class BfsTreeTests(SimpleTestCase):
    def test_star_from_hub(self):
        tree = bfs_tree(star(5), root=0, seed=1)
        self.assertEqual(tree.tree_degree.tolist(), [5, 1, 1, 1, 1, 1])
        self.assertEqual(tree_degree_histogram(tree), {1: 5, 5: 1})

    def test_triangle_hides_one_edge(self):
        triangle = Graph.from_edges(3, [0, 1, 2], [1, 2, 0])
        for root in range(3):
            tree = bfs_tree(triangle, root, seed=root)
            self.assertEqual(tree.tree_degree[root], 2)
            self.assertEqual(sorted(tree.tree_degree.tolist()), [1, 1, 2])
            self.assertEqual(len(tree.edges()), 2)

    def test_path_samples_to_itself(self):
        path = Graph.from_edges(3, [0, 1], [1, 2])
        tree = bfs_tree(path, root=1, seed=0)
        self.assertEqual(tree.tree_degree.tolist(), path.degrees.tolist())
        self.assertEqual(tree_degree_histogram(bfs_tree(path, 0, 0)), {1: 2, 2: 1})

    def test_unknown_root(self):
        with self.assertRaises(SamplingError):
            bfs_tree(star(2), root=3, seed=0)

    def test_tree_invariants_on_random_graphs(self):
        for seed in range(40):
            g = random_graph(60 + seed, seed, simplify=seed % 2 == 0)
            root = seed % g.n
            tree = bfs_tree(g, root, seed)
            discovered = tree.discovered
            reachable = np.isfinite(graph_distances(g, root))

            self.assertEqual(tree.covered, int(reachable.sum()))
            np.testing.assert_array_equal(discovered, reachable)
            self.assertEqual(tree.parent[root], -1)
            self.assertTrue(np.all(tree.parent[discovered] >= -1))
            self.assertEqual(int(np.sum(tree.parent != -1)), tree.covered - 1)
            self.assertEqual(int(tree.tree_degree.sum()), 2 * (tree.covered - 1))
            self.assertTrue(np.all(tree.tree_degree <= g.degrees))
            self.assertEqual(
                sorted(tree.discovery_rank[discovered].tolist()),
                list(range(tree.covered)),
            )
            child = np.flatnonzero(tree.parent != -1)
            self.assertTrue(
                np.all(
                    tree.discovery_rank[child]
                    > tree.discovery_rank[tree.parent[child]]
                )
            )
            self.assertEqual(sum(tree_degree_histogram(tree).values()), tree.covered)

    def test_tree_is_a_shortest_path_tree(self):
        for seed in range(10):
            g = random_graph(200, seed)
            root = int(np.argmax(g.degrees))
            tree = bfs_tree(g, root, seed)
            distances = graph_distances(g, root)
            discovered = tree.discovered
            np.testing.assert_array_equal(tree.depth[discovered], distances[discovered])

    def test_layer_sizes_do_not_depend_on_seed(self):
        g = giant_component(random_graph(2000, 3))
        reference = bfs_tree(g, 0, seed=0).layer_sizes()
        for seed in range(1, 6):
            np.testing.assert_array_equal(bfs_tree(g, 0, seed).layer_sizes(), reference)

    def test_same_seed_same_tree(self):
        g = random_graph(500, 8)
        first, second = bfs_tree(g, 0, 99), bfs_tree(g, 0, 99)
        np.testing.assert_array_equal(first.parent, second.parent)


class CoupledBfsTests(SimpleTestCase):
    @classmethod
    def setUpClass(cls):
        super().setUpClass()
        cls.graph = giant_component(random_graph(20_000, 21))

    def test_records_respect_contract(self):
        tree, records = coupled_bfs(self.graph, 0, seed=5)
        self.assertEqual(len(records), tree.covered - 1)
        for record in records:
            self.assertGreaterEqual(record.time_index, 0.0)
            self.assertLessEqual(record.time_index, 1.0)
            self.assertGreaterEqual(record.visible_children, 0)
            self.assertLessEqual(record.visible_children, record.graph_degree - 1)

    def test_coupled_tree_matches_plain_tree(self):
        tree, _ = coupled_bfs(self.graph, 3, seed=17)
        np.testing.assert_array_equal(tree.parent, bfs_tree(self.graph, 3, 17).parent)

    def test_every_edge_is_matched_once(self):
        tree = bfs_tree(self.graph, 11, seed=2)
        self.assertEqual(tree.steps, self.graph.m)
        triangle = Graph.from_edges(3, [0, 1, 2], [1, 2, 0])
        self.assertEqual(bfs_tree(triangle, 0, seed=0).steps, 3)
        loop = Graph.from_edges(2, [0, 0, 0], [0, 1, 1])
        self.assertEqual(bfs_tree(loop, 0, seed=0).steps, 3)

    def test_time_falls_as_the_search_advances(self):
        tree = bfs_tree(self.graph, 4, seed=9)
        columns = visibility_columns(self.graph, tree, seed=9)
        order = np.argsort(tree.discovery_rank[columns["vertex"]])
        self.assertTrue(np.all(np.diff(columns["time_index"][order]) <= 0))
        np.testing.assert_array_equal(
            np.sort(tree.discovery_step[columns["vertex"]]),
            tree.discovery_step[columns["vertex"]][order],
        )

    def test_exploration_clock(self):
        times = exploration_times(stubs=1000, steps=500, seed=3)
        self.assertEqual(times.size, 500)
        self.assertTrue(np.all(np.diff(times) < 0))
        self.assertTrue(np.all((times > 0) & (times <= 1)))
        with self.assertRaises(SamplingError):
            exploration_times(stubs=10, steps=6, seed=3)

    def test_time_index_is_max_of_uniforms(self):
        # connected configuration multigraph: the exploration is exact here
        regular = configuration_model(np.full(3000, 5), seed=4, simplify=False)
        self.assertTrue(regular.connected)
        times = []
        for seed in range(4):
            tree = bfs_tree(regular, seed, seed)
            times.append(visibility_columns(regular, tree, seed)["time_index"])
        times = np.concatenate(times)
        self.assertGreater(times.size, 10_000)
        _, p_value = stats.kstest(times, lambda t: np.clip(t, 0, 1) ** 5)
        self.assertGreater(p_value, 0.001)

    def test_late_vertices_expose_fewer_children(self):
        frames = []
        for seed in range(20):
            tree = bfs_tree(self.graph, seed * 7, seed)
            columns = visibility_columns(self.graph, tree, seed)
            keep = columns["graph_degree"] >= 2
            frames.append(
                (
                    columns["time_index"][keep],
                    columns["visible_children"][keep]
                    / (columns["graph_degree"][keep] - 1),
                )
            )
        times = np.concatenate([t for t, _ in frames])
        ratios = np.concatenate([r for _, r in frames])
        bottom = ratios[times < 0.2].mean()
        top = ratios[times >= 0.8].mean()
        self.assertLessEqual(bottom, top)
