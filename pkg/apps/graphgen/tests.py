import tempfile
from pathlib import Path

import numpy as np
from django.test import SimpleTestCase
from scipy import stats

from .distributions import point_mass, power_law_distribution, sample_degree_sequence
from .edgelist import parse_edge_list, read_edge_list, write_edge_list, write_id_map
from .exceptions import DistributionError, EdgeListError, GraphError
from .graph import Graph, configuration_model, giant_component
from .seeding import derive_seed, make_rng


class PowerLawDistributionTests(SimpleTestCase):
    def test_masses_are_normalized(self):
        for gamma, k_max in [(2.5, 1000), (1.5, 50), (2.126, 2)]:
            dist = power_law_distribution(gamma, k_max)
            self.assertAlmostEqual(dist.masses.sum(), 1.0, delta=1e-9)
            self.assertEqual(dist.k_max, k_max)

    def test_masses_follow_the_power_law(self):
        dist = power_law_distribution(2.5, 100)
        expected = dist.normalization * np.arange(1, 101) ** -2.5
        np.testing.assert_allclose(dist.masses, expected, rtol=1e-12)

    def test_two_point_normalization(self):
        dist = power_law_distribution(2.5, 2)
        z = 1 + 2**-2.5
        self.assertAlmostEqual(dist.probabilities[1], 1 / z)
        self.assertAlmostEqual(dist.probabilities[2], 2**-2.5 / z)

    def test_large_cutoff_approaches_zeta_constants(self):
        dist = power_law_distribution(2.5, 1_000_000)
        self.assertAlmostEqual(dist.normalization, 0.7454, delta=5e-4)
        self.assertAlmostEqual(dist.mean, 1.947, delta=5e-3)

    def test_rejects_invalid_parameters(self):
        with self.assertRaises(DistributionError):
            power_law_distribution(1.0, 100)
        with self.assertRaises(DistributionError):
            power_law_distribution(2.5, 1)


class DegreeSequenceTests(SimpleTestCase):
    def test_point_mass(self):
        sequence = sample_degree_sequence(point_mass(3), 4, seed=1)
        self.assertEqual(sequence.tolist(), [3] * 4)

    def test_same_seed_same_sequence(self):
        dist = power_law_distribution(2.5, 1000)
        first = sample_degree_sequence(dist, 5000, seed=42)
        second = sample_degree_sequence(dist, 5000, seed=42)
        np.testing.assert_array_equal(first, second)

    def test_degree_sum_is_even(self):
        dist = power_law_distribution(2.5, 1000)
        for seed in range(20):
            self.assertEqual(sample_degree_sequence(dist, 101, seed).sum() % 2, 0)

    def test_odd_sum_repair_touches_one_vertex(self):
        # Three vertices of degree 1 always sum to 3.
        sequence = sample_degree_sequence(point_mass(1), 3, seed=5)
        self.assertEqual(sorted(sequence.tolist()), [1, 1, 2])

    def test_fraction_of_degree_one(self):
        n = 100_000
        dist = power_law_distribution(2.5, n - 1)
        sequence = sample_degree_sequence(dist, n, seed=3)
        self.assertAlmostEqual(np.mean(sequence == 1), dist.mass(1), delta=0.01)
        self.assertAlmostEqual(dist.mass(1), 0.745, delta=0.001)

    def test_chi_squared_against_distribution(self):
        n = 1_000_000
        dist = power_law_distribution(2.5, 1000)
        sequence = sample_degree_sequence(dist, n, seed=11)
        expected = dist.masses * n
        observed = np.bincount(sequence, minlength=dist.k_max + 2)[1 : dist.k_max + 1]
        # Pool the sparse tail into one cell so every cell expects >= 5.
        cut = int(np.argmax(expected < 5))
        observed = np.append(observed[:cut], observed[cut:].sum())
        expected = np.append(expected[:cut], expected[cut:].sum())
        scaled = expected * observed.sum() / expected.sum()
        _, p_value = stats.chisquare(observed, scaled)
        self.assertGreater(p_value, 0.001)


class ConfigurationModelTests(SimpleTestCase):
    def test_single_edge(self):
        g = configuration_model([1, 1], seed=0, simplify=False)
        self.assertEqual(g.edges.tolist(), [[0, 1]])

    def test_multigraph_preserves_degrees(self):
        degrees = [3, 3, 3, 3]
        for seed in range(50):
            g = configuration_model(degrees, seed, simplify=False)
            self.assertEqual(g.degrees.tolist(), degrees)

    def test_simplified_degrees_never_grow(self):
        dist = power_law_distribution(2.3, 500)
        degrees = sample_degree_sequence(dist, 3000, seed=9)
        g = configuration_model(degrees, seed=9, simplify=True)
        self.assertTrue(g.simple)
        self.assertTrue(np.all(g.degrees <= degrees))

    def test_adjacency_is_symmetric(self):
        dist = power_law_distribution(2.5, 200)
        degrees = sample_degree_sequence(dist, 500, seed=4)
        g = configuration_model(degrees, seed=4, simplify=False)
        self.assertEqual(g.degrees.sum() % 2, 0)
        for v in range(g.n):
            for w in set(g.neighbors(v).tolist()):
                self.assertEqual(
                    np.count_nonzero(g.neighbors(v) == w),
                    np.count_nonzero(g.neighbors(w) == v),
                )

    def test_double_edge_frequency(self):
        trials = 100_000
        doubles = sum(
            configuration_model([2, 2], seed, simplify=False).edges.tolist()
            == [[0, 1], [0, 1]]
            for seed in range(trials)
        )
        self.assertAlmostEqual(doubles / trials, 2 / 3, delta=0.01)

    def test_rejects_odd_sum_and_negative_degrees(self):
        with self.assertRaises(GraphError):
            configuration_model([1, 2], seed=0)
        with self.assertRaises(GraphError):
            configuration_model([-1, 1], seed=0)


class GiantComponentTests(SimpleTestCase):
    def test_connected_graph_is_kept_whole(self):
        g = Graph.from_edges(4, [0, 1, 2], [1, 2, 3])
        giant = giant_component(g)
        self.assertEqual(giant.n, 4)
        self.assertEqual(giant.edges.tolist(), g.edges.tolist())
        self.assertTrue(giant.connected)

    def test_largest_of_two_components(self):
        # A 7-cycle on 0..6 and a triangle on 7..9.
        heads = list(range(7)) + [7, 8, 9]
        tails = [1, 2, 3, 4, 5, 6, 0] + [8, 9, 7]
        giant = giant_component(Graph.from_edges(10, heads, tails))
        self.assertEqual(giant.n, 7)
        self.assertEqual(giant.m, 7)
        self.assertEqual(giant.source_ids.tolist(), list(range(7)))

    def test_empty_graph_is_rejected(self):
        with self.assertRaises(GraphError):
            giant_component(Graph.from_edges(0, [], []))

    def test_giant_fraction_is_stable_across_seeds(self):
        n = 100_000
        dist = power_law_distribution(2.5, n - 1)
        fractions = []
        for seed in (1, 2):
            degrees = sample_degree_sequence(dist, n, derive_seed(seed, 0))
            g = configuration_model(degrees, derive_seed(seed, 1), simplify=True)
            fractions.append(giant_component(g).n / n)
        self.assertAlmostEqual(fractions[0], fractions[1], delta=0.02)


class EdgeListTests(SimpleTestCase):
    def test_path_graph(self):
        g, dropped = parse_edge_list(["0 1\n", "1 2\n"])
        self.assertEqual(g.n, 3)
        self.assertEqual(g.degrees.tolist(), [1, 2, 1])
        self.assertEqual(dropped, 0)

    def test_duplicates_and_loops_are_dropped(self):
        g, dropped = parse_edge_list(["0 1", "1 0", "0 0"])
        self.assertEqual(g.edges.tolist(), [[0, 1]])
        self.assertEqual(dropped, 2)

    def test_comments_and_blank_lines(self):
        g, _ = parse_edge_list(["# AS links", "", "3 4  # peering"])
        self.assertEqual(g.n, 2)
        self.assertEqual(g.source_ids.tolist(), [3, 4])

    def test_malformed_line_reports_line_number(self):
        with self.assertRaises(EdgeListError) as ctx:
            parse_edge_list(["0 1", "1 x"])
        self.assertEqual(ctx.exception.line_number, 2)
        with self.assertRaises(EdgeListError):
            parse_edge_list(["0 -1"])
        with self.assertRaises(EdgeListError):
            parse_edge_list(["0 1 2"])

    def test_round_trip_is_canonical(self):
        with tempfile.TemporaryDirectory() as tmp:
            source = Path(tmp) / "as.txt"
            source.write_text("20 10\n10 30\n# note\n30 20\n10 20\n")
            with self.assertLogs("apps.graphgen", level="WARNING"):
                g = read_edge_list(source)
            target = Path(tmp) / "out.txt"
            write_edge_list(g, target)
            self.assertEqual(target.read_text(), "10 20\n10 30\n20 30\n")

            id_map = Path(tmp) / "out.idmap.csv"
            write_id_map(g, id_map)
            self.assertEqual(
                id_map.read_text().splitlines(),
                ["external_id,internal_id", "10,0", "20,1", "30,2"],
            )


class SeedingTests(SimpleTestCase):
    def test_streams_are_reproducible_and_distinct(self):
        self.assertEqual(derive_seed(7, 1, 2), derive_seed(7, 1, 2))
        self.assertNotEqual(derive_seed(7, 1, 2), derive_seed(7, 2, 1))
        np.testing.assert_array_equal(
            make_rng(7, 3).random(5), make_rng(7, 3).random(5)
        )
