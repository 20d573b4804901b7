import json
import os
import tempfile
from io import StringIO
from pathlib import Path
from unittest import mock

import pandas as pd
from django.contrib import admin
from django.core.management import call_command
from django.core.management.base import CommandError
from django.test import SimpleTestCase, TestCase

from apps.analytic.formulas import chernoff_threshold_and_eps, expected_tree_degree
from apps.graphgen.distributions import power_law_distribution, sample_degree_sequence
from apps.graphgen.graph import configuration_model, giant_component

from .config import build_config, load_config
from .exceptions import ConfigError, HarnessError
from .experiment import run_table1_experiment
from .models import ExperimentRun
from .pool import resolve_workers, run_tasks, shared
from .validation import (
    PooledObservations,
    pool_observations,
    validate_bounds,
    validate_pvis,
    validate_theorem3,
    validate_theorem4,
    validate_tree_degree_band,
)

FIXTURES = Path(__file__).resolve().parent / "fixtures"
TINY_GRAPH = FIXTURES / "tiny_graph.txt"


def tiny_document(**overrides):
    document = json.loads((FIXTURES / "tiny_config.json").read_text())
    document["source"]["path"] = str(TINY_GRAPH)
    document.update(overrides)
    return document


def write_config(directory, document):
    path = Path(directory) / "config.json"
    path.write_text(json.dumps(document))
    return path


def without_timestamp(path):
    report = json.loads(Path(path).read_text())
    del report["provenance"]["created_at"]
    return report


def offset_square(x):
    return x * x + shared("offset")


class ConfigTests(SimpleTestCase):
    def test_defaults_mirror_the_degree_groups(self):
        cfg = build_config({})
        self.assertEqual(cfg.source.kind, "synthetic")
        self.assertEqual(cfg.source.gamma, 2.5)
        self.assertEqual(cfg.group_bounds, ((1, 35), (36, 70), (71, None)))
        self.assertEqual(cfg.roots_per_group, 10)
        self.assertEqual(cfg.fit.k_min, 10)
        self.assertEqual(set(cfg.fit.methods), {"loglog_regression_ccdf", "mle_hill"})

    def test_cli_overrides(self):
        cfg = build_config({"seed": 3}, seed=11, threads=2)
        self.assertEqual(cfg.seed, 11)
        self.assertEqual(cfg.threads, 2)
        self.assertNotIn("threads", cfg.as_dict())

    def test_edge_list_source(self):
        cfg = build_config(tiny_document())
        self.assertEqual(cfg.source.kind, "edge_list")
        self.assertEqual(cfg.source.path, str(TINY_GRAPH))
        self.assertIsNone(cfg.source.gamma)

    def test_errors_carry_field_paths(self):
        with self.assertRaises(ConfigError) as caught:
            build_config(
                {
                    "fit": {"k_min": 0},
                    "source": {"kind": "synthetic", "gamma": 1.5},
                    "roots_per_group": 0,
                }
            )
        paths = [error.split(":")[0] for error in caught.exception.errors]
        self.assertIn("fit.k_min", paths)
        self.assertIn("source.gamma", paths)
        self.assertIn("roots_per_group", paths)

    def test_edge_list_needs_a_path(self):
        with self.assertRaisesMessage(ConfigError, "source.path"):
            build_config({"source": {"kind": "edge_list"}})

    def test_unknown_field(self):
        with self.assertRaisesMessage(ConfigError, "rootz: unknown field"):
            build_config({"rootz": 3})

    def test_overlapping_groups(self):
        with self.assertRaisesMessage(ConfigError, "group_bounds"):
            build_config({"group_bounds": [[1, 40], [30, None]]})

    def test_bound_gammas_must_exceed_two(self):
        with self.assertRaisesMessage(ConfigError, "bound_gammas[1]"):
            build_config({"bound_gammas": [2.5, 2.0]})

    def test_reference_must_match_groups(self):
        with self.assertRaisesMessage(ConfigError, "reference.groups"):
            build_config({"reference": {"underlying": 2.126, "groups": [2.1]}})

    def test_invalid_json_file(self):
        with tempfile.TemporaryDirectory() as tmp:
            path = Path(tmp) / "broken.json"
            path.write_text("{not json")
            with self.assertRaises(ConfigError):
                load_config(path)


class PoolTests(SimpleTestCase):
    def test_zero_means_every_cpu(self):
        self.assertEqual(resolve_workers(0), os.cpu_count() or 1)
        self.assertEqual(resolve_workers(3), 3)
        with self.assertRaises(HarnessError):
            resolve_workers(-1)

    def test_serial_and_parallel_agree(self):
        serial = run_tasks(offset_square, range(20), 1, offset=5)
        parallel = run_tasks(offset_square, range(20), 2, offset=5)
        self.assertEqual(serial, [x * x + 5 for x in range(20)])
        self.assertEqual(parallel, serial)


class TinyExperimentTests(SimpleTestCase):
    def test_single_root_groups(self):
        report = run_table1_experiment(build_config(tiny_document()))
        self.assertEqual([g.label for g in report.groups], ["1-2", "3-4", "5+"])
        for group in report.groups:
            self.assertEqual(len(group.per_tree), 1)
            self.assertEqual(group.averaged_ccdf.n, 10)
            self.assertEqual(group.averaged_ccdf.points[0], (1, 1.0))
            self.assertTrue(group.tail_dominance["holds"])
        self.assertEqual(report.groups[2].roots, [1])
        self.assertTrue(report.groups[2].exhaustive)

    def test_failed_fits_are_recorded(self):
        report = run_table1_experiment(build_config(tiny_document()))
        regression = report.groups[0].fits["loglog_regression_ccdf"]
        self.assertIn("error", regression)
        self.assertIsNone(report.groups[0].gaps["loglog_regression_ccdf"])
        self.assertIsNone(report.exponent_checks["loglog_regression_ccdf"]["passed"])
        self.assertTrue(any("per-tree fits failed" in w for w in report.warnings))

    def test_empty_group_is_skipped(self):
        cfg = build_config(tiny_document(group_bounds=[[1, 2], [3, 4], [6, None]]))
        report = run_table1_experiment(cfg)
        self.assertEqual(len(report.groups), 3)
        self.assertTrue(report.groups[2].skipped)
        self.assertIsNone(report.as_dict()["groups"][2]["averaged_ccdf"])
        self.assertTrue(any("6+" in w for w in report.warnings))

    def test_small_group_is_sampled_exhaustively(self):
        report = run_table1_experiment(build_config(tiny_document(roots_per_group=2)))
        self.assertEqual(report.groups[2].roots, [1])
        self.assertTrue(
            any("sampled exhaustively" in w for w in report.groups[2].warnings)
        )
        self.assertEqual(len(report.groups[0].per_tree), 2)

    def test_report_is_deterministic(self):
        cfg = build_config(tiny_document())
        first = run_table1_experiment(cfg).to_json(timestamp=False)
        second = run_table1_experiment(cfg).to_json(timestamp=False)
        parallel = run_table1_experiment(
            build_config(tiny_document(), threads=2)
        ).to_json(timestamp=False)
        self.assertEqual(first, second)
        self.assertEqual(first, parallel)

    def test_every_validator_is_reported(self):
        report = run_table1_experiment(build_config(tiny_document())).as_dict()
        self.assertEqual(
            {"bounds", "theorem3", "theorem4", "tree_degree_band", "pvis"}
            - set(report["validation"]),
            set(),
        )
        self.assertTrue(report["validation"]["bounds_passed"])

    def test_validation_can_be_disabled(self):
        report = run_table1_experiment(build_config(tiny_document(validate=False)))
        self.assertEqual(report.validation["status"], "skipped")

    def test_reference_comparison(self):
        skipped = run_table1_experiment(build_config(tiny_document(validate=False)))
        self.assertEqual(skipped.reference["status"], "skipped")

        reference = {"underlying": 2.126, "groups": [2.101, 2.079, 2.072]}
        cfg = build_config(tiny_document(validate=False, reference=reference))
        report = run_table1_experiment(cfg)
        self.assertEqual(report.reference["status"], "failed")
        self.assertEqual(len(report.reference["rows"]), 3)
        self.assertFalse(report.passed)


class SyntheticExperimentTests(SimpleTestCase):
    def run_experiment(self, gamma):
        cfg = build_config(
            {
                "source": {"kind": "synthetic", "gamma": gamma, "n": 100_000},
                "seed": 5,
                "validate": False,
                "threads": 1,
            }
        )
        return run_table1_experiment(cfg)

    def test_group_exponents_track_the_graph(self):
        for gamma in (2.3, 2.5):
            with self.subTest(gamma=gamma):
                report = self.run_experiment(gamma)
                check = report.exponent_checks["loglog_regression_ccdf"]
                self.assertLessEqual(check["max_abs_gap"], 0.25)
                self.assertLessEqual(check["spread"], 0.1)
                self.assertTrue(check["passed"])
                for group in report.groups:
                    self.assertEqual(len(group.per_tree), 10)
                    self.assertTrue(group.tail_dominance["holds"])

    def test_steep_tail_gap_fails_the_run(self):
        # seed 5 at n = 1e5 puts the gamma 2.7 groups just past the gap
        # tolerance; the groups still agree with each other
        report = self.run_experiment(2.7)
        check = report.exponent_checks["loglog_regression_ccdf"]
        self.assertEqual(len(check["gaps"]), 3)
        self.assertLessEqual(check["spread"], 0.1)
        self.assertGreater(check["max_abs_gap"], 0.25)
        self.assertLessEqual(check["max_abs_gap"], 0.3)
        self.assertFalse(check["passed"])
        self.assertFalse(report.passed)


class BoundSweepTests(SimpleTestCase):
    def test_no_violations(self):
        result = validate_bounds([2.1, 2.3, 2.5, 2.7, 2.9], 100)
        self.assertEqual(result["violations"], [])
        self.assertTrue(result["passed"])
        for row in result["tightness"]:
            self.assertTrue(row["upper_at_one"])
            self.assertTrue(row["lower_at_zero"])

    def test_grid_too_small(self):
        with self.assertRaises(HarnessError):
            validate_bounds([2.5], 1)


class MonteCarloValidationTests(SimpleTestCase):
    @classmethod
    def setUpClass(cls):
        super().setUpClass()
        dist = power_law_distribution(2.5, 19_999)
        sequence = sample_degree_sequence(dist, 20_000, seed=4)
        cls.graph = giant_component(configuration_model(sequence, seed=4))
        cls.pooled = pool_observations(cls.graph, 60, seed=8, bins=10, threads=1)

    def test_preconditions(self):
        with self.assertRaises(HarnessError):
            validate_theorem3(self.graph, 29, seed=1)
        with self.assertRaises(HarnessError):
            validate_pvis(self.graph, 60, 4, seed=1, pooled=self.pooled)

    def test_theorem3_rows(self):
        result = validate_theorem3(self.graph, 60, seed=8, pooled=self.pooled)
        first = result["rows"][0]
        self.assertEqual(first["i"], 1)
        self.assertTrue(first["boundary"])
        self.assertEqual(first["mean_tree_degree"], 1.0)
        self.assertEqual(first["mean_children"], 0.0)
        self.assertIsNone(first["ratio"])
        for row in result["rows"]:
            self.assertGreaterEqual(row["observations"], 100)
            self.assertLessEqual(row["mean_tree_degree"], row["i"])
            self.assertEqual(row["sparse"], row["vertices"] < 10)
            self.assertAlmostEqual(row["mean_tree_degree"] - row["mean_children"], 1.0)

    def test_theorem4_rows(self):
        result = validate_theorem4(self.graph, 60, seed=8, pooled=self.pooled)
        self.assertTrue(result["rows"])
        for row in result["rows"]:
            self.assertGreaterEqual(row["i"], 18)
            self.assertGreaterEqual(row["observations"], 100)
            _, eps = chernoff_threshold_and_eps(row["i"])
            self.assertAlmostEqual(row["bound"], 1 - eps)
            self.assertTrue(0 <= row["frequency"] <= 1)

    def test_band_rows(self):
        result = validate_tree_degree_band(self.graph, 60, seed=8, pooled=self.pooled)
        for row in result["rows"]:
            self.assertEqual(row["band"][1], row["i"])
            self.assertTrue(0 <= row["share"] <= 1)

    def test_pvis_curve(self):
        result = validate_pvis(self.graph, 60, 10, seed=8, pooled=self.pooled)
        self.assertEqual(len(result["rows"]), 10)
        self.assertAlmostEqual(result["rows"][-1]["predicted"], 0.95**3)
        filled = [r["empirical"] for r in result["rows"] if r["empirical"] is not None]
        self.assertLessEqual(filled[0], filled[-1])

    def test_pooling_ignores_worker_count(self):
        parallel = pool_observations(self.graph, 60, seed=8, bins=10, threads=2)
        self.assertTrue(parallel.degrees.equals(self.pooled.degrees))
        self.assertTrue(parallel.bins.equals(self.pooled.bins))


class SparseRowTests(SimpleTestCase):
    def pooled(self, sparse_vertices):
        degrees = pd.DataFrame(
            {
                "observations": [200.0, 200.0],
                "tree_degree_sum": [200 * expected_tree_degree(20), 200 * 20.0],
                "children_sum": [200 * (expected_tree_degree(20) - 1), 200 * 19.0],
                "above_threshold": [200.0, 0.0],
                "in_band": [200.0, 0.0],
                "vertices": [40, sparse_vertices],
            },
            index=pd.Index([20, 42], name="degree"),
        )
        return PooledObservations(degrees=degrees, bins=pd.DataFrame(), replicates=200)

    def test_rows_with_few_vertices_are_reported_only(self):
        pooled = self.pooled(6)
        theorem3 = validate_theorem3(None, 200, seed=0, pooled=pooled)
        theorem4 = validate_theorem4(None, 200, seed=0, pooled=pooled)
        band = validate_tree_degree_band(None, 200, seed=0, pooled=pooled)
        for result in (theorem3, theorem4, band):
            self.assertEqual(result["failing_rows"], [42])
            self.assertTrue(result["passed"])
        self.assertEqual(theorem3["deciding_rows"], 1)
        self.assertEqual(theorem3["within_ratio_band_all"], 1)
        self.assertTrue(theorem4["rows"][1]["sparse"])

    def test_dense_failures_decide(self):
        pooled = self.pooled(12)
        self.assertFalse(validate_theorem3(None, 200, seed=0, pooled=pooled)["passed"])
        self.assertFalse(validate_theorem4(None, 200, seed=0, pooled=pooled)["passed"])


class AcceptanceValidationTests(SimpleTestCase):
    """200 replicates on the giant component of a gamma 2.5, n = 1e5 graph."""

    @classmethod
    def setUpClass(cls):
        super().setUpClass()
        dist = power_law_distribution(2.5, 99_999)
        sequence = sample_degree_sequence(dist, 100_000, seed=5)
        cls.graph = giant_component(configuration_model(sequence, seed=5))
        cls.pooled = pool_observations(cls.graph, 200, seed=5, bins=10, threads=0)

    def test_theorem3_passes(self):
        result = validate_theorem3(self.graph, 200, seed=5, pooled=self.pooled)
        self.assertGreater(result["deciding_rows"], 0)
        self.assertTrue(result["passed"])
        decided = {r["i"] for r in result["rows"] if r["i"] >= 18 and not r["sparse"]}
        missed = decided & set(result["failing_rows"])
        self.assertLessEqual(len(missed), 0.1 * len(decided))

    def test_theorem4_passes(self):
        result = validate_theorem4(self.graph, 200, seed=5, pooled=self.pooled)
        self.assertTrue(result["passed"])
        sparse = {r["i"] for r in result["rows"] if r["sparse"]}
        self.assertLessEqual(set(result["failing_rows"]), sparse)

    def test_pvis_rises_with_time(self):
        result = validate_pvis(self.graph, 200, 10, seed=5, pooled=self.pooled)
        self.assertTrue(result["increasing"])
        self.assertLessEqual(result["inversions"], 1)
        self.assertIsNotNone(result["top_bin_passed"])


class CommandTests(TestCase):
    def setUp(self):
        self.tmp = tempfile.TemporaryDirectory()
        self.addCleanup(self.tmp.cleanup)
        self.dir = Path(self.tmp.name)
        self.config = write_config(self.dir, tiny_document())

    def call(self, *args):
        out = StringIO()
        call_command(*args, stdout=out)
        return out.getvalue()

    def experiment(self, out, *extra):
        return self.call(
            "experiment", "--config", str(self.config), "--out", str(out), *extra
        )

    def test_experiment_writes_every_file(self):
        out = self.dir / "run"
        self.experiment(out, "--no-archive")
        for name in (
            "report.json",
            "validation.json",
            "ccdf_underlying.csv",
            "ccdf_group1.csv",
            "ccdf_group2.csv",
            "ccdf_group3.csv",
        ):
            self.assertTrue((out / name).exists(), name)
        self.assertEqual(ExperimentRun.objects.count(), 0)
        header = (out / "ccdf_group1.csv").read_text().splitlines()[0]
        self.assertEqual(header, "degree,ccdf")

        ids = (out / "ids.csv").read_text().splitlines()
        self.assertEqual(ids[0], "external_id,internal_id")
        external = {int(line.split(",")[0]) for line in ids[1:]}
        self.assertEqual(external, set(range(1, 11)))

    def test_experiment_is_byte_identical(self):
        first, second = self.dir / "a", self.dir / "b"
        for out in (first, second):
            self.experiment(out, "--no-archive")
        self.assertEqual(
            without_timestamp(first / "report.json"),
            without_timestamp(second / "report.json"),
        )
        self.assertEqual(
            (first / "ccdf_group2.csv").read_bytes(),
            (second / "ccdf_group2.csv").read_bytes(),
        )

    def test_seed_flag_changes_the_run(self):
        self.experiment(self.dir / "a")
        self.experiment(self.dir / "b", "--seed", "99")
        self.assertEqual(
            sorted(int(r.seed) for r in ExperimentRun.objects.all()), [7, 99]
        )

    def test_experiment_is_archived(self):
        self.experiment(self.dir / "a")
        run = ExperimentRun.objects.get()
        self.assertEqual(run.kind, ExperimentRun.Kind.EXPERIMENT)
        self.assertEqual(run.config["roots_per_group"], 1)
        self.assertEqual(len(run.report["groups"]), 3)

    def test_config_errors_exit_nonzero(self):
        bad = write_config(self.dir, tiny_document(fit={"k_min": 0}))
        with self.assertRaisesMessage(CommandError, "fit.k_min"):
            self.call("experiment", "--config", str(bad), "--out", str(self.dir / "x"))

    def test_validate_bounds_pass(self):
        output = self.call(
            "validate",
            "--config",
            str(self.config),
            "--out",
            str(self.dir),
            "--bounds-only",
        )
        self.assertIn("bounds: pass", output)
        validation = json.loads((self.dir / "validation.json").read_text())
        self.assertTrue(validation["bounds_passed"])
        run = ExperimentRun.objects.get()
        self.assertEqual(run.kind, ExperimentRun.Kind.VALIDATION)

    def test_validate_runs_every_validator(self):
        self.call("validate", "--config", str(self.config), "--out", str(self.dir))
        validation = json.loads((self.dir / "validation.json").read_text())
        for name in ("bounds", "theorem3", "theorem4", "tree_degree_band", "pvis"):
            self.assertIn(name, validation)

    def test_validate_fails_on_violation(self):
        failing = {
            "gammas": [2.5],
            "t_grid_size": 11,
            "violations": [
                {
                    "gamma": 2.5,
                    "t": 0.5,
                    "inequality": "C W(t) <= mu",
                    "lhs": 2.0,
                    "rhs": 1.0,
                }
            ],
            "tightness": [],
            "passed": False,
        }
        with mock.patch(
            "apps.harness.management.commands.validate.validate_bounds",
            return_value=failing,
        ):
            with self.assertRaisesMessage(CommandError, "1 violations"):
                self.call(
                    "validate",
                    "--config",
                    str(self.config),
                    "--out",
                    str(self.dir),
                    "--bounds-only",
                    "--no-archive",
                )

    def test_sample_writes_tree_and_histogram(self):
        out = self.dir / "tree"
        self.call(
            "sample", "--graph", str(TINY_GRAPH), "--root", "1", "--seed", "3",
            "--out", str(out), "--visibility",
        )
        edges = (out / "tree.txt").read_text().split("\n")
        edges = [line.split() for line in edges if line]
        self.assertEqual(len(edges), 9)
        self.assertEqual({int(child) for _, child in edges}, set(range(2, 11)))

        lines = (out / "histogram.csv").read_text().splitlines()
        self.assertEqual(lines[0], "degree,count")
        self.assertEqual(sum(int(line.split(",")[1]) for line in lines[1:]), 10)

        visibility = (out / "visibility.csv").read_text().splitlines()
        self.assertEqual(
            visibility[0], "vertex,graph_degree,time_index,visible_children"
        )
        self.assertEqual(len(visibility), 10)

        ids = (out / "ids.csv").read_text().splitlines()
        self.assertEqual(ids[0], "external_id,internal_id")
        self.assertEqual(len(ids), 11)
        self.assertEqual(ids[1], "1,0")

    def test_sample_unknown_root(self):
        with self.assertRaisesMessage(CommandError, "42"):
            self.call(
                "sample", "--graph", str(TINY_GRAPH), "--root", "42",
                "--out", str(self.dir),
            )

    def test_generate_then_fit(self):
        graph = self.dir / "graph.txt"
        self.call(
            "generate", "--gamma", "2.5", "--n", "100000", "--seed", "17",
            "--out", str(graph),
        )
        output = self.call("fit", "--graph", str(graph), "--method", "mle_hill")
        fits = json.loads(output)
        self.assertAlmostEqual(fits["mle_hill"]["gamma_hat"], 2.5, delta=0.1)

    def test_fit_histogram(self):
        path = self.dir / "hist.csv"
        rows = "\n".join(f"{k},{max(1, int(1e5 * k ** -2.5))}" for k in range(1, 200))
        path.write_text("degree,count\n" + rows + "\n")
        fits = json.loads(self.call("fit", "--histogram", str(path), "--k-min", "5"))
        self.assertEqual(set(fits), {"loglog_regression_ccdf", "mle_hill"})

    def test_fit_histogram_needs_columns(self):
        path = self.dir / "hist.csv"
        path.write_text("k,n\n1,2\n")
        with self.assertRaisesMessage(CommandError, "missing column"):
            self.call("fit", "--histogram", str(path))

    def test_fit_histogram_rejects_bad_counts(self):
        path = self.dir / "hist.csv"
        for body, line in (
            ("1,5\n2,-2\n", 3),
            ("1,5\n2,\n", 3),
            ("1,nan\n", 2),
            ("1,2.5\n", 2),
            ("-1,4\n", 2),
        ):
            with self.subTest(body=body):
                path.write_text("degree,count\n" + body)
                with self.assertRaisesMessage(
                    CommandError, f"line {line}: degree and count"
                ):
                    self.call("fit", "--histogram", str(path))

    def test_generate_giant_writes_id_map(self):
        graph = self.dir / "giant.txt"
        self.call(
            "generate", "--gamma", "2.5", "--n", "2000", "--seed", "1",
            "--out", str(graph),
            "--giant",
        )
        ids = (self.dir / "giant.ids.csv").read_text().splitlines()
        self.assertEqual(ids[0], "external_id,internal_id")

    def test_admin_lists_runs(self):
        self.assertTrue(admin.site.is_registered(ExperimentRun))


class ArchiveModelTests(TestCase):
    def test_str_and_ordering(self):
        older = ExperimentRun.objects.create(
            kind="experiment", seed=2**64 - 1, config={}, report={}, output_dir="a"
        )
        newer = ExperimentRun.objects.create(
            kind="validation", seed=0, config={}, report={}, output_dir="b", passed=True
        )
        self.assertEqual(list(ExperimentRun.objects.all()), [newer, older])
        self.assertIn("seed=18446744073709551615", str(older))
        self.assertTrue(str(newer).startswith("Validation"))

