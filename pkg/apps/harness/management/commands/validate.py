from pathlib import Path

from django.conf import settings
from django.core.management.base import BaseCommand, CommandError
from django.db import DatabaseError

from apps.harness.config import load_config
from apps.harness.experiment import build_graph
from apps.harness.reports import archive_run, write_validation
from apps.harness.validation import run_validations, validate_bounds
from core.exceptions import BfsBiasError


class Command(BaseCommand):
    help = (
        "Run the tree-degree validators and the bound sweeps; "
        "exits nonzero when a bound sweep fails"
    )

    def add_arguments(self, parser):
        parser.add_argument(
            "--config", type=Path, help="JSON config (default: built-in)"
        )
        parser.add_argument("--seed", type=int, help="override the config seed")
        parser.add_argument(
            "--out", type=Path, help="output directory (default: BFSBIAS_OUTPUT_DIR)"
        )
        parser.add_argument(
            "--threads", type=int, help="worker processes, 0 = one per CPU"
        )
        parser.add_argument(
            "--bounds-only",
            action="store_true",
            help="only run the summation sweeps, no graph is built",
        )
        parser.add_argument(
            "--no-archive",
            action="store_true",
            help="do not store the run in the database",
        )

    def handle(self, *args, **options):
        out = options["out"] or Path(settings.BFSBIAS_OUTPUT_DIR)
        try:
            cfg = load_config(options["config"], options["seed"], options["threads"])
            graph = None
            if options["bounds_only"]:
                bounds = validate_bounds(cfg.bound_gammas, cfg.t_grid_size)
                validation = {
                    "bounds": bounds,
                    "bounds_passed": bounds["passed"],
                    "passed": bounds["passed"],
                }
            else:
                graph, _ = build_graph(cfg.source, cfg.seed)
                validation = run_validations(graph, cfg)
            path = write_validation(validation, out, graph)
        except (BfsBiasError, OSError) as exc:
            raise CommandError(str(exc)) from exc

        for name, result in sorted(validation.items()):
            if isinstance(result, dict) and "passed" in result:
                passed = result["passed"]
                style = {True: self.style.SUCCESS, False: self.style.ERROR}.get(
                    passed, self.style.WARNING
                )
                label = {True: "pass", False: "FAIL"}.get(passed, "n/a")
                self.stdout.write(style(f"{name}: {label}"))

        if not options["no_archive"]:
            try:
                archive_run("validation", cfg, validation, out, validation["passed"])
            except DatabaseError as exc:
                self.stdout.write(self.style.WARNING(f"run not archived: {exc}"))

        if not validation["bounds_passed"]:
            count = len(validation["bounds"]["violations"])
            raise CommandError(f"bound sweep found {count} violations; see {path}")
        self.stdout.write(self.style.SUCCESS(f"Validation written to {path}"))
