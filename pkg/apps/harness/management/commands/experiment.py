from pathlib import Path

from django.conf import settings
from django.core.management.base import BaseCommand, CommandError
from django.db import DatabaseError

from apps.harness.config import load_config
from apps.harness.experiment import build_graph, run_table1_experiment
from apps.harness.reports import archive_run, write_experiment
from core.exceptions import BfsBiasError


class Command(BaseCommand):
    help = "Run the degree-group BFS sampling experiment and write its report"

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
            "--no-archive",
            action="store_true",
            help="do not store the run in the database",
        )

    def handle(self, *args, **options):
        out = options["out"] or Path(settings.BFSBIAS_OUTPUT_DIR)
        try:
            cfg = load_config(options["config"], options["seed"], options["threads"])
            graph, summary = build_graph(cfg.source, cfg.seed)
            report = run_table1_experiment(cfg, graph, summary)
            write_experiment(report, out, graph)
        except (BfsBiasError, OSError) as exc:
            raise CommandError(str(exc)) from exc

        for group in report.groups:
            if group.skipped:
                self.stdout.write(self.style.WARNING(f"group {group.label}: skipped"))
                continue
            fits = ", ".join(
                f"{method}={fit['gamma_hat']:.3f}"
                for method, fit in group.fits.items()
                if "gamma_hat" in fit
            )
            self.stdout.write(f"group {group.label}: {len(group.roots)} trees, {fits}")
        for warning in report.warnings:
            self.stdout.write(self.style.WARNING(warning))

        if not options["no_archive"]:
            try:
                archive_run("experiment", cfg, report.as_dict(), out, report.passed)
            except DatabaseError as exc:
                self.stdout.write(self.style.WARNING(f"run not archived: {exc}"))

        style = self.style.SUCCESS if report.passed else self.style.WARNING
        verdict = "all checks passed" if report.passed else "some checks failed"
        self.stdout.write(style(f"Report written to {out} ({verdict})"))
