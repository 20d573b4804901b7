from pathlib import Path

from django.core.management.base import BaseCommand, CommandError

from apps.graphgen.distributions import power_law_distribution, sample_degree_sequence
from apps.graphgen.edgelist import write_edge_list, write_id_map
from apps.graphgen.graph import configuration_model, giant_component
from apps.graphgen.seeding import derive_seed
from core.exceptions import BfsBiasError


class Command(BaseCommand):
    help = "Generate a power-law configuration-model graph and write it as an edge list"

    def add_arguments(self, parser):
        parser.add_argument("--gamma", type=float, required=True)
        parser.add_argument("--n", type=int, required=True)
        parser.add_argument("--k-max", type=int, help="largest degree (default: n - 1)")
        parser.add_argument("--seed", type=int, default=0)
        parser.add_argument("--out", type=Path, required=True, help="edge-list path")
        parser.add_argument(
            "--multigraph",
            action="store_true",
            help="keep self-loops and repeated edges",
        )
        parser.add_argument(
            "--giant",
            action="store_true",
            help="keep only the largest connected component (writes an id map too)",
        )

    def handle(self, *args, **options):
        try:
            k_max = options["k_max"] or options["n"] - 1
            dist = power_law_distribution(options["gamma"], k_max)
            sequence = sample_degree_sequence(
                dist, options["n"], derive_seed(options["seed"], 0)
            )
            g = configuration_model(
                sequence,
                derive_seed(options["seed"], 1),
                simplify=not options["multigraph"],
            )
            if options["giant"]:
                g = giant_component(g)
            out = options["out"]
            out.parent.mkdir(parents=True, exist_ok=True)
            write_edge_list(g, out)
            if options["giant"]:
                write_id_map(g, out.with_suffix(".ids.csv"))
        except (BfsBiasError, OSError) as exc:
            raise CommandError(str(exc)) from exc

        self.stdout.write(
            self.style.SUCCESS(f"Wrote {g.n} vertices, {g.m} edges to {out}")
        )
