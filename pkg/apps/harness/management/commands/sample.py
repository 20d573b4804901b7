from pathlib import Path

import pandas as pd
from django.core.management.base import BaseCommand, CommandError

from apps.graphgen.edgelist import read_edge_list, write_id_map
from apps.sampler.bfs import bfs_tree, tree_degree_histogram, visibility_columns
from core.exceptions import BfsBiasError


class Command(BaseCommand):
    help = "Sample one BFS tree from a graph and write its edges and degree histogram"

    def add_arguments(self, parser):
        parser.add_argument("--graph", type=Path, required=True, help="edge-list path")
        parser.add_argument(
            "--root", type=int, required=True, help="root id as in the file"
        )
        parser.add_argument("--seed", type=int, default=0)
        parser.add_argument("--out", type=Path, required=True, help="output directory")
        parser.add_argument(
            "--visibility",
            action="store_true",
            help="also write visibility.csv with each vertex's Time index",
        )

    def handle(self, *args, **options):
        out = options["out"]
        try:
            g = read_edge_list(options["graph"])
            tree = bfs_tree(g, g.internal_id(options["root"]), options["seed"])
            out.mkdir(parents=True, exist_ok=True)

            parent, child = tree.edges().T
            ids = g.source_ids
            edges = pd.DataFrame(
                {
                    "parent": parent if ids is None else ids[parent],
                    "child": child if ids is None else ids[child],
                }
            )
            edges.to_csv(out / "tree.txt", sep=" ", header=False, index=False)

            histogram = pd.Series(tree_degree_histogram(tree), name="count")
            histogram.index.name = "degree"
            histogram.to_csv(out / "histogram.csv")
            if ids is not None:
                write_id_map(g, out / "ids.csv")

            if options["visibility"]:
                columns = visibility_columns(g, tree, options["seed"])
                frame = pd.DataFrame(columns)
                if ids is not None:
                    frame["vertex"] = ids[frame["vertex"]]
                frame.to_csv(out / "visibility.csv", index=False, float_format="%.12g")
        except (BfsBiasError, OSError) as exc:
            raise CommandError(str(exc)) from exc

        self.stdout.write(
            self.style.SUCCESS(
                f"Tree from {options['root']} covers {tree.covered} of {g.n} vertices; "
                f"wrote {out}"
            )
        )
