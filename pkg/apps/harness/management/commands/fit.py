import json
from pathlib import Path

import numpy as np
import pandas as pd
from django.conf import settings
from django.core.management.base import BaseCommand, CommandError

from apps.graphgen.edgelist import read_edge_list
from apps.stats.ccdf import ccdf, degree_histogram
from apps.stats.fitting import FitMethod, fit_gamma_mle, fit_gamma_regression
from core.exceptions import BfsBiasError


def read_histogram(path):
    frame = pd.read_csv(path)
    missing = {"degree", "count"} - set(frame.columns)
    if missing:
        raise CommandError(f"{path}: missing column(s) {', '.join(sorted(missing))}")

    values = frame[["degree", "count"]].apply(pd.to_numeric, errors="coerce")
    bad = values.isna().any(axis=1) | (values < 0).any(axis=1) | (values % 1 != 0).any(
        axis=1
    )
    if bad.any():
        line = int(np.flatnonzero(bad.to_numpy())[0]) + 2
        raise CommandError(
            f"{path}: line {line}: degree and count must be nonnegative integers"
        )
    return {int(k): int(c) for k, c in zip(values["degree"], values["count"])}


class Command(BaseCommand):
    help = "Fit the power-law exponent of a graph's or histogram's degree distribution"

    def add_arguments(self, parser):
        source = parser.add_mutually_exclusive_group(required=True)
        source.add_argument("--graph", type=Path, help="edge-list path")
        source.add_argument(
            "--histogram", type=Path, help="CSV with degree,count columns"
        )
        parser.add_argument("--k-min", type=int, default=settings.BFSBIAS_FIT_K_MIN)
        parser.add_argument(
            "--method",
            choices=FitMethod.values,
            action="append",
            help="estimator to run (repeatable; default: all)",
        )

    def handle(self, *args, **options):
        methods = options["method"] or FitMethod.values
        try:
            if options["graph"]:
                hist = degree_histogram(read_edge_list(options["graph"]).degrees)
            else:
                hist = read_histogram(options["histogram"])
            curve = ccdf(hist)
            degrees = np.repeat(list(hist.keys()), list(hist.values()))

            fits = {}
            for method in methods:
                if method == FitMethod.MLE_HILL:
                    fit = fit_gamma_mle(degrees, options["k_min"])
                else:
                    fit = fit_gamma_regression(curve, options["k_min"])
                fits[method] = fit.as_dict()
        except (
            BfsBiasError,
            OSError,
            pd.errors.ParserError,
            pd.errors.EmptyDataError,
        ) as exc:
            raise CommandError(str(exc)) from exc

        self.stdout.write(json.dumps(fits, indent=2, sort_keys=True))
