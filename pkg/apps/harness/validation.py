"""Monte Carlo and summation checks of the tree-degree predictions.

The graph validators share one pass of coupled BFS runs from uniformly
random roots. Each replicate is reduced inside its worker to per-degree
and per-time-bin sums, so memory does not grow with the replicate count.
"""

import logging
from dataclasses import dataclass

import numpy as np
import pandas as pd

from apps.analytic.formulas import (
    HIGH_DEGREE,
    PowerLawModel,
    chernoff_threshold_and_eps,
    exact_weighted_sum,
    expected_tree_degree,
    pvis_exact,
    pvis_lower_bound,
    tree_degree_band,
)
from apps.graphgen.seeding import derive_seed, make_rng
from apps.sampler.bfs import bfs_tree, visibility_columns

from .exceptions import HarnessError
from .pool import run_tasks, shared

logger = logging.getLogger(__name__)

MIN_REPLICATES = 30
MIN_OBSERVATIONS = 100
MIN_VERTICES = 10
MIN_BINS = 5
RATIO_BAND = (0.7, 1.3)
RATIO_ROW_SHARE = 0.9
FREQUENCY_SLACK = 0.05
WHP = 0.16
TOP_BIN_FLOOR = 0.8
MAX_INVERSIONS = 1
BOUND_TOLERANCE = 1e-12
TIGHT_TOLERANCE = 1e-10

# seed key paths
ROOTS_KEY = 10
REPLICATE_KEY = 11


@dataclass(frozen=True)
class PooledObservations:
    """Per-degree and per-time-bin sums over ``replicates`` coupled BFS runs.

    Every replicate covers the whole component, so each degree class is
    re-observed once per replicate; ``degrees["vertices"]`` counts the
    distinct vertices behind a row.
    """

    degrees: pd.DataFrame
    bins: pd.DataFrame
    replicates: int


def _replicate_sums(task):
    root, seed, bins = task
    g = shared("graph")
    columns = visibility_columns(g, bfs_tree(g, root, seed), seed)
    degree = columns["graph_degree"]
    children = columns["visible_children"]
    tree_degree = children + 1
    length = int(g.degrees.max()) + 1

    threshold = degree * (degree - 1) / (2 * (degree + 3))
    per_degree = {
        "observations": np.bincount(degree, minlength=length),
        "tree_degree_sum": np.bincount(degree, weights=tree_degree, minlength=length),
        "children_sum": np.bincount(degree, weights=children, minlength=length),
        "above_threshold": np.bincount(
            degree, weights=tree_degree >= threshold, minlength=length
        ),
        "in_band": np.bincount(
            degree,
            weights=(tree_degree >= 1 + threshold) & (tree_degree <= degree),
            minlength=length,
        ),
    }

    visible = degree >= 2
    t = columns["time_index"][visible]
    ratio = children[visible] / (degree[visible] - 1)
    edges = np.linspace(0.0, 1.0, bins + 1)
    codes = pd.cut(t, edges, labels=False, include_lowest=True)
    codes = np.asarray(codes, dtype=np.int64)
    per_bin = {
        "observations": np.bincount(codes, minlength=bins),
        "ratio_sum": np.bincount(codes, weights=ratio, minlength=bins),
        "time_sum": np.bincount(codes, weights=t, minlength=bins),
    }
    return per_degree, per_bin


def pool_observations(g, replicates, seed, bins=10, threads=None):
    """Run ``replicates`` coupled BFS runs from uniform roots and pool them."""
    if replicates < 1:
        raise HarnessError(f"replicates must be >= 1, got {replicates}")
    roots = make_rng(seed, ROOTS_KEY).integers(g.n, size=replicates)
    tasks = [
        (int(root), derive_seed(seed, REPLICATE_KEY, r), bins)
        for r, root in enumerate(roots)
    ]
    logger.info("pooling %d coupled BFS replicates on %d vertices", replicates, g.n)
    results = run_tasks(_replicate_sums, tasks, threads, graph=g)

    degree_totals = pd.DataFrame({k: v.astype(float) for k, v in results[0][0].items()})
    bin_totals = pd.DataFrame({k: v.astype(float) for k, v in results[0][1].items()})
    for per_degree, per_bin in results[1:]:
        degree_totals += pd.DataFrame(per_degree)
        bin_totals += pd.DataFrame(per_bin)
    degree_totals.index.name = "degree"
    degree_totals["vertices"] = np.bincount(g.degrees, minlength=len(degree_totals))
    bin_totals.index.name = "bin"
    return PooledObservations(
        degrees=degree_totals[degree_totals["observations"] > 0],
        bins=bin_totals,
        replicates=replicates,
    )


def _pooled(g, replicates, seed, pooled, bins=10, threads=None):
    if replicates < MIN_REPLICATES:
        raise HarnessError(
            f"needs at least {MIN_REPLICATES} replicates, got {replicates}"
        )
    if pooled is None:
        pooled = pool_observations(g, replicates, seed, bins, threads)
    return pooled


def _reported(pooled, high_only=False):
    rows = pooled.degrees[pooled.degrees["observations"] >= MIN_OBSERVATIONS]
    if high_only:
        rows = rows[rows.index >= HIGH_DEGREE]
    return rows


def _row_base(i, row):
    vertices = int(row["vertices"])
    return {
        "i": i,
        "observations": int(row["observations"]),
        "vertices": vertices,
        "sparse": vertices < MIN_VERTICES,
    }


def _verdict(name, rows, failed):
    """Rows that decide the pass flag, and the degrees of every failing row."""
    deciding = [r for r in rows if not r["sparse"]]
    failing = [r["i"] for r in rows if failed(r)]
    if failing:
        logger.warning("%s: rows outside tolerance at i=%s", name, failing)
    return deciding, failing


def validate_theorem3(g, replicates, seed, pooled=None, threads=None):
    """Mean tree degree by graph degree against i(i-1)/(i+3).

    Both the full tree degree and the child count are reported. The ratio
    check uses the full tree degree on high-degree rows backed by at least
    MIN_VERTICES distinct vertices; sparser rows are reported only.
    """
    pooled = _pooled(g, replicates, seed, pooled, threads=threads)
    rows = []
    for i, row in _reported(pooled).iterrows():
        i = int(i)
        observations = row["observations"]
        mean_tree = row["tree_degree_sum"] / observations
        mean_children = row["children_sum"] / observations
        predicted = expected_tree_degree(i)
        ratio = mean_tree / predicted if predicted > 0 else None
        rows.append(
            _row_base(i, row)
            | {
                "mean_tree_degree": float(mean_tree),
                "mean_children": float(mean_children),
                "predicted": predicted,
                "ratio": None if ratio is None else float(ratio),
                "relative_gap": None if ratio is None else float(ratio - 1),
                "boundary": i == 1,
            }
        )

    lo, hi = RATIO_BAND
    high = [r for r in rows if r["i"] >= HIGH_DEGREE]
    deciding, failing = _verdict(
        "theorem3", high, lambda r: not lo <= r["ratio"] <= hi
    )
    within = sum(lo <= r["ratio"] <= hi for r in deciding)
    return {
        "rows": rows,
        "high_degree_rows": len(high),
        "deciding_rows": len(deciding),
        "within_ratio_band": within,
        "within_ratio_band_all": sum(lo <= r["ratio"] <= hi for r in high),
        "failing_rows": failing,
        "ratio_band": list(RATIO_BAND),
        "required_share": RATIO_ROW_SHARE,
        "min_vertices": MIN_VERTICES,
        "passed": (
            None if not deciding else within >= RATIO_ROW_SHARE * len(deciding)
        ),
    }


def validate_theorem4(g, replicates, seed, pooled=None, threads=None):
    """Pr[deg_T >= m(i)] against the Chernoff bound 1 - eps(i), for i >= 18."""
    pooled = _pooled(g, replicates, seed, pooled, threads=threads)
    rows = []
    for i, row in _reported(pooled, high_only=True).iterrows():
        i = int(i)
        threshold, eps = chernoff_threshold_and_eps(i)
        frequency = float(row["above_threshold"] / row["observations"])
        rows.append(
            _row_base(i, row)
            | {
                "threshold": threshold,
                "frequency": frequency,
                "bound": 1 - eps,
                "passed": frequency >= 1 - eps - FREQUENCY_SLACK,
            }
        )
    deciding, failing = _verdict("theorem4", rows, lambda r: not r["passed"])
    return {
        "rows": rows,
        "slack": FREQUENCY_SLACK,
        "failing_rows": failing,
        "min_vertices": MIN_VERTICES,
        "passed": None if not deciding else all(r["passed"] for r in deciding),
    }


def validate_tree_degree_band(g, replicates, seed, pooled=None, threads=None):
    """Share of high-degree observations inside [1 + m(i), i]."""
    pooled = _pooled(g, replicates, seed, pooled, threads=threads)
    rows = []
    for i, row in _reported(pooled, high_only=True).iterrows():
        i = int(i)
        lo, hi = tree_degree_band(i)
        share = float(row["in_band"] / row["observations"])
        rows.append(
            _row_base(i, row)
            | {"band": [lo, hi], "share": share, "passed": share >= WHP}
        )
    deciding, failing = _verdict("tree_degree_band", rows, lambda r: not r["passed"])
    return {
        "rows": rows,
        "probability": WHP,
        "failing_rows": failing,
        "min_vertices": MIN_VERTICES,
        "passed": None if not deciding else all(r["passed"] for r in deciding),
    }


def validate_pvis(g, replicates, bins, seed, pooled=None, threads=None):
    """Mean visible_children / (i - 1) per Time bin against t**3."""
    if bins < MIN_BINS:
        raise HarnessError(f"needs at least {MIN_BINS} bins, got {bins}")
    if pooled is None or len(pooled.bins) != bins:
        pooled = _pooled(g, replicates, seed, None, bins, threads)

    width = 1.0 / bins
    rows = []
    for b, row in pooled.bins.iterrows():
        center = (int(b) + 0.5) * width
        count = row["observations"]
        rows.append(
            {
                "bin": int(b),
                "center": center,
                "observations": int(count),
                "mean_time": float(row["time_sum"] / count) if count else None,
                "empirical": float(row["ratio_sum"] / count) if count else None,
                "predicted": center**3,
            }
        )

    filled = [r["empirical"] for r in rows if r["empirical"] is not None]
    inversions = sum(b < a for a, b in zip(filled, filled[1:]))
    if not filled:
        increasing = reaches_floor = None
    else:
        increasing = inversions <= MAX_INVERSIONS and filled[0] <= filled[-1]
        reaches_floor = filled[-1] >= TOP_BIN_FLOOR
        if not reaches_floor:
            logger.warning(
                "top Time bin ratio %.3f is below %.2f", filled[-1], TOP_BIN_FLOOR
            )
    return {
        "rows": rows,
        "inversions": inversions,
        "max_inversions": MAX_INVERSIONS,
        "increasing": increasing,
        "top_bin": filled[-1] if filled else None,
        "top_bin_floor": TOP_BIN_FLOOR,
        "top_bin_passed": reaches_floor,
        "passed": None if not filled else increasing and reaches_floor,
    }


def validate_bounds(gammas, t_grid_size):
    """Sweep C t <= C sum k^(1-gamma) t^k <= mu and raw P_vis(t) >= C^2/mu^2.

    Exact summation on an evenly spaced grid over [0, 1]. The lower
    visibility bound is checked for t > 0; at t = 0 both sides of the
    weighted-sum bounds vanish.
    """
    if t_grid_size < 2:
        raise HarnessError(f"t_grid_size must be >= 2, got {t_grid_size}")
    grid = np.linspace(0.0, 1.0, t_grid_size)
    violations = []
    tight = []
    for gamma in gammas:
        m = PowerLawModel.from_gamma(gamma)
        floor = pvis_lower_bound(m)
        for t in grid.tolist():
            weighted = exact_weighted_sum(m, t)
            if m.C * t > weighted + BOUND_TOLERANCE:
                violations.append(
                    _violation(gamma, t, "C t <= C W(t)", m.C * t, weighted)
                )
            if weighted > m.mu + BOUND_TOLERANCE:
                violations.append(_violation(gamma, t, "C W(t) <= mu", weighted, m.mu))
            if t > 0:
                raw = pvis_exact(m, t).raw
                if raw < floor - BOUND_TOLERANCE:
                    violations.append(
                        _violation(gamma, t, "P_vis(t) >= C^2/mu^2", raw, floor)
                    )
        tight.append(
            {
                "gamma": gamma,
                "upper_at_one": bool(
                    abs(exact_weighted_sum(m, 1.0) - m.mu) <= TIGHT_TOLERANCE
                ),
                "lower_at_zero": bool(exact_weighted_sum(m, 0.0) == 0.0),
            }
        )

    if violations:
        logger.warning("bound sweep found %d violations", len(violations))
    return {
        "gammas": list(gammas),
        "t_grid_size": t_grid_size,
        "violations": violations,
        "tightness": tight,
        "passed": not violations,
    }


def _violation(gamma, t, inequality, lhs, rhs):
    return {"gamma": gamma, "t": t, "inequality": inequality, "lhs": lhs, "rhs": rhs}


def run_validations(g, cfg):
    """Every validator on ``g`` with the config's replicate, bin and grid settings."""
    bounds = validate_bounds(cfg.bound_gammas, cfg.t_grid_size)
    report = {"bounds": bounds}
    if cfg.replicates < MIN_REPLICATES:
        reason = f"needs at least {MIN_REPLICATES} replicates, got {cfg.replicates}"
        for name in ("theorem3", "theorem4", "tree_degree_band", "pvis"):
            report[name] = {"status": "skipped", "reason": reason, "passed": None}
    else:
        pooled = pool_observations(
            g, cfg.replicates, cfg.seed, cfg.pvis_bins, cfg.threads
        )
        args = (g, cfg.replicates, cfg.seed)
        report["theorem3"] = validate_theorem3(*args, pooled=pooled)
        report["theorem4"] = validate_theorem4(*args, pooled=pooled)
        report["tree_degree_band"] = validate_tree_degree_band(*args, pooled=pooled)
        report["pvis"] = validate_pvis(
            g, cfg.replicates, cfg.pvis_bins, cfg.seed, pooled=pooled
        )

    report["replicates"] = cfg.replicates
    report["bounds_passed"] = bounds["passed"]
    report["passed"] = all(
        report[name]["passed"] is not False
        for name in ("bounds", "theorem3", "theorem4", "tree_degree_band", "pvis")
    )
    return report
