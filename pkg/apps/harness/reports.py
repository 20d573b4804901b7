import json
import logging
from pathlib import Path

from apps.graphgen.edgelist import write_id_map

from .models import ExperimentRun

logger = logging.getLogger(__name__)

ID_MAP_NAME = "ids.csv"


def dump_json(data, path):
    Path(path).write_text(json.dumps(data, indent=2, sort_keys=True) + "\n")


def write_experiment(report, out_dir, graph=None):
    """Write report.json, one CCDF CSV per group plus the underlying graph's,
    and validation.json. Skipped groups get no CSV. A remapped ``graph``
    also gets its ids.csv.
    """
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    written = [out_dir / "report.json"]
    (out_dir / "report.json").write_text(report.to_json())

    report.underlying_ccdf.to_csv(out_dir / "ccdf_underlying.csv")
    written.append(out_dir / "ccdf_underlying.csv")
    for index, group in enumerate(report.groups, start=1):
        if group.averaged_ccdf is None:
            continue
        path = out_dir / f"ccdf_group{index}.csv"
        group.averaged_ccdf.to_csv(path)
        written.append(path)

    if report.validation is not None:
        dump_json(report.validation, out_dir / "validation.json")
        written.append(out_dir / "validation.json")
    if graph is not None and graph.source_ids is not None:
        written.append(write_graph_ids(graph, out_dir))
    logger.info("wrote %d files to %s", len(written), out_dir)
    return written


def write_validation(validation, out_dir, graph=None):
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    path = out_dir / "validation.json"
    dump_json(validation, path)
    if graph is not None and graph.source_ids is not None:
        write_graph_ids(graph, out_dir)
    return path


def write_graph_ids(graph, out_dir):
    """external_id,internal_id map of the graph the run was measured on."""
    path = Path(out_dir) / ID_MAP_NAME
    write_id_map(graph, path)
    return path


def archive_run(kind, cfg, report, out_dir, passed):
    return ExperimentRun.objects.create(
        kind=kind,
        seed=cfg.seed,
        config=cfg.as_dict(),
        report=report,
        output_dir=str(out_dir),
        passed=passed,
    )
