"""Process pool for per-root samplings and Monte Carlo replicates.

Large read-only inputs (the graph) are installed once per worker through
the pool initializer and looked up with ``shared``; tasks themselves carry
only small arguments and their own derived seed.
"""

import logging
import os
from concurrent.futures import ProcessPoolExecutor

from django.conf import settings

from .exceptions import HarnessError

logger = logging.getLogger(__name__)

_shared = {}


def resolve_workers(threads=None):
    if threads is None:
        threads = getattr(settings, "BFSBIAS_THREADS", 0)
    if threads < 0:
        raise HarnessError(f"threads must be >= 0, got {threads}")
    return threads or os.cpu_count() or 1


def shared(name):
    return _shared[name]


def _install(payload):
    _shared.clear()
    _shared.update(payload)


def run_tasks(fn, tasks, threads=None, **payload):
    """Map ``fn`` over ``tasks`` and return results in task order.

    ``fn`` must be a module-level function; ``payload`` is visible to it
    through ``shared``.
    """
    tasks = list(tasks)
    workers = min(resolve_workers(threads), max(len(tasks), 1))
    if workers == 1:
        _install(payload)
        try:
            return [fn(task) for task in tasks]
        finally:
            _shared.clear()

    logger.debug("running %d tasks on %d workers", len(tasks), workers)
    chunksize = max(1, len(tasks) // (4 * workers))
    with ProcessPoolExecutor(
        max_workers=workers, initializer=_install, initargs=(payload,)
    ) as pool:
        return list(pool.map(fn, tasks, chunksize=chunksize))
