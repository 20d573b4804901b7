import numpy as np
from django.conf import settings

from .exceptions import BoundsError

FALLBACK_BOUNDS = ((1, 35), (36, 70), (71, None))


def parse_bounds(items):
    """Turn ``["1-35", "71-"]`` or ``[[1, 35], [71, None]]`` into (lo, hi) pairs."""
    bounds = []
    for item in items:
        if isinstance(item, str):
            lo, sep, hi = item.partition("-")
            if not sep:
                raise BoundsError(f"bound {item!r} is not of the form lo-hi")
            item = (lo, hi or None)
        try:
            lo, hi = item
            lo = int(lo)
            hi = None if hi is None else int(hi)
        except (TypeError, ValueError):
            raise BoundsError(f"bound {item!r} is not a (lo, hi) pair") from None
        bounds.append((lo, hi))
    return check_bounds(bounds)


def check_bounds(bounds):
    ordered = sorted(bounds, key=lambda pair: pair[0])
    for lo, hi in ordered:
        if lo < 0 or (hi is not None and hi < lo):
            raise BoundsError(f"bound ({lo}, {hi}) is empty or negative")
    for (lo, hi), (next_lo, _) in zip(ordered, ordered[1:]):
        if hi is None or next_lo <= hi:
            raise BoundsError(f"bounds ({lo}, {hi}) and ({next_lo}, ...) overlap")
    return [tuple(pair) for pair in bounds]


def default_bounds():
    configured = getattr(settings, "BFSBIAS_GROUP_BOUNDS", None)
    return parse_bounds(configured) if configured else list(FALLBACK_BOUNDS)


def bound_label(lo, hi):
    return f"{lo}-{hi}" if hi is not None else f"{lo}+"


def stratify_by_degree(g, bounds=None):
    """Vertex ids grouped by graph degree, one array per (lo, hi) bound, inclusive."""
    bounds = default_bounds() if bounds is None else check_bounds(bounds)
    degrees = g.degrees
    groups = []
    for lo, hi in bounds:
        inside = degrees >= lo
        if hi is not None:
            inside &= degrees <= hi
        groups.append(np.flatnonzero(inside))
    return groups
