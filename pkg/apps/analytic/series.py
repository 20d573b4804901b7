import numpy as np
from django.conf import settings
from scipy.special import zeta

from .exceptions import SummationError

FIRST_CHUNK = 4096


def summation_tolerance():
    return getattr(settings, "BFSBIAS_SUMMATION_TOL", 1e-12)


def summation_cap():
    return getattr(settings, "BFSBIAS_SUMMATION_CAP", 10_000_000)


def power_series(exponent, t, k_max=None, tol=None, cap=None):
    """Sum of k**exponent * t**k over k = 1..k_max (k_max=None: unbounded).

    ``exponent`` must be below -1 so that the unbounded sum converges at
    t = 1, where it equals zeta(-exponent). For t < 1 terms are added in
    growing chunks until the tail bound k**exponent * t**(k+1) / (1 - t)
    falls under ``tol``. Running past ``cap`` terms raises SummationError.
    """
    if not 0 <= t <= 1:
        raise SummationError(f"t must lie in [0, 1], got {t}")
    if t == 0:
        return 0.0
    if k_max is None and t == 1:
        return float(zeta(-exponent))

    tol = summation_tolerance() if tol is None else tol
    cap = summation_cap() if cap is None else cap
    limit = cap if k_max is None else int(k_max)

    total = 0.0
    start, chunk = 1, FIRST_CHUNK
    while start <= limit:
        stop = min(start + chunk, limit + 1)
        k = np.arange(start, stop, dtype=float)
        total += float(np.sum(k**exponent * t**k))
        last = stop - 1
        if t < 1 and last**exponent * t ** (last + 1) / (1 - t) < tol:
            return total
        start, chunk = stop, chunk * 2

    if k_max is None:
        raise SummationError(
            f"series at t={t} did not reach tail bound {tol} within {cap} terms"
        )
    return total
