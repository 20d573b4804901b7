"""Power-law exponent estimators.

``fit_gamma_regression`` is the visual method: a least-squares line through
log CCDF against log degree. A gamma power law has a CCDF tail exponent of
gamma - 1, so gamma_hat = 1 - slope. ``fit_gamma_mle`` is the discrete
Hill-type estimator with the usual half-integer shift of the cutoff.
"""

import logging
from dataclasses import asdict, dataclass

import numpy as np
from django.db import models

from .exceptions import FitError

logger = logging.getLogger(__name__)

MIN_FIT_SIZE = 10


class FitMethod(models.TextChoices):
    LOGLOG_REGRESSION_CCDF = "loglog_regression_ccdf", "Log-log regression on CCDF"
    MLE_HILL = "mle_hill", "Discrete MLE (Hill)"


@dataclass(frozen=True)
class PowerLawFit:
    gamma_hat: float
    k_min: int
    method: str
    sample_size: int
    r_squared: float | None = None
    standard_error: float | None = None

    def as_dict(self):
        return asdict(self)


def fit_gamma_regression(c, k_min):
    keep = c.degrees >= k_min
    degrees, fractions = c.degrees[keep], c.fractions[keep]
    if degrees.size < MIN_FIT_SIZE:
        raise FitError(
            f"regression needs {MIN_FIT_SIZE} distinct degrees >= {k_min}, "
            f"found {degrees.size}"
        )

    x, y = np.log(degrees), np.log(fractions)
    slope, intercept = np.polyfit(x, y, 1)
    residuals = y - (slope * x + intercept)
    spread = np.sum((x - x.mean()) ** 2)
    total = np.sum((y - y.mean()) ** 2)
    r_squared = 1.0 - np.sum(residuals**2) / total if total > 0 else 1.0
    standard_error = np.sqrt(np.sum(residuals**2) / (x.size - 2) / spread)

    gamma_hat = 1.0 - slope
    if not gamma_hat > 1:
        raise FitError(f"regression slope {slope:.4f} gives gamma_hat <= 1")
    return PowerLawFit(
        gamma_hat=float(gamma_hat),
        k_min=int(k_min),
        method=FitMethod.LOGLOG_REGRESSION_CCDF.value,
        sample_size=int(degrees.size),
        r_squared=float(r_squared),
        standard_error=float(standard_error),
    )


def fit_gamma_mle(degrees, k_min):
    if k_min < 1:
        raise FitError(f"k_min must be >= 1, got {k_min}")
    degrees = np.asarray(degrees, dtype=float)
    tail = degrees[degrees >= k_min]
    if tail.size < MIN_FIT_SIZE:
        raise FitError(
            f"MLE needs {MIN_FIT_SIZE} samples >= {k_min}, found {tail.size}"
        )
    if np.unique(tail).size < 2:
        raise FitError("MLE tail is degenerate: every sample has the same degree")

    log_sum = np.sum(np.log(tail / (k_min - 0.5)))
    gamma_hat = 1.0 + tail.size / log_sum
    return PowerLawFit(
        gamma_hat=float(gamma_hat),
        k_min=int(k_min),
        method=FitMethod.MLE_HILL.value,
        sample_size=int(tail.size),
        standard_error=float((gamma_hat - 1.0) / np.sqrt(tail.size)),
    )
