import logging
from dataclasses import dataclass, field

import numpy as np

from .exceptions import DistributionError
from .seeding import make_rng

logger = logging.getLogger(__name__)

MASS_TOLERANCE = 1e-9


@dataclass(frozen=True)
class DegreeDistribution:
    """Normalized degree masses a_k on the support 1..k_max.

    ``gamma`` and ``normalization`` are only set for power-law instances,
    where a_k = normalization * k**-gamma exactly.
    """

    degrees: np.ndarray
    masses: np.ndarray
    gamma: float | None = None
    normalization: float | None = None
    mean: float = field(init=False)

    def __post_init__(self):
        degrees = np.asarray(self.degrees, dtype=np.int64)
        masses = np.asarray(self.masses, dtype=float)
        if degrees.shape != masses.shape or degrees.size == 0:
            raise DistributionError("degrees and masses must be non-empty and aligned")
        if np.any(degrees < 1):
            raise DistributionError("degrees must be positive integers")
        if np.any(masses < 0):
            raise DistributionError("masses must be nonnegative")
        if abs(masses.sum() - 1.0) > MASS_TOLERANCE:
            raise DistributionError(f"masses sum to {masses.sum()!r}, expected 1")
        mean = float(np.dot(degrees, masses))
        if not mean > 0:
            raise DistributionError("mean degree must be positive")

        degrees.setflags(write=False)
        masses.setflags(write=False)
        object.__setattr__(self, "degrees", degrees)
        object.__setattr__(self, "masses", masses)
        object.__setattr__(self, "mean", mean)

    @property
    def k_max(self):
        return int(self.degrees.max())

    @property
    def probabilities(self):
        return {int(k): float(a) for k, a in zip(self.degrees, self.masses)}

    def mass(self, k):
        hits = np.flatnonzero(self.degrees == k)
        return float(self.masses[hits[0]]) if hits.size else 0.0


def power_law_distribution(gamma, k_max):
    """a_k = C * k**-gamma on [1, k_max], normalized."""
    if not gamma > 1:
        raise DistributionError(f"gamma must be > 1, got {gamma}")
    if int(k_max) != k_max or k_max < 2:
        raise DistributionError(f"k_max must be an integer >= 2, got {k_max}")

    degrees = np.arange(1, int(k_max) + 1, dtype=np.int64)
    weights = degrees.astype(float) ** -gamma
    normalization = 1.0 / weights.sum()
    return DegreeDistribution(
        degrees=degrees,
        masses=weights * normalization,
        gamma=float(gamma),
        normalization=float(normalization),
    )


def point_mass(k):
    return DegreeDistribution(degrees=np.array([k]), masses=np.array([1.0]))


def sample_degree_sequence(dist, n, seed):
    """Draw ``n`` i.i.d. degrees from ``dist``.

    An odd degree sum is repaired by adding one to a uniformly chosen
    vertex, so the result can always be fed to the configuration model.
    """
    if n < 2:
        raise DistributionError(f"n must be >= 2, got {n}")

    rng = make_rng(seed)
    sequence = rng.choice(dist.degrees, size=int(n), p=dist.masses)
    if sequence.sum() % 2:
        bumped = int(rng.integers(n))
        sequence[bumped] += 1
        logger.debug("odd degree sum repaired at vertex %d", bumped)
    return sequence.astype(np.int64)
