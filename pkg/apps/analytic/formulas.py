"""Closed forms for BFS visibility of a power-law configuration model.

Every approximation here has an exact-summation twin so that its error can
be measured: ``cubic_sum_approx`` against ``exact_power_sum``, and
``pvis_cubic`` against ``pvis_exact`` (and the intermediate
``pvis_reduced``).

Throughout, W(t) = sum_k k**(1 - gamma) * t**k, so that
sum_k k * a_k * t**k = C * W(t) and W(1) = mu / C.
"""

import math
from dataclasses import dataclass
from typing import NamedTuple

from scipy.special import zeta

from .exceptions import DomainError
from .series import power_series

HIGH_DEGREE = 18


@dataclass(frozen=True)
class PowerLawModel:
    """a_k = C * k**-gamma, truncated at ``k_max`` (None: unbounded)."""

    gamma: float
    C: float
    mu: float
    k_max: int | None = None

    def __post_init__(self):
        if not self.gamma > 2:
            raise DomainError(f"gamma must be > 2, got {self.gamma}")
        if not (self.C > 0 and self.mu > 0):
            raise DomainError("C and mu must be positive")

    @classmethod
    def from_gamma(cls, gamma, k_max=None):
        if not gamma > 2:
            raise DomainError(f"gamma must be > 2, got {gamma}")
        if k_max is None:
            C = 1.0 / float(zeta(gamma))
        else:
            C = 1.0 / power_series(-gamma, 1.0, k_max)
        mu = C * power_series(1 - gamma, 1.0, k_max)
        return cls(gamma=float(gamma), C=C, mu=mu, k_max=k_max)

    @classmethod
    def from_distribution(cls, dist):
        """Model of a power-law DegreeDistribution built by graphgen."""
        if dist.gamma is None:
            raise DomainError("distribution is not a power law")
        return cls.from_gamma(dist.gamma, dist.k_max)

    def weight_sum(self, t):
        return power_series(1 - self.gamma, t, self.k_max)


class Pvis(NamedTuple):
    value: float
    raw: float
    at_limit: bool


def exact_power_sum(m, t):
    """sum_k k**(1 - gamma) * t**k, the sum the cubic approximation targets."""
    _check_unit(t)
    return m.weight_sum(t)


def exact_weighted_sum(m, t):
    """sum_k k * a_k * t**k = C * sum_k k**(1 - gamma) * t**k; equals mu at t=1."""
    _check_unit(t)
    return m.C * m.weight_sum(t)


def cubic_sum_approx(m, t):
    _check_unit(t)
    return t**3 / (m.gamma - 2)


def pvis_exact(m, t):
    """Visibility probability at Time t from the full series.

    With S(t) = C * W(t) the series collapses to W(x) / W(t) where
    x = S(t) / (mu * t) <= 1. The raw value exceeds 1 for small t; the
    returned ``value`` is clamped to [0, 1]. t <= 0 yields the limit 0
    with ``at_limit`` set.
    """
    if t > 1:
        raise DomainError(f"t must be <= 1, got {t}")
    if t <= 0:
        return Pvis(0.0, 0.0, True)

    w_t = m.weight_sum(t)
    x = min(m.C * w_t / (m.mu * t), 1.0)
    raw = m.weight_sum(x) / w_t
    return Pvis(min(max(raw, 0.0), 1.0), raw, False)


def pvis_reduced(m, t):
    """(gamma - 2) / t**3 * sum_k k**(1 - gamma) * t**(2k).

    The series after substituting the cubic sum and mu * (gamma - 2) = C,
    just before the second cubic step turns it into t**3.
    """
    if not 0 < t <= 1:
        raise DomainError(f"t must lie in (0, 1], got {t}")
    return (m.gamma - 2) / t**3 * m.weight_sum(t * t)


def pvis_cubic(t):
    _check_unit(t)
    return t**3


def pvis_lower_bound(m):
    return (m.C / m.mu) ** 2


def mean_degree_gap(m):
    """Relative error of mu * (gamma - 2) = C with exact sums."""
    return abs(m.mu * (m.gamma - 2) - m.C) / m.C


def expected_tree_degree(i):
    """i(i-1)/(i+3): expected tree degree of a vertex of graph degree i."""
    _check_degree(i)
    return i * (i - 1) / (i + 3)


def expected_tree_degree_at_time(i, t):
    """(i-1) t**3: expectation given the vertex's max-index is t."""
    _check_degree(i)
    _check_unit(t)
    return (i - 1) * t**3


def chernoff_threshold_and_eps(i):
    _check_degree(i)
    expected = i * (i - 1) / (i + 3)
    return expected / 2, math.exp(-expected / 8)


def tree_degree_band(i):
    """[1 + m(i), i]: where a high-degree vertex's tree degree lands w.h.p."""
    threshold, _ = chernoff_threshold_and_eps(i)
    return 1 + threshold, float(i)


def markov_rigorous_fraction(m, epsilon):
    """Markov bound on Pr[deg_G - deg_T > (1 - C²/μ² + ε) deg_G]."""
    if not epsilon > 0:
        raise DomainError(f"epsilon must be > 0, got {epsilon}")
    slack = 1 - pvis_lower_bound(m)
    return slack / (slack + epsilon)


def predicted_tree_exponent(gamma):
    """Sampled trees keep the graph's exponent when 2 < gamma < 3."""
    if not 2 < gamma < 3:
        raise DomainError(f"prediction holds for 2 < gamma < 3, got {gamma}")
    return gamma


def _check_unit(t):
    if not 0 <= t <= 1:
        raise DomainError(f"t must lie in [0, 1], got {t}")


def _check_degree(i):
    if int(i) != i or i < 1:
        raise DomainError(f"degree must be a positive integer, got {i}")
