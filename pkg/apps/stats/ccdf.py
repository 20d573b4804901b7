from dataclasses import dataclass

import numpy as np
import pandas as pd

from .exceptions import StatsError


@dataclass(frozen=True)
class CCDF:
    """Fraction of samples with degree >= k, at each observed degree k."""

    points: tuple
    n: int

    @property
    def degrees(self):
        return np.array([k for k, _ in self.points], dtype=np.int64)

    @property
    def fractions(self):
        return np.array([f for _, f in self.points], dtype=float)

    def at(self, k):
        """Step-function value at arbitrary degrees ``k``."""
        degrees, fractions = self.degrees, self.fractions
        positions = np.searchsorted(degrees, np.asarray(k), side="left")
        padded = np.append(fractions, 0.0)
        return padded[positions]

    def to_frame(self):
        return pd.DataFrame(self.points, columns=["degree", "ccdf"])

    def to_csv(self, path):
        self.to_frame().to_csv(path, index=False, float_format="%.12g")


def degree_histogram(degrees):
    values, counts = np.unique(np.asarray(degrees, dtype=np.int64), return_counts=True)
    return {int(k): int(c) for k, c in zip(values, counts)}


def ccdf(hist):
    counts = pd.Series(hist, dtype="int64").sort_index()
    counts = counts[counts > 0]
    if counts.empty:
        raise StatsError("cannot build a CCDF from an empty histogram")

    total = int(counts.sum())
    tail = counts[::-1].cumsum()[::-1] / total
    return CCDF(
        points=tuple((int(k), float(f)) for k, f in tail.items()),
        n=total,
    )


def average_ccdf(curves):
    """Pointwise mean over the union of supports; no reweighting by size."""
    curves = list(curves)
    if not curves:
        raise StatsError("need at least one curve to average")

    support = np.unique(np.concatenate([c.degrees for c in curves]))
    mean = np.mean([c.at(support) for c in curves], axis=0)
    return CCDF(
        points=tuple((int(k), float(f)) for k, f in zip(support, mean)),
        n=sum(c.n for c in curves),
    )


def histogram_from_ccdf(c):
    """Recover counts from CCDF differences (inverse of ``ccdf``)."""
    tail = np.rint(c.fractions * c.n).astype(np.int64)
    counts = tail - np.append(tail[1:], 0)
    return {int(k): int(v) for k, v in zip(c.degrees, counts)}
