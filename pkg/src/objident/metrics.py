"""Exact, tie-stable dissimilarities between binary pattern rows.

All four indices are computed as dissimilarities over an exact rational
``key`` (a ``fractions.Fraction``), so that comparisons and tie detection
in the cluster engine never touch floating point.  For the Euclidean index
the key is the *squared* distance, which is an integer on binary rows and
orders identically to the distance itself; the square root only appears in
the 2-decimal display value.
"""

from __future__ import annotations

import enum
import functools
import math
from dataclasses import dataclass
from decimal import ROUND_HALF_UP, Decimal, localcontext
from fractions import Fraction
from typing import Sequence

from .errors import ValidationError

Row = Sequence[int]


class Metric(enum.Enum):
    EUCLIDEAN = "euclidean"
    MANHATTAN = "manhattan"
    SIMPLE_MATCHING = "smc"
    JACCARD = "jaccard"


def metric_from_name(name: str) -> Metric:
    """Resolve a CLI/config metric name (case-insensitive)."""
    try:
        return Metric(name.lower())
    except ValueError:
        valid = ", ".join(m.value for m in Metric)
        raise ValidationError(f"unknown metric {name!r} (expected one of: {valid})") from None


@functools.total_ordering
@dataclass(frozen=True)
class ExactDissimilarity:
    """A comparison key plus the metric it was computed under.

    key is >= 0 and is 0 exactly when the metric treats the rows as
    identical.  Ordering is exact rational comparison and is only defined
    between values of the same metric.
    """

    key: Fraction
    metric: Metric

    def __lt__(self, other: "ExactDissimilarity") -> bool:
        if not isinstance(other, ExactDissimilarity):
            return NotImplemented
        if other.metric is not self.metric:
            raise ValueError(
                f"cannot order {self.metric.value} against {other.metric.value}")
        return self.key < other.key

    @property
    def value(self) -> float:
        """Unrounded magnitude: sqrt(key) for Euclidean, key otherwise."""
        if self.metric is Metric.EUCLIDEAN:
            return math.sqrt(self.key)
        return float(self.key)

    @property
    def display(self) -> str:
        """Magnitude rounded half-up to two decimals, e.g. '1.41'."""
        with localcontext() as ctx:
            ctx.prec = 30
            dec = Decimal(self.key.numerator) / Decimal(self.key.denominator)
            if self.metric is Metric.EUCLIDEAN:
                dec = dec.sqrt()
            return str(dec.quantize(Decimal("0.01"), rounding=ROUND_HALF_UP))

    def within_height(self, threshold: Fraction) -> bool:
        """Exact test of magnitude <= threshold (threshold in display units)."""
        if threshold < 0:
            return False
        if self.metric is Metric.EUCLIDEAN:
            return self.key <= threshold * threshold
        return self.key <= threshold


def hamming(row_a: Row, row_b: Row) -> int:
    """Count of positions where the two rows differ."""
    if len(row_a) != len(row_b):
        raise ValidationError(
            f"row length mismatch: {len(row_a)} vs {len(row_b)}")
    return sum(1 for a, b in zip(row_a, row_b) if a != b)


def euclidean(row_a: Row, row_b: Row) -> ExactDissimilarity:
    """Euclidean distance; key holds the squared distance (= Hamming count)."""
    return ExactDissimilarity(Fraction(hamming(row_a, row_b)), Metric.EUCLIDEAN)


def manhattan(row_a: Row, row_b: Row) -> ExactDissimilarity:
    """L1 distance; on binary rows this equals the Hamming count."""
    return ExactDissimilarity(Fraction(hamming(row_a, row_b)), Metric.MANHATTAN)


def simple_matching(row_a: Row, row_b: Row) -> ExactDissimilarity:
    """Mismatch fraction: differing positions / total positions."""
    if len(row_a) == 0 and len(row_b) == 0:
        raise ValidationError("simple matching is undefined for zero-length rows")
    return ExactDissimilarity(
        Fraction(hamming(row_a, row_b), len(row_a)), Metric.SIMPLE_MATCHING)


def jaccard(row_a: Row, row_b: Row) -> ExactDissimilarity:
    """Mismatches / (shared ones + mismatches); two all-zero rows give 0."""
    mismatches = hamming(row_a, row_b)
    both = sum(1 for a, b in zip(row_a, row_b) if a and b)
    if both + mismatches == 0:
        return ExactDissimilarity(Fraction(0), Metric.JACCARD)
    return ExactDissimilarity(Fraction(mismatches, both + mismatches), Metric.JACCARD)


_COMPUTE = {
    Metric.EUCLIDEAN: euclidean,
    Metric.MANHATTAN: manhattan,
    Metric.SIMPLE_MATCHING: simple_matching,
    Metric.JACCARD: jaccard,
}


def distance(metric: Metric, row_a: Row, row_b: Row) -> ExactDissimilarity:
    """Compute the dissimilarity of two rows under the given metric."""
    return _COMPUTE[metric](row_a, row_b)
