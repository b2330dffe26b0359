"""Decision statistics for the membership game, and the thresholded rule.

Three families: marginal ratio tests (optionally clipped to an index range),
the inner product test, and the exact Bayesian posterior odds.  Ratio scores
are kept in log space; a zero factor dominates and yields -inf, never NaN.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

from .model import BayesianNetwork, EncodedVector, ReleasedCounts
from .inference import posterior_ratio
from .populations import LEFT, RIGHT, midpoint

IN = "IN"
OUT = "OUT"
AMBIGUOUS = "ambiguous"

LRT = "lrt"
LRT_CLIPPED = "lrt_clipped"
INNER_PRODUCT = "inner_product"
BAYES = "bayes"


@dataclass(frozen=True)
class AttackScore:
    """A comparable decision statistic: log ratio for the ratio attacks,
    the raw inner product otherwise."""

    kind: str
    value: float

    def __post_init__(self):
        if math.isnan(self.value):
            raise ValueError("attack scores must never be NaN")


@dataclass(frozen=True)
class ClipRange:
    """Inclusive 1-based attribute index range an attack is restricted to."""

    lo: int
    hi: int

    def __post_init__(self):
        if not 1 <= self.lo <= self.hi:
            raise ValueError(f"bad clip range [{self.lo}, {self.hi}]")

    def indices(self, d: int) -> range:
        if self.hi > d:
            raise ValueError(f"clip range [{self.lo}, {self.hi}] exceeds dimension {d}")
        return range(self.lo - 1, self.hi)


def _log_ratio_terms(mu, counts: ReleasedCounts, y: EncodedVector, indices) -> float:
    n = counts.n
    total = 0.0
    for j in indices:
        mu_j = float(mu[j])
        if not 0.0 < mu_j < 1.0:
            raise ValueError("population marginals must lie strictly inside (0, 1)")
        xbar = counts.counts[j] / n
        num = xbar if y[j] else 1.0 - xbar
        den = mu_j if y[j] else 1.0 - mu_j
        if num == 0.0:
            return float("-inf")
        total += math.log(num) - math.log(den)
    return total


def lrt_score(mu, counts: ReleasedCounts, y: EncodedVector) -> AttackScore:
    """Log ratio of the target's probability under the dataset means vs the
    population marginals, treating attributes as independent."""
    return AttackScore(LRT, _log_ratio_terms(mu, counts, y, range(len(y))))


def lrt_clipped_score(
    mu, counts: ReleasedCounts, y: EncodedVector, clip: ClipRange
) -> AttackScore:
    """The ratio test restricted to the clip range (neutralizes repeated
    attributes when the range excludes the copies)."""
    return AttackScore(LRT_CLIPPED, _log_ratio_terms(mu, counts, y, clip.indices(len(y))))


def half_clip_range(d: int) -> ClipRange:
    """Clip that keeps the independent attributes of a half-repeated population."""
    return ClipRange(1, midpoint(d))


def side_clip_range(d: int, side: str) -> ClipRange:
    """Clip for one side of the left/right population: the independent block
    plus one representative of the repeated block."""
    m = midpoint(d)
    if side == RIGHT:
        return ClipRange(1, m)
    if side == LEFT:
        return ClipRange(m - 1, d)
    raise ValueError(f"side must be {LEFT!r} or {RIGHT!r}")


def choose_side(counts: ReleasedCounts, d: int) -> str:
    """Guess which side of the attributes is repeated from the counts alone:
    a constant block of counts betrays the copies."""
    if d % 2 != 0:
        raise ValueError("d must be even")
    m = midpoint(d)
    c = counts.counts
    left_const = len(set(c[: m - 1])) == 1
    right_const = len(set(c[m - 1 :])) == 1
    if right_const and not left_const:
        return RIGHT
    if left_const and not right_const:
        return LEFT
    return AMBIGUOUS


def inner_product_score(mu, counts: ReleasedCounts, y: EncodedVector) -> AttackScore:
    """How much the target shifts the released means away from the population."""
    n = counts.n
    value = sum((counts.counts[j] / n - float(mu[j])) * y[j] for j in range(len(y)))
    return AttackScore(INNER_PRODUCT, value)


def bayes_score(
    attacker_bn: BayesianNetwork, counts: ReleasedCounts, y: EncodedVector
) -> AttackScore:
    """Log posterior odds computed exactly under the attacker's network.

    Impossible evidence (counts with probability zero under the attacker's
    model) propagates as an error; it signals model mismatch, not a score.
    """
    return AttackScore(BAYES, posterior_ratio(attacker_bn, counts, y).log_ratio)


def decide(score: AttackScore, threshold: float) -> str:
    """IN iff the score strictly exceeds the threshold."""
    return IN if score.value > threshold else OUT
