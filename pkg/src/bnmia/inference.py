"""Exact posterior odds that a target record is in the private dataset.

The evidence is the released integer count vector c = n * mean.  The odds are

    R = P(sum of n-1 fresh draws = c - encode(y)) / P(sum of n draws = c),

computed exactly from the population's output law by iterated convolution
over a map from feasible partial-sum vectors to log probabilities, pruning
any partial sum that exceeds the released counts in some coordinate.  A
brute-force enumeration over full network instances provides an independent
oracle for the same quantity.
"""
from __future__ import annotations

import itertools
import math
from collections import OrderedDict
from dataclasses import dataclass
from weakref import WeakKeyDictionary

import numpy as np

from .model import (
    BayesianNetwork,
    EncodedVector,
    ModelSizeError,
    ReleasedCounts,
    SupportDistribution,
    encode,
    enumerate_full_records,
    output_marginal_law,
)

LOG_ZERO = float("-inf")


class ImpossibleEvidenceError(ValueError):
    """The released counts have probability zero under the attacker's model.

    Distinct from a ratio of zero (which is a valid result meaning the target
    cannot be in the dataset): this signals model mismatch.
    """


@dataclass(frozen=True)
class PosteriorResult:
    """Posterior odds and the fair-coin-prior membership posterior."""

    ratio: float
    log_numerator: float
    log_denominator: float

    @property
    def log_ratio(self) -> float:
        if self.log_numerator == LOG_ZERO:
            return LOG_ZERO
        return self.log_numerator - self.log_denominator

    @property
    def theta_in(self) -> float:
        if math.isinf(self.ratio):
            return 1.0
        return self.ratio / (1.0 + self.ratio)


def _logsumexp(values) -> float:
    values = [v for v in values if v != LOG_ZERO]
    if not values:
        return LOG_ZERO
    m = max(values)
    return m + math.log(math.fsum(math.exp(v - m) for v in values))


def sum_log_table(
    law: SupportDistribution, k: int, cap: tuple[int, ...]
) -> dict[EncodedVector, float]:
    """log P(V_1 + ... + V_k = t) for every reachable t <= cap, V_i iid ~ law.

    Convolution states are pruned against cap coordinatewise, which is sound
    for any query target <= cap.  Outcomes and states are processed in a fixed
    sorted order, so results are bitwise deterministic.
    """
    d = law.d
    if k == 0:
        return {(0,) * d: 0.0}
    keep = [i for i, (vec, _) in enumerate(law.outcomes) if all(v <= c for v, c in zip(vec, cap))]
    if not keep:
        return {}
    vecs = law.vectors()[keep]
    logp_out = np.log(law.probs()[keep])

    radix = np.array([c + 1 for c in cap], dtype=np.int64)
    bits = float(np.sum(np.log2(radix)))
    if bits > 62:
        return _sum_log_table_dict(vecs, logp_out, k, cap)

    strides = np.ones(d, dtype=np.int64)
    for j in range(d - 2, -1, -1):
        strides[j] = strides[j + 1] * radix[j + 1]
    offsets = vecs @ strides
    cap_arr = np.array(cap, dtype=np.int64)

    keys = np.zeros(1, dtype=np.int64)
    logp = np.zeros(1, dtype=float)
    for _ in range(k):
        digits = (keys[:, None] // strides[None, :]) % radix[None, :]
        chunks_k, chunks_p = [], []
        for i in range(len(offsets)):
            set_bits = np.flatnonzero(vecs[i])
            mask = None
            for j in set_bits:
                cond = digits[:, j] < cap_arr[j]
                mask = cond if mask is None else (mask & cond)
            if mask is None:
                chunks_k.append(keys + offsets[i])
                chunks_p.append(logp + logp_out[i])
            else:
                chunks_k.append(keys[mask] + offsets[i])
                chunks_p.append(logp[mask] + logp_out[i])
        cand_k = np.concatenate(chunks_k)
        cand_p = np.concatenate(chunks_p)
        keys, logp = _grouped_logsumexp(cand_k, cand_p)

    digits = (keys[:, None] // strides[None, :]) % radix[None, :]
    return {tuple(int(x) for x in row): float(v) for row, v in zip(digits, logp)}


def _grouped_logsumexp(keys: np.ndarray, vals: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    order = np.argsort(keys, kind="stable")
    k = keys[order]
    v = vals[order]
    new_group = np.concatenate(([True], k[1:] != k[:-1]))
    starts = np.flatnonzero(new_group)
    gidx = np.cumsum(new_group) - 1
    m = np.maximum.reduceat(v, starts)
    sums = np.add.reduceat(np.exp(v - m[gidx]), starts)
    return k[starts], m + np.log(sums)


def _sum_log_table_dict(vecs, logp_out, k, cap) -> dict[EncodedVector, float]:
    """Fallback for very wide networks where packed int64 keys would overflow."""
    out_list = sorted(
        (tuple(int(x) for x in vec), float(lp)) for vec, lp in zip(vecs, logp_out)
    )
    table = {(0,) * len(cap): 0.0}
    for _ in range(k):
        new: dict[EncodedVector, float] = {}
        for part in sorted(table):
            pp = table[part]
            for vec, lp in out_list:
                s = tuple(a + b for a, b in zip(part, vec))
                if any(a > c for a, c in zip(s, cap)):
                    continue
                prev = new.get(s)
                total = pp + lp
                new[s] = total if prev is None else float(np.logaddexp(prev, total))
        table = new
    return table


def sum_count_prob(law: SupportDistribution, k: int, target) -> float:
    """Exact P(V_1 + ... + V_k = target) for V_i iid ~ law."""
    if k < 0:
        raise ValueError("k must be nonnegative")
    target = tuple(int(t) for t in target)
    if len(target) != law.d:
        raise ValueError(f"target has length {len(target)}, expected {law.d}")
    if any(t < 0 for t in target):
        return 0.0
    if k == 0:
        return 1.0 if all(t == 0 for t in target) else 0.0
    if any(t > k for t in target):
        return 0.0
    lp = sum_log_table(law, k, target).get(target)
    return 0.0 if lp is None else math.exp(lp)


class PosteriorEngine:
    """Posterior odds for many targets against one released count vector.

    Builds the (n-1)-fold convolution table once; each target then costs a
    table lookup.  The denominator is the table convolved one more step with
    the law, evaluated at the released counts.
    """

    def __init__(self, law: SupportDistribution, counts: ReleasedCounts):
        if counts.n < 1:
            raise ValueError("need at least one record")
        if len(counts.counts) != law.d:
            raise ValueError("released counts have the wrong dimension")
        if any(c < 0 or c > counts.n for c in counts.counts):
            raise ValueError("released counts must lie in [0, n]")
        self.law = law
        self.counts = counts
        c = counts.counts
        self._table = sum_log_table(law, counts.n - 1, c)
        terms = []
        for vec, p in law.outcomes:
            diff = tuple(a - b for a, b in zip(c, vec))
            if any(x < 0 for x in diff):
                continue
            lp = self._table.get(diff)
            if lp is not None:
                terms.append(lp + math.log(p))
        self.log_denominator = _logsumexp(terms)
        if self.log_denominator == LOG_ZERO:
            raise ImpossibleEvidenceError(
                "impossible evidence: released counts have probability zero under BN"
            )

    def result(self, y: EncodedVector) -> PosteriorResult:
        y = tuple(int(b) for b in y)
        if len(y) != self.law.d:
            raise ValueError("target has the wrong dimension")
        diff = tuple(a - b for a, b in zip(self.counts.counts, y))
        if any(x < 0 for x in diff):
            log_num = LOG_ZERO
        else:
            lp = self._table.get(diff)
            log_num = LOG_ZERO if lp is None else lp
        ratio = 0.0 if log_num == LOG_ZERO else math.exp(log_num - self.log_denominator)
        return PosteriorResult(ratio, log_num, self.log_denominator)


_ENGINE_CACHE: WeakKeyDictionary = WeakKeyDictionary()
_ENGINE_CACHE_SIZE = 8


def posterior_engine(law: SupportDistribution, counts: ReleasedCounts) -> PosteriorEngine:
    """Engine for (law, counts), cached so repeated targets share the table."""
    per_law = _ENGINE_CACHE.get(law)
    if per_law is None:
        per_law = OrderedDict()
        _ENGINE_CACHE[law] = per_law
    key = (counts.n, counts.counts)
    engine = per_law.get(key)
    if engine is None:
        engine = PosteriorEngine(law, counts)
        per_law[key] = engine
        while len(per_law) > _ENGINE_CACHE_SIZE:
            per_law.popitem(last=False)
    else:
        per_law.move_to_end(key)
    return engine


def posterior_ratio(
    bn: BayesianNetwork, counts: ReleasedCounts, y: EncodedVector
) -> PosteriorResult:
    """Exact membership odds for one target under the given network."""
    law = output_marginal_law(bn)
    return posterior_engine(law, counts).result(y)


def closed_form_product_ratio(mu, counts: ReleasedCounts, y: EncodedVector) -> float:
    """The per-coordinate binomial closed form, valid for product populations.

    Each coordinate contributes mean_j / mu_j when the target bit is set and
    (1 - mean_j) / (1 - mu_j) otherwise; evaluated in log space.
    """
    mu = tuple(float(q) for q in mu)
    if any(not (0.0 < q < 1.0) for q in mu):
        raise ValueError("population marginals must lie strictly inside (0, 1)")
    n = counts.n
    log_total = 0.0
    for c_j, mu_j, y_j in zip(counts.counts, mu, y):
        xbar = c_j / n
        num = xbar if y_j else 1.0 - xbar
        den = mu_j if y_j else 1.0 - mu_j
        if num == 0.0:
            return 0.0
        log_total += math.log(num) - math.log(den)
    return math.exp(log_total)


_BRUTE_CACHE: WeakKeyDictionary = WeakKeyDictionary()


def _brute_sum_table(bn: BayesianNetwork, k: int) -> dict[EncodedVector, float]:
    """P(sum of k encoded draws = t) by enumerating every tuple of full
    network instances and summing joint probabilities in linear space."""
    per_net = _BRUTE_CACHE.setdefault(bn, {})
    table = per_net.get(k)
    if table is not None:
        return table
    instances = [(encode(bn, rec), p) for rec, p in enumerate_full_records(bn)]
    d = bn.d
    table = {}
    for combo in itertools.product(instances, repeat=k):
        total = [0] * d
        prob = 1.0
        for vec, p in combo:
            prob *= p
            for j, b in enumerate(vec):
                total[j] += b
        key = tuple(total)
        table[key] = table.get(key, 0.0) + prob
    per_net[k] = table
    return table


def brute_force_posterior(
    bn: BayesianNetwork,
    counts: ReleasedCounts,
    y: EncodedVector,
    guard: int = 10_000_000,
) -> PosteriorResult:
    """Oracle: enumerate every assignment of n independent network instances.

    Sums the joint probabilities of the assignments satisfying each branch's
    evidence directly, with no convolution, pruning, or log-space tricks.
    """
    n = counts.n
    if bn.joint_state_count ** n > guard:
        raise ModelSizeError(
            f"brute force would enumerate {bn.joint_state_count}^{n} assignments"
        )
    y = tuple(int(b) for b in y)
    c = counts.counts
    denominator = _brute_sum_table(bn, n).get(c, 0.0)
    diff = tuple(a - b for a, b in zip(c, y))
    numerator = 0.0 if any(x < 0 for x in diff) else _brute_sum_table(bn, n - 1).get(diff, 0.0)
    if denominator == 0.0:
        raise ImpossibleEvidenceError(
            "impossible evidence: released counts have probability zero under BN"
        )
    log_num = math.log(numerator) if numerator > 0.0 else LOG_ZERO
    return PosteriorResult(
        numerator / denominator, log_num, math.log(denominator)
    )
