"""Discrete Bayesian networks with explicit conditional probability tables.

Provides the in-memory network model plus the operations everything else is
built on: validation, joint probability, the exact distribution of the encoded
output attributes, ancestral sampling, and the raw-binary / one-hot encodings
of records and datasets.
"""
from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from typing import Iterable, Sequence

import numpy as np

RAW_BINARY = "raw-binary"
ONE_HOT = "one-hot"
ENCODINGS = (RAW_BINARY, ONE_HOT)

# CPT rows must sum to 1 within this tolerance to be accepted.
ROW_SUM_TOL = 1e-12
# Default ceiling on the full joint state count for exhaustive enumeration.
DEFAULT_STATE_GUARD = 10_000_000

# A record maps node name -> state index.  Full records assign every node;
# projected records assign (at least) every output node.
Record = dict[str, int]
# Encoded records are 0/1 bit vectors of length d.
EncodedVector = tuple[int, ...]


class ModelSizeError(ValueError):
    """Raised when an exhaustive computation would exceed its state guard."""


@dataclass(frozen=True)
class NodeSpec:
    """One discrete node: ordered states, ordered parents, and its CPT.

    The CPT maps each combination of parent state indices (in parent order)
    to a probability row over this node's states.
    """

    name: str
    states: tuple[str, ...]
    parents: tuple[str, ...] = ()
    cpt: dict[tuple[int, ...], tuple[float, ...]] = field(default_factory=dict)

    @property
    def cardinality(self) -> int:
        return len(self.states)

    def state_index(self, label: str) -> int:
        return self.states.index(label)


@dataclass(eq=False)
class BayesianNetwork:
    """A DAG of NodeSpecs (topologically ordered) plus the released attributes.

    `output_nodes` names the nodes whose values make up the released records;
    `encoding` controls how those values become bit vectors.  Instances are
    immutable by convention after construction and safe to share across
    workers; derived quantities are cached lazily.
    """

    nodes: tuple[NodeSpec, ...]
    output_nodes: tuple[str, ...] = ()
    encoding: str = ONE_HOT

    def __post_init__(self):
        self.nodes = tuple(self.nodes)
        self.output_nodes = tuple(self.output_nodes)
        self._by_name = {n.name: n for n in self.nodes}
        self._law = None
        self._cum_rows = None

    def node(self, name: str) -> NodeSpec:
        return self._by_name[name]

    @property
    def node_names(self) -> tuple[str, ...]:
        return tuple(n.name for n in self.nodes)

    @property
    def joint_state_count(self) -> int:
        return math.prod(n.cardinality for n in self.nodes)

    @property
    def d(self) -> int:
        """Dimension of the encoded output vector."""
        if self.encoding == RAW_BINARY:
            return len(self.output_nodes)
        return sum(self._by_name[v].cardinality for v in self.output_nodes)

    def with_outputs(self, output_nodes: Sequence[str], encoding: str) -> "BayesianNetwork":
        return BayesianNetwork(self.nodes, tuple(output_nodes), encoding)


@dataclass(eq=False)
class SupportDistribution:
    """Exact distribution over encoded output vectors: the population's law.

    Outcomes are sorted by vector, carry strictly positive probabilities, and
    sum to 1 within 1e-9.
    """

    outcomes: tuple[tuple[EncodedVector, float], ...]
    d: int

    def __post_init__(self):
        self._index = {vec: p for vec, p in self.outcomes}
        self._vectors = None
        self._probs = None

    def prob(self, vec: EncodedVector) -> float:
        return self._index.get(tuple(vec), 0.0)

    def vectors(self) -> np.ndarray:
        if self._vectors is None:
            self._vectors = np.array([v for v, _ in self.outcomes], dtype=np.int64).reshape(
                len(self.outcomes), self.d
            )
        return self._vectors

    def probs(self) -> np.ndarray:
        if self._probs is None:
            self._probs = np.array([p for _, p in self.outcomes], dtype=float)
        return self._probs

    def __len__(self) -> int:
        return len(self.outcomes)


@dataclass(frozen=True)
class Dataset:
    """A private dataset of projected records over one output node set."""

    records: tuple[Record, ...]

    @property
    def n(self) -> int:
        return len(self.records)


@dataclass(frozen=True)
class ReleasedCounts:
    """The released statistic, kept as exact integer column sums c = n * mean."""

    counts: tuple[int, ...]
    n: int

    @property
    def means(self) -> tuple[float, ...]:
        return tuple(c / self.n for c in self.counts)


def validate(bn: BayesianNetwork) -> list[str]:
    """Check every structural invariant; returns one message per violation.

    An empty list means the network is well formed.  Violations are data, not
    exceptions, so broken networks can be inspected.
    """
    problems: list[str] = []
    if bn.encoding not in ENCODINGS:
        problems.append(f"unknown encoding {bn.encoding!r}")

    names = [n.name for n in bn.nodes]
    seen: set[str] = set()
    for name in names:
        if name in seen:
            problems.append(f"node {name}: duplicate declaration")
        seen.add(name)

    declared = set(names)
    position = {name: i for i, name in enumerate(names)}

    for node in bn.nodes:
        if node.cardinality < 2:
            problems.append(f"node {node.name}: fewer than 2 states")
        if len(set(node.states)) != node.cardinality:
            problems.append(f"node {node.name}: duplicate state labels")
        unknown = [p for p in node.parents if p not in declared]
        for p in unknown:
            problems.append(f"node {node.name}: unknown parent {p}")
        if unknown:
            continue
        for p in node.parents:
            if position[p] >= position[node.name]:
                problems.append(f"node {node.name}: listed before its parent {p}")
        expected = set(
            itertools.product(*(range(bn.node(p).cardinality) for p in node.parents))
        )
        got = set(node.cpt)
        for combo in sorted(expected - got):
            labels = tuple(bn.node(p).states[s] for p, s in zip(node.parents, combo))
            problems.append(f"node {node.name}: missing CPT row for {labels}")
        for combo in sorted(got - expected):
            problems.append(f"node {node.name}: unexpected CPT row key {combo}")
        for combo in sorted(expected & got):
            row = node.cpt[combo]
            if len(row) != node.cardinality:
                problems.append(
                    f"node {node.name}: row {combo} has length {len(row)}, expected {node.cardinality}"
                )
                continue
            if any(not (0.0 <= p <= 1.0) for p in row):
                problems.append(f"node {node.name}: row {combo} has entries outside [0, 1]")
            if abs(math.fsum(row) - 1.0) > ROW_SUM_TOL:
                problems.append(f"node {node.name}: row {combo} sum != 1")

    if _has_cycle(bn):
        problems.append("cycle: the parent graph is not acyclic")

    out_seen: set[str] = set()
    for v in bn.output_nodes:
        if v not in declared:
            problems.append(f"output node {v} is not declared")
        elif v in out_seen:
            problems.append(f"output node {v} listed twice")
        out_seen.add(v)
    if bn.encoding == RAW_BINARY:
        for v in bn.output_nodes:
            if v in declared and bn.node(v).cardinality != 2:
                problems.append(f"raw-binary encoding requires binary nodes: {v}")
    return problems


def _has_cycle(bn: BayesianNetwork) -> bool:
    declared = {n.name for n in bn.nodes}
    edges = {n.name: [p for p in n.parents if p in declared] for n in bn.nodes}
    state: dict[str, int] = {}  # 0 visiting, 1 done

    def visit(v: str) -> bool:
        if state.get(v) == 1:
            return False
        if state.get(v) == 0:
            return True
        state[v] = 0
        if any(visit(p) for p in edges[v]):
            return True
        state[v] = 1
        return False

    return any(visit(v) for v in edges)


def joint_prob(bn: BayesianNetwork, full: Record) -> float:
    """Chain-rule probability of a full assignment."""
    prob = 1.0
    for node in bn.nodes:
        if node.name not in full:
            raise ValueError(f"record does not assign node {node.name}")
        row = node.cpt[tuple(full[p] for p in node.parents)]
        prob *= row[full[node.name]]
    return prob


def output_marginal_law(
    bn: BayesianNetwork, guard: int = DEFAULT_STATE_GUARD
) -> SupportDistribution:
    """Exact law of the encoded output vector, by exhaustive enumeration.

    Sums the joint probability over all assignments of the non-output nodes;
    zero-probability branches are pruned as they appear and zero-probability
    outcomes are dropped.  Cached on the network instance.
    """
    if bn._law is not None:
        return bn._law
    if bn.joint_state_count > guard:
        raise ModelSizeError(
            f"network too large for exhaustive marginalization: "
            f"{bn.joint_state_count} joint states > guard {guard}"
        )
    acc: dict[EncodedVector, float] = {}
    nodes = bn.nodes
    rec: Record = {}

    def walk(i: int, p: float) -> None:
        if i == len(nodes):
            vec = encode(bn, rec)
            acc[vec] = acc.get(vec, 0.0) + p
            return
        node = nodes[i]
        row = node.cpt[tuple(rec[q] for q in node.parents)]
        for s, ps in enumerate(row):
            if ps > 0.0:
                rec[node.name] = s
                walk(i + 1, p * ps)
        rec.pop(node.name, None)

    walk(0, 1.0)
    total = math.fsum(acc.values())
    if abs(total - 1.0) > 1e-9:
        raise ValueError(f"output law does not normalize: total probability {total!r}")
    law = SupportDistribution(tuple(sorted(acc.items())), d=bn.d)
    bn._law = law
    return law


def attribute_marginals(bn: BayesianNetwork, guard: int = DEFAULT_STATE_GUARD) -> np.ndarray:
    """Per-attribute probability of bit 1 under the output law."""
    law = output_marginal_law(bn, guard=guard)
    return law.probs() @ law.vectors()


def sample(bn: BayesianNetwork, rng: np.random.Generator) -> Record:
    """Draw one full record by ancestral sampling in topological order."""
    if bn._cum_rows is None:
        bn._cum_rows = {
            node.name: {combo: np.cumsum(row) for combo, row in node.cpt.items()}
            for node in bn.nodes
        }
    rec: Record = {}
    for node in bn.nodes:
        cum = bn._cum_rows[node.name][tuple(rec[p] for p in node.parents)]
        rec[node.name] = int(np.searchsorted(cum, rng.random(), side="right"))
    return rec


def encode(bn: BayesianNetwork, rec: Record) -> EncodedVector:
    """Encode a projected record as a bit vector per the network's encoding."""
    if bn.encoding == RAW_BINARY:
        bits = []
        for v in bn.output_nodes:
            if bn.node(v).cardinality != 2:
                raise ValueError(f"raw-binary encoding requires binary nodes: {v}")
            bits.append(rec[v])
        return tuple(bits)
    bits = []
    for v in bn.output_nodes:
        k = bn.node(v).cardinality
        block = [0] * k
        block[rec[v]] = 1
        bits.extend(block)
    return tuple(bits)


def decode(bn: BayesianNetwork, vec: EncodedVector) -> Record:
    """Invert encode; the projected record over the output nodes."""
    rec: Record = {}
    if bn.encoding == RAW_BINARY:
        if len(vec) != len(bn.output_nodes):
            raise ValueError("encoded vector has wrong length")
        for v, bit in zip(bn.output_nodes, vec):
            rec[v] = int(bit)
        return rec
    pos = 0
    for v in bn.output_nodes:
        k = bn.node(v).cardinality
        block = vec[pos : pos + k]
        if sum(block) != 1:
            raise ValueError(f"one-hot block for {v} does not sum to 1")
        rec[v] = block.index(1)
        pos += k
    if pos != len(vec):
        raise ValueError("encoded vector has wrong length")
    return rec


def project(bn: BayesianNetwork, full: Record) -> Record:
    """Restrict a record to the output nodes."""
    return {v: full[v] for v in bn.output_nodes}


def dataset_counts(ds: Dataset, bn: BayesianNetwork) -> ReleasedCounts:
    """Exact integer column sums of the encoded dataset."""
    if ds.n < 1:
        raise ValueError("dataset must contain at least one record")
    totals = [0] * bn.d
    for rec in ds.records:
        for j, bit in enumerate(encode(bn, rec)):
            totals[j] += bit
    return ReleasedCounts(tuple(totals), ds.n)


def enumerate_full_records(bn: BayesianNetwork) -> Iterable[tuple[Record, float]]:
    """All full assignments with positive probability, with their joint probability."""
    nodes = bn.nodes
    rec: Record = {}

    def walk(i: int, p: float):
        if i == len(nodes):
            yield dict(rec), p
            return
        node = nodes[i]
        row = node.cpt[tuple(rec[q] for q in node.parents)]
        for s, ps in enumerate(row):
            if ps > 0.0:
                rec[node.name] = s
                yield from walk(i + 1, p * ps)
        rec.pop(node.name, None)

    yield from walk(0, 1.0)
