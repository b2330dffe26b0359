"""Attacker-side model fitting from a public proxy sample.

The weak attacker knows the graph and learns the tables from the proxy; the
weakest learns structure too.  Structure learning here is a maximum-weight
spanning tree over pairwise empirical mutual information, which is
deterministic and adequate at this scale at the cost of tree-shaped output.
"""
from __future__ import annotations

import csv
import io
import itertools
import math
from dataclasses import dataclass
from pathlib import Path
from typing import Sequence

import numpy as np

from .model import BayesianNetwork, NodeSpec, ONE_HOT, Record, encode


@dataclass(frozen=True)
class ProxyDataset:
    """m full records over a known node schema (names and state labels)."""

    nodes: tuple[str, ...]
    states: dict[str, tuple[str, ...]]
    records: tuple[Record, ...]

    @property
    def m(self) -> int:
        return len(self.records)

    def __post_init__(self):
        if self.m < 1:
            raise ValueError("proxy dataset must contain at least one record")
        for rec in self.records:
            for name in self.nodes:
                if name not in rec:
                    raise ValueError(f"proxy record does not assign node {name}")

    def column(self, name: str) -> list[int]:
        return [rec[name] for rec in self.records]

    @classmethod
    def from_network_samples(
        cls, bn: BayesianNetwork, m: int, rng: np.random.Generator
    ) -> "ProxyDataset":
        from .model import sample

        states = {n.name: n.states for n in bn.nodes}
        records = tuple(sample(bn, rng) for _ in range(m))
        return cls(bn.node_names, states, records)

    @classmethod
    def from_csv(cls, text: str, states: dict[str, tuple[str, ...]] | None = None) -> "ProxyDataset":
        """Header row of node names, one record per line, values are state
        labels.  Without an explicit schema, each column's states are the
        sorted distinct labels it contains."""
        rows = list(csv.reader(io.StringIO(text)))
        if len(rows) < 2:
            raise ValueError("proxy CSV needs a header row and at least one record")
        names = tuple(h.strip() for h in rows[0])
        data = [[cell.strip() for cell in row] for row in rows[1:] if row]
        for row in data:
            if len(row) != len(names):
                raise ValueError("proxy CSV row width does not match the header")
        if states is None:
            states = {
                name: tuple(sorted({row[i] for row in data}))
                for i, name in enumerate(names)
            }
        records = []
        for row in data:
            rec: Record = {}
            for name, label in zip(names, row):
                try:
                    rec[name] = states[name].index(label)
                except ValueError:
                    raise ValueError(f"unknown state {label!r} for node {name}") from None
            records.append(rec)
        return cls(names, dict(states), tuple(records))

    def to_csv(self) -> str:
        out = io.StringIO()
        writer = csv.writer(out, lineterminator="\n")
        writer.writerow(self.nodes)
        for rec in self.records:
            writer.writerow([self.states[n][rec[n]] for n in self.nodes])
        return out.getvalue()


def load_proxy_csv(path: str | Path, states=None) -> ProxyDataset:
    return ProxyDataset.from_csv(Path(path).read_text(encoding="utf-8"), states)


def mle_fit(
    structure: BayesianNetwork, proxy: ProxyDataset, alpha: float = 0.0
) -> BayesianNetwork:
    """Refit every CPT from proxy counts with additive smoothing alpha.

    alpha = 0 is the unsmoothed maximum-likelihood estimate; parent
    combinations never observed then fall back to a uniform row.
    """
    if alpha < 0:
        raise ValueError("smoothing must be nonnegative")
    nodes = []
    for node in structure.nodes:
        k = node.cardinality
        combos = list(
            itertools.product(*(range(structure.node(p).cardinality) for p in node.parents))
        )
        tally = {combo: [0] * k for combo in combos}
        for rec in proxy.records:
            key = tuple(rec[p] for p in node.parents)
            tally[key][rec[node.name]] += 1
        cpt = {}
        for combo in combos:
            row_counts = tally[combo]
            total = sum(row_counts) + alpha * k
            if total == 0:
                cpt[combo] = tuple([1.0 / k] * k)
            else:
                cpt[combo] = tuple((cnt + alpha) / total for cnt in row_counts)
        nodes.append(NodeSpec(node.name, node.states, node.parents, cpt))
    return BayesianNetwork(tuple(nodes), structure.output_nodes, structure.encoding)


def _pair_mutual_information(
    proxy: ProxyDataset, u: str, v: str, alpha: float
) -> float:
    ku, kv = len(proxy.states[u]), len(proxy.states[v])
    joint = np.full((ku, kv), alpha, dtype=float)
    for rec in proxy.records:
        joint[rec[u], rec[v]] += 1.0
    joint /= joint.sum()
    pu = joint.sum(axis=1)
    pv = joint.sum(axis=0)
    mi = 0.0
    for a in range(ku):
        for b in range(kv):
            if joint[a, b] > 0.0 and pu[a] > 0.0 and pv[b] > 0.0:
                mi += joint[a, b] * math.log(joint[a, b] / (pu[a] * pv[b]))
    return mi


def chow_liu_fit(
    proxy: ProxyDataset,
    alpha: float = 0.0,
    output_nodes: Sequence[str] | None = None,
    encoding: str = ONE_HOT,
) -> BayesianNetwork:
    """Learn a tree-shaped network: maximum-weight spanning tree on pairwise
    mutual information (alpha-smoothed cell counts), rooted at the first
    node, with CPTs refit by mle_fit.  Ties break on lexicographic edge name.
    """
    if proxy.m < 2:
        raise ValueError("structure learning needs at least two records")
    names = proxy.nodes
    edges = []
    for u, v in itertools.combinations(names, 2):
        lo, hi = sorted((u, v))
        edges.append((-_pair_mutual_information(proxy, u, v, alpha), lo, hi))
    edges.sort()

    parent_of = {name: name for name in names}

    def find(x: str) -> str:
        while parent_of[x] != x:
            parent_of[x] = parent_of[parent_of[x]]
            x = parent_of[x]
        return x

    chosen: dict[str, set[str]] = {name: set() for name in names}
    picked = 0
    for _, u, v in edges:
        ru, rv = find(u), find(v)
        if ru != rv:
            parent_of[ru] = rv
            chosen[u].add(v)
            chosen[v].add(u)
            picked += 1
            if picked == len(names) - 1:
                break

    root = names[0]
    order = [root]
    parents: dict[str, tuple[str, ...]] = {root: ()}
    frontier = [root]
    seen = {root}
    while frontier:
        nxt = []
        for u in frontier:
            for v in sorted(chosen[u]):
                if v not in seen:
                    parents[v] = (u,)
                    order.append(v)
                    seen.add(v)
                    nxt.append(v)
        frontier = nxt

    skeleton_nodes = tuple(
        NodeSpec(name, proxy.states[name], parents[name], {}) for name in order
    )
    skeleton = BayesianNetwork(
        skeleton_nodes,
        tuple(output_nodes) if output_nodes is not None else names,
        encoding,
    )
    return mle_fit(skeleton, proxy, alpha)


def empirical_marginals(
    proxy: ProxyDataset, output_nodes: Sequence[str], encoding: str
) -> np.ndarray:
    """Per-attribute frequencies in the proxy, clamped away from 0 and 1 so
    ratio attacks stay defined: the clamp is [1/(2m), 1 - 1/(2m)]."""
    states = {name: proxy.states[name] for name in proxy.nodes}
    view = BayesianNetwork(
        tuple(
            NodeSpec(n, states[n], (), {(): (1.0 / len(states[n]),) * len(states[n])})
            for n in proxy.nodes
        ),
        tuple(output_nodes),
        encoding,
    )
    total = np.zeros(view.d)
    for rec in proxy.records:
        total += encode(view, rec)
    freq = total / proxy.m
    lo = 1.0 / (2 * proxy.m)
    return np.clip(freq, lo, 1.0 - lo)
