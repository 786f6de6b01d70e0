"""Discrete Bayesian-network representation.

A Network is an immutable DAG of named nodes. Each node carries a state
space and a CPD spec; at build time every CPD is expanded to a tabular
factor of shape (*parent_cards, child_card) and validated row by row.
Count-style nodes attach integer intervals to their states so posteriors
can be summarized as means.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Mapping

import numpy as np

from .errors import (
    CpdShapeMismatch,
    CycleDetected,
    RowNotNormalized,
    UnknownNode,
    UnknownParent,
    ValidationError,
)

ROW_SUM_TOL = 1e-9

RANKED_LEVELS = ("VeryLow", "Low", "Medium", "High", "VeryHigh")
USAGE_LEVELS = ("None", "Low", "Medium", "High", "VeryHigh")

#: Midpoints of the five [0,1] bins a ranked level maps onto.
RANKED_MIDPOINTS = (0.1, 0.3, 0.5, 0.7, 0.9)


@dataclass(frozen=True)
class StateSpace:
    """Ordered state labels, optionally backed by integer count intervals.

    Intervals are closed integer ranges [lower, upper] (upper is None for a
    final unbounded interval); contiguity means the next lower bound is
    upper + 1, i.e. interval i covers the real range [lower_i, lower_{i+1}).
    """

    states: tuple[str, ...]
    kind: str = "labeled"  # labeled | ranked5 | count
    intervals: tuple[tuple[int, int | None], ...] | None = None
    unbounded_rep_factor: float = 1.5

    def __post_init__(self):
        if len(self.states) < 2:
            raise ValidationError(f"state space needs at least 2 states, got {len(self.states)}")
        if len(set(self.states)) != len(self.states):
            raise ValidationError(f"duplicate state labels: {self.states}")
        if self.kind not in ("labeled", "ranked5", "count"):
            raise ValidationError(f"unknown state-space kind {self.kind!r}")
        if self.kind == "ranked5" and self.states != RANKED_LEVELS:
            raise ValidationError("ranked5 spaces use the canonical VeryLow..VeryHigh scale")
        if self.kind == "count" and self.intervals is None:
            raise ValidationError("count spaces require intervals")
        if self.intervals is not None:
            self._check_intervals()

    def _check_intervals(self):
        iv = self.intervals
        if len(iv) != len(self.states):
            raise ValidationError(
                f"{len(iv)} intervals for {len(self.states)} states")
        prev_upper = None
        for i, (lo, hi) in enumerate(iv):
            if lo < 0:
                raise ValidationError(f"interval {i} has negative lower bound {lo}")
            if hi is None:
                if i != len(iv) - 1:
                    raise ValidationError("only the final interval may be unbounded")
            elif hi < lo:
                raise ValidationError(f"interval {i} has upper {hi} < lower {lo}")
            if prev_upper is not None and lo != prev_upper + 1:
                raise ValidationError(
                    f"intervals not contiguous at index {i}: expected lower {prev_upper + 1}, got {lo}")
            prev_upper = hi

    @property
    def card(self) -> int:
        return len(self.states)

    def index_of(self, state: str) -> int:
        try:
            return self.states.index(state)
        except ValueError:
            raise ValidationError(f"state {state!r} not in {self.states}") from None

    # --- interval helpers ---------------------------------------------------

    def representative(self, i: int) -> float:
        """Interval representative: midpoint, or 1.5*lower for the unbounded tail."""
        lo, hi = self.intervals[i]
        if hi is None:
            return lo * self.unbounded_rep_factor
        return (lo + hi) / 2.0

    def representatives(self) -> np.ndarray:
        return np.array([self.representative(i) for i in range(self.card)])

    def interval_index(self, value: float) -> int | None:
        """Index of the interval whose real range [lower, upper+1) holds value."""
        if value < self.intervals[0][0]:
            return None
        for i, (lo, hi) in enumerate(self.intervals):
            if hi is None or value < hi + 1:
                if value >= lo:
                    return i
        return None


def binary_space() -> StateSpace:
    return StateSpace(("false", "true"))


def ranked5_space() -> StateSpace:
    return StateSpace(RANKED_LEVELS, kind="ranked5")


def count_space(intervals: Iterable[tuple[int, int | None]],
                unbounded_rep_factor: float = 1.5) -> StateSpace:
    """Count space with auto-generated labels: "0", "1-2", "3+"."""
    iv = tuple((int(lo), None if hi is None else int(hi)) for lo, hi in intervals)
    labels = []
    for lo, hi in iv:
        if hi is None:
            labels.append(f"{lo}+")
        elif hi == lo:
            labels.append(str(lo))
        else:
            labels.append(f"{lo}-{hi}")
    return StateSpace(tuple(labels), kind="count", intervals=iv,
                      unbounded_rep_factor=unbounded_rep_factor)


@dataclass(frozen=True)
class Node:
    """A node spec: id, state space, ordered parents, and a CPD spec.

    The cpd object must provide expand(parent_spaces, child_space) -> ndarray
    of shape (*parent_cards, child_card).
    """

    id: str
    space: StateSpace
    cpd: object
    parents: tuple[str, ...] = ()


@dataclass(frozen=True)
class Hard:
    state: str


@dataclass(frozen=True)
class Soft:
    weights: tuple[float, ...]


@dataclass(frozen=True)
class Evidence:
    """Per-node hard state assignments or soft likelihood vectors."""

    entries: Mapping[str, Hard | Soft] = field(default_factory=dict)

    def validate(self, net: "Network") -> None:
        for node_id, entry in self.entries.items():
            if node_id not in net.nodes:
                raise UnknownNode(f"evidence on unknown node {node_id!r}")
            space = net.nodes[node_id].space
            if isinstance(entry, Hard):
                if entry.state not in space.states:
                    raise ValidationError(
                        f"evidence state {entry.state!r} not in states of {node_id!r}")
            elif isinstance(entry, Soft):
                w = np.asarray(entry.weights, dtype=float)
                if w.shape != (space.card,):
                    raise ValidationError(
                        f"soft vector on {node_id!r} has length {w.size}, expected {space.card}")
                if np.any(w < 0) or not np.any(w > 0):
                    raise ValidationError(
                        f"soft vector on {node_id!r} must be nonnegative and not all zero")
            else:
                raise ValidationError(f"evidence entry on {node_id!r} is neither Hard nor Soft")

    def likelihood(self, net: "Network", node_id: str) -> np.ndarray | None:
        """Likelihood vector this evidence implies for one node, or None."""
        entry = self.entries.get(node_id)
        if entry is None:
            return None
        space = net.nodes[node_id].space
        if isinstance(entry, Hard):
            vec = np.zeros(space.card)
            vec[space.index_of(entry.state)] = 1.0
            return vec
        return np.asarray(entry.weights, dtype=float)


EMPTY_EVIDENCE = Evidence({})


def evidence(entries: Mapping[str, Hard | Soft] | None = None, **kw: Hard | Soft) -> Evidence:
    """Convenience constructor: evidence({"a": Hard("true")}) or evidence(a=Hard("true"))."""
    merged: dict[str, Hard | Soft] = dict(entries or {})
    merged.update(kw)
    return Evidence(merged)


class Network:
    """Validated, immutable network with all CPDs expanded to tables."""

    def __init__(self, nodes: dict[str, Node], tables: dict[str, np.ndarray],
                 topo_order: tuple[str, ...], metadata: dict | None = None):
        self.nodes = nodes
        self.tables = tables
        self.topo_order = topo_order
        #: Free-form document metadata (e.g. the defect-template block); not
        #: used by inference.
        self.metadata = metadata or {}
        for t in tables.values():
            t.setflags(write=False)

    @property
    def node_ids(self) -> tuple[str, ...]:
        return self.topo_order

    def node(self, node_id: str) -> Node:
        try:
            return self.nodes[node_id]
        except KeyError:
            raise UnknownNode(f"unknown node {node_id!r}") from None

    def space(self, node_id: str) -> StateSpace:
        return self.node(node_id).space

    def table(self, node_id: str) -> np.ndarray:
        self.node(node_id)
        return self.tables[node_id]

    def parents(self, node_id: str) -> tuple[str, ...]:
        return self.node(node_id).parents

    def joint_size(self) -> int:
        size = 1
        for n in self.nodes.values():
            size *= n.space.card
        return size

    def with_metadata(self, metadata: dict) -> "Network":
        return Network(self.nodes, self.tables, self.topo_order, metadata)


def _topological_order(nodes: dict[str, Node]) -> tuple[str, ...]:
    indeg = {nid: 0 for nid in nodes}
    children: dict[str, list[str]] = {nid: [] for nid in nodes}
    for node in nodes.values():
        for p in node.parents:
            if p not in nodes:
                raise UnknownParent(f"node {node.id!r} references unknown parent {p!r}")
            indeg[node.id] += 1
            children[p].append(node.id)
    ready = sorted(nid for nid, d in indeg.items() if d == 0)
    order: list[str] = []
    while ready:
        nid = ready.pop(0)
        order.append(nid)
        for child in sorted(children[nid]):
            indeg[child] -= 1
            if indeg[child] == 0:
                ready.append(child)
        ready.sort()
    if len(order) != len(nodes):
        stuck = sorted(nid for nid, d in indeg.items() if d > 0)
        raise CycleDetected(f"cycle detected among nodes {stuck}")
    return tuple(order)


def _validate_table(node_id: str, table: np.ndarray, cards: tuple[int, ...]) -> np.ndarray:
    if table.shape != cards:
        raise CpdShapeMismatch(
            f"node {node_id!r}: CPD expands to shape {table.shape}, expected {cards}")
    rows = table.reshape(-1, cards[-1])
    if np.any(rows < -1e-12) or np.any(rows > 1.0 + ROW_SUM_TOL):
        bad = int(np.argwhere((rows < -1e-12) | (rows > 1.0 + ROW_SUM_TOL))[0][0])
        raise RowNotNormalized(
            f"node {node_id!r}: row {bad} has entries outside [0, 1]",
            node_id=node_id, row_index=bad)
    sums = rows.sum(axis=1)
    off = np.abs(sums - 1.0)
    if np.any(off > ROW_SUM_TOL):
        bad = int(np.argmax(off))
        raise RowNotNormalized(
            f"node {node_id!r}: row {bad} sums to {sums[bad]:.12g}, not 1",
            node_id=node_id, row_index=bad)
    # Drift within tolerance: renormalize so downstream algebra sees exact rows.
    rows = np.clip(rows, 0.0, None)
    rows = rows / rows.sum(axis=1, keepdims=True)
    return rows.reshape(cards)


def build_network(node_specs: Iterable[Node], metadata: dict | None = None) -> Network:
    """Validate specs, expand every CPD to tabular form, and freeze the result.

    Raises CycleDetected, UnknownParent, CpdShapeMismatch, or RowNotNormalized
    (naming the offending node and row).
    """
    nodes: dict[str, Node] = {}
    for spec in node_specs:
        if spec.id in nodes:
            raise ValidationError(f"duplicate node id {spec.id!r}")
        if len(set(spec.parents)) != len(spec.parents):
            raise ValidationError(f"node {spec.id!r} lists a parent more than once")
        if spec.id in spec.parents:
            raise CycleDetected(f"node {spec.id!r} is its own parent")
        nodes[spec.id] = spec
    topo = _topological_order(nodes)
    tables: dict[str, np.ndarray] = {}
    for nid in topo:
        node = nodes[nid]
        parent_spaces = tuple(nodes[p].space for p in node.parents)
        cards = tuple(s.card for s in parent_spaces) + (node.space.card,)
        try:
            table = np.asarray(node.cpd.expand(parent_spaces, node.space), dtype=float)
        except RowNotNormalized:
            raise
        except ValidationError as exc:
            raise type(exc)(f"node {nid!r}: {exc}") from exc
        tables[nid] = _validate_table(nid, table, cards)
    return Network(nodes, tables, topo, metadata)
