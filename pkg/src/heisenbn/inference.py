"""Exact inference by variable elimination, plus a joint-enumeration oracle.

Evidence is folded in as likelihood factors: hard evidence becomes a one-hot
vector, soft evidence is used as given (virtual evidence). Posteriors are
therefore P(target | evidence) with P(evidence) recovered as the
normalization constant. Probabilities are combined in linear space with
doubles throughout.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import (
    NotAnIntervalNode,
    TooLarge,
    UnknownNode,
    ValidationError,
    ZeroProbabilityEvidence,
)
from .network import EMPTY_EVIDENCE, Evidence, Network, StateSpace

DEFAULT_JOINT_CAP = 2 ** 20


class Factor:
    """Dense factor over named variables; table axes follow self.vars order."""

    __slots__ = ("vars", "table")

    def __init__(self, variables: tuple[str, ...], table: np.ndarray):
        self.vars = variables
        self.table = table

    def multiply(self, other: "Factor") -> "Factor":
        out_vars = self.vars + tuple(v for v in other.vars if v not in self.vars)
        a = self._aligned(out_vars)
        b = other._aligned(out_vars)
        return Factor(out_vars, a * b)

    def _aligned(self, out_vars: tuple[str, ...]) -> np.ndarray:
        # Permute own axes into their relative order in out_vars, then insert
        # broadcast axes for variables this factor does not mention.
        mine = [v for v in out_vars if v in self.vars]
        arr = np.transpose(self.table, [self.vars.index(v) for v in mine])
        sizes = iter(arr.shape)
        shape = tuple(next(sizes) if v in self.vars else 1 for v in out_vars)
        return arr.reshape(shape)

    def sum_out(self, var: str) -> "Factor":
        axis = self.vars.index(var)
        return Factor(self.vars[:axis] + self.vars[axis + 1:], self.table.sum(axis=axis))

    def marginal_on(self, keep: tuple[str, ...]) -> "Factor":
        f = self
        for v in self.vars:
            if v not in keep:
                f = f.sum_out(v)
        # Reorder axes to match `keep`.
        perm = [f.vars.index(v) for v in keep]
        return Factor(keep, np.transpose(f.table, perm))


def _node_factor(net: Network, node_id: str) -> Factor:
    node = net.node(node_id)
    return Factor(node.parents + (node_id,), net.table(node_id))


def _all_factors(net: Network, ev: Evidence) -> list[Factor]:
    factors = [_node_factor(net, nid) for nid in net.node_ids]
    for nid in net.node_ids:
        lik = ev.likelihood(net, nid)
        if lik is not None:
            factors.append(Factor((nid,), lik))
    return factors


def min_fill_order(scopes: list[tuple[str, ...]], keep: set[str]) -> list[str]:
    """Elimination order by the min-fill heuristic, node-id tie-breaking."""
    neighbors: dict[str, set[str]] = {}
    for scope in scopes:
        for v in scope:
            neighbors.setdefault(v, set()).update(u for u in scope if u != v)
    order = []
    remaining = set(neighbors) - keep
    while remaining:
        best = None
        best_fill = None
        for v in sorted(remaining):
            nb = neighbors[v] & (remaining | keep)
            fill = sum(1 for a in nb for b in nb if a < b and b not in neighbors[a])
            if best_fill is None or fill < best_fill:
                best, best_fill = v, fill
        nb = neighbors[best] & (remaining | keep)
        for a in nb:
            neighbors[a].update(nb - {a})
        order.append(best)
        remaining.discard(best)
    return order


def _eliminate(factors: list[Factor], order: list[str]) -> Factor:
    factors = list(factors)
    for var in order:
        involved = [f for f in factors if var in f.vars]
        if not involved:
            continue
        product = involved[0]
        for f in involved[1:]:
            product = product.multiply(f)
        factors = [f for f in factors if var not in f.vars]
        factors.append(product.sum_out(var))
    result = Factor((), np.array(1.0))
    for f in factors:
        result = result.multiply(f)
    return result


def _elimination_order(net: Network, factors: list[Factor], keep: set[str],
                       strategy: str) -> list[str]:
    if strategy == "min_fill":
        return min_fill_order([f.vars for f in factors], keep)
    if strategy == "id":
        return [nid for nid in sorted(net.node_ids) if nid not in keep]
    if strategy == "topological":
        return [nid for nid in net.node_ids if nid not in keep]
    raise ValidationError(f"unknown elimination strategy {strategy!r}")


@dataclass(frozen=True)
class NodePosterior:
    node: str
    space: StateSpace
    probs: np.ndarray
    mean: float | None = None
    variance: float | None = None

    @property
    def states(self) -> tuple[str, ...]:
        return self.space.states

    def prob(self, state: str) -> float:
        return float(self.probs[self.space.index_of(state)])


@dataclass(frozen=True)
class PosteriorReport:
    entries: dict[str, NodePosterior]

    def __getitem__(self, node_id: str) -> NodePosterior:
        try:
            return self.entries[node_id]
        except KeyError:
            raise UnknownNode(f"no posterior for node {node_id!r}") from None

    def __contains__(self, node_id: str) -> bool:
        return node_id in self.entries


def interval_moments(space: StateSpace, probs: np.ndarray) -> tuple[float, float]:
    reps = space.representatives()
    mean = float(probs @ reps)
    var = float(probs @ (reps - mean) ** 2)
    return mean, var


def interval_expectation(report: PosteriorReport, node_id: str) -> tuple[float, float]:
    """Mean and variance of an interval node's posterior (representative-based)."""
    post = report[node_id]
    if post.space.intervals is None:
        raise NotAnIntervalNode(f"node {node_id!r} has no numeric intervals")
    return interval_moments(post.space, post.probs)


def _posterior_from_vector(net: Network, node_id: str, vec: np.ndarray) -> NodePosterior:
    total = vec.sum()
    if total <= 0.0:
        raise ZeroProbabilityEvidence(
            f"evidence has probability zero (marginal of {node_id!r} vanished)")
    probs = vec / total
    space = net.space(node_id)
    mean = variance = None
    if space.intervals is not None:
        mean, variance = interval_moments(space, probs)
    return NodePosterior(node_id, space, probs, mean, variance)


def query_posteriors(net: Network, ev: Evidence, targets: list[str],
                     order_strategy: str = "min_fill") -> PosteriorReport:
    """Exact posterior marginals P(target | evidence) via variable elimination."""
    ev.validate(net)
    if not targets:
        raise ValidationError("query needs at least one target")
    for t in targets:
        net.node(t)
    factors = _all_factors(net, ev)
    entries: dict[str, NodePosterior] = {}
    for t in targets:
        order = _elimination_order(net, factors, {t}, order_strategy)
        marginal = _eliminate(factors, order).marginal_on((t,))
        entries[t] = _posterior_from_vector(net, t, marginal.table)
    return PosteriorReport(entries)


def query_joint(net: Network, ev: Evidence, targets: list[str],
                order_strategy: str = "min_fill") -> Factor:
    """Normalized joint posterior over several targets, axes in target order."""
    ev.validate(net)
    if len(set(targets)) != len(targets) or not targets:
        raise ValidationError("joint query needs distinct targets")
    for t in targets:
        net.node(t)
    factors = _all_factors(net, ev)
    order = _elimination_order(net, factors, set(targets), order_strategy)
    joint = _eliminate(factors, order).marginal_on(tuple(targets))
    total = joint.table.sum()
    if total <= 0.0:
        raise ZeroProbabilityEvidence("evidence has probability zero")
    return Factor(joint.vars, joint.table / total)


class JointTable:
    """Unnormalized full joint with evidence folded in; the test oracle."""

    def __init__(self, variables: tuple[str, ...], spaces: dict[str, StateSpace],
                 table: np.ndarray):
        self.vars = variables
        self.spaces = spaces
        self.table = table
        self.z = float(table.sum())

    def marginal(self, node_id: str) -> np.ndarray:
        if node_id not in self.vars:
            raise UnknownNode(f"unknown node {node_id!r}")
        if self.z <= 0.0:
            raise ZeroProbabilityEvidence("evidence has probability zero")
        axis = self.vars.index(node_id)
        other = tuple(i for i in range(len(self.vars)) if i != axis)
        return self.table.sum(axis=other) / self.z


def brute_force_joint(net: Network, ev: Evidence = EMPTY_EVIDENCE,
                      max_entries: int = DEFAULT_JOINT_CAP) -> JointTable:
    """Full joint by direct enumeration (broadcast product of all factors)."""
    size = net.joint_size()
    if size > max_entries:
        raise TooLarge(f"joint has {size} entries, cap is {max_entries}")
    ev.validate(net)
    order = net.node_ids
    joint = Factor((), np.array(1.0))
    for f in _all_factors(net, ev):
        joint = joint.multiply(f)
    return JointTable(order, {nid: net.space(nid) for nid in order},
                      joint.marginal_on(order).table)


def sample_network(net: Network, rng: np.random.Generator,
                   given: dict[str, str] | None = None) -> dict[str, str]:
    """Ancestral sample; `given` pins root nodes (raises if a pinned node has parents)."""
    given = given or {}
    values: dict[str, int] = {}
    for nid in net.node_ids:
        node = net.node(nid)
        if nid in given:
            if node.parents:
                raise ValidationError(f"cannot pin non-root node {nid!r} during sampling")
            values[nid] = node.space.index_of(given[nid])
            continue
        row = net.table(nid)[tuple(values[p] for p in node.parents)]
        values[nid] = int(rng.choice(node.space.card, p=row))
    return {nid: net.space(nid).states[i] for nid, i in values.items()}
