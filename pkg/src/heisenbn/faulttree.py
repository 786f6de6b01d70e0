"""Fault trees compiled to Bayesian networks.

Basic events carry prior failure probabilities; gates are AND, OR, or
noisy-OR (inhibitor probabilities plus a leak). Shared subtrees are allowed,
so the structure is a DAG rooted at the top event rather than a strict tree;
the compiled network handles shared causes without double counting. Beyond
the forward top-event probability, (soft) observation of the top event
yields a posterior ranking of basic-event causes.
"""

from __future__ import annotations

from dataclasses import dataclass
from itertools import product

import numpy as np

from .cpds import NoisyOrCpd, TableCpd
from .errors import EvidenceNotOnTop, MalformedFaultTree
from .inference import query_posteriors
from .network import Evidence, Hard, Network, Node, Soft, binary_space, build_network

GATE_KINDS = ("AND", "OR", "NOISY_OR")


@dataclass(frozen=True)
class BasicEvent:
    id: str
    p: float


@dataclass(frozen=True)
class Gate:
    id: str
    kind: str
    children: tuple[str, ...]
    q: tuple[float, ...] | None = None
    leak: float = 0.0


@dataclass(frozen=True)
class FaultTree:
    events: tuple[BasicEvent, ...]
    gates: tuple[Gate, ...]
    top: str

    def validate(self) -> None:
        ids = [e.id for e in self.events] + [g.id for g in self.gates]
        if len(set(ids)) != len(ids):
            dupes = sorted({i for i in ids if ids.count(i) > 1})
            raise MalformedFaultTree(f"duplicate ids: {dupes}")
        known = set(ids)
        if self.top not in known:
            raise MalformedFaultTree(f"top event {self.top!r} is not defined")
        for e in self.events:
            if not (0.0 <= e.p <= 1.0):
                raise MalformedFaultTree(f"event {e.id!r} probability {e.p} outside [0, 1]")
        gate_map = {g.id: g for g in self.gates}
        for g in self.gates:
            if g.kind not in GATE_KINDS:
                raise MalformedFaultTree(f"gate {g.id!r} has unknown kind {g.kind!r}")
            if not g.children:
                raise MalformedFaultTree(f"gate {g.id!r} has no children")
            if len(set(g.children)) != len(g.children):
                raise MalformedFaultTree(f"gate {g.id!r} lists a child more than once")
            for c in g.children:
                if c not in known:
                    raise MalformedFaultTree(f"gate {g.id!r} references unknown child {c!r}")
            if g.kind == "NOISY_OR":
                if g.q is None or len(g.q) != len(g.children):
                    raise MalformedFaultTree(
                        f"gate {g.id!r} needs one inhibitor probability per child")
        # Reachability from the top plus acyclicity (DFS with a path stack).
        reached: set[str] = set()
        stack: list[str] = []

        def visit(nid: str) -> None:
            if nid in stack:
                raise MalformedFaultTree(
                    f"cycle through {nid!r}: {' -> '.join(stack + [nid])}")
            if nid in reached:
                return
            stack.append(nid)
            if nid in gate_map:
                for c in gate_map[nid].children:
                    visit(c)
            stack.pop()
            reached.add(nid)

        visit(self.top)
        unreachable = sorted(known - reached)
        if unreachable:
            raise MalformedFaultTree(
                f"not rooted at {self.top!r}: unreachable nodes {unreachable}")


def _and_rows(n: int) -> tuple[tuple[float, float], ...]:
    return tuple((0.0, 1.0) if all(cfg) else (1.0, 0.0)
                 for cfg in product((0, 1), repeat=n))


def _or_rows(n: int) -> tuple[tuple[float, float], ...]:
    return tuple((0.0, 1.0) if any(cfg) else (1.0, 0.0)
                 for cfg in product((0, 1), repeat=n))


def compile_fault_tree(ft: FaultTree) -> Network:
    """One binary node per event/gate; deterministic CPTs for AND/OR gates."""
    ft.validate()
    specs: list[Node] = []
    for e in ft.events:
        specs.append(Node(e.id, binary_space(), TableCpd(((1.0 - e.p, e.p),))))
    for g in ft.gates:
        if g.kind == "AND":
            cpd: object = TableCpd(_and_rows(len(g.children)))
        elif g.kind == "OR":
            cpd = TableCpd(_or_rows(len(g.children)))
        else:
            cpd = NoisyOrCpd(tuple(g.q), g.leak)
        specs.append(Node(g.id, binary_space(), cpd, tuple(g.children)))
    return build_network(specs)


def top_event_probability(ft: FaultTree) -> float:
    net = compile_fault_tree(ft)
    report = query_posteriors(net, Evidence({}), [ft.top])
    return report[ft.top].prob("true")


def posterior_cause_ranking(ft: FaultTree,
                            top_evidence: Hard | Soft | Evidence) -> list[tuple[str, float]]:
    """Basic-event posteriors given evidence on the top node, sorted descending.

    Ties break by event id. Accepts a bare Hard/Soft entry for the top node,
    or an Evidence object that must target the top node only.
    """
    if isinstance(top_evidence, Evidence):
        if set(top_evidence.entries) != {ft.top}:
            raise EvidenceNotOnTop(
                f"cause ranking takes evidence on the top node {ft.top!r} only")
        entry = top_evidence.entries[ft.top]
    elif isinstance(top_evidence, (Hard, Soft)):
        entry = top_evidence
    else:
        raise EvidenceNotOnTop("top evidence must be a Hard or Soft entry")
    net = compile_fault_tree(ft)
    ev = Evidence({ft.top: entry})
    targets = [e.id for e in ft.events]
    report = query_posteriors(net, ev, targets)
    ranked = [(eid, report[eid].prob("true")) for eid in targets]
    ranked.sort(key=lambda item: (-item[1], item[0]))
    return ranked
