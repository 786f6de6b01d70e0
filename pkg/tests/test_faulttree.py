import numpy as np
import pytest

from heisenbn import Evidence, Hard, Soft
from heisenbn.errors import EvidenceNotOnTop, MalformedFaultTree
from heisenbn.faulttree import (
    BasicEvent,
    FaultTree,
    Gate,
    compile_fault_tree,
    posterior_cause_ranking,
    top_event_probability,
)


def closed_form(ft, node_id):
    """Oracle for trees of independent events: recursive AND/OR/noisy-OR algebra.

    Valid only when no node is shared between branches.
    """
    events = {e.id: e for e in ft.events}
    gates = {g.id: g for g in ft.gates}
    if node_id in events:
        return events[node_id].p
    g = gates[node_id]
    probs = [closed_form(ft, c) for c in g.children]
    if g.kind == "AND":
        out = 1.0
        for p in probs:
            out *= p
        return out
    if g.kind == "OR":
        out = 1.0
        for p in probs:
            out *= 1.0 - p
        return 1.0 - out
    # noisy-OR: child i inhibited with prob q_i when failed
    out = 1.0 - g.leak
    for p, q in zip(probs, g.q):
        out *= p * q + (1.0 - p)
    return 1.0 - out


def random_tree(rng, max_depth=3, max_children=3):
    """Random strict tree (no sharing) of AND/OR gates over basic events."""
    events, gates = [], []
    counter = [0]

    def grow(depth):
        counter[0] += 1
        nid = f"n{counter[0]:03d}"
        if depth >= max_depth or rng.random() < 0.35:
            events.append(BasicEvent(nid, float(rng.random())))
            return nid
        kind = "AND" if rng.random() < 0.5 else "OR"
        n = int(rng.integers(2, max_children + 1))
        children = tuple(grow(depth + 1) for _ in range(n))
        gates.append(Gate(nid, kind, children))
        return nid

    top = grow(0)
    return FaultTree(tuple(events), tuple(gates), top)


class TestCompile:
    def test_single_event_tree(self):
        ft = FaultTree((BasicEvent("e", 0.25),), (), "e")
        net = compile_fault_tree(ft)
        assert net.node_ids == ("e",)
        assert top_event_probability(ft) == pytest.approx(0.25, abs=1e-15)

    def test_or_gate(self):
        ft = FaultTree((BasicEvent("e1", 0.1), BasicEvent("e2", 0.2)),
                       (Gate("top", "OR", ("e1", "e2")),), "top")
        assert top_event_probability(ft) == pytest.approx(0.28, abs=1e-12)

    def test_and_gate(self):
        ft = FaultTree((BasicEvent("e1", 0.1), BasicEvent("e2", 0.2)),
                       (Gate("top", "AND", ("e1", "e2")),), "top")
        assert top_event_probability(ft) == pytest.approx(0.02, abs=1e-12)

    def test_or_of_three(self):
        ft = FaultTree(tuple(BasicEvent(f"e{i}", 0.1) for i in range(3)),
                       (Gate("top", "OR", ("e0", "e1", "e2")),), "top")
        assert top_event_probability(ft) == pytest.approx(1 - 0.9 ** 3, abs=1e-12)

    def test_and_over_or_pairs(self):
        events = (BasicEvent("a1", 0.1), BasicEvent("a2", 0.1),
                  BasicEvent("b1", 0.2), BasicEvent("b2", 0.2))
        gates = (Gate("ga", "OR", ("a1", "a2")), Gate("gb", "OR", ("b1", "b2")),
                 Gate("top", "AND", ("ga", "gb")))
        ft = FaultTree(events, gates, "top")
        assert top_event_probability(ft) == pytest.approx(0.19 * 0.36, abs=1e-12)

    def test_noisy_or_gate_of_certain_events(self):
        ft = FaultTree((BasicEvent("e1", 1.0), BasicEvent("e2", 1.0)),
                       (Gate("top", "NOISY_OR", ("e1", "e2"), q=(0.2, 0.3), leak=0.05),),
                       "top")
        assert top_event_probability(ft) == pytest.approx(1 - 0.95 * 0.06, abs=1e-12)

    def test_shared_subtree_no_double_count(self):
        # e feeds both OR branches; P(top) = P(e) + P(!e) P(a) P(b),
        # whereas treating branches as independent would give 0.2552.
        events = (BasicEvent("e", 0.3), BasicEvent("a", 0.2), BasicEvent("b", 0.4))
        gates = (Gate("g1", "OR", ("e", "a")), Gate("g2", "OR", ("e", "b")),
                 Gate("top", "AND", ("g1", "g2")))
        ft = FaultTree(events, gates, "top")
        assert top_event_probability(ft) == pytest.approx(0.3 + 0.7 * 0.2 * 0.4, abs=1e-12)

    def test_duplicate_gate_child_rejected(self):
        ft = FaultTree((BasicEvent("e", 0.3),), (Gate("top", "AND", ("e", "e")),), "top")
        with pytest.raises(MalformedFaultTree):
            ft.validate()


class TestValidation:
    def test_duplicate_ids(self):
        with pytest.raises(MalformedFaultTree):
            FaultTree((BasicEvent("x", 0.1), BasicEvent("x", 0.2)), (), "x").validate()

    def test_unknown_child(self):
        ft = FaultTree((BasicEvent("e", 0.1),), (Gate("top", "OR", ("e", "ghost")),), "top")
        with pytest.raises(MalformedFaultTree):
            ft.validate()

    def test_cycle(self):
        gates = (Gate("g1", "OR", ("g2",)), Gate("g2", "OR", ("g1",)))
        with pytest.raises(MalformedFaultTree):
            FaultTree((), gates, "g1").validate()

    def test_unreachable_node(self):
        ft = FaultTree((BasicEvent("e", 0.1), BasicEvent("orphan", 0.2)),
                       (Gate("top", "OR", ("e",)),), "top")
        with pytest.raises(MalformedFaultTree):
            ft.validate()

    def test_probability_out_of_range(self):
        with pytest.raises(MalformedFaultTree):
            FaultTree((BasicEvent("e", 1.4),), (), "e").validate()

    def test_noisy_or_needs_q_per_child(self):
        ft = FaultTree((BasicEvent("e", 0.1),),
                       (Gate("top", "NOISY_OR", ("e",), q=(0.2, 0.3)),), "top")
        with pytest.raises(MalformedFaultTree):
            ft.validate()


class TestClosedFormSuite:
    def test_random_trees_match_closed_form(self):
        rng = np.random.default_rng(99)
        for _ in range(20):
            ft = random_tree(rng)
            assert top_event_probability(ft) == pytest.approx(
                closed_form(ft, ft.top), abs=1e-12)


class TestCauseRanking:
    def two_event_or(self):
        return FaultTree((BasicEvent("e1", 0.01), BasicEvent("e2", 0.3)),
                         (Gate("top", "OR", ("e1", "e2")),), "top")

    def test_likelier_cause_ranks_first(self):
        ranking = posterior_cause_ranking(self.two_event_or(), Hard("true"))
        assert ranking[0][0] == "e2"
        assert ranking[0][1] > ranking[1][1]

    def test_single_event_forced(self):
        ft = FaultTree((BasicEvent("e", 0.2),), (), "e")
        ranking = posterior_cause_ranking(ft, Hard("true"))
        assert ranking == [("e", 1.0)]

    def test_vacuous_soft_evidence_keeps_priors(self):
        ranking = posterior_cause_ranking(self.two_event_or(), Soft((1.0, 1.0)))
        as_map = dict(ranking)
        assert as_map["e1"] == pytest.approx(0.01, abs=1e-12)
        assert as_map["e2"] == pytest.approx(0.3, abs=1e-12)

    def test_soft_scaling_invariance(self):
        a = posterior_cause_ranking(self.two_event_or(), Soft((0.3, 0.9)))
        b = posterior_cause_ranking(self.two_event_or(), Soft((3.0, 9.0)))
        for (ida, pa), (idb, pb) in zip(a, b):
            assert ida == idb
            assert pa == pytest.approx(pb, abs=1e-12)

    def test_or_tree_posteriors_never_below_prior(self):
        rng = np.random.default_rng(3)
        events = tuple(BasicEvent(f"e{i}", float(rng.uniform(0.01, 0.5))) for i in range(4))
        gates = (Gate("g1", "OR", ("e0", "e1")), Gate("g2", "OR", ("e2", "e3")),
                 Gate("top", "OR", ("g1", "g2")))
        ft = FaultTree(events, gates, "top")
        ranking = dict(posterior_cause_ranking(ft, Hard("true")))
        for e in events:
            assert ranking[e.id] >= e.p - 1e-12

    def test_evidence_object_must_target_top(self):
        ev = Evidence({"e1": Hard("true")})
        with pytest.raises(EvidenceNotOnTop):
            posterior_cause_ranking(self.two_event_or(), ev)

    def test_enumeration_oracle_two_event_or(self):
        # P(e2=t | top=t) = 0.3 / P(top) ; P(top) = 1 - 0.99*0.7
        p_top = 1 - 0.99 * 0.7
        ranking = dict(posterior_cause_ranking(self.two_event_or(), Hard("true")))
        assert ranking["e2"] == pytest.approx(0.3 / p_top, abs=1e-12)
        assert ranking["e1"] == pytest.approx(0.01 / p_top, abs=1e-12)
