#!/usr/bin/env python3
"""Regenerate the shipped JSON fixtures from the in-code definitions."""

from __future__ import annotations

import pathlib

from heisenbn.calibrate import ProjectRecord
from heisenbn.defect import DEFAULT_PARAMS, build_defect_network
from heisenbn.faulttree import BasicEvent, FaultTree, Gate
from heisenbn.fixtures import PROJECT_RECORDS, neutral_scenario
from heisenbn.io import (
    serialize_fault_tree,
    serialize_model,
    serialize_params,
    serialize_records,
    serialize_scenario,
)

FIXTURE_DIR = pathlib.Path(__file__).resolve().parents[1] / "src" / "heisenbn" / "data" / "fixtures"


def demo_fault_tree() -> FaultTree:
    """Synthetic event-handler fault tree: the three classic top-level failure
    modes (lose the event, mishandle it, or corrupt internal state)."""
    events = (
        BasicEvent("interrupt_dropped_oom", 0.002),
        BasicEvent("queue_overflow", 0.004),
        BasicEvent("wrong_thread_scheduled", 0.003),
        BasicEvent("priority_inversion", 0.005),
        BasicEvent("timer_drift", 0.008),
        BasicEvent("heap_corruption", 0.001),
        BasicEvent("stale_cache_entry", 0.006),
    )
    gates = (
        Gate("lose_event", "OR", ("interrupt_dropped_oom", "queue_overflow")),
        Gate("mishandle_event", "NOISY_OR",
             ("wrong_thread_scheduled", "priority_inversion", "timer_drift"),
             q=(0.2, 0.35, 0.5), leak=0.0005),
        Gate("corrupt_state", "OR", ("heap_corruption", "stale_cache_entry")),
        Gate("system_failure", "OR", ("lose_event", "mishandle_event", "corrupt_state")),
    )
    return FaultTree(events, gates, "system_failure")


def main() -> None:
    FIXTURE_DIR.mkdir(parents=True, exist_ok=True)
    write = lambda name, text: (FIXTURE_DIR / name).write_text(text, "utf-8")

    write("default_params.json", serialize_params(DEFAULT_PARAMS))

    records = []
    for name, factory, found, field in PROJECT_RECORDS:
        scenario = factory()
        write(f"scenario_{name.lower()}.json", serialize_scenario(scenario))
        records.append(ProjectRecord(scenario, found, field, label=name))
    write("records_abc.json", serialize_records(records))

    net, _ = build_defect_network(neutral_scenario(), DEFAULT_PARAMS)
    write("reference_template.model.json", serialize_model(net))

    write("fault_tree_demo.json", serialize_fault_tree(demo_fault_tree()))

    for path in sorted(FIXTURE_DIR.glob("*.json")):
        print(f"wrote {path.relative_to(FIXTURE_DIR.parents[3])}")


if __name__ == "__main__":
    main()
