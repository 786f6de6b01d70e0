"""Document formats: model, evidence, fault tree, scenario, records, params.

All formats are JSON with a canonical serialization: fixed key order, nodes
and map keys sorted where documented, two-space indent, shortest round-trip
decimals (Python float repr), trailing newline. serialize(parse(serialize(x)))
is therefore byte-identical to serialize(x). Parsing is strict by default
(unknown keys rejected); permissive mode ignores them. Every parse error
carries the document path of the offending element.
"""

from __future__ import annotations

import json
import os
from typing import Any

from .calibrate import Priors, ProjectRecord
from .cpds import (
    BinomialCpd,
    NoisyOrCpd,
    PoissonCpd,
    RankedCpd,
    SubtractCpd,
    TableCpd,
)
from .defect import (
    SCENARIO_DIMENSIONS,
    USAGE_LEVEL,
    Answer,
    DefectModelParams,
    ProjectScenario,
    load_rating_scales,
)
from .errors import DocumentSyntaxError, HeisenbnError, SchemaError
from .faulttree import BasicEvent, FaultTree, Gate
from .inference import PosteriorReport
from .network import (
    RANKED_LEVELS,
    USAGE_LEVELS,
    Evidence,
    Hard,
    Network,
    Node,
    Soft,
    StateSpace,
    build_network,
    count_space,
    ranked5_space,
)
from .sensitivity import SensitivityResult

FORMAT_VERSION = 1

STRICT_ENV_VAR = "HEISENBN_STRICT"


def default_strict() -> bool:
    """Strict parsing unless HEISENBN_STRICT=0 in the environment."""
    return os.environ.get(STRICT_ENV_VAR, "1") != "0"


def canonical_json(obj: Any) -> str:
    return json.dumps(obj, indent=2, allow_nan=False) + "\n"


# --- parsing scaffolding ------------------------------------------------------

def _loads(text: str) -> Any:
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise DocumentSyntaxError(f"invalid JSON: {exc}", path="$") from exc


def _expect_object(obj: Any, path: str) -> dict:
    if not isinstance(obj, dict):
        raise SchemaError(f"expected an object, got {type(obj).__name__}", path=path)
    return obj


def _expect_list(obj: Any, path: str) -> list:
    if not isinstance(obj, list):
        raise SchemaError(f"expected a list, got {type(obj).__name__}", path=path)
    return obj


def _expect_number(obj: Any, path: str) -> float:
    if isinstance(obj, bool) or not isinstance(obj, (int, float)):
        raise SchemaError(f"expected a number, got {type(obj).__name__}", path=path)
    return float(obj)


def _expect_int(obj: Any, path: str) -> int:
    if isinstance(obj, bool) or not isinstance(obj, int):
        raise SchemaError(f"expected an integer, got {type(obj).__name__}", path=path)
    return obj


def _expect_str(obj: Any, path: str) -> str:
    if not isinstance(obj, str):
        raise SchemaError(f"expected a string, got {type(obj).__name__}", path=path)
    return obj


def _check_keys(obj: dict, path: str, required: tuple[str, ...],
                optional: tuple[str, ...], strict: bool) -> None:
    for key in required:
        if key not in obj:
            raise SchemaError(f"missing required key {key!r}", path=path)
    if strict:
        unknown = sorted(set(obj) - set(required) - set(optional))
        if unknown:
            raise SchemaError(f"unknown keys {unknown} (strict mode)", path=path)


def _check_version(obj: dict, path: str) -> None:
    version = obj.get("format_version")
    if version != FORMAT_VERSION:
        raise SchemaError(
            f"unsupported format_version {version!r} (expected {FORMAT_VERSION})",
            path=f"{path}.format_version")


# --- model documents -----------------------------------------------------------

_CPD_KEYS = {
    "table": (("type", "rows"), ()),
    "noisy_or": (("type", "q"), ("leak",)),
    "ranked": (("type", "weights", "variance"), ()),
    "poisson": (("type", "rates"), ()),
    "binomial": (("type", "p"), ()),
    "subtract": (("type",), ()),
}


def _parse_cpd(obj: Any, path: str, strict: bool):
    obj = _expect_object(obj, path)
    kind = _expect_str(obj.get("type"), f"{path}.type") if "type" in obj else None
    if kind not in _CPD_KEYS:
        raise SchemaError(f"unknown cpd type {kind!r}", path=f"{path}.type")
    required, optional = _CPD_KEYS[kind]
    _check_keys(obj, path, required, optional, strict)
    if kind == "table":
        rows = _expect_list(obj["rows"], f"{path}.rows")
        parsed_rows = []
        for i, row in enumerate(rows):
            row = _expect_list(row, f"{path}.rows[{i}]")
            parsed_rows.append(tuple(
                _expect_number(v, f"{path}.rows[{i}][{j}]") for j, v in enumerate(row)))
        return TableCpd(tuple(parsed_rows))
    if kind == "noisy_or":
        q = tuple(_expect_number(v, f"{path}.q[{i}]")
                  for i, v in enumerate(_expect_list(obj["q"], f"{path}.q")))
        leak = _expect_number(obj.get("leak", 0.0), f"{path}.leak")
        return NoisyOrCpd(q, leak)
    if kind == "ranked":
        weights = tuple(_expect_number(v, f"{path}.weights[{i}]")
                        for i, v in enumerate(_expect_list(obj["weights"], f"{path}.weights")))
        variance = _expect_number(obj["variance"], f"{path}.variance")
        return RankedCpd(weights, variance)
    if kind == "poisson":
        rates = tuple(_expect_number(v, f"{path}.rates[{i}]")
                      for i, v in enumerate(_expect_list(obj["rates"], f"{path}.rates")))
        return PoissonCpd(rates)
    if kind == "binomial":
        p = tuple(_expect_number(v, f"{path}.p[{i}]")
                  for i, v in enumerate(_expect_list(obj["p"], f"{path}.p")))
        return BinomialCpd(p)
    return SubtractCpd()


def _cpd_obj(cpd: object) -> dict:
    if isinstance(cpd, RankedCpd):  # includes the template's cached subclass
        return {"type": "ranked", "weights": [float(w) for w in cpd.weights],
                "variance": float(cpd.variance)}
    if isinstance(cpd, TableCpd):
        return {"type": "table", "rows": [[float(v) for v in row] for row in cpd.rows]}
    if isinstance(cpd, NoisyOrCpd):
        return {"type": "noisy_or", "q": [float(v) for v in cpd.q],
                "leak": float(cpd.leak)}
    if isinstance(cpd, PoissonCpd):
        return {"type": "poisson", "rates": [float(v) for v in cpd.rates]}
    if isinstance(cpd, BinomialCpd):
        return {"type": "binomial", "p": [float(v) for v in cpd.p]}
    if isinstance(cpd, SubtractCpd):
        return {"type": "subtract"}
    raise SchemaError(f"cannot serialize cpd of type {type(cpd).__name__}")


def _parse_intervals(obj: Any, path: str) -> tuple[tuple[int, int | None], ...]:
    intervals = []
    for i, pair in enumerate(_expect_list(obj, path)):
        pair = _expect_list(pair, f"{path}[{i}]")
        if len(pair) != 2:
            raise SchemaError("interval needs [lower, upper]", path=f"{path}[{i}]")
        lo = _expect_int(pair[0], f"{path}[{i}][0]")
        hi = None if pair[1] is None else _expect_int(pair[1], f"{path}[{i}][1]")
        intervals.append((lo, hi))
    return tuple(intervals)


def parse_model(text: str, strict: bool | None = None) -> Network:
    """Parse a model document into a validated Network."""
    strict = default_strict() if strict is None else strict
    doc = _expect_object(_loads(text), "$")
    _check_keys(doc, "$", ("format_version", "nodes"), ("template",), strict)
    _check_version(doc, "$")
    specs = []
    for i, node_obj in enumerate(_expect_list(doc["nodes"], "$.nodes")):
        path = f"$.nodes[{i}]"
        node_obj = _expect_object(node_obj, path)
        _check_keys(node_obj, path, ("id", "kind", "parents", "cpd"),
                    ("states", "intervals", "unbounded_rep_factor"), strict)
        nid = _expect_str(node_obj["id"], f"{path}.id")
        kind = _expect_str(node_obj["kind"], f"{path}.kind")
        if kind == "labeled":
            if "states" not in node_obj:
                raise SchemaError(f"labeled node {nid!r} needs states", path=path)
            states = tuple(_expect_str(s, f"{path}.states[{j}]")
                           for j, s in enumerate(_expect_list(node_obj["states"],
                                                              f"{path}.states")))
            space = StateSpace(states)
        elif kind == "ranked5":
            space = ranked5_space()
        elif kind == "count":
            if "intervals" not in node_obj:
                raise SchemaError(f"count node {nid!r} needs intervals", path=path)
            factor = _expect_number(node_obj.get("unbounded_rep_factor", 1.5),
                                    f"{path}.unbounded_rep_factor")
            space = count_space(_parse_intervals(node_obj["intervals"],
                                                 f"{path}.intervals"), factor)
        else:
            raise SchemaError(f"unknown node kind {kind!r}", path=f"{path}.kind")
        parents = tuple(_expect_str(p, f"{path}.parents[{j}]")
                        for j, p in enumerate(_expect_list(node_obj["parents"],
                                                           f"{path}.parents")))
        cpd = _parse_cpd(node_obj["cpd"], f"{path}.cpd", strict)
        try:
            specs.append(Node(nid, space, cpd, parents))
        except HeisenbnError as exc:
            raise exc.with_path(path)
    metadata = None
    if "template" in doc:
        metadata = _parse_template_block(doc["template"], "$.template", strict)
    try:
        return build_network(specs, metadata)
    except HeisenbnError as exc:
        raise exc.with_path("$.nodes")


def _parse_template_block(obj: Any, path: str, strict: bool) -> dict:
    obj = _expect_object(obj, path)
    _check_keys(obj, path, ("template_version", "params"), ("scenario",), strict)
    block = {
        "template_version": _expect_str(obj["template_version"], f"{path}.template_version"),
        "params": _parse_params_obj(obj["params"], f"{path}.params", strict),
    }
    if "scenario" in obj:
        block["scenario"] = _parse_scenario_obj(obj["scenario"], f"{path}.scenario", strict)
    return block


def serialize_model(net: Network) -> str:
    nodes = []
    for nid in sorted(net.nodes):
        node = net.nodes[nid]
        obj: dict[str, Any] = {"id": nid, "kind": node.space.kind}
        if node.space.kind == "labeled":
            obj["states"] = list(node.space.states)
        elif node.space.kind == "count":
            obj["intervals"] = [[lo, hi] for lo, hi in node.space.intervals]
            if node.space.unbounded_rep_factor != 1.5:
                obj["unbounded_rep_factor"] = float(node.space.unbounded_rep_factor)
        obj["parents"] = list(node.parents)
        obj["cpd"] = _cpd_obj(node.cpd)
        nodes.append(obj)
    doc: dict[str, Any] = {"format_version": FORMAT_VERSION, "nodes": nodes}
    meta = net.metadata
    if meta and "params" in meta:
        block: dict[str, Any] = {
            "template_version": meta.get("template_version", "1"),
            "params": _params_obj(meta["params"]),
        }
        if "scenario" in meta:
            block["scenario"] = _scenario_obj(meta["scenario"])
        doc["template"] = block
    return canonical_json(doc)


# --- evidence -------------------------------------------------------------------

def parse_evidence(text: str, net: Network, strict: bool | None = None) -> Evidence:
    strict = default_strict() if strict is None else strict
    doc = _expect_object(_loads(text), "$")
    entries: dict[str, Hard | Soft] = {}
    for nid, entry_obj in doc.items():
        path = f"$.{nid}"
        if nid not in net.nodes:
            raise SchemaError(f"unknown node {nid!r}", path=path)
        entry_obj = _expect_object(entry_obj, path)
        _check_keys(entry_obj, path, (), ("state", "soft"), strict)
        has_state, has_soft = "state" in entry_obj, "soft" in entry_obj
        if has_state == has_soft:
            raise SchemaError("evidence entry needs exactly one of 'state' or 'soft'",
                              path=path)
        space = net.space(nid)
        if has_state:
            state = _expect_str(entry_obj["state"], f"{path}.state")
            if state not in space.states:
                raise SchemaError(f"unknown state {state!r} for node {nid!r}",
                                  path=f"{path}.state")
            entries[nid] = Hard(state)
        else:
            soft_obj = _expect_object(entry_obj["soft"], f"{path}.soft")
            weights = [0.0] * space.card
            for label, value in soft_obj.items():
                if label not in space.states:
                    raise SchemaError(f"unknown state {label!r} for node {nid!r}",
                                      path=f"{path}.soft.{label}")
                weights[space.index_of(label)] = _expect_number(
                    value, f"{path}.soft.{label}")
            entries[nid] = Soft(tuple(weights))
    ev = Evidence(entries)
    try:
        ev.validate(net)
    except HeisenbnError as exc:
        raise exc.with_path("$")
    return ev


def serialize_evidence(ev: Evidence, net: Network) -> str:
    doc: dict[str, Any] = {}
    for nid in sorted(ev.entries):
        entry = ev.entries[nid]
        if isinstance(entry, Hard):
            doc[nid] = {"state": entry.state}
        else:
            space = net.space(nid)
            doc[nid] = {"soft": {space.states[i]: float(w)
                                 for i, w in enumerate(entry.weights) if w != 0.0}}
    return canonical_json(doc)


# --- fault trees ------------------------------------------------------------------

def parse_fault_tree_doc(text: str, strict: bool | None = None) -> FaultTree:
    strict = default_strict() if strict is None else strict
    doc = _expect_object(_loads(text), "$")
    _check_keys(doc, "$", ("format_version", "top", "events", "gates"), (), strict)
    _check_version(doc, "$")
    events = []
    for i, obj in enumerate(_expect_list(doc["events"], "$.events")):
        path = f"$.events[{i}]"
        obj = _expect_object(obj, path)
        _check_keys(obj, path, ("id", "p"), (), strict)
        events.append(BasicEvent(_expect_str(obj["id"], f"{path}.id"),
                                 _expect_number(obj["p"], f"{path}.p")))
    gates = []
    for i, obj in enumerate(_expect_list(doc["gates"], "$.gates")):
        path = f"$.gates[{i}]"
        obj = _expect_object(obj, path)
        _check_keys(obj, path, ("id", "kind", "children"), ("q", "leak"), strict)
        kind = _expect_str(obj["kind"], f"{path}.kind")
        children = tuple(_expect_str(c, f"{path}.children[{j}]")
                         for j, c in enumerate(_expect_list(obj["children"],
                                                            f"{path}.children")))
        q = None
        if "q" in obj:
            q = tuple(_expect_number(v, f"{path}.q[{j}]")
                      for j, v in enumerate(_expect_list(obj["q"], f"{path}.q")))
        leak = _expect_number(obj.get("leak", 0.0), f"{path}.leak")
        gates.append(Gate(_expect_str(obj["id"], f"{path}.id"), kind, children, q, leak))
    ft = FaultTree(tuple(events), tuple(gates), _expect_str(doc["top"], "$.top"))
    try:
        ft.validate()
    except HeisenbnError as exc:
        raise exc.with_path("$")
    return ft


def serialize_fault_tree(ft: FaultTree) -> str:
    events = [{"id": e.id, "p": float(e.p)} for e in sorted(ft.events, key=lambda e: e.id)]
    gates = []
    for g in sorted(ft.gates, key=lambda g: g.id):
        obj: dict[str, Any] = {"id": g.id, "kind": g.kind, "children": list(g.children)}
        if g.kind == "NOISY_OR":
            obj["q"] = [float(v) for v in g.q]
            obj["leak"] = float(g.leak)
        gates.append(obj)
    return canonical_json({"format_version": FORMAT_VERSION, "top": ft.top,
                           "events": events, "gates": gates})


# --- answers / scenarios ------------------------------------------------------------

def _parse_answer(obj: Any, dimension: str, path: str,
                  levels: tuple[str, ...] = RANKED_LEVELS) -> Answer:
    obj = _expect_object(obj, path)
    mapping = {}
    for label, value in obj.items():
        if label not in levels:
            raise SchemaError(f"unknown level {label!r}", path=f"{path}.{label}")
        mapping[label] = _expect_number(value, f"{path}.{label}")
    try:
        return Answer.of(dimension, mapping, levels)
    except HeisenbnError as exc:
        raise exc.with_path(path)


def _answer_obj(answer: Answer, levels: tuple[str, ...] = RANKED_LEVELS) -> dict:
    return {lv: float(w) for lv, w in zip(levels, answer.weights) if w != 0.0}


def _parse_scenario_obj(obj: Any, path: str, strict: bool) -> ProjectScenario:
    obj = _expect_object(obj, path)
    _check_keys(obj, path,
                ("answers", "complexity_answer", "kloc", "hours_booked", "usage_level"),
                ("horizon_months", "certification"), strict)
    answers_obj = _expect_object(obj["answers"], f"{path}.answers")
    answers = []
    for dim, dist in answers_obj.items():
        answers.append(_parse_answer(dist, dim, f"{path}.answers.{dim}"))
    scenario = ProjectScenario(
        answers=tuple(answers),
        complexity_answer=_parse_answer(obj["complexity_answer"],
                                        "new_functionality_complexity",
                                        f"{path}.complexity_answer"),
        kloc=_expect_number(obj["kloc"], f"{path}.kloc"),
        hours_booked=_expect_number(obj["hours_booked"], f"{path}.hours_booked"),
        usage_level=_parse_answer(obj["usage_level"], USAGE_LEVEL,
                                  f"{path}.usage_level", USAGE_LEVELS),
        horizon_months=_expect_int(obj.get("horizon_months", 12),
                                   f"{path}.horizon_months"),
        certification=(None if "certification" not in obj else
                       _expect_str(obj["certification"], f"{path}.certification")),
    )
    try:
        scenario.validate()
    except HeisenbnError as exc:
        raise exc.with_path(path)
    return scenario


def parse_scenario(text: str, strict: bool | None = None) -> ProjectScenario:
    strict = default_strict() if strict is None else strict
    doc = _expect_object(_loads(text), "$")
    _check_version(doc, "$")
    inner = {k: v for k, v in doc.items() if k != "format_version"}
    return _parse_scenario_obj(inner, "$", strict)


def _scenario_obj(s: ProjectScenario) -> dict:
    by_dim = {a.dimension: a for a in s.answers}
    obj: dict[str, Any] = {
        "answers": {dim: _answer_obj(by_dim[dim]) for dim in SCENARIO_DIMENSIONS},
        "complexity_answer": _answer_obj(s.complexity_answer),
        "kloc": float(s.kloc),
        "hours_booked": float(s.hours_booked),
        "usage_level": _answer_obj(s.usage_level, USAGE_LEVELS),
        "horizon_months": s.horizon_months,
    }
    if s.certification is not None:
        obj["certification"] = s.certification
    return obj


def serialize_scenario(s: ProjectScenario) -> str:
    return canonical_json({"format_version": FORMAT_VERSION, **_scenario_obj(s)})


# --- records -----------------------------------------------------------------------

def parse_records(text: str, strict: bool | None = None) -> list[ProjectRecord]:
    strict = default_strict() if strict is None else strict
    doc = _expect_object(_loads(text), "$")
    _check_keys(doc, "$", ("format_version", "records"), (), strict)
    _check_version(doc, "$")
    records = []
    for i, obj in enumerate(_expect_list(doc["records"], "$.records")):
        path = f"$.records[{i}]"
        obj = _expect_object(obj, path)
        _check_keys(obj, path, ("project", "scenario", "observed_found_verification"),
                    ("observed_field_first_year",), strict)
        field_count = obj.get("observed_field_first_year")
        if field_count is not None:
            field_count = _expect_int(field_count, f"{path}.observed_field_first_year")
        record = ProjectRecord(
            scenario=_parse_scenario_obj(obj["scenario"], f"{path}.scenario", strict),
            observed_found_verification=_expect_int(
                obj["observed_found_verification"], f"{path}.observed_found_verification"),
            observed_field_first_year=field_count,
            label=_expect_str(obj["project"], f"{path}.project"),
        )
        try:
            record.validate()
        except HeisenbnError as exc:
            raise exc.with_path(path)
        records.append(record)
    return records


def serialize_records(records: list[ProjectRecord]) -> str:
    out = []
    for r in records:
        obj: dict[str, Any] = {"project": r.label, "scenario": _scenario_obj(r.scenario),
                               "observed_found_verification": r.observed_found_verification}
        if r.observed_field_first_year is not None:
            obj["observed_field_first_year"] = r.observed_field_first_year
        out.append(obj)
    return canonical_json({"format_version": FORMAT_VERSION, "records": out})


# --- params / priors -----------------------------------------------------------------

_RANKED_PARAM_KEYS = ("verification_quality", "development_quality",
                      "problem_complexity", "project_size")
_RANKED_PARAM_FIELDS = {
    "verification_quality": ("verification_weights", "verification_variance"),
    "development_quality": ("development_weights", "development_variance"),
    "problem_complexity": ("complexity_weights", "complexity_variance"),
    "project_size": ("size_weights", "size_variance"),
}


def _level_map(values, levels) -> dict:
    return {lv: float(v) for lv, v in zip(levels, values)}


def _parse_level_map(obj: Any, path: str, levels: tuple[str, ...]) -> tuple[float, ...]:
    obj = _expect_object(obj, path)
    missing = sorted(set(levels) - set(obj))
    if missing:
        raise SchemaError(f"missing levels {missing}", path=path)
    unknown = sorted(set(obj) - set(levels))
    if unknown:
        raise SchemaError(f"unknown levels {unknown}", path=path)
    return tuple(_expect_number(obj[lv], f"{path}.{lv}") for lv in levels)


def _params_obj(p: DefectModelParams) -> dict:
    obj: dict[str, Any] = {
        "insertion_rates": _level_map(p.insertion_rates, RANKED_LEVELS),
        "detection_probs": _level_map(p.detection_probs, RANKED_LEVELS),
        "manifestation_probs": _level_map(p.manifestation_probs, USAGE_LEVELS),
        "complexity_multipliers": _level_map(p.complexity_multipliers, RANKED_LEVELS),
        "count_intervals": [[lo, hi] for lo, hi in p.count_intervals],
        "effective_kloc_thresholds": [float(v) for v in p.effective_kloc_thresholds],
        "hours_thresholds": [float(v) for v in p.hours_thresholds],
        "size_kloc_representatives": _level_map(p.size_kloc_representatives, RANKED_LEVELS),
        "ranked": {},
        "certification_rows": {lv: [float(v) for v in row]
                               for lv, row in zip(RANKED_LEVELS, p.certification_rows)},
        "unbounded_rep_factor": float(p.unbounded_rep_factor),
        "template_version": p.template_version,
    }
    for key in _RANKED_PARAM_KEYS:
        wf, vf = _RANKED_PARAM_FIELDS[key]
        obj["ranked"][key] = {"weights": [float(w) for w in getattr(p, wf)],
                              "variance": float(getattr(p, vf))}
    return obj


def _parse_params_obj(obj: Any, path: str, strict: bool) -> DefectModelParams:
    obj = _expect_object(obj, path)
    keys = ("insertion_rates", "detection_probs", "manifestation_probs",
            "complexity_multipliers", "count_intervals", "effective_kloc_thresholds",
            "hours_thresholds", "size_kloc_representatives", "ranked",
            "certification_rows", "unbounded_rep_factor", "template_version")
    _check_keys(obj, path, keys, (), strict)
    ranked_obj = _expect_object(obj["ranked"], f"{path}.ranked")
    _check_keys(ranked_obj, f"{path}.ranked", _RANKED_PARAM_KEYS, (), strict)
    ranked_fields = {}
    for key in _RANKED_PARAM_KEYS:
        entry = _expect_object(ranked_obj[key], f"{path}.ranked.{key}")
        _check_keys(entry, f"{path}.ranked.{key}", ("weights", "variance"), (), strict)
        wf, vf = _RANKED_PARAM_FIELDS[key]
        ranked_fields[wf] = tuple(
            _expect_number(w, f"{path}.ranked.{key}.weights[{i}]")
            for i, w in enumerate(_expect_list(entry["weights"],
                                               f"{path}.ranked.{key}.weights")))
        ranked_fields[vf] = _expect_number(entry["variance"],
                                           f"{path}.ranked.{key}.variance")
    cert_obj = _expect_object(obj["certification_rows"], f"{path}.certification_rows")
    _check_keys(cert_obj, f"{path}.certification_rows", RANKED_LEVELS, (), strict)
    cert_rows = tuple(
        tuple(_expect_number(v, f"{path}.certification_rows.{lv}[{i}]")
              for i, v in enumerate(_expect_list(cert_obj[lv],
                                                 f"{path}.certification_rows.{lv}")))
        for lv in RANKED_LEVELS)
    params = DefectModelParams(
        insertion_rates=_parse_level_map(obj["insertion_rates"],
                                         f"{path}.insertion_rates", RANKED_LEVELS),
        detection_probs=_parse_level_map(obj["detection_probs"],
                                         f"{path}.detection_probs", RANKED_LEVELS),
        manifestation_probs=_parse_level_map(obj["manifestation_probs"],
                                             f"{path}.manifestation_probs", USAGE_LEVELS),
        complexity_multipliers=_parse_level_map(obj["complexity_multipliers"],
                                                f"{path}.complexity_multipliers",
                                                RANKED_LEVELS),
        count_intervals=_parse_intervals(obj["count_intervals"],
                                         f"{path}.count_intervals"),
        effective_kloc_thresholds=tuple(
            _expect_number(v, f"{path}.effective_kloc_thresholds[{i}]")
            for i, v in enumerate(_expect_list(obj["effective_kloc_thresholds"],
                                               f"{path}.effective_kloc_thresholds"))),
        hours_thresholds=tuple(
            _expect_number(v, f"{path}.hours_thresholds[{i}]")
            for i, v in enumerate(_expect_list(obj["hours_thresholds"],
                                               f"{path}.hours_thresholds"))),
        size_kloc_representatives=_parse_level_map(
            obj["size_kloc_representatives"], f"{path}.size_kloc_representatives",
            RANKED_LEVELS),
        certification_rows=cert_rows,
        unbounded_rep_factor=_expect_number(obj["unbounded_rep_factor"],
                                            f"{path}.unbounded_rep_factor"),
        template_version=_expect_str(obj["template_version"], f"{path}.template_version"),
        **ranked_fields,
    )
    try:
        params.validate()
    except HeisenbnError as exc:
        raise exc.with_path(path)
    return params


def parse_params(text: str, strict: bool | None = None) -> DefectModelParams:
    strict = default_strict() if strict is None else strict
    doc = _expect_object(_loads(text), "$")
    _check_version(doc, "$")
    inner = {k: v for k, v in doc.items() if k != "format_version"}
    return _parse_params_obj(inner, "$", strict)


def serialize_params(p: DefectModelParams) -> str:
    return canonical_json({"format_version": FORMAT_VERSION, **_params_obj(p)})


def parse_priors(text: str, strict: bool | None = None) -> Priors:
    strict = default_strict() if strict is None else strict
    doc = _expect_object(_loads(text), "$")
    _check_keys(doc, "$", ("format_version",),
                ("pseudo_count", "rate_bounds", "detection_beta", "manifestation_beta"),
                strict)
    _check_version(doc, "$")

    def beta_list(key):
        if key not in doc:
            return None
        pairs = _expect_list(doc[key], f"$.{key}")
        return tuple(
            (
                _expect_number(_expect_list(pair, f"$.{key}[{i}]")[0], f"$.{key}[{i}][0]"),
                _expect_number(pair[1], f"$.{key}[{i}][1]"),
            )
            for i, pair in enumerate(pairs))

    bounds = doc.get("rate_bounds", [0.05, 16.0])
    bounds = _expect_list(bounds, "$.rate_bounds")
    priors = Priors(
        pseudo_count=_expect_number(doc.get("pseudo_count", 1.0), "$.pseudo_count"),
        rate_bounds=(_expect_number(bounds[0], "$.rate_bounds[0]"),
                     _expect_number(bounds[1], "$.rate_bounds[1]")),
        detection_beta=beta_list("detection_beta"),
        manifestation_beta=beta_list("manifestation_beta"),
    )
    try:
        priors.validate()
    except HeisenbnError as exc:
        raise exc.with_path("$")
    return priors


def serialize_priors(p: Priors) -> str:
    doc: dict[str, Any] = {"format_version": FORMAT_VERSION,
                           "pseudo_count": float(p.pseudo_count),
                           "rate_bounds": [float(p.rate_bounds[0]), float(p.rate_bounds[1])]}
    if p.detection_beta is not None:
        doc["detection_beta"] = [[float(a), float(b)] for a, b in p.detection_beta]
    if p.manifestation_beta is not None:
        doc["manifestation_beta"] = [[float(a), float(b)] for a, b in p.manifestation_beta]
    return canonical_json(doc)


# --- result documents (shared by CLI and API) -------------------------------------------

def posterior_report_obj(report: PosteriorReport) -> dict:
    posteriors = {}
    for nid in sorted(report.entries):
        post = report.entries[nid]
        entry: dict[str, Any] = {"states": list(post.states),
                                 "probs": [float(v) for v in post.probs]}
        if post.mean is not None:
            entry["mean"] = float(post.mean)
            entry["variance"] = float(post.variance)
        posteriors[nid] = entry
    return {"posteriors": posteriors}


def sensitivity_obj(result: SensitivityResult) -> dict:
    inputs = []
    for item in result.inputs:
        inputs.append({
            "input": item.input,
            "range": float(item.range),
            "mutual_information": float(item.mutual_information),
            "sweeps": [{"state": s.state,
                        "mean": None if s.mean is None else float(s.mean),
                        "skipped": s.skipped} for s in item.sweeps],
        })
    return {"target": result.target, "base_mean": float(result.base_mean),
            "inputs": inputs}


def fit_report_obj(report) -> dict:
    return {
        "initial_loglik": float(report.initial_loglik),
        "final_loglik": float(report.final_loglik),
        "initial_objective": float(report.initial_objective),
        "final_objective": float(report.final_objective),
        "improved": report.improved,
        "sweeps": report.sweeps,
        "per_record": [{"project": r.label,
                        "loglik_before": float(r.loglik_before),
                        "loglik_after": float(r.loglik_after)}
                       for r in report.per_record],
        "parameter_deltas": {name: [float(b), float(a)]
                             for name, (b, a) in sorted(report.parameter_deltas.items())},
    }


def cause_ranking_obj(top: str, ranking: list[tuple[str, float]]) -> dict:
    return {"top": top,
            "ranking": [{"event": eid, "posterior": float(p)} for eid, p in ranking]}


def rating_scales_obj() -> dict:
    scales = load_rating_scales()
    return {"scales": [{"dimension": dim,
                        "levels": {lv: scales[dim].criteria[i]
                                   for i, lv in enumerate(RANKED_LEVELS)}}
                       for dim in sorted(scales)]}
