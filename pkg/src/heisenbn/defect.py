"""The defect-prediction template.

A project questionnaire (soft five-level answers per dimension, plus size
inputs) instantiates a fixed causal network:

- three aggregate quality nodes (verification, development, problem
  complexity), each a ranked truncated-Normal combination of its elicited
  dimension nodes;
- a size subnet: new-functionality complexity scales KLoC into an effective
  KLoC rank, which combines with a booked-hours rank into a project-size
  rank;
- the count chain: defects_inserted ~ Poisson(size-KLoC x insertion rate per
  development quality), defects_found_verification ~ Binomial thinning per
  verification quality, residual_defects = inserted - found, and
  field_defects_T ~ Binomial thinning per field-usage level over the
  prediction horizon;
- a certification-type indicator hanging off verification quality
  (weakly informative, so entering it as evidence moves predictions only a
  little).

Forward prediction applies only the questionnaire's soft answers as
evidence; backward diagnosis additionally pins the observed
verification-count interval. Usage level "None" forces field defects to
zero exactly.

This realization is versioned ("reference template"); the exact dimension
list and all numeric defaults are calibratable parameters, not ground truth.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from functools import lru_cache
from importlib import resources

import numpy as np

from .cpds import BinomialCpd, PoissonCpd, RankedCpd, SubtractCpd, TableCpd, uniform_prior
from .errors import (
    CountOutOfRange,
    MissingDimension,
    NegativeInput,
    ParameterOutOfRange,
    SchemaMismatch,
    ValidationError,
)
from .inference import PosteriorReport, query_posteriors
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

# --- template vocabulary ----------------------------------------------------

VERIFICATION_DIMENSIONS = ("testing_quality", "review_quality", "verification_type")
DEVELOPMENT_DIMENSIONS = ("team_experience", "project_management",
                          "process_maturity", "tool_quality")
COMPLEXITY_DIMENSIONS = ("new_functionality_complexity", "requirements_stability",
                         "domain_novelty")
TEMPLATE_DIMENSIONS = VERIFICATION_DIMENSIONS + DEVELOPMENT_DIMENSIONS + COMPLEXITY_DIMENSIONS
#: Dimensions answered through ProjectScenario.answers (complexity is carried
#: separately because it also drives the size subnet).
SCENARIO_DIMENSIONS = tuple(d for d in TEMPLATE_DIMENSIONS
                            if d != "new_functionality_complexity")

VERIFICATION_QUALITY = "verification_quality"
DEVELOPMENT_QUALITY = "development_quality"
PROBLEM_COMPLEXITY = "problem_complexity"
EFFECTIVE_KLOC_RANK = "effective_kloc_rank"
HOURS_RANK = "hours_rank"
PROJECT_SIZE = "project_size"
DEFECTS_INSERTED = "defects_inserted"
DEFECTS_FOUND = "defects_found_verification"
RESIDUAL_DEFECTS = "residual_defects"
FIELD_DEFECTS = "field_defects_T"
USAGE_LEVEL = "usage_level"
CERTIFICATION_TYPE = "certification_type"
REQUIREMENTS_INSTABILITY = "requirements_instability"

CERTIFICATION_STATES = ("no", "planned", "yes")

TEMPLATE_NODE_IDS = TEMPLATE_DIMENSIONS + (
    REQUIREMENTS_INSTABILITY,
    VERIFICATION_QUALITY, DEVELOPMENT_QUALITY, PROBLEM_COMPLEXITY,
    EFFECTIVE_KLOC_RANK, HOURS_RANK, PROJECT_SIZE,
    DEFECTS_INSERTED, DEFECTS_FOUND, RESIDUAL_DEFECTS, FIELD_DEFECTS,
    USAGE_LEVEL, CERTIFICATION_TYPE,
)

DEFAULT_COUNT_INTERVALS = ((0, 0), (1, 1), (2, 2), (3, 5), (6, 10), (11, 20),
                           (21, 50), (51, 100), (101, 200), (201, 500), (501, None))


@dataclass(frozen=True)
class RatingScale:
    """Objective elicitation criteria for one questionnaire dimension."""

    dimension: str
    criteria: tuple[str, str, str, str, str]  # VeryLow..VeryHigh order

    def __post_init__(self):
        if len(self.criteria) != 5 or any(not c.strip() for c in self.criteria):
            raise ValidationError(
                f"rating scale {self.dimension!r} needs five non-empty criteria")


@lru_cache(maxsize=1)
def load_rating_scales() -> dict[str, RatingScale]:
    raw = json.loads(resources.files("heisenbn.data").joinpath("rating_scales.json")
                     .read_text("utf-8"))
    scales = {}
    for entry in raw["scales"]:
        levels = entry["levels"]
        scales[entry["dimension"]] = RatingScale(
            entry["dimension"], tuple(levels[lv] for lv in RANKED_LEVELS))
    return scales


@dataclass(frozen=True)
class Answer:
    """Soft distribution over the five levels of one dimension."""

    dimension: str
    weights: tuple[float, float, float, float, float]

    def __post_init__(self):
        w = np.asarray(self.weights, dtype=float)
        if w.shape != (5,):
            raise SchemaMismatch(f"answer for {self.dimension!r} needs 5 weights")
        if np.any(w < 0):
            raise SchemaMismatch(f"answer for {self.dimension!r} has negative weights")
        if abs(w.sum() - 1.0) > 1e-9:
            raise SchemaMismatch(
                f"answer for {self.dimension!r} sums to {w.sum():.12g}, not 1")

    @classmethod
    def of(cls, dimension: str, mapping: dict[str, float],
           levels: tuple[str, ...] = RANKED_LEVELS) -> "Answer":
        unknown = sorted(set(mapping) - set(levels))
        if unknown:
            raise SchemaMismatch(f"answer for {dimension!r} has unknown levels {unknown}")
        return cls(dimension, tuple(float(mapping.get(lv, 0.0)) for lv in levels))

    @classmethod
    def point(cls, dimension: str, level: str,
              levels: tuple[str, ...] = RANKED_LEVELS) -> "Answer":
        return cls.of(dimension, {level: 1.0}, levels)

    def as_mapping(self, levels: tuple[str, ...] = RANKED_LEVELS) -> dict[str, float]:
        return {lv: w for lv, w in zip(levels, self.weights) if w != 0.0}


@dataclass(frozen=True)
class ProjectScenario:
    """Questionnaire answers plus size inputs for one project."""

    answers: tuple[Answer, ...]
    complexity_answer: Answer
    kloc: float
    hours_booked: float
    usage_level: Answer
    horizon_months: int = 12
    certification: str | None = None

    def validate(self) -> None:
        seen: dict[str, int] = {}
        for a in self.answers:
            seen[a.dimension] = seen.get(a.dimension, 0) + 1
        dupes = sorted(d for d, n in seen.items() if n > 1)
        if dupes:
            raise SchemaMismatch(f"dimensions answered more than once: {dupes}")
        extra = sorted(set(seen) - set(SCENARIO_DIMENSIONS))
        if extra:
            raise SchemaMismatch(f"unknown dimensions: {extra}")
        missing = sorted(set(SCENARIO_DIMENSIONS) - set(seen))
        if missing:
            raise MissingDimension(f"missing answers for dimensions: {missing}")
        if self.complexity_answer.dimension != "new_functionality_complexity":
            raise SchemaMismatch(
                "complexity_answer must rate new_functionality_complexity, got "
                f"{self.complexity_answer.dimension!r}")
        if self.usage_level.dimension != USAGE_LEVEL:
            raise SchemaMismatch("usage_level answer must rate usage_level")
        if self.kloc < 0:
            raise NegativeInput(f"kloc must be nonnegative, got {self.kloc}")
        if self.hours_booked < 0:
            raise NegativeInput(f"hours_booked must be nonnegative, got {self.hours_booked}")
        if self.horizon_months < 1:
            raise SchemaMismatch(f"horizon_months must be positive, got {self.horizon_months}")
        if self.certification is not None and self.certification not in CERTIFICATION_STATES:
            raise SchemaMismatch(
                f"certification must be one of {CERTIFICATION_STATES}, got "
                f"{self.certification!r}")

    def answer_for(self, dimension: str) -> Answer:
        if dimension == "new_functionality_complexity":
            return self.complexity_answer
        for a in self.answers:
            if a.dimension == dimension:
                return a
        raise MissingDimension(f"no answer for dimension {dimension!r}")


@dataclass(frozen=True)
class DefectModelParams:
    """Calibratable parameters of the reference template.

    Per-level tuples run VeryLow..VeryHigh (usage: None..VeryHigh).
    """

    insertion_rates: tuple[float, ...] = (8.0, 4.0, 2.0, 1.0, 0.5)
    detection_probs: tuple[float, ...] = (0.30, 0.50, 0.70, 0.85, 0.95)
    manifestation_probs: tuple[float, ...] = (0.0, 0.15, 0.30, 0.50, 0.70)
    complexity_multipliers: tuple[float, ...] = (0.6, 0.8, 1.0, 1.5, 2.5)
    count_intervals: tuple[tuple[int, int | None], ...] = DEFAULT_COUNT_INTERVALS
    effective_kloc_thresholds: tuple[float, ...] = (10.0, 30.0, 75.0, 150.0)
    hours_thresholds: tuple[float, ...] = (1000.0, 5000.0, 25000.0, 80000.0)
    size_kloc_representatives: tuple[float, ...] = (5.0, 20.0, 50.0, 110.0, 220.0)
    verification_weights: tuple[float, ...] = (2.0, 1.0, 1.0)
    verification_variance: float = 0.02
    development_weights: tuple[float, ...] = (2.0, 1.0, 1.0, 1.0)
    development_variance: float = 0.02
    complexity_weights: tuple[float, ...] = (2.0, 1.0, 1.0)
    complexity_variance: float = 0.02
    size_weights: tuple[float, ...] = (2.0, 1.0)
    size_variance: float = 0.02
    certification_rows: tuple[tuple[float, float, float], ...] = (
        (0.55, 0.30, 0.15), (0.45, 0.30, 0.25), (0.35, 0.30, 0.35),
        (0.25, 0.30, 0.45), (0.15, 0.30, 0.55))
    unbounded_rep_factor: float = 1.5
    template_version: str = "1"

    def validate(self) -> None:
        def probs_ok(name, values, n=5):
            if len(values) != n or any(not (0.0 <= p <= 1.0) for p in values):
                raise ParameterOutOfRange(f"{name} must be {n} probabilities in [0, 1]")

        if len(self.insertion_rates) != 5 or any(r <= 0 for r in self.insertion_rates):
            raise ParameterOutOfRange("insertion_rates must be 5 positive rates")
        probs_ok("detection_probs", self.detection_probs)
        probs_ok("manifestation_probs", self.manifestation_probs)
        if self.manifestation_probs[0] != 0.0:
            raise ParameterOutOfRange(
                "manifestation probability for usage level None must be exactly 0")
        if len(self.complexity_multipliers) != 5 or any(m <= 0 for m in self.complexity_multipliers):
            raise ParameterOutOfRange("complexity_multipliers must be 5 positive factors")
        for name, thresholds in (("effective_kloc_thresholds", self.effective_kloc_thresholds),
                                 ("hours_thresholds", self.hours_thresholds)):
            if len(thresholds) != 4 or list(thresholds) != sorted(thresholds):
                raise ParameterOutOfRange(f"{name} must be 4 ascending boundaries")
        if len(self.size_kloc_representatives) != 5 or any(
                v <= 0 for v in self.size_kloc_representatives):
            raise ParameterOutOfRange("size_kloc_representatives must be 5 positive values")
        if len(self.certification_rows) != 5:
            raise ParameterOutOfRange("certification_rows needs one row per quality level")
        for row in self.certification_rows:
            probs_ok("certification row", row, 3)
            if abs(sum(row) - 1.0) > 1e-9:
                raise ParameterOutOfRange("certification rows must sum to 1")

    def field_probs(self, horizon_months: int) -> tuple[float, ...]:
        """Manifestation probabilities over a horizon of T months.

        The per-year probability p scales as 1 - (1-p)^(T/12); T = 12 returns
        the stored values unchanged (and usage None stays exactly 0).
        """
        if horizon_months == 12:
            return self.manifestation_probs
        t = horizon_months / 12.0
        return tuple(0.0 if p == 0.0 else 1.0 - (1.0 - p) ** t
                     for p in self.manifestation_probs)


DEFAULT_PARAMS = DefectModelParams()


def _rank_of(value: float, thresholds: tuple[float, ...]) -> int:
    """Index of the five-level rank bucket a nonnegative value falls into."""
    for i, t in enumerate(thresholds):
        if value < t:
            return i
    return len(thresholds)


_REVERSE_ROWS = tuple(tuple(1.0 if j == 4 - i else 0.0 for j in range(5)) for i in range(5))


@lru_cache(maxsize=64)
def _ranked_table(weights: tuple[float, ...], variance: float, n_parents: int) -> np.ndarray:
    spaces = tuple(ranked5_space() for _ in range(n_parents))
    return RankedCpd(weights, variance).expand(spaces, ranked5_space())


class _CachedRanked(RankedCpd):
    """RankedCpd whose expansion is memoized (the template rebuilds per scenario)."""

    def expand(self, parent_spaces, child_space):
        if all(s.kind == "ranked5" for s in parent_spaces) and child_space.kind == "ranked5":
            return _ranked_table(self.weights, self.variance, len(parent_spaces))
        return super().expand(parent_spaces, child_space)


@lru_cache(maxsize=64)
def _count_chain_cpds(params: DefectModelParams, horizon_months: int):
    """Poisson/binomial CPDs of the count chain; cached per (params, horizon)."""
    rates = tuple(params.size_kloc_representatives[s] * params.insertion_rates[d]
                  for s in range(5) for d in range(5))
    return (PoissonCpd(rates),
            BinomialCpd(params.detection_probs),
            BinomialCpd(params.field_probs(horizon_months)))


def _ekloc_rank_rows(params: DefectModelParams, kloc: float) -> tuple[tuple[float, ...], ...]:
    rows = []
    for mult in params.complexity_multipliers:
        rank = _rank_of(kloc * mult, params.effective_kloc_thresholds)
        rows.append(tuple(1.0 if i == rank else 0.0 for i in range(5)))
    return tuple(rows)


def template_count_space(params: DefectModelParams) -> StateSpace:
    return count_space(params.count_intervals, params.unbounded_rep_factor)


def build_defect_network(scenario: ProjectScenario,
                         params: DefectModelParams = DEFAULT_PARAMS,
                         ) -> tuple[Network, Evidence]:
    """Instantiate the reference template for one scenario.

    Returns the network plus the evidence set carrying the scenario's soft
    answers (and hard certification status when given).
    """
    scenario.validate()
    params.validate()
    ranked = ranked5_space()
    counts = template_count_space(params)
    poisson_cpd, found_cpd, field_cpd = _count_chain_cpds(params, scenario.horizon_months)

    nodes = [Node(dim, ranked, uniform_prior(5)) for dim in TEMPLATE_DIMENSIONS]
    nodes += [
        Node(REQUIREMENTS_INSTABILITY, ranked, TableCpd(_REVERSE_ROWS),
             ("requirements_stability",)),
        Node(VERIFICATION_QUALITY, ranked,
             _CachedRanked(params.verification_weights, params.verification_variance),
             VERIFICATION_DIMENSIONS),
        Node(DEVELOPMENT_QUALITY, ranked,
             _CachedRanked(params.development_weights, params.development_variance),
             DEVELOPMENT_DIMENSIONS),
        Node(PROBLEM_COMPLEXITY, ranked,
             _CachedRanked(params.complexity_weights, params.complexity_variance),
             ("new_functionality_complexity", REQUIREMENTS_INSTABILITY, "domain_novelty")),
        Node(EFFECTIVE_KLOC_RANK, ranked, TableCpd(_ekloc_rank_rows(params, scenario.kloc)),
             ("new_functionality_complexity",)),
        Node(HOURS_RANK, ranked, TableCpd((tuple(
            1.0 if i == _rank_of(scenario.hours_booked, params.hours_thresholds) else 0.0
            for i in range(5)),))),
        Node(PROJECT_SIZE, ranked,
             _CachedRanked(params.size_weights, params.size_variance),
             (EFFECTIVE_KLOC_RANK, HOURS_RANK)),
        Node(DEFECTS_INSERTED, counts, poisson_cpd, (PROJECT_SIZE, DEVELOPMENT_QUALITY)),
        Node(DEFECTS_FOUND, counts, found_cpd, (DEFECTS_INSERTED, VERIFICATION_QUALITY)),
        Node(RESIDUAL_DEFECTS, counts, SubtractCpd(), (DEFECTS_INSERTED, DEFECTS_FOUND)),
        Node(USAGE_LEVEL, StateSpace(USAGE_LEVELS), uniform_prior(5)),
        Node(FIELD_DEFECTS, counts, field_cpd, (RESIDUAL_DEFECTS, USAGE_LEVEL)),
        Node(CERTIFICATION_TYPE, StateSpace(CERTIFICATION_STATES),
             TableCpd(params.certification_rows), (VERIFICATION_QUALITY,)),
    ]
    metadata = {"template_version": params.template_version,
                "params": params, "scenario": scenario}
    net = build_network(nodes, metadata)

    entries: dict[str, Hard | Soft] = {}
    for dim in SCENARIO_DIMENSIONS:
        entries[dim] = Soft(scenario.answer_for(dim).weights)
    entries["new_functionality_complexity"] = Soft(scenario.complexity_answer.weights)
    entries[USAGE_LEVEL] = Soft(scenario.usage_level.weights)
    if scenario.certification is not None:
        entries[CERTIFICATION_TYPE] = Hard(scenario.certification)
    return net, Evidence(entries)


@dataclass(frozen=True)
class EffectiveSize:
    """Size-subnet summary: the effective-KLoC mixture and rank distributions."""

    kloc_mixture: tuple[tuple[float, float], ...]  # (effective kloc, weight) per level
    kloc_rank_probs: np.ndarray
    hours_rank: str
    size_probs: np.ndarray


def effective_size(kloc: float, complexity_answer: Answer, hours_booked: float,
                   params: DefectModelParams = DEFAULT_PARAMS) -> EffectiveSize:
    """Effective KLoC (complexity-weighted) combined with booked hours.

    Effective KLoC is kloc x multiplier(level), mixed over the complexity
    answer; its rank and the hours rank feed the ranked project-size node.
    """
    if kloc < 0:
        raise NegativeInput(f"kloc must be nonnegative, got {kloc}")
    if hours_booked < 0:
        raise NegativeInput(f"hours_booked must be nonnegative, got {hours_booked}")
    params.validate()
    weights = np.asarray(complexity_answer.weights, dtype=float)
    weights = weights / weights.sum()
    mixture = tuple((kloc * mult, float(w))
                    for mult, w in zip(params.complexity_multipliers, weights))
    ek_rows = np.asarray(_ekloc_rank_rows(params, kloc))
    kloc_rank_probs = weights @ ek_rows
    hours_idx = _rank_of(hours_booked, params.hours_thresholds)
    size_table = _ranked_table(params.size_weights, params.size_variance, 2)
    size_probs = kloc_rank_probs @ size_table[:, hours_idx, :]
    return EffectiveSize(mixture, kloc_rank_probs, RANKED_LEVELS[hours_idx], size_probs)


def predict_defects(scenario: ProjectScenario,
                    params: DefectModelParams = DEFAULT_PARAMS) -> PosteriorReport:
    """Forward pass: distributions and means for verification and field defects."""
    net, ev = build_defect_network(scenario, params)
    return query_posteriors(net, ev, [DEFECTS_FOUND, FIELD_DEFECTS])


DIAGNOSIS_TARGETS = (VERIFICATION_QUALITY, DEVELOPMENT_QUALITY, PROBLEM_COMPLEXITY,
                     DEFECTS_INSERTED, RESIDUAL_DEFECTS, FIELD_DEFECTS)


def diagnose_from_verification(scenario: ProjectScenario,
                               params: DefectModelParams,
                               observed_found: int) -> PosteriorReport:
    """Backward pass: pin the observed verification-count interval, update the rest."""
    if observed_found < 0:
        raise CountOutOfRange(f"observed count must be nonnegative, got {observed_found}")
    net, ev = build_defect_network(scenario, params)
    counts = net.space(DEFECTS_FOUND)
    idx = counts.interval_index(observed_found)
    if idx is None:
        raise CountOutOfRange(
            f"count {observed_found} is not representable in the model's intervals")
    entries = dict(ev.entries)
    entries[DEFECTS_FOUND] = Hard(counts.states[idx])
    return query_posteriors(net, Evidence(entries), list(DIAGNOSIS_TARGETS))
