"""Parameter calibration from historical project records.

Each record is a scenario plus its observed verification-defect count and
(optionally) its first-year field count. The fit maximizes the penalized
log-likelihood of the observed count intervals over insertion rates,
detection probabilities, and manifestation probabilities by coordinate
ascent on a bounded grid, refined twice (each refinement re-grids the +/-1
neighborhood of the incumbent at ten times the resolution). Ranked weights
and variances stay fixed unless explicitly unlocked. Priors anchor the
fitted values at the initial parameters with configurable strength, so a
single coarse record cannot drag a probability to an extreme.

Record likelihoods exploit the template's structure: the quality branches
(size, development, verification, usage) are conditionally independent given
the questionnaire evidence, so each record reduces to four branch posteriors
plus the shared count-chain tables. A test cross-checks this factorization
against full-network inference.

The synthesizer draws scenarios with uniform point answers and then
ancestrally samples the template network itself, reporting count-node
samples as their interval representatives; fitting is therefore
well-specified against synthesized data, which is the recovery oracle.
"""

from __future__ import annotations

import dataclasses
import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .cpds import SubtractCpd
from .defect import (
    CERTIFICATION_STATES,
    CERTIFICATION_TYPE,
    COMPLEXITY_DIMENSIONS,
    DEVELOPMENT_DIMENSIONS,
    SCENARIO_DIMENSIONS,
    USAGE_LEVEL,
    VERIFICATION_DIMENSIONS,
    Answer,
    DefectModelParams,
    ProjectScenario,
    _count_chain_cpds,
    _ekloc_rank_rows,
    _rank_of,
    _ranked_table,
    build_defect_network,
    template_count_space,
)
from .errors import CountOutOfRange, EmptyRecords, ValidationError
from .inference import sample_network
from .network import RANKED_LEVELS, USAGE_LEVELS


@dataclass(frozen=True)
class ProjectRecord:
    scenario: ProjectScenario
    observed_found_verification: int
    observed_field_first_year: int | None = None
    label: str = ""

    def validate(self) -> None:
        self.scenario.validate()
        if self.observed_found_verification < 0:
            raise CountOutOfRange("observed_found_verification must be nonnegative")
        if self.observed_field_first_year is not None and self.observed_field_first_year < 0:
            raise CountOutOfRange("observed_field_first_year must be nonnegative")


@dataclass(frozen=True)
class Priors:
    """Anchoring priors for the fit.

    pseudo_count is the equivalent-sample-size pulling each fitted
    probability toward its initial value (Beta(1 + k*p0, 1 + k*(1-p0)));
    insertion rates get a Gaussian prior in log-space of the same strength,
    hard-bounded to rate_bounds. Explicit per-state Beta parameters override
    the derived ones.
    """

    pseudo_count: float = 1.0
    rate_bounds: tuple[float, float] = (0.05, 16.0)
    detection_beta: tuple[tuple[float, float], ...] | None = None
    manifestation_beta: tuple[tuple[float, float], ...] | None = None

    def validate(self) -> None:
        if self.pseudo_count <= 0:
            raise ValidationError("pseudo_count must be positive")
        lo, hi = self.rate_bounds
        if not (0 < lo < hi):
            raise ValidationError("rate_bounds must satisfy 0 < lo < hi")
        for name, betas in (("detection_beta", self.detection_beta),
                            ("manifestation_beta", self.manifestation_beta)):
            if betas is not None:
                if len(betas) != 5 or any(a <= 0 or b <= 0 for a, b in betas):
                    raise ValidationError(f"{name} needs 5 positive (alpha, beta) pairs")


# --- record likelihood ------------------------------------------------------

@dataclass(frozen=True)
class _RecordContext:
    """Branch posteriors and observation indices; fixed while ranked params are."""

    size_w: np.ndarray
    dev_w: np.ndarray
    verif_w: np.ndarray
    usage_w: np.ndarray
    found_idx: int
    field_idx: int | None
    horizon: int
    label: str


def _normalized(answer: Answer) -> np.ndarray:
    w = np.asarray(answer.weights, dtype=float)
    return w / w.sum()


def _branch_weights(scenario: ProjectScenario, params: DefectModelParams):
    """Posteriors of the four chain parents given the questionnaire evidence."""
    ans = {d: _normalized(scenario.answer_for(d)) for d in SCENARIO_DIMENSIONS}
    ans["new_functionality_complexity"] = _normalized(scenario.complexity_answer)

    vq_table = _ranked_table(params.verification_weights, params.verification_variance, 3)
    verif = np.einsum("i,j,k,ijka->a", *(ans[d] for d in VERIFICATION_DIMENSIONS), vq_table)
    if scenario.certification is not None:
        cert_col = np.asarray(params.certification_rows)[
            :, CERTIFICATION_STATES.index(scenario.certification)]
        verif = verif * cert_col
    verif = verif / verif.sum()

    dq_table = _ranked_table(params.development_weights, params.development_variance, 4)
    dev = np.einsum("i,j,k,l,ijkla->a", *(ans[d] for d in DEVELOPMENT_DIMENSIONS), dq_table)
    dev = dev / dev.sum()

    ek = ans["new_functionality_complexity"] @ np.asarray(
        _ekloc_rank_rows(params, scenario.kloc))
    hours_idx = _rank_of(scenario.hours_booked, params.hours_thresholds)
    size_table = _ranked_table(params.size_weights, params.size_variance, 2)
    size = ek @ size_table[:, hours_idx, :]
    size = size / size.sum()

    usage = _normalized(scenario.usage_level)
    return size, dev, verif, usage


def _record_context(record: ProjectRecord, params: DefectModelParams) -> _RecordContext:
    record.validate()
    counts = template_count_space(params)
    found_idx = counts.interval_index(record.observed_found_verification)
    if found_idx is None:
        raise CountOutOfRange(
            f"found count {record.observed_found_verification} not representable")
    field_idx = None
    if record.observed_field_first_year is not None:
        field_idx = counts.interval_index(record.observed_field_first_year)
        if field_idx is None:
            raise CountOutOfRange(
                f"field count {record.observed_field_first_year} not representable")
    size, dev, verif, usage = _branch_weights(record.scenario, params)
    return _RecordContext(size, dev, verif, usage, found_idx, field_idx,
                          record.scenario.horizon_months, record.label)


@lru_cache(maxsize=8)
def _chain_tables(params: DefectModelParams) -> "_ChainTables":
    return _ChainTables(params)


class _ChainTables:
    """Count-chain CPTs for one candidate parameter set, shared across records."""

    def __init__(self, params: DefectModelParams):
        self.params = params
        counts = template_count_space(params)
        ranked5 = _ranked5_placeholder()
        poisson_cpd, found_cpd, _ = _count_chain_cpds(params, 12)
        self.insert = poisson_cpd.expand((ranked5, ranked5), counts)  # (s, d, i)
        self.found = found_cpd.expand((counts, ranked5), counts)      # (i, v, f)
        self.resid_idx = SubtractCpd().expand((counts, counts), counts).argmax(-1)
        self._field: dict[int, np.ndarray] = {}
        self._counts = counts

    def field(self, horizon: int) -> np.ndarray:
        if horizon not in self._field:
            usage_space = _usage_placeholder()
            _, _, field_cpd = _count_chain_cpds(self.params, horizon)
            self._field[horizon] = field_cpd.expand((self._counts, usage_space),
                                                    self._counts)
        return self._field[horizon]


def _ranked5_placeholder():
    from .network import ranked5_space
    return ranked5_space()


def _usage_placeholder():
    from .network import StateSpace
    return StateSpace(USAGE_LEVELS)


def _context_loglik(ctx: _RecordContext, tables: _ChainTables) -> float:
    insert_mix = np.einsum("s,d,sdi->i", ctx.size_w, ctx.dev_w, tables.insert)
    found_lik = tables.found[:, :, ctx.found_idx] @ ctx.verif_w
    like = insert_mix * found_lik
    if ctx.field_idx is not None:
        resid = tables.resid_idx[:, ctx.found_idx]
        field_lik = tables.field(ctx.horizon)[resid, :, ctx.field_idx] @ ctx.usage_w
        like = like * field_lik
    total = float(like.sum())
    if total <= 0.0:
        return -math.inf
    return math.log(total)


def record_loglik(record: ProjectRecord, params: DefectModelParams) -> float:
    """Log-probability of the record's observed count intervals under its network."""
    return _context_loglik(_record_context(record, params), _chain_tables(params))


def expected_found_mean(record: ProjectRecord, params: DefectModelParams) -> float:
    """Analytic mean of the found-count interval representative for one record."""
    ctx = _record_context(record, params)
    tables = _chain_tables(params)
    insert_mix = np.einsum("s,d,sdi->i", ctx.size_w, ctx.dev_w, tables.insert)
    found_dist = np.einsum("i,ivf,v->f", insert_mix, tables.found, ctx.verif_w)
    reps = template_count_space(params).representatives()
    return float(found_dist @ reps)


# --- the fit -----------------------------------------------------------------

_PROB_COORDS = tuple(f"detection_probs[{i}]" for i in range(5)) + \
    tuple(f"manifestation_probs[{i}]" for i in range(1, 5))
_RATE_COORDS = tuple(f"insertion_rates[{i}]" for i in range(5))
_VARIANCE_COORDS = ("verification_variance", "development_variance",
                    "complexity_variance", "size_variance")


def _get_coord(params: DefectModelParams, name: str) -> float:
    if "[" in name:
        field, idx = name[:-1].split("[")
        return getattr(params, field)[int(idx)]
    return getattr(params, name)


def _set_coord(params: DefectModelParams, name: str, value: float) -> DefectModelParams:
    if "[" in name:
        field, idx = name[:-1].split("[")
        values = list(getattr(params, field))
        values[int(idx)] = value
        return dataclasses.replace(params, **{field: tuple(values)})
    return dataclasses.replace(params, **{name: value})


def _beta_logpdf(p: float, alpha: float, beta: float) -> float:
    p = min(max(p, 1e-12), 1.0 - 1e-12)
    return (alpha - 1.0) * math.log(p) + (beta - 1.0) * math.log(1.0 - p)


def _log_prior(params: DefectModelParams, priors: Priors,
               init: DefectModelParams) -> float:
    k = priors.pseudo_count
    lp = 0.0
    for i in range(5):
        if priors.detection_beta is not None:
            a, b = priors.detection_beta[i]
        else:
            p0 = init.detection_probs[i]
            a, b = 1.0 + k * p0, 1.0 + k * (1.0 - p0)
        lp += _beta_logpdf(params.detection_probs[i], a, b)
    for i in range(1, 5):  # usage None stays pinned at 0
        if priors.manifestation_beta is not None:
            a, b = priors.manifestation_beta[i]
        else:
            p0 = init.manifestation_probs[i]
            a, b = 1.0 + k * p0, 1.0 + k * (1.0 - p0)
        lp += _beta_logpdf(params.manifestation_probs[i], a, b)
    lo, hi = priors.rate_bounds
    for i in range(5):
        r = params.insertion_rates[i]
        if not (lo <= r <= hi):
            return -math.inf
        lp += -0.5 * k * (math.log(r) - math.log(init.insertion_rates[i])) ** 2
    return lp


@dataclass(frozen=True)
class RecordFit:
    label: str
    loglik_before: float
    loglik_after: float


@dataclass(frozen=True)
class FitReport:
    initial_loglik: float
    final_loglik: float
    initial_objective: float  # penalized: loglik + log prior
    final_objective: float
    per_record: tuple[RecordFit, ...]
    parameter_deltas: dict[str, tuple[float, float]]
    sweeps: int
    improved: bool


def fit_parameters(records: list[ProjectRecord], priors: Priors,
                   init: DefectModelParams, max_sweeps: int = 3,
                   unlock_ranked: bool = False,
                   ) -> tuple[DefectModelParams, FitReport]:
    """Coordinate ascent over rates, detection, and manifestation probabilities.

    Deterministic given records, priors, init, and grid settings; never
    decreases the penalized objective (the incumbent value is always a
    candidate). A non-improving fit is reported, not raised.
    """
    if not records:
        raise EmptyRecords("fit needs at least one record")
    priors.validate()
    init.validate()

    ranked_free = unlock_ranked
    contexts = [_record_context(r, init) for r in records]

    def loglik_per_record(params: DefectModelParams) -> list[float]:
        nonlocal contexts
        if ranked_free:
            contexts = [_record_context(r, params) for r in records]
        tables = _chain_tables(params)
        return [_context_loglik(ctx, tables) for ctx in contexts]

    def objective(params: DefectModelParams) -> float:
        lp = _log_prior(params, priors, init)
        if lp == -math.inf:
            return -math.inf
        return sum(loglik_per_record(params)) + lp

    initial_per_record = loglik_per_record(init)
    initial_loglik = sum(initial_per_record)
    initial_objective = initial_loglik + _log_prior(init, priors, init)

    coords = list(_PROB_COORDS) + list(_RATE_COORDS)
    if unlock_ranked:
        coords += list(_VARIANCE_COORDS)

    current = init
    current_obj = initial_objective
    sweeps_done = 0
    for _ in range(max_sweeps):
        sweeps_done += 1
        sweep_gain = 0.0
        for name in coords:
            incumbent = _get_coord(current, name)
            if name in _RATE_COORDS:
                lo, hi = priors.rate_bounds
                grid = np.geomspace(lo, hi, 13)
                log_step = (math.log(hi) - math.log(lo)) / 12.0
                refine = lambda b, s: np.exp(np.clip(
                    np.linspace(math.log(b) - s, math.log(b) + s, 21),
                    math.log(lo), math.log(hi)))
                steps = (log_step, log_step / 10.0)
            elif name in _VARIANCE_COORDS:
                lo, hi = 1e-3, 0.5
                grid = np.geomspace(lo, hi, 13)
                log_step = (math.log(hi) - math.log(lo)) / 12.0
                refine = lambda b, s: np.exp(np.clip(
                    np.linspace(math.log(b) - s, math.log(b) + s, 21),
                    math.log(lo), math.log(hi)))
                steps = (log_step, log_step / 10.0)
            else:
                grid = np.linspace(0.02, 0.98, 13)
                step = 0.08
                refine = lambda b, s: np.clip(np.linspace(b - s, b + s, 21), 0.001, 0.999)
                steps = (step, step / 10.0)

            best_val, best_obj = incumbent, current_obj
            for stage in range(3):
                candidates = grid if stage == 0 else refine(best_val, steps[stage - 1])
                for cand in candidates:
                    cand = float(cand)
                    if cand == best_val:
                        continue
                    obj = objective(_set_coord(current, name, cand))
                    if obj > best_obj:
                        best_val, best_obj = cand, obj
            if best_val != incumbent:
                sweep_gain += best_obj - current_obj
                current = _set_coord(current, name, best_val)
                current_obj = best_obj
        if sweep_gain <= 1e-9:
            break

    final_per_record = loglik_per_record(current)
    final_loglik = sum(final_per_record)
    final_objective = final_loglik + _log_prior(current, priors, init)
    deltas = {}
    for name in coords:
        before, after = _get_coord(init, name), _get_coord(current, name)
        if before != after:
            deltas[name] = (before, after)
    report = FitReport(
        initial_loglik=initial_loglik,
        final_loglik=final_loglik,
        initial_objective=initial_objective,
        final_objective=final_objective,
        per_record=tuple(RecordFit(r.label, b, a) for r, b, a in
                         zip(records, initial_per_record, final_per_record)),
        parameter_deltas=deltas,
        sweeps=sweeps_done,
        improved=final_objective > initial_objective,
    )
    return current, report


# --- synthetic records --------------------------------------------------------

_KLOC_RANGE = (2.0, 220.0)
_HOURS_RANGE = (500.0, 150000.0)


def _synthesize_detailed(true_params: DefectModelParams, seed: int, n: int,
                         usage_level: str | None = None,
                         ) -> tuple[list[ProjectRecord], list[dict[str, str]]]:
    if n < 1:
        raise ValidationError("need n >= 1 records")
    true_params.validate()
    rng = np.random.default_rng(seed)
    records: list[ProjectRecord] = []
    latents: list[dict[str, str]] = []
    counts = template_count_space(true_params)
    for idx in range(n):
        dims = {d: RANKED_LEVELS[int(rng.integers(5))] for d in SCENARIO_DIMENSIONS}
        complexity = RANKED_LEVELS[int(rng.integers(5))]
        usage = usage_level or USAGE_LEVELS[int(rng.integers(5))]
        kloc = float(np.round(rng.uniform(*_KLOC_RANGE), 1))
        hours = float(np.round(rng.uniform(*_HOURS_RANGE)))
        scenario = ProjectScenario(
            answers=tuple(Answer.point(d, lv) for d, lv in dims.items()),
            complexity_answer=Answer.point("new_functionality_complexity", complexity),
            kloc=kloc,
            hours_booked=hours,
            usage_level=Answer.point(USAGE_LEVEL, usage, levels=USAGE_LEVELS),
        )
        net, _ = build_defect_network(scenario, true_params)
        pinned = dict(dims)
        pinned["new_functionality_complexity"] = complexity
        pinned[USAGE_LEVEL] = usage
        sample = sample_network(net, rng, given=pinned)
        found_count = int(round(counts.representative(
            counts.index_of(sample["defects_found_verification"]))))
        field_count = int(round(counts.representative(
            counts.index_of(sample["field_defects_T"]))))
        scenario = dataclasses.replace(scenario, certification=sample[CERTIFICATION_TYPE])
        records.append(ProjectRecord(scenario, found_count, field_count,
                                     label=f"synthetic-{idx:04d}"))
        latents.append(sample)
    return records, latents


def synthesize_records(true_params: DefectModelParams, scenario_sampler_seed: int,
                       n: int, usage_level: str | None = None) -> list[ProjectRecord]:
    """Deterministic synthetic records: uniform point-answer scenarios, then an
    ancestral sample of the generative chain; count observations are reported
    as interval representatives."""
    records, _ = _synthesize_detailed(true_params, scenario_sampler_seed, n, usage_level)
    return records
