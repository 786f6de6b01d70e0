"""Sensitivity analysis: tornado sweeps and mutual information.

A tornado sweep hard-sets each input node to each of its states on top of
the base evidence and records the target's posterior mean; the induced range
(max - min over achievable states) ranks the inputs. States that are jointly
impossible with the base evidence are skipped and flagged rather than
counted as zero effect. Mutual information is computed from the exact joint
posterior of (input, target), in bits.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import TargetNotSummarizable, ValidationError, ZeroProbabilityEvidence
from .inference import interval_moments, query_joint, query_posteriors
from .network import Evidence, Network, Soft


def _target_mean(net: Network, probs: np.ndarray, target: str) -> float:
    """Posterior summary: representative mean for interval nodes, bin-index mean otherwise."""
    space = net.space(target)
    if space.intervals is not None:
        return interval_moments(space, probs)[0]
    if space.kind == "ranked5":
        return float(probs @ np.arange(space.card))
    raise TargetNotSummarizable(
        f"target {target!r} has neither numeric intervals nor an ordinal scale")


@dataclass(frozen=True)
class StateSweep:
    state: str
    mean: float | None
    skipped: bool = False


@dataclass(frozen=True)
class InputSensitivity:
    input: str
    sweeps: tuple[StateSweep, ...]
    range: float
    mutual_information: float


@dataclass(frozen=True)
class SensitivityResult:
    target: str
    base_mean: float
    inputs: tuple[InputSensitivity, ...]  # ranked by range descending, ties by id


def mutual_information(net: Network, ev: Evidence, x: str, target: str) -> float:
    """I(X; T | evidence) in bits, from the exact joint posterior."""
    if x == target:
        raise ValidationError("mutual information needs two distinct nodes")
    joint = query_joint(net, ev, [x, target]).table
    px = joint.sum(axis=1)
    pt = joint.sum(axis=0)
    mi = 0.0
    for i in range(joint.shape[0]):
        for j in range(joint.shape[1]):
            p = joint[i, j]
            if p > 0.0:
                mi += p * math.log2(p / (px[i] * pt[j]))
    return max(0.0, float(mi))


def force_state(net: Network, ev: Evidence, node: str, state: str) -> Evidence | None:
    """Evidence with `node` forced to `state`, stacked onto the existing entry.

    A hard entry is a one-hot likelihood, so the product keeps both
    constraints; returns None when the forced state contradicts the existing
    evidence outright.
    """
    space = net.space(node)
    forced = np.zeros(space.card)
    forced[space.index_of(state)] = 1.0
    base_lik = ev.likelihood(net, node)
    if base_lik is not None:
        forced = forced * base_lik
    if not np.any(forced > 0):
        return None
    overlay = dict(ev.entries)
    overlay[node] = Soft(tuple(forced))
    return Evidence(overlay)


def tornado_analysis(net: Network, base_evidence: Evidence, target: str,
                     inputs: list[str]) -> SensitivityResult:
    """Per-input hard-state sweeps of the target's posterior mean.

    Sweeps add Hard evidence on top of the base evidence (they do not replace
    existing entries), so a state contradicting the base evidence is skipped.
    """
    net.node(target)
    if target in inputs:
        raise ValidationError("inputs must exclude the target")
    base = query_posteriors(net, base_evidence, [target])
    base_mean = _target_mean(net, base[target].probs, target)
    results = []
    for x in inputs:
        space = net.space(x)
        sweeps = []
        means = []
        for state in space.states:
            overlay = force_state(net, base_evidence, x, state)
            if overlay is None:
                sweeps.append(StateSweep(state, None, skipped=True))
                continue
            try:
                report = query_posteriors(net, overlay, [target])
            except ZeroProbabilityEvidence:
                sweeps.append(StateSweep(state, None, skipped=True))
                continue
            mean = _target_mean(net, report[target].probs, target)
            sweeps.append(StateSweep(state, mean))
            means.append(mean)
        spread = (max(means) - min(means)) if means else 0.0
        mi = mutual_information(net, base_evidence, x, target)
        results.append(InputSensitivity(x, tuple(sweeps), spread, mi))
    results.sort(key=lambda r: (-r.range, r.input))
    return SensitivityResult(target, base_mean, tuple(results))
