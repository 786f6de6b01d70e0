"""Parametric CPD families, each expandable to a tabular CPT.

- TableCpd: explicit rows, one per parent configuration (row-major, first
  parent varying slowest).
- NoisyOrCpd: binary noisy-OR with per-parent inhibitor probabilities and a
  leak; P(child=false | x) = (1-leak) * prod_{i: x_i active} q_i.
- RankedCpd: the standard ranked-node construction for 5-level ordinal
  scales. Parent levels map to bin midpoints on [0,1]; the child follows a
  truncated Normal around the weighted mean, integrated over the five bins.
- PoissonCpd / BinomialCpd / SubtractCpd: count-node distributions over
  integer interval spaces (defect insertion, thinning by detection, and the
  residual difference).
"""

from __future__ import annotations

from dataclasses import dataclass
from itertools import product

import numpy as np
from scipy import stats

from .errors import CpdShapeMismatch, IncompatibleIntervals, ParameterOutOfRange
from .network import RANKED_MIDPOINTS, StateSpace

RANKED_BIN_EDGES = np.array([0.0, 0.2, 0.4, 0.6, 0.8, 1.0])


def _parent_cards(parent_spaces: tuple[StateSpace, ...]) -> tuple[int, ...]:
    return tuple(s.card for s in parent_spaces)


def _round_rep(value: float) -> int:
    """Integer trial count for a binomial conditioned on an interval representative."""
    return int(round(value))


@dataclass(frozen=True)
class TableCpd:
    """Explicit CPT: rows[i] is the child distribution for parent config i."""

    rows: tuple[tuple[float, ...], ...]

    def expand(self, parent_spaces: tuple[StateSpace, ...], child_space: StateSpace) -> np.ndarray:
        cards = _parent_cards(parent_spaces)
        n_rows = int(np.prod(cards)) if cards else 1
        arr = np.asarray(self.rows, dtype=float)
        if arr.ndim != 2 or arr.shape != (n_rows, child_space.card):
            raise CpdShapeMismatch(
                f"table has shape {arr.shape}, expected ({n_rows}, {child_space.card})")
        return arr.reshape(cards + (child_space.card,))


def uniform_prior(card: int) -> TableCpd:
    return TableCpd((tuple([1.0 / card] * card),))


def point_prior(card: int, index: int) -> TableCpd:
    row = [0.0] * card
    row[index] = 1.0
    return TableCpd((tuple(row),))


@dataclass(frozen=True)
class NoisyOrCpd:
    """Noisy-OR gate; q[i] is the probability parent i's influence is inhibited."""

    q: tuple[float, ...]
    leak: float = 0.0

    def expand(self, parent_spaces: tuple[StateSpace, ...], child_space: StateSpace) -> np.ndarray:
        if len(self.q) != len(parent_spaces):
            raise CpdShapeMismatch(
                f"noisy-or has {len(self.q)} inhibitor probabilities for "
                f"{len(parent_spaces)} parents")
        if child_space.card != 2 or any(s.card != 2 for s in parent_spaces):
            raise ParameterOutOfRange("noisy-or requires binary child and parents")
        if not (0.0 <= self.leak <= 1.0) or any(not (0.0 <= qi <= 1.0) for qi in self.q):
            raise ParameterOutOfRange("noisy-or parameters must lie in [0, 1]")
        n = len(parent_spaces)
        table = np.empty((2,) * n + (2,))
        for config in product((0, 1), repeat=n):
            p_false = (1.0 - self.leak) * float(
                np.prod([self.q[i] for i in range(n) if config[i] == 1]))
            table[config] = (p_false, 1.0 - p_false)
        return table


@dataclass(frozen=True)
class RankedCpd:
    """Truncated-Normal ranked node: child ~ TNormal(weighted parent mean, variance) on [0,1]."""

    weights: tuple[float, ...]
    variance: float

    def expand(self, parent_spaces: tuple[StateSpace, ...], child_space: StateSpace) -> np.ndarray:
        if len(self.weights) != len(parent_spaces):
            raise CpdShapeMismatch(
                f"ranked cpd has {len(self.weights)} weights for {len(parent_spaces)} parents")
        if child_space.card != 5 or any(s.card != 5 for s in parent_spaces):
            raise ParameterOutOfRange("ranked cpd requires 5-state child and parents")
        if self.variance <= 0.0:
            raise ParameterOutOfRange(f"variance must be positive, got {self.variance}")
        w = np.asarray(self.weights, dtype=float)
        if np.any(w < 0) or not np.any(w > 0):
            raise ParameterOutOfRange("weights must be nonnegative and not all zero")
        n = len(parent_spaces)
        mids = np.asarray(RANKED_MIDPOINTS)
        # Weighted mean per parent configuration, vectorized over the grid.
        grids = np.meshgrid(*([mids] * n), indexing="ij")
        mu = sum(w[i] * grids[i] for i in range(n)) / w.sum()
        mu = np.asarray(mu)[..., None]  # trailing axis for bin edges
        sigma = float(np.sqrt(self.variance))
        cdf = stats.norm.cdf((RANKED_BIN_EDGES - mu) / sigma)
        bins = np.diff(cdf, axis=-1)
        total = cdf[..., -1] - cdf[..., 0]
        return bins / total[..., None]


def ranked_bin_probs(mu: float, variance: float) -> np.ndarray:
    """Five-bin distribution of TNormal(mu, variance) truncated to [0,1]."""
    sigma = float(np.sqrt(variance))
    cdf = stats.norm.cdf((RANKED_BIN_EDGES - mu) / sigma)
    bins = np.diff(cdf)
    return bins / (cdf[-1] - cdf[0])


def _count_rows(space: StateSpace, cdf_fn) -> np.ndarray:
    """Per-interval masses of a count distribution given a vectorized CDF.

    Bounded interval [lo, hi] gets cdf(hi) - cdf(lo-1); a final unbounded
    interval takes the remaining tail, so each row sums to 1 by construction.
    cdf_fn maps an integer array of shape (card,) to CDF values, possibly with
    leading row axes.
    """
    los = np.array([lo for lo, _ in space.intervals])
    his = np.array([hi if hi is not None else 0 for _, hi in space.intervals])
    lo_cdf = np.asarray(cdf_fn(los - 1), dtype=float)
    hi_cdf = np.asarray(cdf_fn(his), dtype=float)
    if space.intervals[-1][1] is None:
        hi_cdf[..., -1] = 1.0
    return np.clip(hi_cdf - lo_cdf, 0.0, 1.0)


@dataclass(frozen=True)
class PoissonCpd:
    """Count insertion: child interval mass under Poisson(rate per parent config)."""

    rates: tuple[float, ...]

    def expand(self, parent_spaces: tuple[StateSpace, ...], child_space: StateSpace) -> np.ndarray:
        if child_space.intervals is None:
            raise IncompatibleIntervals("poisson child must be a count node")
        cards = _parent_cards(parent_spaces)
        n_rows = int(np.prod(cards)) if cards else 1
        if len(self.rates) != n_rows:
            raise CpdShapeMismatch(
                f"poisson has {len(self.rates)} rates for {n_rows} parent configurations")
        if any(r <= 0.0 for r in self.rates):
            raise ParameterOutOfRange("poisson rates must be positive")
        lam = np.asarray(self.rates, dtype=float)[:, None]
        rows = _count_rows(child_space, lambda k: stats.poisson.cdf(k, lam))
        return rows.reshape(cards + (child_space.card,))


@dataclass(frozen=True)
class BinomialCpd:
    """Thinning: parents are (count node, quality node); p[s] per quality state.

    The count parent's value is taken as its interval representative n
    (rounded to an integer); the child interval then gets Binomial(k; n, p)
    mass. Exact for point intervals.
    """

    p: tuple[float, ...]

    def expand(self, parent_spaces: tuple[StateSpace, ...], child_space: StateSpace) -> np.ndarray:
        if len(parent_spaces) != 2:
            raise CpdShapeMismatch("binomial thinning takes (count parent, quality parent)")
        count_space_, quality_space = parent_spaces
        if count_space_.intervals is None or child_space.intervals is None:
            raise IncompatibleIntervals("binomial thinning needs count parent and count child")
        if len(self.p) != quality_space.card:
            raise CpdShapeMismatch(
                f"binomial has {len(self.p)} probabilities for {quality_space.card} quality states")
        if any(not (0.0 <= pi <= 1.0) for pi in self.p):
            raise ParameterOutOfRange("detection probabilities must lie in [0, 1]")
        if child_space.intervals[0][0] != 0:
            raise IncompatibleIntervals("child intervals must start at 0")
        reps = [_round_rep(count_space_.representative(i)) for i in range(count_space_.card)]
        if child_space.intervals[-1][1] is not None and child_space.intervals[-1][1] < max(reps):
            raise IncompatibleIntervals(
                f"child intervals top out at {child_space.intervals[-1][1]} but a parent "
                f"representative reaches {max(reps)}")
        n_col = np.asarray(reps)[:, None, None]
        p_col = np.asarray(self.p)[None, :, None]
        table = _count_rows(child_space, lambda k: stats.binom.cdf(k, n_col, p_col))
        # Deterministic cases are written exactly rather than trusted to the
        # CDF's edge behavior: p=0 or n=0 pin the child at zero, p=1 copies n.
        for i, n in enumerate(reps):
            for s, ps in enumerate(self.p):
                if ps == 0.0 or n == 0:
                    table[i, s] = 0.0
                    table[i, s, 0] = 1.0
                elif ps == 1.0:
                    table[i, s] = 0.0
                    table[i, s, child_space.interval_index(n)] = 1.0
        return table


@dataclass(frozen=True)
class SubtractCpd:
    """Deterministic residual: child = max(0, rep(parent A) - rep(parent B))."""

    def expand(self, parent_spaces: tuple[StateSpace, ...], child_space: StateSpace) -> np.ndarray:
        if len(parent_spaces) != 2:
            raise CpdShapeMismatch("subtract takes exactly two parents")
        a_space, b_space = parent_spaces
        if a_space.intervals is None or b_space.intervals is None or child_space.intervals is None:
            raise IncompatibleIntervals("subtract needs count parents and a count child")
        table = np.zeros((a_space.card, b_space.card, child_space.card))
        for i in range(a_space.card):
            for j in range(b_space.card):
                value = max(0.0, a_space.representative(i) - b_space.representative(j))
                idx = child_space.interval_index(value)
                if idx is None:
                    raise IncompatibleIntervals(
                        f"difference {value} falls outside the child intervals")
                table[i, j, idx] = 1.0
        return table
