"""Bayesian-network toolkit for software defect prediction and fault-tree analysis."""

from .network import (
    Evidence,
    Hard,
    Network,
    Node,
    Soft,
    StateSpace,
    binary_space,
    build_network,
    count_space,
    evidence,
    ranked5_space,
)
from .inference import (
    PosteriorReport,
    brute_force_joint,
    interval_expectation,
    query_joint,
    query_posteriors,
    sample_network,
)
from .cpds import (
    BinomialCpd,
    NoisyOrCpd,
    PoissonCpd,
    RankedCpd,
    SubtractCpd,
    TableCpd,
)

__version__ = "0.1.0"

__all__ = [
    "BinomialCpd",
    "Evidence",
    "Hard",
    "Network",
    "Node",
    "NoisyOrCpd",
    "PoissonCpd",
    "PosteriorReport",
    "RankedCpd",
    "Soft",
    "StateSpace",
    "SubtractCpd",
    "TableCpd",
    "binary_space",
    "brute_force_joint",
    "build_network",
    "count_space",
    "evidence",
    "interval_expectation",
    "query_joint",
    "query_posteriors",
    "ranked5_space",
    "sample_network",
]
