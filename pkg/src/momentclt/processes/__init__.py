"""Weakly dependent process models: MA fields, ARMA expansions, Markov chains, digit process."""

from .arma import ArmaModel, arma_reduce, arma_to_ma, cluster_roots, polynomial_roots
from .chains import (
    DigitProcess,
    MarkovChain,
    digit_event_covariance,
    make_digit_process,
    make_markov_chain,
    nonmixing_witness,
    stationary_distribution,
)
from .innovations import Distribution, InnovationSpec
from .ma import (
    MACoefficients,
    ProcessWindow,
    simulate_ma_batch,
    simulate_ma_window,
    truncate_coefficients,
)

__all__ = [
    "ArmaModel",
    "DigitProcess",
    "Distribution",
    "InnovationSpec",
    "MACoefficients",
    "MarkovChain",
    "ProcessWindow",
    "arma_reduce",
    "arma_to_ma",
    "cluster_roots",
    "digit_event_covariance",
    "make_digit_process",
    "make_markov_chain",
    "nonmixing_witness",
    "polynomial_roots",
    "simulate_ma_batch",
    "simulate_ma_window",
    "stationary_distribution",
    "truncate_coefficients",
]
