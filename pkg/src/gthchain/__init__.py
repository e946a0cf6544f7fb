"""Stationary distributions of Markov chains by GTH elimination.

Also provides censored chains, the RG-factorization of ``I - P`` and
truncation/augmentation schemes for chains on the positive integers.
"""
from .censoring import (
    censor,
    censor_stationary,
    first_entry_probability,
    partition_blocks,
    simulate_chain,
    visits_expected,
)
from .core import (
    CountableChainSpec,
    Partition,
    is_irreducible,
    northwest_corner,
    validate_stochastic,
)
from .gth import gth_back_substitute, gth_eliminate_step, gth_forward, gth_solve, naive_gaussian_solve
from .oracles import power_iteration_oracle, rational_solve_oracle
from .rg import RGFactors, rg_factorize, rg_measure_firstpassage, rg_reconstruct, solve_via_rg
from .truncation import augment, censored_truncation, compare_augmentations, l1_error

__version__ = "0.1.0"
