"""Coarse-grained boson-sampling one-way function and its desk-scale analysis."""

from .configs import Binning, BinningScheme, ConfigSpace, bin_of, bit_length, rank, space_size, unrank
from .distribution import (
    CoarseDistribution,
    CoarseTable,
    OutputDistribution,
    coarse_grain,
    eps_close_fraction,
    exact_output_distribution,
)
from .matrix import UnitaryMatrix, haar_random_unitary, permanent_naive, permanent_ryser, submatrix
from .mpb import Algo1Outcome, Algo1Params, Status, estimate_mpb, estimate_mpb_majority
from .owf import OwfParams, evaluate, evaluate_exact_full_domain, fisher_yates_map, next_kappa
from .sampling import RngStream, SampleRecord, build_sampler, chernoff_sample_size, draw_bins

__version__ = "0.1.0"

__all__ = [
    "Algo1Outcome", "Algo1Params", "Binning", "BinningScheme", "CoarseDistribution", "CoarseTable",
    "ConfigSpace", "OutputDistribution", "OwfParams", "RngStream", "SampleRecord", "Status",
    "UnitaryMatrix", "bin_of", "bit_length", "build_sampler", "chernoff_sample_size", "coarse_grain",
    "draw_bins", "eps_close_fraction", "estimate_mpb", "estimate_mpb_majority", "evaluate",
    "evaluate_exact_full_domain", "exact_output_distribution", "fisher_yates_map",
    "haar_random_unitary", "next_kappa", "permanent_naive", "permanent_ryser", "rank", "space_size",
    "submatrix", "unrank",
]
