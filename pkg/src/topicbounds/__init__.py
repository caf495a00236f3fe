"""Bounds on the number of topics (or mixture components) from the spectrum of an empirical second-order moment."""

from .bounds import ConfidenceParams, MonotonicityWarning, VacuousBoundWarning
from .corpus import Corpus
from .errors import DataError, FormatError, ParameterError, TopicBoundsError
from .kernels import BACKEND
from .moments import empirical_m1, empirical_m2_gmm, empirical_m2_lda, residual
from .rand_core import RngState
from .report import BoundReport, gmm_bound_report, lda_bound_report
from .spectra import singular_values_symmetric, symmetric_eigenvalues
from .synth import (
    GmmParams,
    LdaParams,
    generate_gmm_dataset,
    generate_lda_corpus,
    true_second_moment_gmm,
    true_second_moment_lda,
)

__version__ = "0.1.0"

__all__ = [
    "BACKEND",
    "BoundReport",
    "ConfidenceParams",
    "Corpus",
    "DataError",
    "FormatError",
    "GmmParams",
    "LdaParams",
    "MonotonicityWarning",
    "ParameterError",
    "RngState",
    "TopicBoundsError",
    "VacuousBoundWarning",
    "empirical_m1",
    "empirical_m2_gmm",
    "empirical_m2_lda",
    "generate_gmm_dataset",
    "generate_lda_corpus",
    "gmm_bound_report",
    "lda_bound_report",
    "residual",
    "singular_values_symmetric",
    "symmetric_eigenvalues",
    "true_second_moment_gmm",
    "true_second_moment_lda",
]
