"""
Gaussian base measures, cut-off importance weights and tail utilities.
"""
from itl_transport_lab.measures.ensemble import (
    WeightedEnsemble,
    ensemble_sample,
    load_ensemble,
    save_ensemble,
)
from itl_transport_lab.measures.gaussian import rng_stream, sample_gamma, sample_gamma_array
from itl_transport_lab.measures.tails import TailCurve, sup_moment, tail_exponents, tail_survival
from itl_transport_lab.measures.weights import (
    effective_sample_size,
    log_weight_bbm,
    log_weight_bbm_array,
    log_weight_nls,
    log_weight_nls_array,
    log_weights_for,
)

__all__ = [
    "WeightedEnsemble",
    "ensemble_sample",
    "load_ensemble",
    "save_ensemble",
    "rng_stream",
    "sample_gamma",
    "sample_gamma_array",
    "TailCurve",
    "sup_moment",
    "tail_exponents",
    "tail_survival",
    "effective_sample_size",
    "log_weight_bbm",
    "log_weight_bbm_array",
    "log_weight_nls",
    "log_weight_nls_array",
    "log_weights_for",
]
