"""
Monte Carlo verification of the transport identities.
"""
from itl_transport_lab.verification.observables import (
    TestFunction,
    clipped_low_mass,
    constant_one,
    cosine_first_mode,
    gaussian_low_mode,
    test_function_library,
)
from itl_transport_lab.verification.verifier import (
    LpEstimate,
    PairedStatistics,
    RecurrenceResult,
    SuiteResult,
    density_lp_estimate,
    invariance_test_gamma0,
    jacobian_divergence_check,
    paired_statistics,
    quasi_invariance_test_bbm,
    quasi_invariance_test_nls,
    recurrence_experiment,
    run_suite,
)

__all__ = [
    "TestFunction",
    "clipped_low_mass",
    "constant_one",
    "cosine_first_mode",
    "gaussian_low_mode",
    "test_function_library",
    "LpEstimate",
    "PairedStatistics",
    "RecurrenceResult",
    "SuiteResult",
    "density_lp_estimate",
    "invariance_test_gamma0",
    "jacobian_divergence_check",
    "paired_statistics",
    "quasi_invariance_test_bbm",
    "quasi_invariance_test_nls",
    "recurrence_experiment",
    "run_suite",
]
