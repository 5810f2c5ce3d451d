"""
Truncated BBM and NLS flows, integrators and deterministic diagnostics.
"""
from itl_transport_lab.dynamics.bbm import (
    DiagnosticSeries,
    DuhamelResult,
    GrowthDiagnostics,
    bbm_flow_map,
    bbm_growth_diagnostics,
    bbm_rhs,
    calibrate_contraction_constant,
    duhamel_local_solve,
    flow_compare,
    integrate_bbm,
    linear_bbm_flow,
    local_window,
)
from itl_transport_lab.dynamics.integrators import (
    FlowResult,
    SemilinearSystem,
    evolve_batch,
    integrate_flow,
    step_count,
)
from itl_transport_lab.dynamics.nls import (
    ModifiedEnergy,
    energy_e1,
    integrate_nls,
    mass,
    modified_energy,
    nls_flow_map,
    nls_growth_diagnostics,
    nls_rhs,
    quadratic_correction,
    verify_lipschitz,
    zero_correction,
)
from itl_transport_lab.dynamics.trajectory import Trajectory, relative_drift

__all__ = [
    "DiagnosticSeries",
    "DuhamelResult",
    "GrowthDiagnostics",
    "bbm_flow_map",
    "bbm_growth_diagnostics",
    "bbm_rhs",
    "calibrate_contraction_constant",
    "duhamel_local_solve",
    "flow_compare",
    "integrate_bbm",
    "linear_bbm_flow",
    "local_window",
    "FlowResult",
    "SemilinearSystem",
    "evolve_batch",
    "integrate_flow",
    "step_count",
    "ModifiedEnergy",
    "energy_e1",
    "integrate_nls",
    "mass",
    "modified_energy",
    "nls_flow_map",
    "nls_growth_diagnostics",
    "nls_rhs",
    "quadratic_correction",
    "verify_lipschitz",
    "zero_correction",
    "Trajectory",
    "relative_drift",
]
