"""
Density generator, Jacobi density and its consistency checks.
"""
from itl_transport_lab.density.transport import (
    BbmDensityModel,
    ConvergenceTable,
    DensityModel,
    DensityRecord,
    GroupCheck,
    NlsDensityModel,
    density_convergence_table,
    density_group_check,
    density_record,
    density_records_to_csv,
    gamma_bbm,
    gamma_nls,
    log_density_endpoint,
    log_density_quadrature,
    reversal_residual,
    write_density_records,
)

__all__ = [
    "BbmDensityModel",
    "ConvergenceTable",
    "DensityModel",
    "DensityRecord",
    "GroupCheck",
    "NlsDensityModel",
    "density_convergence_table",
    "density_group_check",
    "density_record",
    "density_records_to_csv",
    "gamma_bbm",
    "gamma_nls",
    "log_density_endpoint",
    "log_density_quadrature",
    "reversal_residual",
    "write_density_records",
]
