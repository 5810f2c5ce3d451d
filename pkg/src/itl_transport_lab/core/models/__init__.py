"""
Typed models for the transport lab: enums, constants, parameters, reports.
"""
from itl_transport_lab.core.models.enums import (
    ExperimentKind,
    IntegratorKind,
    ModelKind,
    Reality,
)
from itl_transport_lab.core.models.params import (
    BbmParams,
    CutoffSpec,
    GaussianSpec,
    LabBaseModel,
    NlsParams,
)
from itl_transport_lab.core.models.reports import VerdictReport

__all__ = [
    "ExperimentKind",
    "IntegratorKind",
    "ModelKind",
    "Reality",
    "BbmParams",
    "CutoffSpec",
    "GaussianSpec",
    "LabBaseModel",
    "NlsParams",
    "VerdictReport",
]
