"""
Prometheus instruments for long Monte Carlo runs.

Counters are observational only; no result depends on them.
"""
from prometheus_client import Counter, Histogram

FLOW_INTEGRATIONS = Counter(
    "itl_transport_flow_integrations_total",
    "Flow integrations performed",
    ["model", "integrator", "status"],
)

FLOW_INTEGRATION_SECONDS = Histogram(
    "itl_transport_flow_integration_seconds",
    "Wall time of a flow integration (single field or batch)",
    ["model"],
)

SAMPLES_DRAWN = Counter(
    "itl_transport_samples_drawn_total",
    "Gaussian samples drawn",
    ["model"],
)

VERDICTS = Counter(
    "itl_transport_verdicts_total",
    "Verification verdicts produced",
    ["test", "outcome"],
)
