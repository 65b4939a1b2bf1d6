"""Default contagion in interbank networks.

Thin wrapper over the compiled ``_core`` extension. Firm indices are
0-based throughout the Python API.
"""

from ._core import (
    BayesNet,
    FinancialNetwork,
    FirmParams,
    Loan,
    NoAcceptedSamples,
    Rule,
    ZeroProbabilityEvidence,
    cascade,
    core_count_distribution,
    count_distribution,
    d_separated,
    default_phi,
    generate_core_periphery,
    impact,
    mc_estimate,
    query_prob,
    validate,
)

__all__ = [
    "BayesNet",
    "FinancialNetwork",
    "FirmParams",
    "Loan",
    "NoAcceptedSamples",
    "Rule",
    "ZeroProbabilityEvidence",
    "cascade",
    "core_count_distribution",
    "count_distribution",
    "d_separated",
    "default_phi",
    "generate_core_periphery",
    "impact",
    "mc_estimate",
    "query_prob",
    "validate",
]
