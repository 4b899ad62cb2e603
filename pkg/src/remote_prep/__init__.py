"""Remote preparation of a two-qubit state over two (partially) entangled pairs."""

from remote_prep.analysis import (
    BranchReport,
    MonteCarloSummary,
    closed_form_success,
    exact_branch_report,
    monte_carlo,
    oracle_reconstruct,
)
from remote_prep.protocol import (
    AuxOutcome,
    ChannelPair,
    Outcome,
    ProtocolResult,
    TargetState,
    run_protocol,
    validate_target,
)
from remote_prep.qstate import StateVector

__all__ = [
    "AuxOutcome",
    "BranchReport",
    "ChannelPair",
    "MonteCarloSummary",
    "Outcome",
    "ProtocolResult",
    "StateVector",
    "TargetState",
    "closed_form_success",
    "exact_branch_report",
    "monte_carlo",
    "oracle_reconstruct",
    "run_protocol",
    "validate_target",
]
