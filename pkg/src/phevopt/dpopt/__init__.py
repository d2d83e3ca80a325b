"""Charge-sustaining optimization: backward DP over a quantized SOC grid,
forward rollout, a brute-force optimality oracle, and OBD-cost studies."""

from .oracle import brute_force
from .problem import (
    DEFAULT_DELTAS,
    Decision,
    DemandProfile,
    DpConfig,
    DpPolicy,
    TerminalRule,
    build_demand,
    default_decisions,
    delta_to_electrical_kw,
    max_delta_bound,
    null_decision,
)
from .solver import (
    HAVE_COMPILED_KERNEL,
    RolloutResult,
    active_kernel,
    rollout,
    solve,
    write_policy,
)
from .studies import ObdStudy, RuleOnDemandResult, evaluate_rule_on_demand, obd_study

__all__ = [
    "DEFAULT_DELTAS",
    "Decision",
    "DemandProfile",
    "DpConfig",
    "DpPolicy",
    "HAVE_COMPILED_KERNEL",
    "ObdStudy",
    "RolloutResult",
    "RuleOnDemandResult",
    "TerminalRule",
    "active_kernel",
    "brute_force",
    "build_demand",
    "default_decisions",
    "delta_to_electrical_kw",
    "evaluate_rule_on_demand",
    "max_delta_bound",
    "null_decision",
    "obd_study",
    "rollout",
    "solve",
    "write_policy",
]
