"""Cloud tier: PPO policy evolution (D) and oversight/validation (E)."""

from .oversight import (
    PageHinkley,
    StumpSurrogate,
    ValidationResult,
    detect_drift,
    fit_surrogate,
    validate_policy,
)
from .ppo import (
    ACTION_DIM,
    STATE_DIM,
    GaussianPolicy,
    PolicyAction,
    PolicyState,
    PolicyTunables,
    PpoConfig,
    PpoDiagnostics,
    ReplayBuffer,
    Transition,
    apply_action,
    build_value_net,
    gae,
    ppo_update,
    repair_tunables,
    reward,
)
from .shapley import MAX_FEATURES, ShapleyReport, shapley_exact

__all__ = [
    "PageHinkley",
    "StumpSurrogate",
    "ValidationResult",
    "detect_drift",
    "fit_surrogate",
    "validate_policy",
    "ACTION_DIM",
    "STATE_DIM",
    "GaussianPolicy",
    "PolicyAction",
    "PolicyState",
    "PolicyTunables",
    "PpoConfig",
    "PpoDiagnostics",
    "ReplayBuffer",
    "Transition",
    "apply_action",
    "build_value_net",
    "gae",
    "ppo_update",
    "repair_tunables",
    "reward",
    "MAX_FEATURES",
    "ShapleyReport",
    "shapley_exact",
]
