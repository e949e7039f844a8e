"""Fog-tier detectors: the statistical scorer (B1) and the voting bank (B2)."""

from .elliptic import EllipticModel, elliptic_fit
from .ensemble import (
    MEMBER_ORDER,
    EnsembleBank,
    ensemble_decision,
    ensemble_vote,
    fit_bank,
    load_bank,
    member_votes,
    save_bank,
)
from .iforest import (
    IsolationForestModel,
    anomaly_score_from_path,
    average_path_length,
    if_fit,
    if_score,
)
from .lof import LofModel, lof_fit, lof_score
from .ocsvm import OcsvmModel, ocsvm_fit

__all__ = [
    "EllipticModel",
    "elliptic_fit",
    "MEMBER_ORDER",
    "EnsembleBank",
    "ensemble_decision",
    "ensemble_vote",
    "fit_bank",
    "load_bank",
    "member_votes",
    "save_bank",
    "IsolationForestModel",
    "anomaly_score_from_path",
    "average_path_length",
    "if_fit",
    "if_score",
    "LofModel",
    "lof_fit",
    "lof_score",
    "OcsvmModel",
    "ocsvm_fit",
]
