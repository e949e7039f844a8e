"""Weighted consensus fusion, alerting, and deterministic response plans.

The response stage fills severity-adaptive templates instead of calling
an external language model: same inputs (severity, deviating features,
context), same outputs (explanation plus an action), fully reproducible.
A client for a hosted generator can be swapped in through the
ResponseGenerator hook without touching the detection path.
"""

from dataclasses import dataclass
from enum import IntEnum
from typing import Optional, Sequence

import numpy as np

from .config import SEVERITY_HIGH, SEVERITY_MEDIUM, UTILITY_WEIGHTS
from .errors import EmptyCandidates, InvalidPolicy, NoAlert


class Action(IntEnum):
    CONTINUE_MONITORING = 0
    SCHEDULE_INSPECTION = 1
    IMMEDIATE_INSPECTION = 2
    EMERGENCY_STOP = 3


class Priority(IntEnum):
    LOW = 0
    MEDIUM = 1
    HIGH = 2


_DOWNTIME_HOURS = {
    Action.CONTINUE_MONITORING: (0.0, 0.0),
    Action.SCHEDULE_INSPECTION: (1.0, 3.0),
    Action.IMMEDIATE_INSPECTION: (4.0, 6.0),
    Action.EMERGENCY_STOP: (8.0, 24.0),
}

# escalation degree per action, used by the utility criteria
_AGGRESSIVENESS = {
    Action.CONTINUE_MONITORING: 0.0,
    Action.SCHEDULE_INSPECTION: 1.0 / 3.0,
    Action.IMMEDIATE_INSPECTION: 2.0 / 3.0,
    Action.EMERGENCY_STOP: 1.0,
}


@dataclass(frozen=True)
class ConsensusPolicy:
    w1: float
    w2: float
    tau_alert: float

    def validate(self) -> None:
        if not (0.0 <= self.w1 <= 1.0 and 0.0 <= self.w2 <= 1.0):
            raise InvalidPolicy("weights must lie in [0, 1]")
        if abs(self.w1 + self.w2 - 1.0) > 1e-9:
            raise InvalidPolicy(f"w1 + w2 = {self.w1 + self.w2} != 1")
        if not (0.0 < self.tau_alert < 1.0):
            raise InvalidPolicy(f"tau_alert {self.tau_alert} outside (0, 1)")


@dataclass(frozen=True)
class AnomalyAlert:
    a_fog: float
    decision: int
    tick: int
    severity_band: str


@dataclass(frozen=True)
class ResponsePlan:
    explanation: str
    action: Action
    priority: Priority
    expected_downtime_hours: tuple

    def render(self) -> str:
        lo, hi = self.expected_downtime_hours
        return (
            f"{self.explanation}\n"
            f"action: {self.action.name}\n"
            f"priority: {self.priority.name}\n"
            f"expected_downtime_hours: {lo:g}-{hi:g}\n"
        )


def fuse(a1: float, a2: float, policy: ConsensusPolicy) -> float:
    """a_fog = w1 * a1 + w2 * a2 (convex, so it stays in [0, 1])."""
    policy.validate()
    if not (0.0 <= a1 <= 1.0 and 0.0 <= a2 <= 1.0):
        raise ValueError("detector scores must lie in [0, 1]")
    return policy.w1 * a1 + policy.w2 * a2


def decide(a_fog: float, tau: float) -> int:
    """Strict threshold indicator."""
    return int(a_fog > tau)


def severity_band(a_fog: float) -> str:
    if a_fog < SEVERITY_MEDIUM:
        return "low"
    if a_fog <= SEVERITY_HIGH:
        return "medium"
    return "high"


def make_alert(a1: float, a2: float, policy: ConsensusPolicy, tick: int) -> AnomalyAlert:
    a_fog = fuse(a1, a2, policy)
    return AnomalyAlert(a_fog, decide(a_fog, policy.tau_alert), tick, severity_band(a_fog))


# ---------------------------------------------------------------------------
# Action utilities.  The four criteria (operational safety, maintenance
# cost, downtime risk, resource availability) have no published numeric
# form; these curves are artifact-defined and live here so they can be
# audited and replaced in one place.
# ---------------------------------------------------------------------------


def utility_table(candidates: Sequence[Action], severity: float) -> np.ndarray:
    rows = []
    for a in candidates:
        g = _AGGRESSIVENESS[a]
        safety = 1.0 - severity * (1.0 - g)
        cost = 1.0 - 0.7 * g
        downtime = 1.0 - 0.8 * ((1.0 - g) * severity + g * (1.0 - severity))
        resources = 1.0 - 0.5 * g * g
        rows.append([safety, cost, downtime, resources])
    return np.array(rows)


def select_action(candidates: Sequence[Action], utilities, weights=UTILITY_WEIGHTS) -> Action:
    """argmax of the weighted criteria sum; first (enum-ordered) candidate
    wins ties."""
    if len(candidates) == 0:
        raise EmptyCandidates("no candidate actions")
    w = np.asarray(weights, dtype=np.float64)
    if np.any(w < 0) or abs(w.sum() - 1.0) > 1e-9:
        raise ValueError("criteria weights must be a simplex")
    u = np.asarray(utilities, dtype=np.float64)
    if u.shape != (len(candidates), len(w)):
        raise ValueError(f"utility table must be {(len(candidates), len(w))}, got {u.shape}")
    totals = u @ w
    return candidates[int(np.argmax(totals))]


_BAND_CANDIDATES = {
    "low": (Action.CONTINUE_MONITORING, Action.SCHEDULE_INSPECTION),
    "medium": (Action.SCHEDULE_INSPECTION, Action.IMMEDIATE_INSPECTION),
    "high": (Action.IMMEDIATE_INSPECTION, Action.EMERGENCY_STOP),
}

_BAND_PRIORITY = {"low": Priority.LOW, "medium": Priority.MEDIUM, "high": Priority.HIGH}

_BAND_TEMPLATES = {
    "low": (
        "Minor anomaly signature (severity: {sev:.2f}) on {equipment}. "
        "Watch items: {features}. Possible early-stage drift; compare against "
        "recent maintenance records before escalating. Recommended action: {action}."
    ),
    "medium": (
        "Sustained anomaly detected (severity: {sev:.2f}) on {equipment}. "
        "Deviating channels: {features}. Behaviour sits outside the calibrated "
        "envelope; run diagnostics before the next duty cycle. Recommended action: {action}."
    ),
    "high": (
        "Critical anomaly (severity: {sev:.2f}) on {equipment}. Strongest "
        "deviations: {features}. Readings indicate active fault progression; "
        "dispatch qualified personnel now. Recommended action: {action}."
    ),
}


def top_deviating_features(values: np.ndarray, names: Optional[Sequence[str]], k: int = 3):
    """Largest |standardized value| channels, magnitude first."""
    v = np.asarray(values, dtype=np.float64).ravel()
    if names is None:
        names = [f"f{j}" for j in range(len(v))]
    order = np.argsort(-np.abs(v), kind="stable")[:k]
    return [(str(names[j]), float(v[j])) for j in order]


class TemplateResponder:
    """Deterministic severity-adaptive plan generator.

    Drop-in alternative generators (for example a hosted text model)
    implement the same generate(alert, values, context) signature.
    """

    def __init__(self, weights=UTILITY_WEIGHTS):
        self.weights = tuple(weights)

    def generate(self, alert: AnomalyAlert, values, context: Optional[dict] = None) -> ResponsePlan:
        if alert.decision != 1:
            raise NoAlert("response generation requires a raised alert")
        context = context or {}
        band = alert.severity_band
        candidates = _BAND_CANDIDATES[band]
        action = select_action(candidates, utility_table(candidates, alert.a_fog), self.weights)
        names = context.get("feature_names")
        top = top_deviating_features(values, names)
        feats = ", ".join(f"{n}={v:+.2f}" for n, v in top)
        explanation = _BAND_TEMPLATES[band].format(
            sev=alert.a_fog,
            equipment=context.get("equipment", "monitored equipment"),
            features=feats,
            action=action.name,
        )
        return ResponsePlan(
            explanation=explanation,
            action=action,
            priority=_BAND_PRIORITY[band],
            expected_downtime_hours=_DOWNTIME_HOURS[action],
        )


def generate_response(alert: AnomalyAlert, values, context: Optional[dict] = None) -> ResponsePlan:
    return TemplateResponder().generate(alert, values, context)
