"""Data-proportional averaging of policy vectors across fog instances.

Each instance reports how many samples it processed this round (n_k) and
its locally updated parameter vector; the global vector is the n-weighted
mean.  Aggregation here is restricted to the consensus tunables
{w1, w2, rho, tau}; deep-model parameters are never exchanged.
"""

from dataclasses import dataclass

import numpy as np

from .errors import AllZeroCounts, EmptyRound, LengthMismatch
from .evolve import PolicyTunables, repair_tunables


@dataclass(frozen=True)
class AgentContribution:
    agent_id: str
    n_samples: int
    theta: np.ndarray

    def __post_init__(self):
        if self.n_samples < 0:
            raise ValueError("sample count must be non-negative")
        object.__setattr__(self, "theta", np.asarray(self.theta, dtype=np.float64).ravel())


def aggregate(contributions) -> np.ndarray:
    """theta_global = sum(n_k * theta_k) / sum(n_k), elementwise.

    Identical contributions pass through bitwise (exact idempotence), and
    the result is clipped to the per-component hull to keep convexity
    under floating-point roundoff.
    """
    contributions = list(contributions)
    if not contributions:
        raise EmptyRound("no contributions this round")
    width = len(contributions[0].theta)
    for c in contributions:
        if len(c.theta) != width:
            raise LengthMismatch(f"vector lengths differ: {len(c.theta)} vs {width}")
    counts = np.array([c.n_samples for c in contributions], dtype=np.float64)
    if counts.sum() <= 0:
        raise AllZeroCounts("at least one contribution must carry samples")

    thetas = np.stack([c.theta for c in contributions])
    first = thetas[0]
    if all(np.array_equal(first, t) for t in thetas[1:]):
        return first.copy()
    out = (counts @ thetas) / counts.sum()
    return np.clip(out, thetas.min(axis=0), thetas.max(axis=0))


def aggregate_policies(contributions) -> PolicyTunables:
    """Aggregate {w1, w2, rho, tau} vectors, then re-run the simplex/range
    repair so the deployed policy always satisfies the invariants."""
    theta = aggregate(contributions)
    if len(theta) != 4:
        raise LengthMismatch("policy vectors must be [w1, w2, rho, tau]")
    return repair_tunables(*theta)
