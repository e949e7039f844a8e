"""Policy evolution: clipped-surrogate PPO over the live tunables.

The agent observes [F1, P, R, w1, w2, rho, tau], emits bounded deltas for
the four tunables, and is rewarded with alpha*F1 - beta*|dP - dR| -
gamma_lat*latency.  Actions are tanh-squashed Gaussians; the pre-squash
draw is stored so probability ratios need only the Gaussian density (the
squash Jacobian cancels between old and new policies).
"""

from collections import deque
from dataclasses import dataclass, field, replace
from math import log, pi, sqrt

import numpy as np

from .. import config
from ..errors import EmptyBuffer, LengthMismatch
from ..neural import Adam, DenseNet
from ..neural.losses import mse

STATE_DIM = 7
ACTION_DIM = 4


@dataclass(frozen=True)
class PolicyTunables:
    w1: float
    w2: float
    rho: float
    tau: float

    def as_vector(self) -> np.ndarray:
        return np.array([self.w1, self.w2, self.rho, self.tau])

    def as_dict(self) -> dict:
        return {"w1": self.w1, "w2": self.w2, "rho": self.rho, "tau": self.tau}


@dataclass(frozen=True)
class PolicyState:
    f1: float
    precision: float
    recall: float
    w1: float
    w2: float
    rho: float
    tau: float

    def to_vector(self) -> np.ndarray:
        return np.array(
            [self.f1, self.precision, self.recall, self.w1, self.w2, self.rho, self.tau]
        )

    @property
    def tunables(self) -> PolicyTunables:
        return PolicyTunables(self.w1, self.w2, self.rho, self.tau)


@dataclass(frozen=True)
class PolicyAction:
    """Deltas for [w1, w2, rho, tau]; clamped at construction."""

    deltas: np.ndarray
    pre_squash: np.ndarray = None

    def __post_init__(self):
        clipped = np.clip(
            np.asarray(self.deltas, dtype=np.float64),
            -config.ACTION_DELTA_LIMIT,
            config.ACTION_DELTA_LIMIT,
        )
        object.__setattr__(self, "deltas", clipped)


@dataclass
class Transition:
    state: np.ndarray
    pre_squash: np.ndarray
    reward: float
    next_state: np.ndarray
    logprob: float
    done: bool


class ReplayBuffer:
    """FIFO transition store."""

    def __init__(self, capacity: int = config.PPO_REPLAY_CAPACITY):
        self._items: deque = deque(maxlen=capacity)

    def push(self, t: Transition) -> None:
        self._items.append(t)

    def __len__(self) -> int:
        return len(self._items)

    def recent(self, n: int = None) -> list:
        items = list(self._items)
        return items if n is None else items[-n:]


@dataclass(frozen=True)
class PpoConfig:
    lr: float = config.PPO_LR
    clip: float = config.PPO_CLIP
    discount: float = config.PPO_DISCOUNT
    gae_lambda: float = config.PPO_GAE_LAMBDA
    updates_per_iter: int = config.PPO_UPDATES_PER_ITER
    batch: int = config.PPO_BATCH
    alpha: float = config.REWARD_ALPHA
    beta: float = config.REWARD_BETA
    gamma_lat: float = config.REWARD_GAMMA_LAT

    def __post_init__(self):
        if not (0.1 <= self.clip <= 0.3):
            raise ValueError(f"clip ratio {self.clip} outside the valid range [0.1, 0.3]")


def reward(f1: float, delta_p: float, delta_r: float, latency_ms: float, cfg: PpoConfig = None) -> float:
    cfg = cfg or PpoConfig()
    return cfg.alpha * f1 - cfg.beta * abs(delta_p - delta_r) - cfg.gamma_lat * latency_ms


def gae(rewards, values, discount: float, lam: float, dones=None) -> tuple[np.ndarray, np.ndarray]:
    """Generalized advantage estimates and value targets.

    `values` carries one bootstrap entry beyond the rewards.  Advantages
    come back raw; normalization happens inside the update.
    """
    r = np.asarray(rewards, dtype=np.float64)
    v = np.asarray(values, dtype=np.float64)
    if len(v) != len(r) + 1:
        raise LengthMismatch("values must have len(rewards) + 1 entries")
    if dones is None:
        dones = np.zeros(len(r), dtype=bool)
    dones = np.asarray(dones, dtype=bool)
    adv = np.zeros(len(r))
    carry = 0.0
    for t in range(len(r) - 1, -1, -1):
        cont = 0.0 if dones[t] else 1.0
        delta = r[t] + discount * v[t + 1] * cont - v[t]
        carry = delta + discount * lam * cont * carry
        adv[t] = carry
    return adv, adv + v[:-1]


class GaussianPolicy:
    """Tanh-squashed diagonal Gaussian over the four deltas."""

    def __init__(self, state_dim: int = STATE_DIM, action_dim: int = ACTION_DIM, seed: int = 0):
        self.net = DenseNet([state_dim, 64, 64, action_dim], ["tanh", "tanh", "linear"], seed=seed)
        self.log_std = np.full(action_dim, -1.0)
        self._dlog_std = np.zeros(action_dim)
        self.action_dim = action_dim

    def params(self):
        return self.net.params() + [self.log_std]

    def grads(self):
        return self.net.grads() + [self._dlog_std]

    def mean(self, states) -> np.ndarray:
        return self.net.forward(np.atleast_2d(states))

    def act(self, state, rng) -> PolicyAction:
        mu = self.mean(state)[0]
        std = np.exp(self.log_std)
        u = mu + std * rng.normal(size=self.action_dim)
        deltas = config.ACTION_DELTA_LIMIT * np.tanh(u)
        return PolicyAction(deltas=deltas, pre_squash=u)

    def log_prob(self, states, us) -> np.ndarray:
        """Gaussian log-density of the pre-squash draws (batch)."""
        mu = self.mean(states)
        std = np.exp(self.log_std)
        z = (np.atleast_2d(us) - mu) / std
        return -0.5 * np.sum(z * z, axis=1) - np.sum(self.log_std) - 0.5 * self.action_dim * log(2.0 * pi)

    def surrogate_loss_and_grads(self, states, us, old_logp, advantages, clip: float):
        """Clipped-surrogate loss; analytic grads accumulate into the net
        and the log-std slot."""
        S = np.atleast_2d(np.asarray(states, dtype=np.float64))
        U = np.atleast_2d(np.asarray(us, dtype=np.float64))
        adv = np.asarray(advantages, dtype=np.float64)
        oldlp = np.asarray(old_logp, dtype=np.float64)
        B = len(adv)

        mu = self.net.forward(S)
        std = np.exp(self.log_std)
        z = (U - mu) / std
        logp = -0.5 * np.sum(z * z, axis=1) - np.sum(self.log_std) - 0.5 * self.action_dim * log(2.0 * pi)
        ratio = np.exp(logp - oldlp)
        unclipped = ratio * adv
        clipped = np.clip(ratio, 1.0 - clip, 1.0 + clip) * adv
        surr = np.minimum(unclipped, clipped)
        loss = -float(np.mean(surr))

        live = (unclipped <= clipped) | ((ratio >= 1.0 - clip) & (ratio <= 1.0 + clip))
        dlogp = -(live * adv * ratio) / B  # d loss / d logp
        dmu = dlogp[:, None] * z / std
        self.net.backward(dmu)
        self._dlog_std = np.sum(dlogp[:, None] * (z * z - 1.0), axis=0)
        return loss, ratio, float(np.mean(~live))


def build_value_net(state_dim: int = STATE_DIM, seed: int = 0) -> DenseNet:
    return DenseNet([state_dim, 64, 64, 1], ["tanh", "tanh", "linear"], seed=seed)


@dataclass
class PpoDiagnostics:
    policy_losses: list = field(default_factory=list)
    value_losses: list = field(default_factory=list)
    grad_norms: list = field(default_factory=list)
    clip_fractions: list = field(default_factory=list)


def ppo_update(
    policy: GaussianPolicy,
    value_net: DenseNet,
    transitions,
    cfg: PpoConfig = None,
    policy_opt: Adam = None,
    value_opt: Adam = None,
    seed: int = 0,
) -> PpoDiagnostics:
    """Run cfg.updates_per_iter epochs of clipped-surrogate updates over the
    batch, then regress the value net on the GAE returns."""
    cfg = cfg or PpoConfig()
    if not transitions:
        raise EmptyBuffer("no transitions to learn from")
    rng = np.random.default_rng(seed)
    policy_opt = policy_opt or Adam(lr=cfg.lr)
    value_opt = value_opt or Adam(lr=cfg.lr)

    S = np.stack([t.state for t in transitions])
    U = np.stack([t.pre_squash for t in transitions])
    R = np.array([t.reward for t in transitions])
    S_next = np.stack([t.next_state for t in transitions])
    old_logp = np.array([t.logprob for t in transitions])
    dones = np.array([t.done for t in transitions], dtype=bool)

    V = value_net.forward(S)[:, 0]
    bootstrap = value_net.forward(S_next[-1])[0] if not dones[-1] else 0.0
    values_ext = np.concatenate([V, np.atleast_1d(bootstrap)])
    adv, returns = gae(R, values_ext, cfg.discount, cfg.gae_lambda, dones)
    adv_std = adv.std()
    adv_norm = (adv - adv.mean()) / (adv_std + 1e-8)

    diag = PpoDiagnostics()
    n = len(transitions)
    for _ in range(cfg.updates_per_iter):
        order = rng.permutation(n)
        for start in range(0, n, cfg.batch):
            idx = order[start : start + cfg.batch]
            loss, _, clip_frac = policy.surrogate_loss_and_grads(
                S[idx], U[idx], old_logp[idx], adv_norm[idx], cfg.clip
            )
            grads = policy.grads()
            norm = sqrt(sum(float(np.sum(g * g)) for g in grads))
            policy_opt.step(policy.params(), grads)
            diag.policy_losses.append(loss)
            diag.grad_norms.append(norm)
            diag.clip_fractions.append(clip_frac)

            pred = value_net.forward(S[idx])
            vloss, vgrad = mse(pred, returns[idx][:, None])
            value_net.backward(vgrad)
            value_opt.step(value_net.params(), value_net.grads())
            diag.value_losses.append(vloss)
    return diag


def _clip_range(x: float, lo: float, hi: float) -> float:
    return min(hi, max(lo, x))


def repair_tunables(w1: float, w2: float, rho: float, tau: float) -> PolicyTunables:
    """Clamp every tunable into its hard range and renormalize the weights
    so w1 + w2 is exactly 1 (clamp-then-renormalize stays inside the range)."""
    w1 = _clip_range(w1, *config.W_RANGE)
    w2 = _clip_range(w2, *config.W_RANGE)
    total = w1 + w2
    w1 = w1 / total
    w2 = 1.0 - w1
    rho = _clip_range(rho, *config.RHO_RANGE)
    tau = _clip_range(tau, *config.TAU_RANGE)
    return PolicyTunables(w1, w2, rho, tau)


def apply_action(state: PolicyState, action: PolicyAction) -> PolicyState:
    """Apply bounded deltas and re-project onto the valid region."""
    d = action.deltas
    fixed = repair_tunables(state.w1 + d[0], state.w2 + d[1], state.rho + d[2], state.tau + d[3])
    return replace(state, w1=fixed.w1, w2=fixed.w2, rho=fixed.rho, tau=fixed.tau)
