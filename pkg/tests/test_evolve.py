import numpy as np
import pytest

from semas import config
from semas.errors import EmptyBuffer, LengthMismatch
from semas.evolve import (
    GaussianPolicy,
    PolicyAction,
    PolicyState,
    PpoConfig,
    ReplayBuffer,
    Transition,
    apply_action,
    build_value_net,
    gae,
    ppo_update,
    repair_tunables,
    reward,
)


class TestReward:
    def test_table_values(self):
        assert reward(0.5, 0.1, 0.0, 1.22) == pytest.approx(0.48878, abs=1e-12)

    def test_zero(self):
        assert reward(0.0, 0.0, 0.0, 0.0) == 0.0

    def test_maximum(self):
        assert reward(1.0, 0.0, 0.0, 0.0) == 1.0

    def test_imbalance_is_absolute(self):
        assert reward(0.5, -0.2, 0.2, 0.0) == pytest.approx(0.5 - 0.1 * 0.4)


class TestGae:
    def test_lambda_zero_is_one_step_td(self):
        r = np.array([1.0, 2.0, 3.0])
        v = np.array([0.5, 1.0, 1.5, 2.0])
        adv, _ = gae(r, v, 0.9, 0.0)
        expected = r + 0.9 * v[1:] - v[:-1]
        assert np.allclose(adv, expected, atol=1e-12)

    def test_lambda_one_zero_values_is_return_to_go(self):
        r = np.array([1.0, 1.0, 1.0])
        v = np.zeros(4)
        adv, _ = gae(r, v, 0.5, 1.0)
        expected = np.array([1 + 0.5 + 0.25, 1 + 0.5, 1.0])
        assert np.allclose(adv, expected, atol=1e-12)

    def test_three_step_manual_recursion(self):
        gamma, lam = 0.99, 0.95
        r = np.array([0.2, -0.1, 0.4])
        v = np.array([0.3, 0.1, 0.2, 0.05])
        # hand-unrolled recursion
        d2 = r[2] + gamma * v[3] - v[2]
        d1 = r[1] + gamma * v[2] - v[1]
        d0 = r[0] + gamma * v[1] - v[0]
        a2 = d2
        a1 = d1 + gamma * lam * a2
        a0 = d0 + gamma * lam * a1
        adv, rets = gae(r, v, gamma, lam)
        assert np.allclose(adv, [a0, a1, a2], atol=1e-14)
        assert np.allclose(rets, adv + v[:-1], atol=1e-14)

    def test_done_cuts_bootstrap(self):
        r = np.array([1.0, 1.0])
        v = np.array([0.0, 5.0, 7.0])
        adv, _ = gae(r, v, 0.9, 0.9, dones=[True, True])
        assert np.allclose(adv, [1.0, 1.0 - 5.0])

    def test_length_mismatch(self):
        with pytest.raises(LengthMismatch):
            gae([1.0], [0.0], 0.9, 0.9)


class TestClipArithmetic:
    def _setup(self, ratio, adv):
        policy = GaussianPolicy(seed=0)
        state = np.zeros((1, 7))
        u = policy.mean(state)[0] + 0.3
        logp = policy.log_prob(state, u[None, :])[0]
        old_logp = logp - np.log(ratio)
        loss, r, _ = policy.surrogate_loss_and_grads(
            state, u[None, :], np.array([old_logp]), np.array([adv]), clip=0.2
        )
        return loss, r[0]

    def test_ratio_above_clip_positive_advantage(self):
        loss, r = self._setup(1.5, 1.0)
        assert r == pytest.approx(1.5, rel=1e-9)
        assert loss == pytest.approx(-1.2, rel=1e-9)

    def test_ratio_below_clip_negative_advantage(self):
        loss, r = self._setup(0.5, -1.0)
        assert loss == pytest.approx(0.8, rel=1e-9)

    def test_ratio_one_equals_vanilla_gradient(self):
        policy = GaussianPolicy(seed=1)
        rng = np.random.default_rng(2)
        S = rng.normal(size=(6, 7))
        U = policy.mean(S) + 0.2 * rng.normal(size=(6, 4))
        oldlp = policy.log_prob(S, U)
        adv = rng.normal(size=6)
        policy.surrogate_loss_and_grads(S, U, oldlp, adv, clip=0.2)
        clipped_grads = [g.copy() for g in policy.grads()]

        # vanilla policy gradient of -mean(logp * adv) at the same point
        mu = policy.net.forward(S)
        std = np.exp(policy.log_std)
        z = (U - mu) / std
        dlogp = -adv / len(adv)
        policy.net.backward(dlogp[:, None] * z / std)
        vanilla = [g.copy() for g in policy.net.grads()]
        vanilla.append(np.sum(dlogp[:, None] * (z * z - 1.0), axis=0))
        for a, b in zip(clipped_grads, vanilla):
            assert np.allclose(a, b, atol=1e-10)


class TestPolicyGradcheck:
    def test_surrogate_gradients_match_finite_differences(self):
        rng = np.random.default_rng(3)
        worst = 0.0
        for seed in range(5):
            policy = GaussianPolicy(seed=seed)
            S = rng.normal(size=(5, 7))
            U = rng.normal(size=(5, 4)) * 0.4
            old_lp = policy.log_prob(S, U) + rng.normal(scale=0.1, size=5)
            adv = rng.normal(size=5)

            def loss_fn():
                loss, _, _ = policy.surrogate_loss_and_grads(S, U, old_lp, adv, clip=0.2)
                return loss

            loss_fn()
            analytic = [g.copy() for g in policy.grads()]
            h = 1e-6
            for p, g in zip(policy.params(), analytic):
                flat_p, flat_g = p.ravel(), g.ravel()
                step = max(1, flat_p.size // 15)
                for k in range(0, flat_p.size, step):
                    orig = flat_p[k]
                    flat_p[k] = orig + h
                    lp = loss_fn()
                    flat_p[k] = orig - h
                    lm = loss_fn()
                    flat_p[k] = orig
                    fd = (lp - lm) / (2 * h)
                    denom = max(1e-6, abs(fd), abs(flat_g[k]))
                    worst = max(worst, abs(fd - flat_g[k]) / denom)
        assert worst < 1e-4, worst


class TestApplyAction:
    def _state(self, **kw):
        base = dict(f1=0.5, precision=0.4, recall=0.7, w1=0.42, w2=0.58, rho=0.32, tau=0.7327)
        base.update(kw)
        return PolicyState(**base)

    def test_tau_clamped_at_range_max(self):
        s = apply_action(self._state(tau=0.93), PolicyAction(np.array([0, 0, 0, 0.3])))
        assert s.tau == config.TAU_RANGE[1]

    def test_weights_renormalized(self):
        s = apply_action(self._state(), PolicyAction(np.array([0.01, 0.01, 0, 0])))
        assert s.w1 + s.w2 == 1.0
        assert s.w1 == pytest.approx(0.43 / 1.02)

    def test_table_trajectory_replay(self):
        # 0.7327 -> 0.8000 needs two bounded steps
        s = self._state()
        s = apply_action(s, PolicyAction(np.array([0, 0, 0, 0.05])))
        s = apply_action(s, PolicyAction(np.array([0, 0, 0, 0.0173])))
        assert s.tau == pytest.approx(0.8000, abs=1e-12)

    def test_deltas_clamped_at_construction(self):
        a = PolicyAction(np.array([0.2, -0.4, 0.06, -0.07]))
        assert np.allclose(a.deltas, [0.05, -0.05, 0.05, -0.05])

    def test_simplex_invariant_under_random_actions(self):
        rng = np.random.default_rng(4)
        s = self._state()
        for _ in range(200):
            s = apply_action(s, PolicyAction(rng.uniform(-0.1, 0.1, size=4)))
            assert s.w1 + s.w2 == 1.0
            assert config.W_RANGE[0] <= s.w1 <= config.W_RANGE[1]
            assert config.RHO_RANGE[0] <= s.rho <= config.RHO_RANGE[1]
            assert config.TAU_RANGE[0] <= s.tau <= config.TAU_RANGE[1]

    def test_state_vector_layout(self):
        v = self._state().to_vector()
        assert np.allclose(v, [0.5, 0.4, 0.7, 0.42, 0.58, 0.32, 0.7327])

    def test_repair_is_idempotent(self):
        t = repair_tunables(0.9, 0.05, 0.6, 1.4)
        t2 = repair_tunables(t.w1, t.w2, t.rho, t.tau)
        assert t == t2


class TestPpoUpdate:
    def test_empty_buffer(self):
        with pytest.raises(EmptyBuffer):
            ppo_update(GaussianPolicy(seed=0), build_value_net(seed=0), [])

    def test_config_validates_clip(self):
        with pytest.raises(ValueError):
            PpoConfig(clip=0.5)

    def test_replay_buffer_fifo(self):
        buf = ReplayBuffer(capacity=3)
        for i in range(5):
            buf.push(
                Transition(np.zeros(7), np.zeros(4), float(i), np.zeros(7), 0.0, False)
            )
        assert len(buf) == 3
        assert [t.reward for t in buf.recent()] == [2.0, 3.0, 4.0]

    def test_bandit_converges_toward_optimum(self):
        # two contexts with opposite optimal deltas; reward is negative
        # distance to the optimum on the tau component
        rng = np.random.default_rng(5)
        policy = GaussianPolicy(seed=6)
        value_net = build_value_net(seed=7)
        cfg = PpoConfig(updates_per_iter=3)
        from semas.neural import Adam

        p_opt, v_opt = Adam(lr=cfg.lr), Adam(lr=cfg.lr)
        states = [np.zeros(7), np.ones(7)]
        optima = {0: 0.03, 1: -0.03}

        def mean_delta(ctx):
            mu = policy.mean(states[ctx][None, :])[0]
            return config.ACTION_DELTA_LIMIT * np.tanh(mu[3])

        before = [abs(mean_delta(c) - optima[c]) for c in (0, 1)]
        for _ in range(200):
            transitions = []
            for _ in range(16):
                ctx = int(rng.integers(0, 2))
                act = policy.act(states[ctx], rng)
                r = -abs(act.deltas[3] - optima[ctx]) * 20.0
                logp = float(policy.log_prob(states[ctx][None, :], act.pre_squash[None, :])[0])
                transitions.append(
                    Transition(states[ctx], act.pre_squash, r, states[ctx], logp, True)
                )
            ppo_update(policy, value_net, transitions, cfg, p_opt, v_opt, seed=0)
        after = [abs(mean_delta(c) - optima[c]) for c in (0, 1)]
        assert after[0] < before[0] and after[1] < before[1]
        assert after[0] < 0.01 and after[1] < 0.01, after
