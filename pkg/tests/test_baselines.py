import numpy as np
import pytest

from semas import baselines
from semas.baselines import (
    RuleState,
    calibrate_threshold_once,
    combine_static,
    fit_static_ensemble,
    fused_vote,
    rule_step,
    rule_update_contamination,
    rule_update_threshold,
    rule_update_weights,
)
from semas.errors import AllZeroPerformance, SingleClass, UnfittedMember
from semas.rul import make_sequences


class TestCombine:
    def test_all_ones(self):
        assert combine_static(1.0, 1.0, 1.0) == pytest.approx(1.0)

    def test_weight_readoff(self):
        assert combine_static(1.0, 0.0, 0.0) == pytest.approx(0.4)

    def test_convexity_fixed_point(self):
        assert combine_static(0.5, 0.5, 0.5) == pytest.approx(0.5)


class TestCalibration:
    def test_separated_scores_pick_smallest_gap_point(self):
        scores = [0.1, 0.2, 0.25, 0.75, 0.8, 0.9]
        labels = [0, 0, 0, 1, 1, 1]
        assert calibrate_threshold_once(scores, labels) == pytest.approx(0.25)

    def test_matches_bruteforce_sweep(self):
        rng = np.random.default_rng(0)
        grid = np.round(np.arange(0.1, 0.91, 0.1), 10)
        for _ in range(20):
            scores = rng.random(60)
            labels = rng.integers(0, 2, size=60)
            labels[:2] = [0, 1]
            got = calibrate_threshold_once(scores, labels, grid=grid)
            best_tau, best_f1 = None, -1.0
            for tau in grid:
                pred = (scores > tau).astype(int)
                tp = np.sum((pred == 1) & (labels == 1))
                fp = np.sum((pred == 1) & (labels == 0))
                fn = np.sum((pred == 0) & (labels == 1))
                f1 = 2 * tp / (2 * tp + fp + fn) if (2 * tp + fp + fn) else 0.0
                if f1 > best_f1:
                    best_f1, best_tau = f1, tau
            assert got == pytest.approx(best_tau)

    def test_single_class(self):
        with pytest.raises(SingleClass):
            calibrate_threshold_once([0.5, 0.6], [1, 1])


class TestRules:
    def test_contamination_branches(self):
        assert rule_update_contamination(0.32, 0.55) == pytest.approx(0.34)
        assert rule_update_contamination(0.32, 0.75) == pytest.approx(0.30)
        assert rule_update_contamination(0.32, 0.65) == pytest.approx(0.32)

    def test_contamination_full_branch_table(self):
        for f1 in np.linspace(0, 1, 21):
            rho = rule_update_contamination(0.3, float(f1))
            if f1 < 0.6:
                assert rho == pytest.approx(0.32)
            elif f1 > 0.7:
                assert rho == pytest.approx(0.28)
            else:
                assert rho == pytest.approx(0.30)

    def test_contamination_clamped(self):
        assert rule_update_contamination(0.02, 0.9) == baselines.RHO_BOUNDS[0]
        assert rule_update_contamination(0.48, 0.1) == baselines.RHO_BOUNDS[1]

    def test_threshold_formula(self):
        assert rule_update_threshold(0.75, 0.9, 0.7) == pytest.approx(0.74, abs=1e-12)

    def test_threshold_gate_not_triggered(self):
        assert rule_update_threshold(0.75, 0.52, 0.48) == 0.75
        assert rule_update_threshold(0.75, 0.5, 0.5) == 0.75

    def test_threshold_direction(self):
        # precision above recall lowers the threshold (recall up next pass)
        assert rule_update_threshold(0.5, 0.9, 0.2) < 0.5
        assert rule_update_threshold(0.5, 0.2, 0.9) > 0.5

    def test_weights_uniform(self):
        w = rule_update_weights([0.5, 0.5, 0.5])
        assert np.allclose(w, [1 / 3] * 3)

    def test_weights_already_normalized(self):
        w = rule_update_weights([0.6, 0.3, 0.1])
        assert np.allclose(w, [0.6, 0.3, 0.1])

    def test_weights_all_zero(self):
        with pytest.raises(AllZeroPerformance):
            rule_update_weights([0.0, 0.0, 0.0])

    def test_rule_step_composes(self):
        state = RuleState(rho=0.32, tau=0.75)
        nxt = rule_step(state, f1=0.55, precision=0.9, recall=0.7, member_f1s=[0.4, 0.4, 0.2])
        assert nxt.rho == pytest.approx(0.34)
        assert nxt.tau == pytest.approx(0.74)
        assert nxt.iteration == 2
        assert np.allclose(nxt.weights, [0.4, 0.4, 0.2])


@pytest.fixture(scope="module")
def tiny_ensemble():
    rng = np.random.default_rng(3)
    X = np.vstack([rng.normal(size=(240, 4)), rng.normal(size=(60, 4)) + 3.0])
    y = np.concatenate([np.zeros(240, dtype=int), np.ones(60, dtype=int)])
    perm = rng.permutation(300)
    X, y = X[perm], y[perm]
    ens = fit_static_ensemble(X, y, rho=0.2, seq_len=5, seed=1, lstm_epochs=6)
    return ens, X, y


class TestStaticEnsemble:
    def test_outputs_reproducible_across_passes(self, tiny_ensemble):
        ens, X, y = tiny_ensemble
        seqs = make_sequences(X, np.arange(len(X)), ens.seq_len)
        scores1 = np.array([ens.score(X[i], seqs[i]) for i in range(40)])
        scores2 = np.array([ens.score(X[i], seqs[i]) for i in range(40)])
        assert np.array_equal(scores1, scores2)

    def test_tau_from_grid(self, tiny_ensemble):
        ens, _, _ = tiny_ensemble
        assert 0.05 <= ens.tau <= 0.95

    def test_member_votes_binary(self, tiny_ensemble):
        ens, X, _ = tiny_ensemble
        seqs = make_sequences(X, np.arange(len(X)), ens.seq_len)
        votes = ens.member_votes(X[0], seqs[0])
        assert all(v in (0, 1) for v in votes)

    def test_unfitted_member(self):
        from semas.baselines import StaticEnsemble

        ens = StaticEnsemble(None, None, None, 5)
        with pytest.raises(UnfittedMember):
            ens.score(np.zeros(4), np.zeros((5, 4)))


def test_fused_vote():
    assert fused_vote([1, 0, 1], [0.4, 0.4, 0.2]) == pytest.approx(0.6)
