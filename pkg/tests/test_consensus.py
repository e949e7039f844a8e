import itertools

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from semas import consensus
from semas.consensus import (
    Action,
    AnomalyAlert,
    ConsensusPolicy,
    Priority,
    decide,
    fuse,
    generate_response,
    make_alert,
    select_action,
    severity_band,
    top_deviating_features,
    utility_table,
)
from semas.errors import EmptyCandidates, InvalidPolicy, NoAlert


class TestFuse:
    def test_convexity_fixed_point(self):
        assert fuse(0.6, 0.6, ConsensusPolicy(0.5, 0.5, 0.8)) == pytest.approx(0.6)

    def test_weight_readoff(self):
        assert fuse(1.0, 0.0, ConsensusPolicy(0.4243, 0.5757, 0.8)) == pytest.approx(0.4243)

    def test_degenerate_weight(self):
        assert fuse(0.37, 0.99, ConsensusPolicy(1.0, 0.0, 0.5)) == pytest.approx(0.37)

    def test_invalid_policy(self):
        with pytest.raises(InvalidPolicy):
            fuse(0.5, 0.5, ConsensusPolicy(0.6, 0.6, 0.5))
        with pytest.raises(InvalidPolicy):
            fuse(0.5, 0.5, ConsensusPolicy(0.5, 0.5, 1.5))

    def test_out_of_range_scores(self):
        with pytest.raises(ValueError):
            fuse(1.2, 0.0, ConsensusPolicy(0.5, 0.5, 0.5))

    @given(
        st.floats(0, 1),
        st.floats(0, 1),
        st.floats(0, 1),
        st.floats(0.01, 0.99),
    )
    def test_monotone_and_bounded(self, a1, a2, w1, tau):
        pol = ConsensusPolicy(w1, 1.0 - w1, tau)
        base = fuse(a1, a2, pol)
        assert 0.0 <= base <= 1.0 + 1e-12
        if a1 < 1.0:
            assert fuse(min(1.0, a1 + 0.1), a2, pol) >= base - 1e-12
        if a2 < 1.0:
            assert fuse(a1, min(1.0, a2 + 0.1), pol) >= base - 1e-12


class TestDecide:
    def test_above_threshold(self):
        assert decide(0.87, 0.8) == 1

    def test_boundary_is_strict(self):
        assert decide(0.8, 0.8) == 0

    def test_below(self):
        assert decide(0.0, 0.5) == 0


class TestBands:
    def test_cutpoints(self):
        assert severity_band(0.42) == "low"
        assert severity_band(0.6) == "medium"
        assert severity_band(0.8) == "medium"
        assert severity_band(0.801) == "high"

    def test_make_alert(self):
        alert = make_alert(0.9, 0.9, ConsensusPolicy(0.42, 0.58, 0.8), tick=5)
        assert alert.decision == 1 and alert.severity_band == "high" and alert.tick == 5


class TestSelectAction:
    def test_single_candidate(self):
        assert select_action([Action.EMERGENCY_STOP], [[1, 1, 1, 1]]) == Action.EMERGENCY_STOP

    def test_two_candidates_clear_winner(self):
        got = select_action(
            [Action.CONTINUE_MONITORING, Action.SCHEDULE_INSPECTION],
            [[0.9] * 4, [0.1] * 4],
        )
        assert got == Action.CONTINUE_MONITORING

    def test_matches_exhaustive_argmax(self):
        rng = np.random.default_rng(0)
        candidates = [Action.CONTINUE_MONITORING, Action.SCHEDULE_INSPECTION, Action.EMERGENCY_STOP]
        for _ in range(50):
            table = rng.random((3, 4))
            w = rng.random(4)
            w /= w.sum()
            got = select_action(candidates, table, w)
            # brute force over candidates
            best = max(range(3), key=lambda i: float(np.dot(table[i], w)))
            assert got == candidates[best]

    def test_scale_invariance(self):
        rng = np.random.default_rng(1)
        candidates = [Action.SCHEDULE_INSPECTION, Action.IMMEDIATE_INSPECTION]
        for _ in range(20):
            table = rng.random((2, 4))
            a = select_action(candidates, table)
            b = select_action(candidates, 7.3 * table)
            assert a == b

    def test_tie_breaks_by_order(self):
        got = select_action(
            [Action.CONTINUE_MONITORING, Action.SCHEDULE_INSPECTION], [[0.5] * 4, [0.5] * 4]
        )
        assert got == Action.CONTINUE_MONITORING

    def test_empty_candidates(self):
        with pytest.raises(EmptyCandidates):
            select_action([], [])

    def test_weights_must_be_simplex(self):
        with pytest.raises(ValueError):
            select_action([Action.EMERGENCY_STOP], [[1, 1, 1, 1]], weights=(0.5, 0.5, 0.5, 0.5))


class TestGenerateResponse:
    def _alert(self, a_fog):
        return AnomalyAlert(a_fog, 1, tick=9, severity_band=severity_band(a_fog))

    def test_low_severity_plan(self):
        z = np.array([0.1, -2.0, 0.5, 1.4])
        plan = generate_response(self._alert(0.42), z, {"feature_names": ["a", "b", "c", "d"]})
        assert plan.action in (Action.CONTINUE_MONITORING, Action.SCHEDULE_INSPECTION)
        assert plan.priority == Priority.LOW
        assert "0.42" in plan.explanation
        assert "b=" in plan.explanation  # largest deviation named

    def test_high_severity_plan(self):
        z = np.array([3.0, 0.2])
        plan = generate_response(self._alert(0.89), z)
        assert plan.priority == Priority.HIGH
        assert plan.action in (Action.IMMEDIATE_INSPECTION, Action.EMERGENCY_STOP)

    def test_band_edge_medium(self):
        plan = generate_response(self._alert(0.6), np.ones(3))
        assert plan.priority == Priority.MEDIUM

    def test_deterministic(self):
        z = np.array([0.4, -1.2, 2.2])
        a = generate_response(self._alert(0.7), z, {"equipment": "pump-2"})
        b = generate_response(self._alert(0.7), z, {"equipment": "pump-2"})
        assert a == b

    def test_requires_alert(self):
        silent = AnomalyAlert(0.3, 0, 0, "low")
        with pytest.raises(NoAlert):
            generate_response(silent, np.ones(2))

    def test_escalates_with_severity(self):
        # the chosen action is monotone non-decreasing across the bands
        actions = [
            generate_response(self._alert(a), np.ones(2)).action
            for a in (0.45, 0.7, 0.85, 0.95)
        ]
        assert all(x <= y for x, y in zip(actions, actions[1:]))
        assert actions[-1] == Action.EMERGENCY_STOP

    def test_render_includes_fields(self):
        plan = generate_response(self._alert(0.9), np.array([1.0, 2.0]))
        text = plan.render()
        assert "action:" in text and "priority:" in text and "downtime" in text


def test_top_deviating_features_order():
    got = top_deviating_features([0.1, -3.0, 2.0, 0.0], ["w", "x", "y", "z"], k=3)
    assert [n for n, _ in got] == ["x", "y", "w"]


def test_utility_table_shape():
    table = utility_table(list(Action), 0.5)
    assert table.shape == (4, 4)
    assert np.all(table <= 1.0) and np.all(table >= -1.0)
