import numpy as np
import pytest
import scipy.stats
from hypothesis import given, settings
from hypothesis import strategies as st

from semas import metrics
from semas.errors import LengthMismatch, SingleClass, TooFewIterations, TooFewSamples


class TestClassification:
    def test_hand_arithmetic(self):
        labels = [1, 1, 1, 0, 0]
        preds = [1, 1, 0, 1, 0]
        m = metrics.classification_metrics(preds, labels)
        assert m.counts == metrics.ConfusionCounts(tp=2, fp=1, tn=1, fn=1)
        assert m.precision == pytest.approx(2 / 3)
        assert m.recall == pytest.approx(2 / 3)
        assert m.f1 == pytest.approx(2 / 3)

    def test_all_correct(self):
        m = metrics.classification_metrics([1, 0, 1], [1, 0, 1])
        assert m.f1 == 1.0
        assert m.accuracy == 1.0

    def test_no_positive_predictions(self):
        m = metrics.classification_metrics([0, 0, 0], [1, 1, 0])
        assert m.precision == 0.0
        assert m.f1 == 0.0

    def test_length_mismatch(self):
        with pytest.raises(LengthMismatch):
            metrics.classification_metrics([1, 0], [1])

    @given(
        st.lists(st.tuples(st.integers(0, 1), st.integers(0, 1)), min_size=2, max_size=60)
    )
    def test_harmonic_mean_identity(self, pairs):
        preds = [p for p, _ in pairs]
        labels = [l for _, l in pairs]
        m = metrics.classification_metrics(preds, labels)
        if m.precision + m.recall > 0:
            assert m.f1 == pytest.approx(
                2 * m.precision * m.recall / (m.precision + m.recall)
            )


def _auc_pair_counting(scores, labels):
    scores = np.asarray(scores, dtype=float)
    labels = np.asarray(labels)
    pos = scores[labels == 1]
    neg = scores[labels == 0]
    total = 0.0
    for p in pos:
        for n in neg:
            if p > n:
                total += 1.0
            elif p == n:
                total += 0.5
    return total / (len(pos) * len(neg))


class TestRocAuc:
    def test_perfect_ranking(self):
        assert metrics.roc_auc([0.1, 0.2, 0.8, 0.9], [0, 0, 1, 1]) == 1.0

    def test_inverted_ranking(self):
        assert metrics.roc_auc([0.9, 0.8, 0.2, 0.1], [0, 0, 1, 1]) == 0.0

    def test_tie_fixture_matches_pair_counting(self):
        scores = [0.1, 0.5, 0.5, 0.7, 0.9, 0.3]
        labels = [0, 0, 1, 1, 1, 0]
        assert metrics.roc_auc(scores, labels) == pytest.approx(
            _auc_pair_counting(scores, labels), abs=1e-12
        )

    def test_random_fixtures_match_oracle(self):
        rng = np.random.default_rng(0)
        for _ in range(25):
            n = int(rng.integers(6, 30))
            scores = rng.choice([0.1, 0.2, 0.3, 0.5, 0.8], size=n)
            labels = rng.integers(0, 2, size=n)
            if labels.min() == labels.max():
                labels[0] = 1 - labels[0]
            assert metrics.roc_auc(scores, labels) == pytest.approx(
                _auc_pair_counting(scores, labels), abs=1e-12
            )

    def test_monotone_transform_invariance(self):
        rng = np.random.default_rng(1)
        scores = rng.random(40)
        labels = rng.integers(0, 2, size=40)
        labels[0], labels[1] = 0, 1
        base = metrics.roc_auc(scores, labels)
        assert metrics.roc_auc(np.exp(3 * scores), labels) == pytest.approx(base)
        assert metrics.roc_auc(2 * scores + 7, labels) == pytest.approx(base)

    def test_single_class(self):
        with pytest.raises(SingleClass):
            metrics.roc_auc([0.3, 0.4], [1, 1])


class TestRegression:
    def test_exact_predictions(self):
        assert metrics.regression_metrics([1.0, 2.0], [1.0, 2.0]) == (0.0, 0.0)

    def test_symmetric_errors(self):
        mae, rmse = metrics.regression_metrics([1.0, -1.0], [0.0, 0.0])
        assert mae == 1.0 and rmse == 1.0

    def test_inequality_case(self):
        mae, rmse = metrics.regression_metrics([0.0, 2.0], [0.0, 0.0])
        assert mae == pytest.approx(1.0)
        assert rmse == pytest.approx(np.sqrt(2))

    @given(st.lists(st.floats(-1e3, 1e3), min_size=1, max_size=50))
    @settings(max_examples=50)
    def test_rmse_dominates_mae(self, errs):
        mae, rmse = metrics.regression_metrics(errs, [0.0] * len(errs))
        assert rmse >= mae - 1e-12


class TestWelch:
    def test_identical_samples(self):
        res = metrics.welch_t([1.0, 2.0, 3.0], [1.0, 2.0, 3.0])
        assert res.t == 0.0 and res.p == 1.0

    def test_hand_computed(self):
        # means 2 and 5, equal variances 1, n=3 each:
        # t = -3 / sqrt(2/3), dof = 4 by Welch-Satterthwaite
        res = metrics.welch_t([1.0, 2.0, 3.0], [4.0, 5.0, 6.0])
        assert res.t == pytest.approx(-3.0 / np.sqrt(2.0 / 3.0), abs=1e-12)
        assert res.dof == pytest.approx(4.0, abs=1e-12)
        ref_p = 2 * scipy.stats.t.sf(abs(res.t), res.dof)
        assert res.p == pytest.approx(ref_p, abs=1e-10)

    def test_matches_scipy_on_random_samples(self):
        rng = np.random.default_rng(3)
        for _ in range(20):
            a = rng.normal(size=rng.integers(3, 20))
            b = rng.normal(loc=rng.normal(), size=rng.integers(3, 20))
            res = metrics.welch_t(a, b)
            t_ref, p_ref = scipy.stats.ttest_ind(a, b, equal_var=False)
            assert res.t == pytest.approx(t_ref, abs=1e-10)
            assert res.p == pytest.approx(p_ref, abs=1e-8)

    def test_too_few(self):
        with pytest.raises(TooFewSamples):
            metrics.welch_t([1.0], [1.0, 2.0])

    def test_cohen_d_shift_definition(self):
        a = np.array([1.0, 2.0, 3.0, 4.0])
        d = metrics.cohen_d(a + 2.0, a)
        assert d == pytest.approx(2.0 / np.std(a, ddof=1))


class TestStudentT:
    def test_cdf_matches_reference_grid(self):
        # 50-point grid across dof values, against an independent implementation
        for dof in (1.0, 2.5, 4.0, 11.0, 30.0):
            for t in np.linspace(-6, 6, 10):
                mine = metrics.student_t_cdf(float(t), dof)
                ref = scipy.stats.t.cdf(t, dof)
                assert mine == pytest.approx(ref, abs=1e-8)

    def test_ppf_round_trip(self):
        for dof in (2.0, 5.0, 17.0):
            for q in (0.05, 0.5, 0.975):
                t = metrics.student_t_ppf(q, dof)
                assert metrics.student_t_cdf(t, dof) == pytest.approx(q, abs=1e-9)

    def test_ci_uses_t_quantile(self):
        mean, half = metrics.mean_ci([1.0, 2.0, 3.0])
        tq = scipy.stats.t.ppf(0.975, 2)
        assert mean == pytest.approx(2.0)
        assert half == pytest.approx(tq * np.std([1, 2, 3], ddof=1) / np.sqrt(3), abs=1e-9)


class TestDeltaF1:
    def test_published_trajectory(self):
        assert metrics.delta_f1([0.5031, 0.4795, 0.4792]) == pytest.approx(-0.0239, abs=1e-12)

    def test_constant(self):
        assert metrics.delta_f1([0.5, 0.5, 0.5]) == 0.0

    def test_improving_trajectory(self):
        assert metrics.delta_f1([0.9000, 0.9440, 0.9606]) == pytest.approx(0.0606, abs=1e-12)

    def test_too_few(self):
        with pytest.raises(TooFewIterations):
            metrics.delta_f1([0.5])

    def test_accepts_reports(self):
        reports = [
            metrics.IterationReport(i, f1, 0, 0, 0, 0, 0, 0) for i, f1 in enumerate([0.4, 0.6])
        ]
        assert metrics.delta_f1(reports) == pytest.approx(0.2)
