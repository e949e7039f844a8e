import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from semas import config
from semas.errors import AllZeroCounts, EmptyRound, LengthMismatch
from semas.federate import AgentContribution, aggregate, aggregate_policies


def _c(agent, n, theta):
    return AgentContribution(agent, n, np.asarray(theta, dtype=float))


class TestAggregate:
    def test_weighted_mean_arithmetic(self):
        out = aggregate([_c("a", 1, [0.0]), _c("b", 3, [4.0])])
        assert out[0] == pytest.approx(3.0, abs=1e-12)

    def test_single_contributor_identity(self):
        theta = np.array([0.1, 0.2, 0.3])
        out = aggregate([_c("a", 7, theta)])
        assert np.array_equal(out, theta)

    def test_matches_longdouble_oracle(self):
        rng = np.random.default_rng(0)
        for _ in range(20):
            contribs = [
                _c(f"a{i}", int(rng.integers(1, 1000)), rng.normal(size=6))
                for i in range(5)
            ]
            out = aggregate(contribs)
            ns = np.array([c.n_samples for c in contribs], dtype=np.longdouble)
            thetas = np.stack([c.theta.astype(np.longdouble) for c in contribs])
            oracle = (ns @ thetas) / ns.sum()
            assert np.allclose(out, oracle.astype(float), atol=1e-12)

    def test_idempotence_exact(self):
        theta = np.array([0.1, 0.7, 0.32, 0.9])
        out = aggregate([_c("a", 3, theta), _c("b", 5, theta), _c("c", 11, theta)])
        assert np.array_equal(out, theta)

    def test_errors(self):
        with pytest.raises(EmptyRound):
            aggregate([])
        with pytest.raises(LengthMismatch):
            aggregate([_c("a", 1, [1.0]), _c("b", 1, [1.0, 2.0])])
        with pytest.raises(AllZeroCounts):
            aggregate([_c("a", 0, [1.0]), _c("b", 0, [2.0])])
        with pytest.raises(ValueError):
            AgentContribution("a", -1, np.array([1.0]))

    @given(
        st.lists(
            st.tuples(
                st.integers(1, 500),
                st.lists(st.floats(-100, 100), min_size=3, max_size=3),
            ),
            min_size=1,
            max_size=6,
        )
    )
    def test_convexity(self, rows):
        contribs = [_c(f"a{i}", n, theta) for i, (n, theta) in enumerate(rows)]
        out = aggregate(contribs)
        thetas = np.stack([c.theta for c in contribs])
        assert np.all(out >= thetas.min(axis=0) - 1e-12)
        assert np.all(out <= thetas.max(axis=0) + 1e-12)

    def test_permutation_invariance(self):
        rng = np.random.default_rng(1)
        contribs = [_c(f"a{i}", int(rng.integers(1, 50)), rng.normal(size=4)) for i in range(6)]
        out1 = aggregate(contribs)
        out2 = aggregate(contribs[::-1])
        assert np.allclose(out1, out2, atol=1e-12)


class TestAggregatePolicies:
    def test_repair_enforced(self):
        # raw average would leave the weights off the simplex
        out = aggregate_policies(
            [
                _c("f0", 100, [0.30, 0.70, 0.25, 0.60]),
                _c("f1", 300, [0.70, 0.30, 0.35, 0.90]),
            ]
        )
        assert out.w1 + out.w2 == 1.0
        assert config.W_RANGE[0] <= out.w1 <= config.W_RANGE[1]
        assert config.RHO_RANGE[0] <= out.rho <= config.RHO_RANGE[1]
        assert config.TAU_RANGE[0] <= out.tau <= config.TAU_RANGE[1]

    def test_wrong_width(self):
        with pytest.raises(LengthMismatch):
            aggregate_policies([_c("a", 1, [0.5, 0.5])])
