import numpy as np
import pytest

from semas.errors import EmptyDataset, Untrained, WrongWindowLength
from semas.rul import make_sequences, rul_build, rul_predict, rul_train


def _fixture(n=120, seed=0):
    """Noiseless degradation: the first feature encodes remaining hours."""
    rng = np.random.default_rng(seed)
    hours = rng.uniform(5.0, 100.0, size=n)
    seqs = np.zeros((n, 10, 3))
    for i, h in enumerate(hours):
        seqs[i, :, 0] = (h - np.arange(10)[::-1] * 0.5) / 100.0
        seqs[i, :, 1] = rng.normal(scale=0.01, size=10)
    return seqs, hours


class TestTraining:
    def test_constant_target_converges(self):
        rng = np.random.default_rng(1)
        seqs = rng.normal(size=(100, 10, 2)) * 0.1
        labels = np.full(100, 50.0)
        model = rul_build(2, seed=2)
        rul_train(model, seqs, labels, epochs=60, lr=0.02, seed=3)
        preds = [rul_predict(model, seqs[i]) for i in range(20)]
        mae = float(np.mean(np.abs(np.array(preds) - 50.0)))
        assert mae < 2.0, mae

    def test_linear_degradation_fixture(self):
        seqs, hours = _fixture()
        model = rul_build(3, seed=4)
        rul_train(model, seqs[:100], hours[:100], epochs=120, lr=0.02, seed=5)
        preds = np.array([rul_predict(model, seqs[i]) for i in range(100, 120)])
        mae = float(np.mean(np.abs(preds - hours[100:120])))
        assert mae < 5.0, mae
        # held-out windows stay within +-10 h of truth
        assert np.all(np.abs(preds - hours[100:120]) < 10.0)

    def test_empty_dataset(self):
        model = rul_build(2)
        with pytest.raises(EmptyDataset):
            rul_train(model, np.zeros((0, 10, 2)), np.zeros(0))


class TestPredict:
    def test_wrong_window_length(self):
        model = rul_build(2, seed=0)
        rul_train(model, np.zeros((4, 10, 2)), np.full(4, 50.0), epochs=1)
        with pytest.raises(WrongWindowLength):
            rul_predict(model, np.zeros((9, 2)))

    def test_untrained(self):
        model = rul_build(2, seed=0)
        with pytest.raises(Untrained):
            rul_predict(model, np.zeros((10, 2)))

    def test_clamped_non_negative(self):
        model = rul_build(1, seed=6)
        model.trained = True
        model.core.head.b[...] = -1000.0
        assert rul_predict(model, np.zeros((10, 1))) == 0.0


class TestMakeSequences:
    def test_full_history(self):
        X = np.arange(40.0).reshape(20, 2)
        seqs = make_sequences(X, [15], seq_len=10)
        assert seqs.shape == (1, 10, 2)
        assert np.array_equal(seqs[0], X[6:16])

    def test_front_padding(self):
        X = np.arange(10.0).reshape(5, 2)
        seqs = make_sequences(X, [2], seq_len=10)
        assert seqs.shape == (1, 10, 2)
        assert np.array_equal(seqs[0, :7], np.tile(X[0], (7, 1)))
        assert np.array_equal(seqs[0, 7:], X[:3])
