"""Network containers: a plain MLP and the stacked-LSTM regressor."""

import numpy as np

from ..errors import NoCache, ShapeMismatch
from .layers import Dense, Dropout, Lstm


class DenseNet:
    """Fully-connected stack; `activations` has one entry per layer."""

    def __init__(self, sizes, activations, seed: int = 0):
        if len(sizes) < 2 or len(activations) != len(sizes) - 1:
            raise ValueError("sizes/activations mismatch")
        rng = np.random.default_rng(seed)
        self.layers = [
            Dense(sizes[k], sizes[k + 1], activations[k], rng) for k in range(len(sizes) - 1)
        ]
        self.in_dim = sizes[0]
        self.out_dim = sizes[-1]

    def forward(self, x, training: bool = False) -> np.ndarray:
        x = np.asarray(x, dtype=np.float64)
        squeeze = x.ndim == 1
        if squeeze:
            x = x[None, :]
        out = x
        for layer in self.layers:
            out = layer.forward(out)
        return out[0] if squeeze else out

    def backward(self, grad_out) -> np.ndarray:
        g = np.asarray(grad_out, dtype=np.float64)
        if g.ndim == 1:
            g = g[None, :]
        for layer in reversed(self.layers):
            g = layer.backward(g)
        return g

    def params(self):
        return [p for layer in self.layers for p in layer.params()]

    def grads(self):
        return [g for layer in self.layers for g in layer.grads()]

    def get_state(self):
        return [p.copy() for p in self.params()]

    def set_state(self, state) -> None:
        for p, s in zip(self.params(), state):
            p[...] = s


class LstmRegressor:
    """Stacked LSTM with dropout after the recurrent stack and a 1-unit head.

    `head` selects the output nonlinearity: "linear" for regression,
    "sigmoid" for a probability.  Sequences are (batch, T, features); the
    head reads the final timestep.
    """

    def __init__(
        self,
        input_dim: int,
        hidden=(64, 32, 32),
        head: str = "linear",
        dropout: float = 0.2,
        seq_len: int = 10,
        seed: int = 0,
    ):
        rng = np.random.default_rng(seed)
        self.input_dim = input_dim
        self.seq_len = seq_len
        self.head_kind = head
        self.lstm_layers = []
        prev = input_dim
        for h in hidden:
            self.lstm_layers.append(Lstm(prev, h, rng))
            prev = h
        self.dropout = Dropout(dropout, rng)
        self.head = Dense(prev, 1, head, rng)
        self._forwarded = False

    def forward(self, X, training: bool = False) -> np.ndarray:
        X = np.asarray(X, dtype=np.float64)
        squeeze = X.ndim == 2
        if squeeze:
            X = X[None, :, :]
        if X.shape[2] != self.input_dim:
            raise ShapeMismatch(f"expected {self.input_dim} features, got {X.shape[2]}")
        out = X
        for layer in self.lstm_layers:
            out = layer.forward(out)
        last = out[:, -1, :]
        last = self.dropout.forward(last, training)
        y = self.head.forward(last)
        self._forwarded = True
        self._seq_hidden_shape = out.shape
        return y[0] if squeeze else y

    def backward(self, grad_out) -> None:
        if not self._forwarded:
            raise NoCache("forward must run before backward")
        g = np.asarray(grad_out, dtype=np.float64)
        if g.ndim == 1:
            g = g[None, :]
        g = self.head.backward(g)
        g = self.dropout.backward(g)
        B, T, H = self._seq_hidden_shape
        g_seq = np.zeros((B, T, H))
        g_seq[:, -1, :] = g
        for layer in reversed(self.lstm_layers):
            g_seq = layer.backward(g_seq)

    def params(self):
        out = []
        for layer in self.lstm_layers:
            out.extend(layer.params())
        out.extend(self.head.params())
        return out

    def grads(self):
        out = []
        for layer in self.lstm_layers:
            out.extend(layer.grads())
        out.extend(self.head.grads())
        return out

    def get_state(self):
        return [p.copy() for p in self.params()]

    def set_state(self, state) -> None:
        for p, s in zip(self.params(), state):
            p[...] = s
