"""Dense / LSTM / dropout layers with hand-written backward passes.

Everything is float64 and deterministic given the RNG handed in at
construction; analytic gradients are validated against central finite
differences in the test suite.
"""

import numpy as np

from ..errors import NoCache, ShapeMismatch


def _sigmoid(x):
    out = np.empty_like(x)
    pos = x >= 0
    out[pos] = 1.0 / (1.0 + np.exp(-x[pos]))
    ex = np.exp(x[~pos])
    out[~pos] = ex / (1.0 + ex)
    return out


ACTIVATIONS = {
    "linear": (lambda x: x, lambda x, y: np.ones_like(x)),
    "relu": (lambda x: np.maximum(x, 0.0), lambda x, y: (x > 0.0).astype(np.float64)),
    "tanh": (np.tanh, lambda x, y: 1.0 - y * y),
    "sigmoid": (_sigmoid, lambda x, y: y * (1.0 - y)),
}


def init_weight(rng, fan_in: int, shape) -> np.ndarray:
    limit = 1.0 / np.sqrt(fan_in)
    return rng.uniform(-limit, limit, size=shape)


class Dense:
    def __init__(self, in_dim: int, out_dim: int, activation: str, rng):
        if activation not in ACTIVATIONS:
            raise ValueError(f"unknown activation {activation!r}")
        self.in_dim = in_dim
        self.out_dim = out_dim
        self.activation = activation
        self.W = init_weight(rng, in_dim, (in_dim, out_dim))
        self.b = np.zeros(out_dim)
        self.dW = np.zeros_like(self.W)
        self.db = np.zeros_like(self.b)
        self._cache = None

    def forward(self, x: np.ndarray) -> np.ndarray:
        if x.shape[-1] != self.in_dim:
            raise ShapeMismatch(f"expected {self.in_dim} inputs, got {x.shape[-1]}")
        pre = x @ self.W + self.b
        act, _ = ACTIVATIONS[self.activation]
        out = act(pre)
        self._cache = (x, pre, out)
        return out

    def backward(self, grad_out: np.ndarray) -> np.ndarray:
        if self._cache is None:
            raise NoCache("forward must run before backward")
        x, pre, out = self._cache
        _, deriv = ACTIVATIONS[self.activation]
        g = grad_out * deriv(pre, out)
        self.dW = x.T @ g
        self.db = g.sum(axis=0)
        return g @ self.W.T

    def params(self):
        return [self.W, self.b]

    def grads(self):
        return [self.dW, self.db]


class Dropout:
    """Inverted dropout; identity when not training."""

    def __init__(self, p: float, rng):
        self.p = p
        self.rng = rng
        self._mask = None

    def forward(self, x: np.ndarray, training: bool) -> np.ndarray:
        if not training or self.p <= 0.0:
            self._mask = None
            return x
        self._mask = (self.rng.random(x.shape) >= self.p) / (1.0 - self.p)
        return x * self._mask

    def backward(self, grad_out: np.ndarray) -> np.ndarray:
        if self._mask is None:
            return grad_out
        return grad_out * self._mask

    def params(self):
        return []

    def grads(self):
        return []


class Lstm:
    """Single LSTM layer over full sequences, gate order (i, f, g, o)."""

    def __init__(self, in_dim: int, hidden: int, rng):
        self.in_dim = in_dim
        self.hidden = hidden
        self.Wx = init_weight(rng, in_dim, (in_dim, 4 * hidden))
        self.Wh = init_weight(rng, hidden, (hidden, 4 * hidden))
        self.b = np.zeros(4 * hidden)
        self.dWx = np.zeros_like(self.Wx)
        self.dWh = np.zeros_like(self.Wh)
        self.db = np.zeros_like(self.b)
        self._cache = None

    def forward(self, X: np.ndarray) -> np.ndarray:
        if X.shape[-1] != self.in_dim:
            raise ShapeMismatch(f"expected {self.in_dim} inputs, got {X.shape[-1]}")
        B, T, _ = X.shape
        H = self.hidden
        h = np.zeros((B, H))
        c = np.zeros((B, H))
        out = np.empty((B, T, H))
        steps = []
        for t in range(T):
            x_t = X[:, t, :]
            a = x_t @ self.Wx + h @ self.Wh + self.b
            i = _sigmoid(a[:, :H])
            f = _sigmoid(a[:, H : 2 * H])
            g = np.tanh(a[:, 2 * H : 3 * H])
            o = _sigmoid(a[:, 3 * H :])
            c_new = f * c + i * g
            tanh_c = np.tanh(c_new)
            h_new = o * tanh_c
            steps.append((x_t, h, c, i, f, g, o, c_new, tanh_c))
            h, c = h_new, c_new
            out[:, t, :] = h
        self._cache = (X.shape, steps)
        return out

    def backward(self, grad_out: np.ndarray) -> np.ndarray:
        if self._cache is None:
            raise NoCache("forward must run before backward")
        (B, T, _), steps = self._cache
        H = self.hidden
        self.dWx.fill(0.0)
        self.dWh.fill(0.0)
        self.db.fill(0.0)
        dX = np.empty((B, T, self.in_dim))
        dh_next = np.zeros((B, H))
        dc_next = np.zeros((B, H))
        for t in range(T - 1, -1, -1):
            x_t, h_prev, c_prev, i, f, g, o, c_new, tanh_c = steps[t]
            dh = grad_out[:, t, :] + dh_next
            do = dh * tanh_c
            dc = dh * o * (1.0 - tanh_c * tanh_c) + dc_next
            di = dc * g
            df = dc * c_prev
            dg = dc * i
            dc_next = dc * f
            da = np.concatenate(
                (
                    di * i * (1.0 - i),
                    df * f * (1.0 - f),
                    dg * (1.0 - g * g),
                    do * o * (1.0 - o),
                ),
                axis=1,
            )
            self.dWx += x_t.T @ da
            self.dWh += h_prev.T @ da
            self.db += da.sum(axis=0)
            dX[:, t, :] = da @ self.Wx.T
            dh_next = da @ self.Wh.T
        return dX

    def params(self):
        return [self.Wx, self.Wh, self.b]

    def grads(self):
        return [self.dWx, self.dWh, self.db]
