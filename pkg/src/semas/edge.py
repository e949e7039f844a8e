"""Edge-tier feature extraction: sliding windows to compact descriptors.

Two stateless edge agents each watch one sensor modality, slide a window
of W samples over it and publish one descriptor per hop to their chunk
topic.  For per-cycle tabular rows (no waveform) the stage degenerates to
a standardized pass-through so downstream detectors see the row as-is.
"""

from collections import deque
from dataclasses import dataclass
from typing import Iterable, Optional, Union

import numpy as np

from .errors import TickMismatch, WindowTooShort

DEFAULT_BANDS = 4


@dataclass(frozen=True)
class SensorWindow:
    values: np.ndarray  # W x d
    end_tick: int

    @property
    def window_size(self) -> int:
        return self.values.shape[0]


@dataclass(frozen=True)
class FeatureVector:
    """Per-channel window descriptors.

    Flattened layout per channel: rms, kurtosis, skewness, trend,
    band energies (k of them, DC lives in band 0), then min/max/mean/std.
    """

    rms: np.ndarray
    kurtosis: np.ndarray
    skewness: np.ndarray
    trend: np.ndarray
    spectral: np.ndarray  # d x k
    stats: np.ndarray  # d x 4 (min, max, mean, std)
    end_tick: int

    @property
    def n_channels(self) -> int:
        return len(self.rms)

    @property
    def width(self) -> int:
        return self.n_channels * (8 + self.spectral.shape[1])

    def flatten(self) -> np.ndarray:
        parts = []
        for c in range(self.n_channels):
            parts.append(
                np.concatenate(
                    (
                        [self.rms[c], self.kurtosis[c], self.skewness[c], self.trend[c]],
                        self.spectral[c],
                        self.stats[c],
                    )
                )
            )
        if not parts:
            return np.zeros(0)
        return np.concatenate(parts)

    def feature_names(self, prefix: str = "ch") -> tuple:
        k = self.spectral.shape[1]
        names = []
        for c in range(self.n_channels):
            base = f"{prefix}{c}"
            names += [f"{base}.rms", f"{base}.kurt", f"{base}.skew", f"{base}.trend"]
            names += [f"{base}.band{j}" for j in range(k)]
            names += [f"{base}.min", f"{base}.max", f"{base}.mean", f"{base}.std"]
        return tuple(names)


@dataclass(frozen=True)
class FlatVector:
    """Already-flat feature payload (pass-through rows, fused vectors)."""

    values: np.ndarray
    names: tuple
    end_tick: int

    @property
    def width(self) -> int:
        return len(self.values)


EdgeVector = Union[FeatureVector, FlatVector]


def extract(window: SensorWindow, bands: int = DEFAULT_BANDS) -> FeatureVector:
    """Deterministic window descriptor; zero-variance channels get
    kurtosis/skewness of 0 by convention."""
    X = np.asarray(window.values, dtype=np.float64)
    if X.ndim == 1:
        X = X[:, None]
    W = X.shape[0]
    if W < 2:
        raise WindowTooShort(f"window has {W} rows, need >= 2")

    mean = X.mean(axis=0)
    std = X.std(axis=0)
    rms = np.sqrt(np.mean(X * X, axis=0))

    centered = X - mean
    safe = np.where(std > 0.0, std, 1.0)
    m3 = np.mean(centered**3, axis=0)
    m4 = np.mean(centered**4, axis=0)
    skew = np.where(std > 0.0, m3 / safe**3, 0.0)
    kurt = np.where(std > 0.0, m4 / safe**4 - 3.0, 0.0)

    t = np.arange(W, dtype=np.float64)
    t_c = t - t.mean()
    trend = (t_c @ centered) / np.sum(t_c * t_c)

    spectrum = np.abs(np.fft.rfft(X, axis=0)) ** 2 / W
    band_chunks = np.array_split(spectrum, bands, axis=0)
    spectral = np.stack([chunk.sum(axis=0) for chunk in band_chunks], axis=1)

    stats = np.stack([X.min(axis=0), X.max(axis=0), mean, std], axis=1)
    return FeatureVector(rms, kurt, skew, trend, spectral, stats, window.end_tick)


def passthrough(values, end_tick: int, names: Optional[tuple] = None) -> FlatVector:
    """Tabular bypass (W = 1): the standardized row is forwarded whole;
    no spectral or trend content exists for a single cycle."""
    v = np.asarray(values, dtype=np.float64).ravel()
    if names is None:
        names = tuple(f"f{j}" for j in range(len(v)))
    return FlatVector(v, tuple(names), end_tick)


def stream_edge_agent(
    sensor_stream: Iterable,
    window_size: int,
    hop: int,
    bus,
    topic: str,
    bands: int = DEFAULT_BANDS,
) -> int:
    """Consume a time-ordered sample stream; publish one descriptor per hop
    once the first full window is buffered.  Returns the publish count."""
    if window_size < 2:
        raise WindowTooShort(f"window_size {window_size} < 2")
    if hop < 1:
        raise ValueError("hop must be >= 1")
    buffer: deque = deque(maxlen=window_size)
    published = 0
    for i, sample in enumerate(sensor_stream):
        buffer.append(np.asarray(sample, dtype=np.float64))
        filled = i + 1
        if filled >= window_size and (filled - window_size) % hop == 0:
            window = SensorWindow(np.stack(tuple(buffer)), end_tick=i)
            bus.publish(topic, extract(window, bands=bands), tick=i)
            published += 1
    return published


def _as_flat(z: EdgeVector) -> FlatVector:
    if isinstance(z, FlatVector):
        return z
    return FlatVector(z.flatten(), z.feature_names(), z.end_tick)


def aggregate(z1: EdgeVector, z2: EdgeVector) -> FlatVector:
    """Concatenate two same-tick vectors, stream-1 first.  An empty side
    acts as the identity."""
    f1, f2 = _as_flat(z1), _as_flat(z2)
    if f1.width == 0:
        return f2
    if f2.width == 0:
        return f1
    if f1.end_tick != f2.end_tick:
        raise TickMismatch(f"{f1.end_tick} != {f2.end_tick}")
    return FlatVector(
        np.concatenate((f1.values, f2.values)), f1.names + f2.names, f1.end_tick
    )
