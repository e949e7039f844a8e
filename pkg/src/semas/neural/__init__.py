"""Minimal neural core shared by the RUL regressor, the sequence scorer
and the policy-evolution networks."""

import json

import numpy as np

from .layers import ACTIVATIONS, Dense, Dropout, Lstm
from .losses import bce, mae, mse
from .nets import DenseNet, LstmRegressor
from .optim import Adam
from .training import TrainLog, train_bce, train_mae

__all__ = [
    "ACTIVATIONS",
    "Dense",
    "Dropout",
    "Lstm",
    "bce",
    "mae",
    "mse",
    "DenseNet",
    "LstmRegressor",
    "Adam",
    "TrainLog",
    "train_bce",
    "train_mae",
    "save_params",
    "load_params",
]


def save_params(net, path: str, meta: dict = None) -> None:
    """Snapshot parameters with a shape manifest."""
    state = net.get_state()
    arrays = {f"p{idx}": arr for idx, arr in enumerate(state)}
    manifest = dict(meta or {})
    manifest["shapes"] = [list(a.shape) for a in state]
    arrays["meta_json"] = np.frombuffer(json.dumps(manifest).encode(), dtype=np.uint8)
    np.savez_compressed(path, **arrays)


def load_params(net, path: str) -> dict:
    """Restore a snapshot into a compatible net; returns the manifest."""
    data = np.load(path if str(path).endswith(".npz") else str(path) + ".npz")
    manifest = json.loads(bytes(data["meta_json"]).decode())
    state = [data[f"p{idx}"] for idx in range(len(manifest["shapes"]))]
    current = net.get_state()
    if [list(a.shape) for a in state] != [list(a.shape) for a in current]:
        raise ValueError("snapshot shapes do not match the target network")
    net.set_state(state)
    return manifest
