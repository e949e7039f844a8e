"""Five-member detection bank with majority voting.

Members: isolation forest, one-class SVM, LOF (k=20), elliptic envelope,
and a second isolation forest seeded differently (seed + 1).  Each member
emits a binary vote; the bank output is the vote fraction, so it only
takes values k/5.
"""

import json
from dataclasses import dataclass
from typing import Optional

import numpy as np

from ..errors import UnfittedMember
from .elliptic import EllipticModel, elliptic_fit
from .iforest import IsolationForestModel, if_fit
from .lof import LofModel, lof_fit
from .ocsvm import OcsvmModel, ocsvm_fit

MEMBER_ORDER = ("if", "ocsvm", "lof", "elliptic", "if2")
SNAPSHOT_VERSION = 1


@dataclass
class EnsembleBank:
    members: dict

    def member(self, name: str):
        m = self.members.get(name)
        if m is None:
            raise UnfittedMember(name)
        return m

    def set_contamination(self, rho: float) -> None:
        """Retune the contamination-calibrated members; nu governs the SVM."""
        for name in ("if", "if2", "lof", "elliptic"):
            self.member(name).set_contamination(rho)

    @property
    def rho(self) -> float:
        return self.member("if").rho


def fit_bank(
    train_features,
    rho: float,
    nu: float = 0.25,
    seed: int = 42,
    n_trees: int = 200,
    max_samples: int = 256,
    lof_k: int = 20,
    rff_dim: int = 256,
) -> EnsembleBank:
    X = np.asarray(train_features, dtype=np.float64)
    members = {
        "if": if_fit(X, rho, n_trees=n_trees, max_samples=max_samples, seed=seed),
        "ocsvm": ocsvm_fit(X, nu=nu, feature_dim=rff_dim, seed=seed),
        "lof": lof_fit(X, k=lof_k, rho=rho),
        "elliptic": elliptic_fit(X, rho=rho),
        "if2": if_fit(X, rho, n_trees=n_trees, max_samples=max_samples, seed=seed + 1),
    }
    return EnsembleBank(members)


def member_votes(bank: EnsembleBank, z) -> dict:
    return {name: bank.member(name).vote(z) for name in MEMBER_ORDER}


def ensemble_vote(bank: EnsembleBank, z) -> float:
    """Vote fraction in {0, 0.2, 0.4, 0.6, 0.8, 1.0}; decision is > 0.5."""
    votes = member_votes(bank, z)
    return sum(votes.values()) / len(MEMBER_ORDER)


def ensemble_decision(a2: float) -> int:
    return int(a2 > 0.5)


# ---------------------------------------------------------------------------
# Snapshots: one compressed archive holds every member plus a version tag.
# ---------------------------------------------------------------------------


def save_bank(bank: EnsembleBank, path: str) -> None:
    arrays = {}
    meta = {"version": SNAPSHOT_VERSION, "members": {}}
    for name in MEMBER_ORDER:
        model = bank.member(name)
        if isinstance(model, IsolationForestModel):
            meta["members"][name] = {"kind": "iforest"}
            for key, val in model.state_dict().items():
                arrays[f"{name}.{key}"] = val
        elif isinstance(model, OcsvmModel):
            meta["members"][name] = {
                "kind": "ocsvm",
                "nu": model.nu,
                "dim": model.dim,
                "offset": model.offset,
                "score_scale": model.score_scale,
            }
            arrays[f"{name}.omega"] = model.omega
            arrays[f"{name}.phase"] = model.phase
            arrays[f"{name}.w"] = model.w
        elif isinstance(model, LofModel):
            meta["members"][name] = {
                "kind": "lof",
                "k": model.k,
                "rho": model.rho,
                "vote_threshold": model.vote_threshold,
            }
            arrays[f"{name}.train"] = model.train
            arrays[f"{name}.k_dist"] = model.k_dist
            arrays[f"{name}.lrd"] = model.lrd
            arrays[f"{name}.train_scores_desc"] = model.train_scores_desc
        elif isinstance(model, EllipticModel):
            meta["members"][name] = {
                "kind": "elliptic",
                "rho": model.rho,
                "vote_threshold": model.vote_threshold,
            }
            arrays[f"{name}.mean"] = model.mean
            arrays[f"{name}.precision"] = model.precision
            arrays[f"{name}.train_scores_desc"] = model.train_scores_desc
        else:  # pragma: no cover - closed member set
            raise TypeError(f"unknown member type {type(model)!r}")
    arrays["meta_json"] = np.frombuffer(json.dumps(meta).encode(), dtype=np.uint8)
    np.savez_compressed(path, **arrays)


def load_bank(path: str) -> EnsembleBank:
    data = np.load(path if str(path).endswith(".npz") else str(path) + ".npz")
    meta = json.loads(bytes(data["meta_json"]).decode())
    if meta.get("version") != SNAPSHOT_VERSION:
        raise ValueError(f"unsupported snapshot version {meta.get('version')}")
    members: dict[str, Optional[object]] = {}
    for name, info in meta["members"].items():
        kind = info["kind"]
        if kind == "iforest":
            state = {k.split(".", 1)[1]: data[k] for k in data.files if k.startswith(name + ".")}
            members[name] = IsolationForestModel.from_state_dict(state)
        elif kind == "ocsvm":
            members[name] = OcsvmModel(
                omega=data[f"{name}.omega"],
                phase=data[f"{name}.phase"],
                w=data[f"{name}.w"],
                offset=info["offset"],
                nu=info["nu"],
                dim=info["dim"],
                score_scale=info["score_scale"],
            )
        elif kind == "lof":
            members[name] = LofModel(
                train=data[f"{name}.train"],
                k=info["k"],
                k_dist=data[f"{name}.k_dist"],
                lrd=data[f"{name}.lrd"],
                train_scores_desc=data[f"{name}.train_scores_desc"],
                vote_threshold=info["vote_threshold"],
                rho=info["rho"],
            )
        elif kind == "elliptic":
            members[name] = EllipticModel(
                mean=data[f"{name}.mean"],
                precision=data[f"{name}.precision"],
                train_scores_desc=data[f"{name}.train_scores_desc"],
                vote_threshold=info["vote_threshold"],
                rho=info["rho"],
            )
    return EnsembleBank(members)
