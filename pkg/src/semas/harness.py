"""End-to-end experiment harness.

Wires edge pass-through, fog detection, consensus, response, RUL, the
cloud evolution loop and federated deployment over an in-process bus,
then runs the three-iteration protocol per seed for the adaptive system
and both baselines.  Everything is deterministic given (config, seed);
wall-clock latency is kept out of the deterministic summary.
"""

import json
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field, replace
from typing import Optional, Sequence

import numpy as np

from . import config, datagen
from .baselines import (
    SEQ_MEMBER_NOTE,
    STATIC_WEIGHTS,
    RuleState,
    StaticEnsemble,
    calibrate_threshold_once,
    fit_static_ensemble,
    fused_vote,
    rule_step,
)
from .bus import Bus
from .consensus import (
    AnomalyAlert,
    ConsensusPolicy,
    TemplateResponder,
    decide,
    fuse,
    severity_band,
)
from .detect import ensemble_vote, fit_bank, if_fit
from .edge import aggregate, passthrough
from .errors import ConfigError, InsufficientHistory
from .evolve import (
    GaussianPolicy,
    PageHinkley,
    PolicyState,
    PpoConfig,
    ReplayBuffer,
    Transition,
    apply_action,
    build_value_net,
    fit_surrogate,
    ppo_update,
    shapley_exact,
    validate_policy,
)
from .federate import AgentContribution, aggregate_policies
from .metrics import IterationReport, classification_metrics, mean_ci, roc_auc
from .neural import Adam
from .rul import make_sequences, rul_build, rul_predict, rul_train

SYSTEMS = ("semas", "baseline1", "baseline2")
ABLATIONS = ("no_ppo", "no_consensus", "no_federated", "no_response")
_METRIC_CHUNKS = 10  # per-iteration F1 windows handed to the validation gate


@dataclass(frozen=True)
class RunConfig:
    dataset: str = "boiler"  # profile name or CSV path
    system: str = "semas"
    seeds: tuple = config.DEFAULT_SEEDS
    iterations: int = config.DEFAULT_ITERATIONS
    ablations: tuple = ()
    out_dir: Optional[str] = None
    fog_instances: int = config.DEFAULT_FOG_INSTANCES
    shift_magnitude: float = 0.0
    tau_init: Optional[float] = None
    cloud_slowdown: float = 1.0
    bus_capacity: int = 10_000
    trace_bus: bool = False
    lstm_epochs: int = 50
    rul_epochs: int = 10
    workers: int = 1

    def validate(self) -> "RunConfig":
        if self.system not in SYSTEMS:
            raise ConfigError(f"unknown system {self.system!r}")
        if not self.seeds:
            raise ConfigError("at least one seed is required")
        if self.iterations < 1:
            raise ConfigError("iterations must be >= 1")
        bad = [a for a in self.ablations if a not in ABLATIONS]
        if bad:
            raise ConfigError(f"unknown ablation switches: {bad}")
        if self.fog_instances < 1:
            raise ConfigError("fog_instances must be >= 1")
        return self

    @classmethod
    def from_dict(cls, raw: dict) -> "RunConfig":
        known = {f for f in cls.__dataclass_fields__}
        unknown = set(raw) - known
        if unknown:
            raise ConfigError(f"unknown config keys: {sorted(unknown)}")
        raw = dict(raw)
        for key in ("seeds", "ablations"):
            if key in raw and raw[key] is not None:
                raw[key] = tuple(raw[key])
        return cls(**raw).validate()

    def canonical(self) -> dict:
        d = {k: getattr(self, k) for k in self.__dataclass_fields__}
        d["seeds"] = list(self.seeds)
        d["ablations"] = sorted(self.ablations)
        return d


@dataclass
class SeedResult:
    seed: int
    reports: list = field(default_factory=list)
    policy_trajectory: list = field(default_factory=list)
    policy_audit: list = field(default_factory=list)
    validation_log: list = field(default_factory=list)
    phase_trace: list = field(default_factory=list)
    score_arrays: list = field(default_factory=list, repr=False)
    decision_arrays: list = field(default_factory=list, repr=False)
    alerts: int = 0
    rul_calls: int = 0
    responses: int = 0
    simulated_acceptance: Optional[float] = None
    drift_state: str = "stable"
    rendered_plans: list = field(default_factory=list, repr=False)

    def final(self) -> IterationReport:
        return self.reports[-1]


@dataclass
class RunResult:
    config: RunConfig
    per_seed: dict
    notes: tuple = (SEQ_MEMBER_NOTE,)

    def seed_results(self) -> list:
        return [self.per_seed[s] for s in sorted(self.per_seed)]

    def summary(self, include_latency: bool = False) -> dict:
        metrics_over_seeds: dict = {}
        for name in ("f1", "precision", "recall", "accuracy", "roc_auc", "delta_f1"):
            vals = [getattr(r.final(), name) for r in self.seed_results()]
            mean, half = mean_ci(vals)
            metrics_over_seeds[name] = {"mean": mean, "ci95": half, "per_seed": vals}
        acc = [
            r.simulated_acceptance
            for r in self.seed_results()
            if r.simulated_acceptance is not None
        ]
        out = {
            "config": self.config.canonical(),
            "notes": list(self.notes),
            "metrics": metrics_over_seeds,
            "per_seed": {
                str(r.seed): {
                    "reports": [rep.as_dict(include_latency=include_latency) for rep in r.reports],
                    "policy_trajectory": r.policy_trajectory,
                    "alerts": r.alerts,
                    "rul_calls": r.rul_calls,
                    "responses": r.responses,
                    "drift_state": r.drift_state,
                    "validation_log": r.validation_log,
                }
                for r in self.seed_results()
            },
        }
        if acc:
            out["simulated_operator_acceptance"] = {
                "mean": float(np.mean(acc)),
                "per_seed": acc,
                "note": "simulated acceptance proxy, not a human survey result",
            }
        return out

    def timing(self) -> dict:
        return {
            str(r.seed): [rep.latency_ms for rep in r.reports] for r in self.seed_results()
        }


def derive_seeds(seed: int, names: Sequence[str]) -> dict:
    """Named child seeds, stable in the order of `names`."""
    rng = np.random.default_rng(seed)
    return {name: int(rng.integers(0, 2**31 - 1)) for name in names}


_CHILDREN = (
    "data",
    "detectors",
    "sequence_member",
    "rul",
    "policy_net",
    "value_net",
    "actions",
    "operator",
    "shift",
    "surrogate",
)


def load_dataset(cfg: RunConfig, seed: int) -> datagen.Dataset:
    if cfg.dataset in datagen.PROFILES:
        profile = datagen.PROFILES[cfg.dataset].with_seed(seed)
        return datagen.generate(profile)
    res = datagen.ingest_csv(cfg.dataset, _schema_for(cfg.dataset))
    return res.dataset


def _schema_for(path: str) -> datagen.CsvSchema:
    import csv as _csv

    with open(path, newline="") as fh:
        header = next(_csv.reader(fh))
    feats = [c for c in header if c not in ("label", "rul_hours", "fault_mode")]
    return datagen.CsvSchema(
        feature_columns=feats,
        label_column="label",
        rul_column="rul_hours" if "rul_hours" in header else None,
        fault_mode_column="fault_mode" if "fault_mode" in header else None,
    )


def _chunk_f1_window(decisions: np.ndarray, labels: np.ndarray, chunks: int = _METRIC_CHUNKS):
    out = []
    for dec, lab in zip(np.array_split(decisions, chunks), np.array_split(labels, chunks)):
        out.append(classification_metrics(dec, lab).f1)
    return out


def _rolling_window(buffer: list, seq_len: int) -> np.ndarray:
    if not buffer:
        raise ValueError("empty feature buffer")
    rows = buffer[-seq_len:]
    if len(rows) < seq_len:
        rows = [rows[0]] * (seq_len - len(rows)) + rows
    return np.stack(rows)


def simulate_operator(plan, ground_truth_label: int, true_severity: float, tolerance: int = 1) -> bool:
    """Accept when the plan's urgency band is within `tolerance` bands of
    the band implied by the ground-truth severity; false alarms are
    always rejected."""
    if ground_truth_label != 1:
        return False
    bands = ("low", "medium", "high")
    plan_band = bands.index(plan.priority.name.lower())
    truth_band = bands.index(severity_band(true_severity))
    return abs(plan_band - truth_band) <= tolerance


# ---------------------------------------------------------------------------
# per-seed pipelines
# ---------------------------------------------------------------------------


class _SeedPipeline:
    def __init__(self, cfg: RunConfig, seed: int):
        self.cfg = cfg
        self.seed = seed
        self.seeds = derive_seeds(seed, _CHILDREN)
        self.result = SeedResult(seed=seed)

        data = load_dataset(cfg, self.seeds["data"])
        train, test = datagen.stratified_split(data, 0.8)
        self.standardizer = datagen.Standardizer().fit(train.features)
        self.train = train
        self.test = test
        self.Ztr = self.standardizer.transform(train.features)
        self.Zte = self.standardizer.transform(test.features)
        self.feature_names = tuple(f"f{j}" for j in range(self.Ztr.shape[1]))
        self.half = self.Ztr.shape[1] // 2

        self.bus = Bus(capacity=cfg.bus_capacity)
        self.sub_chunk1 = self.bus.subscribe("chunk/stream1", tier="fog")
        self.sub_chunk2 = self.bus.subscribe("chunk/stream2", tier="fog")
        self.bus.subscribe("anomalies", tier="cloud")
        self.bus.subscribe("monitor/logs", tier="cloud")

        rng_shift = np.random.default_rng(self.seeds["shift"])
        self.shifted_Zte = (
            datagen.drift_features(self.Zte, cfg.shift_magnitude, rng_shift)
            if cfg.shift_magnitude > 0.0
            else self.Zte
        )

    def block_for_iteration(self, iteration: int) -> np.ndarray:
        # distribution shift lands mid-stream: iterations 2+ see it
        if self.cfg.shift_magnitude > 0.0 and iteration >= 2:
            return self.shifted_Zte
        return self.Zte

    def publish_metrics_log(self, iteration: int, report: IterationReport) -> None:
        self.bus.publish(
            "monitor/logs",
            {"kind": "iteration_metrics", "iteration": iteration, "f1": report.f1},
        )


class _SemasPipeline(_SeedPipeline):
    def __init__(self, cfg: RunConfig, seed: int):
        super().__init__(cfg, seed)
        self.ablations = set(cfg.ablations)

        self.b1 = if_fit(
            self.Ztr,
            config.INITIAL_RHO,
            n_trees=config.IF_N_TREES,
            max_samples=config.IF_MAX_SAMPLES,
            seed=self.seeds["detectors"],
        )
        self.bank = fit_bank(
            self.Ztr,
            config.INITIAL_RHO,
            nu=config.OCSVM_NU,
            seed=self.seeds["detectors"],
            n_trees=config.IF_N_TREES,
            max_samples=config.IF_MAX_SAMPLES,
            lof_k=config.LOF_K,
            rff_dim=config.OCSVM_RFF_DIM,
        )

        rng_master = np.random.default_rng(seed)
        tau0 = cfg.tau_init if cfg.tau_init is not None else self._draw_tau(rng_master)
        self.state = PolicyState(
            f1=0.0,
            precision=0.0,
            recall=0.0,
            w1=config.INITIAL_W1,
            w2=config.INITIAL_W2,
            rho=config.INITIAL_RHO,
            tau=tau0,
        )

        anom_idx = np.flatnonzero(self.train.labels == 1)
        seqs = make_sequences(self.Ztr, anom_idx, seq_len=10)
        labels = self.train.rul_hours[anom_idx]
        self.rul_model = rul_build(self.Ztr.shape[1], seed=self.seeds["rul"])
        rul_train(self.rul_model, seqs, labels, epochs=cfg.rul_epochs, seed=self.seeds["rul"])

        self.policy_net = GaussianPolicy(seed=self.seeds["policy_net"])
        self.value_net = build_value_net(seed=self.seeds["value_net"])
        self.ppo_cfg = PpoConfig()
        self.policy_opt = Adam(lr=self.ppo_cfg.lr)
        self.value_opt = Adam(lr=self.ppo_cfg.lr)
        self.buffer = ReplayBuffer()
        self.rng_actions = np.random.default_rng(self.seeds["actions"])
        self.rng_operator = np.random.default_rng(self.seeds["operator"])
        self.responder = TemplateResponder()
        self.drift = PageHinkley()

        self.instance_prev: list = [None] * cfg.fog_instances  # (state, action, logp)
        self.prev_shard_metrics: list = [None] * cfg.fog_instances
        self.prev_f1_window: Optional[list] = None
        self.operator_votes: list = []

        self._audit_policy()
        # warm the scoring kernels so iteration latencies exclude JIT cost
        self.b1.score(self.Ztr[0])
        ensemble_vote(self.bank, self.Ztr[0])

    # -- helpers ----------------------------------------------------------

    def _draw_tau(self, rng) -> float:
        """Random starting threshold anchored at the contamination quantile
        of fused training scores, so the cold start lands where the score
        distribution actually discriminates."""
        step = max(1, len(self.Ztr) // 2000)
        sub = self.Ztr[::step]
        a1s = self.b1.score_batch(sub)
        a2s = np.array([ensemble_vote(self.bank, z) for z in sub])
        fused = config.INITIAL_W1 * a1s + config.INITIAL_W2 * a2s
        anchor = float(np.quantile(fused, 1.0 - config.INITIAL_RHO))
        jitter = float(rng.uniform(-config.TAU_INIT_JITTER, config.TAU_INIT_JITTER))
        return float(np.clip(anchor + jitter, *config.TAU_RANGE))

    def _audit_policy(self) -> None:
        snap = {
            "w1": self.state.w1,
            "w2": self.state.w2,
            "rho": self.state.rho,
            "tau": self.state.tau,
        }
        self.result.policy_audit.append(snap)

    def _consensus_policy(self) -> ConsensusPolicy:
        return ConsensusPolicy(self.state.w1, self.state.w2, self.state.tau)

    # -- one iteration -----------------------------------------------------

    def run_iteration(self, iteration: int) -> IterationReport:
        cfg = self.cfg
        phases = []
        block = self.block_for_iteration(iteration)
        labels = self.test.labels
        policy = self._consensus_policy()
        no_consensus = "no_consensus" in self.ablations
        no_response = "no_response" in self.ablations

        n = len(block)
        scores = np.empty(n)
        decisions = np.empty(n, dtype=np.int64)
        latencies = np.empty(n)
        feature_buffer: list = []
        alerts_this_iter = 0

        phases += ["edge_extract", "aggregate", "detect_b1"]
        if not no_consensus:
            phases += ["detect_b2"]
        phases += ["consensus_fuse", "publish_anomalies"]
        responded = False
        rul_seen = False

        for t in range(n):
            row = block[t]
            t0 = time.perf_counter()
            self.bus.publish("chunk/stream1", passthrough(row[: self.half], t), tick=t)
            self.bus.publish("chunk/stream2", passthrough(row[self.half :], t), tick=t)
            z1 = self.sub_chunk1.poll().payload
            z2 = self.sub_chunk2.poll().payload
            fused_z = aggregate(z1, z2)

            a1 = self.b1.score(fused_z.values)
            self.bus.publish("scores/if", {"tick": t, "a1": a1}, tick=t)
            if no_consensus:
                a_fog = a1
            else:
                a2 = ensemble_vote(self.bank, fused_z.values)
                self.bus.publish("scores/lstm", {"tick": t, "a2": a2}, tick=t)
                a_fog = fuse(a1, a2, policy)
            dec = decide(a_fog, policy.tau_alert)
            latencies[t] = time.perf_counter() - t0

            scores[t] = a_fog
            decisions[t] = dec
            feature_buffer.append(fused_z.values)
            self.drift.update(a_fog)

            if dec:
                alerts_this_iter += 1
                alert = AnomalyAlert(a_fog, 1, t, severity_band(a_fog))
                self.bus.publish("anomalies", {"tick": t, "a_fog": a_fog}, tick=t)
                if not no_response:
                    plan = self.responder.generate(
                        alert, fused_z.values, {"feature_names": self.feature_names}
                    )
                    self.bus.publish("actions", {"tick": t, "action": plan.action.name}, tick=t)
                    self.result.responses += 1
                    responded = True
                    if iteration == cfg.iterations:
                        self.result.rendered_plans.append(plan.render())
                    self.operator_votes.append(
                        simulate_operator(
                            plan,
                            int(labels[t]),
                            float(self.test.severity[t]),
                        )
                    )
                window = _rolling_window(feature_buffer, self.rul_model.seq_len)
                hours = rul_predict(self.rul_model, window)
                self.result.rul_calls += 1
                rul_seen = True
                self.bus.publish(
                    "monitor/logs",
                    {"kind": "rul", "tick": t, "alert_id": alerts_this_iter, "hours": hours},
                    tick=t,
                )

        if responded:
            phases += ["response_generate"]
        if rul_seen:
            phases += ["rul_predict"]
        phases += ["drift_check"]
        self.result.alerts += alerts_this_iter

        m = classification_metrics(decisions, labels)
        auc = roc_auc(scores, labels)
        latency_ms = float(np.mean(latencies) * 1e3)
        report = IterationReport(
            iteration=iteration,
            f1=m.f1,
            precision=m.precision,
            recall=m.recall,
            accuracy=m.accuracy,
            roc_auc=auc,
            delta_f1=0.0,
            latency_ms=latency_ms,
            policy={
                "w1": self.state.w1,
                "w2": self.state.w2,
                "rho": self.state.rho,
                "tau": self.state.tau,
            },
        )
        self.result.score_arrays.append(scores)
        self.result.decision_arrays.append(decisions)

        # -- cloud phase ----------------------------------------------------
        if "no_ppo" not in self.ablations:
            phases += self._cloud_phase(iteration, decisions, labels, m, latency_ms)
        phases += ["log_metrics"]
        self.publish_metrics_log(iteration, report)
        self.result.phase_trace.append(phases)
        return report

    def _cloud_phase(self, iteration, decisions, labels, block_metrics, latency_ms) -> list:
        cfg = self.cfg
        phases = ["collect_feedback"]
        K = cfg.fog_instances
        no_fed = "no_federated" in self.ablations

        shard_dec = np.array_split(decisions, K)
        shard_lab = np.array_split(labels, K)
        shard_metrics = [classification_metrics(d, l) for d, l in zip(shard_dec, shard_lab)]
        shard_sizes = [len(d) for d in shard_dec]

        # complete transitions begun at the previous iteration
        for k in range(K):
            prev = self.instance_prev[k]
            if prev is not None:
                prev_state, action, logp = prev
                pm = self.prev_shard_metrics[k]
                r = (
                    self.ppo_cfg.alpha * shard_metrics[k].f1
                    - self.ppo_cfg.beta
                    * abs(
                        (shard_metrics[k].precision - pm.precision)
                        - (shard_metrics[k].recall - pm.recall)
                    )
                    - self.ppo_cfg.gamma_lat * latency_ms
                )
                new_state = self._instance_state(shard_metrics[k])
                self.buffer.push(
                    Transition(
                        prev_state.to_vector(),
                        action.pre_squash,
                        r,
                        new_state.to_vector(),
                        logp,
                        done=(iteration == cfg.iterations),
                    )
                )

        if len(self.buffer):
            ppo_start = time.perf_counter()
            ppo_update(
                self.policy_net,
                self.value_net,
                self.buffer.recent(),
                self.ppo_cfg,
                self.policy_opt,
                self.value_opt,
                seed=self.seeds["actions"],
            )
            if cfg.cloud_slowdown > 1.0:
                time.sleep((time.perf_counter() - ppo_start) * (cfg.cloud_slowdown - 1.0))
            phases += ["ppo_update"]

        # propose, validate, aggregate, deploy
        f1_window = _chunk_f1_window(decisions, labels)
        surrogate = fit_surrogate(
            self.block_for_iteration(iteration),
            decisions,
            max_features=8,
            seed=self.seeds["surrogate"],
        )
        probe = self.block_for_iteration(iteration)[int(np.argmax(self.result.score_arrays[-1]))]
        shap_report = shapley_exact(
            surrogate.predict_sub, surrogate.baseline, probe[surrogate.feature_idx]
        )
        phases += ["shap_validate"]

        contributions = []
        candidates = []
        for k in range(K):
            inst_state = self._instance_state(shard_metrics[k])
            action = self.policy_net.act(inst_state.to_vector(), self.rng_actions)
            logp = float(
                self.policy_net.log_prob(
                    inst_state.to_vector()[None, :], action.pre_squash[None, :]
                )[0]
            )
            candidate = apply_action(inst_state, action).tunables
            windows = (
                [self.prev_f1_window, f1_window] if self.prev_f1_window is not None else [f1_window]
            )
            try:
                verdict = validate_policy(
                    candidate, windows, shapley_report=shap_report, drift_state=self.drift.state
                )
                accepted, reason = verdict.accepted, verdict.reason
            except InsufficientHistory:
                accepted, reason = True, "no_history"
            self.result.validation_log.append(
                {"iteration": iteration, "instance": k, "accepted": accepted, "reason": reason}
            )
            self.instance_prev[k] = (inst_state, action, logp)
            if accepted:
                contributions.append(
                    AgentContribution(f"fog{k}", shard_sizes[k], candidate.as_vector())
                )
                candidates.append(candidate)
            if no_fed:
                break  # single global candidate, no aggregation round

        deployed = None
        if no_fed:
            if candidates:
                deployed = candidates[0]
                self.bus.publish(
                    "policy/updates",
                    {"iteration": iteration, "tunables": deployed.as_dict(), "federated": False},
                )
                phases += ["publish_policy"]
        elif contributions:
            for c in contributions:
                self.bus.publish(
                    "policy/updates",
                    {
                        "iteration": iteration,
                        "agent": c.agent_id,
                        "n_samples": c.n_samples,
                        "theta": list(c.theta),
                    },
                )
            phases += ["publish_policy"]
            deployed = aggregate_policies(contributions)
            phases += ["federated_aggregate"]

        if deployed is not None:
            self.state = replace(
                self.state,
                f1=block_metrics.f1,
                precision=block_metrics.precision,
                recall=block_metrics.recall,
                w1=deployed.w1,
                w2=deployed.w2,
                rho=deployed.rho,
                tau=deployed.tau,
            )
            self.bank.set_contamination(deployed.rho)
            phases += ["apply_updates"]
        else:
            self.state = replace(
                self.state,
                f1=block_metrics.f1,
                precision=block_metrics.precision,
                recall=block_metrics.recall,
            )
        self._audit_policy()

        self.prev_shard_metrics = shard_metrics
        self.prev_f1_window = f1_window
        return phases

    def _instance_state(self, m) -> PolicyState:
        return PolicyState(
            f1=m.f1,
            precision=m.precision,
            recall=m.recall,
            w1=self.state.w1,
            w2=self.state.w2,
            rho=self.state.rho,
            tau=self.state.tau,
        )

    def run(self) -> SeedResult:
        for iteration in range(1, self.cfg.iterations + 1):
            report = self.run_iteration(iteration)
            self.result.reports.append(report)
            self.result.policy_trajectory.append(
                {
                    "iteration": iteration,
                    "w1": report.policy["w1"],
                    "w2": report.policy["w2"],
                    "rho": report.policy["rho"],
                    "tau": report.policy["tau"],
                    "f1": report.f1,
                }
            )
        first = self.result.reports[0].f1
        for rep in self.result.reports:
            rep.delta_f1 = rep.f1 - first
        if self.operator_votes:
            survey = self.operator_votes
            if len(survey) > 20:
                idx = self.rng_operator.choice(len(survey), size=20, replace=False)
                survey = [survey[i] for i in sorted(idx)]
            self.result.simulated_acceptance = float(np.mean(survey))
        self.result.drift_state = self.drift.state
        self.bus.close()
        return self.result


class _BaselinePipeline(_SeedPipeline):
    """Shared machinery for both baselines (members, rolling window)."""

    def __init__(self, cfg: RunConfig, seed: int):
        super().__init__(cfg, seed)
        self.ensemble: StaticEnsemble = fit_static_ensemble(
            self.Ztr,
            self.train.labels,
            rho=config.INITIAL_RHO,
            nu=config.OCSVM_NU,
            seq_len=10,
            seed=self.seeds["detectors"],
            lstm_epochs=cfg.lstm_epochs,
        )
        # kernel warmup as for the adaptive system
        self.ensemble.iforest.score(self.Ztr[0])

    def _stream(self, block, score_fn):
        n = len(block)
        scores = np.empty(n)
        latencies = np.empty(n)
        feature_buffer: list = []
        for t in range(n):
            row = block[t]
            t0 = time.perf_counter()
            self.bus.publish("chunk/stream1", passthrough(row[: self.half], t), tick=t)
            self.bus.publish("chunk/stream2", passthrough(row[self.half :], t), tick=t)
            z1 = self.sub_chunk1.poll().payload
            z2 = self.sub_chunk2.poll().payload
            fused_z = aggregate(z1, z2)
            feature_buffer.append(fused_z.values)
            window = _rolling_window(feature_buffer, self.ensemble.seq_len)
            scores[t] = score_fn(fused_z.values, window)
            latencies[t] = time.perf_counter() - t0
        return scores, float(np.mean(latencies) * 1e3)

    def _report(self, iteration, scores, decisions, latency_ms, policy_snap) -> IterationReport:
        m = classification_metrics(decisions, self.test.labels)
        report = IterationReport(
            iteration=iteration,
            f1=m.f1,
            precision=m.precision,
            recall=m.recall,
            accuracy=m.accuracy,
            roc_auc=roc_auc(scores, self.test.labels),
            delta_f1=0.0,
            latency_ms=latency_ms,
            policy=policy_snap,
        )
        self.result.score_arrays.append(scores)
        self.result.decision_arrays.append(np.asarray(decisions))
        return report

    def _finish(self) -> SeedResult:
        first = self.result.reports[0].f1
        for rep in self.result.reports:
            rep.delta_f1 = rep.f1 - first
        self.bus.close()
        return self.result


class _Baseline1Pipeline(_BaselinePipeline):
    def run(self) -> SeedResult:
        for iteration in range(1, self.cfg.iterations + 1):
            block = self.block_for_iteration(iteration)
            scores, latency_ms = self._stream(
                block, lambda z, w: self.ensemble.score(z, w)
            )
            decisions = (scores > self.ensemble.tau).astype(np.int64)
            report = self._report(
                iteration, scores, decisions, latency_ms, {"tau": self.ensemble.tau}
            )
            self.result.reports.append(report)
            self.result.policy_trajectory.append(
                {"iteration": iteration, "tau": self.ensemble.tau, "f1": report.f1}
            )
            self.publish_metrics_log(iteration, report)
            self.result.phase_trace.append(
                ["edge_extract", "aggregate", "detect_members", "static_fuse", "log_metrics"]
            )
        return self._finish()


class _Baseline2Pipeline(_BaselinePipeline):
    def __init__(self, cfg: RunConfig, seed: int):
        super().__init__(cfg, seed)
        # the rule-based system fuses binary votes, so its one-time threshold
        # calibration runs on vote-fused validation scores
        val = self.ensemble.val_idx
        seqs = make_sequences(self.Ztr, val, self.ensemble.seq_len)
        fused = np.array(
            [
                fused_vote(self.ensemble.member_votes(self.Ztr[i], seqs[j]), STATIC_WEIGHTS)
                for j, i in enumerate(val)
            ]
        )
        tau0 = calibrate_threshold_once(fused, self.train.labels[val])
        self.rule_state = RuleState(rho=config.INITIAL_RHO, tau=tau0)

    def run(self) -> SeedResult:
        for iteration in range(1, self.cfg.iterations + 1):
            block = self.block_for_iteration(iteration)
            votes_log: list = []

            def score_fn(z, w):
                votes = self.ensemble.member_votes(z, w)
                votes_log.append(votes)
                return fused_vote(votes, self.rule_state.weights)

            scores, latency_ms = self._stream(block, score_fn)
            member_votes = np.asarray(votes_log, dtype=np.int64)
            decisions = (scores > self.rule_state.tau).astype(np.int64)
            report = self._report(
                iteration,
                scores,
                decisions,
                latency_ms,
                {
                    "rho": self.rule_state.rho,
                    "tau": self.rule_state.tau,
                    "weights": list(self.rule_state.weights),
                },
            )
            self.result.reports.append(report)
            self.result.policy_trajectory.append(
                {
                    "iteration": iteration,
                    "rho": self.rule_state.rho,
                    "tau": self.rule_state.tau,
                    "f1": report.f1,
                }
            )
            self.publish_metrics_log(iteration, report)
            self.result.phase_trace.append(
                [
                    "edge_extract",
                    "aggregate",
                    "detect_members",
                    "vote_fuse",
                    "rule_updates",
                    "log_metrics",
                ]
            )

            member_f1s = [
                classification_metrics(member_votes[:, j], self.test.labels).f1 for j in range(3)
            ]
            self.rule_state = rule_step(
                self.rule_state, report.f1, report.precision, report.recall, member_f1s
            )
            self.ensemble.iforest.set_contamination(self.rule_state.rho)
            self.result.policy_audit.append(
                {
                    "rho": self.rule_state.rho,
                    "tau": self.rule_state.tau,
                    "weights": list(self.rule_state.weights),
                }
            )
        return self._finish()


_PIPELINES = {
    "semas": _SemasPipeline,
    "baseline1": _Baseline1Pipeline,
    "baseline2": _Baseline2Pipeline,
}


def run_seed(cfg: RunConfig, seed: int) -> SeedResult:
    return _PIPELINES[cfg.system](cfg, seed).run()


def run_experiment(cfg: RunConfig) -> RunResult:
    cfg.validate()
    seeds = list(cfg.seeds)
    if cfg.workers > 1:
        with ThreadPoolExecutor(max_workers=cfg.workers) as pool:
            results = list(pool.map(lambda s: run_seed(cfg, s), seeds))
    else:
        results = [run_seed(cfg, s) for s in seeds]
    return RunResult(cfg, {r.seed: r for r in results})


def run_ablation_suite(base_cfg: RunConfig) -> dict:
    """Full system plus one run per ablation switch, all on the same seeds."""
    base = replace(base_cfg, system="semas", ablations=())
    out = {"full": run_experiment(base)}
    for switch in ABLATIONS:
        out[switch] = run_experiment(replace(base, ablations=(switch,)))
    return out


def ablation_table(results: dict) -> list:
    full_f1 = results["full"].summary()["metrics"]["f1"]["mean"]
    rows = []
    for name, res in results.items():
        s = res.summary()["metrics"]
        f1 = s["f1"]["mean"]
        impact = 0.0 if name == "full" else (f1 - full_f1) / full_f1 if full_f1 else 0.0
        rows.append(
            {
                "configuration": name,
                "f1": f1,
                "impact_pct": 100.0 * impact,
                "precision": s["precision"]["mean"],
            }
        )
    return rows
