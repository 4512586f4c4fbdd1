"""Experiment orchestration: training runs, metrics, ablations, outputs.

A run is one (config, seed) training loop: collect an episode, train the
goal-conditioned table and (for the adaptive methods) the skill value
model, and periodically evaluate greedy success on the desired goal.
Everything is driven by one seeded generator per seed, so a run's outputs
are byte-reproducible.
"""

import csv
import io
import json
import math
import os
from dataclasses import asdict, dataclass, field, replace

import numpy as np

from .distribution import TemperatureConfig, skill_distribution, sample_skill
from .explorer import (
    Explorer,
    GoalConditionedValueTable,
    METHODS,
    ReplayBuffer,
    SubGoalSelector,
    relabel_sweep,
    train_gc_policy,
)
from .history import (
    HistoryContext,
    MaxEntropyTracker,
    entropy_from_counts,
    r_info,
)
from .maze import MazeSpec, achieved_goal, load_builtin, reset, step
from .skills import SkillSet, sample_action, skill_posterior
from .svf import (
    AdamState,
    ContextBatch,
    SkillValueModel,
    encode_context,
    gamma_hat,
    pack_sequences,
    train_step,
    y_high,
)

__all__ = [
    "ExperimentConfig",
    "MetricsRecord",
    "RunResult",
    "TrainedArtifacts",
    "ablation_variants",
    "build_high_batch",
    "build_low_batch",
    "emit_outputs",
    "empirical_entropy_metric",
    "evaluate_generalization",
    "first_success_step",
    "run_ablation",
    "run_experiment",
    "run_single_seed",
]

POLICY_KINDS = ("gc", "uniform-gc", "skill-adaptive", "skill-uniform")


@dataclass(frozen=True)
class ExperimentConfig:
    method: str = "GEASD-L"
    maze: str = "spiral"
    seeds: tuple[int, ...] = (0, 1, 2, 3, 4)
    total_steps: int = 200_000
    episode_len: int = 150
    context_horizon: int = 10
    skill_horizon: int = 2
    skill_stochasticity: float = 0.05
    temp_mode: str = "dynamic"
    static_t: float | None = None
    t_min: float = 0.01
    include_actions: bool = True
    data_scope: str = "all"
    hidden_size: int = 32
    svf_lr: float = 1e-3
    svf_batch: int = 64
    svf_update_every: int = 4
    svf_optimizer: str = "adam"
    clip_ratio: float = 0.5
    rho_clip: float = 5.0
    gc_lr: float = 1.0
    gc_epsilon: float = 0.1
    gc_discount: float = 0.98
    gc_batch: int = 64
    gc_update_every: int = 4
    gc_sweep_goals: int | None = None  # None sweeps every achieved goal
    relabel_ratio: float = 0.8
    subgoal_b: float = -3.0
    subgoal_candidates: int = 100
    subgoal_kde: bool = False
    buffer_capacity: int = 5_000_000
    eval_every: int = 1000
    eval_episodes: int = 5

    def validate(self) -> None:
        if self.method not in METHODS:
            raise ValueError(f"method must be one of {METHODS}")
        if not self.seeds:
            raise ValueError("at least one seed is required")
        if not self.context_horizon > self.skill_horizon >= 1:
            raise ValueError("need context_horizon > skill_horizon >= 1")
        if self.data_scope not in ("all", "skill-only"):
            raise ValueError("data_scope must be 'all' or 'skill-only'")
        if self.svf_optimizer not in ("sgd", "adam"):
            raise ValueError("svf_optimizer must be 'sgd' or 'adam'")
        if self.temp_mode == "static" and self.static_t is None:
            raise ValueError("static temperature mode needs static_t")
        TemperatureConfig(self.temp_mode, self.static_t, self.t_min)

    @classmethod
    def desk(cls, **overrides) -> "ExperimentConfig":
        """Small-budget preset used by CI and the acceptance suite."""
        base = dict(seeds=(0, 1, 2), total_steps=20_000, hidden_size=32,
                    eval_every=1000)
        base.update(overrides)
        return cls(**base)

    @classmethod
    def transfer(cls, **overrides) -> "ExperimentConfig":
        """Desk preset with a doubled budget and denser value-model
        updates; used to train artifacts for cross-maze evaluation, where
        the skill value functions need to converge past coordinate
        shortcuts onto wall/action structure."""
        base = dict(total_steps=40_000, svf_update_every=2)
        base.update(overrides)
        return cls.desk(**base)

    @classmethod
    def paper(cls, **overrides) -> "ExperimentConfig":
        """Full-budget preset (200k steps, 5 seeds)."""
        return cls(**overrides)

    def to_dict(self) -> dict:
        d = asdict(self)
        d["seeds"] = list(self.seeds)
        return d

    @classmethod
    def from_dict(cls, d: dict) -> "ExperimentConfig":
        known = {f for f in cls.__dataclass_fields__}
        unknown = set(d) - known
        if unknown:
            raise ValueError(f"unknown config fields: {sorted(unknown)}")
        d = dict(d)
        if "seeds" in d:
            d["seeds"] = tuple(int(s) for s in d["seeds"])
        return cls(**d)

    def temperature_config(self) -> TemperatureConfig:
        mode = "uniform" if self.method == "GEAPS" else self.temp_mode
        return TemperatureConfig(mode, self.static_t, self.t_min)


@dataclass(frozen=True)
class MetricsRecord:
    step: int
    seed: int
    success_rate: float
    entropy: float
    max_occ: float
    avg_occ: float


@dataclass
class TrainedArtifacts:
    """Frozen outputs of one seed's run, enough to evaluate elsewhere."""

    config: ExperimentConfig
    seed: int
    model: SkillValueModel
    table: GoalConditionedValueTable

    def save(self, out_dir: str) -> None:
        os.makedirs(out_dir, exist_ok=True)
        self.model.save(os.path.join(out_dir, "svf.npz"))
        cells, goals, actions, values = [], [], [], []
        for (cell, goal, action), v in sorted(self.table.q.items()):
            cells.append(cell)
            goals.append(goal)
            actions.append(action)
            values.append(v)
        np.savez(
            os.path.join(out_dir, "gc_table.npz"),
            cells=np.array(cells, dtype=np.int64).reshape(-1, 2),
            goals=np.array(goals, dtype=np.int64).reshape(-1, 2),
            actions=np.array(actions, dtype=np.int64),
            values=np.array(values, dtype=np.float64),
            discount=self.table.discount,
            epsilon=self.table.epsilon,
            learning_rate=self.table.learning_rate,
        )
        with open(os.path.join(out_dir, "config.json"), "w") as fh:
            json.dump({"seed": self.seed, "config": self.config.to_dict()},
                      fh, indent=2, sort_keys=True)
            fh.write("\n")

    @classmethod
    def load(cls, out_dir: str) -> "TrainedArtifacts":
        with open(os.path.join(out_dir, "config.json")) as fh:
            meta = json.load(fh)
        config = ExperimentConfig.from_dict(meta["config"])
        model = SkillValueModel.load(os.path.join(out_dir, "svf.npz"))
        with np.load(os.path.join(out_dir, "gc_table.npz")) as data:
            table = GoalConditionedValueTable(
                discount=float(data["discount"]),
                epsilon=float(data["epsilon"]),
                learning_rate=float(data["learning_rate"]),
            )
            for cell, goal, action, value in zip(
                    data["cells"], data["goals"], data["actions"], data["values"]):
                key = (tuple(int(v) for v in cell),
                       tuple(int(v) for v in goal), int(action))
                table.q[key] = float(value)
        return cls(config=config, seed=int(meta["seed"]), model=model,
                   table=table)


@dataclass
class RunResult:
    config: ExperimentConfig
    records: list[MetricsRecord] = field(default_factory=list)
    artifacts: dict[int, TrainedArtifacts] = field(default_factory=dict)

    def seed_records(self, seed: int) -> list[MetricsRecord]:
        return [r for r in self.records if r.seed == seed]


# ---------------------------------------------------------------------------
# Context reconstruction and batch building


def context_at(buffer: ReplayBuffer, episode_id: int, t: int,
               capacity: int) -> HistoryContext:
    """Rebuild the context window ending at time t of one episode."""
    start, end = buffer.episode_bounds(episode_id)
    n = end - start
    if not 0 <= t <= n:
        raise IndexError(f"step {t} outside episode of length {n}")
    lo = max(0, t - capacity + 1)
    entries = []
    for j in range(lo, t):
        rec = buffer.record(start + j)
        entries.append((rec.state, rec.action))
    newest = buffer.record(start + t).state if t < n \
        else buffer.record(end - 1).next_state
    entries.append((newest, None))
    return HistoryContext(capacity, entries, t)


def _clip_rows(rows: np.ndarray, clip_ratio: float, rng: np.random.Generator):
    """Randomly truncate a context to a suffix with probability clip_ratio."""
    if rng.random() >= clip_ratio or rows.shape[0] <= 1:
        return rows, False
    keep = int(rng.integers(1, rows.shape[0] + 1))
    return rows[-keep:], keep < rows.shape[0]


def build_low_batch(model: SkillValueModel, buffer: ReplayBuffer,
                    skills: SkillSet, config: ExperimentConfig,
                    rng: np.random.Generator) -> ContextBatch | None:
    """Low-level target batch: one-step entropy change plus bootstrap, with
    importance weights against the recorded behavior probabilities.

    The bootstrap values for the whole batch come from a single batched
    forward pass over the next-step contexts.
    """
    if config.data_scope == "skill-only":
        pool = buffer.skill_indices
        if not pool:
            return None
        idx = [pool[int(i)] for i in rng.integers(0, len(pool),
                                                  size=config.svf_batch)]
    else:
        if len(buffer) == 0:
            return None
        idx = [int(i) for i in buffer.sample_indices(rng, config.svf_batch)]
    ghat = gamma_hat(config.skill_horizon)
    C = config.context_horizon
    rows_list, next_rows, zs, rewards, weights, truncated, boot = \
        [], [], [], [], [], [], []
    for i in idx:
        rec = buffer.record(i)
        start, end = buffer.episode_bounds(rec.episode_id)
        t = rec.step_id
        h_t = context_at(buffer, rec.episode_id, t, C)
        h_t1 = context_at(buffer, rec.episode_id, t + 1, C)
        post = skill_posterior(skills, rec.state, rec.action)
        z = sample_skill(post, rng)
        rewards.append(r_info(h_t, h_t1))
        # bootstrap is dropped at episode boundaries; episodes always run
        # exactly episode_len steps, so the cutoff is known mid-episode too
        boot.append(0.0 if t + 1 == config.episode_len else ghat)
        sigma = skills.skills[z].action_probs()[rec.action]
        weights.append(min(sigma / rec.behavior_prob, config.rho_clip))
        zs.append(z)
        rows = encode_context(h_t, config.include_actions, model.coord_scale)
        rows, was_cut = _clip_rows(rows, config.clip_ratio, rng)
        rows_list.append(rows)
        next_rows.append(encode_context(h_t1, config.include_actions,
                                        model.coord_scale)[-model.max_context:])
        truncated.append(was_cut)
    n_inputs, n_mask = pack_sequences(next_rows)
    next_values, _ = model.forward_batch(n_inputs, n_mask)
    zs = np.array(zs)
    targets = np.array(rewards) + np.array(boot) * \
        next_values[np.arange(len(zs)), zs]
    inputs, mask = pack_sequences(rows_list)
    return ContextBatch(
        inputs=inputs, mask=mask, z_index=zs,
        targets=targets, weights=np.array(weights),
        scheme="low", data_scope=config.data_scope,
        truncated=np.array(truncated),
    )


def build_high_batch(model: SkillValueModel, buffer: ReplayBuffer,
                     config: ExperimentConfig,
                     rng: np.random.Generator) -> ContextBatch | None:
    """High-level target batch from skill-start records with a full k-step
    completion inside their episode; later-truncated starts are skipped."""
    k = config.skill_horizon
    C = config.context_horizon
    pool = buffer.eligible_skill_starts(k)
    if not pool:
        return None
    idx = [pool[int(i)] for i in rng.integers(0, len(pool),
                                              size=config.svf_batch)]
    rows_list, zs, targets, truncated = [], [], [], []
    for i in idx:
        rec = buffer.record(i)
        t = rec.step_id
        path = [context_at(buffer, rec.episode_id, t + j, C)
                for j in range(k + 1)]
        targets.append(y_high(path))
        zs.append(rec.skill)
        rows = encode_context(path[0], config.include_actions,
                              model.coord_scale)
        rows, was_cut = _clip_rows(rows, config.clip_ratio, rng)
        rows_list.append(rows)
        truncated.append(was_cut)
    inputs, mask = pack_sequences(rows_list)
    return ContextBatch(
        inputs=inputs, mask=mask, z_index=np.array(zs),
        targets=np.array(targets), weights=np.ones(len(zs)),
        scheme="high", data_scope="skill-only",
        truncated=np.array(truncated),
    )


# ---------------------------------------------------------------------------
# Metrics


def empirical_entropy_metric(buffer: ReplayBuffer, mode: str = "histogram",
                             spec: MazeSpec | None = None,
                             rng: np.random.Generator | None = None,
                             samples: int = 1000, bandwidth: float = 0.1,
                             fit_cap: int = 10_000) -> float:
    """Entropy of the buffered achieved goals.

    histogram: exact entropy of the cell histogram. kde: Monte Carlo
    estimate from a Gaussian-kernel density over goals normalized to
    [0, 1]^2, reported on the discrete scale by subtracting the kernel's
    own differential entropy (so well-separated clusters agree with the
    histogram value).
    """
    if len(buffer) == 0:
        raise ValueError("empty buffer")
    if mode == "histogram":
        return entropy_from_counts(buffer.goal_counts.values())
    if mode != "kde":
        raise ValueError("mode must be 'histogram' or 'kde'")
    if spec is None:
        raise ValueError("kde mode needs the maze spec for normalization")
    rng = rng if rng is not None else np.random.default_rng(0)
    sx = max(spec.width - 1, 1)
    sy = max(spec.height - 1, 1)
    goals = np.array(list(buffer.achieved_goals()), dtype=float) / (sx, sy)
    if goals.shape[0] > fit_cap:
        goals = goals[rng.choice(goals.shape[0], size=fit_cap, replace=False)]
    n = goals.shape[0]
    picks = rng.integers(0, n, size=samples)
    draws = goals[picks] + rng.normal(0.0, bandwidth, size=(samples, 2))
    d2 = ((draws[:, None, :] - goals[None, :, :]) ** 2).sum(axis=2)
    h2 = bandwidth ** 2
    dens = np.exp(-d2 / (2.0 * h2)).mean(axis=1) / (2.0 * math.pi * h2)
    mc = float(-np.log(dens).mean())
    return mc - math.log(2.0 * math.pi * math.e * h2)


def _greedy_rollout(spec: MazeSpec, table: GoalConditionedValueTable,
                    goal, episode_len: int):
    s = reset(spec)
    visited = {s.cell}
    for _ in range(episode_len):
        a = table.greedy_action(s.cell, goal)
        s = step(spec, s, a)
        visited.add(s.cell)
        if achieved_goal(s) == goal:
            return True, visited
    return False, visited


def _evaluate_training(spec: MazeSpec, table: GoalConditionedValueTable,
                       config: ExperimentConfig):
    goals = sorted(spec.desired_goals)
    succ, occ = [], []
    for e in range(config.eval_episodes):
        goal = goals[e % len(goals)]
        ok, visited = _greedy_rollout(spec, table, goal, config.episode_len)
        succ.append(1.0 if ok else 0.0)
        occ.append(len(visited) / spec.n_cells())
    return float(np.mean(succ)), float(np.max(occ)), float(np.mean(occ))


def first_success_step(records, sentinel: int | None = None) -> int | None:
    """Step of the first evaluation with positive success rate."""
    for r in sorted(records, key=lambda r: r.step):
        if r.success_rate > 0.0:
            return r.step
    return sentinel


# ---------------------------------------------------------------------------
# Training loop


def run_single_seed(config: ExperimentConfig, seed: int):
    """Train one seed; returns (metrics records, trained artifacts)."""
    config.validate()
    rng = np.random.default_rng(seed)
    spec = load_builtin(config.maze)
    skills = SkillSet.default(config.skill_stochasticity, config.skill_horizon)
    model = SkillValueModel(
        hidden_size=config.hidden_size, n_skills=len(skills),
        max_context=config.context_horizon,
        include_actions=config.include_actions,
        coord_scale=float(max(spec.width, spec.height)), rng=rng,
    )
    table = GoalConditionedValueTable(
        discount=config.gc_discount, epsilon=config.gc_epsilon,
        learning_rate=config.gc_lr,
    )
    buffer = ReplayBuffer(config.buffer_capacity)
    tracker = MaxEntropyTracker()
    selector = SubGoalSelector(
        b=config.subgoal_b, candidate_count=config.subgoal_candidates,
        use_kde=config.subgoal_kde,
    )
    explorer = Explorer(
        spec=spec, skills=skills, gc=table, selector=selector,
        temp_cfg=config.temperature_config(), buffer=buffer, tracker=tracker,
        model=model, context_horizon=config.context_horizon,
        episode_len=config.episode_len,
    )
    adam = AdamState() if config.svf_optimizer == "adam" else None
    trains_svf = config.method in ("GEASD-L", "GEASD-H")
    scheme = "low" if config.method == "GEASD-L" else "high"

    records: list[MetricsRecord] = []
    steps = 0
    clock = {"t": 0}

    def on_step(_t):
        # learners run at their own cadence while the episode is collected
        clock["t"] += 1
        if clock["t"] % config.gc_update_every == 0:
            train_gc_policy(table, buffer, rng, config.gc_batch,
                            config.relabel_ratio)
        if trains_svf and clock["t"] % config.svf_update_every == 0:
            if scheme == "low":
                batch = build_low_batch(model, buffer, skills, config, rng)
            else:
                batch = build_high_batch(model, buffer, config, rng)
            if batch is not None:
                train_step(model, batch, scheme=scheme,
                           step_size=config.svf_lr, optimizer=adam)

    next_eval = config.eval_every
    while steps < config.total_steps:
        trace = explorer.run_episode(config.method, rng, on_step=on_step)
        if config.gc_sweep_goals is None or config.gc_sweep_goals > 0:
            relabel_sweep(table, buffer, trace.episode_id, rng,
                          config.gc_sweep_goals)
        steps += config.episode_len
        if steps >= next_eval:
            sr, mx, av = _evaluate_training(spec, table, config)
            ent = empirical_entropy_metric(buffer, "histogram")
            records.append(MetricsRecord(
                step=steps, seed=seed, success_rate=sr, entropy=ent,
                max_occ=mx, avg_occ=av,
            ))
            while next_eval <= steps:
                next_eval += config.eval_every
    artifacts = TrainedArtifacts(config=config, seed=seed, model=model,
                                 table=table)
    return records, artifacts


def run_experiment(config: ExperimentConfig,
                   out_dir: str | None = None) -> RunResult:
    """Run every seed of the config; optionally write CSV outputs."""
    config.validate()
    result = RunResult(config=config)
    for seed in config.seeds:
        records, artifacts = run_single_seed(config, seed)
        result.records.extend(records)
        result.artifacts[seed] = artifacts
    if out_dir is not None:
        emit_outputs(result, out_dir)
    return result


# ---------------------------------------------------------------------------
# Generalization evaluation


def evaluate_generalization(artifacts: TrainedArtifacts, target: MazeSpec,
                            policy_kind: str, episodes: int = 50,
                            t_static: float = 0.01,
                            rng: np.random.Generator | None = None,
                            episode_len: int | None = None):
    """Run frozen-policy episodes on a target maze; no learning happens.

    Returns (success rate, max occupancy, avg occupancy) over the episodes,
    occupancy being the fraction of distinct cells visited.
    """
    if policy_kind not in POLICY_KINDS:
        raise ValueError(f"policy_kind must be one of {POLICY_KINDS}")
    rng = rng if rng is not None else np.random.default_rng(0)
    config = artifacts.config
    K = episode_len if episode_len is not None else config.episode_len
    k = config.skill_horizon
    skills = SkillSet.default(config.skill_stochasticity, k)
    goals = sorted(target.desired_goals)
    succ, occ = [], []
    for e in range(episodes):
        goal = goals[e % len(goals)]
        s = reset(target)
        ctx = HistoryContext.start(config.context_horizon, s)
        visited = {s.cell}
        success = False
        z = None
        for t in range(K):
            if policy_kind == "gc":
                a = artifacts.table.greedy_action(s.cell, goal)
            elif policy_kind == "uniform-gc":
                a = int(rng.integers(0, 4))
            else:
                if t % k == 0:
                    if policy_kind == "skill-adaptive":
                        values = artifacts.model.forward_context(ctx)
                        dist = skill_distribution(values, t_static)
                    else:
                        dist = np.full(len(skills), 1.0 / len(skills))
                    z = sample_skill(dist, rng)
                a, _ = sample_action(skills.skills[z], s, rng)
            s = step(target, s, a)
            ctx = ctx.advanced(a, s)
            visited.add(s.cell)
            if achieved_goal(s) == goal:
                success = True
                break
        succ.append(1.0 if success else 0.0)
        occ.append(len(visited) / target.n_cells())
    return float(np.mean(succ)), float(np.max(occ)), float(np.mean(occ))


# ---------------------------------------------------------------------------
# Ablations


def ablation_variants(suite: str, base: ExperimentConfig):
    """Expand a base config along one ablation axis."""
    if suite == "temperature":
        variants = {"dynamic": replace(base, temp_mode="dynamic", static_t=None)}
        for t in (0.01, 0.1, 1.0):
            variants[f"static_{t:g}"] = replace(base, temp_mode="static",
                                                static_t=t)
        return variants
    if suite == "action-history":
        return {
            "with_actions": replace(base, include_actions=True),
            "state_only": replace(base, include_actions=False),
        }
    if suite == "data-scope":
        return {
            "all_data": replace(base, data_scope="all"),
            "skill_data": replace(base, data_scope="skill-only"),
        }
    if suite == "context-horizon":
        return {f"C{c}": replace(base, context_horizon=c) for c in (3, 5, 10)}
    raise ValueError(f"unknown ablation suite {suite!r}")


def run_ablation(suite: str, base: ExperimentConfig,
                 out_dir: str | None = None) -> dict[str, RunResult]:
    results = {}
    for label, cfg in ablation_variants(suite, base).items():
        sub = os.path.join(out_dir, label) if out_dir is not None else None
        results[label] = run_experiment(cfg, sub)
    return results


# ---------------------------------------------------------------------------
# Output emission


def _fmt(v) -> str:
    if isinstance(v, float):
        return repr(v)  # shortest representation that parses back exactly
    return str(v)


def _write_csv(path: str, header: list[str], rows: list[list]) -> None:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(header)
    for row in rows:
        writer.writerow([_fmt(v) for v in row])
    with open(path, "w", newline="") as fh:
        fh.write(buf.getvalue())


METRIC_FIELDS = ("success_rate", "entropy", "max_occ", "avg_occ")


def emit_outputs(result: RunResult, out_dir: str) -> None:
    """Write per-seed CSVs, an aggregate CSV, and per-metric plot data.

    A run with no evaluation points still writes header-only CSVs.
    """
    os.makedirs(out_dir, exist_ok=True)
    for seed in result.config.seeds:
        rows = [[r.step, r.seed, r.success_rate, r.entropy, r.max_occ,
                 r.avg_occ] for r in result.seed_records(seed)]
        _write_csv(
            os.path.join(out_dir, f"run_seed{seed}.csv"),
            ["step", "seed", "success_rate", "entropy", "max_occ", "avg_occ"],
            rows,
        )
    if not result.records:
        _write_csv(os.path.join(out_dir, "aggregate.csv"),
                   ["step"] + [f"{m}_{s}" for m in METRIC_FIELDS
                               for s in ("mean", "std")], [])
        return
    steps = sorted({r.step for r in result.records})
    agg_rows = []
    for s in steps:
        at = [r for r in result.records if r.step == s]
        row = [s]
        for m in METRIC_FIELDS:
            vals = np.array([getattr(r, m) for r in at])
            row.extend([float(vals.mean()), float(vals.std())])
        agg_rows.append(row)
    _write_csv(os.path.join(out_dir, "aggregate.csv"),
               ["step"] + [f"{m}_{s}" for m in METRIC_FIELDS
                           for s in ("mean", "std")], agg_rows)
    for m in METRIC_FIELDS:
        rows = []
        for s in steps:
            at = {r.seed: getattr(r, m) for r in result.records if r.step == s}
            vals = [at[r] for r in result.config.seeds if r in at]
            rows.append([s] + [at.get(seed, "") for seed in result.config.seeds]
                        + [float(np.mean(vals))])
        _write_csv(
            os.path.join(out_dir, f"plot_{m}.dat"),
            ["step"] + [f"seed{seed}" for seed in result.config.seeds] + ["mean"],
            rows,
        )
