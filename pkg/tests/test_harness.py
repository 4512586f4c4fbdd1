import math

import numpy as np
import pytest

from geasd.explorer import ReplayBuffer, StepRecord
from geasd.harness import (
    ExperimentConfig,
    TrainedArtifacts,
    ablation_variants,
    build_high_batch,
    build_low_batch,
    context_at,
    emit_outputs,
    empirical_entropy_metric,
    evaluate_generalization,
    first_success_step,
    run_experiment,
    run_single_seed,
)
from geasd.history import local_entropy
from geasd.maze import load_builtin, observe
from geasd.skills import SkillSet
from geasd.svf import SkillValueModel, train_step

MICRO = dict(
    seeds=(0,),
    total_steps=300,
    episode_len=30,
    eval_every=60,
    eval_episodes=2,
    hidden_size=8,
    svf_batch=8,
    gc_batch=16,
)


def micro_config(**overrides):
    kw = {**MICRO, **overrides}
    return ExperimentConfig(**kw)


def seeded_buffer(method="GEASD-L", episodes=3, config=None, seed=0):
    """Collect a few episodes so the batch builders have data."""
    from geasd.distribution import TemperatureConfig
    from geasd.explorer import (
        Explorer, GoalConditionedValueTable, SubGoalSelector)
    from geasd.history import MaxEntropyTracker

    config = config or micro_config()
    spec = load_builtin(config.maze)
    skills = SkillSet.default(config.skill_stochasticity, config.skill_horizon)
    rng = np.random.default_rng(seed)
    model = SkillValueModel(hidden_size=config.hidden_size,
                            max_context=config.context_horizon, rng=rng)
    buffer = ReplayBuffer()
    ex = Explorer(
        spec=spec, skills=skills, gc=GoalConditionedValueTable(),
        selector=SubGoalSelector(), temp_cfg=TemperatureConfig("dynamic"),
        buffer=buffer, tracker=MaxEntropyTracker(), model=model,
        context_horizon=config.context_horizon,
        episode_len=config.episode_len,
    )
    ex.selector.select = lambda b, s, r: (0, 0)  # switch to skills at t=1
    for _ in range(episodes):
        ex.run_episode(method, rng)
    return model, buffer, skills, config, rng


def test_config_validation():
    micro_config().validate()
    with pytest.raises(ValueError):
        micro_config(seeds=()).validate()
    with pytest.raises(ValueError):
        micro_config(context_horizon=2, skill_horizon=2).validate()
    with pytest.raises(ValueError):
        micro_config(method="SAC").validate()
    with pytest.raises(ValueError):
        micro_config(temp_mode="static").validate()


def test_config_round_trip():
    cfg = micro_config(method="GEAPS", static_t=0.1, temp_mode="static")
    again = ExperimentConfig.from_dict(cfg.to_dict())
    assert again == cfg
    with pytest.raises(ValueError, match="unknown config fields"):
        ExperimentConfig.from_dict({"warp_drive": 1})


def test_desk_preset():
    cfg = ExperimentConfig.desk()
    assert cfg.total_steps == 20_000
    assert cfg.seeds == (0, 1, 2)
    assert cfg.hidden_size == 32
    cfg.validate()


def test_context_at_matches_explorer_windows():
    model, buffer, skills, config, rng = seeded_buffer()
    start, end = buffer.episode_bounds(0)
    C = config.context_horizon
    for t in (0, 1, 5, config.episode_len):
        ctx = context_at(buffer, 0, t, C)
        assert len(ctx) == min(t + 1, C)
        assert ctx.t == t
        if t < config.episode_len:
            assert ctx.entries[-1][0] is buffer.record(start + t).state
        else:
            assert ctx.entries[-1][0] is buffer.record(end - 1).next_state


def test_build_low_batch_shapes_and_weights():
    model, buffer, skills, config, rng = seeded_buffer()
    batch = build_low_batch(model, buffer, skills, config, rng)
    assert batch is not None
    assert len(batch) == config.svf_batch
    assert batch.scheme == "low"
    batch.validate()
    assert np.all(batch.weights >= 0.0)
    assert np.all(batch.weights <= config.rho_clip)
    loss = train_step(model, batch, scheme="low", step_size=1e-3)
    assert math.isfinite(loss)


def test_build_low_batch_on_policy_rho_is_one():
    # deterministic skills executed on policy: importance ratio is exactly 1
    cfg = micro_config(skill_stochasticity=0.0, data_scope="skill-only")
    model, buffer, skills, config, rng = seeded_buffer(config=cfg)
    batch = build_low_batch(model, buffer, skills, config, rng)
    assert batch is not None
    assert np.allclose(batch.weights, 1.0)


def test_build_low_batch_truncation_frequency():
    model, buffer, skills, config, rng = seeded_buffer(episodes=6)
    total, cut = 0, 0
    for _ in range(60):
        batch = build_low_batch(model, buffer, skills, config, rng)
        eligible = batch.mask.sum(axis=1) > 1  # length-1 rows cannot shrink
        total += int(eligible.sum())
        cut += int(batch.truncated[eligible].sum())
    # eligible contexts are truncated with probability clip_ratio = 0.5
    freq = cut / total
    sigma = math.sqrt(0.25 / total)
    assert abs(freq - 0.5) <= 4 * sigma


def test_build_high_batch_targets_are_entropy_differences():
    model, buffer, skills, config, rng = seeded_buffer()
    batch = build_high_batch(model, buffer, config, rng)
    assert batch is not None
    assert batch.scheme == "high"
    assert np.allclose(batch.weights, 1.0)
    # recompute each target independently from window entropies
    k = config.skill_horizon
    C = config.context_horizon
    pool = buffer.eligible_skill_starts(k)
    rng2 = np.random.default_rng(1)
    for i in [pool[int(j)] for j in rng2.integers(0, len(pool), size=10)]:
        rec = buffer.record(i)
        h0 = context_at(buffer, rec.episode_id, rec.step_id, C)
        hk = context_at(buffer, rec.episode_id, rec.step_id + k, C)
        direct = local_entropy(hk) - local_entropy(h0)
        from geasd.svf import y_high
        path = [context_at(buffer, rec.episode_id, rec.step_id + j, C)
                for j in range(k + 1)]
        assert y_high(path) == pytest.approx(direct, abs=1e-12)


def test_build_high_batch_empty_without_skill_data():
    model, buffer, skills, config, rng = seeded_buffer(method="OMEGA")
    assert build_high_batch(model, buffer, config, rng) is None
    cfg = micro_config(data_scope="skill-only")
    assert build_low_batch(model, ReplayBuffer(), skills, cfg, rng) is None


def test_empirical_entropy_histogram_values():
    spec = load_builtin("spiral")
    buf = ReplayBuffer()
    s = observe(spec, (3, 3))
    for i in range(40):
        buf.append(StepRecord(s, 0, s, None, 0, 1.0, (0, 0), 0, i))
    assert empirical_entropy_metric(buf) == 0.0
    buf2 = ReplayBuffer()
    i = 0
    for x in range(10):
        for y in range(10):
            c = observe(spec, (x, y))
            buf2.append(StepRecord(c, 0, c, None, 0, 1.0, (0, 0), 0, i))
            i += 1
    assert empirical_entropy_metric(buf2) == pytest.approx(
        math.log(100), abs=1e-12)


def test_empirical_entropy_kde_agrees_on_separated_clusters():
    spec = load_builtin("spiral")
    buf = ReplayBuffer()
    i = 0
    for cell in ((0, 0), (9, 0), (0, 9), (9, 9)):
        s = observe(spec, cell)
        for _ in range(25):
            buf.append(StepRecord(s, 0, s, None, 0, 1.0, (0, 0), 0, i))
            i += 1
    hist = empirical_entropy_metric(buf, "histogram")
    kde = empirical_entropy_metric(buf, "kde", spec=spec,
                                   rng=np.random.default_rng(0))
    assert hist == pytest.approx(math.log(4), abs=1e-12)
    assert abs(kde - hist) <= 0.15


def test_run_single_seed_micro_and_determinism():
    cfg = micro_config()
    rec1, art1 = run_single_seed(cfg, 0)
    rec2, art2 = run_single_seed(cfg, 0)
    assert rec1 == rec2
    assert np.array_equal(art1.model.get_flat(), art2.model.get_flat())
    assert art1.table.q == art2.table.q
    assert len(rec1) == cfg.total_steps // cfg.eval_every
    for r in rec1:
        assert 0.0 <= r.success_rate <= 1.0
        assert r.max_occ >= r.avg_occ


def test_run_experiment_zero_steps_header_only(tmp_path):
    cfg = micro_config(total_steps=0)
    out = tmp_path / "empty"
    run_experiment(cfg, str(out))
    agg = (out / "aggregate.csv").read_text().splitlines()
    assert len(agg) == 1
    assert agg[0].startswith("step,success_rate_mean")
    seed_csv = (out / "run_seed0.csv").read_text().splitlines()
    assert seed_csv == ["step,seed,success_rate,entropy,max_occ,avg_occ"]


def test_emit_outputs_byte_identical_across_runs(tmp_path):
    cfg = micro_config()
    a, b = tmp_path / "a", tmp_path / "b"
    run_experiment(cfg, str(a))
    run_experiment(cfg, str(b))
    for name in ("run_seed0.csv", "aggregate.csv", "plot_success_rate.dat"):
        assert (a / name).read_bytes() == (b / name).read_bytes()


def test_csv_reparse_round_trips(tmp_path):
    import csv as csvmod
    cfg = micro_config()
    out = tmp_path / "run"
    result = run_experiment(cfg, str(out))
    with open(out / "run_seed0.csv") as fh:
        rows = list(csvmod.DictReader(fh))
    assert len(rows) == len(result.seed_records(0))
    for row, rec in zip(rows, result.seed_records(0)):
        assert int(row["step"]) == rec.step
        assert float(row["success_rate"]) == rec.success_rate
        assert float(row["entropy"]) == rec.entropy


def test_aggregate_of_constant_is_constant(tmp_path):
    cfg = micro_config(seeds=(0, 0))  # same seed twice: identical curves
    out = tmp_path / "agg"
    result = run_experiment(cfg, str(out))
    recs = result.records
    steps = sorted({r.step for r in recs})
    lines = (out / "aggregate.csv").read_text().splitlines()[1:]
    assert len(lines) == len(steps)
    for line in lines:
        fields = line.split(",")
        # std columns of identical-seed runs are exactly zero
        assert float(fields[2]) == 0.0


def test_first_success_step():
    from geasd.harness import MetricsRecord
    recs = [
        MetricsRecord(1000, 0, 0.0, 1.0, 0.1, 0.1),
        MetricsRecord(2000, 0, 0.0, 1.2, 0.1, 0.1),
        MetricsRecord(3000, 0, 0.6, 1.3, 0.6, 0.4),
    ]
    assert first_success_step(recs) == 3000
    assert first_success_step(recs[:2]) is None
    assert first_success_step(recs[:2], sentinel=99) == 99


def test_artifacts_save_load_round_trip(tmp_path):
    cfg = micro_config()
    _, artifacts = run_single_seed(cfg, 0)
    artifacts.save(str(tmp_path / "art"))
    loaded = TrainedArtifacts.load(str(tmp_path / "art"))
    assert loaded.seed == 0
    assert loaded.config == cfg
    assert loaded.table.q == artifacts.table.q
    assert np.array_equal(loaded.model.get_flat(), artifacts.model.get_flat())


def test_generalization_gc_consistency_on_training_maze():
    cfg = micro_config()
    records, artifacts = run_single_seed(cfg, 0)
    spec = load_builtin(cfg.maze)
    sr, mx, av = evaluate_generalization(
        artifacts, spec, "gc", episodes=4, rng=np.random.default_rng(0))
    assert sr == records[-1].success_rate
    assert mx >= av


def test_generalization_uniform_gc_small_coverage():
    cfg = micro_config()
    _, artifacts = run_single_seed(cfg, 0)
    target = load_builtin("spiral_c")
    sr, mx, av = evaluate_generalization(
        artifacts, target, "uniform-gc", episodes=10,
        rng=np.random.default_rng(1))
    assert sr == 0.0
    assert mx < 0.5  # random actions cover little of a corridor maze


def test_generalization_skill_policies_run():
    cfg = micro_config()
    _, artifacts = run_single_seed(cfg, 0)
    target = load_builtin("serpentine")
    for kind in ("skill-adaptive", "skill-uniform"):
        sr, mx, av = evaluate_generalization(
            artifacts, target, kind, episodes=5,
            rng=np.random.default_rng(2))
        assert 0.0 <= sr <= 1.0
        assert 0.0 < av <= mx <= 1.0


def test_generalization_rejects_unknown_policy():
    cfg = micro_config()
    _, artifacts = run_single_seed(cfg, 0)
    with pytest.raises(ValueError):
        evaluate_generalization(artifacts, load_builtin("spiral"), "dqn")


def test_ablation_variant_expansion():
    base = micro_config()
    temp = ablation_variants("temperature", base)
    assert set(temp) == {"dynamic", "static_0.01", "static_0.1", "static_1"}
    assert temp["static_0.1"].static_t == 0.1
    hist = ablation_variants("action-history", base)
    assert hist["state_only"].include_actions is False
    scope = ablation_variants("data-scope", base)
    assert scope["skill_data"].data_scope == "skill-only"
    horizon = ablation_variants("context-horizon", base)
    assert {c.context_horizon for c in horizon.values()} == {3, 5, 10}
    with pytest.raises(ValueError):
        ablation_variants("sideways", base)
