"""Command-line harness: run experiments, ablations, verification, tooling.

Subcommands: run, ablate, generalize, verify, doctor, mazes. A JSON config
file can seed any run; every config field is overridable by flag.
"""

import argparse
import json
import sys
import time

import numpy as np

from . import oracles
from .distribution import dynamic_temperature
from .harness import (
    ExperimentConfig,
    POLICY_KINDS,
    TrainedArtifacts,
    evaluate_generalization,
    first_success_step,
    run_ablation,
    run_experiment,
)
from .maze import builtin_names, dump_layout, load_builtin, load_maze, \
    shortest_path_length
from .svf import ContextBatch, SkillValueModel, gradient_check

SUITES = ("temperature", "action-history", "data-scope", "context-horizon")


def _flag_parser(field_type):
    """Build a string parser for one config field's annotated type."""
    if field_type is bool:
        return lambda s: bool(int(s))
    if field_type in (int, float, str):
        return field_type
    # optional fields ("X | None"): the literal "none" clears the value
    base = None
    for part in getattr(field_type, "__args__", ()):
        if part is not type(None):
            base = part
    if base is not None:
        return lambda s: None if s.lower() == "none" else base(s)
    return str


def _add_config_flags(p: argparse.ArgumentParser, require_run_flags: bool):
    p.add_argument("--config", help="JSON config file")
    p.add_argument("--preset", choices=("desk", "paper"), default=None,
                   help="baseline config before overrides")
    p.add_argument("--seed", required=require_run_flags,
                   help="comma-separated seed list, e.g. 0,1,2")
    p.add_argument("--out", required=require_run_flags, help="output directory")
    p.add_argument("--steps", type=int, dest="total_steps",
                   help="alias for --total-steps")
    # every config field gets its own override flag
    import typing
    hints = typing.get_type_hints(ExperimentConfig)
    for name in ExperimentConfig.__dataclass_fields__:
        if name == "seeds":
            continue  # covered by --seed
        p.add_argument(f"--{name.replace('_', '-')}", dest=name,
                       type=_flag_parser(hints[name]), default=None)


def _config_from_args(args) -> ExperimentConfig:
    base = {}
    if args.config:
        with open(args.config) as fh:
            base = json.load(fh)
    if args.preset == "desk":
        cfg = ExperimentConfig.desk(**base)
    else:
        cfg = ExperimentConfig.from_dict(base)
    overrides = {}
    for name in ExperimentConfig.__dataclass_fields__:
        if name == "seeds":
            continue
        val = getattr(args, name, None)
        if val is not None:
            overrides[name] = val
    if getattr(args, "seed", None):
        overrides["seeds"] = tuple(int(s) for s in args.seed.split(","))
    cfg = ExperimentConfig.from_dict({**cfg.to_dict(), **overrides})
    cfg.validate()
    return cfg


def cmd_run(args) -> int:
    cfg = _config_from_args(args)
    t0 = time.time()
    result = run_experiment(cfg, args.out)
    for seed, artifacts in result.artifacts.items():
        artifacts.save(f"{args.out}/artifacts_seed{seed}")
    for seed in cfg.seeds:
        recs = result.seed_records(seed)
        final = recs[-1].success_rate if recs else float("nan")
        first = first_success_step(recs)
        print(f"seed {seed}: final_success={final:.3f} "
              f"first_success_step={first}")
    print(f"done in {time.time() - t0:.1f}s; outputs in {args.out}")
    return 0


def cmd_ablate(args) -> int:
    cfg = _config_from_args(args)
    results = run_ablation(args.suite, cfg, args.out)
    for label, res in results.items():
        finals = [res.seed_records(s)[-1].success_rate
                  for s in res.config.seeds if res.seed_records(s)]
        mean = sum(finals) / len(finals) if finals else float("nan")
        print(f"{label}: final_success_mean={mean:.3f}")
    return 0


def cmd_generalize(args) -> int:
    artifacts = TrainedArtifacts.load(args.artifacts)
    target = load_builtin(args.maze)
    rng = np.random.default_rng(args.seed)
    sr, mx, av = evaluate_generalization(
        artifacts, target, args.policy, episodes=args.episodes,
        t_static=args.static_t, rng=rng,
    )
    print(f"maze={args.maze} policy={args.policy} episodes={args.episodes} "
          f"SR={sr:.4f} MaxOcc={mx:.4f} AvgOcc={av:.4f}")
    return 0


def cmd_verify(args) -> int:
    lines = []
    t0 = time.time()
    reports1, lines1 = oracles.sweep_prop1(args.instances, args.seed)
    lines.extend(lines1)
    neg = oracles.negative_control_prop1(args.seed)
    neg_failures = sum(1 for r in neg if not r.ok)
    lines.append(f"prop1 negative_control failures={neg_failures}/{len(neg)} "
                 + ("PASS" if neg_failures > 0 else "FAIL"))
    reports2, lines2 = oracles.sweep_prop2(args.instances, args.seed)
    lines.extend(lines2)
    ok = (all(r.ok for r in reports1) and neg_failures > 0
          and all(r.ok for r in reports2))
    lines.append(f"verify {'PASS' if ok else 'FAIL'} "
                 f"elapsed={time.time() - t0:.1f}s")
    text = "\n".join(lines) + "\n"
    if args.out:
        with open(args.out, "w") as fh:
            fh.write(text)
        print(lines[-1])
    else:
        sys.stdout.write(text)
    return 0 if ok else 1


def cmd_doctor(args) -> int:
    failures = []

    def check(name, fn):
        try:
            fn()
            print(f"ok   {name}")
        except Exception as exc:  # noqa: BLE001 - report and continue
            failures.append(name)
            print(f"FAIL {name}: {exc}")

    def mazes_ok():
        for name in builtin_names():
            spec = load_builtin(name)
            load_maze(dump_layout(spec))  # re-validates consistency
        spiral = load_builtin("spiral")
        goal = next(iter(spiral.desired_goals))
        n = shortest_path_length(spiral, spiral.start, goal)
        assert n is not None and n > 90, f"spiral corridor length {n}"

    def temperature_ok():
        assert dynamic_temperature(0.0, 2.0, 0.01) == 1.0
        assert dynamic_temperature(2.0, 2.0, 0.01) == 0.01
        assert dynamic_temperature(1.0, 2.0, 0.01) == 0.01 ** 0.5

    def gradients_ok():
        rng = np.random.default_rng(7)
        for _ in range(3):
            model = SkillValueModel(hidden_size=4, max_context=6, rng=rng)
            inputs = rng.normal(size=(2, 5, model.input_size))
            mask = np.ones((2, 5))
            batch = ContextBatch(
                inputs=inputs, mask=mask,
                z_index=np.array([1, 3]), targets=rng.normal(size=2),
                weights=np.ones(2),
            )
            err = gradient_check(model, batch)
            assert err < 1e-4, f"gradient mismatch {err:.2e}"

    def oracle_ok():
        reports, _ = oracles.sweep_prop1(10, seed=1)
        assert all(r.ok for r in reports), "boltzmann optimality check failed"
        reports, _ = oracles.sweep_prop2(10, seed=1)
        assert all(r.ok for r in reports), "entropy lower bound check failed"

    check("builtin mazes consistent, spiral corridor > 90", mazes_ok)
    check("dynamic temperature endpoints", temperature_ok)
    check("recurrent gradients vs finite differences", gradients_ok)
    check("proposition oracles (reduced sweep)", oracle_ok)
    if failures:
        print(f"doctor: {len(failures)} check(s) failed")
        return 1
    print("doctor: all checks passed")
    return 0


def cmd_mazes(args) -> int:
    if args.dump:
        sys.stdout.write(dump_layout(load_builtin(args.dump)))
        return 0
    for name in builtin_names():
        spec = load_builtin(name)
        goal = sorted(spec.desired_goals)[0]
        print(f"{name}: {spec.width}x{spec.height} start={spec.start} "
              f"goal={goal}")
    return 0


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(
        prog="geasd",
        description="Goal exploration with an adaptive skill distribution",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p_run = sub.add_parser("run", help="train on a maze and emit metrics")
    _add_config_flags(p_run, require_run_flags=True)
    p_run.set_defaults(fn=cmd_run)

    p_abl = sub.add_parser("ablate", help="run one ablation suite")
    p_abl.add_argument("--suite", choices=SUITES, required=True)
    _add_config_flags(p_abl, require_run_flags=False)
    p_abl.set_defaults(fn=cmd_ablate)

    p_gen = sub.add_parser("generalize",
                           help="evaluate frozen artifacts on another maze")
    p_gen.add_argument("--artifacts", required=True,
                       help="artifacts directory from a run")
    p_gen.add_argument("--maze", choices=builtin_names(), required=True)
    p_gen.add_argument("--policy", choices=POLICY_KINDS, required=True)
    p_gen.add_argument("--episodes", type=int, default=50)
    p_gen.add_argument("--static-t", type=float, default=0.01)
    p_gen.add_argument("--seed", type=int, default=0)
    p_gen.set_defaults(fn=cmd_generalize)

    p_ver = sub.add_parser("verify", help="brute-force proposition oracles")
    p_ver.add_argument("--instances", type=int, default=100)
    p_ver.add_argument("--seed", type=int, default=0)
    p_ver.add_argument("--out", help="write the report here instead of stdout")
    p_ver.set_defaults(fn=cmd_verify)

    p_doc = sub.add_parser("doctor", help="quick health checks")
    p_doc.set_defaults(fn=cmd_doctor)

    p_maz = sub.add_parser("mazes", help="list or dump built-in layouts")
    p_maz.add_argument("--dump", choices=builtin_names())
    p_maz.set_defaults(fn=cmd_mazes)

    args = parser.parse_args(argv)
    return args.fn(args)


if __name__ == "__main__":
    sys.exit(main())
