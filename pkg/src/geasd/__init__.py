"""Goal exploration on grid mazes via an adaptive skill distribution.

The package couples a deterministic maze simulator with local-entropy
intrinsic rewards, recurrent skill value functions, a dynamic-temperature
Boltzmann skill distribution, a two-stage exploration loop, brute-force
oracles for the underlying optimality claims, and an experiment harness.
"""

from .distribution import (
    TemperatureConfig,
    dynamic_temperature,
    sample_skill,
    skill_distribution,
)
from .explorer import (
    EpisodeTrace,
    Explorer,
    GoalConditionedValueTable,
    METHODS,
    ReplayBuffer,
    StepRecord,
    SubGoalSelector,
)
from .harness import (
    ExperimentConfig,
    MetricsRecord,
    RunResult,
    TrainedArtifacts,
    evaluate_generalization,
    run_ablation,
    run_experiment,
)
from .history import (
    GoalHistogram,
    HistoryContext,
    MaxEntropyTracker,
    local_entropy,
    overall_entropy_bound,
    r_info,
)
from .maze import (
    Action,
    MazeSpec,
    Observation,
    achieved_goal,
    builtin_names,
    load_builtin,
    load_maze,
    sparse_reward,
    step,
)
from .skills import Skill, SkillSet, psi, sample_action, skill_posterior
from .svf import SkillValueModel, forward, gamma_hat, y_high, y_low

__version__ = "0.1.0"

__all__ = [
    "Action",
    "EpisodeTrace",
    "ExperimentConfig",
    "Explorer",
    "GoalConditionedValueTable",
    "GoalHistogram",
    "HistoryContext",
    "METHODS",
    "MaxEntropyTracker",
    "MazeSpec",
    "MetricsRecord",
    "Observation",
    "ReplayBuffer",
    "RunResult",
    "Skill",
    "SkillSet",
    "SkillValueModel",
    "StepRecord",
    "SubGoalSelector",
    "TemperatureConfig",
    "TrainedArtifacts",
    "achieved_goal",
    "builtin_names",
    "dynamic_temperature",
    "evaluate_generalization",
    "forward",
    "gamma_hat",
    "load_builtin",
    "load_maze",
    "local_entropy",
    "overall_entropy_bound",
    "psi",
    "r_info",
    "run_ablation",
    "run_experiment",
    "sample_action",
    "sample_skill",
    "skill_distribution",
    "skill_posterior",
    "sparse_reward",
    "step",
    "y_high",
    "y_low",
]
