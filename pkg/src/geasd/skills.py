"""Directional skill kit: samplers, posteriors and the skill-start flag.

Skills are procedural heading-persisters over the four compass actions.
Each skill conditions only on the agent-internal feature map (the
within-cell offset channels), never on walls or absolute position, so a
skill acts open-loop for its whole horizon.
"""

from dataclasses import dataclass

import numpy as np

from .maze import Action, N_ACTIONS, Observation

__all__ = [
    "Skill",
    "SkillSet",
    "psi",
    "sample_action",
    "skill_posterior",
    "skill_start_flag",
]


def psi(s: Observation) -> np.ndarray:
    """Agent-internal features: the offset channels only (constant here)."""
    return np.asarray(s.offset, dtype=float)


@dataclass(frozen=True)
class Skill:
    """One directional skill: mass 1 - stochasticity on its heading."""

    id: int
    direction: Action
    stochasticity: float = 0.05

    def __post_init__(self):
        if not 0.0 <= self.stochasticity < 1.0:
            raise ValueError("stochasticity must lie in [0, 1)")

    def action_probs(self) -> np.ndarray:
        probs = np.full(N_ACTIONS, self.stochasticity / (N_ACTIONS - 1))
        probs[self.direction] = 1.0 - self.stochasticity
        return probs


@dataclass(frozen=True)
class SkillSet:
    """The four compass skills plus their shared execution horizon."""

    skills: tuple[Skill, ...]
    horizon: int = 2

    def __post_init__(self):
        if self.horizon < 1:
            raise ValueError("skill horizon must be >= 1")
        if len(self.skills) != N_ACTIONS:
            raise ValueError("expected one skill per compass direction")

    @classmethod
    def default(cls, stochasticity: float = 0.05, horizon: int = 2) -> "SkillSet":
        skills = tuple(
            Skill(id=i, direction=Action(i), stochasticity=stochasticity)
            for i in range(N_ACTIONS)
        )
        return cls(skills=skills, horizon=horizon)

    def __len__(self) -> int:
        return len(self.skills)


def sample_action(z: Skill, s: Observation, rng: np.random.Generator):
    """Draw an action from the skill's conditional and return its probability."""
    probs = z.action_probs()
    a = int(rng.choice(N_ACTIONS, p=probs))
    return a, float(probs[a])


def skill_posterior(skills: SkillSet, s: Observation, a: int) -> np.ndarray:
    """Posterior over skills given an observed action, by direct normalization."""
    likes = np.array([z.action_probs()[a] for z in skills.skills])
    total = likes.sum()
    if total <= 0.0:
        raise ValueError(f"no skill assigns mass to action {a}")
    return likes / total


def skill_start_flag(step_in_skill_phase: int, k: int) -> int:
    """1 when a fresh skill begins at this step of the skill phase, else 0."""
    if step_in_skill_phase < 0 or k < 1:
        raise ValueError("step index must be >= 0 and horizon >= 1")
    return 1 if step_in_skill_phase % k == 0 else 0
