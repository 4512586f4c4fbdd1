"""Boltzmann skill distribution with a dynamic, entropy-driven temperature.

The temperature interpolates between full exploration (T = 1 when the local
entropy is zero) and exploitation (T = T_min when the window entropy has
reached its recorded maximum); skill values are turned into probabilities
by an overflow-safe softmax.
"""

from dataclasses import dataclass

import numpy as np

__all__ = [
    "TemperatureConfig",
    "distribution_for",
    "dynamic_temperature",
    "sample_skill",
    "skill_distribution",
]

MODES = ("dynamic", "static", "uniform")


@dataclass(frozen=True)
class TemperatureConfig:
    mode: str = "dynamic"
    static_t: float | None = None
    t_min: float = 0.01

    def __post_init__(self):
        if self.mode not in MODES:
            raise ValueError(f"mode must be one of {MODES}")
        if self.mode == "static" and (self.static_t is None or self.static_t <= 0):
            raise ValueError("static mode needs a positive temperature")
        if not 0.0 < self.t_min < 1.0:
            raise ValueError("t_min must lie in (0, 1)")


def dynamic_temperature(h_local: float, h_max: float, t_min: float = 0.01) -> float:
    """Temperature T = T_min ** min(h_local / h_max, 1), in [T_min, 1].

    Before any entropy has been recorded (h_max = 0) there is no evidence of
    effective goal spreading, so the maximum-exploration temperature 1 is
    returned.
    """
    if h_local < 0.0 or h_max < 0.0:
        raise ValueError("entropies cannot be negative")
    if not 0.0 < t_min < 1.0:
        raise ValueError("t_min must lie in (0, 1)")
    if h_max == 0.0:
        return 1.0
    ratio = min(h_local / h_max, 1.0)
    return t_min ** ratio


def skill_distribution(values, temperature: float) -> np.ndarray:
    """Softmax of values / temperature, computed with max-subtraction."""
    if temperature <= 0.0:
        raise ValueError("temperature must be positive")
    v = np.asarray(values, dtype=float)
    if not np.all(np.isfinite(v)):
        raise ValueError("skill values must be finite")
    scaled = v / temperature
    scaled -= scaled.max()
    e = np.exp(scaled)
    return e / e.sum()


def sample_skill(dist, rng: np.random.Generator) -> int:
    """Categorical draw from a skill distribution; returns the skill index."""
    p = np.asarray(dist, dtype=float)
    if p.ndim != 1 or p.size == 0 or np.any(p < 0.0):
        raise ValueError("malformed skill distribution")
    if abs(p.sum() - 1.0) > 1e-9:
        raise ValueError(f"distribution sums to {p.sum()!r}, not 1")
    u = rng.random()
    acc = 0.0
    for i, pi in enumerate(p):
        acc += pi
        if u < acc:
            return i
    return int(p.size - 1)


def distribution_for(cfg: TemperatureConfig, values, h_local: float,
                     h_max: float) -> np.ndarray:
    """Skill distribution under a temperature configuration."""
    n = len(values)
    if cfg.mode == "uniform":
        return np.full(n, 1.0 / n)
    if cfg.mode == "static":
        return skill_distribution(values, cfg.static_t)
    t = dynamic_temperature(h_local, h_max, cfg.t_min)
    return skill_distribution(values, t)
