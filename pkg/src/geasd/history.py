"""Sliding historical context and local-entropy bookkeeping.

The context is the window of the most recent C (observation, action) steps
of the current episode; the achieved-goal sequence it induces drives the
local entropy, the per-step intrinsic reward (its one-step change) and the
dynamic-temperature machinery.
"""

import math
from dataclasses import dataclass

from .maze import Observation, achieved_goal

__all__ = [
    "GoalHistogram",
    "HistoryContext",
    "MaxEntropyTracker",
    "entropy_from_counts",
    "entropy_of_probs",
    "local_entropy",
    "max_recorded_entropy",
    "overall_entropy_bound",
    "r_info",
]


def entropy_from_counts(counts) -> float:
    """Shannon entropy (nats) of an empirical distribution given raw counts."""
    total = sum(counts)
    if total <= 0:
        raise ValueError("entropy of an empty sample is undefined")
    h = 0.0
    for n in counts:
        if n > 0:
            p = n / total
            h -= p * math.log(p)
    return h


def entropy_of_probs(probs) -> float:
    """Shannon entropy (nats) of a probability vector; zero entries skipped."""
    return -sum(p * math.log(p) for p in probs if p > 0.0)


@dataclass(frozen=True)
class GoalHistogram:
    """Occurrence counts of achieved goals inside one context window."""

    counts: dict
    total: int

    @classmethod
    def from_goals(cls, goals) -> "GoalHistogram":
        counts = {}
        for g in goals:
            counts[g] = counts.get(g, 0) + 1
        return cls(counts=counts, total=len(goals))

    def entropy(self) -> float:
        return entropy_from_counts(self.counts.values())


class HistoryContext:
    """Bounded window of the most recent (observation, action) steps.

    Entries are (observation, action) pairs in time order; the newest entry
    carries action None because no action has been taken from it yet.
    Windows shorter than the capacity (episode start) simply hold fewer
    entries. `advanced` is pure: it returns a new context.
    """

    __slots__ = ("capacity", "entries", "t")

    def __init__(self, capacity: int, entries, t: int):
        if capacity < 1:
            raise ValueError("capacity must be >= 1")
        self.capacity = capacity
        self.entries = tuple(entries)
        self.t = t

    @classmethod
    def start(cls, capacity: int, obs: Observation, t: int = 0) -> "HistoryContext":
        return cls(capacity, ((obs, None),), t)

    def advanced(self, action: int, next_obs: Observation) -> "HistoryContext":
        """Context after taking `action` and observing `next_obs`."""
        last_obs, _ = self.entries[-1]
        entries = self.entries[:-1] + ((last_obs, action), (next_obs, None))
        if len(entries) > self.capacity:
            entries = entries[1:]
        return HistoryContext(self.capacity, entries, self.t + 1)

    def __len__(self) -> int:
        return len(self.entries)

    @property
    def observations(self) -> tuple[Observation, ...]:
        return tuple(obs for obs, _ in self.entries)

    @property
    def achieved(self) -> tuple[tuple[int, int], ...]:
        """Achieved-goal sequence of the window, oldest first."""
        return tuple(achieved_goal(obs) for obs, _ in self.entries)

    def histogram(self) -> GoalHistogram:
        return GoalHistogram.from_goals(self.achieved)


def local_entropy(h: HistoryContext) -> float:
    """Entropy of the empirical achieved-goal distribution in the window.

    Partially filled windows are normalized by their actual length.
    """
    if len(h) == 0:
        raise ValueError("local entropy of an empty context is undefined")
    return h.histogram().entropy()


def r_info(h_t: HistoryContext, h_next: HistoryContext) -> float:
    """One-step local-entropy change; the intrinsic reward. May be negative."""
    if h_next.t != h_t.t + 1:
        raise ValueError(
            f"contexts are not adjacent in time ({h_t.t} -> {h_next.t})"
        )
    overlap = len(h_next) - 1
    if overlap > 0 and h_next.achieved[:-1] != h_t.achieved[-overlap:]:
        raise ValueError("contexts disagree on their shared goal history")
    return local_entropy(h_next) - local_entropy(h_t)


def overall_entropy_bound(h_past: float, h_local: float, c: int,
                          buffer_len: int) -> float:
    """Convex split of past and window entropy used as a coverage diagnostic.

    Weights the past entropy by C/buffer_len and the window entropy by the
    remainder.
    """
    if c <= 0:
        raise ValueError("context horizon must be positive")
    if buffer_len < c:
        raise ValueError("buffer must hold at least one full context window")
    beta = c / buffer_len
    return beta * h_past + (1.0 - beta) * h_local


def max_recorded_entropy(entropies) -> float:
    """Running maximum of an entropy stream; stateful use goes through
    MaxEntropyTracker."""
    tracker = MaxEntropyTracker()
    for value in entropies:
        tracker.observe(value)
    if not tracker.seen_any:
        raise ValueError("empty entropy stream")
    return tracker.max


class MaxEntropyTracker:
    """Running maximum of local entropy over all contexts seen in a run."""

    __slots__ = ("_max", "_seen")

    def __init__(self):
        self._max = 0.0
        self._seen = False

    def observe(self, entropy: float) -> float:
        if entropy < 0.0:
            raise ValueError("entropy cannot be negative")
        self._seen = True
        if entropy > self._max:
            self._max = entropy
        return self._max

    def observe_context(self, h: HistoryContext) -> float:
        return self.observe(local_entropy(h))

    @property
    def max(self) -> float:
        return self._max

    @property
    def seen_any(self) -> bool:
        return self._seen
