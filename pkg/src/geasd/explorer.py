"""Two-stage goal exploration: navigate to a sub-goal, then run skills.

An episode starts under the goal-conditioned policy heading for a sub-goal
picked from low-density regions of the replayed achieved goals. Once the
sub-goal is achieved the episode permanently switches to skill execution:
every k steps a fresh skill is drawn from the adaptive Boltzmann
distribution (uniformly for the GEAPS baseline; the OMEGA baseline never
leaves goal-conditioned control). Every primitive transition is recorded so
the goal-conditioned learner trains on fine-grained data regardless of
which stage produced it.
"""

import math
from dataclasses import dataclass

import numpy as np

from .distribution import TemperatureConfig, distribution_for, sample_skill
from .history import HistoryContext, MaxEntropyTracker, local_entropy
from .maze import (
    MazeSpec,
    N_ACTIONS,
    Observation,
    achieved_goal,
    reset,
    sparse_reward,
    step,
)
from .skills import SkillSet, sample_action, skill_start_flag
from .svf import forward

__all__ = [
    "EpisodeTrace",
    "Explorer",
    "GoalConditionedValueTable",
    "METHODS",
    "ReplayBuffer",
    "StepRecord",
    "SubGoalSelector",
    "kl_desired_achieved",
    "train_gc_policy",
]

METHODS = ("GEASD-L", "GEASD-H", "GEAPS", "OMEGA")


@dataclass(frozen=True)
class StepRecord:
    """One primitive transition plus the bookkeeping the learners need."""

    state: Observation
    action: int
    next_state: Observation
    skill: int | None           # active skill index, None during navigation
    skill_start: int            # 1 on the first step of a fresh skill
    behavior_prob: float        # probability the behavior policy gave action
    subgoal: tuple[int, int]
    episode_id: int
    step_id: int


class ReplayBuffer:
    """Append-only transition store with per-episode contiguity.

    Also maintains a running histogram of achieved goals (cells of next
    states) so density queries stay O(1).
    """

    def __init__(self, capacity: int = 5_000_000):
        self.capacity = capacity
        self._records: list[StepRecord] = []
        self._episode_start: dict[int, int] = {}
        self._episode_end: dict[int, int] = {}
        self.goal_counts: dict[tuple[int, int], int] = {}
        self.skill_indices: list[int] = []        # records with an active skill
        self.skill_start_indices: list[int] = []  # records with skill_start = 1
        self._es_k: int | None = None             # eligible-start cache state
        self._es_pool: list[int] = []
        self._es_scanned = 0

    def __len__(self) -> int:
        return len(self._records)

    def append(self, rec: StepRecord) -> None:
        if len(self._records) >= self.capacity:
            raise RuntimeError(f"replay buffer capacity {self.capacity} exceeded")
        if rec.episode_id not in self._episode_start:
            self._episode_start[rec.episode_id] = len(self._records)
        i = len(self._records)
        self._records.append(rec)
        self._episode_end[rec.episode_id] = len(self._records)
        if rec.skill is not None:
            self.skill_indices.append(i)
            if rec.skill_start:
                self.skill_start_indices.append(i)
        g = achieved_goal(rec.next_state)
        self.goal_counts[g] = self.goal_counts.get(g, 0) + 1

    def record(self, i: int) -> StepRecord:
        return self._records[i]

    def episode_bounds(self, episode_id: int) -> tuple[int, int]:
        return self._episode_start[episode_id], self._episode_end[episode_id]

    def eligible_skill_starts(self, k: int) -> list[int]:
        """Skill-start records whose k-step execution completed in-episode.

        The buffer is append-only and training runs between episodes, so
        the scan over new skill starts is done incrementally and cached.
        """
        if self._es_k != k:
            self._es_k = k
            self._es_pool = []
            self._es_scanned = 0
        for pos in range(self._es_scanned, len(self.skill_start_indices)):
            i = self.skill_start_indices[pos]
            rec = self._records[i]
            start, end = self.episode_bounds(rec.episode_id)
            if end < start + rec.step_id + k and end == len(self._records):
                break  # episode still open; rescan next call
            if rec.step_id + k <= end - start and all(
                    self._records[start + rec.step_id + j].skill == rec.skill
                    for j in range(k)):
                self._es_pool.append(i)
            self._es_scanned = pos + 1
        return self._es_pool

    def sample_indices(self, rng: np.random.Generator, n: int) -> np.ndarray:
        return rng.integers(0, len(self._records), size=n)

    def goal_density(self, goal: tuple[int, int]) -> float:
        if not self._records:
            return 0.0
        return self.goal_counts.get(goal, 0) / len(self._records)

    def achieved_goals(self):
        for rec in self._records:
            yield achieved_goal(rec.next_state)


class GoalConditionedValueTable:
    """Tabular action values Q(cell, goal, action) with epsilon-greedy acting.

    Unvisited entries default to the all-bump fixpoint -1/(1-discount),
    the most conservative value consistent with the sparse reward; with
    nonpositive rewards a zero default would make greedy prefer untried
    actions over any learned path and navigation could never stabilize.
    Greedy ties break toward the lowest action index so the policy is
    deterministic.
    """

    def __init__(self, discount: float = 0.98, epsilon: float = 0.1,
                 learning_rate: float = 0.5):
        self.discount = discount
        self.epsilon = epsilon
        self.learning_rate = learning_rate
        self.default_value = -1.0 / (1.0 - discount)
        self.q: dict[tuple, float] = {}

    def value(self, cell, goal, action) -> float:
        return self.q.get((cell, goal, action), self.default_value)

    def best_value(self, cell, goal) -> float:
        return max(self.value(cell, goal, a) for a in range(N_ACTIONS))

    def greedy_action(self, cell, goal) -> int:
        best, best_a = -math.inf, 0
        for a in range(N_ACTIONS):
            v = self.value(cell, goal, a)
            if v > best:
                best, best_a = v, a
        return best_a

    def eps_greedy(self, s: Observation, goal, rng: np.random.Generator):
        """Sample an action and return it with its behavior probability."""
        greedy = self.greedy_action(s.cell, goal)
        if rng.random() < self.epsilon:
            a = int(rng.integers(0, N_ACTIONS))
        else:
            a = greedy
        p = self.epsilon / N_ACTIONS + (1.0 - self.epsilon) * (a == greedy)
        return a, p

    def backup(self, rec: StepRecord, goal) -> float:
        """One Q-learning backup toward the sparse-reward target; returns the
        pre-update TD error. Success is absorbing: the target is exactly 0."""
        r = sparse_reward(rec.next_state, goal)
        if r == 0.0:
            target = 0.0
        else:
            target = r + self.discount * self.best_value(rec.next_state.cell, goal)
        key = (rec.state.cell, goal, rec.action)
        old = self.q.get(key, self.default_value)
        self.q[key] = old + self.learning_rate * (target - old)
        return target - old


def train_gc_policy(table: GoalConditionedValueTable, buffer: ReplayBuffer,
                    rng: np.random.Generator, batch_size: int = 64,
                    relabel_ratio: float = 0.8) -> float:
    """Sparse-reward value backups on sampled records, with future relabeling.

    With probability relabel_ratio a record's goal is replaced by the
    achieved goal of a later step of the same episode. Returns the mean
    squared pre-update TD error.
    """
    if len(buffer) == 0:
        raise ValueError("cannot train on an empty buffer")
    idx = buffer.sample_indices(rng, batch_size)
    sq = 0.0
    for i in idx:
        rec = buffer.record(int(i))
        goal = rec.subgoal
        if rng.random() < relabel_ratio:
            _, end = buffer.episode_bounds(rec.episode_id)
            j = int(rng.integers(i, end))
            goal = achieved_goal(buffer.record(j).next_state)
        err = table.backup(rec, goal)
        sq += err * err
    return sq / batch_size


def relabel_sweep(table: GoalConditionedValueTable, buffer: ReplayBuffer,
                  episode_id: int, rng: np.random.Generator,
                  n_goals: int | None = None) -> None:
    """Backward relabeled backups over one finished episode.

    For each goal achieved during the episode (or a random sample of
    n_goals of them), walk the records preceding its first achievement in
    reverse and back up each one toward that goal. Backward order
    propagates the sparse signal along the whole path in a single pass,
    which a table (unlike a function approximator) cannot get from uniform
    replay alone; sweeping every goal matters because only the episode
    that first visits a cell can teach the route to it.
    """
    start, end = buffer.episode_bounds(episode_id)
    n = end - start
    if n == 0:
        return
    first_hit: dict[tuple[int, int], int] = {}
    for t in range(n):
        g = achieved_goal(buffer.record(start + t).next_state)
        first_hit.setdefault(g, t)
    if n_goals is None:
        picks = list(first_hit)
    else:
        goals = list(first_hit)
        picks = [goals[int(i)] for i in
                 rng.integers(0, len(goals), size=n_goals)]
        picks.append(achieved_goal(buffer.record(end - 1).next_state))
        subgoal = buffer.record(start).subgoal
        if subgoal in first_hit:
            picks.append(subgoal)
    for g in picks:
        for t in range(first_hit[g], -1, -1):
            table.backup(buffer.record(start + t), g)


def kl_desired_achieved(buffer: ReplayBuffer, desired_goals, spec: MazeSpec,
                        smoothing: float = 1e-4) -> float:
    """KL(desired || achieved) with a Laplace-smoothed cell histogram, so
    the divergence stays finite before the distributions overlap."""
    if len(buffer) == 0:
        raise ValueError("empty buffer")
    n = len(buffer)
    denom = n + smoothing * spec.n_cells()
    p_dg = 1.0 / len(desired_goals)
    kl = 0.0
    for g in desired_goals:
        p_ag = (buffer.goal_counts.get(g, 0) + smoothing) / denom
        kl += p_dg * math.log(p_dg / p_ag)
    return kl


class SubGoalSelector:
    """Sub-goal choice balancing desired goals against unexplored regions.

    With probability alpha = 1 / max(b + KL(desired || achieved), 1) a
    desired goal is returned; otherwise the lowest-density achieved goal
    among a sampled candidate set. An optional Gaussian-kernel density can
    replace the exact histogram for the candidate ranking.
    """

    def __init__(self, b: float = -3.0, candidate_count: int = 100,
                 use_kde: bool = False, kde_bandwidth: float = 0.1,
                 kde_fit_cap: int = 10_000):
        self.b = b
        self.candidate_count = candidate_count
        self.use_kde = use_kde
        self.kde_bandwidth = kde_bandwidth
        self.kde_fit_cap = kde_fit_cap

    def alpha(self, buffer: ReplayBuffer, spec: MazeSpec) -> float:
        kl = kl_desired_achieved(buffer, sorted(spec.desired_goals), spec)
        return 1.0 / max(self.b + kl, 1.0)

    def _candidate_densities(self, buffer, candidates, spec, rng):
        if not self.use_kde:
            return [buffer.goal_density(g) for g in candidates]
        n = min(len(buffer), self.kde_fit_cap)
        idx = buffer.sample_indices(rng, n)
        sx = max(spec.width - 1, 1)
        sy = max(spec.height - 1, 1)
        pts = np.array([
            achieved_goal(buffer.record(int(i)).next_state) for i in idx
        ], dtype=float) / (sx, sy)
        cand = np.array(candidates, dtype=float) / (sx, sy)
        h2 = self.kde_bandwidth ** 2
        d2 = ((cand[:, None, :] - pts[None, :, :]) ** 2).sum(axis=2)
        dens = np.exp(-d2 / (2.0 * h2)).mean(axis=1) / (2.0 * math.pi * h2)
        return dens.tolist()

    def select(self, buffer: ReplayBuffer, spec: MazeSpec,
               rng: np.random.Generator) -> tuple[int, int]:
        desired = sorted(spec.desired_goals)
        if len(buffer) == 0:
            return desired[int(rng.integers(0, len(desired)))]
        if rng.random() < self.alpha(buffer, spec):
            return desired[int(rng.integers(0, len(desired)))]
        # candidates are drawn from the distinct achieved goals so rarely
        # visited frontier cells stay reachable by the min-density rule
        support = list(buffer.goal_counts)
        idx = rng.integers(0, len(support), size=self.candidate_count)
        candidates = [support[int(i)] for i in idx]
        densities = self._candidate_densities(buffer, candidates, spec, rng)
        best = int(np.argmin(densities))
        return candidates[best]


@dataclass
class EpisodeTrace:
    """Everything one episode produced, plus a text serialization."""

    episode_id: int
    subgoal: tuple[int, int]
    records: list[StepRecord]
    t_switch: int | None         # first skill-acting step, None if never
    skill_draws: int

    def to_lines(self) -> list[str]:
        sw = -1 if self.t_switch is None else self.t_switch
        lines = [
            f"episode {self.episode_id} subgoal {self.subgoal[0]} "
            f"{self.subgoal[1]} t_switch {sw} draws {self.skill_draws}"
        ]
        for r in self.records:
            z = -1 if r.skill is None else r.skill
            lines.append(
                f"{r.step_id} {r.state.cell[0]} {r.state.cell[1]} {r.action} "
                f"{r.next_state.cell[0]} {r.next_state.cell[1]} {z} "
                f"{r.skill_start} {r.behavior_prob:.10g}"
            )
        return lines


class Explorer:
    """Runs episodes against one maze and records them into the buffer."""

    def __init__(self, spec: MazeSpec, skills: SkillSet,
                 gc: GoalConditionedValueTable, selector: SubGoalSelector,
                 temp_cfg: TemperatureConfig, buffer: ReplayBuffer,
                 tracker: MaxEntropyTracker, model=None,
                 context_horizon: int = 10, episode_len: int = 150):
        self.spec = spec
        self.skills = skills
        self.gc = gc
        self.selector = selector
        self.temp_cfg = temp_cfg
        self.buffer = buffer
        self.tracker = tracker
        self.model = model
        self.context_horizon = context_horizon
        self.episode_len = episode_len
        self._next_episode = 0

    def _draw_skill(self, method: str, ctx: HistoryContext,
                    rng: np.random.Generator) -> int:
        n = len(self.skills)
        if method == "GEAPS":
            dist = np.full(n, 1.0 / n)
        else:
            values = forward(self.model, ctx)
            dist = distribution_for(
                self.temp_cfg, values, local_entropy(ctx), self.tracker.max)
        return sample_skill(dist, rng)

    def run_episode(self, method: str, rng: np.random.Generator,
                    on_step=None) -> EpisodeTrace:
        """Run one episode, recording every transition into the buffer.

        `on_step(t)` is invoked after each transition is recorded, so
        learners can train at a per-step cadence while collection runs.
        """
        if method not in METHODS:
            raise ValueError(f"unknown method {method!r}; expected one of {METHODS}")
        spec = self.spec
        k = self.skills.horizon
        K = self.episode_len
        ep = self._next_episode
        self._next_episode += 1

        s = reset(spec)
        subgoal = self.selector.select(self.buffer, spec, rng)
        ctx = HistoryContext.start(self.context_horizon, s)
        self.tracker.observe_context(ctx)

        navigating = True
        reached = achieved_goal(s) == subgoal
        z: int | None = None
        phase_step = 0
        t_switch: int | None = None
        draws = 0
        records: list[StepRecord] = []

        for t in range(K):
            if navigating or method == "OMEGA":
                a, pb = self.gc.eps_greedy(s, subgoal, rng)
                z_rec, xi = None, 0
            else:
                xi = skill_start_flag(phase_step, k)
                a, pb = sample_action(self.skills.skills[z], s, rng)
                z_rec = z
                phase_step += 1

            s_next = step(spec, s, a)
            ctx = ctx.advanced(a, s_next)
            self.tracker.observe_context(ctx)
            rec = StepRecord(
                state=s, action=a, next_state=s_next, skill=z_rec,
                skill_start=xi, behavior_prob=pb, subgoal=subgoal,
                episode_id=ep, step_id=t,
            )
            records.append(rec)
            self.buffer.append(rec)
            reached = reached or achieved_goal(s_next) == subgoal

            if method != "OMEGA":
                if navigating and reached:
                    navigating = False
                    t_switch = t + 1
                    phase_step = 0
                    if t + 1 < K:
                        z = self._draw_skill(method, ctx, rng)
                        draws += 1
                elif not navigating and phase_step % k == 0 and t + 1 < K:
                    z = self._draw_skill(method, ctx, rng)
                    draws += 1
            if on_step is not None:
                on_step(t)
            s = s_next

        return EpisodeTrace(
            episode_id=ep, subgoal=subgoal, records=records,
            t_switch=t_switch, skill_draws=draws,
        )
