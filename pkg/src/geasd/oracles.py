"""Brute-force verification of the skill-distribution optimality claims.

Everything here operates on tiny enumerable instances: a fixed context
window of achieved goals, a handful of skills, and an exact distribution
over the k-step goal sequences each skill can produce. Two claims are
checked numerically:

  1. When every achieved goal is covered by exactly one skill, the
     entropy-maximizing skill mix is the Boltzmann distribution whose
     energies are the negated per-skill entropy gains. Verified by
     comparing the closed form against a direct simplex search.
  2. The entropy gain of a skill's goal-coverage mixture is at least the
     expected per-trajectory entropy change (Jensen, concavity of
     entropy), with equality for deterministic skills.
"""

import itertools
import math
from dataclasses import dataclass

import numpy as np

from .history import entropy_from_counts, entropy_of_probs
from .maze import MazeSpec, observe, step
from .skills import SkillSet

__all__ = [
    "PremiseViolation",
    "Prop1Report",
    "Prop2Report",
    "ToyInstance",
    "boltzmann_from_deltas",
    "delta_h",
    "goal_coverage",
    "maze_instance",
    "random_disjoint_instance",
    "random_instance",
    "random_overlapping_instance",
    "skill_coverage",
    "slemp_solve",
    "verify_prop1",
    "verify_prop2",
]


class PremiseViolation(ValueError):
    """An instance does not satisfy the unique-coverage premise."""


@dataclass(frozen=True)
class SkillOutcomes:
    """Exact distribution over the k-step goal sequences one skill yields."""

    outcomes: tuple[tuple[float, tuple], ...]  # (probability, goal sequence)

    def __post_init__(self):
        total = sum(p for p, _ in self.outcomes)
        if abs(total - 1.0) > 1e-12:
            raise ValueError(f"outcome probabilities sum to {total!r}")

    def support_goals(self) -> frozenset:
        return frozenset(g for _, seq in self.outcomes for g in seq)


@dataclass(frozen=True)
class ToyInstance:
    """A context window plus skills with exact trajectory distributions.

    base_goals is the current window's achieved-goal sequence (length C,
    oldest first). After a k-step skill run the window keeps the newest
    C - k of these and appends the k new goals.
    """

    base_goals: tuple
    k: int
    skills: tuple[SkillOutcomes, ...]

    def __post_init__(self):
        if not 1 <= self.k <= len(self.base_goals):
            raise ValueError("need 1 <= k <= C")
        for sk in self.skills:
            for _, seq in sk.outcomes:
                if len(seq) != self.k:
                    raise ValueError("trajectory length differs from k")

    @property
    def C(self) -> int:
        return len(self.base_goals)

    @property
    def retained(self) -> tuple:
        return self.base_goals[self.k:]

    def base_entropy(self) -> float:
        counts = {}
        for g in self.base_goals:
            counts[g] = counts.get(g, 0) + 1
        return entropy_from_counts(counts.values())


def _window_distribution(instance: ToyInstance, new_goals) -> dict:
    counts = {}
    for g in instance.retained:
        counts[g] = counts.get(g, 0) + 1
    for g in new_goals:
        counts[g] = counts.get(g, 0) + 1
    c = instance.C
    return {g: n / c for g, n in counts.items()}


def skill_coverage(instance: ToyInstance, z: int) -> dict:
    """Expected per-goal window occupancy after running skill z."""
    cover = {}
    for p, seq in instance.skills[z].outcomes:
        for g, q in _window_distribution(instance, seq).items():
            cover[g] = cover.get(g, 0.0) + p * q
    return cover


def goal_coverage(instance: ToyInstance, dist) -> dict:
    """Goal-coverage distribution of a skill mix: the expected window
    occupancy of each goal, averaged over skills and trajectories."""
    dist = np.asarray(dist, dtype=float)
    if dist.shape != (len(instance.skills),):
        raise ValueError("distribution size does not match the skill count")
    if np.any(dist < -1e-15) or abs(dist.sum() - 1.0) > 1e-9:
        raise ValueError("not a probability distribution over skills")
    cover = {}
    for z, w in enumerate(dist):
        if w <= 0.0:
            continue
        for g, q in skill_coverage(instance, z).items():
            cover[g] = cover.get(g, 0.0) + w * q
    return cover


def coverage_entropy(cover: dict) -> float:
    return entropy_of_probs(cover.values())


def delta_h(instance: ToyInstance, z: int) -> float:
    """Entropy gain of skill z: coverage entropy minus the current window's."""
    return coverage_entropy(skill_coverage(instance, z)) - instance.base_entropy()


def boltzmann_from_deltas(deltas) -> np.ndarray:
    """Closed-form optimal mix: softmax of the per-skill entropy gains."""
    d = np.asarray(deltas, dtype=float)
    e = np.exp(d - d.max())
    return e / e.sum()


# ---------------------------------------------------------------------------
# Simplex search


def _project_simplex(v: np.ndarray) -> np.ndarray:
    """Euclidean projection onto the probability simplex."""
    u = np.sort(v)[::-1]
    css = np.cumsum(u) - 1.0
    rho = np.flatnonzero(u - css / np.arange(1, v.size + 1) > 0)[-1]
    theta = css[rho] / (rho + 1.0)
    return np.maximum(v - theta, 0.0)


def slemp_solve(instance: ToyInstance, iters: int = 4000,
                grid: float = 1e-3) -> tuple[np.ndarray, float]:
    """Maximize the coverage entropy over the skill simplex.

    Projected gradient ascent from the uniform mix (the objective is
    concave, so this converges to the global maximum), followed by a
    hill-climb on the resolution-`grid` simplex lattice as a safety net;
    the better of the two points is returned with its entropy.
    """
    n = len(instance.skills)
    goals = sorted({g for z in range(n) for g in instance.skills[z].support_goals()}
                   | set(instance.retained), key=repr)
    gidx = {g: i for i, g in enumerate(goals)}
    q = np.zeros((n, len(goals)))
    for z in range(n):
        for g, val in skill_coverage(instance, z).items():
            q[z, gidx[g]] = val

    def objective(d):
        p = d @ q
        nz = p > 0.0
        return float(-(p[nz] * np.log(p[nz])).sum())

    def grad(d):
        p = d @ q
        safe = np.where(p > 0.0, p, 1.0)
        return -(q * (np.log(safe) + 1.0)).sum(axis=1)

    d = np.full(n, 1.0 / n)
    best = objective(d)
    step_size = 0.5
    stall = 0
    for _ in range(iters):
        cand = _project_simplex(d + step_size * grad(d))
        val = objective(cand)
        if val > best:
            d, best = cand, val
            step_size = min(step_size * 1.5, 10.0)
            stall = 0
        else:
            step_size *= 0.5
            stall += 1
            if stall > 60:
                break

    # Multiplicative polish: exponentiated-gradient steps sharpen the
    # iterate when the mixture is ill-conditioned. Projection can have
    # pinned a coordinate to zero, which a multiplicative update cannot
    # undo, so the polish starts from interior blends of the iterate.
    for blend in (0.9, 0.0):
        cur = blend * d + (1.0 - blend) / n
        cur = cur / cur.sum()
        cur_val = objective(cur)
        eta = 1.0
        for _ in range(iters):
            g = grad(cur)
            g = g - g.max()
            cand = cur * np.exp(eta * g)
            cand /= cand.sum()
            val = objective(cand)
            if val > cur_val:
                cur, cur_val = cand, val
                eta = min(eta * 1.5, 50.0)
            else:
                eta *= 0.5
                if eta < 1e-12:
                    break
        if cur_val > best:
            d, best = cur, cur_val

    # Lattice hill-climb at the requested resolution.
    units = np.floor(d / grid).astype(int)
    deficit = int(round(1.0 / grid)) - units.sum()
    order = np.argsort(-(d / grid - units))
    for i in order[:deficit]:
        units[i] += 1
    lattice = units * grid
    lattice_val = objective(lattice)
    improved = True
    while improved:
        improved = False
        for i, j in itertools.permutations(range(n), 2):
            if units[i] == 0:
                continue
            units[i] -= 1
            units[j] += 1
            val = objective(units * grid)
            if val > lattice_val + 1e-15:
                lattice_val = val
                improved = True
            else:
                units[i] += 1
                units[j] -= 1
    if lattice_val > best:
        d, best = units * grid, lattice_val
    return d, best


# ---------------------------------------------------------------------------
# Proposition reports


@dataclass(frozen=True)
class Prop1Report:
    ok: bool
    tv_distance: float
    objective_gap: float
    closed_form: tuple
    solver: tuple

    def line(self, label="") -> str:
        status = "PASS" if self.ok else "FAIL"
        return (f"prop1 {label} tv={self.tv_distance:.3e} "
                f"gap={self.objective_gap:.3e} {status}")


@dataclass(frozen=True)
class Prop2Report:
    ok: bool
    min_slack: float
    slacks: tuple

    def line(self, label="") -> str:
        status = "PASS" if self.ok else "FAIL"
        return f"prop2 {label} min_slack={self.min_slack:.3e} {status}"


def check_unique_coverage(instance: ToyInstance) -> None:
    """Reject instances where some goal is covered by two skills (the whole
    window counts, so any retained goal breaks uniqueness as well)."""
    supports = []
    for z in range(len(instance.skills)):
        supports.append(frozenset(skill_coverage(instance, z)))
    for i, j in itertools.combinations(range(len(supports)), 2):
        shared = supports[i] & supports[j]
        if shared:
            raise PremiseViolation(
                f"goal {sorted(shared, key=repr)[0]!r} is covered by skills "
                f"{i} and {j}"
            )


def verify_prop1(instance: ToyInstance, tol_tv: float = 2e-3,
                 tol_gap: float = 1e-6, enforce_premise: bool = True) -> Prop1Report:
    """Compare the closed-form Boltzmann mix against the simplex search.

    With enforce_premise the unique-coverage requirement is checked first
    and violating instances are rejected; disabling it allows negative
    controls that demonstrate the premise matters.
    """
    if enforce_premise:
        check_unique_coverage(instance)
    deltas = [delta_h(instance, z) for z in range(len(instance.skills))]
    p_star = boltzmann_from_deltas(deltas)
    d_solve, h_solve = slemp_solve(instance)
    h_star = coverage_entropy(goal_coverage(instance, p_star))
    tv = 0.5 * float(np.abs(p_star - d_solve).sum())
    gap = abs(h_star - h_solve)
    ok = tv <= tol_tv and gap <= tol_gap
    return Prop1Report(
        ok=ok, tv_distance=tv, objective_gap=gap,
        closed_form=tuple(p_star), solver=tuple(d_solve),
    )


def verify_prop2(instance: ToyInstance, tol: float = 1e-12) -> Prop2Report:
    """Check mixture entropy >= expected per-trajectory entropy, per skill."""
    base = instance.base_entropy()
    slacks = []
    for z in range(len(instance.skills)):
        mixture = coverage_entropy(skill_coverage(instance, z)) - base
        expected = 0.0
        for p, seq in instance.skills[z].outcomes:
            w = _window_distribution(instance, seq)
            expected += p * (entropy_of_probs(w.values()) - base)
        slacks.append(mixture - expected)
    min_slack = min(slacks)
    return Prop2Report(ok=min_slack >= -tol, min_slack=min_slack,
                       slacks=tuple(slacks))


# ---------------------------------------------------------------------------
# Instance construction


def maze_instance(spec: MazeSpec, start_cell, skills: SkillSet,
                  base_goals, prune: float = 0.0) -> ToyInstance:
    """Enumerate every k-step trajectory of each skill from a maze cell.

    Transitions are deterministic, so a trajectory is an action sequence
    with probability given by the skill's per-action masses; sequences
    below `prune` probability are dropped and the rest renormalized.
    """
    k = skills.horizon
    outcomes_per_skill = []
    for skill in skills.skills:
        probs = skill.action_probs()
        outs = []
        for seq in itertools.product(range(4), repeat=k):
            p = 1.0
            for a in seq:
                p *= probs[a]
            if p <= prune:
                continue
            s = observe(spec, start_cell)
            goals = []
            for a in seq:
                s = step(spec, s, a)
                goals.append(s.cell)
            outs.append((p, tuple(goals)))
        total = sum(p for p, _ in outs)
        outs = [(p / total, seq) for p, seq in outs]
        outcomes_per_skill.append(SkillOutcomes(outcomes=tuple(outs)))
    return ToyInstance(base_goals=tuple(base_goals), k=k,
                       skills=tuple(outcomes_per_skill))


def _random_outcomes(rng, alphabet, k, max_outcomes=3) -> SkillOutcomes:
    distinct = len(alphabet) ** k
    m = min(int(rng.integers(1, max_outcomes + 1)), distinct)
    seqs = set()
    while len(seqs) < m:
        seqs.add(tuple(alphabet[int(rng.integers(0, len(alphabet)))]
                       for _ in range(k)))
    seqs = sorted(seqs)
    raw = rng.random(len(seqs)) + 0.1
    probs = raw / raw.sum()
    probs[-1] = 1.0 - probs[:-1].sum()
    return SkillOutcomes(outcomes=tuple(zip(probs.tolist(), seqs)))


def random_disjoint_instance(rng: np.random.Generator) -> ToyInstance:
    """Instance satisfying unique coverage: per-skill goal alphabets are
    disjoint and the window is fully replaced by the skill run (C = k), so
    no retained goal is shared between skills."""
    n_skills = int(rng.integers(2, 5))
    k = int(rng.integers(1, 4))
    base = tuple(("base", int(rng.integers(0, k + 1))) for _ in range(k))
    skills = []
    for z in range(n_skills):
        alphabet = [("skill", z, j) for j in range(int(rng.integers(2, 5)))]
        skills.append(_random_outcomes(rng, alphabet, k))
    return ToyInstance(base_goals=base, k=k, skills=tuple(skills))


def random_overlapping_instance(rng: np.random.Generator) -> ToyInstance:
    """Negative control: all skills draw goals from one shared alphabet."""
    n_skills = int(rng.integers(2, 5))
    k = int(rng.integers(1, 4))
    base = tuple(("base", i) for i in range(k))
    alphabet = [("shared", j) for j in range(3)]
    skills = [_random_outcomes(rng, alphabet, k) for _ in range(n_skills)]
    return ToyInstance(base_goals=base, k=k, skills=tuple(skills))


def random_instance(rng: np.random.Generator) -> ToyInstance:
    """General instance for the Jensen bound: any C in [k, 6], overlap fine."""
    n_skills = int(rng.integers(2, 5))
    k = int(rng.integers(1, 4))
    c = int(rng.integers(k, 7))
    goal_pool = [("g", j) for j in range(int(rng.integers(2, 7)))]
    base = tuple(goal_pool[int(rng.integers(0, len(goal_pool)))] for _ in range(c))
    skills = [_random_outcomes(rng, goal_pool, k) for _ in range(n_skills)]
    return ToyInstance(base_goals=base, k=k, skills=tuple(skills))


def sweep_prop1(n_instances: int = 100, seed: int = 0,
                tol_tv: float = 2e-3, tol_gap: float = 1e-6):
    """Run the Boltzmann-optimality check on random unique-coverage
    instances plus one negative control; returns (reports, lines)."""
    rng = np.random.default_rng(seed)
    reports, lines = [], []
    made = 0
    while made < n_instances:
        inst = random_disjoint_instance(rng)
        try:
            rep = verify_prop1(inst, tol_tv, tol_gap)
        except PremiseViolation:
            continue
        made += 1
        reports.append(rep)
        lines.append(rep.line(f"seed={seed} i={made}"))
    return reports, lines


def sweep_prop2(n_instances: int = 100, seed: int = 0, tol: float = 1e-12):
    rng = np.random.default_rng(seed)
    reports, lines = [], []
    for i in range(n_instances):
        inst = random_instance(rng)
        rep = verify_prop2(inst, tol)
        reports.append(rep)
        lines.append(rep.line(f"seed={seed} i={i + 1}"))
    return reports, lines


def negative_control_prop1(seed: int = 0, tol_tv: float = 2e-3,
                           tol_gap: float = 1e-6, attempts: int = 20):
    """Reports for overlapping-coverage instances with the premise check
    bypassed; at least one is expected to fail the Boltzmann match."""
    rng = np.random.default_rng(seed)
    reports = []
    for _ in range(attempts):
        inst = random_overlapping_instance(rng)
        reports.append(verify_prop1(inst, tol_tv, tol_gap,
                                    enforce_premise=False))
    return reports
