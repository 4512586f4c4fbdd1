import math

import numpy as np
import pytest

from geasd.history import (
    GoalHistogram,
    HistoryContext,
    MaxEntropyTracker,
    entropy_from_counts,
    local_entropy,
    max_recorded_entropy,
    overall_entropy_bound,
    r_info,
)
from geasd.maze import Action, load_builtin, reset, step


def shannon(counts):
    """Independent scalar oracle for the Shannon formula."""
    total = sum(counts)
    return -sum((n / total) * math.log(n / total) for n in counts if n)


def walk_contexts(spec, actions, capacity):
    """Contexts produced by a fixed action sequence from the start."""
    s = reset(spec)
    ctx = HistoryContext.start(capacity, s)
    out = [ctx]
    for a in actions:
        s = step(spec, s, a)
        ctx = ctx.advanced(a, s)
        out.append(ctx)
    return out


def test_histogram_counts_and_total():
    h = GoalHistogram.from_goals([(0, 0), (1, 0), (0, 0)])
    assert h.counts == {(0, 0): 2, (1, 0): 1}
    assert h.total == 3
    assert sum(h.counts.values()) == h.total
    assert all(n > 0 for n in h.counts.values())


def test_context_eviction_and_order():
    spec = load_builtin("serpentine")
    ctxs = walk_contexts(spec, [Action.E] * 6, capacity=4)
    last = ctxs[-1]
    assert len(last) == 4
    assert last.achieved == ((3, 0), (4, 0), (5, 0), (6, 0))
    assert last.t == 6


def test_local_entropy_degenerate_window():
    spec = load_builtin("spiral")
    ctxs = walk_contexts(spec, [Action.N] * 9, capacity=10)  # bumps in place
    assert local_entropy(ctxs[-1]) == 0.0


def test_local_entropy_uniform_window():
    spec = load_builtin("serpentine")
    ctxs = walk_contexts(spec, [Action.E] * 9, capacity=10)
    assert local_entropy(ctxs[-1]) == pytest.approx(math.log(10), abs=1e-12)


def test_local_entropy_frozen_value():
    # counts (3, 1): expected value computed with the scalar oracle
    assert shannon([3, 1]) == pytest.approx(0.5623351446188083, abs=1e-12)
    h = GoalHistogram.from_goals([(0, 0)] * 3 + [(1, 0)])
    assert h.entropy() == pytest.approx(0.5623351446188083, abs=1e-12)


def test_local_entropy_short_window_uses_actual_length():
    spec = load_builtin("serpentine")
    ctxs = walk_contexts(spec, [Action.E, Action.E], capacity=10)
    assert local_entropy(ctxs[2]) == pytest.approx(math.log(3), abs=1e-12)


def test_local_entropy_bounds():
    rng = np.random.default_rng(3)
    spec = load_builtin("spiral")
    for _ in range(50):
        n = int(rng.integers(1, 30))
        ctxs = walk_contexts(spec, rng.integers(0, 4, size=n).tolist(), 10)
        for ctx in ctxs:
            h = local_entropy(ctx)
            assert 0.0 <= h <= math.log(min(len(ctx), 10)) + 1e-12


def test_r_info_zero_for_saturated_window():
    spec = load_builtin("spiral")
    ctxs = walk_contexts(spec, [Action.N] * 11, capacity=10)
    assert r_info(ctxs[-2], ctxs[-1]) == 0.0


def test_r_info_fresh_goal_after_repeats():
    # window of 10 equal goals -> counts (9, 1) after one fresh goal
    spec = load_builtin("spiral")
    actions = [Action.N] * 9 + [Action.E]  # 9 bumps, then a real move
    ctxs = walk_contexts(spec, actions, capacity=10)
    expected = shannon([9, 1])
    assert expected == pytest.approx(0.3250829733914482, abs=1e-12)
    assert r_info(ctxs[-2], ctxs[-1]) == pytest.approx(expected, abs=1e-12)


def test_r_info_antisymmetric_reverse():
    # time-reversed twin of the fresh-goal transition: the lone old goal
    # falls out of the window, counts go (1, 9) -> (10), reward negates
    spec = load_builtin("spiral")
    actions = [Action.E] + [Action.N] * 9  # one real move, then bumps
    ctxs = walk_contexts(spec, actions, capacity=10)
    assert local_entropy(ctxs[9]) == pytest.approx(shannon([1, 9]), abs=1e-12)
    assert r_info(ctxs[9], ctxs[10]) == pytest.approx(
        -0.3250829733914482, abs=1e-12)


def test_r_info_rejects_non_adjacent():
    spec = load_builtin("spiral")
    ctxs = walk_contexts(spec, [Action.E] * 4, capacity=4)
    with pytest.raises(ValueError, match="adjacent"):
        r_info(ctxs[0], ctxs[2])


def test_telescoping_identity_random_walks():
    spec = load_builtin("serpentine")
    rng = np.random.default_rng(11)
    for _ in range(200):
        c = int(rng.integers(2, 12))
        n = int(rng.integers(2, 25))
        ctxs = walk_contexts(spec, rng.integers(0, 4, size=n).tolist(), c)
        total = sum(r_info(a, b) for a, b in zip(ctxs, ctxs[1:]))
        direct = local_entropy(ctxs[-1]) - local_entropy(ctxs[0])
        assert total == pytest.approx(direct, abs=1e-12)


def test_overall_entropy_bound_values():
    assert overall_entropy_bound(2.0, 1.0, 10, 100) == pytest.approx(1.1, abs=1e-12)
    assert overall_entropy_bound(1.7, 0.4, 10, 10) == pytest.approx(1.7, abs=1e-12)
    h = 0.837
    for buffer_len in (10, 20, 1000):
        assert overall_entropy_bound(h, h, 10, buffer_len) == pytest.approx(h, abs=1e-12)


def test_overall_entropy_bound_rejects_short_buffer():
    with pytest.raises(ValueError):
        overall_entropy_bound(1.0, 1.0, 10, 9)


def test_bound_holds_on_disjoint_streams():
    # goals in the window never appear in the past stream; the empirical
    # entropy of the whole buffer must clear the convex bound
    rng = np.random.default_rng(5)
    for _ in range(50):
        c = int(rng.integers(2, 12))
        past_len = int(rng.integers(2 * c, 200))
        past = [("past", int(g)) for g in rng.integers(0, past_len, past_len)]
        window = [("win", int(g)) for g in rng.integers(0, c, c)]
        h_past = shannon(GoalHistogram.from_goals(past).counts.values())
        h_local = shannon(GoalHistogram.from_goals(window).counts.values())
        if h_past < h_local:
            continue  # bound orientation needs the past to dominate
        h_all = shannon(GoalHistogram.from_goals(past + window).counts.values())
        bound = overall_entropy_bound(h_past, h_local, c, past_len + c)
        assert h_all >= bound - 1e-9


def test_max_entropy_tracker():
    tr = MaxEntropyTracker()
    assert tr.observe(0.3) == 0.3
    assert tr.observe(1.1) == 1.1
    assert tr.observe(0.7) == 1.1
    assert tr.max == 1.1


def test_max_recorded_entropy_stream():
    assert max_recorded_entropy([0.3, 1.1, 0.7]) == 1.1
    assert max_recorded_entropy([0.4]) == 0.4
    with pytest.raises(ValueError):
        max_recorded_entropy([])


def test_max_entropy_tracker_monotone():
    rng = np.random.default_rng(9)
    tr = MaxEntropyTracker()
    prev = 0.0
    for v in rng.random(100):
        cur = tr.observe(float(v))
        assert cur >= prev
        prev = cur


def test_entropy_from_counts_rejects_empty():
    with pytest.raises(ValueError):
        entropy_from_counts([])
