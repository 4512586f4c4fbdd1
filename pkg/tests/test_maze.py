import pytest

from geasd.maze import (
    Action,
    MazeFormatError,
    achieved_goal,
    builtin_names,
    dump_layout,
    load_builtin,
    load_maze,
    observe,
    reset,
    shortest_path_length,
    sparse_reward,
    step,
)

ONE_CELL = "1 1\nf\nS 0 0\nG 0 0\n"


def test_builtin_names():
    assert set(builtin_names()) == {"spiral", "spiral_c", "serpentine"}


def test_spiral_shape_and_endpoints():
    spec = load_builtin("spiral")
    assert (spec.width, spec.height) == (10, 10)
    assert spec.start == (0, 0)  # bottom-left
    assert spec.desired_goals == frozenset({(4, 5)})  # spiral center


def test_spiral_unique_long_corridor():
    spec = load_builtin("spiral")
    goal = next(iter(spec.desired_goals))
    assert shortest_path_length(spec, spec.start, goal) == 99
    # single corridor: every cell has at most two open sides
    for x, y in spec.cells():
        open_sides = sum(not spec.has_wall(x, y, d) for d in range(4))
        assert open_sides <= 2


def test_one_cell_maze_never_moves():
    spec = load_maze(ONE_CELL)
    s = reset(spec)
    for a in range(4):
        assert step(spec, s, a).cell == (0, 0)


def test_step_moves_in_open_corridor():
    spec = load_builtin("spiral")
    s = reset(spec)
    assert step(spec, s, Action.E).cell == (1, 0)


def test_step_bump_is_noop():
    spec = load_builtin("spiral")
    s = reset(spec)
    assert step(spec, s, Action.N) is s


def test_step_round_trip():
    spec = load_builtin("serpentine")
    s = observe(spec, (3, 0))  # open corridor along the bottom row
    there = step(spec, s, Action.E)
    back = step(spec, there, Action.W)
    assert back.cell == s.cell


def test_step_never_leaves_grid():
    for name in builtin_names():
        spec = load_builtin(name)
        for cell in spec.cells():
            s = observe(spec, cell)
            for a in range(4):
                nx, ny = step(spec, s, a).cell
                assert spec.in_bounds(nx, ny)


def test_observation_channels():
    spec = load_builtin("spiral")
    ch = reset(spec).channels()
    assert len(ch) == 8
    assert ch[:4] == (0.0, 0.0, 0.0, 0.0)
    assert ch[4:] == (1.0, 0.0, 1.0, 1.0)  # N, S, W walled at start; E open


def test_achieved_goal_is_cell_projection():
    spec = load_builtin("spiral")
    assert achieved_goal(observe(spec, (3, 7))) == (3, 7)
    assert achieved_goal(reset(spec)) == (0, 0)


def test_achieved_goal_ignores_walls():
    a = load_builtin("spiral")
    b = load_builtin("serpentine")
    assert achieved_goal(observe(a, (5, 5))) == achieved_goal(observe(b, (5, 5)))


def test_sparse_reward():
    spec = load_builtin("spiral")
    s = observe(spec, (4, 5))
    assert sparse_reward(s, (4, 5)) == 0.0
    assert sparse_reward(s, (4, 6)) == -1.0
    assert sparse_reward(s, achieved_goal(s)) == 0.0


def test_wall_consistency_of_builtins():
    # boundary walls present; interior walls agree between neighbours
    for name in builtin_names():
        spec = load_builtin(name)
        load_maze(dump_layout(spec))  # load re-validates consistency


def test_layout_round_trip():
    for name in builtin_names():
        spec = load_builtin(name)
        assert load_maze(dump_layout(spec)) == spec


def test_load_rejects_bad_header():
    with pytest.raises(MazeFormatError, match="line 1"):
        load_maze("banana\nf\nS 0 0\nG 0 0\n")


def test_load_rejects_inconsistent_walls():
    # 2x1 maze: cell (0,0) E open but cell (1,0) W closed
    doc = "2 1\n5f\nS 0 0\nG 1 0\n"
    with pytest.raises(MazeFormatError, match="line 2"):
        load_maze(doc)


def test_load_rejects_missing_boundary_wall():
    doc = "1 1\n7\nS 0 0\nG 0 0\n"  # W boundary wall missing
    with pytest.raises(MazeFormatError, match="boundary"):
        load_maze(doc)


def test_load_rejects_start_outside_grid():
    doc = "1 1\nf\nS 3 0\nG 0 0\n"
    with pytest.raises(MazeFormatError, match="outside"):
        load_maze(doc)


def test_load_reports_bad_hex_digit_line():
    doc = "2 2\nff\nfg\nS 0 0\nG 1 1\n"
    with pytest.raises(MazeFormatError, match="line 3"):
        load_maze(doc)


def test_spiral_c_is_diagonal_mirror_of_spiral():
    a = load_builtin("spiral")
    b = load_builtin("spiral_c")
    swap = {0: 1, 1: 0, 2: 3, 3: 2}  # N<->E, S<->W under transpose
    for x, y in a.cells():
        for d in range(4):
            assert a.has_wall(x, y, d) == b.has_wall(y, x, swap[d])


def test_serpentine_rows_alternate():
    spec = load_builtin("serpentine")
    # row joins: even rows connect to the next row at x=9, odd rows at x=0
    assert not spec.has_wall(9, 0, Action.N)
    assert not spec.has_wall(0, 1, Action.N)
    assert spec.has_wall(0, 0, Action.N)
    assert spec.desired_goals == frozenset({(0, 9)})
