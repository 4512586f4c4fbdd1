"""Deterministic discrete grid mazes with per-cell wall masks.

Cells are addressed by (x, y) with (0, 0) at the bottom-left. Each cell
carries a 4-bit wall mask (bit0=N, bit1=E, bit2=S, bit3=W). Moving into a
wall is a legal no-op ("bump"). Three corridor layouts are built in:

  spiral      10x10 counterclockwise spiral, start bottom-left, goal at the
              spiral's innermost cell.
  spiral_c    the clockwise twin (mirror across the x=y diagonal, so the
              start stays at the bottom-left corner).
  serpentine  ten horizontal corridors joined alternately at their ends,
              goal at the far end of the snake.

Layout document format (see load_maze):

  line 1:        "W H"
  lines 2..H+1:  H rows of W hex digits, one per cell; the first row is the
                 top of the maze (y = H-1), the last is the bottom (y = 0)
  then:          "S x y" (start), followed by one or more "G x y" (goals)
"""

from dataclasses import dataclass
from enum import IntEnum

__all__ = [
    "Action",
    "MazeSpec",
    "Observation",
    "MazeFormatError",
    "achieved_goal",
    "builtin_names",
    "dump_layout",
    "load_builtin",
    "load_maze",
    "observe",
    "reset",
    "shortest_path_length",
    "sparse_reward",
    "step",
]


class Action(IntEnum):
    N = 0
    E = 1
    S = 2
    W = 3


# Displacement per action, indexed by Action value.
DX = (0, 1, 0, -1)
DY = (1, 0, -1, 0)

N_ACTIONS = 4


def opposite(direction: int) -> int:
    return (direction + 2) % 4


class MazeFormatError(ValueError):
    """Raised for malformed or inconsistent layout documents."""


@dataclass(frozen=True)
class MazeSpec:
    """Immutable maze layout: wall masks, start cell and desired goal cells."""

    width: int
    height: int
    walls: tuple[int, ...]  # row-major, index = y * width + x
    start: tuple[int, int]
    desired_goals: frozenset[tuple[int, int]]

    def in_bounds(self, x: int, y: int) -> bool:
        return 0 <= x < self.width and 0 <= y < self.height

    def wall_mask(self, x: int, y: int) -> int:
        return self.walls[y * self.width + x]

    def has_wall(self, x: int, y: int, direction: int) -> bool:
        return bool(self.wall_mask(x, y) >> direction & 1)

    def cells(self):
        for y in range(self.height):
            for x in range(self.width):
                yield (x, y)

    def n_cells(self) -> int:
        return self.width * self.height


@dataclass(frozen=True)
class Observation:
    """Agent view of one cell: position, within-cell offset, adjacent walls.

    Serializes to exactly 8 scalar channels; the offset channels are fixed
    at (0, 0) in this unit-cell build but kept so the observation shape is
    stable.
    """

    cell: tuple[int, int]
    offset: tuple[float, float]
    wall_bits: tuple[bool, bool, bool, bool]  # N, E, S, W

    def channels(self) -> tuple[float, ...]:
        x, y = self.cell
        ox, oy = self.offset
        return (float(x), float(y), ox, oy) + tuple(map(float, self.wall_bits))


def observe(spec: MazeSpec, cell: tuple[int, int]) -> Observation:
    """Build the observation for a cell of the given maze."""
    x, y = cell
    if not spec.in_bounds(x, y):
        raise ValueError(f"cell {cell} outside {spec.width}x{spec.height} grid")
    mask = spec.wall_mask(x, y)
    bits = tuple(bool(mask >> d & 1) for d in range(4))
    return Observation(cell=(x, y), offset=(0.0, 0.0), wall_bits=bits)


def reset(spec: MazeSpec) -> Observation:
    return observe(spec, spec.start)


def step(spec: MazeSpec, s: Observation, a: int) -> Observation:
    """Move one cell in direction a unless a wall blocks it (then stay put)."""
    x, y = s.cell
    if s.wall_bits[a]:
        return s
    return observe(spec, (x + DX[a], y + DY[a]))


def achieved_goal(s: Observation) -> tuple[int, int]:
    """Goal-space projection of a state: the occupied cell."""
    return s.cell


def sparse_reward(s_next: Observation, goal: tuple[int, int]) -> float:
    """0 when the next state achieves the goal cell, -1 otherwise."""
    return 0.0 if achieved_goal(s_next) == goal else -1.0


# ---------------------------------------------------------------------------
# Layout documents


def _check_consistency(width, height, walls, lineno_of_row):
    for y in range(height):
        for x in range(width):
            mask = walls[y * width + x]
            for d in range(4):
                nx, ny = x + DX[d], y + DY[d]
                has = bool(mask >> d & 1)
                if not (0 <= nx < width and 0 <= ny < height):
                    if not has:
                        raise MazeFormatError(
                            f"line {lineno_of_row(y)}: cell ({x},{y}) lacks its "
                            f"boundary wall on side {Action(d).name}"
                        )
                elif has != bool(walls[ny * width + nx] >> opposite(d) & 1):
                    raise MazeFormatError(
                        f"line {lineno_of_row(y)}: cell ({x},{y}) side "
                        f"{Action(d).name} disagrees with cell ({nx},{ny})"
                    )


def load_maze(text: str) -> MazeSpec:
    """Parse a layout document into a MazeSpec.

    Raises MazeFormatError (with the offending line number) for a malformed
    header, bad wall rows, inconsistent wall bits, or start/goal cells
    outside the grid.
    """
    lines = text.splitlines()
    if not lines:
        raise MazeFormatError("line 1: empty document")
    header = lines[0].split()
    if len(header) != 2:
        raise MazeFormatError("line 1: expected 'W H' header")
    try:
        width, height = int(header[0]), int(header[1])
    except ValueError:
        raise MazeFormatError("line 1: non-integer dimensions") from None
    if width < 1 or height < 1:
        raise MazeFormatError("line 1: dimensions must be positive")
    if len(lines) < 1 + height + 2:
        raise MazeFormatError(f"line {len(lines)}: truncated document")

    walls = [0] * (width * height)
    for row in range(height):
        lineno = 2 + row
        y = height - 1 - row  # first wall row is the top of the maze
        digits = lines[1 + row].strip()
        if len(digits) != width:
            raise MazeFormatError(
                f"line {lineno}: expected {width} hex digits, got {len(digits)}"
            )
        for x, ch in enumerate(digits):
            try:
                walls[y * width + x] = int(ch, 16)
            except ValueError:
                raise MazeFormatError(
                    f"line {lineno}: invalid hex digit {ch!r}"
                ) from None

    _check_consistency(width, height, walls, lambda y: 2 + (height - 1 - y))

    start = None
    goals = []
    for i, line in enumerate(lines[1 + height:], start=2 + height):
        fields = line.split()
        if not fields:
            continue
        if fields[0] not in ("S", "G") or len(fields) != 3:
            raise MazeFormatError(f"line {i}: expected 'S x y' or 'G x y'")
        try:
            x, y = int(fields[1]), int(fields[2])
        except ValueError:
            raise MazeFormatError(f"line {i}: non-integer coordinate") from None
        if not (0 <= x < width and 0 <= y < height):
            raise MazeFormatError(f"line {i}: cell ({x},{y}) outside grid")
        if fields[0] == "S":
            if start is not None:
                raise MazeFormatError(f"line {i}: duplicate start")
            start = (x, y)
        else:
            goals.append((x, y))
    if start is None:
        raise MazeFormatError(f"line {len(lines)}: missing 'S x y'")
    if not goals:
        raise MazeFormatError(f"line {len(lines)}: missing 'G x y'")

    return MazeSpec(
        width=width,
        height=height,
        walls=tuple(walls),
        start=start,
        desired_goals=frozenset(goals),
    )


def dump_layout(spec: MazeSpec) -> str:
    """Render a MazeSpec back into the layout document format."""
    out = [f"{spec.width} {spec.height}"]
    for y in range(spec.height - 1, -1, -1):
        out.append("".join(f"{spec.wall_mask(x, y):x}" for x in range(spec.width)))
    out.append(f"S {spec.start[0]} {spec.start[1]}")
    for gx, gy in sorted(spec.desired_goals):
        out.append(f"G {gx} {gy}")
    return "\n".join(out) + "\n"


# ---------------------------------------------------------------------------
# Built-in corridor mazes

_TURN_CCW = (Action.E, Action.N, Action.W, Action.S)
_TURN_CW = (Action.N, Action.E, Action.S, Action.W)


def _spiral_path(width, height, clockwise=False):
    """Single spiral path from (0, 0) visiting every cell once."""
    order = _TURN_CW if clockwise else _TURN_CCW
    visited = {(0, 0)}
    path = [(0, 0)]
    x, y = 0, 0
    di = 0
    while len(path) < width * height:
        d = order[di % 4]
        nx, ny = x + DX[d], y + DY[d]
        if 0 <= nx < width and 0 <= ny < height and (nx, ny) not in visited:
            x, y = nx, ny
            visited.add((x, y))
            path.append((x, y))
        else:
            di += 1
    return path


def _serpentine_path(width, height):
    path = []
    for y in range(height):
        xs = range(width) if y % 2 == 0 else range(width - 1, -1, -1)
        path.extend((x, y) for x in xs)
    return path


def _path_maze(width, height, path):
    """Walls everywhere except between consecutive path cells."""
    walls = [0xF] * (width * height)
    for (x0, y0), (x1, y1) in zip(path, path[1:]):
        for d in range(4):
            if (x0 + DX[d], y0 + DY[d]) == (x1, y1):
                walls[y0 * width + x0] &= ~(1 << d)
                walls[y1 * width + x1] &= ~(1 << opposite(d))
                break
        else:
            raise ValueError("path cells are not adjacent")
    return MazeSpec(
        width=width,
        height=height,
        walls=tuple(walls),
        start=path[0],
        desired_goals=frozenset({path[-1]}),
    )


def _make_builtin(name: str) -> MazeSpec:
    if name == "spiral":
        return _path_maze(10, 10, _spiral_path(10, 10))
    if name == "spiral_c":
        return _path_maze(10, 10, _spiral_path(10, 10, clockwise=True))
    if name == "serpentine":
        return _path_maze(10, 10, _serpentine_path(10, 10))
    raise KeyError(f"unknown builtin maze {name!r}")


_BUILTINS = {n: _make_builtin(n) for n in ("spiral", "spiral_c", "serpentine")}


def builtin_names() -> tuple[str, ...]:
    return tuple(_BUILTINS)


def load_builtin(name: str) -> MazeSpec:
    try:
        return _BUILTINS[name]
    except KeyError:
        raise KeyError(
            f"unknown maze {name!r}; built-ins: {', '.join(_BUILTINS)}"
        ) from None


def shortest_path_length(spec: MazeSpec, src: tuple[int, int],
                         dst: tuple[int, int]) -> int | None:
    """Breadth-first shortest path length in steps, or None if unreachable."""
    if src == dst:
        return 0
    frontier = [src]
    dist = {src: 0}
    while frontier:
        nxt = []
        for (x, y) in frontier:
            mask = spec.wall_mask(x, y)
            for d in range(4):
                if mask >> d & 1:
                    continue
                cell = (x + DX[d], y + DY[d])
                if cell not in dist:
                    dist[cell] = dist[(x, y)] + 1
                    if cell == dst:
                        return dist[cell]
                    nxt.append(cell)
        frontier = nxt
    return None
