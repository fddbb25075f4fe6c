# Manhattan path heuristics on a grid.
from grid import Grid
from stats import summarize


def manhattan(a, b):
    ax, ay = a
    bx, by = b
    return abs(ax - bx) + abs(ay - by)


def walkable(grid, blocked):
    cells = []
    for y in range(grid.height):
        for x in range(grid.width):
            if grid.get(x, y) not in blocked:
                cells.append((x, y))
    return cells


def spread(grid, blocked):
    distances = []
    cells = walkable(grid, blocked)
    origin = (0, 0)
    for cell in cells:
        distances.append(manhattan(origin, cell))
    return summarize(distances)
