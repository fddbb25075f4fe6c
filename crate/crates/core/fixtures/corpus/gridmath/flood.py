# Iterative flood fill over a grid.
from grid import Grid


def flood_fill(grid, x, y, value):
    target = grid.get(x, y)
    if target == value:
        return grid
    stack = [(x, y)]
    while stack:
        cx, cy = stack.pop()
        if grid.get(cx, cy) != target:
            continue
        grid.put(cx, cy, value)
        for nx, ny in grid.neighbors(cx, cy):
            stack.append((nx, ny))
    return grid


def count_value(grid, value):
    total = 0
    for cell in grid.cells:
        if cell == value:
            total += 1
    return total


def demo():
    grid = Grid(4, 4)
    grid.put(1, 1, 9)
    flood_fill(grid, 0, 0, 5)
    return count_value(grid, 5)
