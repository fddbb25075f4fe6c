# Row-major grid with neighbor lookup.
class Grid:
    def __init__(self, width, height, fill=0):
        self.width = width
        self.height = height
        self.cells = [fill] * (width * height)

    def index(self, x, y):
        return y * self.width + x

    def get(self, x, y):
        return self.cells[self.index(x, y)]

    def put(self, x, y, value):
        self.cells[self.index(x, y)] = value

    def neighbors(self, x, y):
        out = []
        deltas = [(0, 1), (1, 0), (0, -1), (-1, 0)]
        for dx, dy in deltas:
            nx = x + dx
            ny = y + dy
            inside = 0 <= nx < self.width and 0 <= ny < self.height
            if inside:
                out.append((nx, ny))
        return out
