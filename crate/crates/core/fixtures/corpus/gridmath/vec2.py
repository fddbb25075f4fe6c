"""Plain 2-vector arithmetic."""
import math


class Vec2:
    def __init__(self, x=0.0, y=0.0):
        self.x = x
        self.y = y

    def add(self, other):
        return Vec2(self.x + other.x, self.y + other.y)

    def scale(self, k):
        return Vec2(self.x * k, self.y * k)

    def dot(self, other):
        return self.x * other.x + self.y * other.y

    def norm(self):
        return math.sqrt(self.dot(self))


def lerp(a, b, t):
    if t <= 0.0:
        return a
    if t >= 1.0:
        return b
    return a.add(b.add(a.scale(-1.0)).scale(t))
