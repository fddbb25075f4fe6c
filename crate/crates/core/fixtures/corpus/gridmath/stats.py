"""Running mean and variance for cell samples."""
import math


class Moments:
    def __init__(self):
        self.count = 0
        self.mean = 0.0
        self.m2 = 0.0

    def push(self, x):
        self.count += 1
        delta = x - self.mean
        self.mean += delta / self.count
        self.m2 += delta * (x - self.mean)

    def variance(self):
        if self.count == 0:
            return 0.0
        return self.m2 / self.count

    def std(self):
        return math.sqrt(self.variance())


def summarize(values):
    moments = Moments()
    for value in values:
        moments.push(value)
    return {'count': moments.count, 'mean': moments.mean, 'std': moments.std()}
