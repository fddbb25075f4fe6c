import math


def local_probe(x):
    return math.sqrt(x) + 1
