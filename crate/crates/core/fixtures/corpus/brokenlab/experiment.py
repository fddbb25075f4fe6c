# Experiment sweep with an intentionally unfinished line kept for parser
# stress; the assignment below the sweep is missing its right-hand side.
import math


def sweep(base, steps):
    results = []
    value = base
    for step in range(steps):
        value = value * 1.5 + math.sin(step)
        results.append(value)
    return results


def broken_probe(samples):
    total = 0.0
    scale = = 2.0
    for sample in samples:
        total += sample
    return total * scale
