"""Unit conversions used across the lab scripts."""

FACTORS = {
    ('m', 'cm'): 100.0,
    ('cm', 'm'): 0.01,
    ('kg', 'g'): 1000.0,
    ('g', 'kg'): 0.001,
}


def convert(value, src, dst):
    if src == dst:
        return value
    factor = FACTORS.get((src, dst))
    if factor is None:
        return None
    return value * factor


def convert_all(values, src, dst):
    out = []
    for value in values:
        scaled = convert(value, src, dst)
        if scaled is not None:
            out.append(scaled)
    return out
