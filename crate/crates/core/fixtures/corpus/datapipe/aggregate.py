# Grouped sums and means over cleaned records.
from clean import coerce_numbers


def group_by(records, key):
    groups = {}
    for record in records:
        tag = record.get(key, '?')
        if tag not in groups:
            groups[tag] = []
        groups[tag].append(record)
    return groups


def column_mean(records, field):
    records = coerce_numbers(records, [field])
    total = 0.0
    n = 0
    for record in records:
        value = record.get(field)
        if isinstance(value, float):
            total += value
            n += 1
    if n == 0:
        return 0.0
    return total / n


def mean_by_group(records, key, field):
    out = {}
    groups = group_by(records, key)
    for tag in sorted(groups):
        out[tag] = column_mean(groups[tag], field)
    return out
