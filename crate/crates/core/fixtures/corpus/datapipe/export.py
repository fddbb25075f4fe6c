# Write aggregates back out as delimited text.
import os

from aggregate import mean_by_group
from reader import read_records


def format_row(tag, value, sep=','):
    return '%s%s%.4f' % (tag, sep, value)


def export_means(src, dst, key, field):
    records = read_records(src)
    means = mean_by_group(records, key, field)
    lines = []
    for tag in sorted(means):
        lines.append(format_row(tag, means[tag]))
    with open(dst, 'w') as handle:
        handle.write('\n'.join(lines))
        handle.write('\n')
    return os.path.getsize(dst)
