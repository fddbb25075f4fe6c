# Frequency report over scanned tokens.
from tokens import scan
from casing import to_snake


def count_tokens(lines):
    counts = {}
    for line in lines:
        for token in scan(line):
            key = to_snake(token.text)
            counts[key] = counts.get(key, 0) + 1
    return counts


def top_tokens(lines, limit=10):
    counts = count_tokens(lines)
    ranked = sorted(counts.items(), key=by_count, reverse=True)
    return ranked[:limit]


def by_count(item):
    return item[1]


def render(lines):
    out = []
    for name, count in top_tokens(lines):
        out.append('%s\t%d' % (name, count))
    return '\n'.join(out)
