# Naive paragraph wrapping.
from casing import split_words


def wrap_line(words, width=72):
    lines = []
    current = []
    used = 0
    for word in words:
        cost = len(word) + 1
        if used + cost > width and current:
            lines.append(' '.join(current))
            current = []
            used = 0
        current.append(word)
        used += cost
    if current:
        lines.append(' '.join(current))
    return lines


def wrap_identifier(name, width=24):
    words = split_words(name)
    return wrap_line(words, width=width)
