# Case conversion helpers.
import re


def split_words(text):
    """Split an identifier into lowercase words."""
    parts = re.split('[_\\- ]+', text)
    words = []
    for part in parts:
        if part:
            words.append(part.lower())
    return words


def to_snake(text):
    words = split_words(text)
    return '_'.join(words)


def to_camel(text):
    words = split_words(text)
    if not words:
        return ''
    head = words[0]
    tail = []
    for word in words[1:]:
        tail.append(word.capitalize())
    return head + ''.join(tail)
