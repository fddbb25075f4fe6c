"""Tiny whitespace tokenizer with span bookkeeping."""


class SpanToken:
    def __init__(self, text, start, end):
        self.text = text
        self.start = start
        self.end = end

    def width(self):
        return self.end - self.start


def scan(text):
    tokens = []
    start = None
    for index in range(len(text)):
        ch = text[index]
        if ch == ' ' or ch == '\t':
            if start is not None:
                tokens.append(SpanToken(text[start:index], start, index))
                start = None
        elif start is None:
            start = index
    if start is not None:
        tokens.append(SpanToken(text[start:], start, len(text)))
    return tokens


def spans(text):
    pairs = []
    for token in scan(text):
        pairs.append((token.start, token.end))
    return pairs
