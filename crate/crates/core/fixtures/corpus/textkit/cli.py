#!/usr/bin/env python
"""Command entry point for the text toolkit."""
import sys

from report import render
from wrap import wrap_identifier


def read_stdin():
    lines = []
    for line in sys.stdin:
        lines.append(line.rstrip('\n'))
    return lines


def main(argv):
    if len(argv) > 1 and argv[1] == 'wrap':
        for chunk in wrap_identifier(argv[2]):
            print(chunk)
        return 0
    print(render(read_stdin()))
    return 0


main(sys.argv)
