# Drives the sweep and labels each run.
from experiment import sweep
from notes import label_for


def run_matrix(bases, steps=4):
    table = {}
    for base in bases:
        table[base] = sweep(base, steps)
    return table


def describe(runs):
    lines = []
    for run in runs:
        lines.append(run + ': ' + label_for(run))
    return lines


def quick_check():
    table = run_matrix([1.0, 2.0])
    return len(table) == 2
