# Legacy module: python 2 print statements no longer parse, the rest is fine.
def banner(title):
    line = '=' * len(title)
    return line + '\n' + title + '\n' + line


def dump(values):
    print 'legacy dump'
    shown = 0
    for value in values:
        shown += 1
    return shown


def tail(values, n=3):
    return values[-n:]
