def solo(x):
    return solo(x - 1)


def chain(x):
    return run_two(x)
