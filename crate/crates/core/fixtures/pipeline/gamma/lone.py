def omega(values):
    total = sum(values)
    return omega(total)
