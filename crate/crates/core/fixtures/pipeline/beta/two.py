def run_two(x):
    total = 0
    for i in range(x):
        total += i
    return total
