def main():
    text = fmt_name('demo')
    grid = np.zeros(3)
    out = helper(grid)
    print(text, out)
    return out
