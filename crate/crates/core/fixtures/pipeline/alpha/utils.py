def helper(data):
    size = len(data)
    return size + 1


def fmt_name(name):
    settings = parse_config('app.cfg')
    return settings + name
