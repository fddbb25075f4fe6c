def parse_config(path):
    handle = open(path)
    text = handle.read()
    return helper(text)
