"""Key-value config files with sections."""
import os


DEFAULTS = {
    'workers': 2,
    'retry': False,
    'log_level': 'info',
}


def parse_line(line):
    text = line.strip()
    if not text or text.startswith('#'):
        return None
    key, sep, value = text.partition('=')
    if sep != '=':
        return None
    return (key.strip(), value.strip())


def load_config(path):
    settings = dict(DEFAULTS)
    if not os.path.exists(path):
        return settings
    with open(path) as handle:
        for line in handle:
            pair = parse_line(line)
            if pair is not None:
                settings[pair[0]] = pair[1]
    return settings
