# Sequential task execution with bounded retries.
import time

from config import load_config
from registry import lookup


def run_once(name, context):
    handler = lookup(name)
    started = time.time()
    result = handler(context)
    result['elapsed'] = time.time() - started
    return result


def run_plan(names, path='tasks.cfg'):
    settings = load_config(path)
    context = {'value': 1, 'settings': settings}
    for name in names:
        attempts = 0
        while attempts < 3:
            attempts += 1
            context = run_once(name, context)
            if context is not None:
                break
    return context
