# Named task registry with decorator registration.
TASKS = {}


def task(name):
    def wrap(fn):
        TASKS[name] = fn
        return fn
    return wrap


@task('noop')
def noop_task(context):
    return context


@task('double')
def double_task(context):
    context['value'] = context.get('value', 0) * 2
    return context


def lookup(name):
    if name in TASKS:
        return TASKS[name]
    return noop_task
