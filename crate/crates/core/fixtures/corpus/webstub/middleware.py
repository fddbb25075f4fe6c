"""Request decoration applied before dispatch."""
import time


def with_timing(handler):
    def timed(request):
        started = time.time()
        response = handler(request)
        response['elapsed_ms'] = (time.time() - started) * 1000.0
        return response
    return timed


def with_request_id(handler, prefix='req'):
    state = {'next': 0}

    def tagged(request):
        state['next'] += 1
        request['id'] = '%s-%04d' % (prefix, state['next'])
        return handler(request)
    return tagged


def chain(handler, wrappers):
    wrapped = handler
    for wrapper in wrappers:
        wrapped = wrapper(wrapped)
    return wrapped
