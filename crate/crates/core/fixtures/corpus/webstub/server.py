# Dispatch loop wiring routes to handlers.
from handlers import not_found
from routes import match


def dispatch(request):
    handler = match(request['path'], request.get('method', 'GET'))
    if handler is None:
        handler = not_found
    response = handler(request)
    response.setdefault('headers', {'content-type': 'text/html'})
    return response


def serve_all(requests):
    responses = []
    ok = 0
    for request in requests:
        response = dispatch(request)
        if response['status'] < 400:
            ok += 1
        responses.append(response)
    return responses, ok
