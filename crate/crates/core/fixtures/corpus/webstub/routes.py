# Route table with simple prefix matching.
ROUTES = []


def route(pattern, methods=None):
    def bind(handler):
        ROUTES.append((pattern, methods or ['GET'], handler))
        return handler
    return bind


def match(path, method='GET'):
    for pattern, methods, handler in ROUTES:
        if method not in methods:
            continue
        if path == pattern:
            return handler
        if pattern.endswith('*') and path.startswith(pattern[:-1]):
            return handler
    return None
