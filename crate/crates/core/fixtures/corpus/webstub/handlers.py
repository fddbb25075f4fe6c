"""Request handlers for the stub server."""
import json

from routes import route
from render import render_page


@route('/health')
def health(request):
    return {'status': 200, 'body': 'ok'}


@route('/api/echo', methods=['POST'])
def echo(request):
    payload = json.loads(request.get('body', '{}'))
    return {'status': 200, 'body': json.dumps(payload)}


@route('/pages/*')
def pages(request):
    name = request['path'].split('/')[-1]
    html = render_page(name, request.get('query', {}))
    return {'status': 200, 'body': html}


def not_found(request):
    return {'status': 404, 'body': 'missing: ' + request['path']}
