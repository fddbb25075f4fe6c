# Minimal template substitution.
PAGE_SHELL = """<html><head><title>{title}</title></head>
<body>{body}</body></html>"""


def escape(text):
    out = text.replace('&', '&amp;')
    out = out.replace('<', '&lt;')
    return out.replace('>', '&gt;')


def render_page(name, query):
    title = escape(name.replace('-', ' '))
    rows = []
    for key in sorted(query):
        rows.append('<li>%s = %s</li>' % (escape(key), escape(str(query[key]))))
    body = '<h1>%s</h1><ul>%s</ul>' % (title, ''.join(rows))
    return PAGE_SHELL.format(title=title, body=body)
