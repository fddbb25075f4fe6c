"""Schema checks for incoming records."""

SCHEMA = {
    'name': str,
    'region': str,
    'amount': float,
}


def problems(record):
    issues = []
    for field in SCHEMA:
        if field not in record:
            issues.append('missing:' + field)
    for field, value in record.items():
        if field not in SCHEMA:
            issues.append('unknown:' + field)
        elif value == '':
            issues.append('empty:' + field)
    return issues


def partition(records):
    good = []
    bad = []
    for record in records:
        if problems(record):
            bad.append(record)
        else:
            good.append(record)
    return good, bad
