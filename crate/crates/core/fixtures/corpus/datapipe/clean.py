"""Record-level cleaning passes."""


def drop_empty(records, required):
    kept = []
    for record in records:
        complete = True
        for field in required:
            if not record.get(field):
                complete = False
                break
        if complete:
            kept.append(record)
    return kept


def coerce_numbers(records, fields):
    for record in records:
        for field in fields:
            raw = record.get(field)
            if raw is None:
                continue
            text = raw.replace('.', '', 1)
            if text.isdigit():
                record[field] = float(raw)
    return records


def dedupe(records, key):
    seen = set()
    unique = []
    for record in records:
        tag = record.get(key)
        if tag in seen:
            continue
        seen.add(tag)
        unique.append(record)
    return unique
