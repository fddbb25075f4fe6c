# Line-oriented record reader.
def parse_record(line, sep=','):
    fields = line.rstrip('\n').split(sep)
    clean = []
    for field in fields:
        clean.append(field.strip())
    return clean


def read_records(path, sep=','):
    records = []
    with open(path) as handle:
        header = None
        for line in handle:
            fields = parse_record(line, sep=sep)
            if header is None:
                header = fields
                continue
            row = {}
            for i in range(len(header)):
                if i < len(fields):
                    row[header[i]] = fields[i]
            records.append(row)
    return records
