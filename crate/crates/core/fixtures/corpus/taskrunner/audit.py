# Append-only audit trail for task runs.
import json
import time

from queue import BoundedQueue, requeue


class AuditLog:
    def __init__(self, path):
        self.path = path
        self.pending = BoundedQueue(capacity=64)

    def record(self, name, status):
        entry = {'task': name, 'status': status, 'at': time.time()}
        self.pending.push(entry)

    def flush(self):
        with open(self.path, 'a') as handle:
            for entry in self.pending.drain():
                handle.write(json.dumps(entry))
                handle.write('\n')


def replay(path, log):
    entries = []
    with open(path) as handle:
        for line in handle:
            entries.append(json.loads(line))
    return requeue(log.pending, entries)
