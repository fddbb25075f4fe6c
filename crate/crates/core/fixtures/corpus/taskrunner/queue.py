"""Bounded FIFO used by the runner."""


class BoundedQueue:
    def __init__(self, capacity=16):
        self.capacity = capacity
        self.items = []

    def push(self, item):
        if len(self.items) >= self.capacity:
            return False
        self.items.append(item)
        return True

    def pop(self):
        if not self.items:
            return None
        return self.items.pop(0)

    def drain(self):
        out = []
        while self.items:
            out.append(self.pop())
        return out


def requeue(queue, items):
    dropped = 0
    for item in items:
        if not queue.push(item):
            dropped += 1
    return dropped
