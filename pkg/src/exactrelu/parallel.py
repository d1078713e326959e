"""Order-preserving worker fan-out.

Results always come back in submission order, so any reduction done by the
caller is independent of the number of workers.
"""

from __future__ import annotations

from concurrent.futures import ProcessPoolExecutor


class WorkerPool:
    """``map`` over a process pool, or inline when ``threads <= 1``.

    ``initializer(*initargs)`` installs shared read-only context in every
    worker (and in the current process for the inline path).
    """

    def __init__(self, threads: int = 1, initializer=None, initargs=()):
        self.threads = max(1, int(threads))
        self.initializer = initializer
        self.initargs = initargs
        self._ex = None

    def __enter__(self):
        if self.initializer is not None:
            self.initializer(*self.initargs)
        if self.threads > 1:
            self._ex = ProcessPoolExecutor(
                max_workers=self.threads, initializer=self.initializer, initargs=self.initargs
            )
        return self

    def __exit__(self, *exc):
        if self._ex is not None:
            self._ex.shutdown(wait=True)
            self._ex = None
        return False

    def map(self, fn, items) -> list:
        items = list(items)
        if self._ex is None or len(items) < 2:
            return [fn(x) for x in items]
        chunk = max(1, len(items) // (4 * self.threads))
        return list(self._ex.map(fn, items, chunksize=chunk))
