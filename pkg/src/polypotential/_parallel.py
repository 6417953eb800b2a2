"""Ordered parallel map capped by ``POLYPOTENTIAL_THREADS``.

Results always come back in input order, so outputs do not depend on the
worker count. numpy releases the GIL inside the heavy kernels, which is
what makes threads worthwhile here.
"""

import os
from concurrent.futures import ThreadPoolExecutor


def worker_count():
    raw = os.environ.get("POLYPOTENTIAL_THREADS", "1")
    try:
        return max(1, int(raw))
    except ValueError:
        return 1


def pmap(fn, items):
    items = list(items)
    workers = min(worker_count(), len(items))
    if workers <= 1:
        return [fn(item) for item in items]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(fn, items))
