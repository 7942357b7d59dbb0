import os
from concurrent.futures import ThreadPoolExecutor


def worker_count():
    """Worker cap from ``RIFSLAB_THREADS``; defaults to the machine's CPU count."""
    raw = os.environ.get("RIFSLAB_THREADS", "").strip()
    if raw:
        try:
            return max(1, int(raw))
        except ValueError:
            pass
    return os.cpu_count() or 1


def parallel_map(fn, items):
    """Order-preserving map; results never depend on the worker count."""
    items = list(items)
    workers = min(worker_count(), len(items))
    if workers <= 1:
        return [fn(item) for item in items]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(fn, items))
