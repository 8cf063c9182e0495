import os


def worker_count() -> int:
    """Worker cap from ``QCORR_THREADS``; hardware default when unset."""
    raw = os.environ.get("QCORR_THREADS")
    if raw:
        try:
            return max(1, int(raw))
        except ValueError:
            pass
    return os.cpu_count() or 1
