# pool.py
#
# Worker processes for the block scans in runs, sieve and digits. Every caller
# consumes results in submission order, so only order-preserving maps are
# handed out.

import concurrent.futures
import logging

logger = logging.getLogger("primeruns.pool")


class WorkerMap:
    """Context manager yielding `map`, or an order-preserving process-pool map."""

    def __init__(self, threads: int):
        self.threads = max(1, threads)
        self.executor = None

    def __enter__(self):
        if self.threads > 1:
            logger.debug("starting %d worker processes", self.threads)
            self.executor = concurrent.futures.ProcessPoolExecutor(max_workers=self.threads)
            return self.executor.map
        return map

    def __exit__(self, *exc):
        if self.executor is not None:
            self.executor.shutdown()
            self.executor = None
        return False
