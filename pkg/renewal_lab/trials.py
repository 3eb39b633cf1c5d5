"""
Parallel trial execution
Runs independent Monte Carlo trials on a thread pool and returns their
results in trial order, so reductions never depend on the thread count
"""

import logging
import threading
import time
from concurrent.futures import ThreadPoolExecutor
from typing import Callable, List, Optional, TypeVar

import numpy as np

from .config import get_settings
from .error_models import ValidationFailure

logger = logging.getLogger(__name__)

T = TypeVar("T")


class TrialRunner:
    """
    Executes trial functions over contiguous chunks of trial indices

    Every trial writes into its own slot of an index-addressed buffer;
    the caller reduces the buffer sequentially.
    """

    def __init__(self, threads: Optional[int] = None, chunk_size: Optional[int] = None):
        """
        Initialize trial runner

        Args:
            threads: Worker threads (default: RENEWAL_LAB_THREADS or CPU count)
            chunk_size: Trials per work item (default: RENEWAL_LAB_CHUNK_SIZE)
        """
        settings = get_settings()
        self.threads = threads or settings.threads
        self.chunk_size = chunk_size or settings.chunk_size
        self._lock = threading.Lock()
        self._completed = 0

        if self.threads < 1:
            raise ValidationFailure(f"threads must be at least 1, got {self.threads}")

    def map(self, trial_fn: Callable[[int], T], n_trials: int, operation: str = "trials") -> List[T]:
        """
        Run trial_fn(i) for i in range(n_trials)

        Args:
            trial_fn: Function of the trial index; must draw only from its own substream
            n_trials: Number of trials
            operation: Description of operation for logging

        Returns:
            Results ordered by trial index
        """
        if n_trials < 1:
            raise ValidationFailure(f"n_trials must be positive, got {n_trials}")

        results: List[Optional[T]] = [None] * n_trials
        chunks = [range(start, min(start + self.chunk_size, n_trials))
                  for start in range(0, n_trials, self.chunk_size)]
        self._completed = 0

        def run_chunk(indices: range) -> None:
            for i in indices:
                results[i] = trial_fn(i)
            with self._lock:
                self._completed += len(indices)
            logger.debug(f"{operation}: {self._completed}/{n_trials} trials done")

        start_time = time.time()
        logger.info(f"Starting {operation}: {n_trials} trials on {self.threads} thread(s)")

        if self.threads == 1 or len(chunks) == 1:
            for chunk in chunks:
                run_chunk(chunk)
        else:
            with ThreadPoolExecutor(max_workers=self.threads) as executor:
                # list() re-raises the first worker exception here
                list(executor.map(run_chunk, chunks))

        logger.info(f"{operation} finished in {time.time() - start_time:.2f}s")
        return results  # type: ignore[return-value]

    def map_array(self, trial_fn: Callable[[int], float], n_trials: int,
                  dtype=float, operation: str = "trials") -> np.ndarray:
        return np.asarray(self.map(trial_fn, n_trials, operation), dtype=dtype)
