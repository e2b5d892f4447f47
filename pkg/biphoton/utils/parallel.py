import logging
import multiprocessing
from typing import Callable, Iterable, Any, List, Optional
from biphoton.config import Config

logger = logging.getLogger(__name__)

class ParallelProcessor:
    """
    Handles parallel evaluation of independent tasks (scan points, grid periods).

    Results always come back in input order, so the output of a run does not
    depend on how work was scheduled across processes.
    """

    @staticmethod
    def get_available_cores() -> int:
        """Get number of available CPU cores with safety margin."""
        return max(1, multiprocessing.cpu_count() - 1)

    @classmethod
    def resolve_cores(cls, n_cores: Optional[int] = None) -> int:
        """Requested worker count; 0 means auto-detect, None means Config.NUM_CORES."""
        if n_cores is None:
            n_cores = Config.NUM_CORES
        if n_cores == 0:
            n_cores = cls.get_available_cores()
        return max(1, int(n_cores))

    @classmethod
    def parallel_map(cls,
                    func: Callable,
                    iterable: Iterable,
                    n_cores: Optional[int] = None,
                    chunksize: Optional[int] = None) -> List[Any]:
        """
        Ordered map, in a process pool when more than one core is requested.

        Args:
            func: Picklable function to apply
            iterable: Items to process
            n_cores: Number of worker processes (default: Config.NUM_CORES)
            chunksize: Chunk size for workload distribution

        Returns:
            List of results in input order
        """
        items = list(iterable)
        n_cores = cls.resolve_cores(n_cores)
        if n_cores == 1 or len(items) < 2:
            return [func(item) for item in items]

        try:
            with multiprocessing.Pool(processes=n_cores) as pool:
                return pool.map(func, items, chunksize=chunksize)
        except (OSError, RuntimeError, multiprocessing.ProcessError) as e:
            logger.error(f"Parallel map error: {e}")
            logger.info("Falling back to sequential processing")
            return [func(item) for item in items]
