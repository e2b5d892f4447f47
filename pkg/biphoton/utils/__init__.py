from biphoton.utils.file_io import FileHandler
from biphoton.utils.parallel import ParallelProcessor

__all__ = ['FileHandler', 'ParallelProcessor']
