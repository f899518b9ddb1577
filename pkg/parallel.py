"""
Chunked reductions over large index spaces on a thread pool.

Results always come back in submission order, so sums and minima do not
depend on the schedule.
"""
from concurrent.futures import ThreadPoolExecutor
from typing import Callable, List, Optional, Sequence, TypeVar

from tqdm import tqdm

T = TypeVar("T")
R = TypeVar("R")


def map_chunks(fn: Callable[[T], R], chunks: Sequence[T], threads: int = 1,
               progress: bool = False, desc: Optional[str] = None) -> List[R]:
    """
    Apply fn to every chunk, on up to ``threads`` workers.

    Args:
        fn: Work function for one chunk.
        chunks: The chunks, in the order results are returned.
        threads: Worker count; 1 or less runs inline.
        progress: Show a tqdm bar on stderr.
        desc: Label for the progress bar.
    """
    chunks = list(chunks)
    if threads <= 1 or len(chunks) <= 1:
        return [fn(c) for c in tqdm(chunks, desc=desc, disable=not progress)]
    with ThreadPoolExecutor(max_workers=threads) as executor:
        return list(tqdm(
            executor.map(fn, chunks),
            total=len(chunks),
            desc=desc,
            disable=not progress,
        ))


def split_range(total: int, parts: int) -> List[range]:
    """Cut range(total) into at most ``parts`` contiguous, nonempty pieces."""
    parts = max(1, min(parts, total))
    step, extra = divmod(total, parts)
    out, start = [], 0
    for i in range(parts):
        stop = start + step + (1 if i < extra else 0)
        out.append(range(start, stop))
        start = stop
    return out
