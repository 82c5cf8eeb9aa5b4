"""Counter-based random streams for reproducible, worker-independent Monte Carlo.

Trials are grouped into fixed-size chunks. Chunk i always draws from a Philox
generator keyed by (seed, stream_tag, i), so the same (seed, n_trials) produces
bit-identical results no matter how chunks are scheduled across workers.
"""

import numpy as np

CHUNK = 1 << 16  # trials per chunk; fixed so chunk boundaries never depend on worker count


def chunk_generator(seed: int, stream: int, chunk_index: int) -> np.random.Generator:
    """Generator for one chunk of one named stream."""
    key = np.array([seed & 0xFFFFFFFFFFFFFFFF, stream & 0xFFFFFFFFFFFFFFFF,
                    chunk_index & 0xFFFFFFFFFFFFFFFF, 0x9E3779B97F4A7C15], dtype=np.uint64)
    return np.random.Generator(np.random.Philox(key=key))


def chunk_uniforms(seed: int, stream: int, chunk_index: int, rows: int, cols: int) -> np.ndarray:
    """(rows, cols) uniforms for a chunk; every trial consumes a fixed column budget."""
    return chunk_generator(seed, stream, chunk_index).random((rows, cols))


def iter_chunks(n_total: int):
    """Yield (chunk_index, start, size) covering n_total trials."""
    n_chunks = (n_total + CHUNK - 1) // CHUNK
    for c in range(n_chunks):
        start = c * CHUNK
        yield c, start, min(CHUNK, n_total - start)


def standard_normal_from_uniform(u: np.ndarray) -> np.ndarray:
    """Inverse-CDF normal draw; one uniform per variate keeps the budget fixed."""
    from scipy.special import erfinv
    u = np.clip(u, 1e-12, 1.0 - 1e-12)
    return np.sqrt(2.0) * erfinv(2.0 * u - 1.0)


def poisson_from_uniform(u: np.ndarray, mean: float, kmax: int = 8) -> np.ndarray:
    """Inverse-CDF Poisson draw capped at kmax (exact up to negligible tail mass).

    Single-uniform consumption per draw; means here are <= a few so the capped
    tail is far below any tested tolerance.
    """
    if mean <= 0.0:
        return np.zeros(np.shape(u), dtype=np.int64)
    from math import factorial
    ks = np.arange(kmax + 1)
    pmf = np.exp(-mean) * mean ** ks / np.array([factorial(k) for k in ks], dtype=float)
    cdf = np.cumsum(pmf)
    cdf[-1] = 1.0
    return np.searchsorted(cdf, u, side="right").astype(np.int64)
