"""Deterministic random streams keyed by (master seed, sample index).

Samples are grouped in fixed blocks of ``BLOCK_SIZE`` consecutive indices.
Block ``b`` draws from ``PCG64(SeedSequence(master_seed, spawn_key=(b,)))``
and consumes its stream sequentially, so the values attached to sample ``i``
depend only on ``(master_seed, i)`` and never on how blocks are spread over
workers.
"""

import numpy as np

BLOCK_SIZE = 1024


def block_rng(master_seed, block, *key):
    """Generator for one block of samples under ``master_seed``."""
    ss = np.random.SeedSequence(int(master_seed), spawn_key=(*key, int(block)))
    return np.random.Generator(np.random.PCG64(ss))


def derive_seed(master_seed, *key):
    """Child integer seed for an independent sub-task (pair, phase, ...)."""
    ss = np.random.SeedSequence(int(master_seed), spawn_key=tuple(int(k) for k in key))
    return int(ss.generate_state(1, np.uint64)[0] >> np.uint64(1))


def blocks(count):
    """Yield ``(block, lo, hi)`` covering sample indices ``[0, count)``."""
    for b in range(-(-int(count) // BLOCK_SIZE)):
        yield b, b * BLOCK_SIZE, min(count, (b + 1) * BLOCK_SIZE)
