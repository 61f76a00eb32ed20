"""
Reproducible random streams.

Every simulated path owns a counter-based Philox generator keyed by
``(master_seed, path_index)``, so a path's draws do not depend on how paths are
grouped into batches or on which worker runs them.
"""
import numpy as np

from .exceptions import DomainError

SEED_BITS = 64


def check_seed(seed):
    seed = int(seed)
    if not 0 <= seed < 2 ** SEED_BITS:
        raise DomainError("seeds are unsigned 64-bit integers, got %d" % seed)
    return seed


def path_generator(master_seed, path_index):
    sequence = np.random.SeedSequence(check_seed(master_seed), spawn_key=(int(path_index),))
    return np.random.Generator(np.random.Philox(sequence))


def path_generators(master_seed, path_indices):
    return [path_generator(master_seed, i) for i in path_indices]


def refinement_generator(master_seed, path_index):
    """A second stream per path for Brownian-bridge midpoints of refined steps.

    It is separate from the path's increments so refining one step never shifts
    the draws of later steps.
    """
    sequence = np.random.SeedSequence(check_seed(master_seed), spawn_key=(int(path_index), 1))
    return np.random.Generator(np.random.Philox(sequence))


def refinement_generators(master_seed, path_indices):
    return [refinement_generator(master_seed, i) for i in path_indices]
