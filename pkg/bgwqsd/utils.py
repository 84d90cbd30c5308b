"""A collection of utility functions."""

from concurrent.futures import ThreadPoolExecutor
import logging

import numpy as np


def spawn_generators(seed, n_shards):
    """Independent random generators, one per shard, derived from one seed.

    Args:
        seed: The master seed.
        n_shards: Number of generators.

    Returns:
        A list of numpy Generators.
    """
    children = np.random.SeedSequence(seed).spawn(n_shards)
    for index, child in enumerate(children):
        logging.debug("shard %d: spawn key %s", index, child.spawn_key)
    return [np.random.default_rng(child) for child in children]


def shard_sizes(total, n_shards):
    """Split ``total`` draws into ``n_shards`` nearly equal parts."""
    base, extra = divmod(total, n_shards)
    return [base + (1 if i < extra else 0) for i in range(n_shards)]


def run_sharded(work, total, seed, n_shards=1):
    """Run ``work(rng, count)`` on every shard and return the results in order.

    Shards run in a thread pool; every shard owns its generator, and results
    are merged in shard order, so the outcome only depends on (seed, n_shards).

    Args:
        work: Callable taking a Generator and a number of draws.
        total: Total number of draws.
        seed: The master seed.
        n_shards: Number of shards.

    Returns:
        A list with one result per shard.
    """
    generators = spawn_generators(seed, n_shards)
    sizes = shard_sizes(total, n_shards)
    if n_shards == 1:
        return [work(generators[0], sizes[0])]
    with ThreadPoolExecutor(max_workers=n_shards) as executor:
        return list(executor.map(work, generators, sizes))


def format_float(value):
    """Format a float with 17 significant digits for lossless round trips."""
    return format(float(value), ".17g")
