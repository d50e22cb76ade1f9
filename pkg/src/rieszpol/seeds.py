"""Deterministic seed derivation for restartable stochastic searches.

Every restart of a solver gets its own independent generator whose seed is a
pure function of (master seed, restart index).  Results are then insensitive
to execution order: restarts may run in any interleaving, on any number of
threads, and still consume identical random streams.
"""

from __future__ import annotations

import numpy as np

_MASK = (1 << 64) - 1


def splitmix64(state: int) -> int:
    # One step of the splitmix64 sequence; good avalanche, trivially portable.
    state = (state + 0x9E3779B97F4A7C15) & _MASK
    z = state
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & _MASK
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & _MASK
    return z ^ (z >> 31)


def derive_seed(master: int, *indices: int) -> int:
    """Mix a master seed with one or more stream indices into a 64-bit seed.

    The fold re-mixes between indices, so index order matters and prefix
    streams stay independent of their extensions.
    """
    state = splitmix64(master & _MASK)
    for ix in indices:
        state = splitmix64(((state ^ (ix & _MASK)) + 0x632BE59BD9B4E019) & _MASK)
    return state


def restart_rng(master: int, restart: int) -> np.random.Generator:
    """Generator for a single restart, independent of all other restarts."""
    return np.random.default_rng(derive_seed(master, restart))
