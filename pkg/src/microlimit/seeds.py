"""Deterministic seed derivation for replicated Monte Carlo runs.

Every sampler in this package is a pure function of (parameters, seed).
Replica r of a run with master seed ``s`` uses ``derive_seed(s, r)``;
nested loops pass further indices.  The derivation is a splitmix64-style
mix, so distinct index tuples give statistically independent 64-bit
seeds and the whole run is reproducible from the master seed alone,
independent of scheduling or worker count.
"""

from __future__ import annotations

import numpy as np

_MASK = (1 << 64) - 1
_GAMMA = 0x9E3779B97F4A7C15


def _mix(z: int) -> int:
    # splitmix64 finalizer
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9 & _MASK
    z = (z ^ (z >> 27)) * 0x94D049BB133111EB & _MASK
    return z ^ (z >> 31)


def derive_seed(master: int, *indices: int) -> int:
    """Fold ``indices`` into ``master``, returning a fresh 64-bit seed.

    ``derive_seed(s)`` != s, and any change to master or to any index
    changes the result.  Indices may be arbitrary Python ints; they are
    reduced mod 2**64 and offset by one so that index 0 is distinct
    from "no index".
    """
    z = _mix(master & _MASK)
    for k in indices:
        z = _mix((z + _GAMMA * ((k & _MASK) + 1)) & _MASK)
    return z


def rng_from(seed: int) -> np.random.Generator:
    """Fresh PCG64 generator keyed on a 64-bit seed."""
    return np.random.default_rng(seed & _MASK)
