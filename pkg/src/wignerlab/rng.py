"""Seed derivation.

All randomness flows from one 64-bit master seed through ``mix64``, the
SplitMix64 output function, applied to the seed and each key in turn::

    mix64(x):
        z = (x + 0x9E3779B97F4A7C15)            mod 2**64
        z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9 mod 2**64
        z = (z ^ (z >> 27)) * 0x94D049BB133111EB mod 2**64
        return z ^ (z >> 31)

    derive_seed(seed, k1, k2, ...):
        s = mix64(seed)
        for k in (k1, k2, ...):
            s = mix64(s ^ mix64(k))
        return s

Trial ``t`` of a run uses ``derive_seed(master, t)``. Streams are numpy
``Philox`` generators keyed by a derived seed, so each (seed, keys) pair owns
an independent counter-based stream.
"""
import numpy as np

MASK64 = (1 << 64) - 1


def mix64(x):
    z = (int(x) + 0x9E3779B97F4A7C15) & MASK64
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & MASK64
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & MASK64
    return z ^ (z >> 31)


def derive_seed(seed, *keys):
    s = mix64(int(seed) & MASK64)
    for k in keys:
        s = mix64(s ^ mix64(int(k) & MASK64))
    return s


def trial_seed(master, trial_index):
    return derive_seed(master, trial_index)


def stream(seed, *keys):
    """Independent generator for the stream labelled by ``(seed, *keys)``."""
    return np.random.Generator(np.random.Philox(key=derive_seed(seed, *keys)))
