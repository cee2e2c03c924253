"""Error-free transformations used to evaluate Hamiltonian differences exactly.

Values are carried as *expansions*: arrays whose leading axis lists double
components with an exact (unrounded) real sum.  Only the final reduction
rounds, via ``math.fsum`` which is correctly rounded.
"""

import math

import numpy as np

_VELTKAMP = 134217729.0  # 2**27 + 1
# integer multipliers must stay below this for split products to be exact
MAX_EXACT_MULTIPLIER = 2 ** 26


def split(x):
    """Veltkamp split: x == hi + lo exactly, both with at most 26 significant bits."""
    x = np.asarray(x, dtype=float)
    c = _VELTKAMP * x
    hi = c - (c - x)
    return hi, x - hi


def two_sum(a, b):
    """Knuth's TwoSum: a + b == s + e exactly."""
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    s = a + b
    bb = s - a
    e = (a - (s - bb)) + (b - bb)
    return s, e


def scale(expansion, m):
    """Exact product of an expansion with a nonnegative integer array ``m``.

    Returns an expansion with twice as many components.
    """
    m = np.asarray(m)
    if m.size and int(np.max(m)) >= MAX_EXACT_MULTIPLIER:
        raise OverflowError("integer multiplier too large for exact scaling")
    m = m.astype(float)
    hi, lo = split(expansion)
    return np.concatenate([hi * m, lo * m], axis=0)


def reduce(expansion):
    """Correctly rounded value of every expansion in the array (sum over axis 0)."""
    expansion = np.asarray(expansion, dtype=float)
    shape = expansion.shape[1:]
    cols = expansion.reshape(expansion.shape[0], -1).T.tolist()
    out = np.fromiter((math.fsum(c) for c in cols), dtype=float, count=len(cols))
    return out.reshape(shape)
