"""Pure-NumPy factor-table kernels.

Fallback implementation of the same contracts as the compiled extension:
flat float64 tables in row-major layout, last axis fastest.  ``*_axes``
arguments map each operand axis to its position in the output axes.
"""

from __future__ import annotations

import numpy as np

NAME = "pure"


def product(a, a_axes, b, b_axes, out_cards):
    """Pointwise product of two tables aligned on shared output axes."""
    a_nd = a.reshape(tuple(out_cards[k] for k in a_axes))
    b_nd = b.reshape(tuple(out_cards[k] for k in b_axes))
    out = np.einsum(a_nd, list(a_axes), b_nd, list(b_axes), list(range(len(out_cards))))
    return np.ascontiguousarray(out, dtype=np.float64).ravel()


def sum_axis(t, cards, axis):
    """Sum the table over one axis."""
    return np.ascontiguousarray(t.reshape(tuple(cards)).sum(axis=axis), dtype=np.float64).ravel()


def take_axis(t, cards, axis, state):
    """Fix one axis to a single state and drop it."""
    return np.ascontiguousarray(
        np.take(t.reshape(tuple(cards)), state, axis=axis), dtype=np.float64
    ).ravel()
