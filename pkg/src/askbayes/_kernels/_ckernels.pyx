# cython: boundscheck=False, wraparound=False, initializedcheck=False, cdivision=True
"""Compiled factor-table kernels.

Same contracts as the ``pure`` module: flat float64 tables in row-major
layout with the last axis varying fastest.  These loops avoid the
per-call dispatch overhead that dominates NumPy on the small tables a
questionnaire-scale network produces.
"""

import numpy as np

NAME = "c"


def product(const double[::1] a, a_axes, const double[::1] b, b_axes, out_cards):
    """Pointwise product of two tables aligned on shared output axes."""
    cdef Py_ssize_t rank = len(out_cards)
    cdef Py_ssize_t n = 1
    cdef Py_ssize_t j, k, stride

    cards_arr = np.asarray(out_cards, dtype=np.intp)
    sa_arr = np.zeros(rank, dtype=np.intp)
    sb_arr = np.zeros(rank, dtype=np.intp)
    digits_arr = np.zeros(rank, dtype=np.intp)

    # Stride of each output axis inside a resp. b; 0 where the axis is absent.
    stride = 1
    for j in range(len(a_axes) - 1, -1, -1):
        sa_arr[a_axes[j]] = stride
        stride *= out_cards[a_axes[j]]
    stride = 1
    for j in range(len(b_axes) - 1, -1, -1):
        sb_arr[b_axes[j]] = stride
        stride *= out_cards[b_axes[j]]

    cdef Py_ssize_t[::1] cards = cards_arr
    cdef Py_ssize_t[::1] sa = sa_arr
    cdef Py_ssize_t[::1] sb = sb_arr
    cdef Py_ssize_t[::1] digits = digits_arr
    for k in range(rank):
        n *= cards[k]

    out_arr = np.empty(n, dtype=np.float64)
    cdef double[::1] out = out_arr
    cdef Py_ssize_t i, ia = 0, ib = 0
    with nogil:
        for i in range(n):
            out[i] = a[ia] * b[ib]
            k = rank - 1
            while k >= 0:
                digits[k] += 1
                ia += sa[k]
                ib += sb[k]
                if digits[k] < cards[k]:
                    break
                digits[k] = 0
                ia -= sa[k] * cards[k]
                ib -= sb[k] * cards[k]
                k -= 1
    return out_arr


def sum_axis(const double[::1] t, cards, Py_ssize_t axis):
    """Sum the table over one axis."""
    cdef Py_ssize_t rank = len(cards)
    cdef Py_ssize_t outer = 1, inner = 1, mid
    cdef Py_ssize_t k
    for k in range(axis):
        outer *= cards[k]
    mid = cards[axis]
    for k in range(axis + 1, rank):
        inner *= cards[k]

    out_arr = np.empty(outer * inner, dtype=np.float64)
    cdef double[::1] out = out_arr
    cdef Py_ssize_t o, i, m, base
    cdef double acc
    with nogil:
        for o in range(outer):
            for i in range(inner):
                base = o * mid * inner + i
                acc = 0.0
                for m in range(mid):
                    acc += t[base + m * inner]
                out[o * inner + i] = acc
    return out_arr


def take_axis(const double[::1] t, cards, Py_ssize_t axis, Py_ssize_t state):
    """Fix one axis to a single state and drop it."""
    cdef Py_ssize_t rank = len(cards)
    cdef Py_ssize_t outer = 1, inner = 1, mid
    cdef Py_ssize_t k
    for k in range(axis):
        outer *= cards[k]
    mid = cards[axis]
    for k in range(axis + 1, rank):
        inner *= cards[k]

    out_arr = np.empty(outer * inner, dtype=np.float64)
    cdef double[::1] out = out_arr
    cdef Py_ssize_t o, i
    with nogil:
        for o in range(outer):
            for i in range(inner):
                out[o * inner + i] = t[(o * mid + state) * inner + i]
    return out_arr
