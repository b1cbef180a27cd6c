"""Factor-table kernels with a compiled fast path.

The Cython extension ``_ckernels`` is used when importable; otherwise the
NumPy implementation in ``pure`` serves.  Set ``ASKBAYES_KERNELS=pure``
(or ``=c``) to force a backend at import time; ``use_backend`` switches at
runtime for tests and benchmarks.
"""

from __future__ import annotations

import os

from . import pure

_BACKENDS = {pure.NAME: pure}

try:
    from . import _ckernels
except ImportError:  # extension not built; NumPy fallback serves
    _ckernels = None
else:
    _BACKENDS[_ckernels.NAME] = _ckernels

_requested = os.environ.get("ASKBAYES_KERNELS", "").strip().lower()
if _requested and _requested not in _BACKENDS:
    raise ImportError(
        f"ASKBAYES_KERNELS={_requested!r} is not available; "
        f"choices: {sorted(_BACKENDS)}"
    )
_active = _BACKENDS[_requested] if _requested else _BACKENDS.get("c", pure)


def active_backend() -> str:
    """Name of the backend currently serving kernel calls."""
    return _active.NAME


def available_backends() -> tuple[str, ...]:
    return tuple(sorted(_BACKENDS))


def use_backend(name: str) -> None:
    """Switch the active backend ("pure" or "c"); raises KeyError if absent."""
    global _active
    _active = _BACKENDS[name]


def product(a, a_axes, b, b_axes, out_cards):
    return _active.product(a, a_axes, b, b_axes, out_cards)


def sum_axis(t, cards, axis):
    return _active.sum_axis(t, cards, axis)


def take_axis(t, cards, axis, state):
    return _active.take_axis(t, cards, axis, state)
