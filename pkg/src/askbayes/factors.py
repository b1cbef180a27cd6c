"""Discrete variables and factors: the tables all inference is made of.

A :class:`Factor` stores a non-negative real table over an ordered scope of
variable ids.  Layout is row-major over the scope's state indices, the
*last* scope variable varying fastest, so a CPT with scope
``(parents..., child)`` keeps each parent configuration's row contiguous.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum
from typing import Iterable, Mapping, Sequence

import numpy as np

from . import _kernels
from .errors import InconsistentEvidenceError, StructuralError


class Role(str, Enum):
    SKILL = "skill"
    QUESTION = "question"
    AUXILIARY = "auxiliary"


@dataclass(frozen=True)
class DiscreteVariable:
    """A named categorical variable with at least two ordered states."""

    id: str
    states: tuple[str, ...]
    role: Role = Role.AUXILIARY

    def __post_init__(self):
        object.__setattr__(self, "states", tuple(self.states))
        object.__setattr__(self, "role", Role(self.role))
        if not self.id:
            raise StructuralError("variable id must be non-empty")
        if len(self.states) < 2:
            raise StructuralError(f"variable {self.id!r} needs at least 2 states")
        if len(set(self.states)) != len(self.states):
            raise StructuralError(f"variable {self.id!r} has duplicate state labels")

    @property
    def cardinality(self) -> int:
        return len(self.states)


class Factor:
    """Immutable non-negative table over an ordered variable scope."""

    __slots__ = ("scope", "cards", "table")

    def __init__(self, scope: Sequence[str], cards: Sequence[int], table):
        scope = tuple(scope)
        cards = tuple(int(c) for c in cards)
        if len(scope) != len(cards):
            raise StructuralError("scope and cardinalities differ in length")
        if len(set(scope)) != len(scope):
            raise StructuralError(f"factor scope has duplicate variables: {scope}")
        if any(c < 1 for c in cards):
            raise StructuralError("cardinalities must be positive")
        arr = np.array(table, dtype=np.float64).ravel()
        n = int(np.prod(cards)) if cards else 1
        if arr.size != n:
            raise StructuralError(
                f"table has {arr.size} entries, scope {scope} needs {n}"
            )
        if not np.all(np.isfinite(arr)):
            raise StructuralError("factor table contains non-finite entries")
        if np.any(arr < 0):
            raise StructuralError("factor table contains negative entries")
        arr.flags.writeable = False
        object.__setattr__(self, "scope", scope)
        object.__setattr__(self, "cards", cards)
        object.__setattr__(self, "table", arr)

    def __setattr__(self, name, value):
        raise AttributeError("Factor is immutable")

    @classmethod
    def _wrap(cls, scope: tuple[str, ...], cards: tuple[int, ...], table: np.ndarray) -> "Factor":
        # internal fast path: trusts kernel output, skips validation scans
        f = object.__new__(cls)
        table.flags.writeable = False
        object.__setattr__(f, "scope", scope)
        object.__setattr__(f, "cards", cards)
        object.__setattr__(f, "table", table)
        return f

    def __repr__(self):
        dims = ", ".join(f"{v}:{c}" for v, c in zip(self.scope, self.cards))
        return f"Factor({dims})[{self.table.size}]"

    # -- algebra ---------------------------------------------------------

    def product(self, other: "Factor") -> "Factor":
        """Pointwise product over the union scope (self's variables first)."""
        mine = {v: c for v, c in zip(self.scope, self.cards)}
        for v, c in zip(other.scope, other.cards):
            if v in mine and mine[v] != c:
                raise StructuralError(
                    f"shared variable {v!r} has cardinality {mine[v]} vs {c}"
                )
        out_scope = self.scope + tuple(v for v in other.scope if v not in mine)
        pos = {v: k for k, v in enumerate(out_scope)}
        out_cards = self.cards + tuple(
            c for v, c in zip(other.scope, other.cards) if v not in mine
        )
        table = _kernels.product(
            self.table,
            tuple(range(len(self.scope))),
            other.table,
            tuple(pos[v] for v in other.scope),
            out_cards,
        )
        return Factor._wrap(out_scope, out_cards, table)

    __mul__ = product

    def marginalize(self, var: str) -> "Factor":
        """Sum out one scope variable."""
        if var not in self.scope:
            raise StructuralError(f"variable {var!r} not in scope {self.scope}")
        axis = self.scope.index(var)
        table = _kernels.sum_axis(self.table, self.cards, axis)
        return Factor._wrap(
            self.scope[:axis] + self.scope[axis + 1 :],
            self.cards[:axis] + self.cards[axis + 1 :],
            table,
        )

    def sum_out(self, vars: Iterable[str]) -> "Factor":
        f = self
        for v in vars:
            f = f.marginalize(v)
        return f

    def reduce(self, evidence: Mapping[str, int]) -> "Factor":
        """Select the slice consistent with the evidence; no renormalization.

        Evidence on variables outside the scope is ignored.
        """
        f = self
        for var in self.scope:
            if var not in evidence:
                continue
            state = int(evidence[var])
            axis = f.scope.index(var)
            if not 0 <= state < f.cards[axis]:
                raise StructuralError(
                    f"state {state} out of range for {var!r} (cardinality {f.cards[axis]})"
                )
            table = _kernels.take_axis(f.table, f.cards, axis, state)
            f = Factor._wrap(
                f.scope[:axis] + f.scope[axis + 1 :],
                f.cards[:axis] + f.cards[axis + 1 :],
                table,
            )
        return f

    # -- queries ---------------------------------------------------------

    def total(self) -> float:
        return float(self.table.sum())

    def normalize(self) -> "Factor":
        """Scale to total mass 1; zero-mass factors are inconsistent."""
        total = self.total()
        if total <= 0.0:
            raise InconsistentEvidenceError("factor has zero total mass")
        return Factor._wrap(self.scope, self.cards, self.table / total)

    def align_to(self, scope: Sequence[str]) -> "Factor":
        """Permute the scope to the given order (same variable set)."""
        scope = tuple(scope)
        if set(scope) != set(self.scope) or len(scope) != len(self.scope):
            raise StructuralError(f"cannot align scope {self.scope} to {scope}")
        if scope == self.scope:
            return self
        perm = tuple(self.scope.index(v) for v in scope)
        table = np.ascontiguousarray(
            self.table.reshape(self.cards).transpose(perm)
        ).ravel()
        return Factor._wrap(scope, tuple(self.cards[p] for p in perm), table)

    def get(self, assignment: Mapping[str, int]) -> float:
        """Table entry for a full assignment of the scope."""
        try:
            idx = tuple(int(assignment[v]) for v in self.scope)
        except KeyError as e:
            raise StructuralError(f"assignment misses scope variable {e}") from e
        flat = 0
        for i, c in zip(idx, self.cards):
            if not 0 <= i < c:
                raise StructuralError(f"state index {i} out of range (cardinality {c})")
            flat = flat * c + i
        return float(self.table[flat])


def factor_product(a: Factor, b: Factor) -> Factor:
    return a.product(b)


def factor_marginalize(f: Factor, var: str) -> Factor:
    return f.marginalize(var)


def factor_reduce(f: Factor, evidence: Mapping[str, int]) -> Factor:
    return f.reduce(evidence)
