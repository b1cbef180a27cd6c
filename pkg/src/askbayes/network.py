"""Bayesian network over discrete variables, plus questionnaire validation.

The constructor is deliberately permissive: a network that violates the
questionnaire invariants can be *built* so that :func:`validate_network`
can report every violation as data rather than crash on the first one.
Inference functions assume a network that validates cleanly.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Mapping, Sequence

import numpy as np

from .errors import StructuralError
from .factors import DiscreteVariable, Factor, Role

# Evidence is a plain mapping variable-id -> observed state index; the
# invariants (known ids, states in range, one assignment per variable) are
# enforced where evidence enters the system, see check_evidence().
Evidence = Mapping[str, int]

CPT_TOLERANCE = 1e-9


class BayesianNetwork:
    """Variables, parent lists, and one CPT per variable.

    Each CPT is a factor with scope ``(parents..., variable)`` whose rows
    (one per joint parent configuration) are distributions over the
    variable's states.
    """

    def __init__(
        self,
        variables: Sequence[DiscreteVariable],
        parents: Mapping[str, Sequence[str]],
        cpts: Mapping[str, Factor],
    ):
        self.variables = tuple(variables)
        self._by_id: dict[str, DiscreteVariable] = {}
        for v in self.variables:
            self._by_id.setdefault(v.id, v)
        self.parents = {
            v.id: tuple(parents.get(v.id, ())) for v in self.variables
        }
        self.cpts = dict(cpts)

    # -- lookups ----------------------------------------------------------

    @property
    def var_ids(self) -> tuple[str, ...]:
        return tuple(v.id for v in self.variables)

    def variable(self, var_id: str) -> DiscreteVariable:
        try:
            return self._by_id[var_id]
        except KeyError:
            raise StructuralError(f"unknown variable {var_id!r}") from None

    def cardinality(self, var_id: str) -> int:
        return self.variable(var_id).cardinality

    def children(self) -> dict[str, tuple[str, ...]]:
        out: dict[str, list[str]] = {v.id: [] for v in self.variables}
        for child, pars in self.parents.items():
            for p in pars:
                if p in out:
                    out[p].append(child)
        return {k: tuple(v) for k, v in out.items()}

    def topological_order(self, subset: Iterable[str] | None = None) -> list[str]:
        """Kahn's algorithm over (a subset of) the variables; raises on cycles."""
        ids = list(subset) if subset is not None else list(self.var_ids)
        members = set(ids)
        indeg = {v: sum(1 for p in self.parents.get(v, ()) if p in members) for v in ids}
        ready = [v for v in ids if indeg[v] == 0]
        order: list[str] = []
        while ready:
            v = ready.pop(0)
            order.append(v)
            for w in ids:
                if v in self.parents.get(w, ()) and w in members:
                    indeg[w] -= 1
                    if indeg[w] == 0 and w not in order and w not in ready:
                        ready.append(w)
        if len(order) != len(ids):
            raise StructuralError("graph contains a cycle")
        return order


def check_evidence(net: BayesianNetwork, evidence: Evidence) -> None:
    """Raise unless every evidence entry names a known variable and state."""
    for var, state in evidence.items():
        card = net.cardinality(var)  # raises on unknown id
        if not 0 <= int(state) < card:
            raise StructuralError(
                f"evidence state {state} out of range for {var!r} (cardinality {card})"
            )


# -- validation ------------------------------------------------------------


@dataclass(frozen=True)
class Violation:
    variable: str
    code: str
    message: str


@dataclass(frozen=True)
class ValidationReport:
    violations: tuple[Violation, ...]

    @property
    def ok(self) -> bool:
        return not self.violations

    def __iter__(self):
        return iter(self.violations)

    def codes(self) -> set[str]:
        return {v.code for v in self.violations}


def validate_network(net: BayesianNetwork) -> ValidationReport:
    """Check every network invariant; an empty report means valid.

    Violations are data, not failures: all of them are collected and
    returned in deterministic order (variable id, then code).
    """
    found: list[Violation] = []

    seen: set[str] = set()
    for v in net.variables:
        if v.id in seen:
            found.append(Violation(v.id, "duplicate-id", f"variable id {v.id!r} declared twice"))
        seen.add(v.id)

    known = set(net.var_ids)
    clean_parents: dict[str, tuple[str, ...]] = {}
    for var_id, pars in net.parents.items():
        missing = [p for p in pars if p not in known]
        for p in missing:
            found.append(Violation(var_id, "unknown-parent", f"parent {p!r} is not a declared variable"))
        clean_parents[var_id] = tuple(p for p in pars if p in known)

    # cycle detection: peel zero-in-degree nodes; whatever survives sits on a cycle
    indeg = {v: len(clean_parents.get(v, ())) for v in known}
    children = {v: [] for v in known}
    for child, pars in clean_parents.items():
        for p in pars:
            children[p].append(child)
    ready = sorted(v for v, d in indeg.items() if d == 0)
    removed = 0
    while ready:
        v = ready.pop(0)
        removed += 1
        for w in children[v]:
            indeg[w] -= 1
            if indeg[w] == 0:
                ready.append(w)
    if removed != len(known):
        for v in sorted(v for v, d in indeg.items() if d > 0):
            found.append(Violation(v, "cycle", "variable participates in a directed cycle"))

    for v in net.variables:
        pars = clean_parents.get(v.id, ())
        cpt = net.cpts.get(v.id)
        if cpt is None:
            found.append(Violation(v.id, "missing-cpt", "no CPT supplied"))
        else:
            expected_scope = pars + (v.id,)
            if cpt.scope != expected_scope:
                found.append(
                    Violation(
                        v.id,
                        "cpt-scope-mismatch",
                        f"CPT scope {cpt.scope} != (parents..., variable) {expected_scope}",
                    )
                )
            else:
                expected_cards = tuple(net.variable(p).cardinality for p in pars) + (v.cardinality,)
                if cpt.cards != expected_cards:
                    found.append(
                        Violation(
                            v.id,
                            "cpt-cardinality-mismatch",
                            f"CPT cardinalities {cpt.cards} != {expected_cards}",
                        )
                    )
                else:
                    rows = cpt.table.reshape(-1, v.cardinality)
                    sums = rows.sum(axis=1)
                    bad = np.where(np.abs(sums - 1.0) > CPT_TOLERANCE)[0]
                    if bad.size:
                        i = int(bad[0])
                        found.append(
                            Violation(
                                v.id,
                                "cpt-row-unnormalized",
                                f"{bad.size} CPT row(s) do not sum to 1; row {i} sums to {sums[i]:.12g}",
                            )
                        )

        if v.role is Role.QUESTION:
            kids = [c for c, ps in clean_parents.items() if v.id in ps]
            if kids:
                found.append(
                    Violation(v.id, "question-has-child", f"question has child(ren) {sorted(kids)}")
                )
            skill_parents = [p for p in pars if net.variable(p).role is Role.SKILL]
            if not skill_parents:
                found.append(
                    Violation(v.id, "question-no-skill-parent", "question has no skill parent")
                )
        elif v.role is Role.SKILL:
            for p in pars:
                if net.variable(p).role is not Role.SKILL:
                    found.append(
                        Violation(v.id, "skill-bad-parent", f"skill parent {p!r} is not a skill")
                    )

    found.sort(key=lambda x: (x.variable, x.code, x.message))
    return ValidationReport(tuple(found))
