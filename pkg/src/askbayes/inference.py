"""Exact posterior computation: variable elimination plus a brute-force oracle.

``posterior`` is the production path (min-fill elimination order, barren
leaf pruning).  ``enumerate_joint`` materializes the full joint table with
plain ndarray broadcasting and shares no factor machinery with the
elimination path, so the two can check each other in tests.
"""

from __future__ import annotations

from itertools import combinations
from typing import Iterable, Sequence

import numpy as np

from .errors import CapacityError, InconsistentEvidenceError, StructuralError
from .factors import Factor
from .network import BayesianNetwork, Evidence, check_evidence

ENUMERATION_CELL_CAP = 10**7


def _check_targets(net: BayesianNetwork, targets: Sequence[str], evidence: Evidence) -> tuple[str, ...]:
    targets = tuple(targets)
    if not targets:
        raise StructuralError("targets must be non-empty")
    if len(set(targets)) != len(targets):
        raise StructuralError("duplicate target variable")
    for t in targets:
        net.variable(t)
        if t in evidence:
            raise StructuralError(f"target {t!r} is also evidenced")
    return targets


def _prune_barren(net: BayesianNetwork, keep: set[str]) -> list[str]:
    """Drop leaves that are neither targets nor evidenced, repeatedly.

    Safe because every CPT row is a distribution: summing a barren leaf
    out of the joint contributes a factor of exactly 1.
    """
    remaining = set(net.var_ids)
    while True:
        child_count = {v: 0 for v in remaining}
        for child in remaining:
            for p in net.parents.get(child, ()):
                if p in remaining:
                    child_count[p] += 1
        barren = [v for v in remaining if child_count[v] == 0 and v not in keep]
        if not barren:
            return sorted(remaining)
        remaining.difference_update(barren)


def _min_fill_order(scopes: list[tuple[str, ...]], eliminate: set[str]) -> list[str]:
    """Greedy min-fill ordering; ties broken by variable id."""
    adj: dict[str, set[str]] = {}
    for scope in scopes:
        for v in scope:
            adj.setdefault(v, set()).update(scope)
    for v, nb in adj.items():
        nb.discard(v)

    pending = {v for v in eliminate if v in adj}
    order: list[str] = []
    while pending:
        best = None
        best_fill = None
        for v in sorted(pending):
            nb = adj[v]
            fill = sum(1 for a, b in combinations(sorted(nb), 2) if b not in adj[a])
            if best_fill is None or fill < best_fill:
                best, best_fill = v, fill
        assert best is not None
        nb = adj[best]
        for a, b in combinations(nb, 2):
            adj[a].add(b)
            adj[b].add(a)
        for a in nb:
            adj[a].discard(best)
        del adj[best]
        pending.discard(best)
        order.append(best)
    return order


def posterior(net: BayesianNetwork, targets: Sequence[str], evidence: Evidence) -> Factor:
    """Normalized joint posterior over ``targets`` given ``evidence``.

    Scope order of the result follows the order targets were given in.
    """
    targets = _check_targets(net, targets, evidence)
    check_evidence(net, evidence)

    keep = set(targets) | set(evidence)
    active = _prune_barren(net, keep)

    factors: list[Factor] = []
    for var_id in active:
        cpt = net.cpts.get(var_id)
        if cpt is None:
            raise StructuralError(f"variable {var_id!r} has no CPT")
        factors.append(cpt.reduce(evidence))

    to_eliminate = {v for v in active if v not in targets and v not in evidence}
    order = _min_fill_order([f.scope for f in factors], to_eliminate)

    for var in order:
        touching = [f for f in factors if var in f.scope]
        factors = [f for f in factors if var not in f.scope]
        prod = touching[0]
        for f in touching[1:]:
            prod = prod * f
        factors.append(prod.marginalize(var))

    result = factors[0]
    for f in factors[1:]:
        result = result * f
    # scalar factors (fully-reduced CPTs) fold into the total; the joint
    # over the targets is what remains
    if set(result.scope) != set(targets):
        raise StructuralError(
            f"elimination left scope {result.scope}, expected {targets}"
        )
    return result.align_to(targets).normalize()


def enumerate_joint(net: BayesianNetwork, targets: Sequence[str], evidence: Evidence) -> Factor:
    """Brute-force oracle: build the full joint, slice evidence, sum, normalize.

    Independent of the elimination path on purpose; capped at 10^7 joint
    cells.
    """
    targets = _check_targets(net, targets, evidence)
    check_evidence(net, evidence)

    order = net.var_ids
    axis_of = {v: i for i, v in enumerate(order)}
    cards = [net.cardinality(v) for v in order]
    total_cells = 1
    for c in cards:
        total_cells *= c
        if total_cells > ENUMERATION_CELL_CAP:
            raise CapacityError(
                f"joint state space exceeds {ENUMERATION_CELL_CAP} cells"
            )

    joint = np.ones(cards, dtype=np.float64)
    for var_id in order:
        cpt = net.cpts.get(var_id)
        if cpt is None:
            raise StructuralError(f"variable {var_id!r} has no CPT")
        nd = cpt.table.reshape(cpt.cards)
        # transpose scope axes into global variable order, then pad with
        # size-1 axes so broadcasting lines everything up
        scope_axes = [axis_of[v] for v in cpt.scope]
        perm = np.argsort(scope_axes)
        nd = nd.transpose(perm)
        shape = [1] * len(order)
        for v in cpt.scope:
            shape[axis_of[v]] = net.cardinality(v)
        joint = joint * nd.reshape(shape)

    for var_id, state in evidence.items():
        joint = np.take(joint, [int(state)], axis=axis_of[var_id])

    sum_axes = tuple(i for i, v in enumerate(order) if v not in targets)
    marg = joint.sum(axis=sum_axes)
    # remaining axes follow declaration order; permute into requested order
    kept = [v for v in order if v in targets]
    perm = [kept.index(t) for t in targets]
    marg = marg.transpose(perm)

    total = float(marg.sum())
    if not total > 0.0:
        raise InconsistentEvidenceError("evidence has probability zero")
    table = np.ascontiguousarray(marg, dtype=np.float64).ravel() / total
    return Factor(targets, tuple(net.cardinality(t) for t in targets), table)
