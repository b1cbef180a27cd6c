"""Elicitation helpers: difficulty/discrimination question parameters and
a star-shaped classifier-network builder.

A binary question about a skill is fully described by two numbers: the
probability of answering correctly with the skill (p) and without it (p').
Elicitors tend to think instead in terms of discriminative power
delta = p - p' and difficulty gamma = 1 - (p + p')/2; this module converts
between the two forms and compiles them into CPT rows.
"""

from __future__ import annotations

from dataclasses import dataclass
from itertools import product as iter_product

import numpy as np

from .errors import (
    InfeasibleParametersError,
    NonMonotoneQuestionError,
    StructuralError,
)
from .factors import DiscreteVariable, Factor, Role
from .network import BayesianNetwork, validate_network

# float slack on the [0,1] bounds; values inside the slack are clamped
FEASIBILITY_TOLERANCE = 1e-12


@dataclass(frozen=True)
class DGParams:
    """Discriminative power and difficulty of a binary question."""

    delta: float
    gamma: float

    def __post_init__(self):
        for name, value in (("delta", self.delta), ("gamma", self.gamma)):
            if not np.isfinite(value) or not 0.0 <= value <= 1.0:
                raise StructuralError(f"{name} must lie in [0, 1], got {value!r}")


def dg_to_probabilities(dg: DGParams) -> tuple[float, float]:
    """(p, p'): correct-answer probability with and without the skill.

    Feasibility (both implied probabilities in [0,1]) is checked here, not
    at construction, so infeasible pairs can be reported with context by
    callers compiling many of them.
    """
    p = (1.0 - dg.gamma) + dg.delta / 2.0
    pp = (1.0 - dg.gamma) - dg.delta / 2.0
    if p > 1.0 + FEASIBILITY_TOLERANCE:
        raise InfeasibleParametersError(f"implied p = {p:g} > 1")
    if pp < -FEASIBILITY_TOLERANCE:
        raise InfeasibleParametersError(f"implied p' = {pp:g} < 0")
    return min(p, 1.0), max(pp, 0.0)


def probabilities_to_dg(p: float, p_prime: float) -> DGParams:
    """Inverse of :func:`dg_to_probabilities`."""
    for name, value in (("p", p), ("p'", p_prime)):
        if not np.isfinite(value) or not 0.0 <= value <= 1.0:
            raise InfeasibleParametersError(f"{name} must lie in [0, 1], got {value!r}")
    if p < p_prime:
        raise NonMonotoneQuestionError(
            f"p = {p:g} < p' = {p_prime:g}: a correct answer must not be "
            "likelier without the skill"
        )
    return DGParams(delta=p - p_prime, gamma=1.0 - (p + p_prime) / 2.0)


@dataclass(frozen=True)
class DGQuestionSpec:
    """Parameters for one binary question (state 0 = correct answer).

    Two input shapes:
      * ``single``: one parameter pair; the parent configuration given by
        ``skilled_config`` (default: state 0 of every parent) answers with
        p, every other configuration with p'.
      * ``rows``: one pair per joint parent configuration, listed in
        canonical factor order (last parent fastest); configuration i
        answers correctly with its own p_i.
    """

    question: str
    parents: tuple[str, ...]
    single: DGParams | None = None
    skilled_config: tuple[int, ...] | None = None
    rows: tuple[DGParams, ...] | None = None

    def __post_init__(self):
        if (self.single is None) == (self.rows is None):
            raise StructuralError("give exactly one of 'single' or 'rows'")
        if self.rows is not None and self.skilled_config is not None:
            raise StructuralError("'skilled_config' only applies to the 'single' form")
        if not self.parents:
            raise StructuralError("a question spec needs at least one parent skill")


def compile_dg_cpt(spec: DGQuestionSpec, net: BayesianNetwork) -> Factor:
    """CPT for the question: scope (parents..., question), one row per
    joint parent configuration."""
    question_var = net.variable(spec.question)
    if question_var.cardinality != 2:
        raise StructuralError(
            f"difficulty/discrimination parameters require a binary question; "
            f"{spec.question!r} has {question_var.cardinality} states"
        )
    parent_cards = tuple(net.cardinality(p) for p in spec.parents)
    n_configs = int(np.prod(parent_cards))

    correct = np.empty(n_configs, dtype=np.float64)
    if spec.rows is not None:
        if len(spec.rows) != n_configs:
            raise StructuralError(
                f"{spec.question!r} needs one parameter pair per parent "
                f"configuration: expected {n_configs}, got {len(spec.rows)}"
            )
        for i, dg in enumerate(spec.rows):
            try:
                p, _ = dg_to_probabilities(dg)
            except InfeasibleParametersError as exc:
                raise InfeasibleParametersError(
                    f"{spec.question!r} configuration {i}: {exc}"
                ) from None
            correct[i] = p
    else:
        assert spec.single is not None
        skilled = spec.skilled_config or (0,) * len(spec.parents)
        if len(skilled) != len(spec.parents):
            raise StructuralError(
                f"skilled_config has {len(skilled)} entries for {len(spec.parents)} parents"
            )
        for j, (state, card) in enumerate(zip(skilled, parent_cards)):
            if not 0 <= state < card:
                raise StructuralError(
                    f"skilled_config state {state} out of range for parent "
                    f"{spec.parents[j]!r} (cardinality {card})"
                )
        p, pp = dg_to_probabilities(spec.single)
        for i, config in enumerate(iter_product(*(range(c) for c in parent_cards))):
            correct[i] = p if tuple(config) == tuple(skilled) else pp

    table = np.empty(n_configs * 2, dtype=np.float64)
    table[0::2] = correct
    table[1::2] = 1.0 - correct
    return Factor(spec.parents + (spec.question,), parent_cards + (2,), table)


def build_naive_bayes(
    target: DiscreteVariable,
    prior: Factor,
    question_cpts: list[tuple[DiscreteVariable, Factor]],
) -> BayesianNetwork:
    """Network with ``target`` as the sole parent of every question."""
    if prior.scope != (target.id,):
        raise StructuralError(f"prior scope must be ({target.id!r},), got {prior.scope}")
    variables = [DiscreteVariable(target.id, target.states, Role.SKILL)]
    parents: dict[str, tuple[str, ...]] = {target.id: ()}
    cpts: dict[str, Factor] = {target.id: prior}
    for qvar, cpt in question_cpts:
        if qvar.id == target.id or qvar.id in parents:
            raise StructuralError(f"duplicate variable id {qvar.id!r}")
        if cpt.scope != (target.id, qvar.id):
            raise StructuralError(
                f"CPT for {qvar.id!r} must have scope ({target.id!r}, {qvar.id!r}), "
                f"got {cpt.scope}"
            )
        variables.append(DiscreteVariable(qvar.id, qvar.states, Role.QUESTION))
        parents[qvar.id] = (target.id,)
        cpts[qvar.id] = cpt
    net = BayesianNetwork(variables, parents, cpts)
    report = validate_network(net)
    if not report.ok:
        details = "; ".join(f"{v.variable}: {v.message}" for v in report)
        raise StructuralError(f"assembled network is invalid: {details}")
    return net
