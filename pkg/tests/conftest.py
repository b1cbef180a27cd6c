"""Shared fixtures: the shipped documents plus random model generators.

The generators return plain objects, not pytest fixtures, so tests can
drive them with their own seeds and counts.
"""

from __future__ import annotations

import json
from pathlib import Path

import numpy as np
import pytest

from askbayes.elicitation import DGParams, dg_to_probabilities
from askbayes.engine import EvaluationFunction, QuestionDescriptor, QuestionnaireModel
from askbayes.factors import DiscreteVariable, Factor, Role
from askbayes.modelio import parse_questionnaire
from askbayes.network import BayesianNetwork

FIXTURES = Path(__file__).resolve().parent.parent / "fixtures"


def load_fixture(name: str) -> str:
    return (FIXTURES / name).read_text()


@pytest.fixture(scope="session")
def pair_document() -> str:
    return load_fixture("single-skill-pair.json")


@pytest.fixture(scope="session")
def pair_model(pair_document) -> QuestionnaireModel:
    return parse_questionnaire(pair_document)


@pytest.fixture(scope="session")
def layered_model() -> QuestionnaireModel:
    return parse_questionnaire(load_fixture("layered-skills.json"))


@pytest.fixture(scope="session")
def screening_model() -> QuestionnaireModel:
    return parse_questionnaire(load_fixture("wellbeing-screening.json"))


@pytest.fixture(scope="session")
def pair_dict(pair_document) -> dict:
    return json.loads(pair_document)


# -- random generators ---------------------------------------------------


def random_network(rng: np.random.Generator, max_vars: int = 12, max_parents: int = 3) -> BayesianNetwork:
    """Random binary DAG with Dirichlet CPT rows; ids follow one
    topological order."""
    n = int(rng.integers(2, max_vars + 1))
    variables = [DiscreteVariable(f"v{i}", ("0", "1"), Role.AUXILIARY) for i in range(n)]
    parents: dict[str, tuple[str, ...]] = {}
    cpts: dict[str, Factor] = {}
    for i, var in enumerate(variables):
        k = int(rng.integers(0, min(i, max_parents) + 1))
        chosen = tuple(f"v{j}" for j in sorted(rng.choice(i, size=k, replace=False))) if k else ()
        parents[var.id] = chosen
        rows = rng.dirichlet(np.ones(2), size=2 ** len(chosen))
        cards = (2,) * len(chosen) + (2,)
        cpts[var.id] = Factor(chosen + (var.id,), cards, rows.ravel())
    return BayesianNetwork(variables, parents, cpts)


def random_evidence(rng: np.random.Generator, net: BayesianNetwork, keep_free: int = 1) -> dict[str, int]:
    """Evidence on a random subset, leaving at least ``keep_free`` variables."""
    ids = list(net.var_ids)
    high = len(ids) - keep_free
    k = int(rng.integers(0, high + 1)) if high > 0 else 0
    chosen = rng.choice(len(ids), size=k, replace=False) if k else []
    return {ids[int(i)]: int(rng.integers(0, net.cardinality(ids[int(i)]))) for i in chosen}


def _question_cpt(qid: str, parent_ids: tuple[str, ...], parent_cards: tuple[int, ...], correct) -> Factor:
    table = np.empty(2 * int(np.prod(parent_cards)), dtype=np.float64)
    table[0::2] = correct
    table[1::2] = 1.0 - np.asarray(correct)
    return Factor(parent_ids + (qid,), parent_cards + (2,), table)


def random_questionnaire(
    rng: np.random.Generator,
    n_skills: int = 1,
    n_questions: int = 4,
    delta_range: tuple[float, float] = (0.05, 0.9),
    stop_threshold: float = 0.0,
    max_questions: int | None = None,
) -> QuestionnaireModel:
    """Independent binary skills, each question wired to a random
    non-empty skill subset with its own per-configuration correct rate."""
    variables = []
    parents: dict[str, tuple[str, ...]] = {}
    cpts: dict[str, Factor] = {}
    skill_ids = tuple(f"s{i}" for i in range(n_skills))
    for sid in skill_ids:
        variables.append(DiscreteVariable(sid, ("yes", "no"), Role.SKILL))
        parents[sid] = ()
        p = float(rng.uniform(0.2, 0.8))
        cpts[sid] = Factor((sid,), (2,), [p, 1.0 - p])
    pool = []
    for i in range(n_questions):
        qid = f"q{i}"
        k = int(rng.integers(1, n_skills + 1))
        chosen = tuple(skill_ids[int(j)] for j in sorted(rng.choice(n_skills, size=k, replace=False)))
        n_configs = 2 ** len(chosen)
        delta = float(rng.uniform(*delta_range))
        gamma = float(rng.uniform(delta / 2, 1 - delta / 2))
        p_skilled, p_unskilled = dg_to_probabilities(DGParams(delta, gamma))
        # config 0 (all parents in state 0 = "yes") is the skilled one
        correct = np.full(n_configs, p_unskilled)
        correct[0] = p_skilled
        variables.append(DiscreteVariable(qid, ("correct", "incorrect"), Role.QUESTION))
        parents[qid] = chosen
        cpts[qid] = _question_cpt(qid, chosen, (2,) * len(chosen), correct)
        pool.append(QuestionDescriptor(qid))
    net = BayesianNetwork(variables, parents, cpts)
    evaluation = EvaluationFunction(tuple(rng.uniform(0, 1, size=2**n_skills)))
    return QuestionnaireModel(
        network=net,
        skills=skill_ids,
        pool=tuple(pool),
        evaluation=evaluation,
        stop_threshold=stop_threshold,
        max_questions=max_questions,
    )


def spread_questionnaire(rng: np.random.Generator, n_questions: int = 12, stop_threshold: float = 0.35) -> QuestionnaireModel:
    """Single-skill pool with discriminative spread: per-question delta
    uniform in [0.2, 0.9], so question quality varies enough that the
    order of asking matters."""
    skill = DiscreteVariable("s", ("yes", "no"), Role.SKILL)
    variables = [skill]
    parents: dict[str, tuple[str, ...]] = {"s": ()}
    cpts: dict[str, Factor] = {"s": Factor(("s",), (2,), [0.5, 0.5])}
    pool = []
    for i in range(n_questions):
        qid = f"q{i}"
        delta = float(rng.uniform(0.2, 0.9))
        gamma = float(rng.uniform(delta / 2, 1 - delta / 2))
        p, pp = dg_to_probabilities(DGParams(delta, gamma))
        variables.append(DiscreteVariable(qid, ("correct", "incorrect"), Role.QUESTION))
        parents[qid] = ("s",)
        cpts[qid] = _question_cpt(qid, ("s",), (2,), [p, pp])
        pool.append(QuestionDescriptor(qid))
    net = BayesianNetwork(variables, parents, cpts)
    return QuestionnaireModel(
        network=net,
        skills=("s",),
        pool=tuple(pool),
        evaluation=EvaluationFunction((1.0, 0.0)),
        stop_threshold=stop_threshold,
        max_questions=None,
    )
