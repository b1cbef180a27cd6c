"""Synthetic takers and policy benchmarking.

A taker is a sampled joint skill profile; their answer to a given question
depends only on (batch seed, taker index, question position), never on the
selection policy, so different policies face identical takers and identical
answers — a fully paired design.  Reports carry no timestamps: a fixed seed
must reproduce the report byte for byte.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from statistics import median
from typing import Mapping, Sequence

import numpy as np
from scipy import stats

from .engine import (
    QuestionnaireModel,
    Session,
    SessionStatus,
    answer_question,
    grade,
    pick_question,
    start_session,
)
from .errors import StructuralError
from .inference import posterior
from .network import Evidence

RNG_ALGORITHM = "numpy-default-pcg64"

POLICY_NAMES = ("information_gain", "random", "fixed_order")

_POLICY_ALIASES = {
    "ig": "information_gain",
    "information_gain": "information_gain",
    "random": "random",
    "fixed": "fixed_order",
    "fixed_order": "fixed_order",
}


@dataclass(frozen=True)
class PolicySpec:
    """Question-selection rule: the adaptive one or a baseline."""

    kind: str
    seed: int = 0

    def __post_init__(self):
        if self.kind not in POLICY_NAMES:
            raise StructuralError(f"unknown policy {self.kind!r}, expected one of {POLICY_NAMES}")

    @classmethod
    def parse(cls, name: str, seed: int = 0) -> "PolicySpec":
        try:
            return cls(_POLICY_ALIASES[name.strip().lower()], seed)
        except KeyError:
            raise StructuralError(
                f"unknown policy {name!r}, expected one of {sorted(_POLICY_ALIASES)}"
            ) from None


@dataclass(frozen=True)
class SimulatedTaker:
    """One sampled profile plus the seed material its answers derive from."""

    profile: Mapping[str, int]
    seed: tuple[int, ...]

    def answer(self, model: QuestionnaireModel, question: str) -> int:
        # keyed by question position, not ask order: the same taker gives
        # the same answer under every policy
        index = model.question_ids().index(question)
        rng = np.random.default_rng(self.seed + (2 + index,))
        return simulate_answer(model, self.profile, question, rng)


def sample_profile(model: QuestionnaireModel, rng: np.random.Generator) -> dict[str, int]:
    """Ancestral sample of the joint skill state from the skill priors."""
    net = model.network
    assignment: dict[str, int] = {}
    for skill in net.topological_order(model.skills):
        cpt = net.cpts[skill]
        row = cpt.reduce({p: assignment[p] for p in net.parents[skill]})
        assignment[skill] = int(rng.choice(row.table.size, p=row.table / row.table.sum()))
    return {s: assignment[s] for s in model.skills}


def simulate_answer(
    model: QuestionnaireModel,
    profile: Mapping[str, int],
    question: str,
    rng: np.random.Generator,
) -> int:
    """Sample an answer from the question's CPT row at the profile."""
    net = model.network
    missing = [p for p in net.parents[question] if p not in profile]
    if missing:
        raise StructuralError(f"profile does not cover parent(s) {missing} of {question!r}")
    row = net.cpts[question].reduce({p: int(profile[p]) for p in net.parents[question]})
    return int(rng.choice(row.table.size, p=row.table / row.table.sum()))


def profile_state_index(model: QuestionnaireModel, profile: Mapping[str, int]) -> int:
    """Flat index of a joint skill assignment, last skill fastest."""
    index = 0
    for skill, card in zip(model.skills, model.skill_cards()):
        index = index * card + int(profile[skill])
    return index


def _map_state(model: QuestionnaireModel, evidence: Evidence) -> int:
    joint = posterior(model.network, model.skills, evidence)
    return int(np.argmax(joint.table))


@dataclass(frozen=True)
class TraceStep:
    question: str
    answer: int
    gain: float
    entropy_after: float


@dataclass(frozen=True)
class SessionTrace:
    policy: str
    taker_index: int
    profile: dict[str, int]
    steps: tuple[TraceStep, ...]
    status: str
    grade: float
    true_value: float
    map_state: int
    true_state: int

    @property
    def questions_asked(self) -> int:
        return len(self.steps)

    def to_dict(self) -> dict:
        return {
            "policy": self.policy,
            "taker_index": self.taker_index,
            "profile": dict(self.profile),
            "steps": [
                {"question": s.question, "answer": s.answer, "gain": s.gain, "entropy_after": s.entropy_after}
                for s in self.steps
            ],
            "status": self.status,
            "grade": self.grade,
            "true_value": self.true_value,
            "map_state": self.map_state,
            "true_state": self.true_state,
        }


def _pick(policy: PolicySpec, model: QuestionnaireModel, session: Session, rng: np.random.Generator | None) -> str:
    if policy.kind == "information_gain":
        choice = pick_question(model, session)
        assert choice is not None  # active sessions always have a pool left
        return choice
    if policy.kind == "random":
        assert rng is not None
        return session.remaining_pool[int(rng.integers(len(session.remaining_pool)))]
    return session.remaining_pool[0]  # fixed_order


def run_session(
    model: QuestionnaireModel,
    taker: SimulatedTaker,
    policy: PolicySpec,
    taker_index: int = 0,
) -> SessionTrace:
    """One full adaptive session of this taker under this policy."""
    policy_rng = None
    if policy.kind == "random":
        policy_rng = np.random.default_rng((policy.seed,) + taker.seed + (1,))
    session = start_session(model)
    while session.status is SessionStatus.ACTIVE:
        question = _pick(policy, model, session, policy_rng)
        answer_question(session, question, taker.answer(model, question))
    true_state = profile_state_index(model, taker.profile)
    return SessionTrace(
        policy=policy.kind,
        taker_index=taker_index,
        profile=dict(taker.profile),
        steps=tuple(
            TraceStep(t.question, t.answer, t.gain, t.entropy_after) for t in session.transcript
        ),
        status=session.status.value,
        grade=grade(model, session.evidence),
        true_value=float(model.evaluation.table[true_state]),
        map_state=_map_state(model, session.evidence),
        true_state=true_state,
    )


@dataclass(frozen=True)
class PolicyAggregate:
    policy: str
    runs: int
    mean_questions: float
    median_questions: float
    stop_reasons: dict[str, int]
    mean_abs_grade_error: float
    map_accuracy: float

    def to_dict(self) -> dict:
        return {
            "policy": self.policy,
            "runs": self.runs,
            "mean_questions": self.mean_questions,
            "median_questions": self.median_questions,
            "stop_reasons": {k: self.stop_reasons[k] for k in sorted(self.stop_reasons)},
            "mean_abs_grade_error": self.mean_abs_grade_error,
            "map_accuracy": self.map_accuracy,
        }


def aggregate_traces(policy: str, traces: Sequence[SessionTrace]) -> PolicyAggregate:
    counts = [t.questions_asked for t in traces]
    reasons: dict[str, int] = {}
    for t in traces:
        reasons[t.status] = reasons.get(t.status, 0) + 1
    return PolicyAggregate(
        policy=policy,
        runs=len(traces),
        mean_questions=float(np.mean(counts)),
        median_questions=float(median(counts)),
        stop_reasons=reasons,
        mean_abs_grade_error=float(np.mean([abs(t.grade - t.true_value) for t in traces])),
        map_accuracy=float(np.mean([t.map_state == t.true_state for t in traces])),
    )


@dataclass(frozen=True)
class PairedComparison:
    """One-sided paired test that policy_a asks fewer questions than policy_b."""

    policy_a: str
    policy_b: str
    mean_difference: float
    t_statistic: float
    p_value: float

    def to_dict(self) -> dict:
        return {
            "policy_a": self.policy_a,
            "policy_b": self.policy_b,
            "hypothesis": "policy_a asks fewer questions than policy_b (one-sided, paired)",
            "mean_difference": self.mean_difference,
            "t_statistic": self.t_statistic,
            "p_value": self.p_value,
        }


def paired_question_test(
    policy_a: str, counts_a: Sequence[int], policy_b: str, counts_b: Sequence[int]
) -> PairedComparison:
    if len(counts_a) != len(counts_b):
        raise StructuralError("paired test needs equal-length count sequences")
    a = np.asarray(counts_a, dtype=np.float64)
    b = np.asarray(counts_b, dtype=np.float64)
    if np.allclose(a, b):
        # degenerate pairing: no variance, no evidence either way
        return PairedComparison(policy_a, policy_b, float(np.mean(a - b)), 0.0, 1.0)
    result = stats.ttest_rel(a, b, alternative="less")
    return PairedComparison(
        policy_a=policy_a,
        policy_b=policy_b,
        mean_difference=float(np.mean(a - b)),
        t_statistic=float(result.statistic),
        p_value=float(result.pvalue),
    )


@dataclass(frozen=True)
class BatchReport:
    seed: int
    runs: int
    rng: str
    policies: tuple[PolicyAggregate, ...]
    comparisons: tuple[PairedComparison, ...]
    traces: dict[str, tuple[SessionTrace, ...]]

    def to_dict(self) -> dict:
        return {
            "seed": self.seed,
            "runs": self.runs,
            "rng": self.rng,
            "policies": [p.to_dict() for p in self.policies],
            "comparisons": [c.to_dict() for c in self.comparisons],
            "traces": {k: [t.to_dict() for t in v] for k, v in self.traces.items()},
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2, ensure_ascii=False) + "\n"


def run_batch(
    model: QuestionnaireModel,
    n_runs: int,
    policies: Sequence[PolicySpec],
    seed: int,
) -> BatchReport:
    """Run every policy against the same ``n_runs`` sampled takers."""
    if n_runs < 1:
        raise StructuralError("n_runs must be at least 1")
    if not policies:
        raise StructuralError("at least one policy is required")
    names = [p.kind for p in policies]
    if len(set(names)) != len(names):
        raise StructuralError("duplicate policy in batch")

    takers = []
    for i in range(n_runs):
        profile_rng = np.random.default_rng((seed, i, 0))
        takers.append(SimulatedTaker(profile=sample_profile(model, profile_rng), seed=(seed, i)))

    traces: dict[str, tuple[SessionTrace, ...]] = {}
    for policy in policies:
        traces[policy.kind] = tuple(
            run_session(model, taker, policy, taker_index=i) for i, taker in enumerate(takers)
        )

    aggregates = tuple(aggregate_traces(name, traces[name]) for name in names)
    comparisons = []
    if "information_gain" in names:
        ig_counts = [t.questions_asked for t in traces["information_gain"]]
        for other in names:
            if other == "information_gain":
                continue
            other_counts = [t.questions_asked for t in traces[other]]
            comparisons.append(
                paired_question_test("information_gain", ig_counts, other, other_counts)
            )
    return BatchReport(
        seed=seed,
        runs=n_runs,
        rng=RNG_ALGORITHM,
        policies=aggregates,
        comparisons=tuple(comparisons),
        traces=traces,
    )
