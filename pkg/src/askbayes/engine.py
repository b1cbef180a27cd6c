"""Adaptive question selection: entropy, information gain, stopping, grading.

The selection loop is greedy: ask the question with the highest expected
entropy reduction, stop once the posterior entropy over the skills drops
to the threshold (or nothing is left to ask).
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field
from typing import Callable, Mapping, Sequence

import numpy as np

from .errors import SessionStateError, StructuralError
from .factors import Factor
from .inference import posterior
from .network import BayesianNetwork, Evidence

GAIN_TIE_TOLERANCE = 1e-9
NORMALIZATION_TOLERANCE = 1e-9


@dataclass(frozen=True)
class QuestionDescriptor:
    """Pool entry: the network variable plus display strings."""

    variable: str
    text: str = ""
    answers: tuple[str, ...] = ()


@dataclass(frozen=True)
class EvaluationFunction:
    """Grade table: one value per joint skill state, canonical factor order."""

    table: tuple[float, ...]

    def __post_init__(self):
        if not self.table:
            raise StructuralError("evaluation table must be non-empty")
        arr = np.asarray(self.table, dtype=np.float64)
        if not np.all(np.isfinite(arr)):
            raise StructuralError("evaluation table must be finite")


class EntropyMode(str, enum.Enum):
    JOINT = "joint"
    MARGINAL_SUM = "marginal-sum"


@dataclass(frozen=True)
class QuestionnaireModel:
    network: BayesianNetwork
    skills: tuple[str, ...]
    pool: tuple[QuestionDescriptor, ...]
    evaluation: EvaluationFunction
    stop_threshold: float
    max_questions: int | None = None
    # joint entropy is the default; marginal-sum trades exactness on skill
    # correlations for tractability on large skill sets
    entropy_mode: EntropyMode = EntropyMode.JOINT
    risk_groups: Mapping[str, tuple[int, ...]] = field(default_factory=dict)
    title: str = ""
    description: str = ""
    # presentation hint for clients: whether to offer the live
    # explanation panel during a session
    explanation_panel: bool = False

    def __post_init__(self):
        if not self.skills:
            raise StructuralError("model needs at least one skill")
        pool_ids = [q.variable for q in self.pool]
        if len(set(pool_ids)) != len(pool_ids):
            raise StructuralError("duplicate question in pool")
        for v in self.skills + tuple(pool_ids):
            self.network.variable(v)
        overlap = set(self.skills) & set(pool_ids)
        if overlap:
            raise StructuralError(f"variables {sorted(overlap)} are both skill and question")
        if not self.stop_threshold >= 0:
            raise StructuralError("stop_threshold must be >= 0")
        if self.max_questions is not None and self.max_questions < 1:
            raise StructuralError("max_questions must be positive")
        n_states = int(np.prod(self.skill_cards()))
        if len(self.evaluation.table) != n_states:
            raise StructuralError(
                f"evaluation table has {len(self.evaluation.table)} entries, "
                f"expected {n_states} (product of skill cardinalities)"
            )
        for label, states in self.risk_groups.items():
            if not states:
                raise StructuralError(f"risk group {label!r} is empty")
            for s in states:
                if not 0 <= int(s) < n_states:
                    raise StructuralError(
                        f"risk group {label!r} references joint state {s} "
                        f"(valid range 0..{n_states - 1})"
                    )

    def skill_cards(self) -> tuple[int, ...]:
        return tuple(self.network.cardinality(s) for s in self.skills)

    def question_ids(self) -> tuple[str, ...]:
        return tuple(q.variable for q in self.pool)

    def descriptor(self, question_id: str) -> QuestionDescriptor:
        for q in self.pool:
            if q.variable == question_id:
                return q
        raise StructuralError(f"question {question_id!r} not in pool")


class SessionStatus(str, enum.Enum):
    ACTIVE = "active"
    STOPPED_ENTROPY = "stopped_entropy"
    STOPPED_POOL_EXHAUSTED = "stopped_pool_exhausted"
    STOPPED_MAX_QUESTIONS = "stopped_max_questions"


@dataclass(frozen=True)
class TranscriptEntry:
    question: str
    answer: int
    gain: float
    entropy_after: float


@dataclass
class Session:
    """Single-writer progress record for one taker.

    Invariant: evidence keys and remaining_pool partition the model pool.
    """

    model: QuestionnaireModel
    evidence: dict[str, int] = field(default_factory=dict)
    remaining_pool: list[str] = field(default_factory=list)
    status: SessionStatus = SessionStatus.ACTIVE
    transcript: list[TranscriptEntry] = field(default_factory=list)


# -- entropy and gain --------------------------------------------------------


def _entropy_of(p: np.ndarray, base: float) -> float:
    mass = p[p > 0.0]
    return float(-(mass * np.log(mass)).sum() / np.log(base))


def entropy(dist: Factor, base: float = 2.0) -> float:
    """Shannon entropy of a normalized distribution, in units of ``base``."""
    total = dist.total()
    if abs(total - 1.0) > NORMALIZATION_TOLERANCE:
        raise StructuralError(f"distribution sums to {total!r}, expected 1")
    return _entropy_of(dist.table, base)


def _mode_entropy(joint_table: np.ndarray, cards: tuple[int, ...], mode: EntropyMode, base: float) -> float:
    if mode is EntropyMode.JOINT:
        return _entropy_of(joint_table, base)
    nd = joint_table.reshape(cards)
    total = 0.0
    for axis in range(len(cards)):
        other = tuple(a for a in range(len(cards)) if a != axis)
        total += _entropy_of(nd.sum(axis=other) if other else nd, base)
    return total


def posterior_entropy(model: QuestionnaireModel, evidence: Evidence, base: float = 2.0) -> float:
    """Entropy of the skill posterior given the answers so far, in bits."""
    joint = posterior(model.network, model.skills, evidence)
    return _mode_entropy(joint.table, model.skill_cards(), model.entropy_mode, base)


def conditional_entropy(model: QuestionnaireModel, question: str, evidence: Evidence, base: float = 2.0) -> float:
    """Expected skill entropy after observing ``question``'s answer.

    Answer states with zero probability contribute nothing (they cannot
    be conditioned on).
    """
    if question in evidence:
        raise StructuralError(f"question {question!r} already answered")
    # one joint posterior over (skills, question); slicing per answer is
    # much cheaper than a fresh inference per answer state
    joint = posterior(model.network, model.skills + (question,), evidence)
    card_q = model.network.cardinality(question)
    cards = model.skill_cards()
    by_answer = joint.table.reshape(-1, card_q)
    h = 0.0
    for a in range(card_q):
        weight = float(by_answer[:, a].sum())
        if weight <= 0.0:
            continue
        sliced = np.ascontiguousarray(by_answer[:, a]) / weight
        h += weight * _mode_entropy(sliced, cards, model.entropy_mode, base)
    return h


def information_gain(model: QuestionnaireModel, question: str, evidence: Evidence, base: float = 2.0) -> float:
    """Expected entropy reduction from asking ``question``; never negative."""
    gain = posterior_entropy(model, evidence, base) - conditional_entropy(model, question, evidence, base)
    return max(0.0, gain)


# -- session loop ------------------------------------------------------------


def start_session(model: QuestionnaireModel) -> Session:
    session = Session(model=model, remaining_pool=list(model.question_ids()))
    reason = _stop_reason(model, session, posterior_entropy(model, session.evidence))
    session.status = reason or SessionStatus.ACTIVE
    return session


def _stop_reason(model: QuestionnaireModel, session: Session, current_entropy: float) -> SessionStatus | None:
    """Stop rules, checked in order: entropy, exhaustion, question budget."""
    if current_entropy <= model.stop_threshold:
        return SessionStatus.STOPPED_ENTROPY
    if not session.remaining_pool:
        return SessionStatus.STOPPED_POOL_EXHAUSTED
    if model.max_questions is not None and len(session.evidence) >= model.max_questions:
        return SessionStatus.STOPPED_MAX_QUESTIONS
    return None


def should_stop(model: QuestionnaireModel, session: Session) -> tuple[bool, SessionStatus | None]:
    reason = _stop_reason(model, session, posterior_entropy(model, session.evidence))
    return (reason is not None), reason


def _ranked_gains(model: QuestionnaireModel, candidates: Sequence[str], evidence: Evidence, base: float = 2.0) -> list[tuple[str, float]]:
    """(question, gain) pairs ordered the way selection treats them:
    by gain descending, with gains within tolerance kept in pool order."""
    h = posterior_entropy(model, evidence, base)
    gains = [
        (q, max(0.0, h - conditional_entropy(model, q, evidence, base)))
        for q in candidates
    ]
    ordered: list[tuple[str, float]] = []
    rest = list(gains)
    while rest:
        best = max(g for _, g in rest)
        i = next(i for i, (_, g) in enumerate(rest) if g >= best - GAIN_TIE_TOLERANCE)
        ordered.append(rest.pop(i))
    return ordered


def pick_question(model: QuestionnaireModel, session: Session, base: float = 2.0) -> str | None:
    """Highest-gain remaining question; ties go to earlier pool position."""
    if session.status is not SessionStatus.ACTIVE:
        raise SessionStateError(f"session is {session.status.value}, not active")
    if not session.remaining_pool:
        return None
    return _ranked_gains(model, session.remaining_pool, session.evidence, base)[0][0]


def answer_question(session: Session, question: str, answer: int) -> TranscriptEntry:
    """Record one answer; updates evidence, transcript, and status atomically."""
    model = session.model
    if session.status is not SessionStatus.ACTIVE:
        raise SessionStateError(f"session is {session.status.value}, not active")
    if question not in session.remaining_pool:
        raise StructuralError(f"question {question!r} is not in the remaining pool")
    card = model.network.cardinality(question)
    if not 0 <= int(answer) < card:
        raise StructuralError(f"answer {answer} out of range for {question!r} (cardinality {card})")

    # compute everything before mutating so a failure leaves the session intact
    gain = information_gain(model, question, session.evidence)
    new_evidence = dict(session.evidence)
    new_evidence[question] = int(answer)
    entropy_after = posterior_entropy(model, new_evidence)

    session.evidence = new_evidence
    session.remaining_pool = [q for q in session.remaining_pool if q != question]
    entry = TranscriptEntry(question=question, answer=int(answer), gain=gain, entropy_after=entropy_after)
    session.transcript.append(entry)
    reason = _stop_reason(model, session, entropy_after)
    session.status = reason or SessionStatus.ACTIVE
    return entry


def run_session(model: QuestionnaireModel, answer_fn: Callable[[str], int]) -> Session:
    """Drive the full ask/answer loop until a stop rule fires."""
    session = start_session(model)
    while session.status is SessionStatus.ACTIVE:
        q = pick_question(model, session)
        if q is None:  # unreachable: exhaustion stops the session first
            break
        answer_question(session, q, answer_fn(q))
    return session


# -- results -----------------------------------------------------------------


def grade(model: QuestionnaireModel, evidence: Evidence) -> float:
    """Expected evaluation-function value under the skill posterior."""
    joint = posterior(model.network, model.skills, evidence)
    return float(joint.table @ np.asarray(model.evaluation.table))


def marginal_risks(
    model: QuestionnaireModel,
    evidence: Evidence,
    decompositions: Mapping[str, Sequence[int]],
) -> dict[str, float]:
    """Posterior mass of each labeled set of joint skill states."""
    joint = posterior(model.network, model.skills, evidence)
    n = joint.table.size
    out: dict[str, float] = {}
    for label, states in decompositions.items():
        for s in states:
            if not 0 <= int(s) < n:
                raise StructuralError(f"risk group {label!r} references unknown joint state {s}")
        out[label] = float(sum(joint.table[int(s)] for s in states))
    return out


@dataclass(frozen=True)
class ExplanationReport:
    skill_posteriors: dict[str, tuple[float, ...]]
    joint_entropy: float
    per_candidate: tuple[tuple[str, float], ...]
    stop_margin: float


def explain(model: QuestionnaireModel, session: Session) -> ExplanationReport:
    """Numbers behind the next selection: posteriors, entropy, candidate gains."""
    joint = posterior(model.network, model.skills, session.evidence)
    cards = model.skill_cards()
    nd = joint.table.reshape(cards)
    posteriors: dict[str, tuple[float, ...]] = {}
    for i, skill in enumerate(model.skills):
        other = tuple(a for a in range(len(cards)) if a != i)
        marg = nd.sum(axis=other) if other else nd
        posteriors[skill] = tuple(float(x) for x in np.ravel(marg))

    h = _mode_entropy(joint.table, cards, model.entropy_mode, 2.0)
    candidates: tuple[tuple[str, float], ...] = ()
    if session.status is SessionStatus.ACTIVE:
        candidates = tuple(_ranked_gains(model, session.remaining_pool, session.evidence))
    return ExplanationReport(
        skill_posteriors=posteriors,
        joint_entropy=h,
        per_candidate=candidates,
        stop_margin=h - model.stop_threshold,
    )
