"""Adaptive questionnaires over discrete Bayesian networks.

Pick the next question by information gain, stop when the posterior
entropy over the latent skills drops below a threshold, grade by the
posterior expectation of an evaluation function.
"""

from .elicitation import (
    DGParams,
    DGQuestionSpec,
    build_naive_bayes,
    compile_dg_cpt,
    dg_to_probabilities,
    probabilities_to_dg,
)
from .engine import (
    EntropyMode,
    EvaluationFunction,
    ExplanationReport,
    QuestionDescriptor,
    QuestionnaireModel,
    Session,
    SessionStatus,
    TranscriptEntry,
    answer_question,
    conditional_entropy,
    entropy,
    explain,
    grade,
    information_gain,
    marginal_risks,
    pick_question,
    posterior_entropy,
    run_session,
    should_stop,
    start_session,
)
from .errors import (
    AskBayesError,
    CapacityError,
    DocumentError,
    InconsistentEvidenceError,
    InfeasibleParametersError,
    NonMonotoneQuestionError,
    ReplayError,
    SessionNotFoundError,
    SessionStateError,
    StructuralError,
    VersionConflictError,
)
from .factors import (
    DiscreteVariable,
    Factor,
    Role,
    factor_marginalize,
    factor_product,
    factor_reduce,
)
from .inference import enumerate_joint, posterior
from .modelio import (
    DIAGNOSTIC_CODES,
    FORMAT_VERSION,
    Diagnostic,
    parse_questionnaire,
    questionnaire_diagnostics,
    serialize_questionnaire,
)
from .network import (
    BayesianNetwork,
    Evidence,
    ValidationReport,
    Violation,
    check_evidence,
    validate_network,
)
from .sessions import (
    FileSessionStore,
    MemorySessionStore,
    SessionRecord,
    list_sessions,
    load_session,
    record_from_session,
    replay_record,
    save_session,
)

__all__ = [
    "AskBayesError",
    "BayesianNetwork",
    "CapacityError",
    "DGParams",
    "DGQuestionSpec",
    "DIAGNOSTIC_CODES",
    "Diagnostic",
    "DiscreteVariable",
    "DocumentError",
    "EntropyMode",
    "EvaluationFunction",
    "Evidence",
    "ExplanationReport",
    "FORMAT_VERSION",
    "Factor",
    "FileSessionStore",
    "InconsistentEvidenceError",
    "InfeasibleParametersError",
    "MemorySessionStore",
    "NonMonotoneQuestionError",
    "QuestionDescriptor",
    "QuestionnaireModel",
    "ReplayError",
    "Role",
    "Session",
    "SessionNotFoundError",
    "SessionRecord",
    "SessionStateError",
    "SessionStatus",
    "StructuralError",
    "TranscriptEntry",
    "ValidationReport",
    "VersionConflictError",
    "Violation",
    "answer_question",
    "build_naive_bayes",
    "check_evidence",
    "compile_dg_cpt",
    "conditional_entropy",
    "dg_to_probabilities",
    "entropy",
    "enumerate_joint",
    "explain",
    "factor_marginalize",
    "factor_product",
    "factor_reduce",
    "grade",
    "information_gain",
    "list_sessions",
    "load_session",
    "marginal_risks",
    "parse_questionnaire",
    "pick_question",
    "posterior",
    "posterior_entropy",
    "probabilities_to_dg",
    "questionnaire_diagnostics",
    "record_from_session",
    "replay_record",
    "run_session",
    "save_session",
    "serialize_questionnaire",
    "should_stop",
    "start_session",
    "validate_network",
]

__version__ = "0.1.0"
