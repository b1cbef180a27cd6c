"""Exception types shared across the package."""

from __future__ import annotations


class AskBayesError(Exception):
    """Base class for all package errors."""


class StructuralError(AskBayesError, ValueError):
    """A value violates a structural precondition (bad scope, id, index...)."""


class InconsistentEvidenceError(AskBayesError, ValueError):
    """The observed evidence has probability zero under the model."""


class CapacityError(AskBayesError, ValueError):
    """A brute-force operation would exceed its state-space cap."""


class InfeasibleParametersError(AskBayesError, ValueError):
    """Discrimination/difficulty parameters imply a probability outside [0, 1]."""


class NonMonotoneQuestionError(AskBayesError, ValueError):
    """Correct-answer probability is lower with the skill than without it."""


class SessionStateError(AskBayesError, RuntimeError):
    """An operation requires a session in a different lifecycle state."""


class DocumentError(AskBayesError, ValueError):
    """A questionnaire document failed to parse; carries all diagnostics."""

    def __init__(self, diagnostics):
        self.diagnostics = list(diagnostics)
        lines = "; ".join(str(d) for d in self.diagnostics)
        super().__init__(f"invalid questionnaire document: {lines}")


class SessionNotFoundError(AskBayesError, KeyError):
    """No stored session under the given id."""


class VersionConflictError(AskBayesError, ValueError):
    """A stored session belongs to a different questionnaire or format version."""


class ReplayError(AskBayesError, ValueError):
    """A stored transcript does not reproduce under the current model."""
