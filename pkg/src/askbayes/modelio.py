"""Questionnaire document format: strict JSON parsing and canonical output.

Parsing never half-succeeds: either a fully validated model comes back, or
every problem found is reported as a :class:`Diagnostic` with a JSON-path
location and a stable code.  Serialization is canonical (fixed key order,
explicit CPT rows, materialized defaults) so serialize-parse-serialize is
byte-idempotent.

The schema shipped in ``schemas/questionnaire.schema.json`` is original to
this package and normative for the format.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from functools import lru_cache
from importlib import resources

import jsonschema
import numpy as np

from .elicitation import DGParams, DGQuestionSpec, compile_dg_cpt
from .engine import (
    EntropyMode,
    EvaluationFunction,
    QuestionDescriptor,
    QuestionnaireModel,
)
from .errors import DocumentError, InfeasibleParametersError, StructuralError
from .factors import DiscreteVariable, Factor, Role
from .network import BayesianNetwork, validate_network

FORMAT_VERSION = 1

DEFAULT_QUESTION_STATES = ("correct", "incorrect")

# Every code the parser can emit; tests keep one fixture per code.
DIAGNOSTIC_CODES = {
    "syntax-error": "the text is not valid JSON",
    "unsupported-version": "format_version missing or not the supported revision",
    "schema-violation": "structure or type rejected by the document schema (includes unknown fields)",
    "variable-states": "a variable's state labels are unusable (too few, duplicates)",
    "answer-count": "answer display texts do not match the number of states",
    "skill-parameterization": "a skill needs 'prior' (root) or 'cpt' (with parents), and only the matching one",
    "question-parameterization": "a question needs exactly one of 'cpt', 'dg', 'dg_rows'",
    "cpt-shape": "a probability table has the wrong row count, row length, or invalid entries",
    "dg-shape": "difficulty/discrimination parameters do not fit the question (row count, parent config, non-binary question)",
    "infeasible-parameters": "difficulty/discrimination parameters imply a probability outside [0, 1]",
    "model-invalid": "the assembled model violates a questionnaire rule (evaluation length, thresholds, risk groups...)",
    "network-duplicate-id": "two variables share an id",
    "network-unknown-parent": "a parent references an undeclared variable",
    "network-missing-cpt": "a variable lacks its probability table (follows from an unknown parent, whose cardinality the table needs)",
    "network-cycle": "the parent structure contains a directed cycle",
    "network-cpt-row-unnormalized": "a CPT row does not sum to 1 within 1e-9",
    "network-question-has-child": "a question is used as a parent",
    "network-question-no-skill-parent": "a question has no skill among its parents",
    "network-skill-bad-parent": "a skill has a non-skill parent",
}


@dataclass(frozen=True)
class Diagnostic:
    path: str
    code: str
    message: str

    def __str__(self) -> str:
        return f"{self.path}: [{self.code}] {self.message}"


@lru_cache(maxsize=1)
def _validator() -> jsonschema.Draft202012Validator:
    text = resources.files("askbayes.schemas").joinpath("questionnaire.schema.json").read_text()
    schema = json.loads(text)
    jsonschema.Draft202012Validator.check_schema(schema)
    return jsonschema.Draft202012Validator(schema)


def _render_path(parts) -> str:
    out = "$"
    for p in parts:
        out += f"[{p}]" if isinstance(p, int) else f".{p}"
    return out


def questionnaire_diagnostics(text: str) -> list[Diagnostic]:
    """All problems in the document; empty list means it parses cleanly."""
    _, diags = _parse(text)
    return diags


def parse_questionnaire(text: str) -> QuestionnaireModel:
    """Parse a document or raise :class:`DocumentError` with every diagnostic."""
    model, diags = _parse(text)
    if diags:
        raise DocumentError(diags)
    assert model is not None
    return model


def _parse(text: str) -> tuple[QuestionnaireModel | None, list[Diagnostic]]:
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        return None, [
            Diagnostic("$", "syntax-error", f"invalid JSON at line {exc.lineno} column {exc.colno}: {exc.msg}")
        ]
    if not isinstance(doc, dict):
        return None, [Diagnostic("$", "schema-violation", "document root must be an object")]

    version = doc.get("format_version")
    if version != FORMAT_VERSION:
        return None, [
            Diagnostic(
                "$.format_version",
                "unsupported-version",
                f"format_version must be {FORMAT_VERSION}, got {version!r}",
            )
        ]

    schema_errors = sorted(
        _validator().iter_errors(doc),
        key=lambda e: ([str(p) for p in e.absolute_path], e.message),
    )
    if schema_errors:
        return None, [
            Diagnostic(_render_path(e.absolute_path), "schema-violation", e.message)
            for e in schema_errors
        ]

    diags: list[Diagnostic] = []
    variables: list[DiscreteVariable] = []
    parents: dict[str, tuple[str, ...]] = {}
    cpts: dict[str, Factor] = {}
    cards: dict[str, int] = {}
    section_of: dict[str, str] = {}

    def add(path: str, code: str, message: str) -> None:
        diags.append(Diagnostic(path, code, message))

    for i, entry in enumerate(doc["skills"]):
        path = f"$.skills[{i}]"
        var_id = entry["id"]
        states = tuple(entry["states"])
        try:
            variables.append(DiscreteVariable(var_id, states, Role.SKILL))
        except StructuralError as exc:
            add(path + ".states", "variable-states", str(exc))
            continue
        section_of.setdefault(var_id, path)
        cards[var_id] = len(states)
        pars = tuple(entry.get("parents", ()))
        parents[var_id] = pars
        has_prior, has_cpt = "prior" in entry, "cpt" in entry
        if pars:
            if has_prior or not has_cpt:
                add(path, "skill-parameterization", "a skill with parents needs 'cpt' and must not carry 'prior'")
                continue
            rows = entry["cpt"]
        else:
            if has_cpt or not has_prior:
                add(path, "skill-parameterization", "a root skill needs 'prior' and must not carry 'cpt'")
                continue
            rows = [entry["prior"]]
        _build_cpt(var_id, pars, rows, len(states), cards, cpts, path, add)

    for i, entry in enumerate(doc["questions"]):
        path = f"$.questions[{i}]"
        var_id = entry["id"]
        states = tuple(entry.get("states", DEFAULT_QUESTION_STATES))
        try:
            variables.append(DiscreteVariable(var_id, states, Role.QUESTION))
        except StructuralError as exc:
            add(path + ".states", "variable-states", str(exc))
            continue
        section_of.setdefault(var_id, path)
        cards[var_id] = len(states)
        answers = tuple(entry.get("answers", states))
        if len(answers) != len(states):
            add(path + ".answers", "answer-count", f"{len(answers)} answer texts for {len(states)} states")
        pars = tuple(entry["parents"])
        parents[var_id] = pars
        given = [k for k in ("cpt", "dg", "dg_rows") if k in entry]
        if len(given) != 1:
            add(
                path,
                "question-parameterization",
                f"exactly one of 'cpt', 'dg', 'dg_rows' must be given, got {given or 'none'}",
            )
            continue
        if given == ["cpt"]:
            _build_cpt(var_id, pars, entry["cpt"], len(states), cards, cpts, path, add)
        # dg forms are compiled after all cardinalities are known

    if diags:
        return None, diags

    # provisional network: enough context for the dg compiler to see
    # every variable's states
    provisional = BayesianNetwork(variables, parents, cpts)
    for i, entry in enumerate(doc["questions"]):
        path = f"$.questions[{i}]"
        var_id = entry["id"]
        if "dg" in entry:
            dg = entry["dg"]
            skilled = tuple(dg["skilled_config"]) if "skilled_config" in dg else None
            spec = _dg_spec(var_id, tuple(entry["parents"]), path, add, single=(dg, skilled))
        elif "dg_rows" in entry:
            spec = _dg_spec(var_id, tuple(entry["parents"]), path, add, rows=entry["dg_rows"])
        else:
            continue
        if spec is None:
            continue
        try:
            cpts[var_id] = compile_dg_cpt(spec, provisional)
        except InfeasibleParametersError as exc:
            add(path, "infeasible-parameters", str(exc))
        except StructuralError as exc:
            add(path, "dg-shape", str(exc))

    if diags:
        return None, diags

    net = BayesianNetwork(variables, parents, cpts)
    report = validate_network(net)
    if not report.ok:
        for v in report:
            add(section_of.get(v.variable, "$"), "network-" + v.code, v.message)
        return None, diags

    try:
        model = QuestionnaireModel(
            network=net,
            skills=tuple(entry["id"] for entry in doc["skills"]),
            pool=tuple(
                QuestionDescriptor(
                    variable=entry["id"],
                    text=entry.get("text", ""),
                    answers=tuple(entry.get("answers", entry.get("states", DEFAULT_QUESTION_STATES))),
                )
                for entry in doc["questions"]
            ),
            evaluation=EvaluationFunction(tuple(float(x) for x in doc["evaluation"])),
            stop_threshold=float(doc["stop_threshold"]),
            max_questions=doc.get("max_questions"),
            entropy_mode=EntropyMode(doc.get("entropy_mode", "joint")),
            risk_groups={k: tuple(int(s) for s in v) for k, v in doc.get("risk_groups", {}).items()},
            title=doc.get("title", ""),
            description=doc.get("description", ""),
            explanation_panel=bool(doc.get("explanation_panel", False)),
        )
    except StructuralError as exc:
        return None, [Diagnostic("$", "model-invalid", str(exc))]
    return model, []


def _build_cpt(var_id, pars, rows, card, cards, cpts, path, add) -> None:
    known = [p for p in pars if p in cards]
    if len(known) != len(pars):
        # unknown parents are the network validator's finding; no table
        # can be checked against an unknown cardinality
        return
    expected_rows = int(np.prod([cards[p] for p in pars])) if pars else 1
    if len(rows) != expected_rows:
        add(path, "cpt-shape", f"expected {expected_rows} row(s), got {len(rows)}")
        return
    bad = [j for j, row in enumerate(rows) if len(row) != card]
    if bad:
        add(path, "cpt-shape", f"row {bad[0]} has {len(rows[bad[0]])} entries, expected {card}")
        return
    table = np.asarray([float(x) for row in rows for x in row], dtype=np.float64)
    scope = tuple(pars) + (var_id,)
    shape = tuple(cards[p] for p in pars) + (card,)
    try:
        cpts[var_id] = Factor(scope, shape, table)
    except StructuralError as exc:
        add(path, "cpt-shape", str(exc))


def _dg_spec(var_id, pars, path, add, single=None, rows=None) -> DGQuestionSpec | None:
    try:
        if single is not None:
            dg, skilled = single
            return DGQuestionSpec(
                question=var_id,
                parents=pars,
                single=DGParams(float(dg["delta"]), float(dg["gamma"])),
                skilled_config=skilled,
            )
        return DGQuestionSpec(
            question=var_id,
            parents=pars,
            rows=tuple(DGParams(float(r["delta"]), float(r["gamma"])) for r in rows),
        )
    except StructuralError as exc:
        add(path, "dg-shape", str(exc))
        return None


# -- canonical output --------------------------------------------------------


def serialize_questionnaire(model: QuestionnaireModel) -> str:
    """Canonical document text for a model: fixed key order, explicit state
    indices and CPT rows, defaults materialized, sorted risk-group labels."""
    net = model.network
    pool_ids = set(model.question_ids())
    extra = [v for v in net.var_ids if v not in set(model.skills) and v not in pool_ids]
    if extra:
        raise StructuralError(
            f"the document format has no representation for auxiliary variables {extra}"
        )

    skills = []
    for sid in model.skills:
        var = net.variable(sid)
        entry = {
            "id": sid,
            "states": list(var.states),
            "parents": list(net.parents[sid]),
        }
        table = net.cpts[sid].table
        if net.parents[sid]:
            entry["cpt"] = table.reshape(-1, var.cardinality).tolist()
        else:
            entry["prior"] = table.tolist()
        skills.append(entry)

    questions = []
    for q in model.pool:
        var = net.variable(q.variable)
        questions.append(
            {
                "id": q.variable,
                "text": q.text,
                "states": list(var.states),
                "answers": list(q.answers) if q.answers else list(var.states),
                "parents": list(net.parents[q.variable]),
                "cpt": net.cpts[q.variable].table.reshape(-1, var.cardinality).tolist(),
            }
        )

    doc = {
        "format_version": FORMAT_VERSION,
        "title": model.title,
        "description": model.description,
        "entropy_mode": model.entropy_mode.value,
        "explanation_panel": model.explanation_panel,
        "skills": skills,
        "questions": questions,
        "evaluation": [float(x) for x in model.evaluation.table],
        "stop_threshold": float(model.stop_threshold),
        "max_questions": model.max_questions,
        "risk_groups": {k: [int(s) for s in model.risk_groups[k]] for k in sorted(model.risk_groups)},
    }
    return json.dumps(doc, indent=2, ensure_ascii=False) + "\n"
