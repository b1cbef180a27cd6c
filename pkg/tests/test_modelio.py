"""Document parsing, diagnostics, and canonical serialization."""

import json

import numpy as np
import pytest

from askbayes.errors import DocumentError, StructuralError
from askbayes.inference import posterior
from askbayes.modelio import (
    DIAGNOSTIC_CODES,
    FORMAT_VERSION,
    parse_questionnaire,
    questionnaire_diagnostics,
    serialize_questionnaire,
)

from conftest import FIXTURES, load_fixture

DIAG_DIR = FIXTURES / "diagnostics"
SHIPPED = ["single-skill-pair.json", "layered-skills.json", "wellbeing-screening.json"]


class TestShippedFixtures:
    @pytest.mark.parametrize("name", SHIPPED)
    def test_fixture_parses_clean(self, name):
        text = load_fixture(name)
        assert questionnaire_diagnostics(text) == []
        model = parse_questionnaire(text)
        assert model.skills and model.pool

    def test_pair_fixture_contents(self, pair_model):
        assert pair_model.title == "Basic proficiency check"
        assert pair_model.skills == ("S",)
        assert pair_model.question_ids() == ("Q1", "Q2")
        assert pair_model.stop_threshold == 0.5
        assert pair_model.explanation_panel is True

    def test_screening_fixture_contents(self, screening_model):
        assert screening_model.network.cardinality("T") == 4
        assert set(screening_model.risk_groups) == {"strain", "overload"}
        assert screening_model.max_questions == 3


class TestDiagnostics:
    def test_registry_and_fixture_set_agree(self):
        fixture_codes = {p.stem for p in DIAG_DIR.glob("*.json")}
        assert fixture_codes == set(DIAGNOSTIC_CODES)

    @pytest.mark.parametrize("code", sorted(DIAGNOSTIC_CODES))
    def test_documented_diagnostic_fires(self, code):
        text = (DIAG_DIR / f"{code}.json").read_text()
        diags = questionnaire_diagnostics(text)
        assert code in {d.code for d in diags}

    def test_diagnostics_carry_paths_and_messages(self):
        diags = questionnaire_diagnostics((DIAG_DIR / "cpt-shape.json").read_text())
        assert all(d.path.startswith("$") for d in diags)
        assert all(d.message for d in diags)
        assert all(d.code in DIAGNOSTIC_CODES for d in diags)

    def test_parse_questionnaire_raises_document_error(self):
        bad = (DIAG_DIR / "schema-violation.json").read_text()
        with pytest.raises(DocumentError) as err:
            parse_questionnaire(bad)
        assert err.value.diagnostics
        assert "schema-violation" in str(err.value)

    def test_syntax_error_short_circuits(self):
        diags = questionnaire_diagnostics("{not json")
        assert [d.code for d in diags] == ["syntax-error"]
        assert diags[0].path == "$"

    def test_non_object_document(self):
        diags = questionnaire_diagnostics("[1, 2]")
        assert diags and diags[0].code == "schema-violation"

    def test_version_gate_precedes_schema(self):
        doc = {"format_version": 99}  # missing everything else too
        diags = questionnaire_diagnostics(json.dumps(doc))
        assert [d.code for d in diags] == ["unsupported-version"]
        assert str(FORMAT_VERSION) in diags[0].message

    def test_schema_violation_path_rendering(self):
        doc = json.loads(load_fixture("single-skill-pair.json"))
        doc["questions"][0]["cpt"] = "oops"
        diags = questionnaire_diagnostics(json.dumps(doc))
        assert any(d.path == "$.questions[0].cpt" for d in diags)

    def test_exactly_one_parameterization_both_given(self):
        doc = json.loads(load_fixture("single-skill-pair.json"))
        doc["questions"][0]["dg"] = {"delta": 0.2, "gamma": 0.5}
        diags = questionnaire_diagnostics(json.dumps(doc))
        assert any(d.code == "question-parameterization" for d in diags)

    def test_unnormalized_cpt_not_repaired(self):
        doc = json.loads(load_fixture("single-skill-pair.json"))
        doc["questions"][0]["cpt"] = [[0.8, 0.1], [0.1, 0.9]]
        diags = questionnaire_diagnostics(json.dumps(doc))
        assert any(d.code == "network-cpt-row-unnormalized" for d in diags)


class TestSerialization:
    @pytest.mark.parametrize("name", SHIPPED)
    def test_canonical_form_is_byte_idempotent(self, name):
        model = parse_questionnaire(load_fixture(name))
        once = serialize_questionnaire(model)
        twice = serialize_questionnaire(parse_questionnaire(once))
        assert once == twice

    @pytest.mark.parametrize("name", SHIPPED)
    def test_round_trip_preserves_posteriors(self, name):
        rng = np.random.default_rng(hash(name) % 2**32)
        model = parse_questionnaire(load_fixture(name))
        clone = parse_questionnaire(serialize_questionnaire(model))
        qids = list(model.question_ids())
        for _ in range(25):
            k = int(rng.integers(0, len(qids) + 1))
            evidence = {}
            for i in rng.choice(len(qids), size=k, replace=False):
                qid = qids[int(i)]
                evidence[qid] = int(rng.integers(model.network.cardinality(qid)))
            a = posterior(model.network, model.skills, evidence)
            b = posterior(clone.network, clone.skills, evidence)
            np.testing.assert_allclose(a.table, b.table, atol=1e-12)

    def test_defaults_are_materialized(self, pair_model):
        doc = json.loads(serialize_questionnaire(pair_model))
        for q in doc["questions"]:
            assert q["states"] and q["answers"] and "text" in q
        for s in doc["skills"]:
            assert s["states"]
        assert doc["format_version"] == FORMAT_VERSION

    def test_dg_questions_serialize_as_explicit_cpts(self, layered_model):
        doc = json.loads(serialize_questionnaire(layered_model))
        for q in doc["questions"]:
            assert "cpt" in q and "dg" not in q and "dg_rows" not in q
            rows = np.asarray(q["cpt"], dtype=np.float64)
            np.testing.assert_allclose(rows.sum(axis=1), np.ones(len(rows)), atol=1e-12)

    def test_key_order_is_stable(self, pair_model):
        doc = serialize_questionnaire(pair_model)
        keys = list(json.loads(doc).keys())
        assert keys == sorted(keys, key=keys.index)  # insertion order kept by json
        assert keys[0] == "format_version"
        assert doc.endswith("\n")

    def test_auxiliary_variables_not_serializable(self):
        # documents describe skills and questions only
        from askbayes.engine import EvaluationFunction, QuestionDescriptor, QuestionnaireModel
        from askbayes.factors import DiscreteVariable, Factor, Role
        from askbayes.network import BayesianNetwork

        variables = [
            DiscreteVariable("s", ("0", "1"), Role.SKILL),
            DiscreteVariable("h", ("0", "1"), Role.AUXILIARY),
            DiscreteVariable("q", ("0", "1"), Role.QUESTION),
        ]
        net = BayesianNetwork(
            variables,
            {"s": (), "h": ("s",), "q": ("h",)},
            {
                "s": Factor(("s",), (2,), [0.5, 0.5]),
                "h": Factor(("s", "h"), (2, 2), [0.9, 0.1, 0.2, 0.8]),
                "q": Factor(("h", "q"), (2, 2), [0.8, 0.2, 0.3, 0.7]),
            },
        )
        model = QuestionnaireModel(
            network=net,
            skills=("s",),
            pool=(QuestionDescriptor("q"),),
            evaluation=EvaluationFunction((1.0, 0.0)),
            stop_threshold=0.1,
        )
        with pytest.raises(StructuralError):
            serialize_questionnaire(model)
