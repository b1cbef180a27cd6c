"""Command line entry points: validate, ask, simulate, serve, openapi."""

from __future__ import annotations

import json
import sys
from pathlib import Path

import click

from .engine import SessionStatus, answer_question, grade, marginal_risks, pick_question, start_session
from .modelio import parse_questionnaire, questionnaire_diagnostics
from .simulate import PolicySpec, run_batch


@click.group()
@click.version_option(package_name="askbayes")
def main():
    """Adaptive questionnaires over discrete Bayesian networks."""


@main.command()
@click.option("--model", "model_path", required=True, type=click.Path(exists=True, dir_okay=False), help="Questionnaire document (JSON).")
def validate(model_path: str):
    """Check a questionnaire document; print diagnostics if any."""
    text = Path(model_path).read_text(encoding="utf-8")
    diagnostics = questionnaire_diagnostics(text)
    if not diagnostics:
        model = parse_questionnaire(text)
        click.echo(
            f"OK: {model.title or model_path} "
            f"({len(model.skills)} skill(s), {len(model.pool)} question(s))"
        )
        return
    for d in diagnostics:
        click.echo(str(d), err=True)
    sys.exit(1)


@main.command()
@click.option("--model", "model_path", required=True, type=click.Path(exists=True, dir_okay=False), help="Questionnaire document (JSON).")
def ask(model_path: str):
    """Run an interactive session in the terminal; answer by option index."""
    model = parse_questionnaire(Path(model_path).read_text(encoding="utf-8"))
    if model.title:
        click.echo(model.title)
    session = start_session(model)
    while session.status is SessionStatus.ACTIVE:
        question = pick_question(model, session)
        assert question is not None
        descriptor = model.descriptor(question)
        var = model.network.variable(question)
        answers = descriptor.answers or var.states
        click.echo(f"\n{descriptor.text or question}")
        for i, text in enumerate(answers):
            click.echo(f"  [{i}] {text}")
        choice = click.prompt("Answer", type=click.IntRange(0, len(answers) - 1))
        entry = answer_question(session, question, choice)
        click.echo(f"  (gain {entry.gain:.4f} bits, entropy now {entry.entropy_after:.4f} bits)")
    click.echo(f"\nStopped: {session.status.value}")
    click.echo(f"Questions asked: {len(session.transcript)}")
    click.echo(f"Grade: {grade(model, session.evidence):.6f}")
    if model.risk_groups:
        for label, value in marginal_risks(model, session.evidence, model.risk_groups).items():
            click.echo(f"Risk {label}: {value:.6f}")


@main.command()
@click.option("--model", "model_path", required=True, type=click.Path(exists=True, dir_okay=False), help="Questionnaire document (JSON).")
@click.option("--runs", default=100, show_default=True, type=click.IntRange(min=1), help="Number of simulated takers.")
@click.option("--policies", default="ig,random,fixed", show_default=True, help="Comma-separated: ig, random, fixed.")
@click.option("--seed", default=0, show_default=True, type=int, help="Batch seed; fixed seed reproduces the report byte for byte.")
@click.option("--out", "out_path", type=click.Path(dir_okay=False, writable=True), help="Write the JSON report here instead of stdout.")
def simulate(model_path: str, runs: int, policies: str, seed: int, out_path: str | None):
    """Benchmark selection policies against simulated takers."""
    model = parse_questionnaire(Path(model_path).read_text(encoding="utf-8"))
    specs = [PolicySpec.parse(name) for name in policies.split(",") if name.strip()]
    report = run_batch(model, runs, specs, seed)
    text = report.to_json()
    if out_path:
        Path(out_path).write_text(text, encoding="utf-8")
        click.echo(f"wrote {out_path}")
    else:
        click.echo(text, nl=False)


@main.command()
@click.option("--host", default="127.0.0.1", show_default=True, envvar="ASKBAYES_HOST", help="Listen address.")
@click.option("--port", default=8000, show_default=True, type=int, envvar="ASKBAYES_PORT", help="Listen port.")
@click.option("--store", "store_path", envvar="ASKBAYES_STORE", type=click.Path(dir_okay=False), help="Append-only session journal; omit for in-memory.")
@click.option("--cors", "cors_origins", envvar="ASKBAYES_CORS", help="Comma-separated allowed origins.")
@click.option("--preload", "preload_paths", multiple=True, type=click.Path(exists=True, dir_okay=False), help="Questionnaire document(s) to publish at startup.")
def serve(host: str, port: int, store_path: str | None, cors_origins: str | None, preload_paths: tuple[str, ...]):
    """Run the REST service."""
    import uvicorn

    from .service import create_app
    from .sessions import FileSessionStore

    store = FileSessionStore(store_path) if store_path else None
    origins = [o.strip() for o in cors_origins.split(",")] if cors_origins else None
    app = create_app(session_store=store, cors_origins=origins)
    for path in preload_paths:
        document = json.loads(Path(path).read_text(encoding="utf-8"))
        survey = app.state.register_survey(document, publish=True)
        click.echo(f"published {path} as survey {survey.id}")
    uvicorn.run(app, host=host, port=port, log_level="info")


@main.command()
@click.option("--out", "out_path", type=click.Path(dir_okay=False, writable=True), help="Write the schema here instead of stdout.")
def openapi(out_path: str | None):
    """Print the service's OpenAPI description (the shipped copy is normative)."""
    from .service import create_app

    schema = create_app().openapi()
    text = json.dumps(schema, indent=2, ensure_ascii=False) + "\n"
    if out_path:
        Path(out_path).write_text(text, encoding="utf-8")
        click.echo(f"wrote {out_path}")
    else:
        click.echo(text, nl=False)


if __name__ == "__main__":
    main()
