"""``cap`` command line: a thin client over the portfolio service.

Every command loads the portfolio file, applies one operation through the same
service layer the HTTP API uses, and saves it back. ``--json`` emits exactly
the documents the corresponding HTTP endpoints return.
"""

from __future__ import annotations

import functools
import sys
from pathlib import Path

import click

from captool import fixtures, store
from captool.api import schemas
from captool.engine import AnswerScale, display_score
from captool.errors import CapError
from captool.governance import RejectionReason, RequestEvent
from captool.registry import ContributionTier, Repository
from captool.reporting import QUADRANT_ORDER
from captool.service import PortfolioService
from captool.store import Portfolio

_PORTFOLIO_OPT = click.option(
    "--portfolio", "portfolio_path", envvar="CAP_PORTFOLIO", default="portfolio.json",
    show_default=True, help="Portfolio document to operate on.",
)
_JSON_OPT = click.option("--json", "as_json", is_flag=True, help="Machine-readable output.")


def _load_service(portfolio_path: str) -> PortfolioService:
    path = Path(portfolio_path)
    portfolio = store.load(path) if path.exists() else Portfolio()
    return PortfolioService(portfolio, path=path)


def domain_errors(fn):
    """Domain failures exit 1; usage errors keep click's exit 2."""

    @functools.wraps(fn)
    def wrapper(*args, **kwargs):
        try:
            return fn(*args, **kwargs)
        except CapError as exc:
            click.echo(f"error [{exc.code}]: {exc.message}", err=True)
            sys.exit(1)

    return wrapper


def emit(model, as_json: bool, human: str) -> None:
    if as_json:
        click.echo(model.model_dump_json(indent=2))
    else:
        click.echo(human)


def _parse_answers(text: str) -> dict[str, str]:
    answers: dict[str, str] = {}
    for pair in text.split(","):
        pair = pair.strip()
        if not pair:
            continue
        if "=" not in pair:
            raise click.UsageError(f"answers must be q=value pairs, got {pair!r}")
        key, _, value = pair.partition("=")
        answers[key.strip()] = value.strip()
    if not answers:
        raise click.UsageError("no answers given")
    return answers


@click.group()
def main():
    """Contribution-strategy decision support."""


@main.command("import")
@click.option("--repo", "repo_name", required=True,
              type=click.Choice([r.value for r in Repository]), help="Target repository.")
@click.option("--file", "file_path", required=True, type=click.Path(exists=True, dir_okay=False))
@_PORTFOLIO_OPT
@_JSON_OPT
@domain_errors
def import_cmd(repo_name: str, file_path: str, portfolio_path: str, as_json: bool):
    """Ingest a repository export (CSV, ';' for list cells)."""
    service = _load_service(portfolio_path)
    count = service.import_csv(Repository(repo_name), file_path)
    service.save()
    model = schemas.ImportOut(repository=repo_name, imported=count)
    emit(model, as_json, f"imported {count} records into {repo_name}")


@main.command()
@click.argument("artifact_id")
@click.option("--session", "session_id", required=True, help="Scoring session id.")
@click.option("--participant", "participant_id", required=True)
@click.option("--answers", required=True, help="Comma-separated q=value pairs, e.g. bi1=3,bi2=2.")
@click.option("--scale", type=click.Choice([s.value for s in AnswerScale]), default=None,
              help="Answer scale for a new assessment (default from config).")
@_PORTFOLIO_OPT
@_JSON_OPT
@domain_errors
def assess(artifact_id: str, session_id: str, participant_id: str, answers: str,
           scale: str | None, portfolio_path: str, as_json: bool):
    """Record one participant's answers for an artifact."""
    service = _load_service(portfolio_path)
    service.ensure_session(session_id)
    view = service.record_scores(
        session_id, artifact_id, participant_id, _parse_answers(answers),
        scale=AnswerScale(scale) if scale else None,
    )
    service.save()
    model = schemas.ArtifactViewOut.from_domain(view)
    lines = [f"{artifact_id} (session {session_id}): status {view.status}"]
    if view.provisional_scores:
        lines.append(
            f"provisional bi={display_score(view.provisional_scores.business_impact)} "
            f"cc={display_score(view.provisional_scores.control_complexity)}"
        )
    emit(model, as_json, "\n".join(lines))


@main.command()
@click.argument("artifact_id")
@click.option("--session", "session_id", required=True)
@click.option("--answers", required=True, help="Comma-separated q=value pairs.")
@_PORTFOLIO_OPT
@_JSON_OPT
@domain_errors
def consensus(artifact_id: str, session_id: str, answers: str, portfolio_path: str, as_json: bool):
    """Record consensus answers; full coverage finalizes the assessment."""
    service = _load_service(portfolio_path)
    service.ensure_session(session_id)
    view = service.set_consensus(session_id, artifact_id, _parse_answers(answers))
    service.save()
    model = schemas.ArtifactViewOut.from_domain(view)
    lines = [f"{artifact_id} (session {session_id}): status {view.status}"]
    if view.consensus_scores:
        lines.append(
            f"consensus bi={display_score(view.consensus_scores.business_impact)} "
            f"cc={display_score(view.consensus_scores.control_complexity)}"
        )
    emit(model, as_json, "\n".join(lines))


@main.command()
@click.argument("artifact_id")
@click.option("--session", "session_id", default=None, help="Defaults to the newest assessment.")
@_PORTFOLIO_OPT
@_JSON_OPT
@domain_errors
def classify(artifact_id: str, session_id: str | None, portfolio_path: str, as_json: bool):
    """Print scores, quadrant, flags, objectives, policy and venue."""
    service = _load_service(portfolio_path)
    preview = service.classify_artifact(artifact_id, session_id)
    model = schemas.ClassificationOut.from_domain(preview)
    flags = ", ".join(model.boundary_flags) or "none"
    objective = model.primary_objective
    if model.secondary_objective:
        objective += f" (secondary: {model.secondary_objective})"
    human = "\n".join([
        f"{artifact_id}: bi={display_score(model.scores.business_impact)} "
        f"cc={display_score(model.scores.control_complexity)} [{model.source}]",
        f"quadrant: {model.quadrant} (flags: {flags})",
        f"objective: {objective}",
        f"policy: {model.policy}",
        f"venue: {model.venue}",
    ])
    emit(model, as_json, human)


@main.group()
def report():
    """Portfolio-level reports."""


@report.command()
@_PORTFOLIO_OPT
@_JSON_OPT
@domain_errors
def quadrants(portfolio_path: str, as_json: bool):
    """Decision counts and shares per quadrant."""
    service = _load_service(portfolio_path)
    model = schemas.QuadrantReportOut.from_domain(service.quadrant_report())
    lines = [f"total: {model.total}"]
    for quadrant in QUADRANT_ORDER:
        name = quadrant.value
        lines.append(
            f"{name:<18} {model.counts[name]:>4}  {model.display_percentages[name]:>3}%"
        )
    emit(model, as_json, "\n".join(lines))


@report.command()
@click.option("--window", "window_days", type=int, default=90, show_default=True,
              help="Look-back window in days.")
@_PORTFOLIO_OPT
@_JSON_OPT
@domain_errors
def compliance(window_days: int, portfolio_path: str, as_json: bool):
    """Per-feature follow-up of policy vs merged contributions."""
    service = _load_service(portfolio_path)
    model = schemas.ComplianceReportOut.from_domain(service.compliance_report(window_days))
    lines = [f"window: {model.window_days} days (as of {model.as_of})"]
    for entry in model.entries:
        verdict = "ok" if entry.compliant else "NOT COMPLIANT"
        lines.append(
            f"{entry.feature_id:<16} {entry.policy:<24} patches={entry.patches} "
            f"merged={entry.contributions_merged}  {verdict}"
        )
    if not model.entries:
        lines.append("no features with a known policy")
    emit(model, as_json, "\n".join(lines))


@main.group()
def trace():
    """Traceability queries."""


@trace.command("contribution")
@click.argument("contribution_id")
@_PORTFOLIO_OPT
@_JSON_OPT
@domain_errors
def trace_contribution(contribution_id: str, portfolio_path: str, as_json: bool):
    """Follow a contribution down to features and platforms."""
    service = _load_service(portfolio_path)
    model = schemas.TraceOut.from_domain(service.trace_contribution(contribution_id))
    status = "complete" if model.complete else f"incomplete (dangling at {model.dangling_at})"
    human = "\n".join([
        f"contribution {model.contribution_id} -> patch {model.patch_id} [{status}]",
        f"features:  {', '.join(model.feature_ids) or '-'}",
        f"fbaa:      {', '.join(model.fbaa_ids) or '-'}",
        f"platforms: {', '.join(model.platform_ids) or '-'}",
    ])
    emit(model, as_json, human)


@trace.command("feature")
@click.argument("feature_id")
@_PORTFOLIO_OPT
@_JSON_OPT
@domain_errors
def trace_feature(feature_id: str, portfolio_path: str, as_json: bool):
    """List patches, contributions and commits touching a feature."""
    service = _load_service(portfolio_path)
    model = schemas.ReverseTraceOut.from_domain(service.trace_feature(feature_id))
    human = "\n".join([
        f"feature {model.feature_id}",
        f"patches:       {', '.join(model.patches) or '-'}",
        f"contributions: {', '.join(model.contributions) or '-'}",
        f"commits:       {', '.join(model.commits) or '-'}",
    ])
    emit(model, as_json, human)


@main.group()
def request():
    """Contribution requests (reactive approach)."""


@request.command()
@click.option("--patch", "patch_id", required=True)
@click.option("--by", "requested_by", required=True, help="Requesting contributor.")
@click.option("--tier", required=True, type=click.Choice([t.value for t in ContributionTier]))
@click.option("--ecosystem", required=True)
@click.option("--justification", default="")
@click.option("--id", "request_id", default=None, help="Explicit request id.")
@_PORTFOLIO_OPT
@_JSON_OPT
@domain_errors
def submit(patch_id: str, requested_by: str, tier: str, ecosystem: str,
           justification: str, request_id: str | None, portfolio_path: str, as_json: bool):
    """Submit a request; routing depends on tier and frame agreements."""
    service = _load_service(portfolio_path)
    req = service.submit_request(
        patch_id=patch_id, requested_by=requested_by, tier=ContributionTier(tier),
        ecosystem=ecosystem, justification=justification, request_id=request_id,
    )
    service.save()
    model = schemas.RequestOut.from_domain(req)
    emit(model, as_json, f"request {model.request_id}: {model.state}")


@request.command()
@click.argument("request_id")
@click.option("--event", required=True, type=click.Choice([e.value for e in RequestEvent]))
@click.option("--reason", type=click.Choice([r.value for r in RejectionReason]), default=None)
@_PORTFOLIO_OPT
@_JSON_OPT
@domain_errors
def advance(request_id: str, event: str, reason: str | None, portfolio_path: str, as_json: bool):
    """Apply a lifecycle event to a request."""
    service = _load_service(portfolio_path)
    req = service.advance_request(
        request_id, RequestEvent(event),
        reason=RejectionReason(reason) if reason else None,
    )
    service.save()
    model = schemas.RequestOut.from_domain(req)
    suffix = f" ({model.rejection_reason})" if model.rejection_reason else ""
    emit(model, as_json, f"request {model.request_id}: {model.state}{suffix}")


@main.command()
@click.option("--name", required=True, type=click.Choice(sorted(fixtures.FIXTURES)))
@_PORTFOLIO_OPT
@domain_errors
def fixture(name: str, portfolio_path: str):
    """Write a built-in demo portfolio to the portfolio path."""
    store.save(fixtures.build_fixture(name), portfolio_path)
    click.echo(f"wrote fixture {name!r} to {portfolio_path}")


@main.command()
@click.option("--port", type=int, default=8000, show_default=True)
@click.option("--host", default="127.0.0.1", show_default=True)
@click.option("--ui", "ui_dir", type=click.Path(exists=True, file_okay=False), default=None,
              help="Also serve the workshop board from this directory at /ui.")
@_PORTFOLIO_OPT
@domain_errors
def serve(port: int, host: str, ui_dir: str | None, portfolio_path: str):
    """Run the HTTP API bound to a portfolio file."""
    import uvicorn

    from captool.api import create_app

    path = Path(portfolio_path)
    portfolio = store.load(path) if path.exists() else Portfolio()
    service = PortfolioService(portfolio, path=path, autosave=True)
    app = create_app(service, ui_dir=ui_dir)
    click.echo(f"serving portfolio {path} on http://{host}:{port}")
    if ui_dir:
        click.echo(f"workshop board at http://{host}:{port}/ui/")
    uvicorn.run(app, host=host, port=port, log_level="info")


if __name__ == "__main__":
    main()
