"""HTTP endpoints under /api/v1.

Handlers stay thin: parse, call the service, shape the response. Domain
errors surface through one exception handler that maps error classes onto
status codes (400 validation, 404 unknown id, 409 conflicting state).
"""

from __future__ import annotations

from fastapi import APIRouter, Depends, Request

from captool import engine
from captool.api import schemas
from captool.engine import AnswerScale, Dimension
from captool.errors import InvalidAnswerForScale
from captool.governance import RejectionReason, RequestEvent
from captool.registry import ContributionTier
from captool.service import PortfolioService

router = APIRouter(prefix="/api/v1")


def get_service(request: Request) -> PortfolioService:
    return request.app.state.service


def _parse_enum(cls, raw: str, what: str):
    for member in cls:
        if member.value.lower() == raw.strip().lower():
            return member
    valid = ", ".join(m.value for m in cls)
    raise InvalidAnswerForScale(f"{raw!r} is not a valid {what} (expected one of: {valid})")


@router.post("/sessions", status_code=201, response_model=schemas.SessionViewOut)
def create_session(body: schemas.SessionCreateIn | None = None,
                   service: PortfolioService = Depends(get_service)):
    body = body or schemas.SessionCreateIn()
    meta = service.create_session(body.session_id, body.artifacts)
    return schemas.SessionViewOut.from_domain(service.session_view(meta.session_id))


@router.get("/sessions/{sid}", response_model=schemas.SessionViewOut)
def get_session(sid: str, service: PortfolioService = Depends(get_service)):
    return schemas.SessionViewOut.from_domain(service.session_view(sid))


@router.post("/sessions/{sid}/artifacts/{aid}/scores", response_model=schemas.ArtifactViewOut)
def post_scores(sid: str, aid: str, body: schemas.ScoresIn,
                service: PortfolioService = Depends(get_service)):
    scale = _parse_enum(AnswerScale, body.scale, "answer scale") if body.scale else None
    view = service.record_scores(
        sid, aid, body.participant_id, body.answers, version=body.version, scale=scale
    )
    return schemas.ArtifactViewOut.from_domain(view)


@router.put("/sessions/{sid}/artifacts/{aid}/consensus", response_model=schemas.ArtifactViewOut)
def put_consensus(sid: str, aid: str, body: schemas.ConsensusIn,
                  service: PortfolioService = Depends(get_service)):
    view = service.set_consensus(sid, aid, body.answers, version=body.version)
    return schemas.ArtifactViewOut.from_domain(view)


@router.get("/sessions/{sid}/artifacts/{aid}/classification", response_model=schemas.ClassificationOut)
def get_classification(sid: str, aid: str, bi: float | None = None, cc: float | None = None,
                       service: PortfolioService = Depends(get_service)):
    """Classification of the stored answers, or a stateless what-if preview
    when bi/cc query coordinates are supplied."""
    if bi is not None or cc is not None:
        if bi is None or cc is None:
            raise InvalidAnswerForScale("what-if preview needs both bi and cc")
        service._session(sid)
        preview = service.what_if(bi, cc, artifact_id=aid)
    else:
        preview = service.classification(sid, aid)
    return schemas.ClassificationOut.from_domain(preview)


@router.post("/decisions/{aid}/finalize", status_code=201, response_model=schemas.DecisionOut)
def finalize_decision(aid: str, body: schemas.FinalizeIn,
                      service: PortfolioService = Depends(get_service)):
    decision = service.finalize_decision(aid, body.session_id, rationale=body.rationale)
    return schemas.DecisionOut.from_domain(decision)


@router.get("/reports/quadrants", response_model=schemas.QuadrantReportOut)
def report_quadrants(service: PortfolioService = Depends(get_service)):
    return schemas.QuadrantReportOut.from_domain(service.quadrant_report())


@router.get("/reports/compliance", response_model=schemas.ComplianceReportOut)
def report_compliance(window_days: int = 90, service: PortfolioService = Depends(get_service)):
    return schemas.ComplianceReportOut.from_domain(service.compliance_report(window_days))


@router.get("/trace/contributions/{cid}", response_model=schemas.TraceOut)
def trace_contribution(cid: str, service: PortfolioService = Depends(get_service)):
    return schemas.TraceOut.from_domain(service.trace_contribution(cid))


@router.get("/trace/features/{fid}", response_model=schemas.ReverseTraceOut)
def trace_feature(fid: str, service: PortfolioService = Depends(get_service)):
    return schemas.ReverseTraceOut.from_domain(service.trace_feature(fid))


@router.post("/requests", status_code=201, response_model=schemas.RequestOut)
def submit_request(body: schemas.RequestIn, service: PortfolioService = Depends(get_service)):
    tier = _parse_enum(ContributionTier, body.tier, "contribution tier")
    request = service.submit_request(
        patch_id=body.patch_id,
        requested_by=body.requested_by,
        tier=tier,
        ecosystem=body.ecosystem,
        justification=body.justification,
        request_id=body.request_id,
    )
    return schemas.RequestOut.from_domain(request)


@router.post("/requests/{rid}/events", response_model=schemas.RequestOut)
def advance_request(rid: str, body: schemas.EventIn,
                    service: PortfolioService = Depends(get_service)):
    event = _parse_enum(RequestEvent, body.event, "request event")
    reason = _parse_enum(RejectionReason, body.reason, "rejection reason") if body.reason else None
    request = service.advance_request(rid, event, reason=reason)
    return schemas.RequestOut.from_domain(request)


@router.get("/config", response_model=schemas.ConfigOut)
def get_config(service: PortfolioService = Depends(get_service)):
    """Band geometry and batteries, so clients never hard-code thresholds."""
    config = service.portfolio.config
    return schemas.ConfigOut(
        default_scale=config.default_scale.value,
        scale_levels={
            scale.value: engine.scale_levels(scale) for scale in AnswerScale
        },
        quadrant_threshold=config.quadrant_threshold,
        boundary_width=config.boundary_width,
        objective_bands=list(config.objective_bands),
        objective_order=[o.value for o in engine.OBJECTIVE_ORDER],
        secondary_epsilon=config.secondary_epsilon,
        batteries={
            Dimension.BUSINESS_IMPACT.value: [
                schemas.QuestionOut(id=q.id, text=q.text, guidance=q.guidance)
                for q in config.business_impact_battery.questions
            ],
            Dimension.CONTROL_COMPLEXITY.value: [
                schemas.QuestionOut(id=q.id, text=q.text, guidance=q.guidance)
                for q in config.control_complexity_battery.questions
            ],
        },
    )
