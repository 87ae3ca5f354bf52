"""Request/response models for the HTTP API.

The CLI's ``--json`` mode serializes the same response models, so both
interfaces emit structurally identical documents for the same query.
"""

from __future__ import annotations

from typing import Any, Optional, Union

from pydantic import BaseModel, Field

from captool import reporting, store
from captool.engine import DimensionScore, StrategyDecision
from captool.governance import ContributionRequest
from captool.registry import ReverseTrace, TraceChain
from captool.service import ArtifactView, ClassificationPreview, SessionView

RawAnswerIn = Union[int, str]


# -- request bodies -------------------------------------------------------------

class SessionCreateIn(BaseModel):
    session_id: Optional[str] = None
    artifacts: list[str] = Field(default_factory=list)


class ScoresIn(BaseModel):
    participant_id: str
    answers: dict[str, RawAnswerIn]
    scale: Optional[str] = None
    version: Optional[int] = None


class ConsensusIn(BaseModel):
    answers: dict[str, RawAnswerIn]
    version: Optional[int] = None


class FinalizeIn(BaseModel):
    session_id: str
    rationale: str = ""


class RequestIn(BaseModel):
    patch_id: str
    requested_by: str
    tier: str
    ecosystem: str
    justification: str = ""
    request_id: Optional[str] = None


class EventIn(BaseModel):
    event: str
    reason: Optional[str] = None


# -- responses ---------------------------------------------------------------

class ErrorOut(BaseModel):
    code: str
    message: str
    details: dict[str, Any] = Field(default_factory=dict)


class ScorePairOut(BaseModel):
    business_impact: float
    control_complexity: float

    @classmethod
    def from_domain(cls, scores: DimensionScore) -> "ScorePairOut":
        return cls(
            business_impact=scores.business_impact,
            control_complexity=scores.control_complexity,
        )


class ClassificationOut(BaseModel):
    artifact_id: Optional[str]
    source: str
    scores: ScorePairOut
    quadrant: str
    boundary_flags: list[str]
    primary_objective: str
    secondary_objective: Optional[str]
    policy: str
    venue: str
    objective_blend: float

    @classmethod
    def from_domain(cls, preview: ClassificationPreview) -> "ClassificationOut":
        return cls(
            artifact_id=preview.artifact_id,
            source=preview.source,
            scores=ScorePairOut.from_domain(preview.scores),
            quadrant=preview.quadrant.value,
            boundary_flags=[f.value for f in preview.boundary_flags],
            primary_objective=preview.primary_objective.value,
            secondary_objective=(
                preview.secondary_objective.value if preview.secondary_objective else None
            ),
            policy=preview.policy.value,
            venue=preview.venue.value,
            objective_blend=preview.objective_blend,
        )


class ArtifactViewOut(BaseModel):
    artifact_id: str
    status: str
    scale: str
    participants: list[str]
    distributions: dict[str, dict[str, int]]
    provisional_scores: Optional[ScorePairOut]
    consensus_scores: Optional[ScorePairOut]
    classification: Optional[ClassificationOut]

    @classmethod
    def from_domain(cls, view: ArtifactView) -> "ArtifactViewOut":
        return cls(
            artifact_id=view.artifact_id,
            status=view.status,
            scale=view.scale.value,
            participants=list(view.participants),
            distributions=view.distributions,
            provisional_scores=(
                ScorePairOut.from_domain(view.provisional_scores) if view.provisional_scores else None
            ),
            consensus_scores=(
                ScorePairOut.from_domain(view.consensus_scores) if view.consensus_scores else None
            ),
            classification=(
                ClassificationOut.from_domain(view.classification) if view.classification else None
            ),
        )


class SessionViewOut(BaseModel):
    session_id: str
    version: int
    artifacts: list[ArtifactViewOut]

    @classmethod
    def from_domain(cls, view: SessionView) -> "SessionViewOut":
        return cls(
            session_id=view.session_id,
            version=view.version,
            artifacts=[ArtifactViewOut.from_domain(a) for a in view.artifacts],
        )


class DecisionOut(BaseModel):
    artifact_id: str
    scores: ScorePairOut
    quadrant: str
    boundary_flags: list[str]
    primary_objective: str
    secondary_objective: Optional[str]
    policy: str
    venue: str
    rationale: str
    decided_at: str

    @classmethod
    def from_domain(cls, decision: StrategyDecision) -> "DecisionOut":
        return cls(
            artifact_id=decision.artifact_id,
            scores=ScorePairOut.from_domain(decision.scores),
            quadrant=decision.quadrant.value,
            boundary_flags=[f.value for f in decision.boundary_flags],
            primary_objective=decision.primary_objective.value,
            secondary_objective=(
                decision.secondary_objective.value if decision.secondary_objective else None
            ),
            policy=decision.policy.value,
            venue=decision.venue.value,
            rationale=decision.rationale,
            decided_at=store.format_ts(decision.decided_at),
        )


class QuadrantReportOut(BaseModel):
    total: int
    counts: dict[str, int]
    percentages: dict[str, float]
    display_percentages: dict[str, int]

    @classmethod
    def from_domain(cls, report: reporting.QuadrantShareReport) -> "QuadrantReportOut":
        return cls(
            total=report.total,
            counts={q.value: report.counts[q] for q in reporting.QUADRANT_ORDER},
            percentages={q.value: float(report.exact_percentages[q]) for q in reporting.QUADRANT_ORDER},
            display_percentages={
                q.value: report.display_percentages[q] for q in reporting.QUADRANT_ORDER
            },
        )


class ComplianceEntryOut(BaseModel):
    feature_id: str
    policy: str
    patches: int
    contributions_merged: int
    compliant: bool


class ComplianceReportOut(BaseModel):
    window_days: int
    as_of: str
    entries: list[ComplianceEntryOut]

    @classmethod
    def from_domain(cls, report: reporting.ComplianceReport) -> "ComplianceReportOut":
        return cls(
            window_days=report.window_days,
            as_of=store.format_ts(report.as_of),
            entries=[
                ComplianceEntryOut(
                    feature_id=e.feature_id,
                    policy=e.policy.value,
                    patches=e.patches,
                    contributions_merged=e.contributions_merged,
                    compliant=e.compliant,
                )
                for e in report.entries
            ],
        )


class TraceOut(BaseModel):
    contribution_id: str
    patch_id: str
    feature_ids: list[str]
    fbaa_ids: list[str]
    platform_ids: list[str]
    complete: bool
    dangling_at: Optional[str]

    @classmethod
    def from_domain(cls, chain: TraceChain) -> "TraceOut":
        return cls(
            contribution_id=chain.contribution_id,
            patch_id=chain.patch_id,
            feature_ids=list(chain.feature_ids),
            fbaa_ids=list(chain.fbaa_ids),
            platform_ids=list(chain.platform_ids),
            complete=chain.complete,
            dangling_at=chain.dangling_at,
        )


class ReverseTraceOut(BaseModel):
    feature_id: str
    patches: list[str]
    contributions: list[str]
    commits: list[str]

    @classmethod
    def from_domain(cls, trace: ReverseTrace) -> "ReverseTraceOut":
        return cls(
            feature_id=trace.feature_id,
            patches=list(trace.patches),
            contributions=list(trace.contributions),
            commits=list(trace.commits),
        )


class RequestOut(BaseModel):
    request_id: str
    patch_id: str
    requested_by: str
    tier: str
    ecosystem: str
    justification: str
    created_at: str
    state: str
    rejection_reason: Optional[str]
    notes: list[str]

    @classmethod
    def from_domain(cls, request: ContributionRequest) -> "RequestOut":
        return cls(
            request_id=request.request_id,
            patch_id=request.patch_id,
            requested_by=request.requested_by,
            tier=request.tier.value,
            ecosystem=request.ecosystem,
            justification=request.justification,
            created_at=store.format_ts(request.created_at),
            state=request.state.value,
            rejection_reason=request.rejection_reason.value if request.rejection_reason else None,
            notes=list(request.notes),
        )


class QuestionOut(BaseModel):
    id: str
    text: str
    guidance: str


class ConfigOut(BaseModel):
    default_scale: str
    scale_levels: dict[str, list[RawAnswerIn]]
    quadrant_threshold: float
    boundary_width: float
    objective_bands: list[float]
    objective_order: list[str]
    secondary_epsilon: float
    batteries: dict[str, list[QuestionOut]]


class ImportOut(BaseModel):
    repository: str
    imported: int
