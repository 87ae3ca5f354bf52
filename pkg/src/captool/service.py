"""Portfolio service: the single mutation path shared by the HTTP API and the
CLI.

Holds one portfolio plus the live scoring sessions. Sessions themselves are
ephemeral (their version counters exist for optimistic concurrency); the
assessments they produce are part of the portfolio and persist.
"""

from __future__ import annotations

import threading
import uuid
from dataclasses import dataclass, field
from datetime import datetime, timezone
from pathlib import Path
from typing import Any, Mapping, Optional

from captool import engine, governance, reporting, store
from captool.engine import (
    AnswerScale,
    Assessment,
    DimensionScore,
    StrategyDecision,
)
from captool.errors import (
    DuplicateSession,
    IncompleteParticipantAnswers,
    StaleVersion,
    UnknownArtifact,
    UnknownRequest,
    UnknownSession,
)
from captool.governance import (
    ContributionRequest,
    RejectionReason,
    RequestEvent,
    RequestState,
)
from captool.registry import ContributionTier, Repository, StrategySummary
from captool.store import Portfolio


@dataclass
class SessionMeta:
    session_id: str
    version: int = 0
    created_at: datetime = field(default_factory=lambda: datetime.now(timezone.utc))
    artifacts: list[str] = field(default_factory=list)


@dataclass(frozen=True)
class ClassificationPreview:
    """What the engine says about a score pair; never persisted."""

    artifact_id: Optional[str]
    source: str  # consensus | provisional | what_if
    scores: DimensionScore
    quadrant: engine.Quadrant
    boundary_flags: tuple[engine.BoundaryFlag, ...]
    primary_objective: engine.ContributionObjective
    secondary_objective: Optional[engine.ContributionObjective]
    policy: engine.ContributionPolicy
    venue: engine.Venue
    objective_blend: float


@dataclass(frozen=True)
class ArtifactView:
    artifact_id: str
    status: str  # unscored | provisional | finalized
    scale: AnswerScale
    participants: tuple[str, ...]
    distributions: dict[str, dict[str, int]]
    provisional_scores: Optional[DimensionScore]
    consensus_scores: Optional[DimensionScore]
    classification: Optional[ClassificationPreview]


@dataclass(frozen=True)
class SessionView:
    session_id: str
    version: int
    artifacts: tuple[ArtifactView, ...]


class PortfolioService:
    """All reads and writes against one portfolio, optionally autosaved."""

    def __init__(
        self,
        portfolio: Portfolio | None = None,
        path: str | Path | None = None,
        autosave: bool = False,
    ):
        self.portfolio = portfolio if portfolio is not None else Portfolio()
        self.path = Path(path) if path else None
        self.autosave = autosave
        # HTTP handlers may run on several threads; every mutation holds this.
        self._write_lock = threading.RLock()
        self.sessions: dict[str, SessionMeta] = {}
        for artifact_id, session_id in sorted(self.portfolio.assessments):
            meta = self.sessions.setdefault(session_id, SessionMeta(session_id=session_id))
            if artifact_id not in meta.artifacts:
                meta.artifacts.append(artifact_id)

    # -- persistence ---------------------------------------------------------

    def save(self, path: str | Path | None = None) -> None:
        target = Path(path) if path else self.path
        if target is None:
            raise ValueError("no portfolio path bound")
        with self._write_lock:
            store.save(self.portfolio, target)

    def _autosave(self) -> None:
        if self.autosave and self.path is not None:
            store.save(self.portfolio, self.path)

    def import_csv(self, repo: Repository, path: str | Path) -> int:
        with self._write_lock:
            count = store.import_csv(self.portfolio.registry, repo, path)
            self._autosave()
            return count

    # -- sessions --------------------------------------------------------------

    def create_session(self, session_id: str | None = None, artifacts: list[str] | None = None) -> SessionMeta:
        with self._write_lock:
            sid = session_id or uuid.uuid4().hex[:12]
            if sid in self.sessions:
                raise DuplicateSession(f"session {sid!r} already exists")
            meta = SessionMeta(session_id=sid, artifacts=list(artifacts or []))
            self.sessions[sid] = meta
            return meta

    def ensure_session(self, session_id: str) -> SessionMeta:
        if session_id not in self.sessions:
            return self.create_session(session_id)
        return self.sessions[session_id]

    def _session(self, session_id: str) -> SessionMeta:
        meta = self.sessions.get(session_id)
        if meta is None:
            raise UnknownSession(f"no session {session_id!r}")
        return meta

    @staticmethod
    def _check_version(meta: SessionMeta, version: Optional[int]) -> None:
        if version is not None and version != meta.version:
            raise StaleVersion(expected=meta.version, got=version)

    def _assessment(self, session_id: str, artifact_id: str, create: bool = False,
                    scale: AnswerScale | None = None) -> Assessment:
        key = (artifact_id, session_id)
        assessment = self.portfolio.assessments.get(key)
        if assessment is None:
            if not create:
                raise UnknownArtifact(f"artifact {artifact_id!r} has no assessment in session {session_id!r}")
            assessment = Assessment(
                artifact_id=artifact_id,
                session_id=session_id,
                scale=scale or self.portfolio.config.default_scale,
            )
            self.portfolio.assessments[key] = assessment
            meta = self.sessions[session_id]
            if artifact_id not in meta.artifacts:
                meta.artifacts.append(artifact_id)
        return assessment

    def record_scores(
        self,
        session_id: str,
        artifact_id: str,
        participant_id: str,
        answers: Mapping[str, Any],
        version: Optional[int] = None,
        scale: AnswerScale | None = None,
    ) -> ArtifactView:
        """Store one participant's raw answers (merged over earlier ones)."""
        with self._write_lock:
            meta = self._session(session_id)
            self._check_version(meta, version)
            assessment = self._assessment(session_id, artifact_id, create=True, scale=scale)
            normalized = engine.validate_answers(answers, assessment.scale, self.portfolio.config)
            assessment.participant_answers.setdefault(participant_id, {}).update(normalized)
            assessment.timestamp = datetime.now(timezone.utc)
            meta.version += 1
            self._autosave()
            return self.artifact_view(session_id, artifact_id)

    def set_consensus(
        self,
        session_id: str,
        artifact_id: str,
        answers: Mapping[str, Any],
        version: Optional[int] = None,
    ) -> ArtifactView:
        """Record jointly agreed answers; full coverage finalizes the assessment."""
        with self._write_lock:
            meta = self._session(session_id)
            self._check_version(meta, version)
            assessment = self._assessment(session_id, artifact_id, create=True)
            normalized = engine.validate_answers(answers, assessment.scale, self.portfolio.config)
            assessment.consensus_answers.update(normalized)
            assessment.finalized = engine.consensus_complete(assessment, self.portfolio.config)
            assessment.timestamp = datetime.now(timezone.utc)
            meta.version += 1
            self._autosave()
            return self.artifact_view(session_id, artifact_id)

    # -- views -------------------------------------------------------------------

    def _preview(self, scores: DimensionScore, source: str, artifact_id: str | None) -> ClassificationPreview:
        config = self.portfolio.config
        quadrant, flags = engine.classify(scores, config)
        primary, secondary = engine.assign_objectives(scores, config)
        policy, venue = engine.STRATEGY_TABLE[quadrant]
        return ClassificationPreview(
            artifact_id=artifact_id,
            source=source,
            scores=scores,
            quadrant=quadrant,
            boundary_flags=tuple(sorted(flags, key=lambda f: f.value)),
            primary_objective=primary,
            secondary_objective=secondary,
            policy=policy,
            venue=venue,
            objective_blend=engine.objective_blend(scores),
        )

    def what_if(self, business_impact: float, control_complexity: float,
                artifact_id: str | None = None) -> ClassificationPreview:
        """Stateless preview for arbitrary coordinates; bypasses stored answers."""
        scores = DimensionScore(business_impact=business_impact, control_complexity=control_complexity)
        return self._preview(scores, "what_if", artifact_id)

    def _stored_classification(self, assessment: Assessment) -> Optional[ClassificationPreview]:
        config = self.portfolio.config
        if engine.consensus_complete(assessment, config):
            scores = engine.consensus_scores(assessment, config)
            return self._preview(scores, "consensus", assessment.artifact_id)
        try:
            scores, _ = engine.provisional_aggregate(assessment, config)
        except IncompleteParticipantAnswers:
            return None
        return self._preview(scores, "provisional", assessment.artifact_id)

    def classification(self, session_id: str, artifact_id: str) -> ClassificationPreview:
        """Classification of the stored answers (consensus preferred)."""
        self._session(session_id)
        assessment = self._assessment(session_id, artifact_id)
        preview = self._stored_classification(assessment)
        if preview is None:
            missing = sorted(
                set(self.portfolio.config.all_question_ids()) - engine.answered_questions(assessment)
            )
            raise IncompleteParticipantAnswers(missing)
        return preview

    def classify_artifact(self, artifact_id: str, session_id: str | None = None) -> ClassificationPreview:
        """CLI entry: classify using the given session or the artifact's most
        recent assessment."""
        if session_id is not None:
            return self.classification(session_id, artifact_id)
        candidates = [a for (aid, _), a in self.portfolio.assessments.items() if aid == artifact_id]
        if not candidates:
            raise UnknownArtifact(f"no assessment recorded for artifact {artifact_id!r}")
        latest = max(candidates, key=lambda a: (a.timestamp, a.session_id))
        return self.classification(latest.session_id, artifact_id)

    def artifact_view(self, session_id: str, artifact_id: str) -> ArtifactView:
        config = self.portfolio.config
        assessment = self.portfolio.assessments.get((artifact_id, session_id))
        if assessment is None:
            return ArtifactView(
                artifact_id=artifact_id,
                status="unscored",
                scale=config.default_scale,
                participants=(),
                distributions={qid: {} for qid in config.all_question_ids()},
                provisional_scores=None,
                consensus_scores=None,
                classification=None,
            )
        provisional = None
        try:
            provisional, _ = engine.provisional_aggregate(assessment, config)
        except IncompleteParticipantAnswers:
            pass
        consensus = None
        if engine.consensus_complete(assessment, config):
            consensus = engine.consensus_scores(assessment, config)
        if assessment.finalized:
            status = "finalized"
        elif assessment.participant_answers or assessment.consensus_answers:
            status = "provisional"
        else:
            status = "unscored"
        return ArtifactView(
            artifact_id=artifact_id,
            status=status,
            scale=assessment.scale,
            participants=tuple(sorted(assessment.participant_answers)),
            distributions=engine.answer_distributions(assessment, config),
            provisional_scores=provisional,
            consensus_scores=consensus,
            classification=self._stored_classification(assessment),
        )

    def session_view(self, session_id: str) -> SessionView:
        meta = self._session(session_id)
        return SessionView(
            session_id=session_id,
            version=meta.version,
            artifacts=tuple(self.artifact_view(session_id, aid) for aid in meta.artifacts),
        )

    # -- decisions -------------------------------------------------------------

    def finalize_decision(
        self,
        artifact_id: str,
        session_id: str,
        rationale: str = "",
        decided_at: Optional[datetime] = None,
    ) -> StrategyDecision:
        """Derive and record the strategy decision from a finalized assessment,
        then communicate it to the feature repository."""
        with self._write_lock:
            self._session(session_id)
            assessment = self._assessment(session_id, artifact_id)
            decision = engine.decision_from_assessment(
                assessment, self.portfolio.config, rationale=rationale, decided_at=decided_at
            )
            self.portfolio.decisions[artifact_id] = decision
            self._communicate_decision(decision)
            self._autosave()
            return decision

    def _communicate_decision(self, decision: StrategyDecision) -> None:
        registry = self.portfolio.registry
        summary = StrategySummary(decision.policy.value)
        targets = []
        if decision.artifact_id in registry.features:
            targets.append(decision.artifact_id)
        fbaa = registry.fbaas.get(decision.artifact_id)
        if fbaa is not None:
            targets.extend(fid for fid in fbaa.fp_ids if fid in registry.features)
        for feature_id in targets:
            feature = registry.features[feature_id]
            feature.contribution_strategy = summary
            feature.decision_ref = decision.artifact_id
            registry.version += 1

    def reclassify_preview(self, artifact_id: str, scores: DimensionScore) -> governance.DecisionDiff:
        return governance.reclassify_check(
            artifact_id, scores, self.portfolio.decisions, self.portfolio.config
        )

    # -- reports and traces ------------------------------------------------------

    def quadrant_report(self) -> reporting.QuadrantShareReport:
        return reporting.quadrant_shares(self.portfolio.decisions.values())

    def compliance_report(self, window_days: int, as_of: Optional[datetime] = None) -> reporting.ComplianceReport:
        return reporting.compliance(
            self.portfolio.registry, self.portfolio.decisions, window_days, as_of
        )

    def trace_contribution(self, contribution_id: str):
        return self.portfolio.registry.trace_contribution(contribution_id)

    def trace_feature(self, feature_id: str):
        return self.portfolio.registry.reverse_trace(feature_id)

    # -- governance ---------------------------------------------------------------

    def submit_request(
        self,
        patch_id: str,
        requested_by: str,
        tier: ContributionTier,
        ecosystem: str,
        justification: str = "",
        request_id: str | None = None,
    ) -> ContributionRequest:
        with self._write_lock:
            request = ContributionRequest(
                request_id=request_id or f"R-{uuid.uuid4().hex[:10]}",
                patch_id=patch_id,
                requested_by=requested_by,
                tier=tier,
                ecosystem=ecosystem,
                justification=justification,
            )
            governance.submit_request(
                request, self.portfolio.frame_agreements, self.portfolio.registry
            )
            self.portfolio.requests[request.request_id] = request
            self._autosave()
            return request

    def advance_request(
        self,
        request_id: str,
        event: RequestEvent,
        reason: Optional[RejectionReason] = None,
        now: Optional[datetime] = None,
    ) -> ContributionRequest:
        with self._write_lock:
            request = self.portfolio.requests.get(request_id)
            if request is None:
                raise UnknownRequest(f"no contribution request {request_id!r}")
            governance.advance_request(
                request, event, reason=reason, registry=self.portfolio.registry, now=now
            )
            self._autosave()
            return request
