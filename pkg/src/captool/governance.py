"""Reactive approach: contribution requests, tier routing, frame agreements,
the board lifecycle state machine, and reclassification diffs."""

from __future__ import annotations

from dataclasses import dataclass, field
from datetime import datetime, timezone
from enum import Enum
from typing import Mapping, Optional

from captool.engine import (
    DimensionScore,
    EngineConfig,
    DEFAULT_CONFIG,
    StrategyDecision,
    derive_decision,
)
from captool.errors import IllegalTransition, NoPriorDecision, UnknownPatch
from captool.registry import (
    Contribution,
    ContributionState,
    ContributionTier,
    Registry,
    Repository,
    tier_at_most,
)


class RequestState(str, Enum):
    DRAFT = "Draft"
    SUBMITTED = "Submitted"            # trivial request awaiting the business manager
    MANAGER_APPROVED = "ManagerApproved"
    AUTO_APPROVED = "AutoApproved"     # covered by an active frame agreement
    BOARD_REVIEW = "BoardReview"
    BOARD_APPROVED = "BoardApproved"
    REJECTED = "Rejected"
    CONTRIBUTED = "Contributed"
    ECOSYSTEM_REVIEW = "EcosystemReview"
    ECOSYSTEM_MERGED = "EcosystemMerged"
    ALREADY_FIXED = "AlreadyFixed"
    ECOSYSTEM_REJECTED = "EcosystemRejected"


class RejectionReason(str, Enum):
    CEO_REJECTED = "CeoRejected"
    LEGAL_REJECT = "LegalReject"
    OTHER = "Other"


class RequestEvent(str, Enum):
    MANAGER_APPROVE = "ManagerApprove"
    BOARD_APPROVE = "BoardApprove"
    BOARD_REJECT = "BoardReject"
    MARK_CONTRIBUTED = "MarkContributed"
    ECOSYSTEM_ACCEPT = "EcosystemAccept"
    ECOSYSTEM_ALREADY_FIXED = "EcosystemAlreadyFixed"
    ECOSYSTEM_REJECT = "EcosystemReject"


#: The full edge set. Anything not listed is an IllegalTransition.
TRANSITIONS: dict[tuple[RequestState, RequestEvent], RequestState] = {
    (RequestState.SUBMITTED, RequestEvent.MANAGER_APPROVE): RequestState.MANAGER_APPROVED,
    (RequestState.BOARD_REVIEW, RequestEvent.BOARD_APPROVE): RequestState.BOARD_APPROVED,
    (RequestState.BOARD_REVIEW, RequestEvent.BOARD_REJECT): RequestState.REJECTED,
    (RequestState.MANAGER_APPROVED, RequestEvent.MARK_CONTRIBUTED): RequestState.CONTRIBUTED,
    (RequestState.AUTO_APPROVED, RequestEvent.MARK_CONTRIBUTED): RequestState.CONTRIBUTED,
    (RequestState.BOARD_APPROVED, RequestEvent.MARK_CONTRIBUTED): RequestState.CONTRIBUTED,
    (RequestState.ECOSYSTEM_REVIEW, RequestEvent.ECOSYSTEM_ACCEPT): RequestState.ECOSYSTEM_MERGED,
    (RequestState.ECOSYSTEM_REVIEW, RequestEvent.ECOSYSTEM_ALREADY_FIXED): RequestState.ALREADY_FIXED,
    (RequestState.ECOSYSTEM_REVIEW, RequestEvent.ECOSYSTEM_REJECT): RequestState.ECOSYSTEM_REJECTED,
}

#: States the machine passes through without an external event.
AUTO_ADVANCE: dict[RequestState, RequestState] = {
    RequestState.CONTRIBUTED: RequestState.ECOSYSTEM_REVIEW,
}

APPROVAL_STATES = frozenset(
    {RequestState.MANAGER_APPROVED, RequestState.AUTO_APPROVED, RequestState.BOARD_APPROVED}
)

TERMINAL_STATES = frozenset(
    {
        RequestState.REJECTED,
        RequestState.ECOSYSTEM_MERGED,
        RequestState.ALREADY_FIXED,
        RequestState.ECOSYSTEM_REJECTED,
    }
)


@dataclass
class FrameAgreement:
    """Standing permission for sub-major contributions to one ecosystem."""

    agreement_id: str
    ecosystem: str
    max_tier_auto: ContributionTier = ContributionTier.TRIVIAL
    active: bool = True
    notes: str = ""

    def __post_init__(self):
        if self.max_tier_auto == ContributionTier.MAJOR:
            raise ValueError("a frame agreement can never auto-approve Major contributions")

    def covers(self, ecosystem: str, tier: ContributionTier) -> bool:
        return (
            self.active
            and self.ecosystem.lower() == ecosystem.lower()
            and tier_at_most(tier, self.max_tier_auto)
        )


@dataclass
class ContributionRequest:
    request_id: str
    patch_id: str
    requested_by: str
    tier: ContributionTier
    ecosystem: str
    justification: str = ""
    created_at: datetime = field(default_factory=lambda: datetime.now(timezone.utc))
    state: RequestState = RequestState.DRAFT
    rejection_reason: Optional[RejectionReason] = None
    notes: list[str] = field(default_factory=list)


def submit_request(
    request: ContributionRequest,
    agreements: Mapping[str, FrameAgreement] | None = None,
    registry: Registry | None = None,
) -> RequestState:
    """Route a draft request: frame agreement -> AutoApproved, trivial ->
    manager approval, everything else -> the governance board."""
    if request.state != RequestState.DRAFT:
        raise IllegalTransition(request.state.value, "Submit")
    if registry is not None and request.patch_id not in registry.patches:
        raise UnknownPatch(f"request {request.request_id!r} references unknown patch {request.patch_id!r}")

    agreements = agreements or {}
    covered = False
    for agreement in sorted(agreements.values(), key=lambda a: a.agreement_id):
        if agreement.covers(request.ecosystem, request.tier):
            covered = True
            break
        if (
            not agreement.active
            and agreement.ecosystem.lower() == request.ecosystem.lower()
            and tier_at_most(request.tier, agreement.max_tier_auto)
        ):
            # Informational only; an expired agreement never short-circuits.
            request.notes.append(f"inactive frame agreement {agreement.agreement_id} ignored")

    if covered:
        request.state = RequestState.AUTO_APPROVED
    elif request.tier == ContributionTier.TRIVIAL:
        request.state = RequestState.SUBMITTED
    else:
        request.state = RequestState.BOARD_REVIEW
    return request.state


#: Post-Contributed request states mirrored onto the registry record.
_MIRROR_STATES = {
    RequestState.CONTRIBUTED: ContributionState.CONTRIBUTED,
    RequestState.ECOSYSTEM_REVIEW: ContributionState.ECOSYSTEM_REVIEW,
    RequestState.ECOSYSTEM_MERGED: ContributionState.ECOSYSTEM_MERGED,
    RequestState.ALREADY_FIXED: ContributionState.ALREADY_FIXED,
    RequestState.ECOSYSTEM_REJECTED: ContributionState.ECOSYSTEM_REJECTED,
}


def contribution_id_for(request: ContributionRequest) -> str:
    return request.request_id


def advance_request(
    request: ContributionRequest,
    event: RequestEvent,
    reason: Optional[RejectionReason] = None,
    registry: Registry | None = None,
    now: Optional[datetime] = None,
) -> RequestState:
    """Apply one lifecycle event; auto-advances through Contributed into
    EcosystemReview and keeps the registry's contribution record in sync."""
    key = (request.state, event)
    if key not in TRANSITIONS:
        raise IllegalTransition(request.state.value, event.value)

    request.state = TRANSITIONS[key]
    if request.state == RequestState.REJECTED:
        request.rejection_reason = reason or RejectionReason.OTHER

    reached_contributed = request.state == RequestState.CONTRIBUTED
    while request.state in AUTO_ADVANCE:
        request.state = AUTO_ADVANCE[request.state]

    if registry is not None:
        if reached_contributed:
            registry.upsert(
                Repository.CONTRIBUTIONS,
                Contribution(
                    contribution_id=contribution_id_for(request),
                    patch_id=request.patch_id,
                    title=request.justification or request.request_id,
                    state=_MIRROR_STATES[request.state],
                    type=request.tier,
                    ecosystem=request.ecosystem,
                    contributors=[request.requested_by],
                    created_at=now or datetime.now(timezone.utc),
                ),
            )
        elif request.state in _MIRROR_STATES:
            record = registry.contributions.get(contribution_id_for(request))
            if record is not None:
                record.state = _MIRROR_STATES[request.state]
                registry.version += 1
    return request.state


@dataclass(frozen=True)
class DecisionDiff:
    """Old vs new strategy decision for a re-assessed artifact."""

    artifact_id: str
    old: StrategyDecision
    new: StrategyDecision
    changed: tuple[str, ...]
    board_attention: bool

    @property
    def empty(self) -> bool:
        return not self.changed


_DIFF_FIELDS = ("quadrant", "primary_objective", "secondary_objective", "policy", "venue")


def reclassify_check(
    artifact_id: str,
    new_scores: DimensionScore,
    prior_decisions: Mapping[str, StrategyDecision],
    config: EngineConfig = DEFAULT_CONFIG,
) -> DecisionDiff:
    """Re-run the engine on fresh scores and diff against the recorded decision.

    A policy change is flagged for board attention since it alters what the
    development organization is allowed to push out.
    """
    old = prior_decisions.get(artifact_id)
    if old is None:
        raise NoPriorDecision(f"no recorded decision for artifact {artifact_id!r}")
    new = derive_decision(artifact_id, new_scores, config, rationale=old.rationale)
    changed = tuple(
        name for name in _DIFF_FIELDS if getattr(old, name) != getattr(new, name)
    )
    return DecisionDiff(
        artifact_id=artifact_id,
        old=old,
        new=new,
        changed=changed,
        board_attention="policy" in changed,
    )
