"""Portfolio-level reports: quadrant share breakdowns and contribution
compliance follow-up."""

from __future__ import annotations

from dataclasses import dataclass
from datetime import datetime, timedelta, timezone
from fractions import Fraction
from typing import Iterable, Mapping, Optional

from captool.engine import ContributionPolicy, Quadrant, StrategyDecision
from captool.registry import ContributionState, Registry, StrategySummary

QUADRANT_ORDER: tuple[Quadrant, ...] = (
    Quadrant.STANDARD,
    Quadrant.PRODUCTS_BOTTLENECK,
    Quadrant.PLATFORM_LEVERAGE,
    Quadrant.STRATEGIC,
)


@dataclass(frozen=True)
class QuadrantShareReport:
    total: int
    counts: dict[Quadrant, int]
    exact_percentages: dict[Quadrant, Fraction]
    display_percentages: dict[Quadrant, int]


def largest_remainder_percentages(counts: Mapping[Quadrant, int], total: int) -> dict[Quadrant, int]:
    """Whole-percent shares that always sum to exactly 100 when total > 0.

    Each share gets the floor of its exact percentage; the leftover points go
    to the largest fractional remainders (ties broken by quadrant order).
    """
    if total <= 0:
        return {q: 0 for q in QUADRANT_ORDER}
    exact = {q: Fraction(100 * counts.get(q, 0), total) for q in QUADRANT_ORDER}
    floors = {q: int(exact[q]) for q in QUADRANT_ORDER}
    leftover = 100 - sum(floors.values())
    by_remainder = sorted(
        QUADRANT_ORDER,
        key=lambda q: (exact[q] - floors[q], -QUADRANT_ORDER.index(q)),
        reverse=True,
    )
    display = dict(floors)
    for q in by_remainder[:leftover]:
        display[q] += 1
    return display


def quadrant_shares(decisions: Iterable[StrategyDecision]) -> QuadrantShareReport:
    """Count decisions per quadrant; exact fractions retained alongside the
    rounded display percentages."""
    counts = {q: 0 for q in QUADRANT_ORDER}
    total = 0
    for decision in decisions:
        counts[decision.quadrant] += 1
        total += 1
    exact = {
        q: Fraction(100 * counts[q], total) if total else Fraction(0)
        for q in QUADRANT_ORDER
    }
    return QuadrantShareReport(
        total=total,
        counts=counts,
        exact_percentages=exact,
        display_percentages=largest_remainder_percentages(counts, total),
    )


@dataclass(frozen=True)
class ComplianceEntry:
    feature_id: str
    policy: ContributionPolicy
    patches: int
    contributions_merged: int
    compliant: bool


@dataclass(frozen=True)
class ComplianceReport:
    window_days: int
    as_of: datetime
    entries: tuple[ComplianceEntry, ...]


_SUMMARY_TO_POLICY = {
    StrategySummary.CONTRIBUTE: ContributionPolicy.CONTRIBUTE,
    StrategySummary.CONTRIBUTE_ENABLERS_ONLY: ContributionPolicy.CONTRIBUTE_ENABLERS_ONLY,
    StrategySummary.DO_NOT_CONTRIBUTE: ContributionPolicy.DO_NOT_CONTRIBUTE,
}


def policy_for_feature(
    feature_id: str,
    registry: Registry,
    decisions: Mapping[str, StrategyDecision],
) -> Optional[ContributionPolicy]:
    """Effective policy of a feature: its own decision, else the decision of an
    FBAA containing it, else the communicated strategy attribute."""
    if feature_id in decisions:
        return decisions[feature_id].policy
    for fbaa_id in registry.fbaas_containing(feature_id):
        if fbaa_id in decisions:
            return decisions[fbaa_id].policy
    feature = registry.features.get(feature_id)
    if feature is not None and feature.contribution_strategy != StrategySummary.UNDECIDED:
        return _SUMMARY_TO_POLICY[feature.contribution_strategy]
    return None


def compliance(
    registry: Registry,
    decisions: Mapping[str, StrategyDecision],
    window_days: int,
    as_of: Optional[datetime] = None,
) -> ComplianceReport:
    """Per-feature follow-up: did the merged contributions inside the window
    match what the recorded policy demands?

    Only EcosystemMerged counts as given back; a contribution still in review
    is not yet compliant. Features without any known policy are left out.
    """
    as_of = as_of or datetime.now(timezone.utc)
    window_start = as_of - timedelta(days=window_days)

    entries = []
    for feature_id in sorted(registry.features):
        policy = policy_for_feature(feature_id, registry, decisions)
        if policy is None:
            continue
        patch_ids = registry.patches_for_feature(feature_id)
        merged = 0
        for contribution in registry.contributions.values():
            if contribution.patch_id not in patch_ids:
                continue
            if contribution.state != ContributionState.ECOSYSTEM_MERGED:
                continue
            if contribution.created_at is None:
                continue
            if window_start <= contribution.created_at <= as_of:
                merged += 1
        if policy == ContributionPolicy.DO_NOT_CONTRIBUTE:
            compliant = merged == 0
        else:
            compliant = merged >= 1
        entries.append(
            ComplianceEntry(
                feature_id=feature_id,
                policy=policy,
                patches=len(patch_ids),
                contributions_merged=merged,
                compliant=compliant,
            )
        )
    return ComplianceReport(window_days=window_days, as_of=as_of, entries=tuple(entries))
