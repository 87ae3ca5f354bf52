"""Built-in demo portfolios.

``volte_portfolio`` reproduces the canonical worked example end to end
(scoring, classification, traceability); the two case portfolios reproduce
known quadrant-share breakdowns. Tests use these as golden fixtures and
``cap serve`` can load them for demos via ``build_fixture``.
"""

from __future__ import annotations

from datetime import datetime, timezone

from captool.engine import Assessment, DimensionScore, derive_decision
from captool.governance import FrameAgreement
from captool.registry import (
    Commit,
    Contribution,
    ContributionState,
    ContributionTier,
    Fbaa,
    Feature,
    Patch,
    Product,
    Repository,
)
from captool.store import Portfolio

_T0 = datetime(2015, 9, 1, 12, 0, tzinfo=timezone.utc)

VOLTE_SESSION = "volte-workshop"

#: Consensus answers of the worked example: business impact 3,3,3,3,2 and
#: control complexity 3,2,3,3,1, giving means 2.8 and 2.4.
VOLTE_ANSWERS = {
    "bi1": 3, "bi2": 3, "bi3": 3, "bi4": 3, "bi5": 2,
    "cc1": 3, "cc2": 2, "cc3": 3, "cc4": 3, "cc5": 1,
}


def volte_portfolio() -> Portfolio:
    p = Portfolio()
    reg = p.registry
    reg.upsert(Repository.PRODUCTS, Product(
        platform_id="PLAT-LTE", product_name="handset platform 2015", software="Android", status="announced",
    ))
    reg.upsert(Repository.FEATURES, Feature(
        feature_id="F-VOLTE-SIG", platform_id="PLAT-LTE",
        description="IMS signalling for voice over LTE",
        development_state="started", feature_category="new functionality",
    ))
    reg.upsert(Repository.FEATURES, Feature(
        feature_id="F-VOLTE-CODEC", platform_id="PLAT-LTE",
        description="wideband voice codec integration",
        development_state="started", feature_category="new functionality",
    ))
    reg.upsert(Repository.FBAAS, Fbaa(
        fbaa_id="VOLTE", fp_ids=["F-VOLTE-SIG", "F-VOLTE-CODEC"],
        description="voice over LTE support", version=1,
    ))
    reg.upsert(Repository.PATCHES, Patch(
        patch_id="PA-VOLTE-1", fbaa_id="VOLTE", title="IMS stack adaptation",
        category="market critical", assets="operator requirement",
    ))
    reg.upsert(Repository.PATCHES, Patch(
        patch_id="PA-VOLTE-2", fp_id="F-VOLTE-SIG", title="SIP timer fixes",
        category="stability", assets="bug fix",
    ))
    reg.upsert(Repository.CONTRIBUTIONS, Contribution(
        contribution_id="C-VOLTE-1", patch_id="PA-VOLTE-1", title="IMS stack adaptation upstream",
        state=ContributionState.ECOSYSTEM_MERGED, type=ContributionTier.MEDIUM,
        ecosystem="ims-stack", contributors=["dev1"], created_at=_T0,
    ))
    reg.upsert(Repository.COMMITS, Commit(
        commit_id="CM-VOLTE-1", patch_id="PA-VOLTE-1", title="port IMS stack to platform branch",
        fbaa_name="VOLTE",
    ))
    reg.upsert(Repository.COMMITS, Commit(
        commit_id="CM-VOLTE-2", patch_id="PA-VOLTE-2", title="harden SIP retransmission timers",
        fbaa_name="VOLTE",
    ))

    p.assessments[("VOLTE", VOLTE_SESSION)] = Assessment(
        artifact_id="VOLTE",
        session_id=VOLTE_SESSION,
        participant_answers={"p1": dict(VOLTE_ANSWERS)},
        consensus_answers=dict(VOLTE_ANSWERS),
        finalized=True,
        timestamp=_T0,
    )

    p.frame_agreements["FA-CI"] = FrameAgreement(
        agreement_id="FA-CI", ecosystem="jenkins",
        max_tier_auto=ContributionTier.MEDIUM, active=True,
        notes="development and deployment infrastructure",
    )
    return p


#: Quadrant counts (standard, bottleneck, platform/leverage, strategic) that
#: reproduce the two published share breakdowns over 20 artifacts each.
CASE_A_COUNTS = (4, 4, 11, 1)   # -> 20% / 20% / 55% / 5%
CASE_B_COUNTS = (0, 3, 16, 1)   # ->  0% / 15% / 80% / 5%

#: Representative consensus answers per quadrant (Likert 1-4); each pair of
#: lists is (business impact answers, control complexity answers).
_QUADRANT_ANSWERS = {
    "standard": ([1, 2, 1, 2, 1], [2, 1, 2, 1, 1]),      # (1.4, 1.4)
    "bottleneck": ([2, 2, 1, 2, 2], [3, 4, 3, 3, 3]),    # (1.8, 3.2)
    "platform": ([3, 3, 4, 3, 3], [2, 2, 1, 2, 2]),      # (3.2, 1.8)
    "strategic": ([4, 3, 4, 3, 4], [3, 4, 4, 3, 4]),     # (3.6, 3.6)
}


def _answers_for(kind: str) -> dict[str, int]:
    bi, cc = _QUADRANT_ANSWERS[kind]
    answers = {f"bi{i + 1}": v for i, v in enumerate(bi)}
    answers.update({f"cc{i + 1}": v for i, v in enumerate(cc)})
    return answers


def case_portfolio(counts: tuple[int, int, int, int], prefix: str, session_id: str) -> Portfolio:
    """Portfolio with one finalized assessment and decision per artifact,
    spread over the quadrants according to ``counts``."""
    p = Portfolio()
    kinds = ["standard"] * counts[0] + ["bottleneck"] * counts[1] \
        + ["platform"] * counts[2] + ["strategic"] * counts[3]
    for index, kind in enumerate(kinds, start=1):
        artifact_id = f"{prefix}-{index:02d}"
        answers = _answers_for(kind)
        p.assessments[(artifact_id, session_id)] = Assessment(
            artifact_id=artifact_id,
            session_id=session_id,
            participant_answers={"p1": dict(answers)},
            consensus_answers=dict(answers),
            finalized=True,
            timestamp=_T0,
        )
        bi_answers, cc_answers = _QUADRANT_ANSWERS[kind]
        scores = DimensionScore(
            business_impact=sum(bi_answers) / 5,
            control_complexity=sum(cc_answers) / 5,
        )
        p.decisions[artifact_id] = derive_decision(artifact_id, scores, decided_at=_T0)
    return p


def case_a_portfolio() -> Portfolio:
    return case_portfolio(CASE_A_COUNTS, "A", "case-a")


def case_b_portfolio() -> Portfolio:
    return case_portfolio(CASE_B_COUNTS, "B", "case-b")


FIXTURES = {
    "volte": volte_portfolio,
    "case-a": case_a_portfolio,
    "case-b": case_b_portfolio,
}


def build_fixture(name: str) -> Portfolio:
    try:
        return FIXTURES[name]()
    except KeyError:
        raise ValueError(f"unknown fixture {name!r} (choose from: {', '.join(sorted(FIXTURES))})")
