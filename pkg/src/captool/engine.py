"""Scoring engine: answer scales, question batteries, quadrant classification
and contribution-objective assignment.

All operations here are pure functions over immutable values; nothing in this
module performs I/O. Threshold and band geometry come from :class:`EngineConfig`
so deployments can tune them without touching code.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from datetime import datetime, timezone
from enum import Enum
from typing import Any, Mapping, Optional, Sequence

from captool.errors import (
    AssessmentNotFinalized,
    EmptyAnswerSet,
    IncompleteParticipantAnswers,
    InvalidAnswerForScale,
    OutOfRangeScore,
    UnknownQuestion,
)

SCORE_MIN = 1.0
SCORE_MAX = 4.0

#: Raw answers as they arrive from clients: Likert and signed scales use ints,
#: the three-level scale uses its level names.
RawAnswer = Any


class Dimension(str, Enum):
    BUSINESS_IMPACT = "BusinessImpact"
    CONTROL_COMPLEXITY = "ControlComplexity"


class AnswerScale(str, Enum):
    LIKERT4 = "Likert4"
    HIGH_MEDIUM_LOW3 = "HighMediumLow3"
    SIGNED3 = "Signed3"


# Canonical mapping per scale: raw level -> score in [1.0, 4.0], strictly
# increasing within each scale.
_SCALE_LEVELS: dict[AnswerScale, list[tuple[RawAnswer, float]]] = {
    AnswerScale.LIKERT4: [(1, 1.0), (2, 2.0), (3, 3.0), (4, 4.0)],
    AnswerScale.HIGH_MEDIUM_LOW3: [("Low", 1.0), ("Medium", 2.5), ("High", 4.0)],
    AnswerScale.SIGNED3: [(-1, 1.0), (0, 2.5), (1, 4.0)],
}


class Quadrant(str, Enum):
    STRATEGIC = "Strategic"
    PLATFORM_LEVERAGE = "PlatformLeverage"
    PRODUCTS_BOTTLENECK = "ProductsBottleneck"
    STANDARD = "Standard"


class BoundaryFlag(str, Enum):
    NEAR_VERTICAL_BOUNDARY = "NearVerticalBoundary"
    NEAR_HORIZONTAL_BOUNDARY = "NearHorizontalBoundary"


class ContributionObjective(str, Enum):
    COST_FOCUS = "CostFocus"
    TIME_TO_MARKET = "TimeToMarket"
    CONTROL_FOCUS = "ControlFocus"
    STRATEGIC_ALLIANCES = "StrategicAlliances"


#: Objective bands ordered from the low-score corner to the high-score corner.
OBJECTIVE_ORDER: tuple[ContributionObjective, ...] = (
    ContributionObjective.COST_FOCUS,
    ContributionObjective.TIME_TO_MARKET,
    ContributionObjective.CONTROL_FOCUS,
    ContributionObjective.STRATEGIC_ALLIANCES,
)


class Venue(str, Enum):
    EXISTING_ECOSYSTEM = "ExistingEcosystem"
    NEW_FIRM_ORCHESTRATED_ECOSYSTEM = "NewFirmOrchestratedEcosystem"
    LIMITED_CONSORTIUM = "LimitedConsortium"
    NO_CONTRIBUTION = "NoContribution"


class ContributionPolicy(str, Enum):
    CONTRIBUTE = "Contribute"
    CONTRIBUTE_ENABLERS_ONLY = "ContributeEnablersOnly"
    DO_NOT_CONTRIBUTE = "DoNotContribute"


#: Per-quadrant default policy and venue. Strategic artifacts stay on the
#: existing ecosystem; escalating to a firm-orchestrated ecosystem when the
#: needed influence is unattainable is a judgement call recorded in the
#: decision rationale, not a computed output.
STRATEGY_TABLE: dict[Quadrant, tuple[ContributionPolicy, Venue]] = {
    Quadrant.STRATEGIC: (ContributionPolicy.CONTRIBUTE_ENABLERS_ONLY, Venue.EXISTING_ECOSYSTEM),
    Quadrant.PLATFORM_LEVERAGE: (ContributionPolicy.CONTRIBUTE, Venue.EXISTING_ECOSYSTEM),
    Quadrant.PRODUCTS_BOTTLENECK: (ContributionPolicy.CONTRIBUTE, Venue.LIMITED_CONSORTIUM),
    Quadrant.STANDARD: (ContributionPolicy.CONTRIBUTE, Venue.EXISTING_ECOSYSTEM),
}


@dataclass(frozen=True)
class Question:
    id: str
    text: str
    guidance: str = ""


@dataclass(frozen=True)
class QuestionBattery:
    dimension: Dimension
    questions: tuple[Question, ...]

    def __post_init__(self):
        if not self.questions:
            raise ValueError("a question battery needs at least one question")
        ids = [q.id for q in self.questions]
        if len(set(ids)) != len(ids):
            raise ValueError(f"duplicate question ids in battery: {ids}")

    @property
    def question_ids(self) -> tuple[str, ...]:
        return tuple(q.id for q in self.questions)


DEFAULT_BUSINESS_IMPACT_BATTERY = QuestionBattery(
    dimension=Dimension.BUSINESS_IMPACT,
    questions=(
        Question("bi1", "How does it impact on the firm's profit and revenue?",
                 "1 = negligible effect, 4 = directly drives revenue."),
        Question("bi2", "How does it impact on the customer and end user value?",
                 "Consider perceived value even when users cannot name the technology."),
        Question("bi3", "How does it impact on the product differentiation?",
                 "Does shipping it set the product apart from competitors?"),
        Question("bi4", "How does it impact on the access to leading technology/trends?",
                 "1 = legacy, 4 = gateway to a leading trend."),
        Question("bi5", "How does it impact if there are difficulties or shortages?",
                 "How bad is it for the business if delivery slips or fails?"),
    ),
)

DEFAULT_CONTROL_COMPLEXITY_BATTERY = QuestionBattery(
    dimension=Dimension.CONTROL_COMPLEXITY,
    questions=(
        Question("cc1", "Do we have knowledge and capacity to absorb the technology?",
                 "1 = fully absorbed in-house, 4 = far beyond current capacity."),
        Question("cc2", "Are there technology availability barriers and IPR constraints?",
                 "Patents, licensing terms, export restrictions."),
        Question("cc3", "What is the level of innovativeness and novelty?"),
        Question("cc4", "Is there a lack of alternatives?",
                 "4 = no practical substitute exists."),
        Question("cc5", "Are there limitations or constraints by the firm?",
                 "Internal mandates requiring control over the artifact."),
    ),
)


@dataclass(frozen=True)
class EngineConfig:
    """Batteries plus every tunable threshold of the classification geometry."""

    business_impact_battery: QuestionBattery = DEFAULT_BUSINESS_IMPACT_BATTERY
    control_complexity_battery: QuestionBattery = DEFAULT_CONTROL_COMPLEXITY_BATTERY
    default_scale: AnswerScale = AnswerScale.LIKERT4
    # Midpoint of the 1-4 score range; a value on the threshold counts as High.
    quadrant_threshold: float = 2.5
    # An axis value within this distance of the threshold gets a boundary flag.
    boundary_width: float = 0.3
    # Iso-sum diagonal bands on the normalized blend m, low corner to high corner.
    objective_bands: tuple[float, float, float] = (0.35, 0.65, 0.85)
    # A blend within this distance of a band edge also reports the adjacent band.
    secondary_epsilon: float = 0.05

    def battery_for(self, dimension: Dimension) -> QuestionBattery:
        if dimension is Dimension.BUSINESS_IMPACT:
            return self.business_impact_battery
        return self.control_complexity_battery

    @property
    def batteries(self) -> tuple[QuestionBattery, QuestionBattery]:
        return (self.business_impact_battery, self.control_complexity_battery)

    def all_question_ids(self) -> tuple[str, ...]:
        return self.business_impact_battery.question_ids + self.control_complexity_battery.question_ids


DEFAULT_CONFIG = EngineConfig()


@dataclass(frozen=True)
class DimensionScore:
    business_impact: float
    control_complexity: float

    def __post_init__(self):
        for value in (self.business_impact, self.control_complexity):
            if not (SCORE_MIN <= value <= SCORE_MAX):
                raise OutOfRangeScore(value)


@dataclass
class Assessment:
    """One scoring session over one artifact.

    ``participant_answers`` holds each participant's independent raw answers;
    ``consensus_answers`` holds the jointly agreed raw answers. The assessment
    is finalized once consensus covers every question of both batteries.
    """

    artifact_id: str
    session_id: str
    scale: AnswerScale = AnswerScale.LIKERT4
    participant_answers: dict[str, dict[str, RawAnswer]] = field(default_factory=dict)
    consensus_answers: dict[str, RawAnswer] = field(default_factory=dict)
    finalized: bool = False
    timestamp: datetime = field(default_factory=lambda: datetime.now(timezone.utc))


@dataclass(frozen=True)
class StrategyDecision:
    artifact_id: str
    scores: DimensionScore
    quadrant: Quadrant
    boundary_flags: tuple[BoundaryFlag, ...]
    primary_objective: ContributionObjective
    secondary_objective: Optional[ContributionObjective]
    policy: ContributionPolicy
    venue: Venue
    rationale: str = ""
    decided_at: datetime = field(default_factory=lambda: datetime.now(timezone.utc))


# -- scales ------------------------------------------------------------------

def normalize_raw(raw: RawAnswer, scale: AnswerScale) -> RawAnswer:
    """Return the stored form of a raw answer, or raise InvalidAnswerForScale.

    Accepts the tolerant inputs a CLI or JSON client produces: numeric strings
    for the integer scales, any capitalization for the three-level scale.
    """
    levels = _SCALE_LEVELS[scale]
    if scale is AnswerScale.HIGH_MEDIUM_LOW3:
        if isinstance(raw, str):
            for level, _ in levels:
                if raw.strip().lower() == level.lower():
                    return level
    else:
        try:
            value = int(str(raw).strip())
        except (TypeError, ValueError):
            value = None
        if value is not None and isinstance(raw, (int, str)) and not isinstance(raw, bool):
            for level, _ in levels:
                if value == level:
                    return level
    valid = ", ".join(repr(level) for level, _ in levels)
    raise InvalidAnswerForScale(f"{raw!r} is not a valid {scale.value} answer (expected one of: {valid})")


def canonicalize(raw: RawAnswer, scale: AnswerScale) -> float:
    """Map a raw answer onto the canonical [1.0, 4.0] score domain."""
    normalized = normalize_raw(raw, scale)
    for level, score in _SCALE_LEVELS[scale]:
        if level == normalized:
            return score
    raise InvalidAnswerForScale(f"{raw!r} is not a valid {scale.value} answer")  # pragma: no cover


def scale_levels(scale: AnswerScale) -> list[RawAnswer]:
    """Raw levels of a scale, lowest to highest."""
    return [level for level, _ in _SCALE_LEVELS[scale]]


def answer_label(raw: RawAnswer, scale: AnswerScale) -> str:
    """Stable string key for distribution maps."""
    return str(normalize_raw(raw, scale))


# -- aggregation ---------------------------------------------------------------

def aggregate_dimension(answers: Sequence[float]) -> float:
    """Arithmetic mean of canonical scores, kept exact until display time."""
    if not answers:
        raise EmptyAnswerSet("cannot aggregate an empty answer list")
    for value in answers:
        if not (SCORE_MIN <= value <= SCORE_MAX):
            raise OutOfRangeScore(value)
    # Canonical scores are multiples of 0.5, so the float sum is exact and the
    # division is correctly rounded; no decimal tricks needed.
    return sum(answers) / len(answers)


def display_score(value: float) -> str:
    """Render a dimension score the way reports print it (one decimal)."""
    return f"{value:.1f}"


# -- classification ------------------------------------------------------------

def classify(
    scores: DimensionScore, config: EngineConfig = DEFAULT_CONFIG
) -> tuple[Quadrant, frozenset[BoundaryFlag]]:
    """Quadrant plus near-boundary flags for a pair of dimension scores.

    A value on the threshold counts as High. The flags mark scores close
    enough to a quadrant boundary that the placement deserves discussion.
    """
    threshold = config.quadrant_threshold
    bi_high = scores.business_impact >= threshold
    cc_high = scores.control_complexity >= threshold
    if bi_high and cc_high:
        quadrant = Quadrant.STRATEGIC
    elif bi_high:
        quadrant = Quadrant.PLATFORM_LEVERAGE
    elif cc_high:
        quadrant = Quadrant.PRODUCTS_BOTTLENECK
    else:
        quadrant = Quadrant.STANDARD

    flags = set()
    if abs(scores.control_complexity - threshold) <= config.boundary_width:
        flags.add(BoundaryFlag.NEAR_VERTICAL_BOUNDARY)
    if abs(scores.business_impact - threshold) <= config.boundary_width:
        flags.add(BoundaryFlag.NEAR_HORIZONTAL_BOUNDARY)
    return quadrant, frozenset(flags)


def objective_blend(scores: DimensionScore) -> float:
    """Normalized iso-sum coordinate m in [0, 1] used by the objective bands.

    Rounded to nine decimals so decimal-valued scores land exactly on the
    decimal band edges instead of a binary-representation hair away.
    """
    bi_n = (scores.business_impact - SCORE_MIN) / (SCORE_MAX - SCORE_MIN)
    cc_n = (scores.control_complexity - SCORE_MIN) / (SCORE_MAX - SCORE_MIN)
    return round((bi_n + cc_n) / 2.0, 9)


def _band_index(m: float, bands: Sequence[float]) -> int:
    for index, edge in enumerate(bands):
        if m < edge:
            return index
    return len(bands)


def assign_objectives(
    scores: DimensionScore, config: EngineConfig = DEFAULT_CONFIG
) -> tuple[ContributionObjective, Optional[ContributionObjective]]:
    """Primary (and possibly secondary) contribution objective for a score pair.

    Objectives live in diagonal bands across the matrix. When the blend sits
    within ``secondary_epsilon`` of a band edge the neighbouring band's
    objective is reported as secondary, mirroring how real artifacts rarely
    have a single clean driver.
    """
    m = objective_blend(scores)
    bands = config.objective_bands
    index = _band_index(m, bands)
    primary = OBJECTIVE_ORDER[index]

    secondary: Optional[ContributionObjective] = None
    candidates: list[tuple[float, int]] = []
    if index > 0:
        candidates.append((abs(m - bands[index - 1]), index - 1))
    if index < len(bands):
        candidates.append((abs(m - bands[index]), index + 1))
    near = [c for c in candidates if c[0] <= config.secondary_epsilon]
    if near:
        # Nearest edge wins; on an exact tie prefer the lower band.
        near.sort(key=lambda c: (c[0], c[1]))
        secondary = OBJECTIVE_ORDER[near[0][1]]
    return primary, secondary


def derive_decision(
    artifact_id: str,
    scores: DimensionScore,
    config: EngineConfig = DEFAULT_CONFIG,
    rationale: str = "",
    decided_at: Optional[datetime] = None,
) -> StrategyDecision:
    """Deterministic composition of classification, objectives and the strategy table."""
    quadrant, flags = classify(scores, config)
    primary, secondary = assign_objectives(scores, config)
    policy, venue = STRATEGY_TABLE[quadrant]
    return StrategyDecision(
        artifact_id=artifact_id,
        scores=scores,
        quadrant=quadrant,
        boundary_flags=tuple(sorted(flags, key=lambda f: f.value)),
        primary_objective=primary,
        secondary_objective=secondary,
        policy=policy,
        venue=venue,
        rationale=rationale,
        decided_at=decided_at or datetime.now(timezone.utc),
    )


# -- assessments ---------------------------------------------------------------

def validate_answers(
    answers: Mapping[str, RawAnswer], scale: AnswerScale, config: EngineConfig = DEFAULT_CONFIG
) -> dict[str, RawAnswer]:
    """Check question ids and raw values; return answers in stored form."""
    known = set(config.all_question_ids())
    unknown = sorted(set(answers) - known)
    if unknown:
        raise UnknownQuestion("unknown question ids: " + ", ".join(unknown), unknown=unknown)
    return {qid: normalize_raw(raw, scale) for qid, raw in answers.items()}


def consensus_complete(assessment: Assessment, config: EngineConfig = DEFAULT_CONFIG) -> bool:
    return all(qid in assessment.consensus_answers for qid in config.all_question_ids())


def consensus_scores(assessment: Assessment, config: EngineConfig = DEFAULT_CONFIG) -> DimensionScore:
    """Dimension means over the consensus answers; requires full coverage."""
    missing = [qid for qid in config.all_question_ids() if qid not in assessment.consensus_answers]
    if missing:
        raise AssessmentNotFinalized(
            f"consensus for {assessment.artifact_id!r} does not cover: " + ", ".join(missing),
            missing=missing,
        )
    means = []
    for battery in config.batteries:
        canonical = [canonicalize(assessment.consensus_answers[qid], assessment.scale)
                     for qid in battery.question_ids]
        means.append(aggregate_dimension(canonical))
    return DimensionScore(business_impact=means[0], control_complexity=means[1])


def decision_from_assessment(
    assessment: Assessment,
    config: EngineConfig = DEFAULT_CONFIG,
    rationale: str = "",
    decided_at: Optional[datetime] = None,
) -> StrategyDecision:
    """Derive the strategy decision recorded against a finalized assessment."""
    if not assessment.finalized:
        raise AssessmentNotFinalized(
            f"assessment of {assessment.artifact_id!r} in session {assessment.session_id!r} is not finalized"
        )
    scores = consensus_scores(assessment, config)
    return derive_decision(assessment.artifact_id, scores, config, rationale, decided_at)


def answer_distributions(
    assessment: Assessment, config: EngineConfig = DEFAULT_CONFIG
) -> dict[str, dict[str, int]]:
    """Observed counts per raw level per question, levels ordered low to high."""
    distributions: dict[str, dict[str, int]] = {}
    for qid in config.all_question_ids():
        counts: dict[str, int] = {}
        for answers in assessment.participant_answers.values():
            if qid in answers:
                label = answer_label(answers[qid], assessment.scale)
                counts[label] = counts.get(label, 0) + 1
        distributions[qid] = {
            str(level): counts[str(level)]
            for level in scale_levels(assessment.scale)
            if str(level) in counts
        }
    return distributions


def provisional_aggregate(
    assessment: Assessment, config: EngineConfig = DEFAULT_CONFIG
) -> tuple[DimensionScore, dict[str, dict[str, int]]]:
    """Pre-consensus view: per-question means over participants plus the
    per-question answer distribution.

    Never feeds a finalized decision; it exists so a session can see where the
    group currently stands and how spread the opinions are.
    """
    missing = [
        qid for qid in config.all_question_ids()
        if not any(qid in answers for answers in assessment.participant_answers.values())
    ]
    if missing:
        raise IncompleteParticipantAnswers(missing)

    question_means: dict[str, float] = {}
    for battery in config.batteries:
        for qid in battery.question_ids:
            canonical = [
                canonicalize(answers[qid], assessment.scale)
                for answers in assessment.participant_answers.values()
                if qid in answers
            ]
            question_means[qid] = aggregate_dimension(canonical)

    means = []
    for battery in config.batteries:
        means.append(aggregate_dimension([question_means[qid] for qid in battery.question_ids]))
    scores = DimensionScore(business_impact=means[0], control_complexity=means[1])
    return scores, answer_distributions(assessment, config)


def answered_questions(assessment: Assessment) -> set[str]:
    covered: set[str] = set()
    for answers in assessment.participant_answers.values():
        covered.update(answers)
    return covered
