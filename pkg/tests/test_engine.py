"""Engine unit tests: scales, aggregation, classification, objectives,
decisions and provisional views."""

from __future__ import annotations

import json

import pytest
from hypothesis import given, strategies as st

from captool import store
from captool.engine import (
    AnswerScale,
    Assessment,
    BoundaryFlag,
    ContributionObjective,
    ContributionPolicy,
    DEFAULT_CONFIG,
    DimensionScore,
    OBJECTIVE_ORDER,
    Quadrant,
    Venue,
    aggregate_dimension,
    assign_objectives,
    canonicalize,
    classify,
    consensus_scores,
    decision_from_assessment,
    derive_decision,
    display_score,
    objective_blend,
    provisional_aggregate,
)
from captool.errors import (
    AssessmentNotFinalized,
    EmptyAnswerSet,
    IncompleteParticipantAnswers,
    InvalidAnswerForScale,
    OutOfRangeScore,
)
from captool.fixtures import VOLTE_ANSWERS
from oracles import band_objective, table_flags, table_quadrant

ALL_QIDS = [f"bi{i}" for i in range(1, 6)] + [f"cc{i}" for i in range(1, 6)]


def full_answers(value: int) -> dict[str, int]:
    return {qid: value for qid in ALL_QIDS}


# -- scales -----------------------------------------------------------------

def test_likert_is_identity():
    assert canonicalize(3, AnswerScale.LIKERT4) == 3.0
    assert [canonicalize(v, AnswerScale.LIKERT4) for v in (1, 2, 3, 4)] == [1.0, 2.0, 3.0, 4.0]


def test_three_level_midpoint():
    assert canonicalize("Medium", AnswerScale.HIGH_MEDIUM_LOW3) == 2.5
    assert canonicalize("low", AnswerScale.HIGH_MEDIUM_LOW3) == 1.0
    assert canonicalize("HIGH", AnswerScale.HIGH_MEDIUM_LOW3) == 4.0


def test_signed_scale():
    assert canonicalize(-1, AnswerScale.SIGNED3) == 1.0
    assert canonicalize(0, AnswerScale.SIGNED3) == 2.5
    assert canonicalize(1, AnswerScale.SIGNED3) == 4.0
    assert canonicalize("-1", AnswerScale.SIGNED3) == 1.0


@pytest.mark.parametrize("scale", list(AnswerScale))
def test_scale_mappings_strictly_increase(scale):
    from captool.engine import scale_levels

    scores = [canonicalize(level, scale) for level in scale_levels(scale)]
    assert scores == sorted(scores)
    assert len(set(scores)) == len(scores)
    assert scores[0] == 1.0 and scores[-1] == 4.0


@pytest.mark.parametrize("scale,bad", [
    (AnswerScale.LIKERT4, 5),
    (AnswerScale.LIKERT4, 0),
    (AnswerScale.LIKERT4, "high"),
    (AnswerScale.HIGH_MEDIUM_LOW3, 2),
    (AnswerScale.SIGNED3, 2),
])
def test_invalid_answers_rejected(scale, bad):
    with pytest.raises(InvalidAnswerForScale):
        canonicalize(bad, scale)


# -- aggregation --------------------------------------------------------------

def test_mean_matches_worked_example():
    assert aggregate_dimension([3, 3, 3, 3, 2]) == 2.8
    assert aggregate_dimension([3, 2, 3, 3, 1]) == 2.4


def test_mean_constant_inputs():
    assert aggregate_dimension([1, 1, 1, 1, 1]) == 1.0
    assert aggregate_dimension([4, 4, 4, 4, 4]) == 4.0


def test_mean_errors():
    with pytest.raises(EmptyAnswerSet):
        aggregate_dimension([])
    with pytest.raises(OutOfRangeScore):
        aggregate_dimension([3, 5])
    with pytest.raises(OutOfRangeScore):
        aggregate_dimension([0.5])


@given(st.lists(st.sampled_from([1.0, 2.0, 2.5, 3.0, 4.0]), min_size=1, max_size=12),
       st.randoms(use_true_random=False))
def test_mean_permutation_invariant(values, rng):
    shuffled = list(values)
    rng.shuffle(shuffled)
    assert aggregate_dimension(shuffled) == aggregate_dimension(values)


@given(st.lists(st.integers(min_value=1, max_value=4), min_size=1, max_size=10),
       st.data())
def test_mean_monotone_in_single_answer(answers, data):
    index = data.draw(st.integers(min_value=0, max_value=len(answers) - 1))
    if answers[index] == 4:
        return
    bumped = list(answers)
    bumped[index] += 1
    before = aggregate_dimension([float(a) for a in answers])
    after = aggregate_dimension([float(a) for a in bumped])
    assert after >= before
    # High never degrades to Low when an answer increases.
    if before >= DEFAULT_CONFIG.quadrant_threshold:
        assert after >= DEFAULT_CONFIG.quadrant_threshold


def test_display_rounds_to_one_decimal():
    assert display_score(2.8) == "2.8"
    assert display_score(2.8333333333) == "2.8"
    assert display_score(4.0) == "4.0"


# -- classification -----------------------------------------------------------

def test_classify_worked_example_sits_near_both_boundaries():
    quadrant, flags = classify(DimensionScore(2.8, 2.4))
    assert quadrant == Quadrant.PLATFORM_LEVERAGE
    assert flags == {BoundaryFlag.NEAR_VERTICAL_BOUNDARY, BoundaryFlag.NEAR_HORIZONTAL_BOUNDARY}


def test_classify_corners():
    assert classify(DimensionScore(1.0, 1.0)) == (Quadrant.STANDARD, frozenset())
    assert classify(DimensionScore(4.0, 4.0)) == (Quadrant.STRATEGIC, frozenset())


def test_classify_threshold_counts_as_high():
    quadrant, _ = classify(DimensionScore(2.5, 2.5))
    assert quadrant == Quadrant.STRATEGIC


def test_classify_matches_table_oracle_on_tenth_grid():
    # Expected values computed with the independent decision table; the point
    # (2.0, 3.0) is ProductsBottleneck with no flags (both axes are 0.5 from
    # the threshold, outside the 0.3 flag width).
    assert table_quadrant(2.0, 3.0) == Quadrant.PRODUCTS_BOTTLENECK
    assert table_flags(2.0, 3.0) == set()
    for i in range(10, 41):
        for j in range(10, 41):
            bi, cc = i / 10, j / 10
            quadrant, flags = classify(DimensionScore(bi, cc))
            assert quadrant == table_quadrant(bi, cc), (bi, cc)
            assert {f.value for f in flags} == table_flags(bi, cc), (bi, cc)


# -- objectives -----------------------------------------------------------------

def test_objectives_worked_example():
    primary, secondary = assign_objectives(DimensionScore(2.8, 2.4))
    assert primary == ContributionObjective.TIME_TO_MARKET
    assert secondary is None
    assert objective_blend(DimensionScore(2.8, 2.4)) == pytest.approx(0.5333, abs=1e-4)


def test_objectives_corners():
    assert assign_objectives(DimensionScore(1.0, 1.0))[0] == ContributionObjective.COST_FOCUS
    assert objective_blend(DimensionScore(1.0, 1.0)) == 0.0
    assert assign_objectives(DimensionScore(4.0, 4.0))[0] == ContributionObjective.STRATEGIC_ALLIANCES
    assert objective_blend(DimensionScore(4.0, 4.0)) == 1.0


def test_objectives_on_band_edge_report_adjacent_band():
    primary, secondary = assign_objectives(DimensionScore(2.05, 2.05))
    assert primary == ContributionObjective.TIME_TO_MARKET
    assert secondary == ContributionObjective.COST_FOCUS


def test_objectives_match_band_oracle_sweep():
    # Sweep m over [0, 1] in 0.01 steps via equal-axis scores (bi = cc = 1 + 3m).
    for step in range(0, 101):
        m = step / 100
        scores = DimensionScore(1 + 3 * m, 1 + 3 * m)
        primary, secondary = assign_objectives(scores)
        assert primary == band_objective(objective_blend(scores)), m
        if secondary is not None:
            assert abs(OBJECTIVE_ORDER.index(secondary) - OBJECTIVE_ORDER.index(primary)) == 1


@given(st.floats(min_value=1.0, max_value=4.0), st.floats(min_value=1.0, max_value=4.0),
       st.floats(min_value=1.0, max_value=4.0), st.floats(min_value=1.0, max_value=4.0))
def test_band_index_non_decreasing_in_blend(bi1, cc1, bi2, cc2):
    s1, s2 = DimensionScore(bi1, cc1), DimensionScore(bi2, cc2)
    if objective_blend(s1) > objective_blend(s2):
        s1, s2 = s2, s1
    index1 = OBJECTIVE_ORDER.index(assign_objectives(s1)[0])
    index2 = OBJECTIVE_ORDER.index(assign_objectives(s2)[0])
    assert index1 <= index2


# -- decisions -----------------------------------------------------------------

def test_decision_worked_example():
    decision = derive_decision("VOLTE", DimensionScore(2.8, 2.4))
    assert decision.quadrant == Quadrant.PLATFORM_LEVERAGE
    assert decision.primary_objective == ContributionObjective.TIME_TO_MARKET
    assert decision.policy == ContributionPolicy.CONTRIBUTE
    assert decision.venue == Venue.EXISTING_ECOSYSTEM


def test_decision_standard_corner():
    decision = derive_decision("X", DimensionScore(1.0, 1.0))
    assert decision.quadrant == Quadrant.STANDARD
    assert decision.primary_objective == ContributionObjective.COST_FOCUS
    assert decision.policy == ContributionPolicy.CONTRIBUTE
    assert decision.venue == Venue.EXISTING_ECOSYSTEM


def test_decision_bottleneck_routes_to_limited_consortium():
    decision = derive_decision("X", DimensionScore(2.0, 3.0))
    assert decision.quadrant == Quadrant.PRODUCTS_BOTTLENECK
    assert decision.policy == ContributionPolicy.CONTRIBUTE
    assert decision.venue == Venue.LIMITED_CONSORTIUM


def test_decision_strategic_restricts_to_enablers():
    decision = derive_decision("X", DimensionScore(3.5, 3.5))
    assert decision.quadrant == Quadrant.STRATEGIC
    assert decision.policy == ContributionPolicy.CONTRIBUTE_ENABLERS_ONLY
    assert decision.venue == Venue.EXISTING_ECOSYSTEM


def test_every_quadrant_has_a_strategy_row():
    seen = set()
    for bi, cc in [(1.0, 1.0), (1.0, 4.0), (4.0, 1.0), (4.0, 4.0)]:
        decision = derive_decision("X", DimensionScore(bi, cc))
        seen.add(decision.quadrant)
    assert seen == set(Quadrant)


def test_identical_finalized_assessments_give_identical_decisions():
    from datetime import datetime, timezone

    when = datetime(2024, 5, 1, tzinfo=timezone.utc)

    def build():
        assessment = Assessment(
            artifact_id="VOLTE", session_id="s", consensus_answers=dict(VOLTE_ANSWERS),
            finalized=True,
        )
        return decision_from_assessment(assessment, rationale="push upstream", decided_at=when)

    first, second = build(), build()
    assert first == second
    assert json.dumps(store._decision_doc(first)) == json.dumps(store._decision_doc(second))


def test_decision_requires_finalized_assessment():
    assessment = Assessment(artifact_id="X", session_id="s", consensus_answers=dict(VOLTE_ANSWERS))
    with pytest.raises(AssessmentNotFinalized):
        decision_from_assessment(assessment)


def test_consensus_scores_match_worked_example():
    assessment = Assessment(
        artifact_id="VOLTE", session_id="s", consensus_answers=dict(VOLTE_ANSWERS), finalized=True,
    )
    scores = consensus_scores(assessment)
    assert scores.business_impact == 2.8
    assert scores.control_complexity == 2.4


# -- provisional views ------------------------------------------------------------

def test_provisional_symmetric_mean_and_distribution():
    assessment = Assessment(
        artifact_id="X", session_id="s",
        participant_answers={"alice": full_answers(2), "bob": full_answers(4)},
    )
    scores, distributions = provisional_aggregate(assessment)
    assert scores.business_impact == 3.0
    assert scores.control_complexity == 3.0
    for qid in ALL_QIDS:
        assert distributions[qid] == {"2": 1, "4": 1}


def test_provisional_single_participant_equals_consensus_case():
    assessment = Assessment(
        artifact_id="VOLTE", session_id="s",
        participant_answers={"p1": dict(VOLTE_ANSWERS)},
    )
    scores, _ = provisional_aggregate(assessment)
    assert scores.business_impact == 2.8
    assert scores.control_complexity == 2.4


def test_provisional_requires_answers():
    assessment = Assessment(artifact_id="X", session_id="s")
    with pytest.raises(IncompleteParticipantAnswers) as excinfo:
        provisional_aggregate(assessment)
    assert set(excinfo.value.missing) == set(ALL_QIDS)


def test_provisional_lists_missing_questions():
    answers = full_answers(3)
    del answers["cc5"]
    assessment = Assessment(artifact_id="X", session_id="s", participant_answers={"a": answers})
    with pytest.raises(IncompleteParticipantAnswers) as excinfo:
        provisional_aggregate(assessment)
    assert excinfo.value.missing == ["cc5"]
