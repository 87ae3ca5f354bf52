"""Portfolio persistence: one canonical JSON document per portfolio, plus CSV
ingestion for repository exports.

The document layout is deterministic: fixed key order, collections sorted by
id, UTF-8, RFC 3339 UTC timestamps, trailing newline. Equal portfolios produce
byte-identical files.
"""

from __future__ import annotations

import csv
import json
from dataclasses import dataclass, field
from datetime import datetime, timezone
from pathlib import Path
from typing import Any

from captool.engine import (
    AnswerScale,
    Assessment,
    BoundaryFlag,
    ContributionObjective,
    ContributionPolicy,
    Dimension,
    DimensionScore,
    EngineConfig,
    Quadrant,
    Question,
    QuestionBattery,
    StrategyDecision,
    Venue,
)
from captool.errors import (
    HeaderMismatch,
    IoFailure,
    MalformedRecord,
    ParseError,
    RowError,
    UnsupportedVersion,
    ValidationError,
)
from captool.governance import (
    ContributionRequest,
    FrameAgreement,
    RejectionReason,
    RequestState,
)
from captool.registry import (
    Commit,
    Contribution,
    ContributionState,
    ContributionTier,
    DanglingLink,
    Fbaa,
    Feature,
    Patch,
    Product,
    Registry,
    Repository,
    StrategySummary,
)

FORMAT_VERSION = 1


@dataclass
class Portfolio:
    """Everything the system knows, as one savable unit."""

    config: EngineConfig = field(default_factory=EngineConfig)
    registry: Registry = field(default_factory=Registry)
    # keyed (artifact_id, session_id)
    assessments: dict[tuple[str, str], Assessment] = field(default_factory=dict)
    decisions: dict[str, StrategyDecision] = field(default_factory=dict)
    requests: dict[str, ContributionRequest] = field(default_factory=dict)
    frame_agreements: dict[str, FrameAgreement] = field(default_factory=dict)
    # dangling links observed at load time; not part of the document
    load_warnings: list[DanglingLink] = field(default_factory=list, compare=False)


# -- timestamps ---------------------------------------------------------------

def format_ts(dt: datetime) -> str:
    return dt.astimezone(timezone.utc).isoformat().replace("+00:00", "Z")


def parse_ts(raw: str) -> datetime:
    return datetime.fromisoformat(raw.replace("Z", "+00:00")).astimezone(timezone.utc)


# -- document building ----------------------------------------------------------

def _battery_doc(battery: QuestionBattery) -> list[dict[str, str]]:
    return [{"id": q.id, "text": q.text, "guidance": q.guidance} for q in battery.questions]


def config_to_doc(config: EngineConfig) -> dict[str, Any]:
    return {
        "default_scale": config.default_scale.value,
        "quadrant_threshold": config.quadrant_threshold,
        "boundary_width": config.boundary_width,
        "objective_bands": list(config.objective_bands),
        "secondary_epsilon": config.secondary_epsilon,
        "batteries": {
            Dimension.BUSINESS_IMPACT.value: _battery_doc(config.business_impact_battery),
            Dimension.CONTROL_COMPLEXITY.value: _battery_doc(config.control_complexity_battery),
        },
    }


def config_from_doc(doc: dict[str, Any]) -> EngineConfig:
    def battery(dimension: Dimension, items: list[dict[str, str]]) -> QuestionBattery:
        return QuestionBattery(
            dimension=dimension,
            questions=tuple(
                Question(id=i["id"], text=i["text"], guidance=i.get("guidance", "")) for i in items
            ),
        )

    batteries = doc["batteries"]
    bands = doc["objective_bands"]
    return EngineConfig(
        business_impact_battery=battery(
            Dimension.BUSINESS_IMPACT, batteries[Dimension.BUSINESS_IMPACT.value]
        ),
        control_complexity_battery=battery(
            Dimension.CONTROL_COMPLEXITY, batteries[Dimension.CONTROL_COMPLEXITY.value]
        ),
        default_scale=AnswerScale(doc["default_scale"]),
        quadrant_threshold=doc["quadrant_threshold"],
        boundary_width=doc["boundary_width"],
        objective_bands=(bands[0], bands[1], bands[2]),
        secondary_epsilon=doc["secondary_epsilon"],
    )


def _product_doc(r: Product) -> dict[str, Any]:
    return {
        "platform_id": r.platform_id,
        "product_name": r.product_name,
        "software": r.software,
        "status": r.status,
    }


def _feature_doc(r: Feature) -> dict[str, Any]:
    return {
        "feature_id": r.feature_id,
        "platform_id": r.platform_id,
        "description": r.description,
        "development_state": r.development_state,
        "feature_category": r.feature_category,
        "contribution_strategy": r.contribution_strategy.value,
        "decision_ref": r.decision_ref,
    }


def _fbaa_doc(r: Fbaa) -> dict[str, Any]:
    return {
        "fbaa_id": r.fbaa_id,
        "fp_ids": list(r.fp_ids),
        "description": r.description,
        "version": r.version,
    }


def _patch_doc(r: Patch) -> dict[str, Any]:
    return {
        "patch_id": r.patch_id,
        "fp_id": r.fp_id,
        "fbaa_id": r.fbaa_id,
        "title": r.title,
        "category": r.category,
        "assets": r.assets,
    }


def _contribution_doc(r: Contribution) -> dict[str, Any]:
    return {
        "contribution_id": r.contribution_id,
        "patch_id": r.patch_id,
        "title": r.title,
        "state": r.state.value,
        "type": r.type.value,
        "ecosystem": r.ecosystem,
        "contributors": list(r.contributors),
        "created_at": format_ts(r.created_at) if r.created_at else None,
    }


def _commit_doc(r: Commit) -> dict[str, Any]:
    return {
        "commit_id": r.commit_id,
        "patch_id": r.patch_id,
        "title": r.title,
        "fbaa_name": r.fbaa_name,
        "vcs_hash": r.vcs_hash,
    }


def _assessment_doc(a: Assessment) -> dict[str, Any]:
    return {
        "artifact_id": a.artifact_id,
        "session_id": a.session_id,
        "scale": a.scale.value,
        "participant_answers": {
            pid: {qid: a.participant_answers[pid][qid] for qid in sorted(a.participant_answers[pid])}
            for pid in sorted(a.participant_answers)
        },
        "consensus_answers": {qid: a.consensus_answers[qid] for qid in sorted(a.consensus_answers)},
        "finalized": a.finalized,
        "timestamp": format_ts(a.timestamp),
    }


def _decision_doc(d: StrategyDecision) -> dict[str, Any]:
    return {
        "artifact_id": d.artifact_id,
        "scores": {
            "business_impact": d.scores.business_impact,
            "control_complexity": d.scores.control_complexity,
        },
        "quadrant": d.quadrant.value,
        "boundary_flags": [f.value for f in d.boundary_flags],
        "primary_objective": d.primary_objective.value,
        "secondary_objective": d.secondary_objective.value if d.secondary_objective else None,
        "policy": d.policy.value,
        "venue": d.venue.value,
        "rationale": d.rationale,
        "decided_at": format_ts(d.decided_at),
    }


def _request_doc(r: ContributionRequest) -> dict[str, Any]:
    return {
        "request_id": r.request_id,
        "patch_id": r.patch_id,
        "requested_by": r.requested_by,
        "tier": r.tier.value,
        "ecosystem": r.ecosystem,
        "justification": r.justification,
        "created_at": format_ts(r.created_at),
        "state": r.state.value,
        "rejection_reason": r.rejection_reason.value if r.rejection_reason else None,
        "notes": list(r.notes),
    }


def _agreement_doc(a: FrameAgreement) -> dict[str, Any]:
    return {
        "agreement_id": a.agreement_id,
        "ecosystem": a.ecosystem,
        "max_tier_auto": a.max_tier_auto.value,
        "active": a.active,
        "notes": a.notes,
    }


def to_document(portfolio: Portfolio) -> dict[str, Any]:
    reg = portfolio.registry
    return {
        "format_version": FORMAT_VERSION,
        "config": config_to_doc(portfolio.config),
        "products": [_product_doc(reg.products[k]) for k in sorted(reg.products)],
        "features": [_feature_doc(reg.features[k]) for k in sorted(reg.features)],
        "fbaa": [_fbaa_doc(reg.fbaas[k]) for k in sorted(reg.fbaas)],
        "patches": [_patch_doc(reg.patches[k]) for k in sorted(reg.patches)],
        "contributions": [_contribution_doc(reg.contributions[k]) for k in sorted(reg.contributions)],
        "commits": [_commit_doc(reg.commits[k]) for k in sorted(reg.commits)],
        "assessments": [_assessment_doc(portfolio.assessments[k]) for k in sorted(portfolio.assessments)],
        "decisions": [_decision_doc(portfolio.decisions[k]) for k in sorted(portfolio.decisions)],
        "requests": [_request_doc(portfolio.requests[k]) for k in sorted(portfolio.requests)],
        "frame_agreements": [
            _agreement_doc(portfolio.frame_agreements[k]) for k in sorted(portfolio.frame_agreements)
        ],
    }


def dumps(portfolio: Portfolio) -> str:
    return json.dumps(to_document(portfolio), ensure_ascii=False, indent=2) + "\n"


def save(portfolio: Portfolio, path: str | Path) -> None:
    try:
        Path(path).write_text(dumps(portfolio), encoding="utf-8")
    except OSError as exc:
        raise IoFailure(f"cannot write {path}: {exc}") from exc


# -- document parsing -----------------------------------------------------------

def _enum(cls, raw: Any, path: str, problems: list[str]):
    try:
        return cls(raw)
    except ValueError:
        problems.append(f"{path}: {raw!r} is not a valid {cls.__name__}")
        return None


def from_document(doc: dict[str, Any]) -> Portfolio:
    if doc.get("format_version") != FORMAT_VERSION:
        raise UnsupportedVersion(
            f"unsupported portfolio format_version {doc.get('format_version')!r} (expected {FORMAT_VERSION})"
        )
    problems: list[str] = []

    try:
        config = config_from_doc(doc["config"]) if "config" in doc else EngineConfig()
    except (KeyError, TypeError, ValueError, IndexError) as exc:
        raise ValidationError([f"config: {exc}"]) from exc

    portfolio = Portfolio(config=config)
    reg = portfolio.registry

    def load_records(key: str, repo: Repository, build):
        for i, item in enumerate(doc.get(key, [])):
            path = f"{key}[{i}]"
            try:
                record = build(item, path)
            except (KeyError, TypeError) as exc:
                problems.append(f"{path}: {exc}")
                continue
            if record is None:
                continue
            try:
                reg.upsert(repo, record)
            except MalformedRecord as exc:
                problems.append(f"{path}: {exc.message}")

    load_records("products", Repository.PRODUCTS, lambda d, p: Product(
        platform_id=d["platform_id"],
        product_name=d.get("product_name", ""),
        software=d.get("software", ""),
        status=d.get("status", ""),
    ))

    def build_feature(d, p):
        summary = _enum(StrategySummary, d.get("contribution_strategy", "Undecided"), p, problems)
        if summary is None:
            return None
        return Feature(
            feature_id=d["feature_id"],
            platform_id=d.get("platform_id", ""),
            description=d.get("description", ""),
            development_state=d.get("development_state", ""),
            feature_category=d.get("feature_category", ""),
            contribution_strategy=summary,
            decision_ref=d.get("decision_ref"),
        )

    load_records("features", Repository.FEATURES, build_feature)
    load_records("fbaa", Repository.FBAAS, lambda d, p: Fbaa(
        fbaa_id=d["fbaa_id"],
        fp_ids=list(d.get("fp_ids", [])),
        description=d.get("description", ""),
        version=d.get("version", 1),
    ))
    load_records("patches", Repository.PATCHES, lambda d, p: Patch(
        patch_id=d["patch_id"],
        fp_id=d.get("fp_id"),
        fbaa_id=d.get("fbaa_id"),
        title=d.get("title", ""),
        category=d.get("category", ""),
        assets=d.get("assets", ""),
    ))

    def build_contribution(d, p):
        state = _enum(ContributionState, d.get("state", "EcosystemReview"), p, problems)
        tier = _enum(ContributionTier, d.get("type", "Trivial"), p, problems)
        if state is None or tier is None:
            return None
        return Contribution(
            contribution_id=d["contribution_id"],
            patch_id=d.get("patch_id", ""),
            title=d.get("title", ""),
            state=state,
            type=tier,
            ecosystem=d.get("ecosystem", ""),
            contributors=list(d.get("contributors", [])),
            created_at=parse_ts(d["created_at"]) if d.get("created_at") else None,
        )

    load_records("contributions", Repository.CONTRIBUTIONS, build_contribution)
    load_records("commits", Repository.COMMITS, lambda d, p: Commit(
        commit_id=d["commit_id"],
        patch_id=d.get("patch_id", ""),
        title=d.get("title", ""),
        fbaa_name=d.get("fbaa_name", ""),
        vcs_hash=d.get("vcs_hash", ""),
    ))

    question_ids = set(config.all_question_ids())
    for i, item in enumerate(doc.get("assessments", [])):
        path = f"assessments[{i}]"
        try:
            scale = _enum(AnswerScale, item.get("scale", config.default_scale.value), path, problems)
            if scale is None:
                continue
            assessment = Assessment(
                artifact_id=item["artifact_id"],
                session_id=item["session_id"],
                scale=scale,
                participant_answers={
                    pid: dict(answers) for pid, answers in item.get("participant_answers", {}).items()
                },
                consensus_answers=dict(item.get("consensus_answers", {})),
                finalized=bool(item.get("finalized", False)),
                timestamp=parse_ts(item["timestamp"]) if item.get("timestamp") else datetime.now(timezone.utc),
            )
        except (KeyError, TypeError, ValueError) as exc:
            problems.append(f"{path}: {exc}")
            continue
        recorded = set(assessment.consensus_answers)
        for answers in assessment.participant_answers.values():
            recorded.update(answers)
        stray = sorted(recorded - question_ids)
        if stray:
            problems.append(f"{path}: answers reference unknown questions: {', '.join(stray)}")
            continue
        if assessment.finalized and not question_ids.issubset(assessment.consensus_answers):
            problems.append(f"{path}: finalized but consensus does not cover every question")
            continue
        portfolio.assessments[(assessment.artifact_id, assessment.session_id)] = assessment

    for i, item in enumerate(doc.get("decisions", [])):
        path = f"decisions[{i}]"
        try:
            quadrant = _enum(Quadrant, item["quadrant"], path, problems)
            primary = _enum(ContributionObjective, item["primary_objective"], path, problems)
            policy = _enum(ContributionPolicy, item["policy"], path, problems)
            venue = _enum(Venue, item["venue"], path, problems)
            flags = tuple(
                f for f in (_enum(BoundaryFlag, raw, path, problems) for raw in item.get("boundary_flags", []))
                if f is not None
            )
            secondary_raw = item.get("secondary_objective")
            secondary = _enum(ContributionObjective, secondary_raw, path, problems) if secondary_raw else None
            if None in (quadrant, primary, policy, venue):
                continue
            decision = StrategyDecision(
                artifact_id=item["artifact_id"],
                scores=DimensionScore(
                    business_impact=item["scores"]["business_impact"],
                    control_complexity=item["scores"]["control_complexity"],
                ),
                quadrant=quadrant,
                boundary_flags=flags,
                primary_objective=primary,
                secondary_objective=secondary,
                policy=policy,
                venue=venue,
                rationale=item.get("rationale", ""),
                decided_at=parse_ts(item["decided_at"]),
            )
        except (KeyError, TypeError, ValueError) as exc:
            problems.append(f"{path}: {exc}")
            continue
        except Exception as exc:  # OutOfRangeScore from DimensionScore
            problems.append(f"{path}: {exc}")
            continue
        portfolio.decisions[decision.artifact_id] = decision

    for i, item in enumerate(doc.get("requests", [])):
        path = f"requests[{i}]"
        try:
            tier = _enum(ContributionTier, item["tier"], path, problems)
            state = _enum(RequestState, item.get("state", "Draft"), path, problems)
            reason_raw = item.get("rejection_reason")
            reason = _enum(RejectionReason, reason_raw, path, problems) if reason_raw else None
            if tier is None or state is None:
                continue
            request = ContributionRequest(
                request_id=item["request_id"],
                patch_id=item["patch_id"],
                requested_by=item.get("requested_by", ""),
                tier=tier,
                ecosystem=item.get("ecosystem", ""),
                justification=item.get("justification", ""),
                created_at=parse_ts(item["created_at"]),
                state=state,
                rejection_reason=reason,
                notes=list(item.get("notes", [])),
            )
        except (KeyError, TypeError, ValueError) as exc:
            problems.append(f"{path}: {exc}")
            continue
        portfolio.requests[request.request_id] = request

    for i, item in enumerate(doc.get("frame_agreements", [])):
        path = f"frame_agreements[{i}]"
        try:
            tier = _enum(ContributionTier, item.get("max_tier_auto", "Trivial"), path, problems)
            if tier is None:
                continue
            agreement = FrameAgreement(
                agreement_id=item["agreement_id"],
                ecosystem=item.get("ecosystem", ""),
                max_tier_auto=tier,
                active=bool(item.get("active", True)),
                notes=item.get("notes", ""),
            )
        except (KeyError, TypeError, ValueError) as exc:
            problems.append(f"{path}: {exc}")
            continue
        portfolio.frame_agreements[agreement.agreement_id] = agreement

    if problems:
        raise ValidationError(problems)

    # Dangling cross-references do not abort a load; they are reported so the
    # registry can be repaired.
    portfolio.load_warnings = reg.validate_links()
    reg.version = reg.count()
    return portfolio


def loads(text: str) -> Portfolio:
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ParseError(f"invalid JSON: {exc.msg}", location=f"line {exc.lineno}, column {exc.colno}") from exc
    if not isinstance(doc, dict):
        raise ParseError("portfolio document root must be an object")
    return from_document(doc)


def load(path: str | Path) -> Portfolio:
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise IoFailure(f"cannot read {path}: {exc}") from exc
    return loads(text)


# -- CSV ingestion ------------------------------------------------------------

_REQUIRED_COLUMNS: dict[Repository, set[str]] = {
    Repository.PRODUCTS: {"platform_id"},
    Repository.FEATURES: {"feature_id", "platform_id"},
    Repository.FBAAS: {"fbaa_id", "fp_ids"},
    Repository.PATCHES: {"patch_id"},
    Repository.CONTRIBUTIONS: {"contribution_id", "patch_id"},
    Repository.COMMITS: {"commit_id", "patch_id"},
}

_LIST_COLUMNS = {"fp_ids", "contributors"}

_FIELD_NAMES: dict[Repository, list[str]] = {
    Repository.PRODUCTS: ["platform_id", "product_name", "software", "status"],
    Repository.FEATURES: [
        "feature_id", "platform_id", "description", "development_state",
        "feature_category", "contribution_strategy", "decision_ref",
    ],
    Repository.FBAAS: ["fbaa_id", "fp_ids", "description", "version"],
    Repository.PATCHES: ["patch_id", "fp_id", "fbaa_id", "title", "category", "assets"],
    Repository.CONTRIBUTIONS: [
        "contribution_id", "patch_id", "title", "state", "type",
        "ecosystem", "contributors", "created_at",
    ],
    Repository.COMMITS: ["commit_id", "patch_id", "title", "fbaa_name", "vcs_hash"],
}


def _normalize_header(name: str) -> str:
    return name.strip().lower().replace(" ", "_")


def _row_enum(cls, raw: str, line: int, field_name: str):
    # Exports write states like "ecosystem merged"; compare ignoring case,
    # spaces and separators.
    def squash(value: str) -> str:
        return "".join(ch for ch in value.lower() if ch.isalnum())

    for member in cls:
        if squash(member.value) == squash(raw):
            return member
    raise RowError(line, field_name, f"{raw!r} is not a valid {cls.__name__}")


def import_csv(registry: Registry, repo: Repository, path: str | Path) -> int:
    """Upsert rows from a repository export. Header names must match the
    repository's field names (case-insensitive, spaces become underscores);
    list cells use ';' separators."""
    try:
        text = Path(path).read_text(encoding="utf-8-sig")
    except OSError as exc:
        raise IoFailure(f"cannot read {path}: {exc}") from exc

    reader = csv.DictReader(text.splitlines())
    if reader.fieldnames is None:
        raise HeaderMismatch(sorted(_REQUIRED_COLUMNS[repo]), [])
    headers = [_normalize_header(h) for h in reader.fieldnames]
    known = _FIELD_NAMES[repo]
    unknown = [h for h in headers if h not in known]
    missing = sorted(_REQUIRED_COLUMNS[repo] - set(headers))
    if repo is Repository.PATCHES and "fp_id" not in headers and "fbaa_id" not in headers:
        missing.append("fp_id|fbaa_id")
    if unknown or missing:
        raise HeaderMismatch(sorted(set(known) if unknown else missing), headers)

    count = 0
    for line_no, raw_row in enumerate(reader, start=2):
        row = {
            _normalize_header(k): (v or "").strip()
            for k, v in raw_row.items()
            if k is not None
        }
        record = _build_row(repo, row, line_no)
        try:
            registry.upsert(repo, record)
        except MalformedRecord as exc:
            raise RowError(line_no, exc.field, exc.message) from exc
        count += 1
    return count


def _build_row(repo: Repository, row: dict[str, str], line: int):
    def split_list(value: str) -> list[str]:
        return [part.strip() for part in value.split(";") if part.strip()]

    if repo is Repository.PRODUCTS:
        return Product(
            platform_id=row.get("platform_id", ""),
            product_name=row.get("product_name", ""),
            software=row.get("software", ""),
            status=row.get("status", ""),
        )
    if repo is Repository.FEATURES:
        summary = StrategySummary.UNDECIDED
        if row.get("contribution_strategy"):
            summary = _row_enum(StrategySummary, row["contribution_strategy"], line, "contribution_strategy")
        return Feature(
            feature_id=row.get("feature_id", ""),
            platform_id=row.get("platform_id", ""),
            description=row.get("description", ""),
            development_state=row.get("development_state", ""),
            feature_category=row.get("feature_category", ""),
            contribution_strategy=summary,
            decision_ref=row.get("decision_ref") or None,
        )
    if repo is Repository.FBAAS:
        version = 1
        if row.get("version"):
            try:
                version = int(row["version"])
            except ValueError:
                raise RowError(line, "version", f"{row['version']!r} is not an integer")
        return Fbaa(
            fbaa_id=row.get("fbaa_id", ""),
            fp_ids=split_list(row.get("fp_ids", "")),
            description=row.get("description", ""),
            version=version,
        )
    if repo is Repository.PATCHES:
        return Patch(
            patch_id=row.get("patch_id", ""),
            fp_id=row.get("fp_id") or None,
            fbaa_id=row.get("fbaa_id") or None,
            title=row.get("title", ""),
            category=row.get("category", ""),
            assets=row.get("assets", ""),
        )
    if repo is Repository.CONTRIBUTIONS:
        state = ContributionState.ECOSYSTEM_REVIEW
        if row.get("state"):
            state = _row_enum(ContributionState, row["state"], line, "state")
        tier = ContributionTier.TRIVIAL
        if row.get("type"):
            tier = _normalize_tier(row["type"], line)
        created_at = None
        if row.get("created_at"):
            try:
                created_at = parse_ts(row["created_at"])
            except ValueError:
                raise RowError(line, "created_at", f"{row['created_at']!r} is not an RFC 3339 timestamp")
        return Contribution(
            contribution_id=row.get("contribution_id", ""),
            patch_id=row.get("patch_id", ""),
            title=row.get("title", ""),
            state=state,
            type=tier,
            ecosystem=row.get("ecosystem", ""),
            contributors=split_list(row.get("contributors", "")),
            created_at=created_at,
        )
    return Commit(
        commit_id=row.get("commit_id", ""),
        patch_id=row.get("patch_id", ""),
        title=row.get("title", ""),
        fbaa_name=row.get("fbaa_name", ""),
        vcs_hash=row.get("vcs_hash", ""),
    )


def _normalize_tier(raw: str, line: int) -> ContributionTier:
    """Accept legacy export vocabulary alongside the canonical tier names."""
    lowered = raw.strip().lower()
    legacy = {"trivial": ContributionTier.TRIVIAL,
              "bug fix": ContributionTier.TRIVIAL,
              "bugfix": ContributionTier.TRIVIAL,
              "non-trivial": ContributionTier.MEDIUM,
              "nontrivial": ContributionTier.MEDIUM}
    if lowered in legacy:
        return legacy[lowered]
    return _row_enum(ContributionTier, raw, line, "type")
