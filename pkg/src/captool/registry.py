"""The six-repository information model and its traceability operations.

Records are plain dataclasses keyed by their ids. Foreign references are not
enforced at insert time; ``validate_links`` produces the exhaustive dangling
report and the trace operations mark unresolved hops instead of failing.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from datetime import datetime
from enum import Enum
from typing import Optional

from captool.errors import MalformedRecord, UnknownContribution, UnknownFeature


class StrategySummary(str, Enum):
    """Contribution-strategy attribute communicated to the feature repository."""

    CONTRIBUTE = "Contribute"
    CONTRIBUTE_ENABLERS_ONLY = "ContributeEnablersOnly"
    DO_NOT_CONTRIBUTE = "DoNotContribute"
    UNDECIDED = "Undecided"


class ContributionTier(str, Enum):
    TRIVIAL = "Trivial"
    MEDIUM = "Medium"
    MAJOR = "Major"


_TIER_RANK = {ContributionTier.TRIVIAL: 0, ContributionTier.MEDIUM: 1, ContributionTier.MAJOR: 2}


def tier_at_most(tier: ContributionTier, ceiling: ContributionTier) -> bool:
    return _TIER_RANK[tier] <= _TIER_RANK[ceiling]


class ContributionState(str, Enum):
    """Lifecycle states recorded on a contribution, both board-side and
    ecosystem-side outcomes."""

    CONTRIBUTED = "Contributed"
    ECOSYSTEM_REVIEW = "EcosystemReview"
    ECOSYSTEM_MERGED = "EcosystemMerged"
    ALREADY_FIXED = "AlreadyFixed"
    ECOSYSTEM_REJECTED = "EcosystemRejected"
    CEO_REJECTED = "CeoRejected"
    LEGAL_REJECT = "LegalReject"


class Repository(str, Enum):
    PRODUCTS = "products"
    FEATURES = "features"
    FBAAS = "fbaa"
    PATCHES = "patches"
    CONTRIBUTIONS = "contributions"
    COMMITS = "commits"


@dataclass
class Product:
    platform_id: str
    product_name: str = ""
    software: str = ""
    status: str = ""


@dataclass
class Feature:
    feature_id: str
    platform_id: str = ""
    description: str = ""
    development_state: str = ""
    feature_category: str = ""
    contribution_strategy: StrategySummary = StrategySummary.UNDECIDED
    decision_ref: Optional[str] = None


@dataclass
class Fbaa:
    fbaa_id: str
    fp_ids: list[str] = field(default_factory=list)
    description: str = ""
    version: int = 1


@dataclass
class Patch:
    patch_id: str
    fp_id: Optional[str] = None
    fbaa_id: Optional[str] = None
    title: str = ""
    category: str = ""
    assets: str = ""


@dataclass
class Contribution:
    contribution_id: str
    patch_id: str = ""
    title: str = ""
    state: ContributionState = ContributionState.ECOSYSTEM_REVIEW
    type: ContributionTier = ContributionTier.TRIVIAL
    ecosystem: str = ""
    contributors: list[str] = field(default_factory=list)
    created_at: Optional[datetime] = None


@dataclass
class Commit:
    # Commits carry a synthetic unique id of their own; the upstream VCS hash
    # can be stored in the title or vcs_hash.
    commit_id: str
    patch_id: str = ""
    title: str = ""
    fbaa_name: str = ""
    vcs_hash: str = ""


RECORD_TYPES = {
    Repository.PRODUCTS: Product,
    Repository.FEATURES: Feature,
    Repository.FBAAS: Fbaa,
    Repository.PATCHES: Patch,
    Repository.CONTRIBUTIONS: Contribution,
    Repository.COMMITS: Commit,
}

ID_FIELDS = {
    Repository.PRODUCTS: "platform_id",
    Repository.FEATURES: "feature_id",
    Repository.FBAAS: "fbaa_id",
    Repository.PATCHES: "patch_id",
    Repository.CONTRIBUTIONS: "contribution_id",
    Repository.COMMITS: "commit_id",
}


@dataclass(frozen=True)
class DanglingLink:
    from_repo: Repository
    from_id: str
    field: str
    missing_id: str


@dataclass(frozen=True)
class TraceChain:
    contribution_id: str
    patch_id: str
    feature_ids: tuple[str, ...]
    fbaa_ids: tuple[str, ...]
    platform_ids: tuple[str, ...]
    complete: bool
    dangling_at: Optional[str] = None


@dataclass(frozen=True)
class ReverseTrace:
    feature_id: str
    patches: tuple[str, ...]
    contributions: tuple[str, ...]
    commits: tuple[str, ...]


def validate_record(repo: Repository, record) -> None:
    """Per-record invariants (ids present, structural requirements). Raises
    MalformedRecord; cross-references are validate_links' job."""
    expected = RECORD_TYPES[repo]
    if not isinstance(record, expected):
        raise MalformedRecord("record", f"{repo.value} stores {expected.__name__} records")
    id_field = ID_FIELDS[repo]
    if not getattr(record, id_field):
        raise MalformedRecord(id_field, f"{id_field} must be non-empty")
    if isinstance(record, Fbaa):
        if not record.fp_ids:
            raise MalformedRecord("fp_ids", "an FBAA must reference at least one feature")
        if record.version < 1:
            raise MalformedRecord("version", "FBAA version starts at 1")
    if isinstance(record, Patch) and not record.fp_id and not record.fbaa_id:
        raise MalformedRecord("fp_id", "a patch must reference a feature or an FBAA")
    if isinstance(record, Contribution) and not record.patch_id:
        raise MalformedRecord("patch_id", "a contribution must reference a patch")
    if isinstance(record, Commit) and not record.patch_id:
        raise MalformedRecord("patch_id", "a commit must reference a patch")


class Registry:
    """Six keyed repositories with a monotone version counter.

    Many readers, serialized writers: every mutation goes through ``upsert``
    which bumps ``version``, so report code can detect concurrent changes by
    comparing counters before and after a read.
    """

    def __init__(self):
        self.products: dict[str, Product] = {}
        self.features: dict[str, Feature] = {}
        self.fbaas: dict[str, Fbaa] = {}
        self.patches: dict[str, Patch] = {}
        self.contributions: dict[str, Contribution] = {}
        self.commits: dict[str, Commit] = {}
        self.version = 0

    def __eq__(self, other) -> bool:
        if not isinstance(other, Registry):
            return NotImplemented
        return all(
            self._store(repo) == other._store(repo) for repo in Repository
        )

    def _store(self, repo: Repository) -> dict:
        return {
            Repository.PRODUCTS: self.products,
            Repository.FEATURES: self.features,
            Repository.FBAAS: self.fbaas,
            Repository.PATCHES: self.patches,
            Repository.CONTRIBUTIONS: self.contributions,
            Repository.COMMITS: self.commits,
        }[repo]

    def upsert(self, repo: Repository, record):
        """Insert or replace by id; returns the stored record."""
        validate_record(repo, record)
        store = self._store(repo)
        store[getattr(record, ID_FIELDS[repo])] = record
        self.version += 1
        return record

    def get(self, repo: Repository, record_id: str):
        return self._store(repo).get(record_id)

    def records(self, repo: Repository) -> list:
        store = self._store(repo)
        return [store[key] for key in sorted(store)]

    def count(self) -> int:
        return sum(len(self._store(repo)) for repo in Repository)

    # -- link validation ----------------------------------------------------

    def validate_links(self) -> list[DanglingLink]:
        """Exhaustive dangling-reference report; empty list means every foreign
        reference resolves."""
        dangling: list[DanglingLink] = []

        def check(repo: Repository, from_id: str, field_name: str, target: dict, ref: Optional[str]):
            if ref is None:
                return
            if ref not in target:
                dangling.append(DanglingLink(repo, from_id, field_name, ref))

        for feature in self.records(Repository.FEATURES):
            check(Repository.FEATURES, feature.feature_id, "platform_id", self.products, feature.platform_id)
        for fbaa in self.records(Repository.FBAAS):
            for fp_id in fbaa.fp_ids:
                check(Repository.FBAAS, fbaa.fbaa_id, "fp_ids", self.features, fp_id)
        for patch in self.records(Repository.PATCHES):
            if patch.fp_id is not None:
                check(Repository.PATCHES, patch.patch_id, "fp_id", self.features, patch.fp_id)
            if patch.fbaa_id is not None:
                check(Repository.PATCHES, patch.patch_id, "fbaa_id", self.fbaas, patch.fbaa_id)
        for contribution in self.records(Repository.CONTRIBUTIONS):
            check(Repository.CONTRIBUTIONS, contribution.contribution_id, "patch_id",
                  self.patches, contribution.patch_id)
        for commit in self.records(Repository.COMMITS):
            check(Repository.COMMITS, commit.commit_id, "patch_id", self.patches, commit.patch_id)
        return dangling

    # -- traces ---------------------------------------------------------------

    def trace_contribution(self, contribution_id: str) -> TraceChain:
        """Follow contribution -> patch -> features (direct and via FBAA) -> platforms.

        Fails soft: an unresolved hop yields complete=False and names the first
        dangling link instead of raising.
        """
        contribution = self.contributions.get(contribution_id)
        if contribution is None:
            raise UnknownContribution(f"no contribution {contribution_id!r}")

        dangling: list[str] = []
        feature_ids: set[str] = set()
        fbaa_ids: set[str] = set()
        platform_ids: set[str] = set()

        patch = self.patches.get(contribution.patch_id)
        if patch is None:
            return TraceChain(
                contribution_id=contribution_id,
                patch_id=contribution.patch_id,
                feature_ids=(),
                fbaa_ids=(),
                platform_ids=(),
                complete=False,
                dangling_at="patch_id",
            )

        if patch.fp_id is not None:
            if patch.fp_id in self.features:
                feature_ids.add(patch.fp_id)
            else:
                dangling.append("fp_id")
        if patch.fbaa_id is not None:
            fbaa = self.fbaas.get(patch.fbaa_id)
            if fbaa is None:
                dangling.append("fbaa_id")
            else:
                fbaa_ids.add(fbaa.fbaa_id)
                for fp_id in fbaa.fp_ids:
                    if fp_id in self.features:
                        feature_ids.add(fp_id)
                    else:
                        dangling.append("fp_ids")
        for feature_id in feature_ids:
            feature = self.features[feature_id]
            if feature.platform_id in self.products:
                platform_ids.add(feature.platform_id)
            else:
                dangling.append("platform_id")

        return TraceChain(
            contribution_id=contribution_id,
            patch_id=patch.patch_id,
            feature_ids=tuple(sorted(feature_ids)),
            fbaa_ids=tuple(sorted(fbaa_ids)),
            platform_ids=tuple(sorted(platform_ids)),
            complete=not dangling,
            dangling_at=min(dangling, key=_DANGLING_ORDER.index) if dangling else None,
        )

    def patches_for_feature(self, feature_id: str) -> list[str]:
        """Patch ids referencing the feature directly or through an FBAA."""
        hits: set[str] = set()
        for patch in self.patches.values():
            if patch.fp_id == feature_id:
                hits.add(patch.patch_id)
            elif patch.fbaa_id is not None:
                fbaa = self.fbaas.get(patch.fbaa_id)
                if fbaa is not None and feature_id in fbaa.fp_ids:
                    hits.add(patch.patch_id)
        return sorted(hits)

    def reverse_trace(self, feature_id: str) -> ReverseTrace:
        """All patches touching a feature, plus their contributions and commits."""
        if feature_id not in self.features:
            raise UnknownFeature(f"no feature {feature_id!r}")
        patch_ids = set(self.patches_for_feature(feature_id))
        contribution_ids = sorted(
            c.contribution_id for c in self.contributions.values() if c.patch_id in patch_ids
        )
        commit_ids = sorted(
            c.commit_id for c in self.commits.values() if c.patch_id in patch_ids
        )
        return ReverseTrace(
            feature_id=feature_id,
            patches=tuple(sorted(patch_ids)),
            contributions=tuple(contribution_ids),
            commits=tuple(commit_ids),
        )

    def fbaas_containing(self, feature_id: str) -> list[str]:
        return sorted(f.fbaa_id for f in self.fbaas.values() if feature_id in f.fp_ids)


_DANGLING_ORDER = ["patch_id", "fp_id", "fbaa_id", "fp_ids", "platform_id"]
