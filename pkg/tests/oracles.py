"""Independent brute-force oracles used to check the production paths.

Everything here is deliberately naive: explicit decision tables and nested
loops over whole repositories, written without reusing registry/reporting
traversal code.
"""

from __future__ import annotations

from datetime import datetime, timedelta

from captool.engine import ContributionObjective, Quadrant
from captool.registry import ContributionState, Registry


def table_quadrant(bi: float, cc: float) -> Quadrant:
    """Classification decision table, written out case by case."""
    if bi >= 2.5 and cc >= 2.5:
        return Quadrant.STRATEGIC
    if bi >= 2.5 and cc < 2.5:
        return Quadrant.PLATFORM_LEVERAGE
    if bi < 2.5 and cc >= 2.5:
        return Quadrant.PRODUCTS_BOTTLENECK
    return Quadrant.STANDARD


def table_flags(bi: float, cc: float) -> set[str]:
    flags = set()
    if abs(cc - 2.5) <= 0.3:
        flags.add("NearVerticalBoundary")
    if abs(bi - 2.5) <= 0.3:
        flags.add("NearHorizontalBoundary")
    return flags


def band_objective(m: float) -> ContributionObjective:
    """Straight-line band lookup over the blend coordinate."""
    if m < 0.35:
        return ContributionObjective.COST_FOCUS
    if m < 0.65:
        return ContributionObjective.TIME_TO_MARKET
    if m < 0.85:
        return ContributionObjective.CONTROL_FOCUS
    return ContributionObjective.STRATEGIC_ALLIANCES


def join_trace(registry: Registry, contribution_id: str) -> dict:
    """Nested-loop join from one contribution down to platforms."""
    contribution = None
    for cid, record in registry.contributions.items():
        if cid == contribution_id:
            contribution = record
    assert contribution is not None

    patch = None
    for pid, record in registry.patches.items():
        if pid == contribution.patch_id:
            patch = record
    if patch is None:
        return {
            "patch_id": contribution.patch_id,
            "feature_ids": [],
            "fbaa_ids": [],
            "platform_ids": [],
            "complete": False,
        }

    complete = True
    feature_ids = set()
    fbaa_ids = set()
    if patch.fp_id is not None:
        found = False
        for fid in registry.features:
            if fid == patch.fp_id:
                found = True
        if found:
            feature_ids.add(patch.fp_id)
        else:
            complete = False
    if patch.fbaa_id is not None:
        fbaa = None
        for bid, record in registry.fbaas.items():
            if bid == patch.fbaa_id:
                fbaa = record
        if fbaa is None:
            complete = False
        else:
            fbaa_ids.add(fbaa.fbaa_id)
            for fp_id in fbaa.fp_ids:
                if fp_id in registry.features:
                    feature_ids.add(fp_id)
                else:
                    complete = False

    platform_ids = set()
    for fid in feature_ids:
        platform = registry.features[fid].platform_id
        found = False
        for pid in registry.products:
            if pid == platform:
                found = True
        if found:
            platform_ids.add(platform)
        else:
            complete = False

    return {
        "patch_id": patch.patch_id,
        "feature_ids": sorted(feature_ids),
        "fbaa_ids": sorted(fbaa_ids),
        "platform_ids": sorted(platform_ids),
        "complete": complete,
    }


def join_reverse(registry: Registry, feature_id: str) -> dict:
    """Nested-loop join from one feature up to patches, contributions, commits."""
    patch_ids = set()
    for patch in registry.patches.values():
        if patch.fp_id == feature_id:
            patch_ids.add(patch.patch_id)
        if patch.fbaa_id is not None:
            for fbaa in registry.fbaas.values():
                if fbaa.fbaa_id == patch.fbaa_id and feature_id in fbaa.fp_ids:
                    patch_ids.add(patch.patch_id)
    contribution_ids = set()
    for contribution in registry.contributions.values():
        for pid in patch_ids:
            if contribution.patch_id == pid:
                contribution_ids.add(contribution.contribution_id)
    commit_ids = set()
    for commit in registry.commits.values():
        for pid in patch_ids:
            if commit.patch_id == pid:
                commit_ids.add(commit.commit_id)
    return {
        "patches": sorted(patch_ids),
        "contributions": sorted(contribution_ids),
        "commits": sorted(commit_ids),
    }


def join_dangling_count(registry: Registry) -> list[tuple]:
    """Recount dangling references via straight scans."""
    out = []
    for feature in registry.features.values():
        if feature.platform_id not in registry.products:
            out.append(("features", feature.feature_id, "platform_id", feature.platform_id))
    for fbaa in registry.fbaas.values():
        for fp_id in fbaa.fp_ids:
            if fp_id not in registry.features:
                out.append(("fbaa", fbaa.fbaa_id, "fp_ids", fp_id))
    for patch in registry.patches.values():
        if patch.fp_id is not None and patch.fp_id not in registry.features:
            out.append(("patches", patch.patch_id, "fp_id", patch.fp_id))
        if patch.fbaa_id is not None and patch.fbaa_id not in registry.fbaas:
            out.append(("patches", patch.patch_id, "fbaa_id", patch.fbaa_id))
    for contribution in registry.contributions.values():
        if contribution.patch_id not in registry.patches:
            out.append(("contributions", contribution.contribution_id, "patch_id", contribution.patch_id))
    for commit in registry.commits.values():
        if commit.patch_id not in registry.patches:
            out.append(("commits", commit.commit_id, "patch_id", commit.patch_id))
    return sorted(out)


def per_feature_compliance(
    registry: Registry,
    policies: dict[str, str],
    window_days: int,
    as_of: datetime,
) -> dict[str, dict]:
    """Recompute compliance per feature with plain loops.

    ``policies`` maps feature_id to the effective policy name, resolved by the
    caller; features absent from it are skipped.
    """
    start = as_of - timedelta(days=window_days)
    out = {}
    for feature_id, policy in policies.items():
        patch_ids = join_reverse(registry, feature_id)["patches"]
        merged = 0
        for contribution in registry.contributions.values():
            if contribution.patch_id in patch_ids \
                    and contribution.state == ContributionState.ECOSYSTEM_MERGED \
                    and contribution.created_at is not None \
                    and start <= contribution.created_at <= as_of:
                merged += 1
        if policy == "DoNotContribute":
            compliant = merged == 0
        else:
            compliant = merged >= 1
        out[feature_id] = {
            "patches": len(patch_ids),
            "merged": merged,
            "compliant": compliant,
        }
    return out
