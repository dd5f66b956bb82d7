"""Graphical identifiability and logging recommendations.

Two criteria are checked. A set Z satisfies the back-door criterion for
(X, Y) when no node of Z descends from X and Z blocks every path into X that
reaches Y. A set Z satisfies the front-door criterion when Z intercepts all
directed X to Y paths, every back-door path from X into Z is blocked by the
empty set, and every back-door path from Z to Y is blocked by {X}.

Adjustment sets draw only from observable nodes: the point of the analysis is
deciding what to log, and latent variables cannot be logged. When the two
criteria both fail the effect may still be identifiable by other means; the
report says so rather than claiming impossibility.

Proxies: strict checks never accept a proxy in place of its latent principal.
With trust_proxies enabled, a proxy blocks whatever its principal would block
and the report carries a PartialControl warning, because a stand-in only
partially controls for the real variable.
"""

from __future__ import annotations

import enum
import itertools
from dataclasses import dataclass
from typing import Iterable

from .errors import EnumerationLimit, NotIdentifiable, OverlapError
from .graph import CausalGraph, Path, all_paths, is_blocked
from .limits import (
    DEFAULT_POOL_CAP,
    ENV_VAR,
    FRONTDOOR_MAX_SIZE,
    enumeration_cap,
)


class IdentificationStatus(enum.Enum):
    BACKDOOR = "IdentifiableBackdoor"
    FRONTDOOR = "IdentifiableFrontdoor"
    NOT_IDENTIFIABLE = "NotIdentifiableByCriteria"


@dataclass(frozen=True)
class IdentificationReport:
    """Outcome of the automatic back-door / front-door analysis."""

    treatment: str
    outcome: str
    backdoor_paths: tuple[Path, ...]
    minimal_backdoor_sets: tuple[frozenset[str], ...]
    frontdoor_sets: tuple[frozenset[str], ...]
    status: IdentificationStatus
    notes: tuple[str, ...]


@dataclass(frozen=True)
class LoggingRecommendation:
    """Which variables to record so the treatment effect stays identifiable."""

    must_log: frozenset[str]
    adjustment_set_used: frozenset[str]
    rationale: tuple[str, ...]


def backdoor_paths(g: CausalGraph, x: str, y: str) -> list[Path]:
    """All skeleton paths from `x` to `y` whose first edge points into `x`."""
    return [p for p in all_paths(g, x, y) if p.directions[0] == "backward"]


def _effective_blockers(g: CausalGraph, z: frozenset[str], trust_proxies: bool) -> frozenset[str]:
    if not trust_proxies:
        return z
    extra = {
        g.node(name).proxy_for
        for name in z
        if g.node(name).proxy_for is not None
    }
    return z | frozenset(extra)  # type: ignore[arg-type]


def satisfies_backdoor(
    g: CausalGraph,
    z: Iterable[str],
    x: str,
    y: str,
    trust_proxies: bool = False,
) -> bool:
    """Back-door criterion check for the candidate adjustment set `z`.

    Returns False (rather than raising) when `z` contains a latent node or a
    descendant of `x`; those sets are simply inadmissible.
    """
    zset = frozenset(z)
    for name in zset:
        g.require(name)
    g.require(x)
    g.require(y)
    if x in zset or y in zset:
        raise OverlapError("the adjustment set must exclude the treatment and outcome")
    if any(not g.kind(name).observable for name in zset):
        return False
    if zset & g._descendants[x]:
        return False
    blockers = _effective_blockers(g, zset, trust_proxies)
    return all(is_blocked(g, p, blockers) for p in backdoor_paths(g, x, y))


def minimal_backdoor_sets(
    g: CausalGraph,
    x: str,
    y: str,
    trust_proxies: bool = False,
) -> list[frozenset[str]]:
    """All inclusion-minimal observable adjustment sets, smallest first.

    Candidates are observable non-descendants of `x` (excluding the endpoints);
    subsets are enumerated by size, then lexicographically by declaration
    order. Supersets of an admissible set are skipped, which both prunes the
    search and guarantees inclusion-minimality of the output.
    """
    g.require(x)
    g.require(y)
    descendants_of_x = g._descendants[x]
    pool = [
        name
        for name in g.observable_names()
        if name not in (x, y) and name not in descendants_of_x
    ]
    cap = enumeration_cap(DEFAULT_POOL_CAP)
    if len(pool) > cap:
        raise EnumerationLimit(
            f"{len(pool)} adjustment candidates exceed the cap of {cap} "
            f"(override with {ENV_VAR})"
        )
    paths = backdoor_paths(g, x, y)
    found: list[frozenset[str]] = []
    for size in range(len(pool) + 1):
        for combo in itertools.combinations(pool, size):
            zset = frozenset(combo)
            if any(prior <= zset for prior in found):
                continue
            blockers = _effective_blockers(g, zset, trust_proxies)
            if all(is_blocked(g, p, blockers) for p in paths):
                found.append(zset)
    return found


def satisfies_frontdoor(g: CausalGraph, z: Iterable[str], x: str, y: str) -> bool:
    """Front-door criterion check for the candidate mediator set `z`."""
    zset = frozenset(z)
    for name in zset:
        g.require(name)
    g.require(x)
    g.require(y)
    if x in zset or y in zset:
        raise OverlapError("the mediator set must exclude the treatment and outcome")
    if any(not g.kind(name).observable for name in zset):
        return False
    # Z intercepts all directed paths from X to Y
    for p in all_paths(g, x, y, directed=True):
        if not zset & set(p.nodes[1:-1]):
            return False
    # no open back-door path from X into Z
    for member in g.sort_names(zset):
        for p in backdoor_paths(g, x, member):
            if not is_blocked(g, p, frozenset()):
                return False
    # every back-door path from Z to Y is blocked by {X}
    for member in g.sort_names(zset):
        for p in backdoor_paths(g, member, y):
            if not is_blocked(g, p, frozenset({x})):
                return False
    return True


def _frontdoor_sets(g: CausalGraph, x: str, y: str) -> list[frozenset[str]]:
    """Inclusion-minimal front-door sets among observable directed-path nodes."""
    candidate_pool: list[str] = []
    for p in all_paths(g, x, y, directed=True):
        for name in p.nodes[1:-1]:
            if g.kind(name).observable and name not in candidate_pool:
                candidate_pool.append(name)
    candidate_pool = list(g.sort_names(candidate_pool))
    found: list[frozenset[str]] = []
    for size in range(min(FRONTDOOR_MAX_SIZE, len(candidate_pool)) + 1):
        for combo in itertools.combinations(candidate_pool, size):
            zset = frozenset(combo)
            if any(prior <= zset for prior in found):
                continue
            if satisfies_frontdoor(g, zset, x, y):
                found.append(zset)
    return found


def identify(
    g: CausalGraph, x: str, y: str, trust_proxies: bool = False
) -> IdentificationReport:
    """Run both criteria and report how the effect of `x` on `y` is identified.

    Status is IdentifiableBackdoor when a back-door adjustment set exists,
    else IdentifiableFrontdoor when a front-door set exists, else
    NotIdentifiableByCriteria.
    """
    g.require(x)
    g.require(y)
    if x == y:
        raise OverlapError("treatment and outcome must differ")
    bpaths = tuple(backdoor_paths(g, x, y))
    backdoor_sets = tuple(minimal_backdoor_sets(g, x, y, trust_proxies))
    frontdoor_sets = tuple(_frontdoor_sets(g, x, y))

    notes = [f"{len(bpaths)} back-door path(s) from {x} to {y}"]
    if backdoor_sets:
        status = IdentificationStatus.BACKDOOR
    elif frontdoor_sets:
        status = IdentificationStatus.FRONTDOOR
    else:
        status = IdentificationStatus.NOT_IDENTIFIABLE
        notes.append(
            "back-door and front-door criteria both fail; the effect may "
            "still be identifiable by methods outside these criteria"
        )
    if trust_proxies:
        proxies_used = sorted(
            {
                name
                for zset in backdoor_sets
                for name in zset
                if g.node(name).proxy_for is not None
            },
            key=g.index,
        )
        for name in proxies_used:
            notes.append(
                f"PartialControl: {name} stands in for latent "
                f"{g.node(name).proxy_for}; adjusting through a proxy only "
                "partially controls for the real variable"
            )
    return IdentificationReport(
        treatment=x,
        outcome=y,
        backdoor_paths=bpaths,
        minimal_backdoor_sets=backdoor_sets,
        frontdoor_sets=frontdoor_sets,
        status=status,
        notes=tuple(notes),
    )


def confounded(g: CausalGraph, x: str, y: str) -> bool:
    """True when some back-door path from `x` to `y` is open given nothing."""
    g.require(x)
    g.require(y)
    if x == y:
        raise OverlapError("treatment and outcome must differ")
    return any(not is_blocked(g, p, frozenset()) for p in backdoor_paths(g, x, y))


def _directed_path_nodes(g: CausalGraph, x: str, y: str) -> set[str]:
    nodes: set[str] = set()
    for p in all_paths(g, x, y, directed=True):
        nodes.update(p.nodes)
    return nodes


def logging_set(
    g: CausalGraph,
    x: str,
    y: str,
    allowed: Iterable[str] | None = None,
    trust_proxies: bool = False,
) -> LoggingRecommendation:
    """Recommend the variables to log for an identifiable `x` to `y` effect.

    Picks the smallest minimal back-door set (ties broken lexicographically by
    declaration order), restricted to `allowed` when given. The log set is the
    treatment, the outcome, every observable node on a directed path between
    them, and the chosen adjustment set. Raises NotIdentifiable when no
    admissible adjustment set exists.
    """
    g.require(x)
    g.require(y)
    if x == y:
        raise OverlapError("treatment and outcome must differ")
    for name in (x, y):
        if not g.kind(name).observable:
            raise NotIdentifiable(
                f"{name} is latent and can be neither observed nor logged"
            )
    allowed_set: frozenset[str] | None = None
    if allowed is not None:
        allowed_set = frozenset(allowed)
        for name in allowed_set:
            g.require(name)

    candidates = minimal_backdoor_sets(g, x, y, trust_proxies)
    if allowed_set is not None:
        candidates = [zset for zset in candidates if zset <= allowed_set]
    if not candidates:
        detail = f"no admissible back-door adjustment set for ({x}, {y})"
        if allowed_set is not None:
            detail += " within {" + ", ".join(g.sort_names(allowed_set)) + "}"
        raise NotIdentifiable(detail)
    chosen = candidates[0]  # enumeration order is already size then lexicographic

    on_path = {
        name
        for name in _directed_path_nodes(g, x, y)
        if g.kind(name).observable
    }
    must_log = frozenset({x, y} | on_path | chosen)

    bpaths = backdoor_paths(g, x, y)
    collider_nodes: set[str] = set()
    for p in bpaths:
        for i in range(1, len(p.nodes) - 1):
            if p.directions[i - 1] == "forward" and p.directions[i] == "backward":
                collider_nodes.add(p.nodes[i])

    descendants_of_x = g._descendants[x]
    rationale: list[str] = []
    for name in g.names:
        if name == x:
            rationale.append(f"{name}: the treatment")
        elif name == y:
            rationale.append(f"{name}: the outcome")
        elif name in chosen:
            rationale.append(f"{name}: member of the chosen adjustment set")
        elif name in on_path:
            rationale.append(f"{name}: lies on a directed path from {x} to {y}")
        elif not g.kind(name).observable:
            rationale.append(f"{name}: latent, cannot be observed or logged")
        elif name in collider_nodes:
            rationale.append(
                f"{name}: collider on a back-door path; leaving it unlogged "
                "keeps that path blocked"
            )
        elif name in descendants_of_x:
            rationale.append(
                f"{name}: descendant of the treatment, inadmissible for adjustment"
            )
        else:
            rationale.append(
                f"{name}: not needed, every back-door path stays blocked without it"
            )
    return LoggingRecommendation(
        must_log=must_log,
        adjustment_set_used=chosen,
        rationale=tuple(rationale),
    )
