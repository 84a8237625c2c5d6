"""Minimality- and distance-based explainers derived from class flips.

A "flip" for query (κ, x) is a novel partial assignment E (no literal shared
with x) such that overwriting x with E changes the class — exactly the
credulous sufficient reasons.  The explainers here select flips that are
minimal in some sense:

* feat_min  — no flip uses a strictly smaller feature set ("featMin");
* card_min  — flips of minimum cardinality ("cardMin");
* dist_min  — flips whose counterfactual instance is closest to x under a
              distance measure ("distMin");
* dist_cap  — flips strictly under a distance threshold ("distCap").

Assignments whose extra literals merely repeat values of x are normalized
away before comparison: such literals are inert under overwriting, so each
family is computed over genuinely novel assignments and its outputs are
always credulous sufficient reasons.

Each family is also the set of maximal elements of a "faithful" ranking — a
preorder that strictly prefers every flip to every non-flip.  The weightings
and `faithful_max` below make that characterization executable, and
`is_faithful` checks the defining property of a ranking directly.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Iterable, Mapping, Optional

from .classifier import Query
from .explain import ExplanationSet, c_suf, is_member
from .theory import (
    PartialAssignment,
    enumerate_partial_assignments,
    substitute,
)

DistanceMeasure = Callable[[PartialAssignment, PartialAssignment], float]
Weighting = Callable[[PartialAssignment], float]

DERIVED_KINDS = ("featMin", "cardMin", "distMin", "distCap")


class NotAPreorder(ValueError):
    """The supplied ranking is not reflexive or not transitive."""


class DistanceError(ValueError):
    """Invalid distance specification (bad weights file and the like)."""


# -- distance measures -----------------------------------------------------------


def hamming(x: PartialAssignment, y: PartialAssignment) -> float:
    """Number of features on which the two instances differ."""
    return float(sum(1 for a, b in zip(x.values, y.values) if a != b))


def parse_weights(raw: Mapping, theory) -> dict[str, float]:
    """Validate a per-feature weight table; every feature must be covered."""
    if not isinstance(raw, Mapping):
        raise DistanceError("weights file must be a JSON object of feature: weight")
    weights: dict[str, float] = {}
    for name, value in raw.items():
        if name not in theory.features:
            raise DistanceError(f"weights name unknown feature {name!r}")
        try:
            w = float(value)
        except (TypeError, ValueError):
            raise DistanceError(f"weight for {name!r} is not a number") from None
        if not math.isfinite(w) or w < 0:
            raise DistanceError(f"weight for {name!r} must be finite and >= 0")
        weights[str(name)] = w
    missing = [f for f in theory.features if f not in weights]
    if missing:
        raise DistanceError(f"weights missing feature(s) {missing}")
    return weights


def weighted_distance(weights: Mapping[str, float], theory) -> DistanceMeasure:
    """Sum of per-feature weights over the differing features."""
    table = parse_weights(weights, theory)
    by_pos = tuple(table[f] for f in theory.features)

    def measure(x: PartialAssignment, y: PartialAssignment) -> float:
        return sum(w for w, a, b in zip(by_pos, x.values, y.values) if a != b)

    return measure


# -- flip selection --------------------------------------------------------------


def _flips(query: Query) -> tuple[PartialAssignment, ...]:
    return c_suf(query).explanations


def feat_min(query: Query, cap: Optional[int] = None) -> ExplanationSet:
    """Flips none of whose feature sets strictly contains another flip's."""
    flips = _flips(query)
    feature_sets = {e: frozenset(e.feature_positions()) for e in flips}
    distinct = set(feature_sets.values())
    minimal = {
        s for s in distinct if not any(t < s for t in distinct)
    }
    chosen = [e for e in flips if feature_sets[e] in minimal]
    return _capped("featMin", chosen, cap)


def card_min(query: Query, cap: Optional[int] = None) -> ExplanationSet:
    """Flips of minimum cardinality."""
    flips = _flips(query)
    best = min(e.size for e in flips)
    return _capped("cardMin", [e for e in flips if e.size == best], cap)


def dist_min(
    query: Query, distance: DistanceMeasure = hamming, cap: Optional[int] = None
) -> ExplanationSet:
    """Flips whose counterfactual sits closest to x; ties all returned."""
    x = query.instance
    flips = _flips(query)
    scored = [(distance(substitute(x, e), x), e) for e in flips]
    best = min(d for d, _ in scored)
    return _capped("distMin", [e for d, e in scored if d == best], cap)


def dist_cap(
    query: Query,
    distance: DistanceMeasure = hamming,
    tau: float = math.inf,
    cap: Optional[int] = None,
) -> ExplanationSet:
    """Flips whose counterfactual lies strictly closer than tau."""
    if tau < 0:
        raise DistanceError("threshold must be >= 0")
    x = query.instance
    chosen = [e for e in _flips(query) if distance(substitute(x, e), x) < tau]
    return _capped("distCap", chosen, cap)


def _capped(
    kind: str, chosen: Iterable[PartialAssignment], cap: Optional[int]
) -> ExplanationSet:
    out = list(chosen)  # already in canonical order (filtered from c_suf)
    if cap and len(out) > cap:
        return ExplanationSet(kind, tuple(out[:cap]), truncated=True)
    return ExplanationSet(kind, tuple(out))


def is_derived_member(
    kind: str,
    query: Query,
    e: PartialAssignment,
    distance: DistanceMeasure = hamming,
    tau: float = math.inf,
) -> bool:
    """Definitional membership for the derived families."""
    if kind == "featMin":
        if not is_member("cSuf", query, e):
            return False
        feats = set(e.feature_positions())
        return not any(
            set(other.feature_positions()) < feats for other in _flips(query)
        )
    if kind == "cardMin":
        return is_member("cSuf", query, e) and e.size == min(
            f.size for f in _flips(query)
        )
    if kind == "distMin":
        if not is_member("cSuf", query, e):
            return False
        x = query.instance
        mine = distance(substitute(x, e), x)
        return all(
            distance(substitute(x, f), x) >= mine for f in _flips(query)
        )
    if kind == "distCap":
        return (
            is_member("cSuf", query, e)
            and distance(substitute(query.instance, e), query.instance) < tau
        )
    raise ValueError(f"unknown derived kind {kind!r}")


# -- weightings and rankings -----------------------------------------------------


def indicator_weighting(query: Query) -> Weighting:
    """1 on flips, +inf elsewhere."""
    return lambda e: 1.0 if is_member("cSuf", query, e) else math.inf


def size_weighting(query: Query) -> Weighting:
    """|E| on flips, +inf elsewhere."""
    return lambda e: float(e.size) if is_member("cSuf", query, e) else math.inf


def distance_weighting(query: Query, distance: DistanceMeasure = hamming) -> Weighting:
    """Distance from x to the counterfactual on flips, +inf elsewhere."""
    x = query.instance

    def weight(e: PartialAssignment) -> float:
        if not is_member("cSuf", query, e):
            return math.inf
        return float(distance(substitute(x, e), x))

    return weight


@dataclass(frozen=True)
class Ranking:
    """A preorder: ``at_least(a, b)`` reads "a is at least as good as b"."""

    at_least: Callable[[PartialAssignment, PartialAssignment], bool]

    def strictly_better(self, a: PartialAssignment, b: PartialAssignment) -> bool:
        return self.at_least(a, b) and not self.at_least(b, a)


def ranking_from_weighting(w: Weighting, mode: str = "min-is-better") -> Ranking:
    """Turn a weighting into a preorder.

    ``min-is-better`` is the total preorder "weight(a) <= weight(b)".
    ``delta-feature-refined`` additionally requires nested feature sets on
    ties: a >= b iff weight(a) < weight(b), or the weights are equal and
    Feat(a) is a subset of Feat(b).
    """
    cache: dict[PartialAssignment, float] = {}

    def weight(e: PartialAssignment) -> float:
        if e not in cache:
            cache[e] = w(e)
        return cache[e]

    if mode == "min-is-better":
        return Ranking(lambda a, b: weight(a) <= weight(b))
    if mode == "delta-feature-refined":

        def at_least(a: PartialAssignment, b: PartialAssignment) -> bool:
            wa, wb = weight(a), weight(b)
            if wa < wb:
                return True
            return wa == wb and set(a.feature_positions()) <= set(
                b.feature_positions()
            )

        return Ranking(at_least)
    raise ValueError(f"unknown ranking mode {mode!r}")


def _check_preorder(ranking: Ranking, candidates: list[PartialAssignment]) -> None:
    for e in candidates:
        if not ranking.at_least(e, e):
            raise NotAPreorder(f"not reflexive at {e.render()}")
    for a in candidates:
        for b in candidates:
            if not ranking.at_least(a, b):
                continue
            for c in candidates:
                if ranking.at_least(b, c) and not ranking.at_least(a, c):
                    raise NotAPreorder(
                        "not transitive at "
                        f"{a.render()} / {b.render()} / {c.render()}"
                    )


def faithful_max(
    query: Query,
    ranking: Ranking,
    limit: Optional[int] = None,
    check_preorder: bool = False,
) -> ExplanationSet:
    """Maximal assignments under the ranking: nothing strictly beats them.

    Enumerates the whole assignment space (optionally capped at ``limit``
    candidates) and keeps the undominated ones by pairwise comparison.  With
    ``check_preorder`` the ranking is first verified reflexive and transitive
    over the enumerated candidates — quadratic/cubic, desk scale only.
    """
    candidates: list[PartialAssignment] = []
    truncated = False
    for e in enumerate_partial_assignments(query.theory):
        if limit and len(candidates) >= limit:
            truncated = True
            break
        candidates.append(e)
    if check_preorder:
        _check_preorder(ranking, candidates)
    maximal = tuple(
        e
        for e in candidates
        if not any(ranking.strictly_better(other, e) for other in candidates)
    )
    return ExplanationSet("max", maximal, truncated)


@dataclass(frozen=True)
class FaithfulnessVerdict:
    ok: bool
    counterexample: Optional[tuple[PartialAssignment, PartialAssignment]] = None


def is_faithful(
    make_ranking: Callable[[Query], Ranking], query: Query
) -> FaithfulnessVerdict:
    """Does the ranking strictly prefer every flip to every non-flip?"""
    ranking = make_ranking(query)
    flips: list[PartialAssignment] = []
    rest: list[PartialAssignment] = []
    for e in enumerate_partial_assignments(query.theory):
        (flips if is_member("cSuf", query, e) else rest).append(e)
    for good in flips:
        for bad in rest:
            if not ranking.strictly_better(good, bad):
                return FaithfulnessVerdict(False, (good, bad))
    return FaithfulnessVerdict(True)
