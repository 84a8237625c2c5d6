"""The five canonical counterfactual explainer families.

Given a query (theory, classifier, instance x with class c), each family
selects partial assignments E that "explain" why x was not classified
differently, in one of five senses:

* gNec — E is nonempty and appears in every instance of class c, so removing
  it is necessary for a class change no matter which instance you hold.
* sNec — E is part of x and every instance that differs from x exactly on
  E's features leaves the class; changing E (to anything) suffices to leave c
  and keeping it is necessary from x's standpoint.
* gSuf — every instance containing E has a class other than c.
* sSuf — a gSuf explanation sharing no literal with x (a genuine "switch
  these values" recipe).
* cSuf — E shares no literal with x and overwriting x with E changes the
  class (there exists a witness, rather than all extensions agreeing).

All membership tests are evaluated definitionally: the quantifiers over
instances run against the classifier's bit-parallel truth table, so these
functions serve as the reference oracles that the search procedures are
differential-tested against.  Enumeration emits the canonical order (size,
then assigned features, then values) so capped output keeps the smallest
explanations.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterator, Mapping, Optional

from .classifier import Query, class_view
from .theory import (
    PartialAssignment,
    enumerate_partial_assignments,
    novel_assignments,
    rank_of,
    subsets_of,
    substitute,
)

CORE_KINDS = ("gNec", "sNec", "gSuf", "sSuf", "cSuf")


@dataclass(frozen=True)
class ExplanationSet:
    """Ordered, duplicate-free explanations plus a truncation marker."""

    kind: str
    explanations: tuple[PartialAssignment, ...]
    truncated: bool = False

    @property
    def count(self) -> int:
        return len(self.explanations)

    def __iter__(self) -> Iterator[PartialAssignment]:
        return iter(self.explanations)

    def __len__(self) -> int:
        return len(self.explanations)

    def __contains__(self, e: PartialAssignment) -> bool:
        return e in self.explanations

    def assignments(self) -> frozenset[PartialAssignment]:
        return frozenset(self.explanations)

    def to_json_dict(self) -> dict:
        return {
            "kind": self.kind,
            "count": self.count,
            "truncated": self.truncated,
            "explanations": [e.to_dict() for e in self.explanations],
        }


def explanation_set_from_json(raw: Mapping, query: Query) -> ExplanationSet:
    """Parse the JSON form back over a known query (used for external tools)."""
    explanations = tuple(
        PartialAssignment.from_dict(query.theory, item)
        for item in raw["explanations"]
    )
    return ExplanationSet(
        kind=str(raw["kind"]),
        explanations=explanations,
        truncated=bool(raw.get("truncated", False)),
    )


def _collect(
    kind: str, candidates: Iterator[PartialAssignment], cap: Optional[int]
) -> ExplanationSet:
    if not cap:  # None or 0 both mean uncapped
        return ExplanationSet(kind, tuple(candidates))
    out: list[PartialAssignment] = []
    truncated = False
    for e in candidates:
        if len(out) == cap:
            truncated = True
            break
        out.append(e)
    return ExplanationSet(kind, tuple(out), truncated)


# -- membership (definitional oracles) ------------------------------------------


def _context(query: Query):
    view = class_view(query.classifier)
    return view, view.class_mask(query.label)


def is_member(kind: str, query: Query, e: PartialAssignment) -> bool:
    """Definitional membership: the quantifier itself, not a shortcut.

    Every universally quantified condition is evaluated over the full
    instance space via the classifier's truth-table masks.
    """
    if e.theory != query.theory:
        raise ValueError("explanation belongs to a different theory")
    x = query.instance
    if kind == "gNec":
        # nonempty, and every instance of x's class contains e
        if e.is_empty:
            return False
        view, cmask = _context(query)
        return cmask & ~view.mask_containing(e) == 0
    if kind == "sNec":
        # part of x, and every instance differing exactly on e leaves the class
        if not e.subset_of(x):
            return False
        view, cmask = _context(query)
        return view.mask_residual(x, e) & cmask == 0
    if kind == "gSuf":
        # no instance containing e keeps x's class (rules out the empty e)
        view, cmask = _context(query)
        return view.mask_containing(e) & cmask == 0
    if kind == "sSuf":
        if not e.disjoint_from(x):
            return False
        view, cmask = _context(query)
        return view.mask_containing(e) & cmask == 0
    if kind == "cSuf":
        # novel, and overwriting x with e changes the class
        if e.is_empty or not e.disjoint_from(x):
            return False
        return query.classifier.classify(substitute(x, e)) != query.label
    raise ValueError(f"unknown explainer kind {kind!r}")


# -- generation ------------------------------------------------------------------


def g_nec(query: Query, cap: Optional[int] = None) -> ExplanationSet:
    """Nonempty assignments contained in every instance of x's class.

    Those are exactly the nonempty subsets of the class core, so the core is
    computed once and its subsets enumerated.
    """
    from .classifier import core_literals

    core = core_literals(query.classifier, query.label, method="scan")
    return _collect("gNec", subsets_of(core, min_size=1), cap)


def s_nec(query: Query, cap: Optional[int] = None) -> ExplanationSet:
    """Parts of x whose every exact-change variant leaves x's class."""
    view, cmask = _context(query)
    x = query.instance
    candidates = (
        e
        for e in subsets_of(x, min_size=1)
        if view.mask_residual(x, e) & cmask == 0
    )
    return _collect("sNec", candidates, cap)


def g_suf(query: Query, cap: Optional[int] = None) -> ExplanationSet:
    """Assignments none of whose extensions keeps x's class."""
    view, cmask = _context(query)
    candidates = (
        e
        for e in enumerate_partial_assignments(query.theory)
        if not e.is_empty and view.mask_containing(e) & cmask == 0
    )
    return _collect("gSuf", candidates, cap)


def s_suf(query: Query, cap: Optional[int] = None) -> ExplanationSet:
    """gSuf explanations sharing no literal with x."""
    view, cmask = _context(query)
    candidates = (
        e
        for e in novel_assignments(query.instance, min_size=1)
        if view.mask_containing(e) & cmask == 0
    )
    return _collect("sSuf", candidates, cap)


def c_suf(query: Query, cap: Optional[int] = None) -> ExplanationSet:
    """Novel assignments whose overwrite changes the class.

    Equal to { y \\ x : y an instance with a different class } — computed in
    the overwrite form, which is duplicate-free and already canonically
    ordered.  Never empty: the classifier is surjective, so some instance has
    another class, and its difference from x qualifies.
    """
    view, cmask = _context(query)
    x = query.instance
    other = view.full_mask & ~cmask
    candidates = (
        e
        for e in novel_assignments(x, min_size=1)
        if view.rank_in(rank_of(substitute(x, e)), other)
    )
    return _collect("cSuf", candidates, cap)


_GENERATORS = {
    "gNec": g_nec,
    "sNec": s_nec,
    "gSuf": g_suf,
    "sSuf": s_suf,
    "cSuf": c_suf,
}


def generate(kind: str, query: Query, cap: Optional[int] = None) -> ExplanationSet:
    """Dispatch to the named core family."""
    try:
        fn = _GENERATORS[kind]
    except KeyError:
        raise ValueError(f"unknown explainer kind {kind!r}") from None
    return fn(query, cap)
