"""Axiom checking, explainer auditing, and (in)compatibility witnesses.

Nine executable axioms score an explainer over a finite query suite.  A
verdict is either "no-violation-found" — over that suite, never a proof — or
"violated" with a replayable counterexample (query, offending explanation,
witness instance).  ``audit`` produces the full per-axiom profile and, for
the built-in explainers, compares it against the expected pattern.

``classify_family`` detects "always a subset of <family>" tags two ways —
direct set inclusion against the enumeration oracles, and the axiom
combinations that characterize each family — so the two routes can be
cross-validated.

``impossibility_witness`` returns concrete constructions on which certain
axiom sets cannot be satisfied together by any explanation set, plus a
machine check of the conflict; ``compatibility_witnesses`` are explainers
realizing specific axiom subsets.
"""

from __future__ import annotations

import json
import subprocess
from dataclasses import dataclass, field
from typing import Callable, Mapping, Optional, Sequence

from .bundles import load_bundle
from .classifier import (
    Query,
    TableClassifier,
    class_view,
    core_literals,
)
from .derived import card_min, dist_min, feat_min
from .explain import (
    ExplanationSet,
    c_suf,
    explanation_set_from_json,
    g_nec,
    g_suf,
    s_nec,
    s_suf,
)
from .theory import (
    PartialAssignment,
    Theory,
    enumerate_instances,
    enumerate_partial_assignments,
    instance_of_rank,
    novel_assignments,
    subsets_of,
    substitute,
    validate_theory,
)

AXIOMS = (
    "Success",
    "NonTriviality",
    "Equivalence",
    "Feasibility",
    "Coreness",
    "ScepticalValidity",
    "Novelty",
    "StrongValidity",
    "WeakValidity",
)

Explainer = Callable[[Query], ExplanationSet]


class ExternalExplainerFailure(RuntimeError):
    """The external explainer broke the line-JSON protocol."""


# -- verdicts --------------------------------------------------------------------


@dataclass(frozen=True)
class Counterexample:
    """A replayable axiom violation."""

    query: Query
    explanation: Optional[PartialAssignment] = None
    witness: Optional[PartialAssignment] = None
    other_query: Optional[Query] = None
    detail: str = ""

    def queries(self) -> tuple[Query, ...]:
        if self.other_query is not None:
            return (self.query, self.other_query)
        return (self.query,)

    def to_json_dict(self) -> dict:
        out: dict = {
            "query": self.query.to_json_dict(),
            "detail": self.detail,
        }
        out["explanation"] = (
            None if self.explanation is None else self.explanation.to_dict()
        )
        out["witness"] = None if self.witness is None else self.witness.to_dict()
        if self.other_query is not None:
            out["other_instance"] = self.other_query.instance.to_dict()
        return out


@dataclass(frozen=True)
class Verdict:
    axiom: str
    violated: bool
    counterexample: Optional[Counterexample] = None

    @property
    def ok(self) -> bool:
        return not self.violated

    def summary(self) -> str:
        return "violated" if self.violated else "no-violation-found"

    def to_json_dict(self) -> dict:
        out: dict = {"axiom": self.axiom, "verdict": self.summary()}
        if self.counterexample is not None:
            out["counterexample"] = self.counterexample.to_json_dict()
        return out


# -- axiom checks ----------------------------------------------------------------


def _outputs(
    explainer: Explainer, suite: Sequence[Query]
) -> dict[Query, ExplanationSet]:
    return {q: explainer(q) for q in suite}


def _core_of(query: Query) -> PartialAssignment:
    return core_literals(query.classifier, query.label)


def _check_success(outputs) -> Optional[Counterexample]:
    for q, out in outputs.items():
        if out.count == 0:
            return Counterexample(q, detail="empty explanation set")
    return None


def _check_non_triviality(outputs) -> Optional[Counterexample]:
    for q, out in outputs.items():
        for e in out:
            if e.is_empty:
                return Counterexample(q, e, detail="empty assignment offered")
    return None


def _equivalence_key(q: Query) -> tuple:
    # identify the classification function extensionally, not by object
    view = class_view(q.classifier)
    table = tuple(view.class_mask(c) for c in q.theory.classes)
    return (q.theory, table, q.label)


def _check_equivalence(outputs) -> Optional[Counterexample]:
    # pairs must share the classification function and the class
    groups: dict[tuple, list[Query]] = {}
    for q in outputs:
        groups.setdefault(_equivalence_key(q), []).append(q)
    for members in groups.values():
        for i, q1 in enumerate(members):
            for q2 in members[i + 1 :]:
                s1, s2 = outputs[q1].assignments(), outputs[q2].assignments()
                if s1 != s2:
                    differing = sorted(s1 ^ s2, key=lambda e: e.sort_key())[0]
                    return Counterexample(
                        q1,
                        differing,
                        other_query=q2,
                        detail="same class, different explanation sets",
                    )
    return None


def _check_feasibility(outputs) -> Optional[Counterexample]:
    for q, out in outputs.items():
        for e in out:
            if not e.subset_of(q.instance):
                return Counterexample(q, e, detail="explanation not part of x")
    return None


def _check_coreness(outputs) -> Optional[Counterexample]:
    for q, out in outputs.items():
        core = None
        for e in out:
            if core is None:
                core = _core_of(q)
            if not e.subset_of(core):
                return Counterexample(
                    q, e, detail=f"not inside the class core ({core.render()})"
                )
    return None


def _check_sceptical_validity(outputs) -> Optional[Counterexample]:
    # vacuous for explanations that are not part of x (empty residual)
    for q, out in outputs.items():
        view = class_view(q.classifier)
        cmask = view.class_mask(q.label)
        for e in out:
            bad = view.mask_residual(q.instance, e) & cmask
            if bad:
                witness = instance_of_rank(q.theory, _lowest_bit(bad))
                return Counterexample(
                    q, e, witness, detail="an exact-change variant keeps the class"
                )
    return None


def _check_novelty(outputs) -> Optional[Counterexample]:
    for q, out in outputs.items():
        for e in out:
            if not e.disjoint_from(q.instance):
                return Counterexample(q, e, detail="shares a literal with x")
    return None


def _check_strong_validity(outputs) -> Optional[Counterexample]:
    for q, out in outputs.items():
        view = class_view(q.classifier)
        cmask = view.class_mask(q.label)
        for e in out:
            bad = view.mask_containing(e) & cmask
            if bad:
                witness = instance_of_rank(q.theory, _lowest_bit(bad))
                return Counterexample(
                    q, e, witness, detail="an extension keeps the class"
                )
    return None


def _check_weak_validity(outputs) -> Optional[Counterexample]:
    for q, out in outputs.items():
        for e in out:
            y = substitute(q.instance, e)
            if q.classifier.classify(y) == q.label:
                return Counterexample(
                    q, e, y, detail="overwriting x does not change the class"
                )
    return None


def _lowest_bit(mask: int) -> int:
    return (mask & -mask).bit_length() - 1


_CHECKS = {
    "Success": _check_success,
    "NonTriviality": _check_non_triviality,
    "Equivalence": _check_equivalence,
    "Feasibility": _check_feasibility,
    "Coreness": _check_coreness,
    "ScepticalValidity": _check_sceptical_validity,
    "Novelty": _check_novelty,
    "StrongValidity": _check_strong_validity,
    "WeakValidity": _check_weak_validity,
}


def check_axiom(
    axiom: str,
    explainer: Explainer,
    suite: Sequence[Query],
    outputs: Optional[Mapping[Query, ExplanationSet]] = None,
) -> Verdict:
    """Evaluate one axiom over the suite; first violation wins (suite order)."""
    if axiom not in _CHECKS:
        raise ValueError(f"unknown axiom {axiom!r}")
    if outputs is None:
        outputs = _outputs(explainer, suite)
    cx = _CHECKS[axiom](outputs)
    return Verdict(axiom, cx is not None, cx)


# -- profiles --------------------------------------------------------------------

# Expected satisfaction pattern for the built-in explainer families:
# True = no violation expected on any suite, False = the suite must
# expose a violation.
EXPECTED_PROFILES: dict[str, dict[str, bool]] = {
    "gNec": {
        "Success": False,
        "NonTriviality": True,
        "Equivalence": True,
        "Feasibility": True,
        "Coreness": True,
        "ScepticalValidity": True,
        "Novelty": False,
        "StrongValidity": False,
        "WeakValidity": False,
    },
    "sNec": {
        "Success": False,
        "NonTriviality": True,
        "Equivalence": False,
        "Feasibility": True,
        "Coreness": False,
        "ScepticalValidity": True,
        "Novelty": False,
        "StrongValidity": False,
        "WeakValidity": False,
    },
    "gSuf": {
        "Success": True,
        "NonTriviality": True,
        "Equivalence": True,
        "Feasibility": False,
        "Coreness": False,
        "ScepticalValidity": True,
        "Novelty": False,
        "StrongValidity": True,
        "WeakValidity": True,
    },
    "sSuf": {
        "Success": False,
        "NonTriviality": True,
        "Equivalence": False,
        "Feasibility": False,
        "Coreness": False,
        "ScepticalValidity": True,
        "Novelty": True,
        "StrongValidity": True,
        "WeakValidity": True,
    },
    "cSuf": {
        "Success": True,
        "NonTriviality": True,
        "Equivalence": False,
        "Feasibility": False,
        "Coreness": False,
        "ScepticalValidity": True,
        "Novelty": True,
        "StrongValidity": False,
        "WeakValidity": True,
    },
    "constant-empty": {a: (a != "Success") for a in AXIOMS},
    "constant-blank": {
        a: a in ("Success", "Equivalence", "Feasibility", "Coreness", "Novelty")
        for a in AXIOMS
    },
    "old-values": {
        a: a in ("Success", "NonTriviality", "Feasibility") for a in AXIOMS
    },
}

# If the antecedent axioms show no violation over a suite, the consequent
# cannot show one: the checks share their primitive predicates, so these
# hold for any explainer on any suite.
PROFILE_IMPLICATIONS: tuple[tuple[tuple[str, ...], str], ...] = (
    (("Coreness",), "Feasibility"),
    (("Coreness", "NonTriviality"), "ScepticalValidity"),
    (("ScepticalValidity",), "NonTriviality"),
    (("WeakValidity",), "NonTriviality"),
    (("StrongValidity",), "WeakValidity"),
    (("Novelty", "NonTriviality"), "ScepticalValidity"),
)


def profile_inconsistencies(profile: "AxiomProfile") -> tuple[str, ...]:
    """Implication chains the profile breaks (must always be empty)."""
    pattern = profile.pattern()
    bad = []
    for antecedents, consequent in PROFILE_IMPLICATIONS:
        if all(pattern[a] for a in antecedents) and not pattern[consequent]:
            bad.append(" & ".join(antecedents) + " => " + consequent)
    return tuple(bad)


@dataclass(frozen=True)
class AxiomProfile:
    explainer: str
    suite: str
    verdicts: tuple[Verdict, ...]  # in AXIOMS order
    expected: Optional[Mapping[str, bool]] = None

    def verdict(self, axiom: str) -> Verdict:
        return self.verdicts[AXIOMS.index(axiom)]

    def pattern(self) -> dict[str, bool]:
        return {v.axiom: v.ok for v in self.verdicts}

    def mismatches(self) -> tuple[str, ...]:
        if self.expected is None:
            return ()
        return tuple(
            a for a in AXIOMS if self.pattern()[a] != self.expected[a]
        )

    def to_json_dict(self) -> dict:
        out: dict = {
            "explainer": self.explainer,
            "suite": self.suite,
            "verdicts": [v.to_json_dict() for v in self.verdicts],
        }
        if self.expected is not None:
            out["expected"] = {a: self.expected[a] for a in AXIOMS}
            out["mismatches"] = list(self.mismatches())
        return out


def audit(
    explainer: Explainer,
    suite: Sequence[Query],
    name: str = "custom",
    suite_name: str = "custom",
    expected: Optional[Mapping[str, bool]] = None,
) -> AxiomProfile:
    """Run all nine axiom checks; one explainer invocation per query."""
    outputs = _outputs(explainer, suite)
    verdicts = tuple(
        check_axiom(a, explainer, suite, outputs) for a in AXIOMS
    )
    if expected is None:
        expected = EXPECTED_PROFILES.get(name)
    return AxiomProfile(name, suite_name, verdicts, expected)


# -- family classification --------------------------------------------------------

_FAMILY_ORACLES = {
    "gNec": g_nec,
    "sNec": s_nec,
    "gSuf": g_suf,
    "sSuf": s_suf,
    "cSuf": c_suf,
}

# Axiom combinations equivalent to "always a subset of <family>".
_FAMILY_AXIOMS = {
    "gNec": ("Coreness", "NonTriviality"),
    "sNec": ("Feasibility", "ScepticalValidity"),
    "gSuf": ("StrongValidity",),
    "sSuf": ("Novelty", "StrongValidity"),
    "cSuf": ("Novelty", "WeakValidity"),
}


@dataclass(frozen=True)
class FamilyReport:
    inclusion_tags: frozenset[str]
    axiom_tags: frozenset[str]

    @property
    def consistent(self) -> bool:
        return self.inclusion_tags == self.axiom_tags

    def to_json_dict(self) -> dict:
        return {
            "inclusion_tags": sorted(self.inclusion_tags),
            "axiom_tags": sorted(self.axiom_tags),
            "consistent": self.consistent,
        }


def classify_family(explainer: Explainer, suite: Sequence[Query]) -> FamilyReport:
    """Which families contain every output of this explainer, both ways."""
    outputs = _outputs(explainer, suite)
    inclusion = set()
    for family, oracle in _FAMILY_ORACLES.items():
        if all(
            outputs[q].assignments() <= oracle(q).assignments() for q in suite
        ):
            inclusion.add(family)
    pattern = {
        a: check_axiom(a, explainer, suite, outputs).ok for a in AXIOMS
    }
    axiom_side = {
        family
        for family, needed in _FAMILY_AXIOMS.items()
        if all(pattern[a] for a in needed)
    }
    return FamilyReport(frozenset(inclusion), frozenset(axiom_side))


# -- impossibility witnesses -------------------------------------------------------

IMPOSSIBILITY_SETS: dict[str, tuple[str, ...]] = {
    "I1": ("Success", "NonTriviality", "Coreness"),
    "I2": ("Success", "Feasibility", "ScepticalValidity"),
    "I3": ("Success", "Novelty", "StrongValidity"),
    "I4": ("Success", "NonTriviality", "Feasibility", "Novelty"),
    "I5": ("Success", "Feasibility", "WeakValidity"),
    "I6": ("Success", "NonTriviality", "Equivalence", "Feasibility"),
    "I7": ("Success", "NonTriviality", "Equivalence", "Novelty"),
}


@dataclass(frozen=True)
class ImpossibilityWitness:
    set_id: str
    axioms: tuple[str, ...]
    query: Query
    narrative: str
    other_query: Optional[Query] = None

    def to_json_dict(self) -> dict:
        out: dict = {
            "id": self.set_id,
            "axioms": list(self.axioms),
            "query": self.query.to_json_dict(),
            "narrative": self.narrative,
        }
        if self.other_query is not None:
            out["other_instance"] = self.other_query.instance.to_dict()
        return out


def _two_feature_theory() -> Theory:
    return validate_theory(
        {
            "features": [
                {"name": "a", "domain": ["0", "1"]},
                {"name": "b", "domain": ["0", "1", "2"]},
            ],
            "classes": ["c0", "c1"],
        }
    )


def _lone_positive_query(instance_values: tuple[int, int]) -> Query:
    """Theory a:{0,1}, b:{0,1,2}; only (a=0,b=1) is class c1."""
    theory = _two_feature_theory()
    target = PartialAssignment(theory, (0, 1))
    rows = []
    for y in enumerate_instances(theory):
        rows.append((y.to_dict(), "c1" if y == target else "c0"))
    classifier = TableClassifier.from_rows(theory, rows)
    x = PartialAssignment(theory, instance_values)
    return Query(theory, classifier, x)


def _parity_pair() -> tuple[Query, Query]:
    """Two boolean features, class 'same' iff the values agree; the two
    'same' instances share no literal."""
    theory = validate_theory(
        {
            "features": [
                {"name": "f1", "domain": ["0", "1"]},
                {"name": "f2", "domain": ["0", "1"]},
            ],
            "classes": ["same", "diff"],
        }
    )
    rows = [
        ({"f1": "0", "f2": "0"}, "same"),
        ({"f1": "0", "f2": "1"}, "diff"),
        ({"f1": "1", "f2": "0"}, "diff"),
        ({"f1": "1", "f2": "1"}, "same"),
    ]
    classifier = TableClassifier.from_rows(theory, rows)
    q1 = Query(theory, classifier, PartialAssignment(theory, (0, 0)))
    q2 = Query(theory, classifier, PartialAssignment(theory, (1, 1)))
    return q1, q2


def impossibility_witness(set_id: str) -> ImpossibilityWitness:
    set_id = set_id.upper()
    if set_id not in IMPOSSIBILITY_SETS:
        raise KeyError(f"unknown impossibility set {set_id!r} (I1..I7)")
    axioms = IMPOSSIBILITY_SETS[set_id]
    if set_id == "I1":
        query = load_bundle("vacation").query(2)
        narrative = (
            "The class of this instance has an empty core, so a nonempty "
            "core-contained explanation cannot exist: Non-Triviality plus "
            "Coreness force the empty set, against Success."
        )
        return ImpossibilityWitness(set_id, axioms, query, narrative)
    if set_id == "I2":
        query = _lone_positive_query((0, 0))
        narrative = (
            "Every part of x has an exact-change variant that keeps the "
            "class, so nothing feasible passes the sceptical test: "
            "Feasibility plus Sceptical Validity force the empty set, "
            "against Success."
        )
        return ImpossibilityWitness(set_id, axioms, query, narrative)
    if set_id == "I3":
        query = _lone_positive_query((1, 1))
        narrative = (
            "The only assignment all of whose extensions change the class "
            "shares a literal with x, so nothing novel passes the strong "
            "test: Novelty plus Strong Validity force the empty set, "
            "against Success."
        )
        return ImpossibilityWitness(set_id, axioms, query, narrative)
    if set_id == "I4":
        query = load_bundle("vacation").query(1)
        narrative = (
            "An explanation both part of x (Feasibility) and sharing "
            "nothing with x (Novelty) must be empty, against "
            "Non-Triviality — so the set is empty, against Success."
        )
        return ImpossibilityWitness(set_id, axioms, query, narrative)
    if set_id == "I5":
        query = load_bundle("vacation").query(1)
        narrative = (
            "Overwriting x with a part of itself changes nothing, so "
            "Feasibility makes Weak Validity unsatisfiable — the set is "
            "empty, against Success."
        )
        return ImpossibilityWitness(set_id, axioms, query, narrative)
    q1, q2 = _parity_pair()
    if set_id == "I6":
        narrative = (
            "Two same-class instances share no literal, and Equivalence "
            "forces them to share explanations; Feasibility then bounds "
            "every explanation by both instances, i.e. by nothing — "
            "against Non-Triviality and Success."
        )
    else:
        narrative = (
            "Two same-class instances jointly use every feature value, and "
            "Equivalence forces shared explanations; Novelty then forbids "
            "every literal — against Non-Triviality and Success."
        )
    return ImpossibilityWitness(set_id, axioms, q1, narrative, other_query=q2)


def check_impossibility(witness: ImpossibilityWitness) -> tuple[bool, str]:
    """Machine-verify the conflict on the witness construction.

    Returns (confirmed, trace).  Confirmed means: on this query (pair), no
    explanation set whatsoever can satisfy all the named axioms.
    """
    q = witness.query
    x = q.instance
    view = class_view(q.classifier)
    cmask = view.class_mask(q.label)
    set_id = witness.set_id

    if set_id == "I1":
        core = core_literals(q.classifier, q.label)
        if not core.is_empty:
            return False, f"core is {core.render()}, not empty"
        return True, (
            "core of the class is empty; NonTriviality+Coreness admit no "
            "explanation, so Success must fail"
        )

    if set_id == "I2":
        for e in subsets_of(x, min_size=0):
            bad = view.mask_residual(x, e) & cmask
            if not bad:
                return False, f"{e.render()} passes the sceptical test"
        return True, (
            "every part of x (all "
            f"{2 ** x.size} subsets) has an exact-change variant keeping "
            "the class; Feasibility+ScepticalValidity admit no "
            "explanation, so Success must fail"
        )

    if set_id == "I3":
        for e in novel_assignments(x, min_size=0):
            if view.mask_containing(e) & cmask == 0:
                return False, f"{e.render()} passes the strong test"
        return True, (
            "every assignment sharing nothing with x has an extension "
            "keeping the class; Novelty+StrongValidity admit no "
            "explanation, so Success must fail"
        )

    if set_id == "I4":
        for e in enumerate_partial_assignments(q.theory):
            if not e.is_empty and e.subset_of(x) and e.disjoint_from(x):
                return False, f"{e.render()} is nonempty, feasible and novel"
        return True, (
            "no nonempty assignment is both part of x and disjoint from "
            "x; Feasibility+Novelty+NonTriviality admit no explanation, "
            "so Success must fail"
        )

    if set_id == "I5":
        for e in subsets_of(x, min_size=0):
            if q.classifier.classify(substitute(x, e)) != q.label:
                return False, f"{e.render()} changes the class"
        return True, (
            "overwriting x with any of its own parts keeps the class; "
            "Feasibility+WeakValidity admit no explanation, so Success "
            "must fail"
        )

    other = witness.other_query
    assert other is not None
    y = other.instance
    if q.label != other.label:
        return False, "the two instances are not same-class"

    if set_id == "I6":
        if not x.disjoint_from(y):
            return False, "the two instances share a literal"
        for e in enumerate_partial_assignments(q.theory):
            if not e.is_empty and e.subset_of(x) and e.subset_of(y):
                return False, f"{e.render()} is feasible for both instances"
        return True, (
            "same-class instances sharing no literal: Equivalence makes "
            "the sets equal, Feasibility bounds members by both "
            "instances, leaving only the empty assignment, against "
            "NonTriviality and Success"
        )

    if set_id == "I7":
        for e in enumerate_partial_assignments(q.theory):
            if (
                not e.is_empty
                and e.disjoint_from(x)
                and e.disjoint_from(y)
            ):
                return False, f"{e.render()} is novel for both instances"
        return True, (
            "the two same-class instances jointly use every feature "
            "value: Equivalence makes the sets equal, Novelty forbids "
            "every literal, leaving only the empty assignment, against "
            "NonTriviality and Success"
        )

    raise ValueError(f"unknown impossibility set {set_id!r}")


# -- compatibility witnesses -------------------------------------------------------


def constant_empty(query: Query) -> ExplanationSet:
    """Offers nothing, ever."""
    return ExplanationSet("constant-empty", ())


def constant_blank(query: Query) -> ExplanationSet:
    """Offers exactly the empty assignment, ever."""
    return ExplanationSet("constant-blank", (PartialAssignment.empty(query.theory),))


def old_values(query: Query) -> ExplanationSet:
    """The parts of x overwritten by each differently-classified instance."""
    view = class_view(query.classifier)
    x = query.instance
    others = view.full_mask & ~view.class_mask(query.label)
    found = set()
    rank = 0
    while others:
        if others & 1:
            found.add(x.difference(instance_of_rank(query.theory, rank)))
        others >>= 1
        rank += 1
    ordered = tuple(sorted(found, key=lambda e: e.sort_key()))
    return ExplanationSet("old-values", ordered)


@dataclass(frozen=True)
class CompatibilityWitness:
    name: str
    explainer: Explainer = field(compare=False)
    satisfied: frozenset[str]  # expected no-violation set

    def expected_profile(self) -> dict[str, bool]:
        return {a: a in self.satisfied for a in AXIOMS}


def compatibility_witnesses() -> tuple[CompatibilityWitness, ...]:
    def expected(name: str) -> frozenset[str]:
        return frozenset(a for a in AXIOMS if EXPECTED_PROFILES[name][a])

    return (
        CompatibilityWitness("constant-empty", constant_empty, expected("constant-empty")),
        CompatibilityWitness("constant-blank", constant_blank, expected("constant-blank")),
        CompatibilityWitness("old-values", old_values, expected("old-values")),
        CompatibilityWitness("gSuf", g_suf, expected("gSuf")),
        CompatibilityWitness("cSuf", c_suf, expected("cSuf")),
    )


# -- the built-in suite ------------------------------------------------------------


EXPLAINERS: dict[str, Explainer] = {
    "gNec": g_nec,
    "sNec": s_nec,
    "gSuf": g_suf,
    "sSuf": s_suf,
    "cSuf": c_suf,
    "featMin": feat_min,
    "cardMin": card_min,
    "distMin": dist_min,
    "constant-empty": constant_empty,
    "constant-blank": constant_blank,
    "old-values": old_values,
}


@dataclass(frozen=True)
class Suite:
    name: str
    queries: tuple[Query, ...]


def _all_two_feature_tables() -> list[Query]:
    """Every surjective 2-class table over 2 features with domains in {2,3}."""
    out: list[Query] = []
    for sizes in ((2, 2), (2, 3), (3, 2), (3, 3)):
        theory = validate_theory(
            {
                "features": [
                    {"name": "f1", "domain": [str(v) for v in range(sizes[0])]},
                    {"name": "f2", "domain": [str(v) for v in range(sizes[1])]},
                ],
                "classes": ["c0", "c1"],
            }
        )
        n = theory.instance_count()
        for pattern in range(1, (1 << n) - 1):  # skip the two constant tables
            table = ["c1" if (pattern >> r) & 1 else "c0" for r in range(n)]
            classifier = TableClassifier(theory, table)
            for r in range(n):
                out.append(
                    Query(theory, classifier, instance_of_rank(theory, r))
                )
    return out


def generated_probe_queries() -> list[Query]:
    """The exhaustive 2-feature probe regime (648 classifiers)."""
    return _all_two_feature_tables()


def builtin_suite(budget: Optional[int] = 1500, seed: int = 0) -> Suite:
    """Fixture queries + witness constructions + sampled generated probes.

    Fixture and witness queries are always kept; only the generated probes
    are down-sampled when they exceed the budget.
    """
    import random

    queries: list[Query] = []
    queries.extend(load_bundle("vacation").queries())
    queries.extend(load_bundle("bitcount").queries())
    queries.extend(load_bundle("corner").queries())
    for set_id in ("I2", "I3", "I6"):
        w = impossibility_witness(set_id)
        queries.append(w.query)
        if w.other_query is not None:
            queries.append(w.other_query)
    generated = generated_probe_queries()
    if budget is not None and budget > 0 and len(generated) > budget:
        rng = random.Random(seed)
        keep = sorted(rng.sample(range(len(generated)), budget))
        generated = [generated[i] for i in keep]
    queries.extend(generated)
    label = "builtin" if budget is None else f"builtin(budget={budget},seed={seed})"
    return Suite(label, tuple(queries))


# -- external explainers -----------------------------------------------------------


class ExternalExplainer:
    """Audit a third-party explainer over a line-JSON subprocess protocol.

    One JSON query object per request line on stdin; one JSON explanation
    set per response line on stdout.
    """

    def __init__(self, argv: Sequence[str]):
        self.argv = list(argv)
        try:
            self.proc = subprocess.Popen(
                self.argv,
                stdin=subprocess.PIPE,
                stdout=subprocess.PIPE,
                text=True,
            )
        except OSError as exc:
            raise ExternalExplainerFailure(
                f"cannot start {self.argv!r}: {exc}"
            ) from exc

    def __call__(self, query: Query) -> ExplanationSet:
        if self.proc.poll() is not None:
            raise ExternalExplainerFailure("explainer process already exited")
        request = json.dumps(query.to_json_dict(), sort_keys=True)
        try:
            assert self.proc.stdin is not None and self.proc.stdout is not None
            self.proc.stdin.write(request + "\n")
            self.proc.stdin.flush()
            line = self.proc.stdout.readline()
        except (BrokenPipeError, OSError) as exc:
            raise ExternalExplainerFailure(f"protocol I/O failed: {exc}") from exc
        if not line:
            raise ExternalExplainerFailure("explainer closed its output")
        try:
            raw = json.loads(line)
            return explanation_set_from_json(raw, query)
        except (ValueError, KeyError, TypeError) as exc:
            raise ExternalExplainerFailure(
                f"bad response line: {line.strip()!r} ({exc})"
            ) from exc

    def close(self) -> None:
        if self.proc.poll() is None:
            try:
                if self.proc.stdin is not None:
                    self.proc.stdin.close()
                self.proc.wait(timeout=10)
            except (OSError, subprocess.TimeoutExpired):
                self.proc.kill()
                self.proc.wait()

    def __enter__(self) -> "ExternalExplainer":
        return self

    def __exit__(self, *exc_info) -> None:
        self.close()
