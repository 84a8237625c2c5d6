"""Axiom checks, expected profiles, impossibility and compatibility witnesses."""

import sys

import pytest

from cfexplain import (
    AXIOMS,
    EXPECTED_PROFILES,
    EXPLAINERS,
    IMPOSSIBILITY_SETS,
    ExternalExplainer,
    ExternalExplainerFailure,
    PartialAssignment,
    Query,
    audit,
    builtin_suite,
    c_suf,
    check_axiom,
    check_impossibility,
    classify_family,
    compatibility_witnesses,
    constant_blank,
    constant_empty,
    g_nec,
    impossibility_witness,
    load_bundle,
    old_values,
    profile_inconsistencies,
    s_nec,
)

from conftest import tool


AUDITED = (
    "gNec", "sNec", "gSuf", "sSuf", "cSuf",
    "constant-empty", "constant-blank", "old-values",
)


@pytest.fixture(scope="module")
def suite():
    return builtin_suite(budget=300, seed=0)


@pytest.fixture(scope="module")
def profiles(suite):
    return {
        name: audit(EXPLAINERS[name], suite.queries, name=name, suite_name=suite.name)
        for name in AUDITED
    }


# -- the expected-profile table --------------------------------------------------------


def test_axioms_are_fixed_and_ordered():
    assert AXIOMS == (
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
    for name in AUDITED:
        assert set(EXPECTED_PROFILES[name]) == set(AXIOMS)


def test_expected_profiles_have_zero_mismatches(profiles):
    for name, profile in profiles.items():
        assert profile.mismatches() == (), name


def test_every_violation_is_replayable(profiles):
    for name, profile in profiles.items():
        for verdict in profile.verdicts:
            if verdict.ok:
                assert verdict.counterexample is None
                continue
            cx = verdict.counterexample
            assert cx is not None and cx.detail
            replay = check_axiom(
                verdict.axiom, EXPLAINERS[name], list(cx.queries())
            )
            assert replay.violated, (name, verdict.axiom)


def test_no_implication_breaks(profiles):
    for name, profile in profiles.items():
        assert profile_inconsistencies(profile) == (), name


def test_verdict_vocabulary(profiles):
    p = profiles["gSuf"]
    assert p.verdict("Success").summary() == "no-violation-found"
    assert p.verdict("Feasibility").summary() == "violated"
    pattern = p.pattern()
    assert pattern["StrongValidity"] and not pattern["Coreness"]


def test_audit_json_shape(profiles):
    out = profiles["cSuf"].to_json_dict()
    assert out["explainer"] == "cSuf"
    assert [v["axiom"] for v in out["verdicts"]] == list(AXIOMS)
    assert out["mismatches"] == []
    violated = [v for v in out["verdicts"] if v["verdict"] == "violated"]
    assert violated and all("counterexample" in v for v in violated)


# -- single-query goldens ---------------------------------------------------------------


def test_strong_validity_counterexample_on_the_cinema_query():
    b = load_bundle("vacation")
    q3 = b.query(3)
    verdict = check_axiom("StrongValidity", c_suf, [q3])
    assert verdict.violated
    cx = verdict.counterexample
    assert cx.explanation == PartialAssignment.from_dict(
        b.theory, {"a": "skiing"}
    )
    # the witness extension keeps the class: mild skiing is also cinema, so
    # {a=skiing} is a flip recipe that is not strictly sufficient
    assert cx.witness == PartialAssignment.from_dict(
        b.theory, {"t": "mild", "a": "skiing"}
    )


def test_corner_snec_audit_flags_exactly_four_axioms():
    b = load_bundle("corner")
    profile = audit(s_nec, [b.query(1)], name="sNec")
    violated = {v.axiom for v in profile.verdicts if v.violated}
    assert violated == {
        "Coreness",
        "Novelty",
        "StrongValidity",
        "WeakValidity",
    }


def test_success_violation_lists_the_query():
    b = load_bundle("vacation")
    q2 = b.query(2)
    verdict = check_axiom("Success", g_nec, [q2])
    assert verdict.violated
    assert verdict.counterexample.query == q2
    assert verdict.counterexample.explanation is None


def test_equivalence_checked_across_equal_classifiers():
    # two structurally separate but extensionally equal classifiers
    import copy

    b1 = load_bundle("vacation")
    b2 = load_bundle("vacation")
    assert b1.classifier is not b2.classifier
    q3 = Query(b1.theory, b1.classifier, b1.instances[2])  # freezing reading
    q5 = Query(b2.theory, b2.classifier, b2.instances[4])  # freezing climbing
    assert q3.label == q5.label == "cinema"
    # sNec(q3) is empty, sNec(q5) is not: equivalence must notice even
    # though the two queries carry distinct classifier objects
    verdict = check_axiom("Equivalence", s_nec, [q3, q5])
    assert verdict.violated
    cx = verdict.counterexample
    assert cx.other_query is not None
    assert {cx.query, cx.other_query} == {q3, q5}
    # gNec output depends only on the class function, so it cannot differ
    assert check_axiom("Equivalence", g_nec, [q3, q5]).ok


def test_vacuous_axioms_on_empty_output():
    b = load_bundle("vacation")
    q2 = b.query(2)  # gNec(q2) is empty
    for axiom in AXIOMS:
        verdict = check_axiom(axiom, g_nec, [q2])
        if axiom == "Success":
            assert verdict.violated
        else:
            assert verdict.ok, axiom


# -- family classification ----------------------------------------------------------------


def test_family_tags(suite):
    expected = {
        "gNec": {"gNec", "sNec"},
        "sNec": {"sNec"},
        "gSuf": {"gSuf"},
        "sSuf": {"cSuf", "gSuf", "sSuf"},
        "cSuf": {"cSuf"},
        "constant-empty": {"gNec", "sNec", "gSuf", "sSuf", "cSuf"},
        "constant-blank": set(),
        "old-values": set(),
    }
    for name, want in expected.items():
        report = classify_family(EXPLAINERS[name], suite.queries)
        assert report.consistent, name
        assert report.inclusion_tags == frozenset(want), name
        assert report.to_json_dict()["consistent"] is True


# -- impossibility witnesses ----------------------------------------------------------------


def test_impossibility_sets_are_the_published_seven():
    assert IMPOSSIBILITY_SETS == {
        "I1": ("Success", "NonTriviality", "Coreness"),
        "I2": ("Success", "Feasibility", "ScepticalValidity"),
        "I3": ("Success", "Novelty", "StrongValidity"),
        "I4": ("Success", "NonTriviality", "Feasibility", "Novelty"),
        "I5": ("Success", "Feasibility", "WeakValidity"),
        "I6": ("Success", "NonTriviality", "Equivalence", "Feasibility"),
        "I7": ("Success", "NonTriviality", "Equivalence", "Novelty"),
    }


@pytest.mark.parametrize("set_id", sorted(IMPOSSIBILITY_SETS))
def test_impossibility_witnesses_confirm(set_id):
    w = impossibility_witness(set_id)
    assert w.set_id == set_id
    assert w.axioms == IMPOSSIBILITY_SETS[set_id]
    assert w.narrative
    confirmed, trace = check_impossibility(w)
    assert confirmed, trace
    assert trace


def test_impossibility_witness_unknown_id():
    with pytest.raises(KeyError):
        impossibility_witness("I8")


# -- compatibility witnesses -----------------------------------------------------------------


def test_compatibility_witnesses_audit_exactly(suite):
    for w in compatibility_witnesses():
        profile = audit(
            w.explainer, suite.queries, name=w.name, expected=w.expected_profile()
        )
        assert profile.mismatches() == (), w.name


def test_witness_explainers_shapes():
    q = load_bundle("corner").query(1)
    assert constant_empty(q).count == 0
    blank = constant_blank(q)
    assert blank.count == 1 and blank.explanations[0].is_empty
    ov = old_values(q)
    assert ov.count >= 1
    assert all(e.subset_of(q.instance) and not e.is_empty for e in ov)


# -- the built-in suite ------------------------------------------------------------------------


def test_builtin_suite_is_deterministic_and_seeded():
    a = builtin_suite(budget=120, seed=0)
    b = builtin_suite(budget=120, seed=0)
    c = builtin_suite(budget=120, seed=1)
    assert a.queries == b.queries and a.name == b.name
    assert c.queries != a.queries
    assert builtin_suite(budget=None).name == "builtin"


def test_builtin_suite_always_carries_the_fixtures():
    small = builtin_suite(budget=10, seed=0)
    queries = set(small.queries)
    for name in ("vacation", "bitcount", "corner"):
        for q in load_bundle(name).queries():
            assert q in queries


# -- external explainers -----------------------------------------------------------------------


def test_external_explainer_audits_like_constant_blank():
    b = load_bundle("corner")
    queries = b.queries()
    with ExternalExplainer([sys.executable, tool("blank_explainer.py")]) as ext:
        external = audit(
            ext, queries, name="external",
            expected=EXPECTED_PROFILES["constant-blank"],
        )
    native = audit(constant_blank, queries, name="constant-blank")
    assert external.pattern() == native.pattern()
    assert external.mismatches() == ()


def test_external_explainer_protocol_violations():
    q = load_bundle("corner").query(1)
    with ExternalExplainer([sys.executable, tool("bad_explainer.py")]) as ext:
        with pytest.raises(ExternalExplainerFailure):
            ext(q)
    with ExternalExplainer([sys.executable, "-c", "pass"]) as ext:
        with pytest.raises(ExternalExplainerFailure):
            ext(q)
    with pytest.raises(ExternalExplainerFailure):
        ExternalExplainer(["/nonexistent/explainer"])
