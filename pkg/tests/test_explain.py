"""The five explainer families against worked-example goldens and their definitions."""

import pytest
from hypothesis import given, settings

from cfexplain import (
    CORE_KINDS,
    PartialAssignment,
    Query,
    c_suf,
    explanation_set_from_json,
    g_nec,
    g_suf,
    is_member,
    load_bundle,
    s_nec,
    s_suf,
)

from helpers import exhaustive_members, table_queries

EXPLAIN = {"gNec": g_nec, "sNec": s_nec, "gSuf": g_suf, "sSuf": s_suf, "cSuf": c_suf}


def vac():
    return load_bundle("vacation")


def assignments(bundle, *specs):
    """Each spec is a mapping (literal form) or an int (1-based instance number)."""
    out = set()
    for spec in specs:
        if isinstance(spec, int):
            out.add(bundle.instances[spec - 1])
        else:
            out.add(PartialAssignment.from_dict(bundle.theory, spec))
    return frozenset(out)


def result(kind, query):
    got = EXPLAIN[kind](query)
    assert got.kind == kind
    assert not got.truncated
    assert len(set(got.explanations)) == len(got.explanations)
    return frozenset(got.explanations)


# -- worked-example goldens: the two-feature vacation table ------------------------


def test_vacation_necessity_goldens():
    b = vac()
    q1, q2, q3 = b.query(1), b.query(2), b.query(3)
    assert result("gNec", q1) == assignments(b, {"t": "hot"})
    assert result("gNec", q2) == frozenset()
    assert result("gNec", q3) == frozenset()
    assert result("sNec", q1) == assignments(b, {"t": "hot"}, 1)
    assert result("sNec", q2) == assignments(b, {"t": "mild"}, {"a": "climbing"})
    assert result("sNec", q3) == frozenset()


def test_vacation_sufficiency_goldens():
    b = vac()
    q1, q2, q3 = b.query(1), b.query(2), b.query(3)
    assert result("gSuf", q1) == assignments(
        b, {"t": "mild"}, {"t": "freezing"}, 2, 3, 4, 5, 8, 9
    )
    assert len(result("gSuf", q1)) == 8
    assert result("gSuf", q2) == assignments(
        b, {"t": "hot"}, {"a": "reading"}, 1, 3, 5, 6, 7, 8, 9
    )
    assert result("gSuf", q3) == assignments(b, {"t": "hot"}, 1, 2, 4, 6, 7)

    assert result("sSuf", q1) == assignments(
        b, {"t": "mild"}, {"t": "freezing"}, 3, 4, 8, 9
    )
    assert result("sSuf", q2) == assignments(b, {"t": "hot"}, {"a": "reading"}, 3, 6, 7)
    assert result("sSuf", q3) == assignments(b, {"t": "hot"}, 1, 2, 7)

    assert result("cSuf", q1) == result("sSuf", q1)
    assert result("cSuf", q2) == assignments(
        b,
        {"t": "hot"},
        {"t": "freezing"},
        {"a": "reading"},
        {"a": "skiing"},
        3, 6, 7,
    )
    assert result("cSuf", q3) == assignments(b, {"t": "hot"}, {"a": "skiing"}, 1, 2, 7)


# -- worked-example goldens: the two-bit counter and the corner table ---------------


def test_bitcount_goldens():
    b = load_bundle("bitcount")
    q1, q2, q3, q4 = b.queries()
    # all-zeros and all-ones instances pin their classes exactly
    assert result("gNec", q1) == assignments(
        b, {"f1": "0"}, {"f2": "0"}, {"f1": "0", "f2": "0"}
    )
    assert result("gNec", q2) == frozenset()
    assert result("gNec", q4) == assignments(
        b, {"f1": "1"}, {"f2": "1"}, {"f1": "1", "f2": "1"}
    )
    # the middle class c2 has no strict sufficient reason anywhere
    assert result("sSuf", q2) == frozenset()
    assert result("sSuf", q3) == frozenset()
    # ... but asymmetric counterfactual recipes exist
    assert result("cSuf", q2) == assignments(b, {"f1": "1"}, {"f2": "0"})
    assert result("cSuf", q3) == assignments(b, {"f1": "0"}, {"f2": "1"})
    assert result("gSuf", q2) == assignments(
        b, {"f1": "0", "f2": "0"}, {"f1": "1", "f2": "1"}
    )


def test_corner_goldens():
    b = load_bundle("corner")
    q1 = b.query(1)
    assert result("sNec", q1) == assignments(b, {"f1": "0"})
    assert result("gNec", q1) == frozenset()
    assert result("gSuf", q1) == assignments(b, {"f1": "1", "f2": "0"})
    assert result("sSuf", q1) == frozenset()
    assert result("cSuf", q1) == assignments(b, {"f1": "1"})


# -- structural properties -----------------------------------------------------------


def test_canonical_order_and_cap():
    q = vac().query(1)
    full = g_suf(q)
    keys = [e.sort_key() for e in full.explanations]
    assert keys == sorted(keys)

    capped = g_suf(q, cap=3)
    assert capped.truncated
    assert capped.explanations == full.explanations[:3]
    assert capped.count == 3

    exact = g_suf(q, cap=full.count)
    assert not exact.truncated
    assert exact.explanations == full.explanations

    # cap=None and cap=0 both mean "no cap"
    assert g_suf(q, cap=0).explanations == full.explanations


def test_set_container_api():
    q = vac().query(1)
    got = g_nec(q)
    e = next(iter(got))
    assert e in got
    assert len(got) == got.count == 1
    assert got.assignments() == frozenset([e])


def test_json_round_trip():
    q = vac().query(2)
    got = s_suf(q)
    again = explanation_set_from_json(got.to_json_dict(), q)
    assert again == got


def test_is_member_matches_listings():
    b = vac()
    q2 = b.query(2)
    assert is_member("sNec", q2, PartialAssignment.from_dict(b.theory, {"t": "mild"}))
    assert not is_member("gNec", q2, PartialAssignment.from_dict(b.theory, {"t": "mild"}))
    with pytest.raises(ValueError):
        is_member("mystery", q2, PartialAssignment.empty(b.theory))


def test_empty_never_explains():
    # the blank assignment is in no family: gNec/sNec demand nonemptiness or
    # class change, sufficiency of the blank patch would make kappa constant
    for name in ("vacation", "bitcount", "corner", "majority"):
        b = load_bundle(name)
        for q in b.queries():
            blank = PartialAssignment.empty(b.theory)
            for kind in CORE_KINDS:
                assert not is_member(kind, q, blank)


@given(table_queries())
@settings(max_examples=30, deadline=None)
def test_enumeration_matches_membership_filter(query):
    for kind in CORE_KINDS:
        got = frozenset(EXPLAIN[kind](query).explanations)
        assert got == exhaustive_members(kind, query)


@given(table_queries())
@settings(max_examples=30, deadline=None)
def test_family_inclusions(query):
    assert result("gNec", query) <= result("sNec", query)
    ssuf = result("sSuf", query)
    assert ssuf <= result("gSuf", query)
    assert ssuf <= result("cSuf", query)
    assert result("cSuf", query)  # success: never empty
