"""Shared builders and brute-force references for the test suite."""

from __future__ import annotations

import itertools
import random
from typing import Optional, Sequence

from hypothesis import strategies as st

from cfexplain import (
    FormulaClassifier,
    NotSurjective,
    PartialAssignment,
    Query,
    TableClassifier,
    Theory,
    enumerate_instances,
    instance_of_rank,
    validate_theory,
)
from cfexplain.formulas import And, Iff, Implies, Not, Or, Var


def make_theory(
    domain_sizes: Sequence[int], n_classes: int = 2, feature_prefix: str = "f"
) -> Theory:
    return validate_theory(
        {
            "features": [
                {
                    "name": f"{feature_prefix}{i + 1}",
                    "domain": [str(v) for v in range(size)],
                }
                for i, size in enumerate(domain_sizes)
            ],
            "classes": [f"c{i}" for i in range(n_classes)],
        }
    )


def table_from_pattern(theory: Theory, pattern: int) -> TableClassifier:
    """Two-class table: rank r gets class c1 when bit r of the pattern is set."""
    n = theory.instance_count()
    return TableClassifier(
        theory, ["c1" if (pattern >> r) & 1 else "c0" for r in range(n)]
    )


# -- hypothesis strategies ------------------------------------------------------


@st.composite
def small_theories(draw, max_features: int = 3, max_domain: int = 3):
    n = draw(st.integers(1, max_features))
    sizes = draw(st.lists(st.integers(2, max_domain), min_size=n, max_size=n))
    return make_theory(sizes)


@st.composite
def table_queries(draw, max_features: int = 3, max_domain: int = 3):
    """A query over a random surjective two-class table."""
    theory = draw(small_theories(max_features, max_domain))
    count = theory.instance_count()
    pattern = draw(st.integers(1, (1 << count) - 2))  # not constant
    classifier = table_from_pattern(theory, pattern)
    rank = draw(st.integers(0, count - 1))
    return Query(theory, classifier, instance_of_rank(theory, rank))


# -- random boolean formula queries (seeded, for differential suites) -------------


def random_formula(rng: random.Random, features: Sequence[str], depth: int = 3):
    if depth <= 0 or rng.random() < 0.25:
        atom = Var(rng.choice(list(features)))
        return Not(atom) if rng.random() < 0.3 else atom
    kind = rng.randrange(5)
    if kind == 0:
        return Not(random_formula(rng, features, depth - 1))
    left = random_formula(rng, features, depth - 1)
    right = random_formula(rng, features, depth - 1)
    return (And, Or, Implies, Iff)[kind - 1](left, right)


def random_boolean_query(rng: random.Random, n_features: int) -> Query:
    """A query over a random surjective formula classifier on n boolean features."""
    theory = make_theory([2] * n_features, n_classes=2)
    while True:
        formula = random_formula(rng, theory.features, depth=3)
        try:
            classifier = FormulaClassifier(theory, formula, "c1", "c0")
        except NotSurjective:
            continue
        break
    rank = rng.randrange(theory.instance_count())
    return Query(theory, classifier, instance_of_rank(theory, rank))


def random_subset_of(
    rng: random.Random, x: PartialAssignment, allow_empty: bool = True
) -> PartialAssignment:
    values = [
        v if rng.random() < 0.5 else None for v in x.values
    ]
    if not allow_empty and all(v is None for v in values):
        pos = rng.randrange(len(values))
        values[pos] = x.values[pos]
    return PartialAssignment(x.theory, tuple(values))


def random_novel(rng: random.Random, x: PartialAssignment) -> PartialAssignment:
    """A random assignment sharing no literal with the instance x."""
    theory = x.theory
    values: list[Optional[int]] = []
    for i, xv in enumerate(x.values):
        if rng.random() < 0.5:
            values.append(None)
        else:
            others = [v for v in range(len(theory.domains[i])) if v != xv]
            values.append(rng.choice(others))
    return PartialAssignment(theory, tuple(values))


def random_assignment(rng: random.Random, theory: Theory) -> PartialAssignment:
    values = tuple(
        rng.choice([None] + list(range(len(theory.domains[i]))))
        for i in range(theory.n_features)
    )
    return PartialAssignment(theory, values)


# -- brute-force references -------------------------------------------------------


def brute_sat(clauses, n_vars: int) -> Optional[tuple[bool, ...]]:
    """Exhaustive satisfiability check; first model in lexicographic order."""
    if n_vars > 20:
        raise ValueError("brute_sat is for small instances only")
    for bits in itertools.product((False, True), repeat=n_vars):
        ok = True
        for clause in clauses:
            if not any(
                bits[abs(lit) - 1] == (lit > 0) for lit in clause
            ):
                ok = False
                break
        if ok:
            return bits
    return None


def exhaustive_members(kind: str, query: Query):
    """Reference explanation set computed by filtering the full enumeration."""
    from cfexplain import enumerate_partial_assignments, is_member

    return frozenset(
        e
        for e in enumerate_partial_assignments(query.theory)
        if is_member(kind, query, e)
    )
