"""Satisfiability oracle and oracle-bounded explanation procedures.

For all-boolean theories with formula classifiers, explanation decision and
search reduce to a handful of satisfiability calls instead of enumeration:

* decide — membership tests that evaluate the defining condition with at
  most one oracle call (necessity via per-literal core checks, sufficiency
  via one UNSAT check on "same class AND the candidate", flips by direct
  evaluation);
* find — produce one explanation or report none, within tight call budgets:
  0 calls for sSuf (test the all-flipped instance), 1 for cSuf/gSuf/sNec
  (one opposite-class model), at most n for gNec (scan x's literals).

The oracle itself is pluggable: a deterministic built-in DPLL (fixed
branching: ascending variable index, true first, stop once every clause is
satisfied, unassigned variables read as false) or any external solver that
accepts a DIMACS CNF file path and prints SAT-competition style ``s``/``v``
lines.  ``SatOracle`` counts calls so budget claims are testable.
"""

from __future__ import annotations

import math
import subprocess
import tempfile
from pathlib import Path
from typing import Optional, Sequence

from .classifier import (
    Classifier,
    FormulaClassifier,
    Query,
    UnknownClass,
    class_view,
)
from .derived import DistanceMeasure, hamming
from .formulas import Clause, Formula, Not, tseitin, to_dimacs
from .theory import (
    PartialAssignment,
    Theory,
    instance_of_rank,
    substitute,
)


class NotBoolean(ValueError):
    """Raised when a procedure needs a boolean theory + formula classifier."""


class BackendFailure(RuntimeError):
    """External solver crashed or produced unparseable output."""


def _require_boolean(theory: Theory) -> None:
    if any(len(d) != 2 for d in theory.domains):
        raise NotBoolean("this procedure needs all-boolean feature domains")


def _require_formula_query(query: Query) -> FormulaClassifier:
    _require_boolean(query.theory)
    if not isinstance(query.classifier, FormulaClassifier):
        raise NotBoolean("this procedure needs a formula classifier")
    return query.classifier


# -- backends --------------------------------------------------------------------


def dpll(clauses: Sequence[Clause], n_vars: int) -> Optional[tuple[bool, ...]]:
    """Deterministic DPLL: unit propagation + ascending-index, true-first
    branching; stops as soon as every clause is satisfied, reading the
    still-unassigned variables as false."""
    assign: list[Optional[bool]] = [None] * (n_vars + 1)

    def propagate(trail: list[int]) -> bool:
        changed = True
        while changed:
            changed = False
            for clause in clauses:
                unit = None
                open_lits = 0
                satisfied = False
                for lit in clause:
                    v = assign[abs(lit)]
                    if v is None:
                        open_lits += 1
                        unit = lit
                        if open_lits > 1:
                            break
                    elif (lit > 0) == v:
                        satisfied = True
                        break
                if satisfied or open_lits > 1:
                    continue
                if open_lits == 0:
                    return False
                var = abs(unit)
                assign[var] = unit > 0
                trail.append(var)
                changed = True
        return True

    def satisfied_everywhere() -> bool:
        return all(
            any(
                assign[abs(lit)] is not None and (lit > 0) == assign[abs(lit)]
                for lit in clause
            )
            for clause in clauses
        )

    def search() -> bool:
        trail: list[int] = []
        if not propagate(trail):
            for var in trail:
                assign[var] = None
            return False
        if satisfied_everywhere():
            return True
        var = next(v for v in range(1, n_vars + 1) if assign[v] is None)
        for value in (True, False):
            assign[var] = value
            if search():
                return True
            assign[var] = None
        for var in trail:
            assign[var] = None
        return False

    if search():
        return tuple(bool(assign[v]) for v in range(1, n_vars + 1))
    return None


class DpllBackend:
    """The built-in solver."""

    name = "builtin"

    def solve(
        self, clauses: Sequence[Clause], n_vars: int
    ) -> Optional[tuple[bool, ...]]:
        return dpll(clauses, n_vars)


class ExecBackend:
    """External solver invoked as ``<path> <dimacs-file>``.

    Expects SAT-competition output: an ``s SATISFIABLE`` /
    ``s UNSATISFIABLE`` line, and for satisfiable instances ``v`` lines with
    a 0-terminated literal list.  Variables missing from the model read as
    false.
    """

    def __init__(self, path: str):
        self.path = str(path)
        self.name = f"exec:{self.path}"

    def solve(
        self, clauses: Sequence[Clause], n_vars: int
    ) -> Optional[tuple[bool, ...]]:
        with tempfile.TemporaryDirectory(prefix="cfexplain-sat-") as tmp:
            problem = Path(tmp) / "problem.cnf"
            problem.write_text(to_dimacs(list(clauses), n_vars))
            try:
                proc = subprocess.run(
                    [self.path, str(problem)],
                    capture_output=True,
                    text=True,
                    timeout=300,
                )
            except OSError as exc:
                raise BackendFailure(f"cannot run solver {self.path!r}: {exc}") from exc
            except subprocess.TimeoutExpired as exc:
                raise BackendFailure(f"solver {self.path!r} timed out") from exc
        return self._parse(proc.stdout, n_vars)

    def _parse(self, stdout: str, n_vars: int) -> Optional[tuple[bool, ...]]:
        status: Optional[str] = None
        literals: list[int] = []
        for line in stdout.splitlines():
            line = line.strip()
            if line.startswith("s "):
                status = line[2:].strip().upper()
            elif line.startswith("v "):
                try:
                    literals.extend(int(tok) for tok in line[2:].split())
                except ValueError as exc:
                    raise BackendFailure(f"garbled model line: {line!r}") from exc
        if status == "UNSATISFIABLE":
            return None
        if status != "SATISFIABLE":
            raise BackendFailure(f"no solution status in solver output: {stdout!r}")
        if n_vars > 0 and not literals:
            raise BackendFailure("satisfiable verdict without a model")
        model = [False] * (n_vars + 1)
        for lit in literals:
            if lit == 0:
                continue
            var = abs(lit)
            if var > n_vars:
                raise BackendFailure(f"model names unknown variable {var}")
            model[var] = lit > 0
        return tuple(model[1:])


class SatOracle:
    """A backend plus an oracle-call counter (for budget assertions)."""

    def __init__(self, backend=None):
        self.backend = backend if backend is not None else DpllBackend()
        self.calls = 0

    def solve(
        self, clauses: Sequence[Clause], n_vars: int
    ) -> Optional[tuple[bool, ...]]:
        self.calls += 1
        return self.backend.solve(clauses, n_vars)

    def reset(self) -> None:
        self.calls = 0


# -- encodings -------------------------------------------------------------------


def feature_vars(theory: Theory) -> dict[str, int]:
    return {f: i + 1 for i, f in enumerate(theory.features)}

def encode_formula(theory: Theory, formula: Formula) -> tuple[list[Clause], int]:
    """CNF clauses asserting the formula, over variables 1..n then auxiliaries."""
    _require_boolean(theory)
    clauses, root, n_vars = tseitin(formula, feature_vars(theory))
    clauses.append((root,))
    return clauses, n_vars


def at_most_k(
    lits: Sequence[int], k: int, next_var: int
) -> tuple[list[Clause], int]:
    """Sequential-counter encoding of "at most k of lits are true".

    Auxiliary variables are numbered from ``next_var``; returns the clauses
    and the next free variable index.
    """
    n = len(lits)
    if k < 0:
        return [()], next_var  # empty clause: unsatisfiable
    if k == 0:
        return [(-lit,) for lit in lits], next_var
    if n <= k:
        return [], next_var
    # registers[i][j] = "at least j+1 of the first i+1 literals are true"
    reg = [[next_var + i * k + j for j in range(k)] for i in range(n - 1)]
    next_var += (n - 1) * k
    clauses: list[Clause] = [(-lits[0], reg[0][0])]
    clauses.extend((-reg[0][j],) for j in range(1, k))
    for i in range(1, n - 1):
        clauses.append((-lits[i], reg[i][0]))
        clauses.append((-reg[i - 1][0], reg[i][0]))
        for j in range(1, k):
            clauses.append((-lits[i], -reg[i - 1][j - 1], reg[i][j]))
            clauses.append((-reg[i - 1][j], reg[i][j]))
        clauses.append((-lits[i], -reg[i - 1][k - 1]))
    clauses.append((-lits[n - 1], -reg[n - 2][k - 1]))
    return clauses, next_var


def class_indicator(classifier: Classifier, c: str) -> Formula:
    """A formula true exactly on the instances the classifier maps to c."""
    if not isinstance(classifier, FormulaClassifier):
        raise NotBoolean("class indicators exist only for formula classifiers")
    if c == classifier.class_if_true:
        return classifier.formula
    if c == classifier.class_if_false:
        return Not(classifier.formula)
    raise UnknownClass(f"class {c!r} is not one of the classifier's labels")


def _model_instance(theory: Theory, model: Sequence[bool]) -> PartialAssignment:
    return PartialAssignment(
        theory, tuple(1 if model[i] else 0 for i in range(theory.n_features))
    )


def sat_solve(
    theory: Theory, formula: Formula, oracle: Optional[SatOracle] = None
) -> Optional[PartialAssignment]:
    """One satisfying instance of the formula, or None when unsatisfiable."""
    oracle = oracle if oracle is not None else SatOracle()
    clauses, n_vars = encode_formula(theory, formula)
    model = oracle.solve(clauses, n_vars)
    return None if model is None else _model_instance(theory, model)


def _solve_with_units(
    query_theory: Theory,
    formula: Formula,
    extra: Sequence[Clause],
    oracle: SatOracle,
) -> Optional[PartialAssignment]:
    clauses, n_vars = encode_formula(query_theory, formula)
    clauses.extend(extra)
    model = oracle.solve(clauses, n_vars)
    return None if model is None else _model_instance(query_theory, model)


# -- boolean helpers -------------------------------------------------------------


def complement_instance(x: PartialAssignment) -> PartialAssignment:
    """The instance disagreeing with x on every (boolean) feature."""
    _require_boolean(x.theory)
    if not x.is_instance:
        raise ValueError("complement needs a full instance")
    return PartialAssignment(x.theory, tuple(1 - v for v in x.values))


def flip_within(x: PartialAssignment, positions) -> PartialAssignment:
    """x with the given (boolean) feature positions flipped."""
    values = list(x.values)
    for i in positions:
        values[i] = 1 - values[i]
    return PartialAssignment(x.theory, tuple(values))


def _unit_for(position: int, value: int) -> Clause:
    var = position + 1
    return (var,) if value == 1 else (-var,)


def _difference_literals(x: PartialAssignment) -> list[int]:
    """Literals true exactly when a model disagrees with x on that feature."""
    return [
        -(i + 1) if v == 1 else (i + 1) for i, v in enumerate(x.values)
    ]


def _opposite_label(classifier: FormulaClassifier, label: str) -> str:
    return (
        classifier.class_if_false
        if label == classifier.class_if_true
        else classifier.class_if_true
    )


# -- decide ----------------------------------------------------------------------


def _min_flip_size_below(
    query: Query, classifier: FormulaClassifier, bound: int, oracle: SatOracle
) -> bool:
    """Is there an opposite-class instance within Hamming distance `bound` of x?"""
    if bound <= 0:
        return False
    x = query.instance
    indicator = class_indicator(classifier, _opposite_label(classifier, query.label))
    clauses, n_vars = encode_formula(query.theory, indicator)
    extra, next_free = at_most_k(_difference_literals(x), bound, n_vars + 1)
    return oracle.solve(list(clauses) + extra, next_free - 1) is not None


def _flip_changes_class(query: Query, positions) -> bool:
    y = flip_within(query.instance, positions)
    return query.classifier.classify(y) != query.label


def _is_flip_member(query: Query, e: PartialAssignment) -> bool:
    x = query.instance
    if e.is_empty or not e.disjoint_from(x):
        return False
    return query.classifier.classify(substitute(x, e)) != query.label


def _subsets_ascending(positions: tuple[int, ...], proper: bool):
    from itertools import combinations

    top = len(positions) - (1 if proper else 0)
    for size in range(1, top + 1):
        yield from combinations(positions, size)


def decide_exp(
    kind: str,
    query: Query,
    e: PartialAssignment,
    oracle: Optional[SatOracle] = None,
    distance: Optional[DistanceMeasure] = None,
    tau: float = math.inf,
) -> bool:
    """Membership test with the oracle-bounded procedures.

    Matches the enumeration oracle exactly; boolean theories with formula
    classifiers only (others raise NotBoolean).
    """
    classifier = _require_formula_query(query)
    oracle = oracle if oracle is not None else SatOracle()
    x = query.instance
    label = query.label

    if kind == "cSuf":
        return _is_flip_member(query, e)

    if kind == "sNec":
        # x ⊖ E is the single instance with E's features flipped
        if e.is_empty or not e.subset_of(x):
            return False
        return _flip_changes_class(query, e.feature_positions())

    if kind == "gNec":
        # every literal of E must appear in all instances of x's class
        if e.is_empty:
            return False
        indicator = class_indicator(classifier, label)
        for i, v in e.indexed_literals():
            witness = _solve_with_units(
                query.theory, indicator, [_unit_for(i, 1 - v)], oracle
            )
            if witness is not None:
                return False
        return True

    if kind in ("gSuf", "sSuf"):
        if kind == "sSuf" and not e.disjoint_from(x):
            return False
        if e.is_empty:
            return False  # x itself extends the empty assignment
        indicator = class_indicator(classifier, label)
        units = [_unit_for(i, v) for i, v in e.indexed_literals()]
        return _solve_with_units(query.theory, indicator, units, oracle) is None

    if kind == "featMin":
        # flip + no proper feature subset also flips (boolean flips are
        # unique per feature set, so the subset scan is direct evaluation)
        if not _is_flip_member(query, e):
            return False
        positions = e.feature_positions()
        return not any(
            _flip_changes_class(query, subset)
            for subset in _subsets_ascending(positions, proper=True)
        )

    if kind == "cardMin":
        if not _is_flip_member(query, e):
            return False
        return not _min_flip_size_below(query, classifier, e.size - 1, oracle)

    if kind == "distMin":
        if not _is_flip_member(query, e):
            return False
        if distance is None or distance is hamming:
            return not _min_flip_size_below(query, classifier, e.size - 1, oracle)
        return _weighted_rank_check(query, e, distance)

    if kind == "distCap":
        if not _is_flip_member(query, e):
            return False
        d = distance if distance is not None else hamming
        return d(substitute(x, e), x) < tau

    raise ValueError(f"unknown explainer kind {kind!r}")


def _weighted_rank_check(
    query: Query, e: PartialAssignment, distance: DistanceMeasure
) -> bool:
    """No flip lands strictly closer to x under the given measure."""
    view = class_view(query.classifier)
    x = query.instance
    mine = distance(substitute(x, e), x)
    others = view.full_mask & ~view.class_mask(query.label)
    rank = 0
    while others:
        if others & 1 and distance(instance_of_rank(query.theory, rank), x) < mine:
            return False
        others >>= 1
        rank += 1
    return True


# -- find ------------------------------------------------------------------------


def _opposite_model(
    query: Query, classifier: FormulaClassifier, oracle: SatOracle
) -> PartialAssignment:
    indicator = class_indicator(classifier, _opposite_label(classifier, query.label))
    y = sat_solve(query.theory, indicator, oracle)
    if y is None:
        # unreachable for surjective classifiers; fail loudly if it happens
        raise BackendFailure("no opposite-class instance found for a surjective classifier")
    return y


def find_exp(
    kind: str,
    query: Query,
    oracle: Optional[SatOracle] = None,
    distance: Optional[DistanceMeasure] = None,
    tau: float = math.inf,
) -> Optional[PartialAssignment]:
    """Produce one explanation of the given kind, or None when none exists.

    Call budgets (asserted by tests): sSuf 0, cSuf/gSuf/sNec at most 1,
    gNec at most n, featMin 1 plus evaluation-only shrinking.
    """
    classifier = _require_formula_query(query)
    oracle = oracle if oracle is not None else SatOracle()
    x = query.instance
    label = query.label

    if kind == "sSuf":
        # if any sceptical sufficient reason exists, the full complement is one
        xbar = complement_instance(x)
        if classifier.classify(xbar) != label:
            return xbar
        return None

    if kind == "cSuf":
        y = _opposite_model(query, classifier, oracle)
        return y.difference(x)

    if kind == "gSuf":
        return _opposite_model(query, classifier, oracle)

    if kind == "sNec":
        y = _opposite_model(query, classifier, oracle)
        return x.difference(y)

    if kind == "gNec":
        # scan x's literals for a core literal of x's class
        indicator = class_indicator(classifier, label)
        for i, v in x.indexed_literals():
            witness = _solve_with_units(
                query.theory, indicator, [_unit_for(i, 1 - v)], oracle
            )
            if witness is None:
                values: list[Optional[int]] = [None] * query.theory.n_features
                values[i] = v
                return PartialAssignment(query.theory, tuple(values))
        return None

    if kind == "featMin":
        y = _opposite_model(query, classifier, oracle)
        positions = list(y.difference(x).feature_positions())
        # greedy one-feature shrinking, evaluation only
        for i in list(positions):
            rest = [p for p in positions if p != i]
            if len(rest) < len(positions) and rest and _flip_changes_class(query, rest):
                positions = rest
        # the first flipping subset in ascending size order is subset-minimal;
        # the scan always hits at worst the full (still flipping) set
        for subset in _subsets_ascending(tuple(positions), proper=False):
            if _flip_changes_class(query, subset):
                return flip_within(x, subset).difference(x)
        raise AssertionError("greedy shrink lost the flip")  # pragma: no cover

    if kind == "cardMin":
        return _smallest_flip(query, classifier, oracle)

    if kind == "distMin":
        if distance is None or distance is hamming:
            return _smallest_flip(query, classifier, oracle)
        return _closest_flip(query, distance, math.inf)

    if kind == "distCap":
        d = distance if distance is not None else hamming
        if d is hamming:
            n = query.theory.n_features
            if math.isinf(tau):
                bound = n
            elif float(tau).is_integer():
                bound = int(tau) - 1  # strict threshold on integer distances
            else:
                bound = math.floor(tau)
            if bound <= 0:
                return None
            return _smallest_flip(query, classifier, oracle, max_size=min(bound, n))
        return _closest_flip(query, d, tau)

    raise ValueError(f"unknown explainer kind {kind!r}")


def _smallest_flip(
    query: Query,
    classifier: FormulaClassifier,
    oracle: SatOracle,
    max_size: Optional[int] = None,
) -> Optional[PartialAssignment]:
    """Iterative deepening on flip size; one oracle call per size tried."""
    x = query.instance
    n = query.theory.n_features
    top = n if max_size is None else max_size
    indicator = class_indicator(classifier, _opposite_label(classifier, query.label))
    base_clauses, n_vars = encode_formula(query.theory, indicator)
    diffs = _difference_literals(x)
    for k in range(1, top + 1):
        extra, next_free = at_most_k(diffs, k, n_vars + 1)
        model = oracle.solve(list(base_clauses) + extra, next_free - 1)
        if model is not None:
            y = _model_instance(query.theory, model)
            return y.difference(x)
    return None


def _closest_flip(
    query: Query, distance: DistanceMeasure, tau: float
) -> Optional[PartialAssignment]:
    """Enumerate opposite-class instances, keep the closest one under tau."""
    view = class_view(query.classifier)
    x = query.instance
    others = view.full_mask & ~view.class_mask(query.label)
    best: Optional[PartialAssignment] = None
    best_d = math.inf
    rank = 0
    while others:
        if others & 1:
            y = instance_of_rank(query.theory, rank)
            d = distance(y, x)
            if d < best_d and d < tau:
                best, best_d = y, d
        others >>= 1
        rank += 1
    return None if best is None else best.difference(x)


# -- core literals through the oracle ---------------------------------------------


def core_literals_sat(
    classifier: FormulaClassifier, c: str, oracle: Optional[SatOracle] = None
) -> PartialAssignment:
    """Core of a class via per-literal UNSAT checks (boolean formulas only)."""
    _require_boolean(classifier.theory)
    oracle = oracle if oracle is not None else SatOracle()
    indicator = class_indicator(classifier, c)
    theory = classifier.theory
    values: list[Optional[int]] = [None] * theory.n_features
    for i in range(theory.n_features):
        for v in (1, 0):
            hit = _solve_with_units(
                theory, indicator, [_unit_for(i, 1 - v)], oracle
            )
            if hit is None:
                values[i] = v
                break
    return PartialAssignment(theory, tuple(values))
