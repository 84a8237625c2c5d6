"""Classifiers over finite theories: explicit tables and boolean formulas.

A classifier is a total, surjective map from instances to class labels.
``TableClassifier`` stores one row per instance; ``FormulaClassifier`` wraps a
propositional formula over an all-boolean theory and labels models with one
class and counter-models with the other.  ``Query`` bundles (theory,
classifier, instance) and is the unit every explainer consumes; surjectivity
is enforced when the query is built, so downstream code may rely on every
class having at least one instance.

``ClassView`` exposes a classifier as bit-parallel truth-table masks (one
Python bigint per (feature, value) pair and per class), which is what the
brute-force oracles use to evaluate universally quantified definitions
quickly without any third-party dependencies.
"""

from __future__ import annotations

import csv
import io
from dataclasses import dataclass
from typing import Iterable, Mapping, Optional, Sequence, Union

from .formulas import Formula, evaluate, evaluate_bitwise, parse_formula
from .theory import (
    InvalidLiteral,
    PartialAssignment,
    Theory,
    TheoryError,
    TheoryMismatch,
    as_instance,
    instance_of_rank,
    rank_of,
    strides,
    validate_theory,
)


class ClassifierError(ValueError):
    """Invalid classifier construction or use."""


class IncompleteTable(ClassifierError):
    """A table classifier does not cover the whole feature space."""


class NotSurjective(ClassifierError):
    """Some class label is never produced."""


class UnknownClass(ClassifierError):
    """A class label outside the classifier's theory."""


_VIEW_LIMIT = 1 << 22  # largest feature space we will materialize masks for


@dataclass(frozen=True)
class SurjectivityVerdict:
    ok: bool
    missing: tuple[str, ...]


class Classifier:
    """Total map from instances of a fixed theory to class labels."""

    theory: Theory

    def classify(self, x: PartialAssignment) -> str:
        raise NotImplementedError

    def class_of_rank(self, rank: int) -> str:
        raise NotImplementedError

    def to_json_dict(self) -> dict:
        raise NotImplementedError

    def _check_instance(self, x: PartialAssignment) -> None:
        if x.theory is not self.theory and x.theory != self.theory:
            raise TheoryMismatch("instance belongs to a different theory")
        as_instance(x)


class TableClassifier(Classifier):
    """Explicit class label for every instance, stored in rank order."""

    def __init__(self, theory: Theory, classes_by_rank: Sequence[str]):
        n = theory.instance_count()
        table = tuple(classes_by_rank)
        if len(table) != n:
            raise IncompleteTable(
                f"table has {len(table)} rows; theory has {n} instances"
            )
        known = set(theory.classes)
        for c in table:
            if c not in known:
                raise UnknownClass(f"class {c!r} is not in the theory")
        self.theory = theory
        self.table = table
        self._view: Optional[ClassView] = None

    def __eq__(self, other: object) -> bool:
        return (
            isinstance(other, TableClassifier)
            and self.theory == other.theory
            and self.table == other.table
        )

    def __hash__(self) -> int:
        return hash((self.theory, self.table))

    @staticmethod
    def from_rows(
        theory: Theory, rows: Iterable[tuple[Mapping, str]]
    ) -> "TableClassifier":
        """Build from (instance mapping, class) pairs covering all instances."""
        n = theory.instance_count()
        table: list[Optional[str]] = [None] * n
        for mapping, label in rows:
            x = PartialAssignment.from_dict(theory, mapping)
            as_instance(x)
            r = rank_of(x)
            if table[r] is not None:
                raise ClassifierError(f"instance {x.render()} listed twice")
            table[r] = str(label)
        missing = [instance_of_rank(theory, r).render() for r, c in enumerate(table) if c is None]
        if missing:
            raise IncompleteTable(
                f"table misses {len(missing)} instance(s), e.g. {missing[0]}"
            )
        return TableClassifier(theory, table)  # type: ignore[arg-type]

    @staticmethod
    def from_csv(text: str, theory: Theory) -> "TableClassifier":
        """Parse a CSV with one column per feature plus a 'class' column."""
        reader = csv.DictReader(io.StringIO(text))
        if reader.fieldnames is None:
            raise ClassifierError("empty classifier CSV")
        expected = set(theory.features) | {"class"}
        got = set(reader.fieldnames)
        if got != expected:
            raise ClassifierError(
                f"CSV columns {sorted(got)} do not match features + 'class' "
                f"({sorted(expected)})"
            )
        rows = []
        for row in reader:
            label = row.pop("class")
            rows.append((row, label))
        return TableClassifier.from_rows(theory, rows)

    def to_csv(self) -> str:
        out = io.StringIO()
        writer = csv.writer(out, lineterminator="\n")
        writer.writerow(list(self.theory.features) + ["class"])
        for r, label in enumerate(self.table):
            x = instance_of_rank(self.theory, r)
            writer.writerow([v for _, v in x.literals()] + [label])
        return out.getvalue()

    def classify(self, x: PartialAssignment) -> str:
        self._check_instance(x)
        return self.table[rank_of(x)]

    def class_of_rank(self, rank: int) -> str:
        return self.table[rank]

    def to_json_dict(self) -> dict:
        return {
            "type": "table",
            "rows": [
                {
                    "instance": instance_of_rank(self.theory, r).to_dict(),
                    "class": label,
                }
                for r, label in enumerate(self.table)
            ],
        }


class FormulaClassifier(Classifier):
    """Binary classifier defined by a propositional formula.

    Requires an all-boolean theory (every domain has exactly two values).  An
    atom is true when its feature takes the second domain value.  Instances
    satisfying the formula get ``class_if_true``, the rest ``class_if_false``.
    """

    def __init__(
        self,
        theory: Theory,
        formula: Union[Formula, str],
        class_if_true: str,
        class_if_false: str,
    ):
        for f, d in zip(theory.features, theory.domains):
            if len(d) != 2:
                raise ClassifierError(
                    f"formula classifiers need boolean domains; feature {f!r} has {len(d)} values"
                )
        if isinstance(formula, str):
            formula = parse_formula(formula)
        unknown = formula.atoms() - set(theory.features)
        if unknown:
            raise ClassifierError(f"formula uses unknown features {sorted(unknown)}")
        if class_if_true == class_if_false:
            raise ClassifierError("the two class labels must differ")
        for c in (class_if_true, class_if_false):
            if c not in theory.classes:
                raise UnknownClass(f"class {c!r} is not in the theory")
        self.theory = theory
        self.formula = formula
        self.class_if_true = str(class_if_true)
        self.class_if_false = str(class_if_false)
        self._view: Optional[ClassView] = None
        verdict = check_surjective(self)
        if not verdict.ok:
            raise NotSurjective(
                "formula is constant; class(es) "
                f"{list(verdict.missing)} can never be produced"
            )

    def __eq__(self, other: object) -> bool:
        return (
            isinstance(other, FormulaClassifier)
            and self.theory == other.theory
            and self.formula == other.formula
            and self.class_if_true == other.class_if_true
            and self.class_if_false == other.class_if_false
        )

    def __hash__(self) -> int:
        return hash(
            (self.theory, self.formula, self.class_if_true, self.class_if_false)
        )

    def truth_of(self, x: PartialAssignment) -> bool:
        self._check_instance(x)
        env = {f: v == 1 for f, v in zip(self.theory.features, x.values)}
        return evaluate(self.formula, env)

    def classify(self, x: PartialAssignment) -> str:
        return self.class_if_true if self.truth_of(x) else self.class_if_false

    def class_of_rank(self, rank: int) -> str:
        view = class_view(self)
        hit = (view.class_masks[self.class_if_true] >> rank) & 1
        return self.class_if_true if hit else self.class_if_false

    def to_json_dict(self) -> dict:
        return {
            "type": "formula",
            "formula": str(self.formula),
            "class_if_true": self.class_if_true,
            "class_if_false": self.class_if_false,
        }

    @staticmethod
    def from_text(text: str, theory: Theory) -> "FormulaClassifier":
        """Parse the two-line format: ``classes: <true>,<false>`` + formula."""
        lines = [ln for ln in text.splitlines() if ln.strip()]
        if len(lines) < 2 or not lines[0].lower().startswith("classes:"):
            raise ClassifierError(
                "expected 'classes: <true-class>,<false-class>' then the formula"
            )
        spec = lines[0].split(":", 1)[1]
        labels = [part.strip() for part in spec.split(",")]
        if len(labels) != 2 or not all(labels):
            raise ClassifierError("classes line must name exactly two labels")
        return FormulaClassifier(theory, " ".join(lines[1:]), labels[0], labels[1])


class ClassView:
    """Bit-parallel truth-table masks for a classifier.

    Bit r of every mask talks about the instance of rank r:
    ``value_masks[i][v]`` has bit r set when that instance gives feature i its
    v-th value, and ``class_masks[c]`` where the classifier answers c.
    """

    def __init__(self, classifier: Classifier):
        theory = classifier.theory
        n_rows = theory.instance_count()
        if n_rows > _VIEW_LIMIT:
            raise ClassifierError(
                f"feature space of {n_rows} instances is too large to audit exhaustively"
            )
        self.theory = theory
        self.n_rows = n_rows
        self.full_mask = (1 << n_rows) - 1
        st = strides(theory)
        self.value_masks: list[list[int]] = []
        for i, domain in enumerate(theory.domains):
            stride, m = st[i], len(domain)
            period = stride * m
            run = (1 << stride) - 1
            repeats = n_rows // period
            per_feature = []
            for v in range(m):
                block = run << (v * stride)
                mask = 0
                for k in range(repeats):
                    mask |= block << (k * period)
                per_feature.append(mask)
            self.value_masks.append(per_feature)

        if isinstance(classifier, FormulaClassifier):
            columns = {
                f: self.value_masks[i][1] for i, f in enumerate(theory.features)
            }
            true_mask = evaluate_bitwise(classifier.formula, columns, self.full_mask)
            self.class_masks = {
                classifier.class_if_true: true_mask,
                classifier.class_if_false: self.full_mask & ~true_mask,
            }
        else:
            masks: dict[str, int] = {c: 0 for c in theory.classes}
            for r in range(n_rows):
                masks[classifier.class_of_rank(r)] |= 1 << r
            self.class_masks = masks

    def class_mask(self, c: str) -> int:
        try:
            return self.class_masks[c]
        except KeyError:
            raise UnknownClass(f"class {c!r} is not in the theory") from None

    def mask_containing(self, e: PartialAssignment) -> int:
        """Instances that extend e (contain every literal of e)."""
        mask = self.full_mask
        for i, v in e.indexed_literals():
            mask &= self.value_masks[i][v]
        return mask

    def mask_residual(self, x: PartialAssignment, e: PartialAssignment) -> int:
        """Instances differing from x exactly on e's features (e part of x)."""
        if not e.subset_of(x):
            return 0
        mask = self.full_mask
        for i, xv in enumerate(x.values):
            if e.values[i] is not None:
                mask &= self.full_mask & ~self.value_masks[i][xv]
            else:
                mask &= self.value_masks[i][xv]
        return mask

    def rank_in(self, rank: int, mask: int) -> bool:
        return bool((mask >> rank) & 1)


def class_view(classifier: Classifier) -> ClassView:
    view = getattr(classifier, "_view", None)
    if view is None:
        view = ClassView(classifier)
        classifier._view = view
    return view


# -- operations ----------------------------------------------------------------


def classify(classifier: Classifier, x: PartialAssignment) -> str:
    return classifier.classify(x)


def check_surjective(classifier: Classifier) -> SurjectivityVerdict:
    """Is every class produced by at least one instance?

    Tables are scanned; formulas amount to two satisfiability checks (the
    formula and its negation), answered from the bit-parallel truth table.
    """
    if isinstance(classifier, FormulaClassifier):
        view = ClassView(classifier)  # before construction finishes; no cache
        missing = tuple(
            c
            for c in (classifier.class_if_true, classifier.class_if_false)
            if view.class_masks[c] == 0
        )
        extra = tuple(
            c
            for c in classifier.theory.classes
            if c not in (classifier.class_if_true, classifier.class_if_false)
        )
        return SurjectivityVerdict(not missing and not extra, missing + extra)
    seen = set()
    for r in range(classifier.theory.instance_count()):
        seen.add(classifier.class_of_rank(r))
    missing = tuple(c for c in classifier.theory.classes if c not in seen)
    return SurjectivityVerdict(not missing, missing)


def core_literals(
    classifier: Classifier, c: str, method: str = "auto"
) -> PartialAssignment:
    """Literals present in every instance of class c, as an assignment.

    ``method="scan"`` intersects the instances of class c directly;
    ``method="sat"`` (formula classifiers only) asks a SAT oracle, literal by
    literal, whether class-indicator(c) together with any other value of the
    feature is unsatisfiable.  ``"auto"`` scans tables and uses the oracle for
    formulas.
    """
    theory = classifier.theory
    if c not in theory.classes:
        raise UnknownClass(f"class {c!r} is not in the theory")
    if method == "auto":
        method = "sat" if isinstance(classifier, FormulaClassifier) else "scan"
    if method == "sat":
        if not isinstance(classifier, FormulaClassifier):
            raise ClassifierError("the SAT route needs a formula classifier")
        from .sat import core_literals_sat  # local import; sat builds on us

        return core_literals_sat(classifier, c)
    if method != "scan":
        raise ValueError(f"unknown method {method!r}")
    view = class_view(classifier)
    cmask = view.class_mask(c)
    values: list[Optional[int]] = [None] * theory.n_features
    if cmask == 0:
        # Unreachable through Query (surjectivity enforced) but total anyway.
        return PartialAssignment(theory, tuple(values))
    for i in range(theory.n_features):
        for v in range(len(theory.domains[i])):
            if cmask & ~view.value_masks[i][v] == 0:
                values[i] = v
                break
    return PartialAssignment(theory, tuple(values))


@dataclass(frozen=True)
class Query:
    """The unit of explanation: which other class could instance x get?"""

    theory: Theory
    classifier: Classifier
    instance: PartialAssignment

    def __post_init__(self) -> None:
        if self.classifier.theory is not self.theory and self.classifier.theory != self.theory:
            raise TheoryMismatch("classifier belongs to a different theory")
        if self.instance.theory is not self.theory and self.instance.theory != self.theory:
            raise TheoryMismatch("instance belongs to a different theory")
        as_instance(self.instance)
        ok = getattr(self.classifier, "_surjective_ok", None)
        if ok is None:
            verdict = check_surjective(self.classifier)
            if not verdict.ok:
                raise NotSurjective(
                    f"class(es) {list(verdict.missing)} are never produced"
                )
            object.__setattr__(self.classifier, "_surjective_ok", True)

    @property
    def label(self) -> str:
        return self.classifier.classify(self.instance)

    def to_json_dict(self) -> dict:
        return {
            "theory": self.theory.to_json_dict(),
            "classifier": self.classifier.to_json_dict(),
            "instance": self.instance.to_dict(),
        }


def classifier_from_json(raw: Mapping, theory: Theory) -> Classifier:
    """Inverse of Classifier.to_json_dict."""
    kind = raw.get("type")
    if kind == "table":
        return TableClassifier.from_rows(
            theory, [(row["instance"], row["class"]) for row in raw["rows"]]
        )
    if kind == "formula":
        return FormulaClassifier(
            theory, raw["formula"], raw["class_if_true"], raw["class_if_false"]
        )
    raise ClassifierError(f"unknown classifier type {kind!r}")


def query_from_json(raw: Mapping) -> Query:
    theory = validate_theory(raw["theory"])
    classifier = classifier_from_json(raw["classifier"], theory)
    instance = PartialAssignment.from_dict(theory, raw["instance"])
    return Query(theory, classifier, instance)
