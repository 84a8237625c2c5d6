#!/usr/bin/env python3
"""DIMACS front-end over the package's own solver, for end-to-end exec-backend runs."""

import sys

from cfexplain.sat import dpll


def main() -> int:
    n_vars = 0
    clauses = []
    with open(sys.argv[1]) as fh:
        for line in fh:
            line = line.strip()
            if not line or line.startswith("c"):
                continue
            if line.startswith("p cnf"):
                n_vars = int(line.split()[2])
                continue
            lits = [int(tok) for tok in line.split()]
            if lits and lits[-1] == 0:
                lits.pop()
            if lits:
                clauses.append(tuple(lits))
    model = dpll(clauses, n_vars)
    if model is None:
        print("s UNSATISFIABLE")
        return 0
    print("s SATISFIABLE")
    lits = [i + 1 if b else -(i + 1) for i, b in enumerate(model)]
    # Split the model across several v lines to exercise multi-line parsing.
    mid = max(1, len(lits) // 2)
    head, tail = lits[:mid], lits[mid:]
    print("v " + " ".join(str(l) for l in head))
    print("v " + " ".join(str(l) for l in tail) + " 0")
    return 0


if __name__ == "__main__":
    sys.exit(main())
