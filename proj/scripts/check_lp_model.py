#!/usr/bin/env python3
"""Solve an exported LP-format collection model with scipy's MILP solver.

Parses the subset of CPLEX LP syntax that `rmcap solve --export-lp` emits
(one constraint per line, explicit Bounds and Binaries sections) and prints
the optimal objective value, so the built-in branch-and-bound can be checked
against an independent solver.

Usage: check_lp_model.py MODEL.lp
Output: "objective <value>" on success; "infeasible" with exit code 3 when
the model has no feasible point.
"""
import re
import sys

import numpy as np
from scipy.optimize import Bounds, LinearConstraint, milp

_NUM = re.compile(r"^[+-]?(\d+(\.\d*)?|\.\d+)([eE][+-]?\d+)?$")


def parse_terms(tokens):
    """Yields (coefficient, variable) pairs from an expression token list."""
    sign = 1.0
    coef = None
    for tok in tokens:
        if tok == "+":
            sign = 1.0
        elif tok == "-":
            sign = -1.0
        elif _NUM.match(tok):
            coef = float(tok)
        else:
            yield (sign * (1.0 if coef is None else coef), tok)
            sign = 1.0
            coef = None
    if coef is not None:
        raise ValueError("dangling coefficient in expression")


def parse_model(path):
    sense = None
    objective = {}
    constraints = []  # (terms dict, relation, rhs)
    var_bounds = {}
    binaries = set()
    section = None
    with open(path) as fh:
        for raw in fh:
            line = raw.strip()
            if not line or line.startswith("\\"):
                continue
            low = line.lower()
            if low in ("minimize", "maximize"):
                sense = low
                section = "objective"
                continue
            if low == "subject to":
                section = "constraints"
                continue
            if low == "bounds":
                section = "bounds"
                continue
            if low in ("binaries", "binary"):
                section = "binaries"
                continue
            if low == "end":
                break

            if section == "objective":
                body = line.split(":", 1)[1] if ":" in line else line
                for coef, var in parse_terms(body.split()):
                    objective[var] = objective.get(var, 0.0) + coef
            elif section == "constraints":
                if ":" not in line:
                    raise ValueError("constraint without a name: " + line)
                body = line.split(":", 1)[1]
                m = re.search(r"(<=|>=|=)", body)
                if not m:
                    raise ValueError("constraint without a relation: " + line)
                rel = m.group(1)
                lhs, rhs = body.split(rel, 1)
                terms = {}
                for coef, var in parse_terms(lhs.split()):
                    terms[var] = terms.get(var, 0.0) + coef
                constraints.append((terms, rel, float(rhs)))
            elif section == "bounds":
                parts = line.split()
                # "<lo> <= <var> <= <hi>"
                if len(parts) != 5 or parts[1] != "<=" or parts[3] != "<=":
                    raise ValueError("unsupported bound line: " + line)
                var_bounds[parts[2]] = (float(parts[0]), float(parts[4]))
            elif section == "binaries":
                binaries.update(line.split())
    if sense is None:
        raise ValueError("model has no objective sense")
    return sense, objective, constraints, var_bounds, binaries


def main():
    if len(sys.argv) != 2:
        print("usage: check_lp_model.py MODEL.lp", file=sys.stderr)
        return 2
    sense, objective, constraints, var_bounds, binaries = parse_model(sys.argv[1])

    names = {}
    def idx(v):
        if v not in names:
            names[v] = len(names)
        return names[v]
    for v in objective:
        idx(v)
    for terms, _, _ in constraints:
        for v in terms:
            idx(v)
    for v in var_bounds:
        idx(v)
    for v in binaries:
        idx(v)

    nvar = len(names)
    c = np.zeros(nvar)
    for v, coef in objective.items():
        c[names[v]] = coef
    if sense == "maximize":
        c = -c

    rows = np.zeros((len(constraints), nvar))
    lo = np.empty(len(constraints))
    hi = np.empty(len(constraints))
    for r, (terms, rel, rhs) in enumerate(constraints):
        for v, coef in terms.items():
            rows[r, names[v]] = coef
        if rel == "<=":
            lo[r], hi[r] = -np.inf, rhs
        elif rel == ">=":
            lo[r], hi[r] = rhs, np.inf
        else:
            lo[r], hi[r] = rhs, rhs

    lb = np.zeros(nvar)
    ub = np.full(nvar, np.inf)
    integrality = np.zeros(nvar)
    for v in binaries:
        ub[names[v]] = 1.0
        integrality[names[v]] = 1
    for v, (vlo, vhi) in var_bounds.items():
        lb[names[v]] = vlo
        ub[names[v]] = vhi

    res = milp(c=c, constraints=LinearConstraint(rows, lo, hi),
               integrality=integrality, bounds=Bounds(lb, ub))
    if res.status == 2:
        print("infeasible")
        return 3
    if not res.success:
        print("solver failed: " + str(res.message), file=sys.stderr)
        return 1
    value = res.fun if sense == "minimize" else -res.fun
    print("objective %.10f" % value)
    return 0


if __name__ == "__main__":
    sys.exit(main())
