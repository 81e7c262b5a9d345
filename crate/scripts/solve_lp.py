#!/usr/bin/env python3
"""Solve an LP-format MILP with HiGHS (via scipy) and write `name value` lines.

Usage: solve_lp.py MODEL.lp SOLUTION.sol [TIME_LIMIT_SECONDS]

Exit status: 0 on proven optimality (solution file written), 4 otherwise.
The parser covers the common LP-format subset: a Minimize/Maximize section,
`Subject To` rows with +/- integer or decimal coefficients, a Bounds
section with `lo <= var <= hi` / `var >= lo` / `var free`, and
`Generals`/`Binaries`/`Integers` sections.
"""

import sys

import numpy as np
from scipy import sparse
from scipy.optimize import LinearConstraint, milp


def tokenize(path):
    for raw in open(path):
        line = raw.split("\\")[0].rstrip("\n")
        yield line


SECTION_STARTS = {
    "minimize": "objective",
    "maximize": "objective",
    "subject": "constraints",
    "st": "constraints",
    "bounds": "bounds",
    "generals": "integers",
    "general": "integers",
    "integers": "integers",
    "binaries": "binaries",
    "binary": "binaries",
    "end": "end",
}


def parse_lp(path):
    sense = 1
    objective = {}
    rows = []  # (name, terms dict, op, rhs)
    bounds = {}  # var -> [lo, hi]
    integers = set()
    section = None
    pending = None  # row being continued across lines

    def flush(parts):
        nonlocal pending
        # parts: flat token list of one logical row "name: terms op rhs"
        text = " ".join(parts)
        name, rest = text.split(":", 1)
        for op in ("<=", ">=", "="):
            if op in rest:
                lhs, rhs = rest.rsplit(op, 1)
                rows.append((name.strip(), parse_terms(lhs), op, float(rhs)))
                pending = None
                return
        pending = parts

    def parse_terms(text):
        terms = {}
        sign = 1.0
        coeff = None
        for tok in text.split():
            if tok == "+":
                sign, coeff = 1.0, None
            elif tok == "-":
                sign, coeff = -1.0, None
            else:
                if tok[0].isdigit() or tok[0] == ".":
                    value = float(tok)
                    coeff = value if coeff is None else coeff * value
                else:
                    c = sign * (1.0 if coeff is None else coeff)
                    terms[tok] = terms.get(tok, 0.0) + c
                    sign, coeff = 1.0, None
        return terms

    for line in tokenize(path):
        stripped = line.strip()
        if not stripped:
            continue
        head = stripped.split()[0].lower()
        if head in SECTION_STARTS and ":" not in stripped:
            section = SECTION_STARTS[head]
            if head == "maximize":
                sense = -1
            continue
        if section == "objective":
            text = stripped.split(":", 1)[1] if ":" in stripped else stripped
            for var, c in parse_terms(text).items():
                objective[var] = objective.get(var, 0.0) + c
        elif section == "constraints":
            if ":" in stripped and pending:
                flush(pending)
            parts = (pending or []) + [stripped]
            flush(parts)
        elif section == "bounds":
            toks = stripped.split()
            if len(toks) == 2 and toks[1].lower() == "free":
                bounds[toks[0]] = [-np.inf, np.inf]
            elif len(toks) == 5 and toks[1] == "<=" and toks[3] == "<=":
                bounds[toks[2]] = [float(toks[0]), float(toks[4])]
            elif len(toks) == 3 and toks[1] == ">=":
                bounds.setdefault(toks[0], [0.0, np.inf])[0] = float(toks[2])
            elif len(toks) == 3 and toks[1] == "<=":
                bounds.setdefault(toks[0], [0.0, np.inf])[1] = float(toks[2])
            else:
                raise ValueError(f"unsupported bounds line: {stripped}")
        elif section == "integers":
            integers.update(stripped.split())
        elif section == "binaries":
            for var in stripped.split():
                integers.add(var)
                bounds[var] = [0.0, 1.0]
    return sense, objective, rows, bounds, integers


def main():
    if len(sys.argv) < 3:
        print(__doc__, file=sys.stderr)
        return 4
    model_path, solution_path = sys.argv[1], sys.argv[2]
    time_limit = float(sys.argv[3]) if len(sys.argv) > 3 else None

    sense, objective, rows, bounds, integers = parse_lp(model_path)
    names = sorted(
        set(objective) | {v for _, t, _, _ in rows for v in t} | set(bounds) | integers
    )
    index = {name: i for i, name in enumerate(names)}
    n = len(names)

    c = np.zeros(n)
    for var, coeff in objective.items():
        c[index[var]] = sense * coeff

    data, row_idx, col_idx, lo, hi = [], [], [], [], []
    for r, (_, terms, op, rhs) in enumerate(rows):
        for var, coeff in terms.items():
            data.append(coeff)
            row_idx.append(r)
            col_idx.append(index[var])
        lo.append(rhs if op in ("=", ">=") else -np.inf)
        hi.append(rhs if op in ("=", "<=") else np.inf)
    matrix = sparse.csr_matrix((data, (row_idx, col_idx)), shape=(len(rows), n))

    var_lo = np.zeros(n)
    var_hi = np.full(n, np.inf)
    for var, (a, b) in bounds.items():
        var_lo[index[var]] = a
        var_hi[index[var]] = b
    integrality = np.array([1 if name in integers else 0 for name in names])

    options = {"mip_rel_gap": 0.0}
    if time_limit is not None:
        options["time_limit"] = time_limit
    result = milp(
        c,
        constraints=LinearConstraint(matrix, lo, hi),
        bounds=__import__("scipy.optimize", fromlist=["Bounds"]).Bounds(var_lo, var_hi),
        integrality=integrality,
        options=options,
    )
    if result.status != 0 or result.x is None:
        print(f"milp status {result.status}: {result.message}", file=sys.stderr)
        return 4
    with open(solution_path, "w") as out:
        for name, value in zip(names, result.x):
            rounded = round(value)
            if rounded != 0:
                out.write(f"{name} {rounded}\n")
    return 0


if __name__ == "__main__":
    sys.exit(main())
