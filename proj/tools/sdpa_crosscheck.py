#!/usr/bin/env python3
"""Solve an SDPA sparse file with CVXPY and print the optimum as JSON.

The file is read as: minimize c'x + c0 subject to sum_i F_i x_i - F_0 >= 0,
where c0 comes from an optional `"objective offset c0 = <v>` header line.
Used to record the external value that the acceptance suite compares with.
"""

import argparse
import json
import re
import sys

import cvxpy as cp
import numpy as np


def read_sdpa(path):
    offset = 0.0
    rows = []
    with open(path) as f:
        for line in f:
            if line.startswith(('"', "*")):
                m = re.match(r'["*]objective offset c0 = (\S+)', line)
                if m:
                    offset = float(m.group(1))
                continue
            line = re.sub(r"[,{}()]", " ", line).split()
            if line:
                rows.append(line)
    m = int(rows[0][0])
    nblocks = int(rows[1][0])
    sizes = [int(v) for v in rows[2][:nblocks]]
    rest = [tok for row in rows[3:] for tok in row]
    c = np.array([float(v) for v in rest[:m]])
    entries = rest[m:]
    mats = [[np.zeros((abs(s), abs(s))) for s in sizes] for _ in range(m + 1)]
    for k in range(0, len(entries), 5):
        mat, blk, i, j = (int(v) for v in entries[k:k + 4])
        v = float(entries[k + 4])
        A = mats[mat][blk - 1]
        A[i - 1, j - 1] = v
        A[j - 1, i - 1] = v
    return c, offset, sizes, mats


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("file")
    ap.add_argument("--solver", default="CLARABEL")
    args = ap.parse_args()

    c, offset, sizes, mats = read_sdpa(args.file)
    m = len(c)
    x = cp.Variable(m)
    cons = []
    for b, s in enumerate(sizes):
        used = [i for i in range(1, m + 1) if np.any(mats[i][b])]
        expr = -mats[0][b] + sum(x[i - 1] * mats[i][b] for i in used)
        if s > 0:
            cons.append(0.5 * (expr + expr.T) >> 0)
        else:
            cons.append(cp.diag(expr) >= 0)
    prob = cp.Problem(cp.Minimize(c @ x + offset), cons)
    prob.solve(solver=args.solver)
    json.dump({"file": args.file.split("/")[-1], "solver": args.solver,
               "cvxpy": cp.__version__, "status": prob.status,
               "objective": prob.value}, sys.stdout, indent=2)
    print()


if __name__ == "__main__":
    main()
