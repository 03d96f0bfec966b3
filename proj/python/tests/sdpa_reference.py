"""Independent reader for sparse SDPA files, solved with cvxpy.

Solves the SDPA dual side  max F0 . Y  s.t.  Fi . Y = ci,  Y >= 0  (block
diagonal), which is how pepkit exports its programs.
"""

import re

import cvxpy as cp
import numpy as np


def read_sdpa(text):
    lines = [l for l in text.splitlines() if l.strip() and l.lstrip()[0] not in '"*']
    tokens = lambda s: [t for t in re.split(r"[\s,(){}]+", s.split("=")[0]) if t]
    m = int(tokens(lines[0])[0])
    nblocks = int(tokens(lines[1])[0])
    blocks = [int(t) for t in tokens(lines[2])][:nblocks]
    c = np.array([float(t) for t in re.split(r"[\s,(){}]+", lines[3]) if t][:m])
    entries = []
    for line in lines[4:]:
        mat, blk, i, j, v = line.split()[:5]
        entries.append((int(mat), int(blk) - 1, int(i) - 1, int(j) - 1, float(v)))
    return m, blocks, c, entries


def solve_sdpa(text, solver="CLARABEL"):
    m, blocks, c, entries = read_sdpa(text)
    Y = []
    cons = []
    for b in blocks:
        if b > 0:
            X = cp.Variable((b, b), symmetric=True)
            cons.append(X >> 0)
        else:
            X = cp.Variable(-b, nonneg=True)
        Y.append(X)

    def inner(k):
        terms = []
        for mat, blk, i, j, v in entries:
            if mat != k:
                continue
            if blocks[blk] > 0:
                terms.append((v if i == j else 2 * v) * Y[blk][i, j])
            else:
                terms.append(v * Y[blk][i])
        return cp.sum(cp.hstack(terms)) if terms else cp.Constant(0.0)

    cons += [inner(k) == c[k - 1] for k in range(1, m + 1)]
    prob = cp.Problem(cp.Maximize(inner(0)), cons)
    prob.solve(solver=solver)
    return prob.status, prob.value
