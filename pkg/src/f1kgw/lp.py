"""Exact linear programming over the rationals.

Integer-preserving simplex with Bland's rule: the tableau is kept as integers
``T`` together with a positive common denominator ``D``.
"""
from __future__ import annotations

from fractions import Fraction


def _pivot(T, D, r, s):
    p = T[r][s]
    row_r = T[r]
    for i, row in enumerate(T):
        if i == r:
            continue
        q = row[s]
        if q == 0:
            T[i] = [(x * p) // D for x in row]
        else:
            T[i] = [(x * p - q * y) // D for x, y in zip(row, row_r)]
    if p < 0:
        for i in range(len(T)):
            T[i] = [-x for x in T[i]]
        p = -p
    return p


def _run(T, D, basis, allowed):
    """Optimize the last row. Returns (status, D)."""
    m = len(T) - 1
    obj = T[-1]
    while True:
        obj = T[-1]
        s = next((j for j in allowed if obj[j] < 0), None)
        if s is None:
            return "optimal", D
        r = None
        for i in range(m):
            a = T[i][s]
            if a > 0:
                if r is None:
                    r = i
                    continue
                lhs = T[i][-1] * T[r][s]
                rhs = T[r][-1] * a
                if lhs < rhs or (lhs == rhs and basis[i] < basis[r]):
                    r = i
        if r is None:
            return "unbounded", D
        D = _pivot(T, D, r, s)
        basis[r] = s


def lp_solve(A, b, c=None):
    """Maximize ``c.x`` subject to ``A x = b`` and ``x >= 0``.

    Returns ``(status, x, value)`` with status in
    ``{"optimal", "infeasible", "unbounded"}``; ``x`` has Fraction entries.
    With ``c`` omitted this is a pure feasibility problem.
    """
    m = len(A)
    n = len(A[0]) if m else (len(c) if c is not None else 0)
    if m == 0:
        if c is not None and any(v > 0 for v in c):
            return "unbounded", None, None
        return "optimal", [Fraction(0)] * n, Fraction(0)
    rows = []
    for i in range(m):
        row, rhs = list(A[i]), b[i]
        if rhs < 0:
            row, rhs = [-x for x in row], -rhs
        art = [0] * m
        art[i] = 1
        rows.append(row + art + [rhs])
    obj = [0] * (n + m + 1)
    for row in rows:
        for j in range(n):
            obj[j] -= row[j]
        obj[-1] -= row[-1]
    T = rows + [obj]
    basis = list(range(n, n + m))
    D = 1
    _, D = _run(T, D, basis, range(n))
    if T[-1][-1] != 0:
        return "infeasible", None, None
    # drive zero-level artificials out of the basis
    for r in range(m):
        if basis[r] >= n:
            s = next((j for j in range(n) if T[r][j] != 0), None)
            if s is not None:
                D = _pivot(T, D, r, s)
                basis[r] = s
    if c is not None:
        obj = [0] * (n + m + 1)
        for j in range(n + m + 1):
            v = -(c[j] if j < n else 0) * D if j < n + m else 0
            for i in range(m):
                bj = basis[i]
                if bj < n and c[bj]:
                    v += c[bj] * T[i][j]
            obj[j] = v
        T[-1] = obj
        status, D = _run(T, D, basis, range(n))
        if status == "unbounded":
            return "unbounded", None, None
    x = [Fraction(0)] * n
    for i in range(m):
        if basis[i] < n:
            x[basis[i]] = Fraction(T[i][-1], D)
    value = sum((Fraction(cj) * xj for cj, xj in zip(c, x)), Fraction(0)) if c is not None else Fraction(0)
    return "optimal", x, value


def find_functional(zero_vectors, positive_vectors, dim):
    """A rational ``phi`` with ``phi.v = 0`` on ``zero_vectors`` and ``phi.v >= 1`` on the rest.

    Returns a list of Fractions or None when no such functional exists.
    """
    A, b = [], []
    for v in zero_vectors:
        A.append(list(v) + [-x for x in v] + [0] * len(positive_vectors))
        b.append(0)
    for k, v in enumerate(positive_vectors):
        slack = [0] * len(positive_vectors)
        slack[k] = -1
        A.append(list(v) + [-x for x in v] + slack)
        b.append(1)
    if not A:
        return [Fraction(0)] * dim
    status, x, _ = lp_solve(A, b)
    if status != "optimal":
        return None
    return [x[i] - x[dim + i] for i in range(dim)]


def positive_relation_support(vectors, dim):
    """Indices ``j`` admitting ``c >= 0`` with ``c_j > 0`` and ``sum c_i v_i = 0``.

    Solved as one LP maximizing ``sum t_j`` with ``t_j <= min(c_j, 1)``.
    """
    k = len(vectors)
    if k == 0:
        return set()
    # variables: c (k), t (k), w (k) slack for t<=1, z (k) slack for t<=c
    nv = 4 * k
    A, b = [], []
    for d in range(dim):
        row = [0] * nv
        for j, v in enumerate(vectors):
            row[j] = v[d]
        A.append(row)
        b.append(0)
    for j in range(k):
        row = [0] * nv
        row[k + j] = 1
        row[2 * k + j] = 1
        A.append(row)
        b.append(1)
        row = [0] * nv
        row[k + j] = 1
        row[j] = -1
        row[3 * k + j] = 1
        A.append(row)
        b.append(0)
    c = [0] * k + [1] * k + [0] * (2 * k)
    status, x, _ = lp_solve(A, b, c)
    assert status == "optimal"
    return {j for j in range(k) if x[k + j] == 1}


def rank_q(vectors) -> int:
    """Rank of a list of rational vectors."""
    rows = [[Fraction(x) for x in v] for v in vectors]
    rank = 0
    ncols = len(rows[0]) if rows else 0
    for col in range(ncols):
        piv = next((i for i in range(rank, len(rows)) if rows[i][col] != 0), None)
        if piv is None:
            continue
        rows[rank], rows[piv] = rows[piv], rows[rank]
        pr = rows[rank]
        for i in range(len(rows)):
            if i != rank and rows[i][col] != 0:
                f = rows[i][col] / pr[col]
                rows[i] = [x - f * y for x, y in zip(rows[i], pr)]
        rank += 1
    return rank
