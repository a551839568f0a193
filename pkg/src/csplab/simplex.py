"""Exact rational two-phase simplex for small dense problems.

Solves ``max c.x  s.t.  A x = b, x >= 0`` over :class:`fractions.Fraction`.
Pricing is Dantzig's largest-coefficient rule; as soon as a degenerate pivot
occurs the solver switches to Bland's smallest-index rule until the next
pivot that makes strict progress, which rules out cycling.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence


class InfeasibleError(ValueError):
    pass


class UnboundedError(ValueError):
    pass


@dataclass(frozen=True)
class LPResult:
    value: Fraction
    x: tuple
    pivots: int


def _pivot(rows, obj, basis, r, col):
    prow = rows[r]
    pv = prow[col]
    if pv != 1:
        inv = 1 / pv
        for j, a in list(prow.items()):
            prow[j] = a * inv
    nz = list(prow.items())
    for i, row in enumerate(rows):
        if i == r:
            continue
        f = row.get(col)
        if not f:
            continue
        for j, a in nz:
            v = row.get(j, 0) - f * a
            if v:
                row[j] = v
            else:
                row.pop(j, None)
    f = obj.get(col)
    if f:
        for j, a in nz:
            v = obj.get(j, 0) - f * a
            if v:
                obj[j] = v
            else:
                obj.pop(j, None)
    basis[r] = col


def _run(rows, obj, basis, allowed, rhs):
    """Maximise the objective row ``obj`` (reduced costs, key ``rhs`` holds -z).

    Rows are sparse dicts mapping column -> coefficient; ``rhs`` is the
    column key of the right-hand side.
    """
    pivots = 0
    bland = False
    while True:
        cand = [j for j, v in obj.items() if j != rhs and v > 0 and j in allowed]
        if not cand:
            return pivots
        if bland:
            col = min(cand)
        else:
            col = max(cand, key=lambda j: (obj[j], -j))
        best = None
        for i, row in enumerate(rows):
            a = row.get(col)
            if a is None or a <= 0:
                continue
            ratio = row.get(rhs, 0) / a
            key = (ratio, basis[i])
            if best is None or key < best[0]:
                best = (key, i)
        if best is None:
            raise UnboundedError("objective is unbounded")
        degenerate = best[0][0] == 0
        _pivot(rows, obj, basis, best[1], col)
        pivots += 1
        bland = degenerate


def solve_lp(c: Sequence, A: Sequence[Sequence], b: Sequence) -> LPResult:
    """Maximise ``c.x`` subject to ``A x = b`` and ``x >= 0``, exactly.

    Redundant equality rows are detected and dropped after phase one.
    Raises :class:`InfeasibleError` or :class:`UnboundedError`.
    """
    m = len(A)
    nvar = len(c)
    rhs = -1
    rows = []
    for i in range(m):
        row = {j: Fraction(a) for j, a in enumerate(A[i]) if a}
        bi = Fraction(b[i])
        if bi < 0:
            row = {j: -a for j, a in row.items()}
            bi = -bi
        if bi:
            row[rhs] = bi
        row[nvar + i] = Fraction(1)
        rows.append(row)
    basis = [nvar + i for i in range(m)]

    # phase one: maximise -(sum of artificials)
    obj = {}
    for row in rows:
        for j, a in row.items():
            if j < nvar or j == rhs:
                obj[j] = obj.get(j, 0) + a
    obj = {j: v for j, v in obj.items() if v}
    pivots = _run(rows, obj, basis, set(range(nvar)), rhs)
    if obj.get(rhs, 0) != 0:
        raise InfeasibleError("equality system has no nonnegative solution")

    # drive zero-level artificials out of the basis, drop redundant rows
    keep = []
    for i in range(len(rows)):
        if basis[i] < nvar:
            keep.append(i)
            continue
        col = next((j for j in sorted(rows[i]) if 0 <= j < nvar), None)
        if col is None:
            continue
        _pivot(rows, {}, basis, i, col)
        pivots += 1
        keep.append(i)
    rows = [rows[i] for i in keep]
    basis = [basis[i] for i in keep]
    for row in rows:
        for j in [j for j in row if j >= nvar]:
            del row[j]

    # phase two
    obj = {j: Fraction(v) for j, v in enumerate(c) if v}
    for i, bv in enumerate(basis):
        f = obj.get(bv)
        if f:
            for j, a in rows[i].items():
                v = obj.get(j, 0) - f * a
                if v:
                    obj[j] = v
                else:
                    obj.pop(j, None)
    pivots += _run(rows, obj, basis, set(range(nvar)), rhs)

    x = [Fraction(0)] * nvar
    for i, bv in enumerate(basis):
        x[bv] = rows[i].get(rhs, Fraction(0))
    value = sum((Fraction(ci) * xi for ci, xi in zip(c, x) if ci), Fraction(0))
    return LPResult(value=value, x=tuple(x), pivots=pivots)
