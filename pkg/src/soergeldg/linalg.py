"""Sparse exact linear algebra over Q and over rational functions.

Used by the generator-derivation solver, basis expression, homotopy search
and windowed cohomology.  Systems are kept as sparse rows {var: Fraction}.
"""
from __future__ import annotations

from fractions import Fraction

from .ring import RationalFunction, Polynomial


class LinearSystem:
    """Sparse linear system over Q with named unknowns.

    Rows are (coeffs: {var: Fraction}, rhs: Fraction).  ``solve`` returns
    (particular, nullspace) with dicts over the declared variables, or None
    when inconsistent.
    """

    def __init__(self):
        self.rows = []
        self.vars = []
        self._var_index = {}

    def add_var(self, name):
        if name not in self._var_index:
            self._var_index[name] = len(self.vars)
            self.vars.append(name)

    def add_equation(self, coeffs, rhs=Fraction(0)):
        row = {}
        for v, c in coeffs.items():
            c = Fraction(c)
            if c:
                self.add_var(v)
                row[self._var_index[v]] = c
        self.rows.append((row, Fraction(rhs)))

    def solve(self):
        """Gaussian elimination; returns (particular, nullspace_basis) or None."""
        n = len(self.vars)
        rows = [(dict(r), b) for r, b in self.rows if r or b]
        pivots = {}  # var index -> reduced row
        for row, rhs in rows:
            row = dict(row)
            # reduce against existing pivots
            for v in sorted(row):
                if v in pivots and row.get(v):
                    prow, prhs = pivots[v]
                    f = row[v]
                    for w, c in prow.items():
                        nv = row.get(w, Fraction(0)) - f * c
                        if nv:
                            row[w] = nv
                        else:
                            row.pop(w, None)
                    rhs = rhs - f * prhs
            if not row:
                if rhs:
                    return None
                continue
            p = min(row)
            inv = 1 / row[p]
            row = {w: c * inv for w, c in row.items()}
            rhs = rhs * inv
            # back-substitute into existing pivot rows
            for q, (prow, prhs) in list(pivots.items()):
                f = prow.get(p)
                if f:
                    for w, c in row.items():
                        nv = prow.get(w, Fraction(0)) - f * c
                        if nv:
                            prow[w] = nv
                        else:
                            prow.pop(w, None)
                    pivots[q] = (prow, prhs - f * rhs)
            pivots[p] = (row, rhs)
        particular = {self.vars[i]: Fraction(0) for i in range(n)}
        for p, (row, rhs) in pivots.items():
            particular[self.vars[p]] = rhs
        free = [i for i in range(n) if i not in pivots]
        null = []
        for fv in free:
            vec = {self.vars[i]: Fraction(0) for i in range(n)}
            vec[self.vars[fv]] = Fraction(1)
            for p, (row, _) in pivots.items():
                c = row.get(fv)
                if c:
                    vec[self.vars[p]] = -c
            null.append(vec)
        return particular, null


def rf_matrix_inverse(entries, keys):
    """Invert the square matrix {(r, c): RationalFunction} over the given key
    list; returns the inverse dict or None when singular."""
    n = len(keys)
    if n == 0:
        return {}
    some = next(iter(entries.values()))
    nv = some.nvars
    one = RationalFunction.constant(nv, 1)
    zero = RationalFunction.constant(nv, 0)
    a = [[entries.get((r, c), zero) for c in keys] for r in keys]
    inv = [[one if i == j else zero for j in range(n)] for i in range(n)]
    for col in range(n):
        piv = None
        for r in range(col, n):
            if not a[r][col].is_zero():
                piv = r
                break
        if piv is None:
            return None
        a[col], a[piv] = a[piv], a[col]
        inv[col], inv[piv] = inv[piv], inv[col]
        d = a[col][col]
        a[col] = [x / d for x in a[col]]
        inv[col] = [x / d for x in inv[col]]
        for r in range(n):
            if r != col and not a[r][col].is_zero():
                f = a[r][col]
                a[r] = [x - f * y for x, y in zip(a[r], a[col])]
                inv[r] = [x - f * y for x, y in zip(inv[r], inv[col])]
    out = {}
    for i, r in enumerate(keys):
        for j, c in enumerate(keys):
            if not inv[i][j].is_zero():
                out[(r, c)] = inv[i][j]
    return out


def fraction_matrix_rank(rows):
    """Rank over Q of a list of sparse rows {col: Fraction}."""
    pivots = {}
    rank = 0
    for row in rows:
        row = dict(row)
        for v in sorted(row):
            if v in pivots and row.get(v):
                f = row[v]
                for w, c in pivots[v].items():
                    nv = row.get(w, Fraction(0)) - f * c
                    if nv:
                        row[w] = nv
                    else:
                        row.pop(w, None)
        if row:
            p = min(row)
            inv = 1 / row[p]
            pivots[p] = {w: c * inv for w, c in row.items()}
            rank += 1
    return rank
