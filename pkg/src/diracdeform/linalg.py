"""
Sparse Gaussian elimination over the rationals.

Matrices are lists of rows, each row a dict ``{column: Fraction}``
with no stored zeros.  Pivots are chosen in increasing column order and,
within a column, from the lowest remaining row index, so every result is
deterministic.
"""

from fractions import Fraction


def _axpy(target, source, factor):
    # target -= factor * source, in place
    for j, v in source.items():
        w = target.get(j, 0) - factor * v
        if w:
            target[j] = w
        else:
            target.pop(j, None)


def rref(rows, ncols):
    """Reduced row echelon form.  Returns (rows, pivot_columns)."""
    work = [dict(r) for r in rows if r]
    pivots = []
    done = []
    for col in range(ncols):
        if not work:
            break
        pick = None
        for idx, r in enumerate(work):
            if col in r:
                pick = idx
                break
        if pick is None:
            continue
        row = work.pop(pick)
        inv = 1 / Fraction(row[col])
        row = {j: v * inv for j, v in row.items()}
        for r in work:
            f = r.get(col)
            if f:
                _axpy(r, row, f)
        for r in done:
            f = r.get(col)
            if f:
                _axpy(r, row, f)
        work = [r for r in work if r]
        done.append(row)
        pivots.append(col)
    return done, pivots


def rank(rows, ncols):
    return len(rref(rows, ncols)[1])


def nullspace(rows, ncols):
    """Basis of {x : A x = 0}, one vector per free column, in column order."""
    red, pivots = rref(rows, ncols)
    pivset = set(pivots)
    basis = []
    for free in range(ncols):
        if free in pivset:
            continue
        vec = {free: Fraction(1)}
        for r, p in zip(red, pivots):
            v = r.get(free)
            if v:
                vec[p] = -v
        basis.append(vec)
    return basis


def transpose(rows, ncols):
    cols = [dict() for _ in range(ncols)]
    for i, r in enumerate(rows):
        for j, v in r.items():
            cols[j][i] = v
    return cols


def solve(rows, ncols, rhs):
    """Solve A x = b with free variables set to zero.

    ``rhs`` maps row index to value.  Returns the solution dict or None if
    the system is inconsistent.
    """
    aug = []
    for i, r in enumerate(rows):
        row = dict(r)
        b = rhs.get(i)
        if b:
            row[ncols] = Fraction(b)
        aug.append(row)
    for i, b in rhs.items():
        if i >= len(rows) and b:
            return None
    red, pivots = rref(aug, ncols + 1)
    if ncols in pivots:
        return None
    x = {}
    for r, p in zip(red, pivots):
        v = r.get(ncols)
        if v:
            x[p] = v
    return x


def left_certificate(rows, ncols, rhs):
    """A vector y with y A = 0 and y . b != 0, or None if b is in the
    column span."""
    nrows = len(rows)
    for y in nullspace(transpose(rows, ncols), nrows):
        if sum(v * rhs.get(i, 0) for i, v in y.items()):
            return y
    return None
