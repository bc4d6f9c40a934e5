"""Exact linear algebra over the rationals (dense, desk scale)."""

from __future__ import annotations

from fractions import Fraction
from math import gcd


def frac_matrix(rows):
    """Copy a nested sequence into a list-of-lists of Fractions."""
    return [[Fraction(x) for x in row] for row in rows]


def rref(mat):
    """Reduced row echelon form.

    Returns (R, pivots) where pivots[j] is the pivot column of row j.
    The input is not modified.
    """
    m = [row[:] for row in mat]
    nrows = len(m)
    ncols = len(m[0]) if nrows else 0
    pivots = []
    r = 0
    for c in range(ncols):
        pr = None
        for i in range(r, nrows):
            if m[i][c] != 0:
                pr = i
                break
        if pr is None:
            continue
        m[r], m[pr] = m[pr], m[r]
        piv = m[r][c]
        m[r] = [x / piv for x in m[r]]
        for i in range(nrows):
            if i != r and m[i][c] != 0:
                f = m[i][c]
                m[i] = [a - f * b for a, b in zip(m[i], m[r])]
        pivots.append(c)
        r += 1
        if r == nrows:
            break
    return m, pivots


def solve_affine(mat, rhs):
    """Solve mat @ x = rhs exactly.

    Returns (particular, nullspace_basis) or None if inconsistent.  The
    particular solution sets all free variables to zero, so it only depends
    on the column order (deterministic).
    """
    nrows = len(mat)
    ncols = len(mat[0]) if nrows else 0
    aug = [list(mat[i]) + [rhs[i]] for i in range(nrows)]
    red, pivots = rref(aug)
    for i in range(len(pivots)):
        if pivots[i] == ncols:
            return None
    # also check rows below last pivot
    for i in range(len(pivots), nrows):
        if red[i][ncols] != 0:
            return None
    particular = [Fraction(0)] * ncols
    for i, c in enumerate(pivots):
        particular[c] = red[i][ncols]
    free = [c for c in range(ncols) if c not in set(pivots)]
    basis = []
    for fc in free:
        v = [Fraction(0)] * ncols
        v[fc] = Fraction(1)
        for i, c in enumerate(pivots):
            v[c] = -red[i][fc]
        basis.append(v)
    return particular, basis


def nullspace(mat):
    """Basis of the rational nullspace of mat."""
    if not mat:
        return []
    sol = solve_affine(mat, [Fraction(0)] * len(mat))
    return sol[1]


def rank(mat):
    if not mat:
        return 0
    _, pivots = rref(mat)
    return len(pivots)


def integer_kernel_basis(mat):
    """Primitive integer vectors spanning the rational nullspace of mat.

    Each rational basis vector is scaled to a primitive integer vector;
    the result spans the kernel over Q (not necessarily over Z, which is
    enough for restricting quadratic forms to a subtorus).
    """
    out = []
    for v in nullspace(mat):
        den = 1
        for x in v:
            den = den * x.denominator // gcd(den, x.denominator)
        ints = [int(x * den) for x in v]
        g = 0
        for x in ints:
            g = gcd(g, abs(x))
        if g > 1:
            ints = [x // g for x in ints]
        # canonical sign: first nonzero positive
        for x in ints:
            if x != 0:
                if x < 0:
                    ints = [-y for y in ints]
                break
        out.append(tuple(ints))
    return out


def mat_mul_vec(mat, vec):
    return [sum(a * b for a, b in zip(row, vec)) for row in mat]


def primitive(vec):
    """Scale a rational vector to a primitive integer vector (canonical sign)."""
    den = 1
    for x in vec:
        f = Fraction(x)
        den = den * f.denominator // gcd(den, f.denominator)
    ints = [int(Fraction(x) * den) for x in vec]
    g = 0
    for x in ints:
        g = gcd(g, abs(x))
    if g > 1:
        ints = [x // g for x in ints]
    for x in ints:
        if x != 0:
            if x < 0:
                ints = [-y for y in ints]
            break
    return tuple(ints)
