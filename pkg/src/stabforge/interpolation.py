"""Toric interpolation: reduce modulo a nondegenerate polynomial and lift
into a Newton-polytope window.

The engine assembles the exact linear system whose unknowns are the
coefficients of the lift on the lattice points of the shifted window,
together with the explicit multiplier h in f - target = h*P, and solves it
by elimination over the fraction field Q(t) of the coefficient ring
Z[h^{±1/2}] (t = h^{1/2}).  No floating point, no Groebner machinery.
"""

from __future__ import annotations

from fractions import Fraction

from .algebra import LaurentPoly, Weight
from .lattice import LatticePolytope, ShiftedPolytope, newton_polytope

__all__ = [
    "InterpolationProblem",
    "InterpolationError",
    "NonGenericShift",
    "is_nondegenerate",
    "interpolate",
    "shifted_cohomology",
    "solve_congruences",
]


class InterpolationError(ValueError):
    pass


class NonGenericShift(Warning):
    pass


# -- univariate rational functions over Q -----------------------------------


def _poly_trim(p):
    while p and p[-1] == 0:
        p.pop()
    return p


def _poly_mul(a, b):
    if not a or not b:
        return []
    out = [Fraction(0)] * (len(a) + len(b) - 1)
    for i, x in enumerate(a):
        if x == 0:
            continue
        for j, y in enumerate(b):
            if y != 0:
                out[i + j] += x * y
    return _poly_trim(out)


def _poly_add(a, b):
    out = [Fraction(0)] * max(len(a), len(b))
    for i, x in enumerate(a):
        out[i] += x
    for i, x in enumerate(b):
        out[i] += x
    return _poly_trim(out)


def _poly_divmod(a, b):
    a = list(a)
    if not b:
        raise ZeroDivisionError("polynomial division by zero")
    q = [Fraction(0)] * max(0, len(a) - len(b) + 1)
    while len(a) >= len(b) and _poly_trim(a):
        if len(a) < len(b):
            break
        c = a[-1] / b[-1]
        d = len(a) - len(b)
        q[d] = c
        for i, y in enumerate(b):
            a[d + i] -= c * y
        _poly_trim(a)
    return _poly_trim(q), _poly_trim(a)


def _poly_gcd(a, b):
    a, b = list(a), list(b)
    while b:
        _, r = _poly_divmod(a, b)
        a, b = b, r
    if a:
        lead = a[-1]
        a = [x / lead for x in a]
    return a


class RatFunc:
    """Rational function in one variable t over Q, with Laurent numerators.

    Stored as (shift, num, den): value = t^shift * num(t)/den(t) with
    num, den coprime polynomials, den monic with nonzero constant term.
    """

    __slots__ = ("shift", "num", "den")

    def __init__(self, shift=0, num=None, den=None):
        num = [Fraction(x) for x in (num if num is not None else [])]
        den = [Fraction(x) for x in (den if den is not None else [Fraction(1)])]
        _poly_trim(num)
        _poly_trim(den)
        if not den:
            raise ZeroDivisionError("zero denominator")
        if not num:
            self.shift, self.num, self.den = 0, [], [Fraction(1)]
            return
        # strip powers of t from num and den into the shift
        while num and num[0] == 0:
            num.pop(0)
            shift += 1
        while den and den[0] == 0:
            den.pop(0)
            shift -= 1
        g = _poly_gcd(num, den)
        if len(g) > 1:
            num, _ = _poly_divmod(num, g)
            den, _ = _poly_divmod(den, g)
        lead = den[-1]
        if lead != 1:
            num = [x / lead for x in num]
            den = [x / lead for x in den]
        self.shift, self.num, self.den = shift, num, den

    @staticmethod
    def const(c):
        c = Fraction(c)
        return RatFunc(0, [c]) if c else RatFunc(0, [])

    @staticmethod
    def monomial(exp, coeff=1):
        return RatFunc(exp, [Fraction(coeff)])

    @staticmethod
    def from_laurent_dict(d):
        """From {t-exponent: Fraction} with integer exponents."""
        if not d:
            return RatFunc(0, [])
        lo = min(d)
        num = [Fraction(0)] * (max(d) - lo + 1)
        for e, c in d.items():
            num[e - lo] = Fraction(c)
        return RatFunc(lo, num)

    def is_zero(self):
        return not self.num

    def __add__(self, other):
        if self.is_zero():
            return other
        if other.is_zero():
            return self
        sh = min(self.shift, other.shift)
        a = [Fraction(0)] * (self.shift - sh) + self.num
        b = [Fraction(0)] * (other.shift - sh) + other.num
        num = _poly_add(_poly_mul(a, other.den), _poly_mul(b, self.den))
        return RatFunc(sh, num, _poly_mul(self.den, other.den))

    def __neg__(self):
        return RatFunc(self.shift, [-x for x in self.num], self.den)

    def __sub__(self, other):
        return self + (-other)

    def __mul__(self, other):
        if self.is_zero() or other.is_zero():
            return RatFunc(0, [])
        return RatFunc(self.shift + other.shift,
                       _poly_mul(self.num, other.num),
                       _poly_mul(self.den, other.den))

    def __truediv__(self, other):
        if other.is_zero():
            raise ZeroDivisionError("division by zero rational function")
        if self.is_zero():
            return RatFunc(0, [])
        return RatFunc(self.shift - other.shift,
                       _poly_mul(self.num, other.den),
                       _poly_mul(self.den, other.num))

    def __eq__(self, other):
        return (isinstance(other, RatFunc) and self.shift == other.shift
                and self.num == other.num and self.den == other.den)

    def is_laurent(self):
        return len(self.den) == 1

    def laurent_dict(self):
        """{t-exponent: Fraction}; requires a trivial denominator."""
        if not self.is_laurent():
            raise InterpolationError("solution is not a Laurent polynomial in h^{1/2}")
        return {self.shift + i: c for i, c in enumerate(self.num) if c != 0}

    def __repr__(self):
        return f"RatFunc(t^{self.shift} * {self.num} / {self.den})"


def _gauss_solve(rows, rhs, ncols, reverse_pivots=False):
    """Solve over Q(t).  rows: list of {col: RatFunc}; rhs: list of RatFunc.

    Returns (solution list, kernel_dim) or None if inconsistent.  Free
    variables are set to zero; the column scan order is deterministic.
    """
    rows = [dict(r) for r in rows]
    rhs = list(rhs)
    col_order = list(range(ncols))
    if reverse_pivots:
        col_order = col_order[::-1]
    pivots = {}
    used_rows = set()
    for c in col_order:
        pr = None
        for i in range(len(rows)):
            if i not in used_rows and c in rows[i] and not rows[i][c].is_zero():
                pr = i
                break
        if pr is None:
            continue
        used_rows.add(pr)
        pivots[c] = pr
        piv = rows[pr][c]
        rows[pr] = {k: v / piv for k, v in rows[pr].items()}
        rhs[pr] = rhs[pr] / piv
        for i in range(len(rows)):
            if i != pr and c in rows[i] and not rows[i][c].is_zero():
                f = rows[i][c]
                for k, v in rows[pr].items():
                    nv = rows[i].get(k, RatFunc.const(0)) - f * v
                    if nv.is_zero():
                        rows[i].pop(k, None)
                    else:
                        rows[i][k] = nv
                rhs[i] = rhs[i] - f * rhs[pr]
    for i in range(len(rows)):
        if i not in used_rows:
            if not all(v.is_zero() for v in rows[i].values()):
                raise AssertionError("unpivoted nonzero row")
            if not rhs[i].is_zero():
                return None
    # free variables are zero and other pivot columns were eliminated, so the
    # pivot row's rhs is the value of its pivot variable
    sol = [RatFunc.const(0)] * ncols
    for c, pr in pivots.items():
        sol[c] = rhs[pr]
    kernel_dim = ncols - len(pivots)
    return sol, kernel_dim


def _laurent_to_ratfunc(p, a_coords):
    """Split p into {A-weight: RatFunc in t=h^{1/2}}; only 'h' allowed outside A."""
    out = {}
    for w, c in p.terms().items():
        wa = w.project(a_coords)
        rest = w.drop(a_coords)
        for n, _ in rest.items():
            if n != "h":
                raise InterpolationError(
                    f"coefficient ring is Z[h^(1/2)]; unexpected coordinate {n!r}")
        e = rest.get("h") * 2
        if e.denominator != 1:
            raise InterpolationError("h-exponents must be half-integers")
        d = out.setdefault(wa, {})
        d[int(e)] = d.get(int(e), Fraction(0)) + c
    return {wa: RatFunc.from_laurent_dict(d) for wa, d in out.items()}


def _ratfunc_to_laurent(wa, rf, require_integer=True):
    """Monomial a^wa times a Laurent h-polynomial, as a LaurentPoly."""
    terms = {}
    for e, c in rf.laurent_dict().items():
        if require_integer and c.denominator != 1:
            raise InterpolationError("solution has non-integer coefficients")
        w = wa + Weight.unit("h", Fraction(e, 2))
        terms[w] = int(c) if require_integer else c
    return LaurentPoly(terms)


class InterpolationProblem:
    """Lift a class mod P into the window delta + lambda.

    Fields follow the contract: ``delta`` contains the Newton polytope of P;
    P nondegenerate; ``target`` is any representative of the class mod P.
    """

    def __init__(self, delta, lam, P, target, a_coords):
        self.a_coords = tuple(a_coords)
        self.delta = delta
        self.lam = lam if isinstance(lam, Weight) else Weight(dict(zip(self.a_coords, lam)))
        self.P = P
        self.target = target
        np = newton_polytope(P, self.a_coords)
        for v in np.vertices:
            if not delta.contains(v):
                raise InterpolationError("Newton polytope of P not contained in delta")

    def window(self):
        return ShiftedPolytope(self.delta, self.lam.vector(self.a_coords))


def is_nondegenerate(P, delta, a_coords=None):
    """True iff every vertex of delta carries a unit coefficient of P.

    Units of Z[h^{±1/2}] are ±h^{k/2}; the coefficient at a vertex is the
    h-Laurent polynomial collecting all terms of P over that vertex.
    """
    if a_coords is None:
        a_coords = delta.coords
    by_vertex = {}
    for w, c in P.terms().items():
        va = w.project(a_coords).vector(a_coords)
        by_vertex.setdefault(va, {})[w.drop(a_coords)] = c
    for v in delta.vertices:
        coeff = LaurentPoly(by_vertex.get(tuple(v), {}))
        if not coeff.is_unit():
            return False
    return True


def kernel_generators(P, delta, lam, a_coords):
    """Generators a^kappa * P of {h*P inside the window}, via the erosion."""
    win_shift = lam.vector(a_coords) if isinstance(lam, Weight) else lam
    pts = delta.erosion_lattice_points([list(v) for v in delta.vertices], win_shift)
    gens = []
    for kappa in pts:
        gens.append(LaurentPoly.monomial(kappa) * P)
    return gens


def interpolate(problem, reverse_pivots=False):
    """Solve f = target mod P with Newton(f) inside delta + lambda.

    Returns (f, kernel) where kernel is the generator a^lambda*P when the
    shift is integral (the solution is then non-unique), else None.
    Raises InterpolationError if P is degenerate or no lift exists.
    """
    a_coords = problem.a_coords
    if not is_nondegenerate(problem.P, problem.delta, a_coords):
        raise InterpolationError("degenerate P: vertex coefficients are not units")
    window = problem.window()
    unknowns = window.lattice_points()
    np_p = newton_polytope(problem.P, a_coords)
    p_split = _laurent_to_ratfunc(problem.P, a_coords)
    t_split = _laurent_to_ratfunc(problem.target, a_coords)

    # multiplier support: Newton(h) + Newton(P) must fit in the hull of the
    # window together with the target support
    s_points = [[v + s for v, s in zip(vert, window.shift)]
                for vert in problem.delta.vertices]
    s_points += [list(wa.vector(a_coords)) for wa in t_split]
    h_support = np_p.erosion_lattice_points(s_points, (Fraction(0),) * len(a_coords))

    columns = {}
    for i, mu in enumerate(unknowns):
        columns[("f", mu)] = i
    for j, kappa in enumerate(h_support):
        columns[("h", kappa)] = len(unknowns) + j
    ncols = len(columns)

    # equations indexed by A-exponents
    rows_by_nu = {}

    def row(nu):
        return rows_by_nu.setdefault(nu, ({}, [RatFunc.const(0)]))

    for mu in unknowns:
        r, _ = row(tuple(mu.vector(a_coords)))
        r[columns[("f", mu)]] = RatFunc.const(1)
    for kappa in h_support:
        kv = kappa.vector(a_coords)
        for alpha, coeff in p_split.items():
            nu = tuple(a + b for a, b in zip(kv, alpha.vector(a_coords)))
            r, _ = row(nu)
            c = columns[("h", kappa)]
            r[c] = r.get(c, RatFunc.const(0)) - coeff
    for wa, coeff in t_split.items():
        _, rh = row(tuple(wa.vector(a_coords)))
        rh[0] = rh[0] + coeff

    keys = sorted(rows_by_nu)
    rows = [rows_by_nu[k][0] for k in keys]
    rhs = [rows_by_nu[k][1][0] for k in keys]
    solved = _gauss_solve(rows, rhs, ncols, reverse_pivots=reverse_pivots)
    if solved is None:
        raise InterpolationError("interpolation infeasible: target class not representable")
    sol, _ = solved

    f = LaurentPoly.zero()
    for mu in unknowns:
        rf = sol[columns[("f", mu)]]
        if not rf.is_zero():
            f = f + _ratfunc_to_laurent(mu, rf)

    gens = kernel_generators(problem.P, problem.delta, problem.lam, a_coords)
    kernel = gens[0] if len(gens) == 1 else (None if not gens else gens)
    return f, kernel


def shifted_cohomology(delta, lam, a_coords=None):
    """Verdict of the toric vanishing: 'zero' or 'one-dimensional'.

    The twist O(delta_lambda - delta) has no cohomology unless lambda is a
    character, in which case H^0 is free of rank one on a^lambda.
    """
    if a_coords is None:
        a_coords = delta.coords
    if delta.dim != len(delta.coords):
        raise InterpolationError("degenerate polytope: not full-dimensional")
    lamw = lam if isinstance(lam, Weight) else Weight(dict(zip(a_coords, lam)))
    if lamw.is_integral():
        return ("one-dimensional", lamw)
    return ("zero", None)


# -- congruence solver for the envelope induction -----------------------------


def solve_congruences(a_coords, window, congruences, reverse_pivots=False):
    """Find f supported on the window's lattice points with
    f = rhs mod (1 - a^{-w}) for every (w, rhs) in congruences.

    Congruence weights may carry an h-component but must be nonzero on A.
    Returns (f, kernel_dim); raises InterpolationError when inconsistent.
    """
    unknowns = window.lattice_points()
    ncols = len(unknowns)
    rows = []
    rhs = []
    for w, target in sorted(congruences, key=lambda cw: cw[0].to_string()):
        wa = w.project(a_coords)
        if wa.is_zero():
            raise InterpolationError("congruence weight restricts to zero on A")
        name0, e0 = wa.items()[0]
        wh = w.drop(a_coords).get("h") * 2
        if wh.denominator != 1:
            raise InterpolationError("edge weights must have half-integral h-part")
        wh = int(wh)

        def reduce_a(mu_vec):
            k = Fraction(mu_vec[a_coords.index(name0)]) / e0
            k = k.numerator // k.denominator
            rep = tuple(x - k * y for x, y in
                        zip(mu_vec, wa.vector(a_coords)))
            return rep, k

        classes = {}
        for i, mu in enumerate(unknowns):
            rep, k = reduce_a(mu.vector(a_coords))
            cls = classes.setdefault(rep, ({}, [RatFunc.const(0)]))
            cls[0][i] = cls[0].get(i, RatFunc.const(0)) + RatFunc.monomial(-k * wh)
        for wt, c in target.terms().items():
            rest = wt.drop(a_coords)
            for n, _ in rest.items():
                if n != "h":
                    raise InterpolationError(f"unexpected coordinate {n!r} in congruence data")
            e = rest.get("h") * 2
            if e.denominator != 1:
                raise InterpolationError("h-exponents must be half-integers")
            rep, k = reduce_a(wt.project(a_coords).vector(a_coords))
            cls = classes.setdefault(rep, ({}, [RatFunc.const(0)]))
            cls[1][0] = cls[1][0] + RatFunc.monomial(int(e) - k * wh, c)
        for rep in sorted(classes):
            r, rh = classes[rep]
            rows.append(r)
            rhs.append(rh[0])
    solved = _gauss_solve(rows, rhs, ncols, reverse_pivots=reverse_pivots)
    if solved is None:
        raise InterpolationError("congruences are inconsistent with the window")
    sol, kernel_dim = solved
    f = LaurentPoly.zero()
    for i, mu in enumerate(unknowns):
        if not sol[i].is_zero():
            f = f + _ratfunc_to_laurent(mu, sol[i])
    return f, kernel_dim
