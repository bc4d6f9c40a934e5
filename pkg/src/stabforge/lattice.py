"""Lattice polytopes, tangent cones, chambers, and the ample partial order.

All geometry is exact over Q.  Polytopes live in the character space of the
subtorus A, given by an explicit tuple of coordinate names; they may be
lower-dimensional in their ambient space, so every polytope carries its
affine hull (equality constraints) alongside the facet inequalities of the
full-dimensional reduction.  Hulls are computed by facet enumeration over
affinely independent subsets, which is ample at desk scale (dimension <= 4,
a few dozen points).
"""

from __future__ import annotations

from fractions import Fraction
from itertools import combinations

from ._linalg import nullspace, primitive, rank, rref, solve_affine
from .algebra import Weight

__all__ = [
    "LatticePolytope",
    "ShiftedPolytope",
    "Cone",
    "Chamber",
    "newton_polytope",
    "tangent_cone",
    "lattice_points_shifted",
    "chamber_split",
    "ample_order",
    "AmpleOrder",
]


def _vec(p):
    return tuple(Fraction(x) for x in p)


def _affine_frame(points):
    """(origin, basis) of the affine hull; basis rows are directions."""
    p0 = points[0]
    diffs = [[x - y for x, y in zip(p, p0)] for p in points[1:]]
    if not diffs:
        return p0, []
    red, pivots = rref(diffs)
    basis = [red[i] for i in range(len(pivots))]
    return p0, basis


def _coords_in_frame(point, origin, basis):
    """Coefficients of (point-origin) in the basis, or None if outside."""
    if not basis:
        return () if all(x == y for x, y in zip(point, origin)) else None
    ncols = len(basis)
    mat = [[basis[j][i] for j in range(ncols)] for i in range(len(origin))]
    rhs = [x - y for x, y in zip(point, origin)]
    sol = solve_affine(mat, rhs)
    if sol is None:
        return None
    return tuple(sol[0])


def _hull_facets(pts, dim):
    """Facet inequalities (normal, offset) with normal.x <= offset, full-dim pts."""
    if dim == 0:
        return []
    if dim == 1:
        xs = [p[0] for p in pts]
        return [((Fraction(1),), max(xs)), ((Fraction(-1),), -min(xs))]
    facets = {}
    for subset in combinations(range(len(pts)), dim):
        base = pts[subset[0]]
        rows = [[pts[i][k] - base[k] for k in range(dim)] for i in subset[1:]]
        ns = nullspace(rows) if rows else []
        if len(ns) != 1:
            continue
        normal = ns[0]
        off = sum(n * x for n, x in zip(normal, base))
        lo = hi = False
        for p in pts:
            v = sum(n * x for n, x in zip(normal, p))
            if v > off:
                hi = True
            elif v < off:
                lo = True
            if hi and lo:
                break
        if hi and lo:
            continue
        if hi:
            normal = [-x for x in normal]
            off = -off
        key, scale = _primitive_same_sign(normal)
        facets[key] = off * scale
    return [(k, v) for k, v in sorted(facets.items())]


def _primitive_same_sign(vec):
    """Scale by a positive rational to a primitive integer vector; returns (vec, scale)."""
    from math import gcd

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
    scale = None
    for a, b in zip(ints, vec):
        if b != 0:
            scale = Fraction(a) / Fraction(b)
            break
    return tuple(ints), scale


class LatticePolytope:
    """Convex hull of finitely many rational points, possibly lower-dimensional."""

    def __init__(self, coords, points):
        self.coords = tuple(coords)
        pts = sorted({_vec(p) for p in points})
        if not pts:
            raise ValueError("empty polytope")
        self._points = pts
        self._origin, self._basis = _affine_frame(pts)
        self.dim = len(self._basis)
        reduced = [_coords_in_frame(p, self._origin, self._basis) for p in pts]
        self._facets = _hull_facets(reduced, self.dim)
        # vertices: points lying on dim independent facets
        verts = []
        for p, rp in zip(pts, reduced):
            active = [f for f, off in self._facets
                      if sum(a * b for a, b in zip(f, rp)) == off]
            if self.dim == 0 or rank([list(a) for a in active]) == self.dim:
                verts.append(p)
        self.vertices = tuple(verts)

    @staticmethod
    def from_weights(coords, weights):
        return LatticePolytope(coords, [w.vector(coords) for w in weights])

    def vertex_weights(self):
        return [Weight(dict(zip(self.coords, v))) for v in self.vertices]

    def contains(self, point, shift=None):
        """Exact membership; ``shift`` translates the polytope by a vector."""
        p = _vec(point)
        if shift is not None:
            p = tuple(x - Fraction(s) for x, s in zip(p, shift))
        rp = _coords_in_frame(p, self._origin, self._basis)
        if rp is None:
            return False
        return all(sum(a * b for a, b in zip(f, rp)) <= off for f, off in self._facets)

    def on_boundary(self, point, shift=None):
        """Relative boundary: some facet holds with equality (a wall hit)."""
        p = _vec(point)
        if shift is not None:
            p = tuple(x - Fraction(s) for x, s in zip(p, shift))
        rp = _coords_in_frame(p, self._origin, self._basis)
        if rp is None:
            return False
        if self.dim == 0:
            return True
        vals = [sum(a * b for a, b in zip(f, rp)) - off for f, off in self._facets]
        if any(v > 0 for v in vals):
            return False
        return any(v == 0 for v in vals)

    def support_value(self, direction):
        """max over the polytope of <direction, x> (direction a plain vector)."""
        d = _vec(direction)
        return max(sum(a * b for a, b in zip(d, v)) for v in self._points)

    def minkowski_sum(self, other):
        assert self.coords == other.coords
        pts = [tuple(a + b for a, b in zip(p, q))
               for p in self.vertices for q in other.vertices]
        return LatticePolytope(self.coords, pts)

    def erosion_lattice_points(self, window_vertices, shift):
        """Integer points x with x + self subset of conv(window_vertices)+shift.

        Candidates range over (window+shift) translated back by a vertex of
        self, which contains the erosion.
        """
        win = LatticePolytope(self.coords, window_vertices)
        v0 = self.vertices[0]
        sh = tuple(Fraction(s) - a for s, a in zip(_vec(shift), v0))
        out = []
        for mu in win.lattice_points(shift=sh):
            v = mu.vector(self.coords)
            ok = all(
                win.contains(tuple(a + b for a, b in zip(v, q)),
                             shift=_vec(shift))
                for q in self.vertices
            )
            if ok:
                out.append(mu)
        return out

    def lattice_points(self, shift=None):
        """All integer points of self (+ optional rational shift), as Weights."""
        n = len(self.coords)
        sh = _vec(shift) if shift is not None else (Fraction(0),) * n
        los, his = [], []
        for i in range(n):
            vals = [v[i] + sh[i] for v in self._points]
            lo, hi = min(vals), max(vals)
            los.append(-(-lo.numerator // lo.denominator))  # ceil
            his.append(hi.numerator // hi.denominator)      # floor
        out = []

        def rec(i, acc):
            if i == n:
                if self.contains(acc, shift=sh):
                    out.append(Weight(dict(zip(self.coords, acc))))
                return
            for k in range(los[i], his[i] + 1):
                rec(i + 1, acc + (Fraction(k),))

        rec(0, ())
        return sorted(out, key=lambda w: w.vector(self.coords))

    def faces_containing(self, vertex_subset):
        """Facet inequalities active on every point of the subset (reduced coords)."""
        reduced = []
        for p in vertex_subset:
            rp = _coords_in_frame(_vec(p), self._origin, self._basis)
            if rp is None:
                raise ValueError("point outside affine hull of polytope")
            reduced.append(rp)
        active = []
        for f, off in self._facets:
            if all(sum(a * b for a, b in zip(f, rp)) == off for rp in reduced):
                active.append((f, off))
        return active, reduced

    def __eq__(self, other):
        return (isinstance(other, LatticePolytope)
                and self.coords == other.coords
                and self.vertices == other.vertices)

    def __repr__(self):
        vs = ", ".join(str(tuple(map(str, v))) for v in self.vertices)
        return f"LatticePolytope({self.coords}, [{vs}])"


class ShiftedPolytope:
    """A lattice polytope translated by a rational shift lambda."""

    def __init__(self, base, shift):
        self.base = base
        if isinstance(shift, Weight):
            shift = shift.vector(base.coords)
        self.shift = _vec(shift)

    @property
    def coords(self):
        return self.base.coords

    def shift_weight(self):
        return Weight(dict(zip(self.base.coords, self.shift)))

    def lattice_points(self):
        return self.base.lattice_points(shift=self.shift)

    def contains(self, point):
        return self.base.contains(point, shift=self.shift)

    def is_generic(self):
        """True when no lattice point sits on the boundary (off every wall)."""
        for mu in self.lattice_points():
            if self.base.on_boundary(mu.vector(self.coords), shift=self.shift):
                return False
        return True

    def shift_is_integral(self):
        return all(s.denominator == 1 for s in self.shift)

    def __repr__(self):
        return f"ShiftedPolytope({self.base!r}, shift={tuple(map(str, self.shift))})"


class Cone:
    """Tangent cone to a polytope at a face.

    Directions are constrained to the affine hull of the polytope (spanned
    by ``basis`` rows) and must satisfy f.d <= 0 for each active facet f in
    frame coordinates.
    """

    def __init__(self, coords, basis, frame_inequalities):
        self.coords = tuple(coords)
        self.basis = [tuple(map(Fraction, b)) for b in basis]
        self.frame_inequalities = [tuple(map(Fraction, f)) for f in frame_inequalities]

    def contains(self, direction):
        d = _vec(direction)
        if not self.basis:
            return all(x == 0 for x in d)
        dr = _coords_in_frame(d, (Fraction(0),) * len(d), self.basis)
        if dr is None:
            return False
        return all(sum(a * b for a, b in zip(f, dr)) <= 0
                   for f in self.frame_inequalities)

    def is_full_space(self):
        return (len(self.basis) == len(self.coords)
                and not self.frame_inequalities)

    def is_full_dimensional(self):
        return len(self.basis) == len(self.coords)

    def lattice_points_in_box(self, radius):
        """Integer points of the cone with coordinates in [-radius, radius]."""
        n = len(self.coords)
        out = []

        def rec(i, acc):
            if i == n:
                if self.contains(acc):
                    out.append(acc)
                return
            for k in range(-radius, radius + 1):
                rec(i + 1, acc + (Fraction(k),))

        rec(0, ())
        return out

    def __repr__(self):
        return f"Cone({self.coords}, basis={self.basis}, ineqs={self.frame_inequalities})"


def newton_polytope(p, coords):
    """Convex hull of the exponents of p projected to the given coordinates."""
    if p.is_zero():
        raise ValueError("empty polytope")
    return LatticePolytope(coords, p.exponents_vectors(coords))


def tangent_cone(poly, face_points):
    """Cone of directions into the polytope at a face (given by its points).

    For face = whole polytope this is the full space of the affine hull
    (the torus chart itself).  Raises if the points are not a face.
    """
    face_pts = [_vec(p) for p in face_points]
    if not face_pts:
        raise ValueError("empty face")
    active, _ = poly.faces_containing(face_pts)
    # the face cut out by the active constraints must have exactly the given
    # points as its vertices
    face_verts = []
    for v in poly.vertices:
        rv = _coords_in_frame(_vec(v), poly._origin, poly._basis)
        if all(sum(a * b for a, b in zip(f, rv)) == off for f, off in active):
            face_verts.append(v)
    given = {tuple(p) for p in face_pts}
    if not given.issubset(set(poly.vertices)) or set(face_verts) != given:
        raise ValueError("not a face of the polytope")
    # directions into the polytope: f.dr <= 0 for active facets, within the
    # affine hull span
    return Cone(poly.coords, poly._basis, [f for f, _ in active])


def lattice_points_shifted(shifted):
    """All characters mu with mu - lambda in the base polytope."""
    return shifted.lattice_points()


class Chamber:
    """A generic cocharacter sigma of A, defining attracting directions."""

    def __init__(self, cochar, a_coords=None):
        self.cochar = {k: Fraction(v) for k, v in dict(cochar).items()}
        self.a_coords = tuple(a_coords) if a_coords is not None else tuple(sorted(self.cochar))

    def pair(self, w):
        return w.project(self.a_coords).pair(self.cochar)

    def opposite(self):
        return Chamber({k: -v for k, v in self.cochar.items()}, self.a_coords)

    def __repr__(self):
        items = ", ".join(f"{k}:{v}" for k, v in sorted(self.cochar.items()))
        return f"Chamber({items})"


def chamber_split(weights, chamber):
    """Partition weights into (attracting, repelling, fixed) by sign of <w, sigma>."""
    attracting, repelling, fixed = [], [], []
    for w in weights:
        wa = w.project(chamber.a_coords)
        if wa.is_zero():
            fixed.append(w)
            continue
        s = chamber.pair(w)
        if s > 0:
            attracting.append(w)
        elif s < 0:
            repelling.append(w)
        else:
            raise ValueError(f"non-generic chamber: weight {w.to_string()} pairs to zero")
    return attracting, repelling, fixed


class AmpleOrder:
    """Partial order on fixed points from chains of attracting edges."""

    def __init__(self, names, less):
        self.names = tuple(names)
        self._less = less  # dict name -> set of strictly smaller names

    def leq(self, a, b):
        return a == b or a in self._less.get(b, set())

    def lt(self, a, b):
        return a != b and a in self._less.get(b, set())

    def comparable(self, a, b):
        return self.leq(a, b) or self.leq(b, a)

    def below(self, b):
        return set(self._less.get(b, set()))

    def comparable_pairs(self):
        """All ordered pairs (j, i) with F_j < F_i."""
        out = []
        for i in self.names:
            for j in self.names:
                if self.lt(j, i):
                    out.append((j, i))
        return out

    def linear_extension(self, tie_break=None):
        """Total order refinement (list from minimum to maximum)."""
        remaining = list(self.names)
        key = tie_break or (lambda n: n)
        out = []
        while remaining:
            minimal = [n for n in remaining
                       if not any(self.lt(m, n) for m in remaining if m != n)]
            minimal.sort(key=key)
            out.append(minimal[0])
            remaining.remove(minimal[0])
        return out

    def is_refinement(self, order):
        pos = {n: i for i, n in enumerate(order)}
        return all(pos[a] < pos[b] for b in self.names for a in self.below(b))


def ample_order(model, chamber):
    """Partial order on fixed points via attracting GKM edges.

    Each edge carries the tangent weight at its first endpoint; the curve
    flows to the endpoint where its tangent is attracting.  The ample
    linearization is validated along every edge: the ample-weight difference
    of the bigger minus the smaller end must pair positively with sigma.
    """
    less = {f.name: set() for f in model.fixed_points}
    for edge in model.edges:
        p, q, w = edge.src, edge.dst, edge.weight
        s = chamber.pair(w)
        if s == 0:
            raise ValueError(f"non-generic chamber: edge {p}-{q} weight pairs to zero")
        # tangent at p attracting => curve flows to p => q < p
        small, big = (q, p) if s > 0 else (p, q)
        amp_big = model.point(big).ample.project(chamber.a_coords)
        amp_small = model.point(small).ample.project(chamber.a_coords)
        if chamber.pair(amp_big - amp_small) <= 0:
            raise ValueError(
                f"non-ample linearization: edge {small}<{big} violates the weight test")
        less[big].add(small)
    # transitive closure
    changed = True
    while changed:
        changed = False
        for b in less:
            add = set()
            for m in less[b]:
                add |= less[m]
            if not add.issubset(less[b]):
                less[b] |= add
                changed = True
    for b in less:
        if b in less[b]:
            raise ValueError("attracting edge graph has a cycle")
    return AmpleOrder([f.name for f in model.fixed_points], less)
