"""GKM input models and the per-fixed-point calculus.

A model is a finite list of fixed points with tangent weights, an optional
polarization selection, an ample linearization, plus weighted edges for the
1-dimensional orbits.  All per-point operations (attracting decomposition,
dynamical shift, normalization, degree windows, resonance bookkeeping) live
here.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from fractions import Fraction

from ._linalg import integer_kernel_basis
from .algebra import (
    LaurentPoly,
    ThetaClass,
    Weight,
    koszul_from_weights,
    parse_weight,
    theta_degree,
)
from .lattice import (
    Chamber,
    LatticePolytope,
    ShiftedPolytope,
    ample_order,
    chamber_split,
)

__all__ = [
    "FixedPoint",
    "Edge",
    "GKMModel",
    "AttractingData",
    "StabDegreeWindow",
    "attracting_decomposition",
    "attractive_check",
    "polarization_theta",
    "slope_weight",
    "normalization",
    "degree_polytope",
    "limit_polarization",
    "resonant_locus",
    "tstar_pn",
    "p2_model",
    "standard_chamber",
    "chamber_from_order",
]


@dataclass(frozen=True)
class FixedPoint:
    name: str
    tangent: tuple
    polarization: tuple | None
    ample: Weight
    slope_coeff: Fraction | None = None


@dataclass(frozen=True)
class Edge:
    src: str
    dst: str
    weight: Weight


class GKMModel:
    """Immutable GKM input: isolated fixed points plus weighted edges."""

    def __init__(self, torus, a_coords, fixed_points, edges, validate=True):
        self.torus = tuple(torus)
        self.a_coords = tuple(a_coords)
        self.fixed_points = tuple(fixed_points)
        self.edges = tuple(edges)
        self._by_name = {f.name: f for f in self.fixed_points}
        if len(self._by_name) != len(self.fixed_points):
            raise ValueError("duplicate fixed point names")
        if validate:
            self._validate()

    def point(self, name):
        return self._by_name[name]

    def names(self):
        return [f.name for f in self.fixed_points]

    def has_polarization(self):
        return all(f.polarization is not None for f in self.fixed_points)

    def edges_at(self, name):
        out = []
        for e in self.edges:
            if e.src == name:
                out.append((e.dst, e.weight))
            elif e.dst == name:
                out.append((e.src, e.weight))
        return out

    def _validate(self):
        aset = set(self.a_coords)
        if not aset.issubset(set(self.torus)):
            raise ValueError("A-coordinates must be torus coordinates")
        for f in self.fixed_points:
            for w in f.tangent:
                if w.project(self.a_coords).is_zero():
                    raise ValueError(
                        f"tangent weight {w.to_string()} at {f.name} vanishes on A "
                        "(fixed points must be isolated)")
            if f.polarization is not None:
                tan = sorted((w.project(self.a_coords) for w in f.tangent),
                             key=lambda w: w.to_string())
                pol = [w.project(self.a_coords) for w in f.polarization]
                both = sorted(pol + [-w for w in pol], key=lambda w: w.to_string())
                if tan != both:
                    raise ValueError(
                        f"polarization at {f.name} does not halve the tangent bundle on A")
        for e in self.edges:
            if e.src not in self._by_name or e.dst not in self._by_name:
                raise ValueError(f"edge endpoint missing: {e.src}-{e.dst}")
            wa = e.weight.project(self.a_coords)
            src_parts = [w.project(self.a_coords) for w in self.point(e.src).tangent]
            dst_parts = [w.project(self.a_coords) for w in self.point(e.dst).tangent]
            if wa not in src_parts and -wa not in src_parts:
                raise ValueError(f"edge weight {e.weight.to_string()} absent at {e.src}")
            if wa not in dst_parts and -wa not in dst_parts:
                raise ValueError(f"edge weight {e.weight.to_string()} absent at {e.dst}")

    # -- serialization -----------------------------------------------------

    def to_json_dict(self):
        pts = []
        for f in self.fixed_points:
            d = {
                "name": f.name,
                "tangent": [w.to_string() for w in f.tangent],
                "ample": f.ample.to_string(),
            }
            if f.polarization is not None:
                d["polarization"] = [w.to_string() for w in f.polarization]
            if f.slope_coeff is not None:
                d["slope_coeff"] = str(f.slope_coeff)
            pts.append(d)
        return {
            "schema": 1,
            "torus": list(self.torus),
            "A": list(self.a_coords),
            "fixed_points": pts,
            "edges": [[e.src, e.dst, e.weight.to_string()] for e in self.edges],
        }

    @staticmethod
    def from_json_dict(data):
        def fail(pointer, msg):
            raise ValueError(f"model schema error at {pointer}: {msg}")

        for key in ("torus", "A", "fixed_points", "edges"):
            if key not in data:
                fail(f"/{key}", "missing")
        pts = []
        for i, p in enumerate(data["fixed_points"]):
            for key in ("name", "tangent", "ample"):
                if key not in p:
                    fail(f"/fixed_points/{i}/{key}", "missing")
            try:
                tangent = tuple(parse_weight(s) for s in p["tangent"])
                pol = (tuple(parse_weight(s) for s in p["polarization"])
                       if "polarization" in p else None)
                ample = parse_weight(p["ample"])
            except ValueError as exc:
                fail(f"/fixed_points/{i}", str(exc))
            slope = Fraction(p["slope_coeff"]) if "slope_coeff" in p else None
            pts.append(FixedPoint(p["name"], tangent, pol, ample, slope))
        edges = []
        for i, e in enumerate(data["edges"]):
            if len(e) != 3:
                fail(f"/edges/{i}", "expected [src, dst, weight]")
            try:
                edges.append(Edge(e[0], e[1], parse_weight(e[2])))
            except ValueError as exc:
                fail(f"/edges/{i}/2", str(exc))
        return GKMModel(data["torus"], data["A"], pts, edges)

    def to_json(self):
        return json.dumps(self.to_json_dict(), sort_keys=True, indent=1)

    @staticmethod
    def from_json(text):
        return GKMModel.from_json_dict(json.loads(text))


# -- builtin models ------------------------------------------------------------


def tstar_pn(n, slope_coeff=None):
    """T*P^{n-1} with the diagonal torus times the h-scaling, per the running
    cotangent-bundle example: tangent chars a_i/a_k + a_k/(h a_i), polarization
    the base directions, ample O(1) with weight a_k^{-1}."""
    if n < 2:
        raise ValueError("need n >= 2")
    torus = [f"a{i}" for i in range(1, n + 1)] + ["h"]
    a_coords = [f"a{i}" for i in range(1, n + 1)]
    if slope_coeff is None:
        slope_coeff = Fraction(1, 2 * _factorial(n))
    pts = []
    for k in range(1, n + 1):
        tangent = []
        pol = []
        for i in range(1, n + 1):
            if i == k:
                continue
            base = parse_weight(f"a{i}/a{k}")
            tangent.append(base)
            tangent.append(parse_weight(f"a{k}/(h*a{i})"))
            pol.append(base)
        pts.append(FixedPoint(
            name=f"F{k}", tangent=tuple(tangent), polarization=tuple(pol),
            ample=parse_weight(f"a{k}^-1"), slope_coeff=Fraction(slope_coeff)))
    edges = []
    for i in range(1, n + 1):
        for k in range(i + 1, n + 1):
            edges.append(Edge(f"F{i}", f"F{k}", parse_weight(f"a{k}/a{i}")))
    return GKMModel(torus, a_coords, pts, edges)


def p2_model():
    """P^2 with the maximal torus of PGL(3): no polarization exists."""
    torus = ["a1", "a2", "a3"]
    pts = []
    for k in (1, 2, 3):
        tangent = tuple(parse_weight(f"a{i}/a{k}") for i in (1, 2, 3) if i != k)
        pts.append(FixedPoint(
            name=f"F{k}", tangent=tangent, polarization=None,
            ample=parse_weight(f"a{k}^-1"), slope_coeff=None))
    edges = [Edge("F1", "F2", parse_weight("a2/a1")),
             Edge("F1", "F3", parse_weight("a3/a1")),
             Edge("F2", "F3", parse_weight("a3/a2"))]
    return GKMModel(torus, torus, pts, edges)


def _factorial(n):
    out = 1
    for i in range(2, n + 1):
        out *= i
    return out


def standard_chamber(model):
    """sigma with decreasing values on a1 > a2 > ...; for tstar_pn this gives
    the order F_1 < F_2 < ... < F_n."""
    r = len(model.a_coords)
    return Chamber({c: r - i for i, c in enumerate(model.a_coords)}, model.a_coords)


def chamber_from_order(model, order_names):
    """Chamber realizing the given increasing fixed-point order for models
    whose k-th point is supported on the k-th A-coordinate (builtin family)."""
    n = len(order_names)
    cochar = {}
    for pos, name in enumerate(order_names):
        idx = model.names().index(name)
        cochar[model.a_coords[idx]] = n - pos
    return Chamber(cochar, model.a_coords)


# -- attracting decomposition ---------------------------------------------------


@dataclass
class AttractingData:
    name: str
    n_plus: tuple
    n_minus: tuple
    pol_plus: tuple
    pol_minus: tuple
    delta_v: LaurentPoly = field(default_factory=LaurentPoly.zero)


def attracting_decomposition(model, chamber):
    """Per fixed point: attracting/repelling buckets and the dynamical shift.

    delta_v solves N_{<0} = T^{1/2}_{<0} + (T^{1/2}_{>0})^dual + delta_v and
    must restrict to zero on A.
    """
    out = {}
    for f in model.fixed_points:
        n_plus, n_minus, fixed = chamber_split(f.tangent, chamber)
        if fixed:
            raise ValueError(f"tangent weight fixed by A at {f.name}")
        if f.polarization is None:
            raise ValueError(f"no polarization at {f.name}")
        p_plus, p_minus, p_fixed = chamber_split(f.polarization, chamber)
        if p_fixed:
            raise ValueError(f"polarization weight fixed by A at {f.name}")
        dv = LaurentPoly.zero()
        for w in n_minus:
            dv = dv + LaurentPoly.monomial(w)
        for v in p_minus:
            dv = dv - LaurentPoly.monomial(v)
        for v in p_plus:
            dv = dv - LaurentPoly.monomial(-v)
        if not dv.map_weights(lambda w: w.project(model.a_coords)).is_zero():
            raise ValueError(f"inconsistent polarization at {f.name}: "
                             "delta_v does not vanish on A")
        out[f.name] = AttractingData(
            name=f.name, n_plus=tuple(n_plus), n_minus=tuple(n_minus),
            pol_plus=tuple(p_plus), pol_minus=tuple(p_minus), delta_v=dv)
    return out


# -- attractive bundles ----------------------------------------------------------


@dataclass
class AttractiveReport:
    ok: bool
    pointwise_failures: list
    subtorus_failures: list

    def __bool__(self):
        return self.ok


def _restrict_form(form, basis):
    """Quadratic form restricted to the span of integer basis vectors."""
    k = len(basis)
    out = [[Fraction(0)] * k for _ in range(k)]
    for i in range(k):
        for j in range(k):
            out[i][j] = sum(
                Fraction(basis[i][p]) * form[p][q] * Fraction(basis[j][q])
                for p in range(len(form)) for q in range(len(form)))
    return out


def attractive_check(s_classes, model, chamber):
    """Degree test for attractive bundles.

    Verifies deg_A S = deg_A Theta(N_{<0}) at every fixed point (when S is
    given), and for every codimension-one subtorus A' spanned by an edge,
    that the N_{<0} theta-degree forms of the two endpoints agree after
    restriction to cochar(A').  A failure of the latter obstructs the
    existence of any attractive bundle.
    """
    a_coords = model.a_coords
    forms = {}
    for f in model.fixed_points:
        _, n_minus, _ = chamber_split(f.tangent, chamber)
        forms[f.name] = theta_degree(ThetaClass(list(n_minus)), a_coords)
    pointwise = []
    if s_classes is not None:
        for f in model.fixed_points:
            got = theta_degree(s_classes[f.name], a_coords)
            if got != forms[f.name]:
                pointwise.append((f.name, got, forms[f.name]))
    subtorus = []
    for e in model.edges:
        wa = e.weight.project(a_coords).vector(a_coords)
        basis = integer_kernel_basis([list(wa)])
        qa = _restrict_form(forms[e.src], basis)
        qb = _restrict_form(forms[e.dst], basis)
        if qa != qb:
            subtorus.append((e.src, e.dst, e.weight, qa, qb))
    return AttractiveReport(
        ok=not pointwise and not subtorus,
        pointwise_failures=pointwise,
        subtorus_failures=subtorus)


def polarization_theta(model):
    """The standard attractive choice S = Theta(T^{1/2}), as classes per point."""
    return {f.name: ThetaClass(list(f.polarization)) for f in model.fixed_points}


# -- normalization -----------------------------------------------------------------


def normalization(model, name, chamber):
    """Diagonal restriction of the normalized attracting class.

    (-1)^{rk N^{1/2}_{>0}} (det N_{<0}/det N^{1/2})^{1/2} prod_{w in N_{<0}} (1 - a^{-w})
    """
    data = attracting_decomposition(model, chamber)[name]
    det_minus = Weight.zero()
    for w in data.n_minus:
        det_minus = det_minus + w
    det_half = Weight.zero()
    for v in data.pol_plus + data.pol_minus:
        det_half = det_half + v
    sqrt_char = (det_minus - det_half) * Fraction(1, 2)
    for n, e in sqrt_char.items():
        if n != "h" and e.denominator not in (1,):
            raise ValueError(
                "non-square determinant ratio outside the h^{1/2}-extended lattice")
    sign = -1 if len(data.pol_plus) % 2 else 1
    return LaurentPoly.monomial(sqrt_char, sign) * koszul_from_weights(data.n_minus)


# -- degree windows ----------------------------------------------------------------


@dataclass
class StabDegreeWindow:
    """Newton window for the entry Stab(F_i)|_{F_j}."""

    window: ShiftedPolytope
    row: str
    column: str

    def lattice_points(self):
        return self.window.lattice_points()

    def contains_poly(self, p, a_coords):
        return all(self.window.contains(w.project(a_coords).vector(a_coords))
                   for w in p.support())

    def shift_is_integral(self):
        return self.window.shift_is_integral()

    def is_generic(self):
        return self.window.is_generic()


def slope_weight(model, name, slope=None):
    """A-weight of the (fractional) slope bundle at a fixed point."""
    f = model.point(name)
    s = Fraction(slope) if slope is not None else f.slope_coeff
    if s is None:
        raise ValueError(f"no slope coefficient for {name}")
    return f.ample.project(model.a_coords) * s


def degree_polytope(model, chamber, row, column, slope=None):
    """Window of eq-degStab type: base = deg_A of the dual exterior algebra of
    the polarization at the row point, shifted by the slope-weight difference."""
    order = ample_order(model, chamber)
    if not order.leq(row, column):
        raise ValueError(f"incomparable pair ({row}, {column})")
    f = model.point(row)
    if f.polarization is None:
        raise ValueError(f"no polarization at {row}")
    a_coords = model.a_coords
    # Minkowski sum of segments [0, -v_A]: subset sums then hull
    pts = [tuple(Fraction(0) for _ in a_coords)]
    for v in f.polarization:
        d = (-v.project(a_coords)).vector(a_coords)
        pts = pts + [tuple(a + b for a, b in zip(p, d)) for p in pts]
    base = LatticePolytope(a_coords, pts)
    lam = slope_weight(model, row, slope) - slope_weight(model, column, slope)
    return StabDegreeWindow(ShiftedPolytope(base, lam.vector(a_coords)),
                            row=row, column=column)


# -- limits of polarizations ---------------------------------------------------------


def limit_polarization(cls, face_cochar, a_coords):
    """V_lim = V_{>=0} - (V_{>0})^dual, buckets taken as a -> 0 along the face.

    Equivalently V^{A'} + dV - dV^dual with dV the attracting part, so the
    limit of a polarization is again a polarization of the fixed locus.
    """
    face = Chamber(face_cochar, a_coords)
    out = ThetaClass()
    for w, n in cls.terms().items():
        s = face.pair(w)
        if s == 0:
            out = out + ThetaClass({w: n})
        elif s > 0:
            out = out + ThetaClass({w: n, -w: -n})
    return out


# -- resonant locus -------------------------------------------------------------------


def resonant_locus(model, chamber, s_classes="polarization"):
    """Resonance characters in the Kahler/equivariant parameters (z, h).

    For each comparable pair, the bundle S_{A,F_j} (x) S_{A,F_i}^{-1} twisted
    by U(O(1), z) can be trivial along the A-fibers only when all dynamical
    det-characters are proportional to the slope-weight difference; each such
    pair contributes the monomial where triviality occurs, and the origin of
    the z-factor itself whenever any dependent pair exists.
    """
    if s_classes == "polarization" and model.has_polarization():
        report = attractive_check(polarization_theta(model), model, chamber)
    else:
        report = attractive_check(None, model, chamber)
    if not report.ok:
        raise ValueError("attractive check fails; resonance undefined "
                         f"(violations: {report.subtorus_failures or report.pointwise_failures})")
    a_coords = model.a_coords
    data = attracting_decomposition(model, chamber) if model.has_polarization() else None
    order = ample_order(model, chamber)

    def det_chars(name):
        """Group the dynamical shift by T/A-character; A-side det per group."""
        out = {}
        if data is None:
            return out
        for w, n in data[name].delta_v.terms().items():
            c = w.drop(a_coords)
            if c.is_zero():
                continue
            out[c] = out.get(c, Weight.zero()) + w.project(a_coords) * n
        return {c: d for c, d in out.items() if not d.is_zero()}

    values = set()
    dependent_found = False
    for j, i in order.comparable_pairs():
        u = slope_weight(model, j, 1) - slope_weight(model, i, 1)
        if u.is_zero():
            continue
        dj, di = det_chars(j), det_chars(i)
        diff = {}
        for c in set(dj) | set(di):
            d = dj.get(c, Weight.zero()) - di.get(c, Weight.zero())
            if not d.is_zero():
                diff[c] = d
        # proportionality of every det-character to u
        name0, u0 = u.items()[0]
        ok = True
        monomial = Weight.zero()
        for c, d in diff.items():
            m = d.get(name0) / u0
            if d != u * m:
                ok = False
                break
            monomial = monomial + c * m
        if ok:
            dependent_found = True
            values.add(monomial)
    if dependent_found:
        values.add(Weight.zero())
    return sorted(values, key=lambda w: (w.total_degree(), w.to_string()))
