"""Inductive construction of K-theoretic stable envelopes on GKM models,
plus an axiomatic verifier that is independent of the construction.

The induction runs one column (one fixed point F_i) at a time, filling rows
in decreasing order: each new entry is the unique element of its Newton
window congruent to all already-determined entries modulo the Koszul factor
(1 - a^{-w}) of every GKM edge joining the row point to a determined point.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from fractions import Fraction

from .algebra import LaurentPoly, parse_laurent
from .gkm import (
    GKMModel,
    ample_order,
    degree_polytope,
    normalization,
)
from .interpolation import InterpolationError, solve_congruences
from ._linalg import primitive

__all__ = ["StabMatrix", "EnvelopeError", "compute_stab", "verify_stab", "VerifyReport"]


class EnvelopeError(RuntimeError):
    pass


@dataclass
class StabMatrix:
    """Matrix of restrictions Stab(F_i)|_{F_j}, rows = j, columns = i."""

    names: tuple
    entries: dict  # (row, col) -> LaurentPoly
    chamber_cochar: dict
    slope: Fraction | None
    order: tuple
    warnings: list = field(default_factory=list)

    def entry(self, row, col):
        return self.entries.get((row, col), LaurentPoly.zero())

    def to_json_dict(self):
        mat = {}
        for (row, col), p in sorted(self.entries.items()):
            if not p.is_zero():
                mat.setdefault(row, {})[col] = p.to_string()
        return {
            "schema": 1,
            "fixed_points": list(self.names),
            "order": list(self.order),
            "chamber": {k: str(v) for k, v in sorted(self.chamber_cochar.items())},
            "slope": str(self.slope) if self.slope is not None else None,
            "matrix": mat,
            "warnings": list(self.warnings),
        }

    def to_json(self):
        return json.dumps(self.to_json_dict(), sort_keys=True, indent=1)

    @staticmethod
    def from_json_dict(data):
        entries = {}
        for row, cols in data["matrix"].items():
            for col, s in cols.items():
                entries[(row, col)] = parse_laurent(s)
        return StabMatrix(
            names=tuple(data["fixed_points"]),
            entries=entries,
            chamber_cochar={k: Fraction(v) for k, v in data["chamber"].items()},
            slope=Fraction(data["slope"]) if data.get("slope") else None,
            order=tuple(data["order"]),
            warnings=list(data.get("warnings", [])),
        )

    @staticmethod
    def from_json(text):
        return StabMatrix.from_json_dict(json.loads(text))

    def text_table(self):
        """Aligned plain-text rendering, rows and columns in the refined order."""
        names = list(self.order)
        cells = [[""] + names]
        for row in names:
            cells.append([row] + [self.entry(row, col).to_string() for col in names])
        widths = [max(len(r[c]) for r in cells) for c in range(len(names) + 1)]
        lines = []
        for r in cells:
            lines.append("  ".join(x.ljust(w) for x, w in zip(r, widths)).rstrip())
        return "\n".join(lines) + "\n"


def _refinement_tiebreak(model, chamber):
    names = model.names()
    idx = {n: i for i, n in enumerate(names)}

    def key(n):
        return (chamber.pair(model.point(n).ample), idx[n])

    return key


def compute_stab(model, chamber, slope=None, order_refinement=None,
                 reverse_pivots=False):
    """Stable envelope matrix for the given chamber and fractional slope.

    Entries are produced column by column by decreasing induction along a
    total-order refinement of the ample order; the output does not depend on
    the refinement or on solver pivot order for generic slope.
    """
    if not model.has_polarization():
        raise EnvelopeError("stable envelopes need a polarization in the model")
    order = ample_order(model, chamber)
    if order_refinement is None:
        refinement = order.linear_extension(_refinement_tiebreak(model, chamber))
    else:
        refinement = list(order_refinement)
        if sorted(refinement) != sorted(model.names()):
            raise EnvelopeError("order refinement must list every fixed point")
        if not order.is_refinement(refinement):
            raise EnvelopeError("order refinement is not compatible with the ample order")
    warnings = []
    entries = {}
    a_coords = model.a_coords
    for col in model.names():
        processed = []
        for row in reversed(refinement):
            if row == col:
                entries[(row, col)] = normalization(model, row, chamber)
            elif order.lt(row, col):
                window = degree_polytope(model, chamber, row, col, slope)
                if not window.is_generic():
                    warnings.append(
                        f"non-generic slope for pair ({row},{col}): "
                        "uniqueness of the envelope is not guaranteed")
                congruences = []
                for other, w in model.edges_at(row):
                    if other in processed:
                        congruences.append((w, entries[(other, col)]))
                try:
                    f, kdim = solve_congruences(
                        a_coords, window.window, congruences,
                        reverse_pivots=reverse_pivots)
                except InterpolationError as exc:
                    raise EnvelopeError(
                        f"interpolation infeasible for pair ({row},{col}): {exc}"
                    ) from exc
                if kdim > 0:
                    if window.is_generic():
                        raise EnvelopeError(
                            f"non-unique lift for pair ({row},{col}) at generic slope")
                    warnings.append(
                        f"non-unique lift for pair ({row},{col}); "
                        "deterministic representative chosen")
                entries[(row, col)] = f
            else:
                entries[(row, col)] = LaurentPoly.zero()
            processed.append(row)
    return StabMatrix(
        names=tuple(model.names()),
        entries=entries,
        chamber_cochar=dict(chamber.cochar),
        slope=Fraction(slope) if slope is not None else None,
        order=tuple(refinement),
        warnings=warnings,
    )


@dataclass
class VerifyReport:
    triangular: bool
    diagonal: bool
    windows: bool
    edge_divisibility: bool
    failures: list

    @property
    def ok(self):
        return self.triangular and self.diagonal and self.windows and self.edge_divisibility

    def __bool__(self):
        return self.ok

    def lines(self):
        out = []
        for name, flag in (
            ("triangularity", self.triangular),
            ("diagonal normalization", self.diagonal),
            ("Newton windows (incl. rank-1 projections)", self.windows),
            ("GKM edge divisibility", self.edge_divisibility),
        ):
            out.append(f"{'PASS' if flag else 'FAIL'}  {name}")
        for f in self.failures:
            out.append(f"      {f}")
        return out


def _rank1_directions(model):
    """Primitive cocharacters of the rank-1 subtori spanned by tangent weights."""
    dirs = set()
    for pt in model.fixed_points:
        for w in pt.tangent:
            v = w.project(model.a_coords).vector(model.a_coords)
            dirs.add(primitive(v))
    return sorted(dirs)


def verify_stab(stab, model, chamber, slope=None):
    """Re-check the envelope axioms independently of the constructor.

    (1) triangularity w.r.t. the ample order, (2) diagonal = normalization,
    (3) Newton windows including all rank-1 subtorus projections, (4) GKM
    edge divisibility of every column.
    """
    order = ample_order(model, chamber)
    names = model.names()
    a_coords = model.a_coords
    failures = []

    triangular = True
    for row in names:
        for col in names:
            if not stab.entry(row, col).is_zero() and not order.leq(row, col):
                triangular = False
                failures.append(f"triangularity: nonzero entry ({row},{col})")

    diagonal = True
    for n in names:
        if stab.entry(n, n) != normalization(model, n, chamber):
            diagonal = False
            failures.append(f"diagonal: entry ({n},{n}) != normalization")

    windows = True
    rank1 = _rank1_directions(model)
    for row in names:
        for col in names:
            p = stab.entry(row, col)
            if p.is_zero() or not order.leq(row, col):
                continue
            window = degree_polytope(model, chamber, row, col, slope)
            if not window.contains_poly(p, a_coords):
                windows = False
                failures.append(f"window: entry ({row},{col}) exceeds its Newton window")
                continue
            # rank-1 projections: intervals under primitive directions
            verts = [tuple(v + s for v, s in zip(vert, window.window.shift))
                     for vert in window.window.base.vertices]
            for xi in rank1:
                vals = [sum(Fraction(a) * b for a, b in zip(xi, v)) for v in verts]
                lo, hi = min(vals), max(vals)
                for w in p.support():
                    t = sum(Fraction(a) * b for a, b in
                            zip(xi, w.project(a_coords).vector(a_coords)))
                    if not (lo <= t <= hi):
                        windows = False
                        failures.append(
                            f"window: rank-1 projection {xi} fails for ({row},{col})")
                        break

    edge_div = True
    for e in model.edges:
        for col in names:
            diff = stab.entry(e.src, col) - stab.entry(e.dst, col)
            if not diff.divisible_by_binomial(e.weight):
                edge_div = False
                failures.append(
                    f"edge divisibility: edge ({e.src},{e.dst}) fails in column {col}")

    return VerifyReport(triangular, diagonal, windows, edge_div, failures)
