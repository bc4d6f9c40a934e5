"""Truncated q-series with exact Laurent-polynomial coefficients.

A series is a finite map q-exponent -> LaurentPoly with a truncation order:
all stored exponents are < order, and arithmetic never claims precision
beyond the weakest input.  Exponents are rationals (fractional powers of q
appear through base changes and slope shifts); they may be negative.
"""

from __future__ import annotations

from fractions import Fraction

from .algebra import LaurentPoly

__all__ = ["TruncatedQSeries"]


class TruncatedQSeries:

    __slots__ = ("coeffs", "order")

    def __init__(self, coeffs=None, order=None):
        if order is None:
            raise ValueError("a truncation order is required")
        self.order = Fraction(order)
        c = {}
        if coeffs:
            for e, p in (coeffs.items() if isinstance(coeffs, dict) else coeffs):
                e = Fraction(e)
                if e >= self.order or p.is_zero():
                    continue
                if e in c:
                    c[e] = c[e] + p
                    if c[e].is_zero():
                        del c[e]
                else:
                    c[e] = p
        self.coeffs = c

    @staticmethod
    def zero(order):
        return TruncatedQSeries({}, order)

    @staticmethod
    def one(order):
        return TruncatedQSeries({Fraction(0): LaurentPoly.one()}, order)

    @staticmethod
    def from_poly(p, order):
        return TruncatedQSeries({Fraction(0): p}, order)

    def is_zero(self):
        return not self.coeffs

    def valuation(self):
        """Smallest q-exponent with nonzero coefficient (None for zero)."""
        return min(self.coeffs) if self.coeffs else None

    def leading(self):
        v = self.valuation()
        if v is None:
            raise ValueError("zero series has no leading term")
        return v, self.coeffs[v]

    def coeff(self, e):
        return self.coeffs.get(Fraction(e), LaurentPoly.zero())

    def truncate(self, order):
        order = min(Fraction(order), self.order)
        return TruncatedQSeries({e: p for e, p in self.coeffs.items() if e < order}, order)

    def __add__(self, other):
        order = min(self.order, other.order)
        c = {e: p for e, p in self.coeffs.items() if e < order}
        for e, p in other.coeffs.items():
            if e >= order:
                continue
            if e in c:
                s = c[e] + p
                if s.is_zero():
                    del c[e]
                else:
                    c[e] = s
            else:
                c[e] = p
        return TruncatedQSeries(c, order)

    def __neg__(self):
        return TruncatedQSeries({e: -p for e, p in self.coeffs.items()}, self.order)

    def __sub__(self, other):
        return self + (-other)

    def scale(self, p):
        """Multiply by a LaurentPoly (exact in q)."""
        if isinstance(p, int):
            p = LaurentPoly.from_const(p)
        return TruncatedQSeries({e: c * p for e, c in self.coeffs.items()}, self.order)

    def shift_q(self, e):
        """Multiply by q^e."""
        e = Fraction(e)
        return TruncatedQSeries({k + e: p for k, p in self.coeffs.items()},
                                self.order + e)

    def __mul__(self, other):
        v1 = self.valuation()
        v2 = other.valuation()
        m1 = min(v1, 0) if v1 is not None else Fraction(0)
        m2 = min(v2, 0) if v2 is not None else Fraction(0)
        order = min(self.order + m2, other.order + m1)
        c = {}
        for e1, p1 in self.coeffs.items():
            for e2, p2 in other.coeffs.items():
                e = e1 + e2
                if e >= order:
                    continue
                prod = p1 * p2
                if e in c:
                    s = c[e] + prod
                    if s.is_zero():
                        del c[e]
                    else:
                        c[e] = s
                elif not prod.is_zero():
                    c[e] = prod
        return TruncatedQSeries(c, order)

    def inverse(self):
        """Exact inverse; the leading coefficient must be a +-1 monomial."""
        v, lead = self.leading()
        lw, lc = lead.leading()
        if not lead.is_monomial() or lc not in (1, -1):
            raise ValueError("series inverse needs a unit monomial leading coefficient")
        inv_lead = LaurentPoly.monomial(-lw, lc)
        # x = q^v * lead * (1 + r) with val(r) > 0
        order = self.order - 2 * v
        rest = TruncatedQSeries(
            {e - v: p * inv_lead for e, p in self.coeffs.items() if e != v},
            self.order - v)
        out = TruncatedQSeries.one(order)
        term = TruncatedQSeries.one(order)
        rv = rest.valuation()
        if rv is not None:
            k = 1
            while k * rv < order:
                term = (term * rest).truncate(order)
                if term.is_zero():
                    break
                out = out + (term if k % 2 == 0 else -term)
                k += 1
        return out.scale(inv_lead).shift_q(-v)

    def map_coeffs(self, fn):
        return TruncatedQSeries({e: fn(p) for e, p in self.coeffs.items()}, self.order)

    def substitute_q_power(self, cochar, new_order=None):
        """Substitute a -> q^{cochar} a: each monomial a^w picks up q^{<w,cochar>}.

        Terms beyond the stored truncation cannot be recovered, so the caller
        must supply (or accept) a sound reduced order: by default the order
        drops by the largest negative pairing among stored monomials.
        """
        shifts = []
        c = {}
        for e, p in self.coeffs.items():
            for w, coeff in p.terms().items():
                d = w.pair(cochar)
                shifts.append(d)
                ne = e + d
                c.setdefault(ne, []).append((w, coeff))
        if new_order is None:
            drop = min([Fraction(0)] + shifts)
            new_order = self.order + drop
        out = {}
        for e, terms in c.items():
            out[e] = LaurentPoly(dict_accumulate(terms))
        return TruncatedQSeries(out, new_order)

    def __eq__(self, other):
        """Equality of the overlapping truncations."""
        if not isinstance(other, TruncatedQSeries):
            return NotImplemented
        order = min(self.order, other.order)
        a = {e: p for e, p in self.coeffs.items() if e < order}
        b = {e: p for e, p in other.coeffs.items() if e < order}
        return a == b

    def __repr__(self):
        if not self.coeffs:
            return f"TruncatedQSeries(0; O(q^{self.order}))"
        parts = [f"({p.to_string()})*q^{e}" for e, p in sorted(self.coeffs.items())]
        return "TruncatedQSeries(" + " + ".join(parts) + f"; O(q^{self.order}))"

    def to_strings(self):
        """Deterministic [(q-exponent string, coefficient string)] pairs."""
        return [(str(e), p.to_string()) for e, p in sorted(self.coeffs.items())]


def dict_accumulate(pairs):
    d = {}
    for w, c in pairs:
        d[w] = d.get(w, 0) + c
    return {w: c for w, c in d.items() if c != 0}
