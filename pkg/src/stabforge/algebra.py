"""Exact symbolic arithmetic for torus characters and Laurent polynomials.

All K-theory data in this package is carried by two types:

  Weight      -- a character of the torus, stored as a sparse map
                 coordinate name -> rational exponent.  The lattice is the
                 integer character lattice extended by half-integers in the
                 h-direction and by fractional slope shifts.
  LaurentPoly -- a finite Z-linear combination of Weights, i.e. an element
                 of Z[h^{±1/2}][A^{±1}] (and possibly further coordinates).

Everything is immutable and exact; no floats anywhere.
"""

from __future__ import annotations

import re
from fractions import Fraction

__all__ = [
    "Weight",
    "LaurentPoly",
    "ThetaClass",
    "parse_weight",
    "parse_laurent",
    "koszul_from_weights",
    "restrict_to_subtorus",
    "theta_degree",
    "kahler_twist_class",
]


_NAME_RE = re.compile(r"([A-Za-z]+)(\d*)")


def _name_key(name):
    """Natural sort key so a2 < a10 and letters order alphabetically."""
    m = _NAME_RE.fullmatch(name)
    if m is None:
        return (name, 0)
    return (m.group(1), int(m.group(2)) if m.group(2) else -1)


class Weight:
    """A torus character with exact rational exponents.

    Immutable and hashable; zero exponents are never stored.  Supports
    additive notation: w1 + w2 is the character of the product a^{w1}a^{w2}.
    """

    __slots__ = ("_items", "_hash")

    def __init__(self, exponents=None):
        items = []
        if exponents:
            for name, e in (exponents.items() if isinstance(exponents, dict) else exponents):
                f = Fraction(e)
                if f != 0:
                    items.append((name, f))
        items.sort(key=lambda kv: _name_key(kv[0]))
        self._items = tuple(items)
        self._hash = hash(self._items)

    @staticmethod
    def unit(name, exp=1):
        return Weight({name: Fraction(exp)})

    @staticmethod
    def zero():
        return Weight()

    def items(self):
        return self._items

    def get(self, name):
        for n, e in self._items:
            if n == name:
                return e
        return Fraction(0)

    def names(self):
        return tuple(n for n, _ in self._items)

    def is_zero(self):
        return not self._items

    def __add__(self, other):
        d = dict(self._items)
        for n, e in other._items:
            d[n] = d.get(n, Fraction(0)) + e
        return Weight(d)

    def __sub__(self, other):
        d = dict(self._items)
        for n, e in other._items:
            d[n] = d.get(n, Fraction(0)) - e
        return Weight(d)

    def __neg__(self):
        return Weight({n: -e for n, e in self._items})

    def __mul__(self, scalar):
        s = Fraction(scalar)
        return Weight({n: e * s for n, e in self._items})

    __rmul__ = __mul__

    def pair(self, cochar):
        """Pairing <w, sigma> with a cocharacter given as {name: rational}."""
        return sum((e * Fraction(cochar.get(n, 0)) for n, e in self._items), Fraction(0))

    def project(self, names):
        """Keep only the listed coordinates."""
        keep = set(names)
        return Weight({n: e for n, e in self._items if n in keep})

    def drop(self, names):
        """Remove the listed coordinates."""
        kill = set(names)
        return Weight({n: e for n, e in self._items if n not in kill})

    def vector(self, names):
        """Exponents as a tuple over an explicit coordinate order."""
        return tuple(self.get(n) for n in names)

    def is_integral(self):
        return all(e.denominator == 1 for _, e in self._items)

    def total_degree(self):
        return sum((e for _, e in self._items), Fraction(0))

    def __eq__(self, other):
        return isinstance(other, Weight) and self._items == other._items

    def __hash__(self):
        return self._hash

    def __repr__(self):
        return f"Weight({self.to_string()})"

    def to_string(self):
        """Multiplicative string form, e.g. ``a1^2*h^-1/2`` or ``1``."""
        if not self._items:
            return "1"
        parts = []
        for n, e in self._items:
            if e == 1:
                parts.append(n)
            else:
                parts.append(f"{n}^{e}")
        return "*".join(parts)


def _cmp_weights(w1, w2):
    """Total order on weights: graded lexicographic, fixed natural name order."""
    d1, d2 = w1.total_degree(), w2.total_degree()
    if d1 != d2:
        return -1 if d1 < d2 else 1
    names = sorted({n for n, _ in w1.items()} | {n for n, _ in w2.items()}, key=_name_key)
    for n in names:
        e1, e2 = w1.get(n), w2.get(n)
        if e1 != e2:
            return -1 if e1 < e2 else 1
    return 0


class _WeightKey:
    __slots__ = ("w",)

    def __init__(self, w):
        self.w = w

    def __lt__(self, other):
        return _cmp_weights(self.w, other.w) < 0

    def __eq__(self, other):
        return _cmp_weights(self.w, other.w) == 0


def term_order_key(w):
    """Sort key object realizing the canonical term order on Weights."""
    return _WeightKey(w)


class LaurentPoly:
    """Exact multivariate Laurent polynomial with integer coefficients.

    Terms are stored as a map Weight -> nonzero int.  The canonical term
    order (graded lex with fixed coordinate order) makes serialization and
    leading-term extraction deterministic.
    """

    __slots__ = ("_terms",)

    def __init__(self, terms=None):
        t = {}
        if terms:
            for w, c in (terms.items() if isinstance(terms, dict) else terms):
                if not isinstance(c, int):
                    f = Fraction(c)
                    if f.denominator != 1:
                        raise ValueError(f"non-integer coefficient {c!r}")
                    c = f.numerator
                if c != 0:
                    t[w] = t.get(w, 0) + c
                    if t[w] == 0:
                        del t[w]
        self._terms = t

    # -- constructors -----------------------------------------------------

    @staticmethod
    def zero():
        return LaurentPoly()

    @staticmethod
    def one():
        return LaurentPoly({Weight.zero(): 1})

    @staticmethod
    def monomial(w, coeff=1):
        return LaurentPoly({w: coeff})

    @staticmethod
    def from_const(c):
        return LaurentPoly({Weight.zero(): c})

    # -- basic queries -----------------------------------------------------

    def terms(self):
        return dict(self._terms)

    def items_sorted(self, reverse=True):
        return sorted(self._terms.items(), key=lambda kv: term_order_key(kv[0]), reverse=reverse)

    def is_zero(self):
        return not self._terms

    def __len__(self):
        return len(self._terms)

    def __bool__(self):
        return bool(self._terms)

    def coeff(self, w):
        return self._terms.get(w, 0)

    def support(self):
        return set(self._terms)

    def leading(self):
        """(weight, coeff) of the canonical-order leading term."""
        if not self._terms:
            raise ValueError("zero polynomial has no leading term")
        w = max(self._terms, key=term_order_key)
        return w, self._terms[w]

    def is_monomial(self):
        return len(self._terms) == 1

    def is_unit(self):
        """Units of Z[h^{±1/2}]: single term, coefficient ±1, h-only exponent."""
        if len(self._terms) != 1:
            return False
        [(w, c)] = self._terms.items()
        if c not in (1, -1):
            return False
        return all(n == "h" for n, _ in w.items())

    # -- ring operations ---------------------------------------------------

    def __add__(self, other):
        if isinstance(other, int):
            other = LaurentPoly.from_const(other)
        d = dict(self._terms)
        for w, c in other._terms.items():
            n = d.get(w, 0) + c
            if n:
                d[w] = n
            else:
                d.pop(w, None)
        out = LaurentPoly()
        out._terms = d
        return out

    __radd__ = __add__

    def __neg__(self):
        out = LaurentPoly()
        out._terms = {w: -c for w, c in self._terms.items()}
        return out

    def __sub__(self, other):
        if isinstance(other, int):
            other = LaurentPoly.from_const(other)
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if isinstance(other, int):
            if other == 0:
                return LaurentPoly.zero()
            out = LaurentPoly()
            out._terms = {w: c * other for w, c in self._terms.items()}
            return out
        d = {}
        for w1, c1 in self._terms.items():
            for w2, c2 in other._terms.items():
                w = w1 + w2
                n = d.get(w, 0) + c1 * c2
                if n:
                    d[w] = n
                else:
                    d.pop(w, None)
        out = LaurentPoly()
        out._terms = d
        return out

    __rmul__ = __mul__

    def __pow__(self, n):
        if n < 0:
            raise ValueError("negative powers only for monomials; invert the weight instead")
        out = LaurentPoly.one()
        base = self
        while n:
            if n & 1:
                out = out * base
            base = base * base
            n >>= 1
        return out

    def __eq__(self, other):
        if isinstance(other, int):
            other = LaurentPoly.from_const(other)
        return isinstance(other, LaurentPoly) and self._terms == other._terms

    def __hash__(self):
        return hash(frozenset(self._terms.items()))

    # -- structure ----------------------------------------------------------

    def names(self):
        out = set()
        for w in self._terms:
            out.update(w.names())
        return out

    def map_weights(self, fn):
        """Push every exponent through fn (collecting coefficients)."""
        d = {}
        for w, c in self._terms.items():
            w2 = fn(w)
            n = d.get(w2, 0) + c
            if n:
                d[w2] = n
            else:
                d.pop(w2, None)
        out = LaurentPoly()
        out._terms = d
        return out

    def substitute_one(self, names):
        """Set the listed coordinates to 1 (drop them from every exponent)."""
        return self.map_weights(lambda w: w.drop(names))

    def exponents_vectors(self, coords):
        return [w.vector(coords) for w in self._terms]

    # -- divisibility by binomial Koszul factors ----------------------------

    def divisible_by_binomial(self, w):
        """True iff (1 - a^{-w}) divides self.

        The kernel of Z[L] -> Z[L/Zw] is exactly the ideal (1 - a^{-w}), so
        divisibility is equivalent to every coset class summing to zero.
        """
        proj = self.map_weights(lambda mu: _reduce_mod(mu, w))
        return proj.is_zero()

    def divide_by_binomial(self, w):
        """Exact quotient by (1 - a^{-w}), or None if not divisible."""
        if not self.divisible_by_binomial(w):
            return None
        # telescoping within each coset chain: if g = (1 - a^{-w}) * q then,
        # ordering the chain mu0, mu0-w, mu0-2w, ..., the partial sums of g's
        # coefficients from the top recover q.
        chains = {}
        name0, e0 = w.items()[0]
        for mu, c in self._terms.items():
            k = mu.get(name0) / e0
            rep = mu - w * _floor_frac(k)
            chains.setdefault(rep, []).append((k, mu, c))
        q = {}
        for rep, entries in chains.items():
            entries.sort(key=lambda t: t[0], reverse=True)
            running = 0
            idx = 0
            k_top = entries[0][0]
            # walk down the chain from the top exponent
            k = k_top
            while idx < len(entries) or running != 0:
                if idx < len(entries) and entries[idx][0] == k:
                    running += entries[idx][2]
                    idx += 1
                if running != 0:
                    mu_here = entries[0][1] - w * (k_top - k)
                    q[mu_here] = running
                k -= 1
                if k < k_top - 10000:
                    raise ArithmeticError("binomial division runaway")
        return LaurentPoly(q)

    # -- serialization -------------------------------------------------------

    def to_string(self):
        """Deterministic text form: terms in decreasing canonical order."""
        if not self._terms:
            return "0"
        parts = []
        for w, c in self.items_sorted():
            mono = w.to_string()
            if mono == "1":
                piece = str(abs(c))
            elif abs(c) == 1:
                piece = mono
            else:
                piece = f"{abs(c)}*{mono}"
            sign = "-" if c < 0 else "+"
            parts.append((sign, piece))
        first_sign, first_piece = parts[0]
        out = ("-" if first_sign == "-" else "") + first_piece
        for sign, piece in parts[1:]:
            out += sign + piece
        return out

    def __repr__(self):
        return f"LaurentPoly({self.to_string()})"


def _floor_frac(f):
    f = Fraction(f)
    return f.numerator // f.denominator


def _reduce_mod(mu, w):
    """Canonical representative of mu modulo Z*w (w nonzero)."""
    name0, e0 = w.items()[0]
    k = mu.get(name0) / e0
    return mu - w * _floor_frac(k)


# -- parsing -----------------------------------------------------------------

_TOKEN_RE = re.compile(r"\s*([A-Za-z][A-Za-z0-9]*|\^|\*|/|\(|\)|-?\d+)")


def _tokenize(s):
    out = []
    pos = 0
    while pos < len(s):
        m = _TOKEN_RE.match(s, pos)
        if m is None:
            raise ValueError(f"cannot parse character {s!r} at position {pos}")
        out.append(m.group(1))
        pos = m.end()
    return out


def parse_weight(s):
    """Parse a multiplicative character string like ``a1/(h*a2)`` or ``a1^-1``."""
    tokens = _tokenize(str(s))
    pos = 0

    def peek():
        return tokens[pos] if pos < len(tokens) else None

    def parse_exponent():
        nonlocal pos
        tok = tokens[pos]
        pos += 1
        num = int(tok)
        if (peek() == "/" and pos + 1 < len(tokens)
                and re.fullmatch(r"-?\d+", tokens[pos + 1])):
            pos += 1
            den = int(tokens[pos])
            pos += 1
            return Fraction(num, den)
        return Fraction(num)

    def parse_atom():
        nonlocal pos
        tok = peek()
        if tok == "(":
            pos += 1
            w = parse_expr()
            if peek() != ")":
                raise ValueError(f"unbalanced parenthesis in {s!r}")
            pos += 1
            base = w
        elif tok is not None and re.fullmatch(r"-?\d+", tok):
            pos += 1
            if tok not in ("1", "-1"):
                raise ValueError(f"characters are monomials; bad literal {tok!r} in {s!r}")
            base = Weight.zero()
        else:
            pos += 1
            base = Weight.unit(tok)
        if peek() == "^":
            pos += 1
            e = parse_exponent()
            base = base * e
        return base

    def parse_expr():
        nonlocal pos
        w = parse_atom()
        while peek() in ("*", "/"):
            op = tokens[pos]
            pos += 1
            rhs = parse_atom()
            w = w + rhs if op == "*" else w - rhs
        return w

    w = parse_expr()
    if pos != len(tokens):
        raise ValueError(f"trailing tokens in character {s!r}")
    return w


def parse_laurent(s):
    """Parse the deterministic LaurentPoly text form back into a polynomial."""
    s = str(s).strip()
    if s == "0":
        return LaurentPoly.zero()
    # split into signed chunks; a +/- right after '^', '*' or '/' belongs to
    # an exponent (e.g. h^-1/2), not to a new term
    chunks = []
    sign = 1
    cur = ""
    last_sig = ""
    for ch in s:
        if ch in "+-":
            if last_sig in ("^", "*", "/"):
                cur += ch
                last_sig = ch
            elif not cur.strip():
                sign = sign * (1 if ch == "+" else -1)
            else:
                chunks.append((sign, cur))
                sign = 1 if ch == "+" else -1
                cur = ""
                last_sig = ""
        else:
            cur += ch
            if not ch.isspace():
                last_sig = ch
    chunks.append((sign, cur))
    total = LaurentPoly.zero()
    for sgn, chunk in chunks:
        chunk = chunk.strip()
        coeff = 1
        m = re.match(r"^(\d+)(?:\*(.*))?$", chunk)
        if m and (m.group(2) is None):
            total = total + LaurentPoly.from_const(sgn * int(m.group(1)))
            continue
        if m:
            coeff = int(m.group(1))
            chunk = m.group(2)
        w = parse_weight(chunk)
        total = total + LaurentPoly.monomial(w, sgn * coeff)
    return total


# -- spec operations ----------------------------------------------------------


def koszul_from_weights(weights, a_coords=None):
    """Koszul polynomial of a normal bundle: prod over w of (1 - a^{-w}).

    Raises if some weight restricts to zero on the subtorus coordinates
    (an A-fixed direction cannot appear in a normal bundle).
    """
    p = LaurentPoly.one()
    for w in weights:
        aw = w.project(a_coords) if a_coords is not None else w
        if aw.is_zero():
            raise ValueError("fixed direction in normal bundle")
        p = p * (LaurentPoly.one() - LaurentPoly.monomial(-w))
    return p


def restrict_to_subtorus(p, projection):
    """Push exponents through an integral lattice map.

    ``projection`` maps coordinate names to Weights in the target
    coordinates; unmapped coordinates are kept unchanged.
    """

    def fn(w):
        out = Weight.zero()
        for n, e in w.items():
            img = projection.get(n)
            out = out + (img * e if img is not None else Weight({n: e}))
        return out

    return p.map_weights(fn)


class ThetaClass:
    """Formal Z-linear combination of characters, Theta(sum n_mu a^mu).

    Carries exactly the data needed for degree computations of theta
    bundles: a virtual multiset of weights.
    """

    __slots__ = ("_terms",)

    def __init__(self, terms=None):
        t = {}
        if terms is not None:
            if isinstance(terms, dict):
                it = terms.items()
            else:
                it = ((w, 1) for w in terms)
            for w, n in it:
                n = int(n)
                if n:
                    t[w] = t.get(w, 0) + n
                    if t[w] == 0:
                        del t[w]
        self._terms = t

    def terms(self):
        return dict(self._terms)

    def __add__(self, other):
        d = dict(self._terms)
        for w, n in other._terms.items():
            m = d.get(w, 0) + n
            if m:
                d[w] = m
            else:
                d.pop(w, None)
        out = ThetaClass()
        out._terms = d
        return out

    def __neg__(self):
        out = ThetaClass()
        out._terms = {w: -n for w, n in self._terms.items()}
        return out

    def __sub__(self, other):
        return self + (-other)

    def dual(self):
        out = ThetaClass()
        out._terms = {-w: n for w, n in self._terms.items()}
        return out

    def rank(self):
        return sum(self._terms.values())

    def det_weight(self):
        total = Weight.zero()
        for w, n in self._terms.items():
            total = total + w * n
        return total

    def __eq__(self, other):
        return isinstance(other, ThetaClass) and self._terms == other._terms

    def __repr__(self):
        inner = " + ".join(f"{n}*[{w.to_string()}]" for w, n in self._terms.items())
        return f"ThetaClass({inner or '0'})"


def theta_degree(cls, coords):
    """Degree of Theta(cls) along the subtorus with the given coordinates.

    Returns the integral quadratic form sum n_mu mu (x) mu restricted to the
    subtorus, as a symmetric matrix of Fractions over ``coords``.
    """
    r = len(coords)
    mat = [[Fraction(0)] * r for _ in range(r)]
    for w, n in cls.terms().items():
        v = w.vector(coords)
        for i in range(r):
            if v[i] == 0:
                continue
            for j in range(r):
                if v[j] != 0:
                    mat[i][j] += n * v[i] * v[j]
    return mat


def kahler_twist_class(weights, z_name="z"):
    """ThetaClass of U(V, z) = Theta((z-1)(V - C^{rk V})) for V = sum of weights."""
    z = Weight.unit(z_name)
    out = ThetaClass()
    for w in weights:
        out = out + ThetaClass({w + z: 1, z: -1, w: -1, Weight.zero(): 1})
    return out
