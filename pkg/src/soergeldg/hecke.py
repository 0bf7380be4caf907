"""Hecke algebra over Z[v, v^-1] in the standard basis, Bott-Samelson
classes, the Deodhar-style graded rank pairing, and Euler characteristics
of complexes."""
from __future__ import annotations

from itertools import product

from .coxeter import Element


class LaurentInt:
    """Laurent polynomial in v with integer coefficients, as {exp: coeff}."""

    __slots__ = ("coeffs",)

    def __init__(self, coeffs=None):
        self.coeffs = {k: c for k, c in (coeffs or {}).items() if c}

    @classmethod
    def monomial(cls, k, c=1):
        return cls({k: c})

    @classmethod
    def one(cls):
        return cls({0: 1})

    def is_zero(self):
        return not self.coeffs

    def __add__(self, other):
        out = dict(self.coeffs)
        for k, c in other.coeffs.items():
            s = out.get(k, 0) + c
            if s:
                out[k] = s
            else:
                del out[k]
        r = LaurentInt()
        r.coeffs = out
        return r

    def __sub__(self, other):
        return self + (-other)

    def __neg__(self):
        r = LaurentInt()
        r.coeffs = {k: -c for k, c in self.coeffs.items()}
        return r

    def __mul__(self, other):
        if isinstance(other, int):
            r = LaurentInt()
            r.coeffs = {k: c * other for k, c in self.coeffs.items()} \
                if other else {}
            return r
        out = {}
        for k1, c1 in self.coeffs.items():
            for k2, c2 in other.coeffs.items():
                k = k1 + k2
                s = out.get(k, 0) + c1 * c2
                if s:
                    out[k] = s
                else:
                    del out[k]
        r = LaurentInt()
        r.coeffs = out
        return r

    __rmul__ = __mul__

    def bar(self):
        """v -> v^{-1}."""
        r = LaurentInt()
        r.coeffs = {-k: c for k, c in self.coeffs.items()}
        return r

    def __eq__(self, other):
        return isinstance(other, LaurentInt) and self.coeffs == other.coeffs

    def __hash__(self):
        return hash(frozenset(self.coeffs.items()))

    def __repr__(self):
        if not self.coeffs:
            return "0"
        parts = []
        for k in sorted(self.coeffs):
            c = self.coeffs[k]
            if k == 0:
                parts.append(f"{c}")
            elif k == 1:
                parts.append(f"{c}*v" if abs(c) != 1 else ("v" if c > 0 else "-v"))
            else:
                parts.append(f"{c}*v^{k}" if abs(c) != 1
                             else (f"v^{k}" if c > 0 else f"-v^{k}"))
        return " + ".join(parts).replace("+ -", "- ")


V = LaurentInt.monomial(1)
VINV = LaurentInt.monomial(-1)


class HeckeElt:
    """Element in the standard basis: {Element: LaurentInt}, finite support."""

    __slots__ = ("system", "coords")

    def __init__(self, system, coords=None):
        self.system = system
        self.coords = {x: c for x, c in (coords or {}).items()
                       if not c.is_zero()}

    @classmethod
    def unit(cls, system):
        return cls(system, {system.identity(): LaurentInt.one()})

    @classmethod
    def standard(cls, system, x):
        return cls(system, {x: LaurentInt.one()})

    def __add__(self, other):
        out = dict(self.coords)
        for x, c in other.coords.items():
            s = out.get(x, LaurentInt()) + c
            if s.is_zero():
                out.pop(x, None)
            else:
                out[x] = s
        return HeckeElt(self.system, out)

    def __sub__(self, other):
        return self + other.scale(LaurentInt({0: -1}))

    def scale(self, laurent):
        return HeckeElt(self.system,
                        {x: c * laurent for x, c in self.coords.items()})

    def _mul_gen(self, s):
        """Right multiplication by delta_s."""
        R = self.system
        out = {}
        for x, c in self.coords.items():
            xs = Element(R, R._right[x.index][s])
            if xs.length > x.length:
                _acc(out, xs, c)
            else:
                _acc(out, xs, c)
                _acc(out, x, c * (VINV - V))
        return HeckeElt(R, out)

    def __mul__(self, other):
        R = self.system
        out = HeckeElt(R, {})
        for x, c in other.coords.items():
            term = self
            for s in R.canonical_word(x):
                term = term._mul_gen(s)
            out = out + term.scale(c)
        return out

    def __eq__(self, other):
        return (isinstance(other, HeckeElt) and self.system is other.system
                and self.coords == other.coords)

    def __repr__(self):
        if not self.coords:
            return "0"
        parts = [f"({c!r})*d[{x!r}]" for x, c in sorted(
            self.coords.items(), key=lambda kv: kv[0].index)]
        return " + ".join(parts)


def _acc(table, x, c):
    s = table.get(x, LaurentInt()) + c
    if s.is_zero():
        table.pop(x, None)
    else:
        table[x] = s


def mul(a, b):
    return a * b


def bott_samelson_class(realization, word):
    """b_w = product of (delta_s + v) along the word."""
    out = HeckeElt.unit(realization)
    for s in word:
        bs = HeckeElt(realization, {
            realization.element_of((s,)): LaurentInt.one(),
            realization.identity(): V,
        })
        out = out * bs
    return out


def deodhar_class(realization, word):
    """Independent expansion: sum over subexpressions of v^defect(e) delta_{w^e}.
    Used as the combinatorial cross-check against bott_samelson_class."""
    out = {}
    for bits in product((0, 1), repeat=len(word)):
        dec = realization.decorate(word, bits)
        _acc(out, dec.element(), LaurentInt.monomial(dec.defect))
    return HeckeElt(realization, out)


def graded_rank_pairing(realization, w1, w2):
    """Sum of v^(defect(e1)+defect(e2)) over pairs expressing equal elements."""
    by_elem = {}
    for bits in product((0, 1), repeat=len(w1)):
        dec = realization.decorate(w1, bits)
        by_elem.setdefault(dec.element(), []).append(dec.defect)
    total = LaurentInt()
    for bits in product((0, 1), repeat=len(w2)):
        dec = realization.decorate(w2, bits)
        for d1 in by_elem.get(dec.element(), ()):
            total = total + LaurentInt.monomial(d1 + dec.defect)
    return total


def euler_char(complex_obj):
    """Alternating sum over summands of (-1)^cohdeg v^twist b_word."""
    R = complex_obj.realization
    out = HeckeElt(R, {})
    for sm in complex_obj.summands:
        term = bott_samelson_class(R, sm.word).scale(
            LaurentInt.monomial(sm.q, (-1) ** (sm.p & 1)))
        out = out + term
    return out
