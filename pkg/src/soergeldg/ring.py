"""Exact scalar arithmetic: rationals, sparse multivariate polynomials in the
simple roots, and normalized rational functions.

Polynomials live in Q[a_0, ..., a_{r-1}] where a_i is the simple root of the
i-th generator and carries degree 2.  Monomials are exponent tuples; the zero
polynomial has empty support.  Rational functions are kept in canonical form:
the denominator is monic under graded-lex order and coprime to the numerator.
No floating point anywhere.
"""
from __future__ import annotations

from fractions import Fraction

Scalar = Fraction

ZERO = Fraction(0)
ONE = Fraction(1)


class NonDivisible(ArithmeticError):
    """Raised when an exact polynomial division leaves a remainder."""


def _grlex_key(exps):
    return (sum(exps), exps)


class Polynomial:
    """Sparse multivariate polynomial over Q.

    ``terms`` maps exponent tuples to nonzero Fractions.  Each variable has
    degree 2, so a monomial with exponent sum k has degree 2k.
    """

    __slots__ = ("nvars", "terms", "_hash")

    def __init__(self, nvars, terms=None):
        self.nvars = nvars
        if terms:
            self.terms = {e: c for e, c in terms.items() if c}
        else:
            self.terms = {}
        self._hash = None

    @classmethod
    def zero(cls, nvars):
        return cls(nvars)

    @classmethod
    def constant(cls, nvars, c):
        c = Fraction(c)
        if not c:
            return cls(nvars)
        return cls(nvars, {(0,) * nvars: c})

    @classmethod
    def generator(cls, nvars, i):
        exps = [0] * nvars
        exps[i] = 1
        return cls(nvars, {tuple(exps): ONE})

    def is_zero(self):
        return not self.terms

    def is_constant(self):
        if not self.terms:
            return True
        return set(self.terms) == {(0,) * self.nvars}

    def constant_value(self):
        if not self.terms:
            return ZERO
        if not self.is_constant():
            raise ValueError("polynomial is not constant")
        return next(iter(self.terms.values()))

    def degree(self):
        """Degree with roots in degree 2; -1 for the zero polynomial."""
        if not self.terms:
            return -1
        return 2 * max(sum(e) for e in self.terms)

    def is_homogeneous(self):
        if not self.terms:
            return True
        degs = {sum(e) for e in self.terms}
        return len(degs) == 1

    def leading(self):
        """Leading (exps, coeff) under graded-lex order."""
        if not self.terms:
            raise ValueError("zero polynomial has no leading term")
        e = max(self.terms, key=_grlex_key)
        return e, self.terms[e]

    def __eq__(self, other):
        return (isinstance(other, Polynomial) and self.nvars == other.nvars
                and self.terms == other.terms)

    def __hash__(self):
        if self._hash is None:
            self._hash = hash((self.nvars, frozenset(self.terms.items())))
        return self._hash

    def __add__(self, other):
        res = dict(self.terms)
        for e, c in other.terms.items():
            s = res.get(e, ZERO) + c
            if s:
                res[e] = s
            else:
                res.pop(e, None)
        out = Polynomial(self.nvars)
        out.terms = res
        return out

    def __sub__(self, other):
        res = dict(self.terms)
        for e, c in other.terms.items():
            s = res.get(e, ZERO) - c
            if s:
                res[e] = s
            else:
                res.pop(e, None)
        out = Polynomial(self.nvars)
        out.terms = res
        return out

    def __neg__(self):
        out = Polynomial(self.nvars)
        out.terms = {e: -c for e, c in self.terms.items()}
        return out

    def __mul__(self, other):
        if isinstance(other, (int, Fraction)):
            return self.scale(other)
        res = {}
        for e1, c1 in self.terms.items():
            for e2, c2 in other.terms.items():
                e = tuple(a + b for a, b in zip(e1, e2))
                s = res.get(e, ZERO) + c1 * c2
                if s:
                    res[e] = s
                else:
                    del res[e]
        out = Polynomial(self.nvars)
        out.terms = res
        return out

    __rmul__ = __mul__

    def scale(self, c):
        c = Fraction(c)
        out = Polynomial(self.nvars)
        if c:
            out.terms = {e: c * v for e, v in self.terms.items()}
        return out

    def __pow__(self, k):
        if k < 0:
            raise ValueError("negative power of a polynomial")
        out = Polynomial.constant(self.nvars, 1)
        for _ in range(k):
            out = out * self
        return out

    def __repr__(self):
        return f"Polynomial({poly_str(self)})"


def poly_add(f, g):
    return f + g


def poly_mul(f, g):
    return f * g


def poly_exact_div(f, g):
    """Exact quotient f/g; raises NonDivisible when remainder is nonzero."""
    if g.is_zero():
        raise ZeroDivisionError("division by zero polynomial")
    if f.is_zero():
        return Polynomial(f.nvars)
    ge, gc = g.leading()
    q = {}
    r = f
    while not r.is_zero():
        re, rc = r.leading()
        de = tuple(a - b for a, b in zip(re, ge))
        if any(x < 0 for x in de):
            raise NonDivisible("leading term does not divide")
        coeff = rc / gc
        q[de] = q.get(de, ZERO) + coeff
        t = Polynomial(f.nvars, {de: coeff})
        r = r - t * g
    return Polynomial(f.nvars, q)


def _mono_content(f):
    """Componentwise minimum of exponent tuples (the monomial content)."""
    it = iter(f.terms)
    m = list(next(it))
    for e in it:
        for i, x in enumerate(e):
            if x < m[i]:
                m[i] = x
    return tuple(m)


def _div_mono(f, mono):
    out = Polynomial(f.nvars)
    out.terms = {tuple(a - b for a, b in zip(e, mono)): c
                 for e, c in f.terms.items()}
    return out


def _max_var(f):
    top = -1
    for e in f.terms:
        for i in range(f.nvars - 1, top, -1):
            if e[i]:
                top = i
                break
    return top


def _to_univariate(f, v):
    """View f as a polynomial in variable v with Polynomial coefficients."""
    coeffs = {}
    for e, c in f.terms.items():
        k = e[v]
        e0 = list(e)
        e0[v] = 0
        d = coeffs.setdefault(k, {})
        d[tuple(e0)] = d.get(tuple(e0), ZERO) + c
    return {k: Polynomial(f.nvars, d) for k, d in coeffs.items()}


def _from_univariate(coeffs, v, nvars):
    terms = {}
    for k, p in coeffs.items():
        for e, c in p.terms.items():
            e1 = list(e)
            e1[v] += k
            terms[tuple(e1)] = c
    return Polynomial(nvars, terms)


def _uni_mul_poly(coeffs, p):
    return {k: q * p for k, q in coeffs.items() if not (q * p).is_zero()}


def _uni_prem(f, g, nvars):
    """Pseudo-remainder of univariate views f, g (dicts deg -> Polynomial)."""
    df = max(f) if f else -1
    dg = max(g)
    lg = g[dg]
    r = dict(f)
    while r and max(r) >= dg:
        dr = max(r)
        lr = r[dr]
        # r <- lg*r - lr*x^(dr-dg)*g
        new = {}
        for k, p in r.items():
            new[k] = p * lg
        for k, p in g.items():
            kk = k + dr - dg
            q = new.get(kk, Polynomial(nvars))
            q = q - lr * p
            new[kk] = q
        r = {k: p for k, p in new.items() if not p.is_zero()}
    return r


def poly_gcd(f, g):
    """Monic gcd under graded-lex (primitive subresultant recursion)."""
    if f.is_zero():
        return _monic(g)
    if g.is_zero():
        return _monic(f)
    # strip monomial content first
    mf, mg = _mono_content(f), _mono_content(g)
    common = tuple(min(a, b) for a, b in zip(mf, mg))
    f = _div_mono(f, mf)
    g = _div_mono(g, mg)
    h = _gcd_primitive(f, g)
    if any(common):
        h = h * Polynomial(f.nvars, {common: ONE})
    return _monic(h)


def _gcd_primitive(f, g):
    v = max(_max_var(f), _max_var(g))
    if v < 0:
        return Polynomial.constant(f.nvars, 1)
    fu = _to_univariate(f, v)
    gu = _to_univariate(g, v)
    if max(fu) < max(gu):
        fu, gu = gu, fu
    cf = _uni_content(fu)
    cg = _uni_content(gu)
    fu = {k: poly_exact_div(p, cf) for k, p in fu.items()}
    gu = {k: poly_exact_div(p, cg) for k, p in gu.items()}
    while gu:
        if max(gu) == 0:
            # nonzero constant in v: gcd of primitive parts is content-level
            fu = {}
            gu = {0: Polynomial.constant(f.nvars, 1)}
            break
        r = _uni_prem(fu, gu, f.nvars)
        fu = gu
        if r:
            c = _uni_content(r)
            gu = {k: poly_exact_div(p, c) for k, p in r.items()}
        else:
            gu = {}
    cont = _gcd_primitive(cf, cg) if not (cf.is_constant() and cg.is_constant()) \
        else Polynomial.constant(f.nvars, 1)
    prim = _from_univariate(fu, v, f.nvars) if fu else Polynomial.constant(f.nvars, 1)
    if gu and max(gu) == 0:
        prim = Polynomial.constant(f.nvars, 1)
    return cont * prim


def _uni_content(fu):
    it = iter(sorted(fu))
    c = fu[next(it)]
    for k in it:
        c = poly_gcd(c, fu[k])
        if c.is_constant():
            break
    return _monic(c)


def _monic(f):
    if f.is_zero():
        return f
    _, lc = f.leading()
    if lc == 1:
        return f
    return f.scale(1 / lc)


class RationalFunction:
    """Quotient of polynomials in canonical form (monic denominator,
    coprime numerator)."""

    __slots__ = ("num", "den", "_hash")

    def __init__(self, num, den, _canonical=False):
        if not _canonical:
            num, den = _reduce(num, den)
        self.num = num
        self.den = den
        self._hash = None

    @classmethod
    def from_poly(cls, p):
        return cls(p, Polynomial.constant(p.nvars, 1), _canonical=True)

    @classmethod
    def constant(cls, nvars, c):
        return cls.from_poly(Polynomial.constant(nvars, c))

    @property
    def nvars(self):
        return self.num.nvars

    def is_zero(self):
        return self.num.is_zero()

    def is_polynomial(self):
        return self.den.is_constant()

    def as_polynomial(self):
        if not self.is_polynomial():
            raise ValueError("rational function has a nontrivial denominator")
        c = self.den.constant_value()
        return self.num.scale(1 / c)

    def degree(self):
        """Degree of a homogeneous rational function."""
        if self.num.is_zero():
            return None
        if not (self.num.is_homogeneous() and self.den.is_homogeneous()):
            raise ValueError("not homogeneous")
        return self.num.degree() - self.den.degree()

    def __eq__(self, other):
        return (isinstance(other, RationalFunction)
                and self.num == other.num and self.den == other.den)

    def __hash__(self):
        if self._hash is None:
            self._hash = hash((self.num, self.den))
        return self._hash

    def __add__(self, other):
        if self.den == other.den:
            return RationalFunction(self.num + other.num, self.den)
        return RationalFunction(self.num * other.den + other.num * self.den,
                                self.den * other.den)

    def __sub__(self, other):
        if self.den == other.den:
            return RationalFunction(self.num - other.num, self.den)
        return RationalFunction(self.num * other.den - other.num * self.den,
                                self.den * other.den)

    def __neg__(self):
        out = RationalFunction.__new__(RationalFunction)
        out.num = -self.num
        out.den = self.den
        out._hash = None
        return out

    def __mul__(self, other):
        if isinstance(other, (int, Fraction)):
            c = Fraction(other)
            if not c:
                return RationalFunction.from_poly(Polynomial(self.nvars))
            out = RationalFunction.__new__(RationalFunction)
            out.num = self.num.scale(c)
            out.den = self.den
            out._hash = None
            return out
        if isinstance(other, Polynomial):
            return RationalFunction(self.num * other, self.den)
        return RationalFunction(self.num * other.num, self.den * other.den)

    __rmul__ = __mul__

    def __truediv__(self, other):
        if isinstance(other, Polynomial):
            return RationalFunction(self.num, self.den * other)
        if other.is_zero():
            raise ZeroDivisionError("division by zero rational function")
        return RationalFunction(self.num * other.den, self.den * other.num)

    def __repr__(self):
        return f"RationalFunction({rf_str(self)})"


def _reduce(num, den):
    if den.is_zero():
        raise ZeroDivisionError("zero denominator")
    nv = num.nvars
    if num.is_zero():
        return Polynomial(nv), Polynomial.constant(nv, 1)
    if den.is_constant():
        c = den.constant_value()
        return num.scale(1 / c), Polynomial.constant(nv, 1)
    g = poly_gcd(num, den)
    if not g.is_constant():
        num = poly_exact_div(num, g)
        den = poly_exact_div(den, g)
    _, lc = den.leading()
    if lc != 1:
        num = num.scale(1 / lc)
        den = den.scale(1 / lc)
    return num, den


_ACT_CACHE = {}


def act(w_matrix, f):
    """Apply the dual W-action given by ``w_matrix`` (alpha-basis columns are
    images of the simple roots) to a polynomial.  Ring homomorphism."""
    nv = f.nvars
    out = Polynomial(nv)
    for e, c in f.terms.items():
        out = out + _act_monomial(w_matrix, e, nv).scale(c)
    return out


def _act_monomial(w_matrix, exps, nvars):
    key = (w_matrix, exps)
    hit = _ACT_CACHE.get(key)
    if hit is not None:
        return hit
    out = Polynomial.constant(nvars, 1)
    for j, k in enumerate(exps):
        if not k:
            continue
        img = Polynomial(nvars, {tuple(1 if i == r else 0 for i in range(nvars)):
                                 w_matrix[r][j]
                                 for r in range(nvars) if w_matrix[r][j]})
        for _ in range(k):
            out = out * img
    if len(_ACT_CACHE) < 200000:
        _ACT_CACHE[key] = out
    return out


def act_rf(w_matrix, q):
    """W-action extended to rational functions."""
    return RationalFunction(act(w_matrix, q.num), act(w_matrix, q.den))


def demazure(s_matrix, s_index, f):
    """Demazure operator: f -> (f - s(f)) / alpha_s.  Always exact."""
    nv = f.nvars
    diff = f - act(s_matrix, f)
    alpha = Polynomial.generator(nv, s_index)
    try:
        return poly_exact_div(diff, alpha)
    except NonDivisible as exc:  # signals a broken realization
        raise ArithmeticError("Demazure division failed; realization is "
                              "inconsistent") from exc


def poly_str(p, names=None):
    """Canonical human-readable form, graded-lex from the leading term."""
    if p.is_zero():
        return "0"
    if names is None:
        names = [f"a{i}" for i in range(p.nvars)]
    parts = []
    for e in sorted(p.terms, key=_grlex_key, reverse=True):
        c = p.terms[e]
        factors = []
        for i, k in enumerate(e):
            if k == 1:
                factors.append(names[i])
            elif k > 1:
                factors.append(f"{names[i]}^{k}")
        mono = "*".join(factors)
        if not mono:
            body = str(abs(c))
        elif abs(c) == 1:
            body = mono
        else:
            body = f"{abs(c)}*{mono}"
        sign = "-" if c < 0 else "+"
        parts.append((sign, body))
    sign0, body0 = parts[0]
    out = ("-" if sign0 == "-" else "") + body0
    for sign, body in parts[1:]:
        out += f" {sign} {body}"
    return out


def rf_str(q, names=None):
    if q.is_polynomial():
        return poly_str(q.as_polynomial(), names)
    return f"({poly_str(q.num, names)})/({poly_str(q.den, names)})"
