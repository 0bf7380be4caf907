"""Light leaves compiled to localized matrices, double leaves, and exact
basis expression.

A light leaf for (word, 01-sequence) is assembled inductively by the four
U0/U1/D0/D1 cases, with braid-move boxes realized as composites of 2m-valent
vertices.  Double leaves flip(L2) . L1 form a left R-basis of each Hom space;
express_in_basis solves for the polynomial coefficients exactly,
degree by degree over the rationals.
"""
from __future__ import annotations

from fractions import Fraction
from itertools import product

from .ring import Polynomial
from .linalg import LinearSystem
from . import soergel
from .soergel import (LocalizedMorphism, identity, compose, tensor,
                      gen_counit_dot, gen_merge, gen_2m_valent)


class PlanInvalid(ValueError):
    pass


class ElementMismatch(ValueError):
    pass


class NotInSpan(ValueError):
    """Expression failed: the morphism is not in the span of the basis
    within its degree (signals a model bug)."""


class LightLeafPlan:
    """Per-step choices: the reduced word for each stroll element and the
    braid-move paths used by the four construction cases."""

    __slots__ = ("word", "bits", "steps")

    def __init__(self, word, bits, steps):
        self.word = word
        self.bits = bits
        self.steps = steps  # list of dicts with keys case, target, phi, psi

    def fingerprint(self):
        return repr((self.word, self.bits, self.steps))


def default_plan(realization, word, bits):
    """Deterministic plan: shortlex-minimal reduced words, BFS-shortest braid
    moves with fixed exploration order."""
    R = realization
    word, bits = tuple(word), tuple(bits)
    dec = R.decorate(word, bits)
    steps = []
    cur = ()  # reduced word for the current stroll element
    for i, (s, b) in enumerate(zip(word, bits)):
        case = dec.decorations[i]
        x_next = dec.stroll[i + 1]
        target = R._word[x_next]  # shortlex-minimal reduced word
        if case == "U0":
            phi = R.matsumoto_path(cur, target)
            steps.append({"case": case, "target": target, "phi": phi,
                          "psi": None})
            cur = target
        elif case == "U1":
            phi = R.matsumoto_path(cur + (s,), target)
            steps.append({"case": case, "target": target, "phi": phi,
                          "psi": None})
            cur = target
        elif case == "D0":
            psi = R.exchange_witness(cur, s)
            zs = cur
            for mv in psi:
                zs = R.apply_braid_move(zs, mv)
            phi = R.matsumoto_path(zs, target)
            steps.append({"case": case, "target": target, "phi": phi,
                          "psi": psi})
            cur = target
        else:  # D1
            psi = R.exchange_witness(cur, s)
            zs = cur
            for mv in psi:
                zs = R.apply_braid_move(zs, mv)
            phi = R.matsumoto_path(zs[:-1], target)
            steps.append({"case": case, "target": target, "phi": phi,
                          "psi": psi})
            cur = target
    return LightLeafPlan(word, bits, steps)


def _braid_move_morphism(R, word, move):
    i, a, b = move
    m = R.coxeter_matrix[a][b]
    mid = gen_2m_valent(R, a, b)
    return tensor(tensor(identity(R, word[:i]), mid),
                  identity(R, word[i + m:]))


def _apply_path(R, mor, path):
    word = mor.tgt
    for mv in path:
        step = _braid_move_morphism(R, word, mv)
        mor = compose(step, mor)
        word = mor.tgt
    return mor


def build_light_leaf(realization, word, bits, plan=None):
    """The light leaf morphism B_word -> B_{plan target}; its degree equals
    the defect of the decorated subexpression."""
    R = realization
    word, bits = tuple(word), tuple(bits)
    if len(word) != len(bits):
        raise PlanInvalid("bit string length mismatch")
    use_default = plan is None
    if use_default:
        hit = R._leaf_cache.get((word, bits))
        if hit is not None:
            return hit
        plan = default_plan(R, word, bits)
    elif (plan.word, plan.bits) != (word, bits):
        raise PlanInvalid("plan does not belong to this subexpression")
    dec = R.decorate(word, bits)
    mor = identity(R, ())
    for i, (s, b) in enumerate(zip(word, bits)):
        case = dec.decorations[i]
        step = plan.steps[i]
        if case != step["case"]:
            raise PlanInvalid(f"plan case mismatch at step {i}")
        if case == "U0":
            mor = tensor(mor, gen_counit_dot(R, s))
            mor = _apply_path(R, mor, step["phi"])
        elif case == "U1":
            mor = tensor(mor, identity(R, (s,)))
            mor = _apply_path(R, mor, step["phi"])
        elif case == "D0":
            mor = _apply_path(R, mor, step["psi"])
            zs = mor.tgt
            if not zs or zs[-1] != s:
                raise PlanInvalid("psi path does not end in the required letter")
            mor = tensor(mor, identity(R, (s,)))
            cap = tensor(identity(R, zs[:-1]), gen_merge(R, s))
            mor = compose(cap, mor)
            mor = _apply_path(R, mor, step["phi"])
        else:  # D1
            mor = _apply_path(R, mor, step["psi"])
            zs = mor.tgt
            if not zs or zs[-1] != s:
                raise PlanInvalid("psi path does not end in the required letter")
            mor = tensor(mor, identity(R, (s,)))
            cap = tensor(identity(R, zs[:-1]),
                         compose(gen_counit_dot(R, s), gen_merge(R, s)))
            mor = compose(cap, mor)
            mor = _apply_path(R, mor, step["phi"])
        if mor.tgt != step["target"]:
            raise PlanInvalid(
                f"step {i} ended at {mor.tgt}, expected {step['target']}")
    if use_default:
        R._leaf_cache[(word, bits)] = mor
    return mor


def double_leaf(realization, w1, e1, w2, e2, plans=None):
    """flip(L_{w2,e2}) . L_{w1,e1}; degree is the sum of the defects."""
    R = realization
    x1 = R.subexpr_element(tuple(w1), tuple(e1))
    x2 = R.subexpr_element(tuple(w2), tuple(e2))
    if x1 != x2:
        raise ElementMismatch(
            "subexpressions express different elements")
    p1, p2 = (plans or (None, None))
    l1 = build_light_leaf(R, w1, e1, p1)
    l2 = build_light_leaf(R, w2, e2, p2)
    return compose(l2.flip(), l1)


def double_leaves_basis(realization, w1, w2):
    """One double leaf per pair (e1, e2) expressing equal elements, built
    from default plans.  Returns a list of ((e1, e2), morphism)."""
    R = realization
    w1, w2 = tuple(w1), tuple(w2)
    key = (w1, w2)
    hit = R._basis_cache.get(key)
    if hit is not None:
        return hit
    by_elem = {}
    for e1 in product((0, 1), repeat=len(w1)):
        by_elem.setdefault(R.subexpr_element(w1, e1).index, []).append(e1)
    out = []
    for e2 in product((0, 1), repeat=len(w2)):
        for e1 in by_elem.get(R.subexpr_element(w2, e2).index, ()):
            out.append(((e1, e2), double_leaf(R, w1, e1, w2, e2)))
    out.sort(key=lambda kv: kv[0])
    R._basis_cache[key] = out
    return out


def express_in_basis(f, basis):
    """Left R-module coordinates of f over the double-leaves basis: a dict
    label -> Polynomial with exact residual check."""
    R = f.realization
    nv = R.rank
    system = LinearSystem()
    cols = {}  # (label, monomial) -> {entrykey: poly}
    usable = []
    for label, mor in basis:
        delta = f.degree - mor.degree
        if delta < 0 or delta % 2:
            continue
        usable.append((label, mor, delta))
    keys = set(f.entries)
    for _, mor, _ in usable:
        keys |= set(mor.entries)
    for key in keys:
        dens = []
        seen = set()
        for _, mor, _ in usable:
            v = mor.entries.get(key)
            if v is not None and v.den not in seen:
                seen.add(v.den)
                dens.append(v.den)
        fv = f.entries.get(key)
        if fv is not None and fv.den not in seen:
            seen.add(fv.den)
            dens.append(fv.den)
        D = Polynomial.constant(nv, 1)
        for d in dens:
            D = D * d
        rhs_poly = (fv * D).as_polynomial() if fv is not None \
            else Polynomial(nv)
        col_polys = []
        for idx, (label, mor, delta) in enumerate(usable):
            v = mor.entries.get(key)
            if v is None:
                continue
            col_polys.append((idx, delta, (v * D).as_polynomial()))
        monos = set(rhs_poly.terms)
        for idx, delta, p in col_polys:
            half = delta // 2
            for mexp in _monomials(nv, half):
                for e in p.terms:
                    monos.add(tuple(a + b for a, b in zip(e, mexp)))
        for mu in monos:
            coeffs = {}
            for idx, delta, p in col_polys:
                half = delta // 2
                for mexp in _monomials(nv, half):
                    shifted = tuple(a - b for a, b in zip(mu, mexp))
                    if any(x < 0 for x in shifted):
                        continue
                    c = p.terms.get(shifted)
                    if c:
                        coeffs[(idx, mexp)] = coeffs.get((idx, mexp),
                                                         Fraction(0)) + c
            system.add_equation(coeffs, rhs_poly.terms.get(mu, Fraction(0)))
    for idx, (label, mor, delta) in enumerate(usable):
        for mexp in _monomials(nv, delta // 2):
            system.add_var((idx, mexp))
    res = system.solve()
    if res is None:
        raise NotInSpan("no exact expression over the double-leaves basis")
    particular, null = res
    out = {}
    for (idx, mexp), c in particular.items():
        if not c:
            continue
        label = usable[idx][0]
        p = out.get(label, Polynomial(nv))
        out[label] = p + Polynomial(nv, {mexp: c})
    # exact residual check (guards against an underdetermined solve)
    acc = None
    for label, c in out.items():
        mor = dict(basis)[label]
        term = mor.scale(c)
        acc = term if acc is None else acc + term
    if acc is None:
        acc = soergel.zero(R, f.src, f.tgt, f.degree)
    if acc.entries != f.entries:
        raise NotInSpan("residual nonzero after expression")
    return out


_MONO_CACHE = {}


def _monomials(nvars, total):
    """Exponent tuples with the given coordinate sum."""
    key = (nvars, total)
    hit = _MONO_CACHE.get(key)
    if hit is not None:
        return hit
    out = []

    def rec(prefix, remaining, slots):
        if slots == 1:
            out.append(prefix + (remaining,))
            return
        for k in range(remaining + 1):
            rec(prefix + (k,), remaining - k, slots - 1)

    rec((), total, nvars)
    _MONO_CACHE[key] = out
    return out


def leaves_independent(realization, w1, w2, seed_point=None):
    """Exact certificate of left-R independence: specialize the variables at
    a generic rational point and check full rank over Q (a specialization can
    only lower the rank)."""
    basis = double_leaves_basis(realization, w1, w2)
    if not basis:
        return True
    nv = realization.rank
    if seed_point is None:
        seed_point = [Fraction(p) for p in (97, 89, 83)][:nv]
        while len(seed_point) < nv:
            seed_point.append(Fraction(79 - 2 * len(seed_point)))
    keys = sorted({k for _, mor in basis for k in mor.entries})
    key_index = {k: i for i, k in enumerate(keys)}
    rows = []
    for _, mor in basis:
        row = {}
        for k, v in mor.entries.items():
            num = _eval_poly(v.num, seed_point)
            den = _eval_poly(v.den, seed_point)
            if den == 0:
                raise ArithmeticError("specialization hit a denominator zero")
            if num:
                row[key_index[k]] = num / den
        rows.append(row)
    from .linalg import fraction_matrix_rank
    return fraction_matrix_rank(rows) == len(basis)


def _eval_poly(p, point):
    total = Fraction(0)
    for e, c in p.terms.items():
        v = c
        for x, k in zip(point, e):
            for _ in range(k):
                v *= x
        total += v
    return total
