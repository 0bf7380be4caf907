from collections import Counter
from itertools import product

import pytest

from soergeldg import soergel, leaves, hecke
from soergeldg.ring import Polynomial, RationalFunction
from soergeldg.coxeter import parse_word
from soergeldg.leaves import (default_plan, build_light_leaf, double_leaf,
                              double_leaves_basis, express_in_basis,
                              leaves_independent, ElementMismatch, PlanInvalid,
                              NotInSpan)


def test_single_letter_leaves(A2):
    s = 0
    assert build_light_leaf(A2, (s,), (1,)) == soergel.identity(A2, (s,))
    assert build_light_leaf(A2, (s,), (0,)) == soergel.gen_counit_dot(A2, s)


def test_plan_determinism(A2):
    w, e = (0, 1, 0), (1, 0, 1)
    p1 = default_plan(A2, w, e)
    p2 = default_plan(A2, w, e)
    assert p1.fingerprint() == p2.fingerprint()
    assert p1.steps == p2.steps


def test_ss_10_plan_is_d0_with_empty_psi(A2):
    s = 0
    plan = default_plan(A2, (s, s), (1, 0))
    assert plan.steps[1]["case"] == "D0"
    assert plan.steps[1]["psi"] == []


def test_reduced_all_ones_plans_trivial(A2):
    # for the shortlex-minimal reduced word the full subexpression needs no moves
    w = (0, 1, 0)
    plan = default_plan(A2, w, (1, 1, 1))
    assert all(st["phi"] == [] for st in plan.steps)


def test_degree_law(A2, B2):
    for R in (A2, B2):
        for n in range(0, 5):
            for w in product(range(R.rank), repeat=n):
                for e in product((0, 1), repeat=n):
                    L = build_light_leaf(R, w, e)
                    dec = R.decorate(w, e)
                    assert L.degree == dec.defect
                    assert L.tgt == R._word[dec.stroll[-1]]


def test_paper_worked_example(A1xA2):
    R = A1xA2
    w = parse_word(R, "stsuts")
    L = build_light_leaf(R, w, (1, 1, 1, 0, 0, 1))
    assert L.degree == 0
    assert L.tgt == parse_word(R, "st")
    # the leaf is a combination of the double-leaves basis of its Hom space
    basis = double_leaves_basis(R, w, L.tgt)
    coeffs = express_in_basis(L, basis)
    assert coeffs  # expressible, nonzero


def test_double_leaf_examples(A2):
    s = 0
    assert double_leaf(A2, (s,), (1,), (s,), (1,)) == soergel.identity(A2, (s,))
    dd = double_leaf(A2, (s,), (0,), (s,), (0,))
    assert dd == soergel.compose(soergel.gen_unit_dot(A2, s),
                                 soergel.gen_counit_dot(A2, s))
    assert dd.degree == 2
    with pytest.raises(ElementMismatch):
        double_leaf(A2, (s,), (1,), (s,), (0,))


def test_top_double_leaf_leading_block(A2):
    s, t = 0, 1
    dl = double_leaf(A2, (s, t, s), (1, 1, 1), (t, s, t), (1, 1, 1))
    assert dl.entry((1, 1, 1), (1, 1, 1)) == RationalFunction.constant(2, 1)
    assert dl.degree == 0


def test_basis_counts_match_pairing(A2):
    s, t = 0, 1
    pairs = [((s,), (s,)), ((s,), (t,)), ((s, s), (s,)), ((s, t), (t, s)),
             ((s, t, s), (t, s, t)), ((s, t, s), (s, t, s))]
    for w1, w2 in pairs:
        basis = double_leaves_basis(A2, w1, w2)
        degs = Counter(m.degree for _, m in basis)
        assert dict(degs) == dict(hecke.graded_rank_pairing(A2, w1, w2).coeffs)


def test_sts_tst_count(A2):
    # enumeration oracle: sum over elements of (#subexpressions)^2-style
    # pairing; eleven matching pairs (1 -> 2x2, s -> 2x1, t -> 1x2,
    # st -> 1, ts -> 1, sts -> 1)
    s, t = 0, 1
    basis = double_leaves_basis(A2, (s, t, s), (t, s, t))
    assert len(basis) == 11
    pairing = hecke.graded_rank_pairing(A2, (s, t, s), (t, s, t))
    assert sum(pairing.coeffs.values()) == 11


def test_single_color_pair_basis(A2):
    s, t = 0, 1
    basis = double_leaves_basis(A2, (s,), (s,))
    assert len(basis) == 2
    assert sorted(m.degree for _, m in basis) == [0, 2]
    basis_st = double_leaves_basis(A2, (s,), (t,))
    assert len(basis_st) == 1 and basis_st[0][1].degree == 2


def test_independence(A2):
    s, t = 0, 1
    for w1, w2 in [((s,), (s,)), ((s, t), (t, s)), ((s, t, s), (t, s, t)),
                   ((s, s), (s, s)), ((s, t, s), (s, t, s))]:
        assert leaves_independent(A2, w1, w2)


def test_express_identity(A2):
    s = 0
    basis = double_leaves_basis(A2, (s,), (s,))
    coeffs = express_in_basis(soergel.identity(A2, (s,)), basis)
    assert coeffs == {((1,), (1,)): Polynomial.constant(2, 1)}


def test_express_roundtrip_random_combination(A2):
    import random
    rng = random.Random(3)
    s, t = 0, 1
    basis = double_leaves_basis(A2, (s, t), (t, s))
    # random left-R combination, homogeneous of fixed total degree
    target_deg = 4
    f = None
    for label, mor in basis:
        delta = target_deg - mor.degree
        if delta < 0 or delta % 2:
            continue
        coeff = Polynomial(2)
        for e in leaves._monomials(2, delta // 2):
            coeff = coeff + Polynomial(2, {e: rng.randrange(-3, 4)})
        term = mor.scale(coeff)
        f = term if f is None else f + term
    coeffs = express_in_basis(f, basis)
    acc = None
    for label, c in coeffs.items():
        term = dict(basis)[label].scale(c)
        acc = term if acc is None else acc + term
    assert acc.entries == f.entries


def test_express_barbell(A2):
    s = 0
    basis = double_leaves_basis(A2, (s,), (s,))
    barb = soergel.region_multiply(soergel.identity(A2, (s,)), 0,
                                   Polynomial.generator(2, s))
    coeffs = express_in_basis(barb, basis)
    acc = None
    for label, c in coeffs.items():
        term = dict(basis)[label].scale(c)
        acc = term if acc is None else acc + term
    assert acc.entries == barb.entries


def test_express_merge_split_is_zero(A2):
    s = 0
    ms = soergel.compose(soergel.gen_merge(A2, s), soergel.gen_split(A2, s))
    coeffs = express_in_basis(ms, double_leaves_basis(A2, (s,), (s,)))
    assert not coeffs


def test_plan_invalid(A2):
    s, t = 0, 1
    plan = default_plan(A2, (s,), (1,))
    with pytest.raises(PlanInvalid):
        build_light_leaf(A2, (t,), (1,), plan)
