import random
from fractions import Fraction

import pytest

from soergeldg import soergel
from soergeldg.ring import Polynomial, RationalFunction
from soergeldg.coxeter import demazure, act_element
from soergeldg.soergel import (identity, compose, tensor, gen_counit_dot,
                               gen_unit_dot, gen_merge, gen_split,
                               gen_2m_valent, jones_wenzl, polynomial_box,
                               region_multiply, validate_relations,
                               denominator_divides_roots, zero,
                               WordMismatch, UnsupportedM,
                               dihedral_positive_roots)


def alpha(R, s):
    return Polynomial.generator(R.rank, s)


def test_identity_shapes(A2):
    e = identity(A2, ())
    assert len(e.entries) == 1
    ids = identity(A2, (0,))
    one = RationalFunction.constant(2, 1)
    assert ids.entries == {((0,), (0,)): one, ((1,), (1,)): one}


def test_identity_neutral(A2):
    m = compose(gen_merge(A2, 0), tensor(identity(A2, (0,)), identity(A2, (0,))))
    assert compose(identity(A2, (0,)), m) == m
    assert compose(m, identity(A2, (0, 0))) == m


def test_barbell(A2):
    for s in (0, 1):
        bar = compose(gen_counit_dot(A2, s), gen_unit_dot(A2, s))
        assert bar == polynomial_box(A2, (), 0, alpha(A2, s))


def test_one_color_matrices_match_bimodule_oracle(A2):
    # oracle: merge(f x g x h) = f d_s(g) x h and split(f x g) = f x 1 x g
    # expanded by hand into the standard-summand coordinates
    s = 0
    nv = A2.rank
    a = alpha(A2, s)
    ia = RationalFunction(Polynomial.constant(nv, 1), a)
    one = RationalFunction.constant(nv, 1)
    assert gen_merge(A2, s).entries == {
        ((0,), (0, 0)): ia, ((0,), (1, 1)): -ia,
        ((1,), (0, 1)): ia, ((1,), (1, 0)): -ia}
    assert gen_split(A2, s).entries == {
        ((0, 0), (0,)): one, ((0, 1), (1,)): one,
        ((1, 0), (1,)): one, ((1, 1), (0,)): one}


def test_merge_split_digon_needle(A2):
    s = 0
    ms = compose(gen_merge(A2, s), gen_split(A2, s))
    assert ms.is_zero()
    needle = compose(gen_counit_dot(A2, s), ms)
    assert needle.is_zero()


def test_compose_word_mismatch(A2):
    with pytest.raises(WordMismatch):
        compose(gen_merge(A2, 0), identity(A2, (0,)))


def test_tensor_with_unit_word(A2):
    m = gen_merge(A2, 0)
    e = identity(A2, ())
    assert tensor(m, e) == m
    assert tensor(e, m) == m
    assert tensor(identity(A2, (0,)), identity(A2, (1,))) == identity(A2, (0, 1))


def _random_composite(R, rng, depth=3):
    """Random generator composite via a random layered diagram."""
    gens = []
    for s in range(R.rank):
        gens += [gen_counit_dot(R, s), gen_unit_dot(R, s),
                 gen_merge(R, s), gen_split(R, s)]
    word = tuple(rng.randrange(R.rank) for _ in range(rng.randrange(1, 4)))
    mor = identity(R, word)
    for _ in range(depth):
        w = mor.tgt
        options = []
        for g in gens:
            k = len(g.src)
            for i in range(len(w) - k + 1):
                if w[i:i + k] == g.src:
                    options.append((g, i))
        if not options:
            break
        g, i = rng.choice(options)
        layer = tensor(tensor(identity(R, w[:i]), g),
                       identity(R, w[i + len(g.src):]))
        mor = compose(layer, mor)
    return mor


def test_bifunctoriality_random(A2):
    rng = random.Random(31)
    for _ in range(8):
        h2 = _random_composite(A2, rng)
        k2 = _random_composite(A2, rng)
        h1 = identity(A2, h2.tgt)
        k1 = identity(A2, k2.tgt)
        lhs = tensor(compose(h1, h2), compose(k1, k2))
        rhs = compose(tensor(h1, k1), tensor(h2, k2))
        assert lhs == rhs


def test_degree_bookkeeping_random(A2):
    rng = random.Random(37)
    for _ in range(10):
        f = _random_composite(A2, rng)
        g = _random_composite(A2, rng)
        assert tensor(f, g).degree == f.degree + g.degree
        f.validate()


def test_sliding_relation(A2):
    s = 0
    ids = identity(A2, (s,))
    for f in (alpha(A2, s), alpha(A2, 1), alpha(A2, 0) * alpha(A2, 1)):
        sf = act_element(A2.element_of((s,)), f)
        df = demazure(A2, s, f)
        lhs = region_multiply(ids, 0, f)
        rhs = region_multiply(ids, 1, sf) + compose(
            gen_unit_dot(A2, s), gen_counit_dot(A2, s)).scale(df)
        assert lhs == rhs


def test_region_multiply_barbell_between_strands(A2):
    s = 0
    idss = identity(A2, (s, s))
    # a barbell drawn between the two strands equals the region action there
    mid = tensor(identity(A2, (s,)),
                 tensor(compose(gen_unit_dot(A2, s), gen_counit_dot(A2, s)),
                        identity(A2, (s,))))
    assert mid == region_multiply(idss, 1, alpha(A2, s))
    assert region_multiply(idss, 1, Polynomial.constant(2, 1)) == idss


def test_flip_generators(A2):
    s = 0
    assert gen_unit_dot(A2, s).flip() == gen_counit_dot(A2, s)
    assert gen_counit_dot(A2, s).flip() == gen_unit_dot(A2, s)
    assert gen_merge(A2, s).flip() == gen_split(A2, s)
    assert gen_2m_valent(A2, 0, 1).flip() == gen_2m_valent(A2, 1, 0)


def test_flip_involution_and_contravariance(A2):
    rng = random.Random(41)
    for _ in range(8):
        f = _random_composite(A2, rng)
        assert f.flip().flip() == f
    f = gen_split(A2, 0)
    g = gen_merge(A2, 0)
    assert compose(g, f).flip() == compose(f.flip(), g.flip())


def test_flip_needs_tree(A2):
    raw = soergel.LocalizedMorphism(A2, (0,), (0,), 0,
                                    identity(A2, (0,)).entries, tree=None)
    with pytest.raises(ValueError):
        raw.flip()


def test_two_color_m2(A1xA1):
    X = gen_2m_valent(A1xA1, 0, 1)
    # invertible and flip-symmetric
    from soergeldg.linalg import rf_matrix_inverse
    from itertools import product
    keys = list(product((0, 1), repeat=2))
    inv = rf_matrix_inverse(dict(X.entries), keys)
    assert inv is not None
    assert X.flip() == gen_2m_valent(A1xA1, 1, 0)


def test_two_color_m3_matrix(A2):
    X = gen_2m_valent(A2, 0, 1)
    X.validate()
    one = RationalFunction.constant(2, 1)
    assert X.entry((1, 1, 1), (1, 1, 1)) == one
    # bottom generator goes to bottom generator: all row sums are 1
    from itertools import product
    for f in product((0, 1), repeat=3):
        tot = RationalFunction.constant(2, 0)
        for (ff, e), v in X.entries.items():
            if ff == f:
                tot = tot + v
        assert tot == one


def test_unsupported_m(A2):
    with pytest.raises(ValueError):
        gen_2m_valent(A2, 0, 0)
    from soergeldg.coxeter import load_realization
    G2 = load_realization("G2")
    with pytest.raises(UnsupportedM):
        gen_2m_valent(G2, 0, 1)
    with pytest.raises(UnsupportedM):
        jones_wenzl(G2, 0, 1)


def test_dihedral_roots(A2, B2):
    assert len(dihedral_positive_roots(A2, 0, 1)) == 3
    assert len(dihedral_positive_roots(B2, 0, 1)) == 4


@pytest.mark.parametrize("preset", ["A1xA1", "A2", "A1xA2", "A3"])
def test_validate_relations(preset):
    from soergeldg.coxeter import load_realization
    R = load_realization(preset)
    report = validate_relations(R)
    assert report
    bad = [r for r in report if not r["ok"]]
    assert not bad, bad


def test_validate_relations_b2_with_m4(B2):
    report = validate_relations(B2, include_m4=True)
    bad = [r for r in report if not r["ok"]]
    assert not bad, bad


def test_denominator_discipline(A2):
    rng = random.Random(43)
    X = gen_2m_valent(A2, 0, 1)
    assert denominator_divides_roots(A2, X)
    for _ in range(10):
        f = _random_composite(A2, rng, depth=6)
        assert denominator_divides_roots(A2, f)


def test_mirror_involution(A2):
    rng = random.Random(47)
    for _ in range(6):
        f = _random_composite(A2, rng)
        assert f.mirror().mirror() == f
    X = gen_2m_valent(A2, 0, 1)
    assert X.mirror() == X  # m odd: the ar is mirror symmetric
