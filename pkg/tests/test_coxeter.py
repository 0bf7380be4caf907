import json

import pytest

from soergeldg import coxeter
from soergeldg.coxeter import (load_realization, RealizationError,
                               coxeter_group_order, parse_word, parse_braid,
                               positive_lift, negative_lift,
                               coxeter_projection, writhe,
                               NotInDescent, NotReduced, NotSameElement,
                               LengthMismatch)


def bfs_lengths(R):
    """Independent BFS oracle over the Cayley graph."""
    dist = {R.identity().index: 0}
    frontier = [0]
    while frontier:
        new = []
        for i in frontier:
            for s in range(R.rank):
                j = R._right[i][s]
                if j not in dist:
                    dist[j] = dist[i] + 1
                    new.append(j)
        frontier = new
    return dist


@pytest.mark.parametrize("preset,order,longest", [
    ("A1xA1", 4, 2), ("A2", 6, 3), ("B2", 8, 4), ("G2", 12, 6),
    ("A3", 24, 6), ("A1xA2", 12, 4),
])
def test_orders_and_longest(preset, order, longest):
    R = load_realization(preset)
    assert R.order == order
    dist = bfs_lengths(R)
    assert max(dist.values()) == longest
    assert R.longest_element().length == longest
    for i, d in dist.items():
        assert R._length[i] == d


def test_element_of_words(A2):
    s, t = 0, 1
    assert A2.element_of(()) == A2.identity()
    assert A2.element_of((s, s)) == A2.identity()
    assert A2.element_of((s, t, s)) == A2.element_of((t, s, t))
    assert not A2.is_reduced((s, s))
    assert A2.is_reduced((s, t, s))


def test_reduced_words_lengths(A2):
    for x in A2.elements():
        for w in A2.reduced_words(x):
            assert len(w) == x.length
            assert A2.element_of(w) == x
        assert A2.canonical_word(x) == A2.reduced_words(x)[0]


def test_bruhat(A2, B2):
    for R in (A2, B2):
        w0 = R.longest_element()
        for x in R.elements():
            assert R.bruhat_leq(R.identity(), x)
            assert R.bruhat_leq(x, w0)
        # the two implementations agree on every pair
        for x in R.elements():
            for y in R.elements():
                assert R.bruhat_leq(x, y) == R.bruhat_leq_subword(x, y)
    assert sum(1 for x in A2.elements()
               if A2.bruhat_leq(x, A2.longest_element())) == 6
    s, t = 0, 1
    assert A2.bruhat_leq(A2.element_of((s,)), A2.element_of((s, t, s)))


def test_decorate_paper_example(A1xA2):
    R = A1xA2
    w = parse_word(R, "stsuts")
    dec = R.decorate(w, (1, 1, 1, 0, 0, 1))
    assert dec.decorations == ("U1", "U1", "U1", "U0", "D0", "D1")
    assert dec.defect == 0


def test_decorate_trivial_cases(A2):
    s, t = 0, 1
    dec = A2.decorate((s, t, s), (1, 1, 1))
    assert dec.decorations == ("U1", "U1", "U1")
    assert dec.defect == 0
    dec0 = A2.decorate((s, t, s, t), (0, 0, 0, 0))
    assert all(d == "U0" for d in dec0.decorations)
    with pytest.raises(LengthMismatch):
        A2.decorate((s, t), (1,))


def test_full_subexpression_of_reduced_has_defect_zero(A2, B2):
    from itertools import product
    for R in (A2, B2):
        for n in range(5):
            for w in product(range(R.rank), repeat=n):
                if R.is_reduced(w):
                    assert R.decorate(w, (1,) * n).defect == 0


def test_matsumoto(A2, B2):
    s, t = 0, 1
    assert A2.matsumoto_path((s, t, s), (s, t, s)) == []
    p = A2.matsumoto_path((s, t, s), (t, s, t))
    assert len(p) == 1
    p2 = B2.matsumoto_path((0, 1, 0, 1), (1, 0, 1, 0))
    assert len(p2) == 1
    with pytest.raises(NotSameElement):
        A2.matsumoto_path((s,), (t,))
    with pytest.raises(NotReduced):
        A2.matsumoto_path((s, s), (s, s))


def test_matsumoto_replay_all_pairs(A2, B2):
    for R in (A2, B2):
        for x in R.elements():
            words = R.reduced_words(x)
            for w1 in words:
                for w2 in words:
                    path = R.matsumoto_path(w1, w2)
                    cur = w1
                    for mv in path:
                        cur = R.apply_braid_move(cur, mv)
                    assert cur == w2


def test_exchange_witness(A2, B2):
    s, t = 0, 1
    assert A2.exchange_witness((s,), s) == []
    assert A2.exchange_witness((s, t, s), s) == []
    path = A2.exchange_witness((s, t, s), t)
    assert len(path) == 1
    cur = (s, t, s)
    for mv in path:
        cur = A2.apply_braid_move(cur, mv)
    assert cur[-1] == t
    assert len(B2.exchange_witness((0, 1, 0, 1), 1)) == 1
    with pytest.raises(NotInDescent):
        A2.exchange_witness((s,), t)


def test_braid_words(A2):
    s, t = 0, 1
    w = (s, t)
    assert coxeter_projection(positive_lift(w)) == w
    assert coxeter_projection(negative_lift(w)) == w
    assert writhe(parse_braid(A2, "s s t-")) == 1
    assert writhe(()) == 0
    assert writhe(positive_lift(w)) == 2
    assert writhe(negative_lift(w)) == -2


def test_parsing(A2):
    assert parse_word(A2, "sts") == (0, 1, 0)
    assert parse_word(A2, "s t s") == (0, 1, 0)
    assert parse_word(A2, "") == ()
    assert parse_braid(A2, "s s t-") == ((0, 1), (0, 1), (1, -1))
    with pytest.raises(coxeter.UnknownGenerator):
        parse_word(A2, "x")


def test_group_order_classification():
    assert coxeter_group_order([[1, 3], [3, 1]]) == 6
    assert coxeter_group_order([[1, 4], [4, 1]]) == 8
    assert coxeter_group_order([[1, 5], [5, 1]]) == 10
    assert coxeter_group_order([[1, 3, 2], [3, 1, 3], [2, 3, 1]]) == 24
    assert coxeter_group_order([[1, 3, 2], [3, 1, 4], [2, 4, 1]]) == 48
    # H3
    assert coxeter_group_order([[1, 5, 2], [5, 1, 3], [2, 3, 1]]) == 120


def test_loader_rejects_bad_data():
    with pytest.raises(RealizationError):
        load_realization({"generators": ["s", "t"],
                          "coxeter_matrix": [[1, 3], [3, 1]],
                          "cartan": [[3, -1], [-1, 2]]})  # diagonal != 2
    with pytest.raises(RealizationError):
        load_realization({"generators": ["s", "t"],
                          "coxeter_matrix": [[1, 3], [4, 1]],
                          "cartan": [[2, -1], [-1, 2]]})  # not symmetric
    with pytest.raises(RealizationError):
        # wrong Cartan for m=3: the product st has the wrong order
        load_realization({"generators": ["s", "t"],
                          "coxeter_matrix": [[1, 3], [3, 1]],
                          "cartan": [[2, 0], [0, 2]]})
    with pytest.raises(RealizationError):
        # infinite group
        load_realization({"generators": ["s", "t"],
                          "coxeter_matrix": [[1, 3], [3, 1]],
                          "cartan": [[2, -2], [-2, 2]]})


def test_loader_accepts_file(tmp_path, A2):
    cfg = {"generators": ["s", "t"],
           "coxeter_matrix": [[1, 3], [3, 1]],
           "cartan": [[2, -1], [-1, 2]]}
    path = tmp_path / "sys.json"
    path.write_text(json.dumps(cfg))
    R = load_realization(str(path))
    assert R.order == 6


def test_element_inverse_and_reflections(A2):
    for x in A2.elements():
        assert x * x.inverse() == A2.identity()
    refl = A2.reflections()
    assert len(refl) == 3
    for tt in refl:
        assert tt * tt == A2.identity()
