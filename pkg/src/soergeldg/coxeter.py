"""Coxeter systems and realizations at desk scale.

A realization is loaded from a Coxeter matrix plus Cartan pairings
<alpha_t, alpha_s^vee> over exact rationals.  All group elements are
enumerated at load (the whole artifact requires |W| finite and small), so
elements are represented by indices into a table of exact action matrices
on h* in the alpha-basis.  Faithfulness is checked by comparing the orbit
count against the group order derived from the Coxeter graph alone.
"""
from __future__ import annotations

import json
from fractions import Fraction

from . import ring
from .ring import Polynomial, act, demazure as _demazure

MAX_GROUP_ORDER = 10 ** 4


class RealizationError(ValueError):
    """Invalid Coxeter/Cartan data."""


class UnknownGenerator(KeyError):
    pass


class LengthMismatch(ValueError):
    pass


class NotReduced(ValueError):
    pass


class NotSameElement(ValueError):
    pass


class NotInDescent(ValueError):
    pass


def _factorial(n):
    out = 1
    for k in range(2, n + 1):
        out *= k
    return out


def _component_order(size, edges):
    """Order of the finite Coxeter group of one connected Coxeter graph
    component, computed from the graph shape alone."""
    if size == 1:
        return 2
    if size == 2:
        (m,) = set(edges.values())
        return 2 * m
    deg = {v: 0 for v in range(size)}
    for (a, b) in edges:
        deg[a] += 1
        deg[b] += 1
    if max(deg.values()) == 2:  # a path
        ends = [v for v, d in deg.items() if d == 1]
        # walk the path collecting labels
        prev, cur = None, ends[0]
        labels = []
        while True:
            nxt = None
            for (a, b), m in edges.items():
                if a == cur and b != prev:
                    nxt = b
                    labels.append(m)
                elif b == cur and a != prev:
                    nxt = a
                    labels.append(m)
                if nxt is not None:
                    break
            if nxt is None:
                break
            prev, cur = cur, nxt
        n = size
        if all(m == 3 for m in labels):
            return _factorial(n + 1)  # type A
        if sorted(labels) == [3] * (n - 2) + [4] and 4 in (labels[0], labels[-1]):
            return (2 ** n) * _factorial(n)  # type B/C
        if labels == [3, 4, 3]:
            return 1152  # type F4
        if sorted(labels) == [3] * (n - 2) + [5] and 5 in (labels[0], labels[-1]):
            if n == 3:
                return 120  # H3
            if n == 4:
                return 14400  # H4
        raise RealizationError("unrecognized finite Coxeter graph (path)")
    if max(deg.values()) == 3 and all(m == 3 for m in edges.values()):
        # simply-laced with one branch point: D or E
        branch = [v for v, d in deg.items() if d == 3]
        if len(branch) != 1:
            raise RealizationError("unrecognized branched Coxeter graph")
        # arm lengths from the branch point
        arms = []
        adj = {v: [] for v in range(size)}
        for (a, b) in edges:
            adj[a].append(b)
            adj[b].append(a)
        for start in adj[branch[0]]:
            ln, prev, cur = 1, branch[0], start
            while True:
                nxt = [w for w in adj[cur] if w != prev]
                if not nxt:
                    break
                prev, cur = cur, nxt[0]
                ln += 1
            arms.append(ln)
        arms.sort()
        n = size
        if arms[0] == 1 and arms[1] == 1:
            return (2 ** (n - 1)) * _factorial(n)  # type D
        if arms == [1, 2, 2]:
            return 51840  # E6
        if arms == [1, 2, 3]:
            return 2903040  # E7
        if arms == [1, 2, 4]:
            return 696729600  # E8
    raise RealizationError("unrecognized finite Coxeter graph")


def coxeter_group_order(matrix):
    """|W| from the Coxeter matrix alone (graph classification); independent
    of any realization."""
    n = len(matrix)
    seen = set()
    total = 1
    for start in range(n):
        if start in seen:
            continue
        comp = {start}
        queue = [start]
        while queue:
            v = queue.pop()
            for w in range(n):
                if w != v and matrix[v][w] >= 3 and w not in comp:
                    comp.add(w)
                    queue.append(w)
        seen |= comp
        nodes = sorted(comp)
        relabel = {v: i for i, v in enumerate(nodes)}
        edges = {}
        for a in nodes:
            for b in nodes:
                if a < b and matrix[a][b] >= 3:
                    edges[(relabel[a], relabel[b])] = matrix[a][b]
        total *= _component_order(len(nodes), edges)
        if total > MAX_GROUP_ORDER:
            raise RealizationError(
                f"group order exceeds desk-scale bound {MAX_GROUP_ORDER}")
    return total


class Element:
    """Group element; equality is equality of exact action matrices, realized
    here as equality of table indices."""

    __slots__ = ("system", "index")

    def __init__(self, system, index):
        self.system = system
        self.index = index

    @property
    def matrix(self):
        return self.system._matrices[self.index]

    @property
    def length(self):
        return self.system._length[self.index]

    def __eq__(self, other):
        return (isinstance(other, Element) and self.system is other.system
                and self.index == other.index)

    def __hash__(self):
        return hash((id(self.system), self.index))

    def __mul__(self, other):
        return Element(self.system,
                       self.system._mul_index(self.index, other.index))

    def inverse(self):
        return Element(self.system, self.system._inv[self.index])

    def __repr__(self):
        word = self.system._word[self.index]
        name = "".join(self.system.generators[s] for s in word) or "e"
        return f"<{name}>"


class Realization:
    """Coxeter system plus Cartan data, with the full element table."""

    def __init__(self, generators, coxeter_matrix, cartan):
        self.generators = tuple(generators)
        self.rank = len(self.generators)
        self.coxeter_matrix = tuple(tuple(int(x) for x in row)
                                    for row in coxeter_matrix)
        self.cartan = tuple(tuple(Fraction(x) for x in row) for row in cartan)
        self._validate_shape()
        self._gen_matrices = tuple(self._reflection_matrix(s)
                                   for s in range(self.rank))
        self._build_tables()
        self._validate_orders()
        # caches shared by the diagrammatic layers
        self._subexpr_cache = {}
        self._gen_morphisms = {}
        self._leaf_cache = {}
        self._basis_cache = {}
        self._bruhat_table = None

    # -- construction and validation --------------------------------------

    def _validate_shape(self):
        n = self.rank
        if n == 0:
            raise RealizationError("empty generator list")
        if len(set(self.generators)) != n:
            raise RealizationError("duplicate generator names")
        m = self.coxeter_matrix
        if len(m) != n or any(len(r) != n for r in m):
            raise RealizationError("coxeter_matrix has wrong shape")
        for i in range(n):
            if m[i][i] != 1:
                raise RealizationError("coxeter matrix diagonal must be 1")
            for j in range(n):
                if m[i][j] != m[j][i]:
                    raise RealizationError("coxeter matrix must be symmetric")
                if i != j and m[i][j] < 2:
                    raise RealizationError("off-diagonal entries must be >= 2")
        c = self.cartan
        if len(c) != n or any(len(r) != n for r in c):
            raise RealizationError("cartan table has wrong shape")
        for s in range(n):
            if c[s][s] != 2:
                raise RealizationError(
                    f"<alpha_s, alpha_s^vee> must equal 2 (generator "
                    f"{self.generators[s]!r} has {c[s][s]})")

    def _reflection_matrix(self, s):
        """Dual action of s on h* in the alpha basis: alpha_t -> alpha_t -
        <alpha_t, alpha_s^vee> alpha_s.  Columns are images."""
        n = self.rank
        mat = [[Fraction(1) if i == j else Fraction(0) for j in range(n)]
               for i in range(n)]
        for t in range(n):
            mat[s][t] -= self.cartan[s][t]
        return tuple(tuple(row) for row in mat)

    def _mat_mul(self, a, b):
        n = self.rank
        return tuple(tuple(sum(a[i][k] * b[k][j] for k in range(n))
                           for j in range(n)) for i in range(n))

    def _build_tables(self):
        order = coxeter_group_order(self.coxeter_matrix)
        n = self.rank
        ident = tuple(tuple(Fraction(1) if i == j else Fraction(0)
                            for j in range(n)) for i in range(n))
        mats = [ident]
        index = {ident: 0}
        length = [0]
        word = [()]
        right = [[None] * n]
        queue = [0]
        while queue:
            nxt = []
            for i in queue:
                for s in range(n):
                    m = self._mat_mul(mats[i], self._gen_matrices[s])
                    j = index.get(m)
                    if j is None:
                        j = len(mats)
                        if j >= order:
                            raise RealizationError(
                                "realization is not faithful: orbit exceeds "
                                "the Coxeter group order")
                        mats.append(m)
                        index[m] = j
                        length.append(length[i] + 1)
                        word.append(word[i] + (s,))
                        right.append([None] * n)
                        nxt.append(j)
                    right[i][s] = j
            queue = nxt
        if len(mats) != order:
            raise RealizationError(
                f"realization is not faithful: matrix orbit has {len(mats)} "
                f"elements but |W| = {order}")
        self._matrices = mats
        self._index = index
        self._length = length
        self._word = word
        self._right = right
        self._order = order
        # inverse table: (ws)^-1 = s w^-1, via left multiplication
        inv = [0] * order
        for i in range(1, order):
            w = self._word[i]
            m = ident
            for s in reversed(w):
                m = self._mat_mul(self._gen_matrices[s], m)
            inv[i] = index[m]
        self._inv = inv

    def _validate_orders(self):
        for s in range(self.rank):
            for t in range(s + 1, self.rank):
                m = self.coxeter_matrix[s][t]
                i = 0
                k = 0
                while True:
                    i = self._right[self._right[i][s]][t]
                    k += 1
                    if i == 0:
                        break
                    if k > m:
                        raise RealizationError(
                            f"order of {self.generators[s]}{self.generators[t]} "
                            f"exceeds m = {m}")
                if k != m:
                    raise RealizationError(
                        f"order of {self.generators[s]}{self.generators[t]} is "
                        f"{k}, expected m = {m}")

    # -- basic group operations --------------------------------------------

    @property
    def order(self):
        return self._order

    def identity(self):
        return Element(self, 0)

    def gen_index(self, name):
        try:
            return self.generators.index(name)
        except ValueError:
            raise UnknownGenerator(name) from None

    def _mul_index(self, i, j):
        for s in self._word[j]:
            i = self._right[i][s]
        return i

    def element_of(self, word):
        """Element expressed by a Coxeter word (tuple of generator indices)."""
        i = 0
        for s in word:
            if not 0 <= s < self.rank:
                raise UnknownGenerator(s)
            i = self._right[i][s]
        return Element(self, i)

    def elements(self):
        return [Element(self, i) for i in range(self._order)]

    def length(self, x):
        return self._length[x.index]

    def is_reduced(self, word):
        return self.element_of(word).length == len(word)

    def longest_element(self):
        i = max(range(self._order), key=lambda k: self._length[k])
        return Element(self, i)

    def canonical_word(self, x):
        """Shortlex-minimal reduced word (BFS discovery order)."""
        return self._word[x.index]

    def reduced_words(self, x):
        """All reduced words for x, lexicographically sorted."""
        out = []

        def rec(i, acc):
            if i == 0:
                out.append(tuple(reversed(acc)))
                return
            for s in range(self.rank):
                j = self._right[i][s]
                if self._length[j] < self._length[i]:
                    rec(j, acc + [s])

        rec(x.index, [])
        return sorted(out)

    def right_descents(self, x):
        return [s for s in range(self.rank)
                if self._length[self._right[x.index][s]] < x.length]

    def reflections(self):
        """All reflections w s w^{-1}, as elements."""
        seen = set()
        for i in range(self._order):
            for s in range(self.rank):
                t = self._mul_index(self._mul_index(i, self._right[0][s]),
                                    self._inv[i])
                seen.add(t)
        return [Element(self, i) for i in sorted(seen)]

    # -- Bruhat order -------------------------------------------------------

    def _bruhat_closure(self):
        if self._bruhat_table is not None:
            return self._bruhat_table
        n = self._order
        refl = [t.index for t in self.reflections()]
        geq = [1 << i for i in range(n)]  # bitmask of {z : z >= x}
        by_len = sorted(range(n), key=lambda i: -self._length[i])
        for i in by_len:
            acc = geq[i]
            for t in refl:
                j = self._mul_index(i, t)
                if self._length[j] > self._length[i]:
                    acc |= geq[j]
            geq[i] = acc
        self._bruhat_table = geq
        return geq

    def bruhat_leq(self, x, y):
        """Bruhat order via transitive closure of the Bruhat graph."""
        geq = self._bruhat_closure()
        return bool(geq[x.index] >> y.index & 1)

    def bruhat_leq_subword(self, x, y):
        """Bruhat order via the subword criterion on a fixed reduced word of
        y (independent cross-check implementation)."""
        u = x.index
        for s in reversed(self._word[y.index]):
            j = self._right[u][s]
            if self._length[j] < self._length[u]:
                u = j
        return u == 0

    # -- subexpressions and decorations --------------------------------------

    def subexpr_element(self, word, bits):
        """Element expressed by the subexpression (bits picks letters)."""
        key = (word, bits)
        hit = self._subexpr_cache.get(key)
        if hit is None:
            i = 0
            for s, b in zip(word, bits):
                if b:
                    i = self._right[i][s]
            hit = Element(self, i)
            self._subexpr_cache[key] = hit
        return hit

    def decorate(self, word, bits):
        if len(word) != len(bits):
            raise LengthMismatch(
                f"word length {len(word)} != bit length {len(bits)}")
        decs = []
        stroll = [0]
        i = 0
        for s, b in zip(word, bits):
            j = self._right[i][s]
            up = self._length[j] > self._length[i]
            decs.append(("U" if up else "D") + ("1" if b else "0"))
            if b:
                i = j
            stroll.append(i)
        return DecoratedSubexpression(self, word, tuple(bits), tuple(decs),
                                      tuple(stroll))

    # -- braid moves ---------------------------------------------------------

    def _alt_word(self, a, b, m):
        return tuple(a if k % 2 == 0 else b for k in range(m))

    def braid_move_neighbors(self, word):
        """All single braid-move rewrites of a word, in deterministic order.
        Yields (move, new_word) with move = (position, a, b)."""
        out = []
        n = len(word)
        for i in range(n):
            a = word[i]
            for b in range(self.rank):
                if b == a:
                    continue
                m = self.coxeter_matrix[a][b]
                if i + m <= n and word[i:i + m] == self._alt_word(a, b, m):
                    out.append(((i, a, b), word[:i] + self._alt_word(b, a, m)
                                + word[i + m:]))
        return out

    def apply_braid_move(self, word, move):
        i, a, b = move
        m = self.coxeter_matrix[a][b]
        if word[i:i + m] != self._alt_word(a, b, m):
            raise ValueError("braid move does not apply")
        return word[:i] + self._alt_word(b, a, m) + word[i + m:]

    def matsumoto_path(self, rw1, rw2):
        """Shortest sequence of braid moves from rw1 to rw2 (BFS, ties broken
        by exploration order: position, then target letter)."""
        rw1, rw2 = tuple(rw1), tuple(rw2)
        if not self.is_reduced(rw1):
            raise NotReduced(f"{rw1} is not reduced")
        if not self.is_reduced(rw2):
            raise NotReduced(f"{rw2} is not reduced")
        if self.element_of(rw1) != self.element_of(rw2):
            raise NotSameElement(f"{rw1} and {rw2} express different elements")
        return self._braid_bfs(rw1, lambda w: w == rw2)

    def _braid_bfs(self, start, accept):
        if accept(start):
            return []
        parent = {start: None}
        queue = [start]
        while queue:
            nxt = []
            for w in queue:
                for move, w2 in self.braid_move_neighbors(w):
                    if w2 in parent:
                        continue
                    parent[w2] = (w, move)
                    if accept(w2):
                        path = []
                        cur = w2
                        while parent[cur] is not None:
                            prev, mv = parent[cur]
                            path.append(mv)
                            cur = prev
                        path.reverse()
                        return path
                    nxt.append(w2)
            queue = nxt
        raise NotSameElement("braid-move search exhausted")

    def exchange_witness(self, word, s):
        """Braid-move path from the reduced word to one ending in s."""
        word = tuple(word)
        if not self.is_reduced(word):
            raise NotReduced(f"{word} is not reduced")
        x = self.element_of(word)
        if s not in self.right_descents(x):
            raise NotInDescent(
                f"{self.generators[s]} is not a right descent of {x!r}")
        return self._braid_bfs(word, lambda w: w[-1] == s)


class DecoratedSubexpression:
    """01-sequence with U0/U1/D0/D1 decorations along the Bruhat stroll."""

    __slots__ = ("system", "word", "bits", "decorations", "stroll")

    def __init__(self, system, word, bits, decorations, stroll):
        self.system = system
        self.word = word
        self.bits = bits
        self.decorations = decorations
        self.stroll = stroll

    @property
    def defect(self):
        return (sum(1 for d in self.decorations if d == "U0")
                - sum(1 for d in self.decorations if d == "D0"))

    def element(self):
        return Element(self.system, self.stroll[-1])

    def __repr__(self):
        return f"DecoratedSubexpression({' '.join(self.decorations)})"


# -- braid words -----------------------------------------------------------

def coxeter_projection(braid):
    """Drop the signs of a braid word."""
    return tuple(s for s, _ in braid)


def positive_lift(word):
    return tuple((s, 1) for s in word)


def negative_lift(word):
    return tuple((s, -1) for s in word)


def writhe(braid):
    return sum(sign for _, sign in braid)


# -- ring bridge -----------------------------------------------------------

def act_element(x, f):
    """Action of a group element on a polynomial."""
    return act(x.matrix, f)


def demazure(realization, s, f):
    return _demazure(realization._gen_matrices[s], s, f)


def alpha(realization, s):
    return Polynomial.generator(realization.rank, s)


# -- presets and config loading ---------------------------------------------

PRESETS = {
    "A1": {"generators": ["s"], "coxeter_matrix": [[1]], "cartan": [[2]]},
    "A1xA1": {"generators": ["s", "t"],
              "coxeter_matrix": [[1, 2], [2, 1]],
              "cartan": [[2, 0], [0, 2]]},
    "A2": {"generators": ["s", "t"],
           "coxeter_matrix": [[1, 3], [3, 1]],
           "cartan": [[2, -1], [-1, 2]]},
    "B2": {"generators": ["s", "t"],
           "coxeter_matrix": [[1, 4], [4, 1]],
           "cartan": [[2, -1], [-2, 2]]},
    "G2": {"generators": ["s", "t"],
           "coxeter_matrix": [[1, 6], [6, 1]],
           "cartan": [[2, -1], [-3, 2]]},
    "A3": {"generators": ["s", "t", "u"],
           "coxeter_matrix": [[1, 3, 2], [3, 1, 3], [2, 3, 1]],
           "cartan": [[2, -1, 0], [-1, 2, -1], [0, -1, 2]]},
    "A1xA2": {"generators": ["s", "t", "u"],
              "coxeter_matrix": [[1, 3, 2], [3, 1, 2], [2, 2, 1]],
              "cartan": [[2, -1, 0], [-1, 2, 0], [0, 0, 2]]},
}


def load_realization(spec):
    """Build a Realization from a preset name, a config dict, or a JSON file
    path.  Raises RealizationError with a diagnostic on invalid data."""
    if isinstance(spec, Realization):
        return spec
    if isinstance(spec, str):
        if spec in PRESETS:
            cfg = PRESETS[spec]
        else:
            try:
                with open(spec) as fh:
                    cfg = json.load(fh)
            except OSError as exc:
                raise RealizationError(f"cannot read realization file: {exc}")
            except json.JSONDecodeError as exc:
                raise RealizationError(f"malformed realization JSON: {exc}")
    else:
        cfg = spec
    for key in ("generators", "coxeter_matrix", "cartan"):
        if key not in cfg:
            raise RealizationError(f"realization config missing {key!r}")
    try:
        cartan = [[Fraction(x) for x in row] for row in cfg["cartan"]]
    except (TypeError, ValueError) as exc:
        raise RealizationError(f"non-rational cartan entry: {exc}")
    return Realization(cfg["generators"], cfg["coxeter_matrix"], cartan)


def parse_word(realization, text):
    """Coxeter word from text: whitespace-separated generator names, or a
    compact string when every generator name is a single character."""
    text = text.strip()
    if not text:
        return ()
    toks = text.split()
    if len(toks) == 1 and toks[0] not in realization.generators \
            and all(len(g) == 1 for g in realization.generators):
        toks = list(toks[0])
    return tuple(realization.gen_index(t) for t in toks)


def parse_braid(realization, text):
    """Braid word from text: whitespace-separated generator names with an
    optional '-' suffix for inverse letters (e.g. "s s t-")."""
    out = []
    for tok in text.split():
        sign = 1
        if tok.endswith("-"):
            sign = -1
            tok = tok[:-1]
        out.append((realization.gen_index(tok), sign))
    return tuple(out)
