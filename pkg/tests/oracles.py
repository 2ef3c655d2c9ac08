"""
Independent oracles for the test-suite.  Nothing here calls the engine's
sign machinery: Grassmann signs are computed by bubble-sorting words,
ranks come from sympy, and brackets are expanded on dense vectors.
"""

from fractions import Fraction

import sympy


# ------------------------------------------------------------ Grassmann words

class Superpoly:
    """
    Polynomials in named generators of given parity, odd ones squaring to
    zero.  A monomial is a sorted tuple of generator indices (with
    repetition for even ones).
    """

    def __init__(self, names, parities, terms=None):
        self.names = list(names)
        self.parities = list(parities)
        self.terms = {k: Fraction(v) for k, v in (terms or {}).items() if v}

    def gen(self, name):
        return Superpoly(self.names, self.parities, {(self.names.index(name),): 1})

    def const(self, c):
        return Superpoly(self.names, self.parities, {(): c})

    def word(self, names):
        """Ordered product of generators given by name."""
        out = self.const(1)
        for nm in names:
            out = out * self.gen(nm)
        return out

    def _normal(self, word):
        w = list(word)
        sign = 1
        for i in range(len(w)):
            for j in range(len(w) - 1 - i):
                if w[j] > w[j + 1]:
                    if self.parities[w[j]] and self.parities[w[j + 1]]:
                        sign = -sign
                    w[j], w[j + 1] = w[j + 1], w[j]
        for a, b in zip(w, w[1:]):
            if a == b and self.parities[a]:
                return 0, None
        return sign, tuple(w)

    def __add__(self, other):
        t = dict(self.terms)
        for k, v in other.terms.items():
            t[k] = t.get(k, 0) + v
        return Superpoly(self.names, self.parities, t)

    def __sub__(self, other):
        return self + other * -1

    def __mul__(self, other):
        if not isinstance(other, Superpoly):
            return Superpoly(self.names, self.parities,
                             {k: v * Fraction(other) for k, v in self.terms.items()})
        t = {}
        for k1, v1 in self.terms.items():
            for k2, v2 in other.terms.items():
                s, w = self._normal(k1 + k2)
                if s:
                    t[w] = t.get(w, 0) + s * v1 * v2
        return Superpoly(self.names, self.parities, t)

    def split(self, param_names):
        """
        ``{(param indices, generator indices): c}``.  Parameters are listed
        first in ``names``, so a sorted key already has them on the left.
        """
        pset = {self.names.index(p) for p in param_names}
        out = {}
        for k, v in self.terms.items():
            key = (tuple(i for i in k if i in pset), tuple(i for i in k if i not in pset))
            out[key] = out.get(key, 0) + v
        return out


def cup_cubic(gen_names, class_words, top_word, top_value):
    """
    The cup-product potential (1/6)∫(Σ t^a Δ_a)³ on the exterior algebra of
    ``gen_names`` (all odd).  ``class_words[a]`` is Δ_a as a list of
    generators; ∫ of the ordered ``top_word`` is ``top_value``.  Returns
    ``{exponent tuple: coeff}`` with parameters t0, t1, ... and parity of
    t^a equal to the length parity of Δ_a.
    """
    k = len(class_words)
    pnames = ["t%d" % a for a in range(k)]
    P = Superpoly(pnames + list(gen_names),
                  [len(w) % 2 for w in class_words] + [1] * len(gen_names))
    T = P.const(0)
    for a, w in enumerate(class_words):
        T = T + P.gen(pnames[a]) * P.word(w)
    cube = T * T * T
    top = P.word(top_word)
    (top_key, top_sign), = top.terms.items()
    out = {}
    for (pw, gw), c in cube.split(pnames).items():
        if gw != top_key:
            continue
        expo = [0] * k
        for i in pw:
            expo[i] += 1
        out[tuple(expo)] = c * top_value / top_sign / 6
    return out


def cup_metric(gen_names, class_words, top_word, top_value):
    """∫(Δ_a ∪ Δ_b) with ∫ top_word = top_value."""
    P = Superpoly(list(gen_names), [1] * len(gen_names))
    top = P.word(top_word)
    (top_key, top_sign), = top.terms.items()
    k = len(class_words)
    G = [[Fraction(0)] * k for _ in range(k)]
    for a in range(k):
        for b in range(k):
            prod = P.word(class_words[a]) * P.word(class_words[b])
            G[a][b] = prod.terms.get(top_key, 0) * top_value / top_sign
    return G


def words_from_names(names):
    return [[] if nm == "1" else nm.split("*") for nm in names]


# ------------------------------------------------------------ dense brute force

def product_matrix(A):
    """Dense structure constants P[i][j][k] read straight from the table."""
    n = A.dim
    P = [[[Fraction(0)] * n for _ in range(n)] for _ in range(n)]
    for (i, j), out in A.product.table.items():
        for k, c in out.items():
            P[i][j][k] += Fraction(c)
    return P


def dense_mul(P, x, y):
    n = len(x)
    out = [Fraction(0)] * n
    for i in range(n):
        if x[i]:
            for j in range(n):
                if y[j]:
                    for k in range(n):
                        if P[i][j][k]:
                            out[k] += x[i] * y[j] * P[i][j][k]
    return out


def dense_apply(M, x):
    return [sum((M[i][j] * x[j] for j in range(len(x))), Fraction(0)) for i in range(len(M))]


def brute_bracket(A, i, j):
    """(-1)^a Δ(ab) - (-1)^a Δ(a)b - aΔ(b) on basis vectors, dense."""
    n = A.dim
    P = product_matrix(A)
    D = A.delta.matrix()
    a = [Fraction(int(k == i)) for k in range(n)]
    b = [Fraction(int(k == j)) for k in range(n)]
    s = -1 if A.basis.parities[i] else 1
    t1 = dense_apply(D, dense_mul(P, a, b))
    t2 = dense_mul(P, dense_apply(D, a), b)
    t3 = dense_mul(P, a, dense_apply(D, b))
    return [s * x - s * y - z for x, y, z in zip(t1, t2, t3)]


def sympy_rank(M):
    if not M or not M[0]:
        return 0
    return sympy.Matrix([[sympy.Rational(x.numerator, x.denominator) for x in row]
                         for row in M]).rank()


def cohomology_dim(op):
    M = op.matrix()
    n = len(M)
    return n - 2 * sympy_rank(M)
