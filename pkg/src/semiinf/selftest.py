"""
Seeded property suite behind ``semiinf selftest``.  Every case draws
random homogeneous elements and checks identities that hold for all of
them; the report depends only on (seed, cases).
"""

import random
from fractions import Fraction

from . import linalg
from .deformation import DgLieAlgebra, gauge_action, mc_residual, solve_mc
from .dgbv import derived_bracket
from .kahler_ops import POLY, KahlerData, random_section, verify_lemma_342
from .models import builtin
from .report import Report, record
from .super_core import GradedElement, swap_sign

MODELS = ("truncated-poly", "heisenberg-ce", "exact-bracket", "non-manin",
          "torus-n1", "torus-dolbeault-n1", "torus-derham-n2")


def sgn(p):
    return swap_sign(1, p)


def random_homogeneous(rng, A, parity, terms=3):
    idx = [i for i in range(A.dim) if A.basis.parities[i] == parity]
    v = [Fraction(0)] * A.dim
    for _ in range(terms):
        if idx:
            v[rng.choice(idx)] += Fraction(rng.randint(-4, 4), rng.randint(1, 3))
    return GradedElement.from_vector(A.basis, v)


def _algebra_case(rng, A, rep):
    pa, pb, pc = (rng.randrange(2) for _ in range(3))
    a, b, c = (random_homogeneous(rng, A, p) for p in (pa, pb, pc))
    tag = (A.name, pa, pb, pc)
    mul, d, D = A.mul, A.d, A.delta

    def br(x, y):
        return derived_bracket(A, x, y)
    record(rep["associativity"], mul(mul(a, b), c) == mul(a, mul(b, c)), tag)
    record(rep["supercommutativity"], mul(a, b) == mul(b, a) * sgn(pa * pb), tag)
    record(rep["d Leibniz on products"], d(mul(a, b)) == mul(d(a), b) + mul(a, d(b)) * sgn(pa), tag)
    record(rep["bracket antisymmetry"], br(a, b) == br(b, a) * -sgn((pa + 1) * (pb + 1)), tag)
    record(rep["bracket Jacobi"],
           br(a, br(b, c)) == br(br(a, b), c) + br(b, br(a, c)) * sgn((pa + 1) * (pb + 1)), tag)
    record(rep["odd Poisson identity"],
           br(a, mul(b, c)) == mul(br(a, b), c) + mul(b, br(a, c)) * sgn((pa + 1) * pb), tag)
    record(rep["d derivation of bracket"],
           d(br(a, b)) == br(d(a), b) - br(a, d(b)) * sgn(pa), tag)
    record(rep["delta derivation of bracket"],
           D(br(a, b)) == br(D(a), b) - br(a, D(b)) * sgn(pa), tag)


def _linalg_case(rng, rep):
    r, c = rng.randint(1, 5), rng.randint(1, 5)
    M = [[Fraction(rng.randint(-2, 2)) for _ in range(c)] for _ in range(r)]
    ker = linalg.nullspace(M, c)
    ok = linalg.rank(M) + len(ker) == c and all(
        all(sum(M[i][j] * v[j] for j in range(c)) == 0 for i in range(r)) for v in ker)
    record(rep["rank + nullity"], ok, M)
    x = [Fraction(rng.randint(-3, 3)) for _ in range(c)]
    b = [sum(M[i][j] * x[j] for j in range(c)) for i in range(r)]
    y = linalg.solve(M, b)
    record(rep["solve consistent"],
           y is not None and [sum(M[i][j] * y[j] for j in range(c)) for i in range(r)] == b, M)


def _lemma_case(rng, rep):
    n = rng.randint(1, 2)
    while True:
        G = [[Fraction(rng.randint(-2, 2)) for _ in range(n)] for _ in range(n)]
        if linalg.rank(G) == n:
            break
    K = KahlerData.constant(G)
    s = random_section(rng, n, POLY, 2, 6, terms=3)
    r = verify_lemma_342(K, [s], [])
    for name in ("(a) Q^2 = 0", "(b) [Q, dbar] = 0", "(c) [Q, sharp] = 0"):
        record(rep["lemma " + name], r[name].passed, (n, r[name].witness))


def _gauge_case(rng, g, sol, rep):
    params = sol.params
    odd = [i for i in range(len(g.basis)) if g.basis.parities[i] == 1]
    even = [i for i in range(len(g.basis)) if g.basis.parities[i] == 0]
    a = rng.randrange(params.n)
    pool = even if params.parities[a] else odd
    t = {}
    for _ in range(2):
        key = (rng.choice(pool), params.var(a), 0)
        t[key] = t.get(key, 0) + Fraction(rng.randint(-3, 3))
    x = GradedElement(g.basis, t, params, sol.order)
    y = gauge_action(g, sol.gamma, x)
    record(rep["gauge action preserves MC"], not mc_residual(g, y), (params.names[a], x.to_str()))


def run_selftest(seed=0, cases=100):
    rng = random.Random(seed)
    rep = Report("selftest seed=%d cases=%d" % (seed, cases))
    for name in ("associativity", "supercommutativity", "d Leibniz on products",
                 "bracket antisymmetry", "bracket Jacobi", "odd Poisson identity",
                 "d derivation of bracket", "delta derivation of bracket",
                 "rank + nullity", "solve consistent",
                 "lemma (a) Q^2 = 0", "lemma (b) [Q, dbar] = 0", "lemma (c) [Q, sharp] = 0",
                 "gauge action preserves MC"):
        rep.start(name)
    algebras = [builtin(m) for m in MODELS]
    g = DgLieAlgebra.from_dgbv(builtin("exact-bracket"))
    sol = solve_mc(g, 3)
    for k in range(cases):
        _algebra_case(rng, algebras[k % len(algebras)], rep)
        _linalg_case(rng, rep)
        _lemma_case(rng, rep)
        if k % 10 == 0:
            _gauge_case(rng, g, sol, rep)
    return rep
