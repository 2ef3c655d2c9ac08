import random
from fractions import Fraction

import pytest

from oracles import brute_bracket, cohomology_dim, cup_metric, sympy_rank, words_from_names
from semiinf.dgbv import (DgbvAlgebra, ModuleStructure, bullet_action, check_dgbv_axioms,
                          check_lie_axioms, check_manin, check_module_axioms, check_odd_lie,
                          cohomology, derived_bracket, dgbv_module, integrate,
                          manin_cohomology_dims, pairing_from_integral)
from semiinf.models import BUILTINS, MonomialAlgebra, builtin, compose_cols
from semiinf.super_core import GradedBasis, GradedElement, LinearOp, StructureConstants


def sgn(p):
    return -1 if p % 2 else 1


@pytest.mark.parametrize("name", sorted(BUILTINS))
def test_builtin_models_pass_axioms(name):
    A = builtin(name)
    rep = check_dgbv_axioms(A)
    assert rep.passed, rep.failures()
    assert check_lie_axioms(A).passed
    assert check_module_axioms(dgbv_module(A)).passed
    assert check_module_axioms(dgbv_module(A, hbar=True)).passed


def test_delta_replaced_by_d_fails_bidegree():
    A = builtin("exact-bracket")
    B = DgbvAlgebra("bad", A.basis, A.n, A.unit, A.product, A.d, A.d)
    rep = check_dgbv_axioms(B)
    assert not rep["delta bidegree (-1,0)"].passed


def _bare_delta_model():
    M = MonomialAlgebra([("x", (0, 0), 3), ("psi", (1, 0), 2)])
    dx = M.derivation({"x": {M.unit(): 1}}, 0)
    dpsi = M.derivation({"psi": {M.unit(): 1}}, 1)
    delta = M.op(compose_cols(dx, dpsi), (-1, 0))
    return DgbvAlgebra("bare", M.basis, 1, M.unit(), M.product(),
                       LinearOp.zero(M.basis, (0, 1)), delta)


def test_order_two_identity_instance_xxx():
    A = _bare_delta_model()
    x = A.e("x")
    D = A.delta
    lhs = D(A.mul(A.mul(x, x), x))
    xx = A.mul(x, x)
    rhs = (A.mul(D(xx), x) + A.mul(x, D(xx)) + A.mul(x, D(xx))
           - A.mul(A.mul(D(x), x), x) - A.mul(A.mul(x, D(x)), x) - A.mul(xx, D(x)))
    assert lhs == rhs


def test_bare_delta_does_not_descend_to_truncation():
    rep = check_dgbv_axioms(_bare_delta_model())
    c = rep["delta order-2 identity"]
    assert not c.passed and c.witness == ("x", "x", "x*psi")


def test_bracket_with_unit_and_odd_self_bracket():
    for name in ("truncated-poly", "exact-bracket", "torus-n2"):
        A = builtin(name)
        for i in range(A.dim):
            assert not derived_bracket(A, A.one(), A.e(i))
            if A.basis.parities[i] == 1:
                assert not derived_bracket(A, A.e(i), A.e(i))


def test_bracket_x_psi_on_truncated_fixture():
    A = builtin("truncated-poly")
    got = derived_bracket(A, A.e("x"), A.e("psi"))
    assert got.vector() == brute_bracket(A, A.basis.index("x"), A.basis.index("psi"))
    assert got == A.e("x")


def test_zero_bracket_zero_differential():
    B = GradedBasis([("1", (0, 0)), ("e", (1, 0))])
    rep = check_odd_lie(B, lambda i, j: None, LinearOp.zero(B))
    assert rep.passed


def test_corrupted_bracket_breaks_jacobi():
    A = builtin("exact-bracket")
    tab = {k: dict(v) for k, v in A.bracket_table().items()}
    i, j = A.basis.index("x"), A.basis.index("y")
    tab[(i, j)] = {A.basis.index("x"): Fraction(1)}
    rep = check_odd_lie(A.basis, lambda a, b: tab.get((a, b)), A.delta)
    assert not rep.passed
    bad = rep.failures()[0]
    assert bad.witness is not None


def test_bullet_with_unit():
    for name in ("truncated-poly", "exact-bracket"):
        A = builtin(name)
        for i in range(A.dim):
            assert not bullet_action(A, A.one(), A.e(i))
            a = A.e(i)
            assert bullet_action(A, a, A.one()) == A.delta(a) * sgn(A.basis.parities[i])


def test_module_lie_identity_random_triples():
    A = builtin("exact-bracket")
    rng = random.Random(3)
    par = A.basis.parities
    for _ in range(40):
        i, j, k = (rng.randrange(A.dim) for _ in range(3))
        a1, a2, b = A.e(i), A.e(j), A.e(k)
        lhs = (bullet_action(A, a1, bullet_action(A, a2, b))
               - bullet_action(A, a2, bullet_action(A, a1, b)) * sgn((par[i] + 1) * (par[j] + 1)))
        assert lhs == bullet_action(A, derived_bracket(A, a1, a2), b)


def test_dropped_hbar_factor_breaks_circ_identity():
    A = builtin("exact-bracket")
    good = dgbv_module(A, hbar=True)
    bad = ModuleStructure(good.g_basis, good.bracket, good.g_d, good.m_basis, good.bullet,
                          good.circ, good.m_d, circ_nu=0, label="dropped")
    assert check_module_axioms(good).passed
    rep = check_module_axioms(bad)
    assert not rep["d_m(k∘a) compatibility"].passed


def test_cohomology_zero_operator():
    A = builtin("torus-n1")
    data = cohomology(A.d)
    assert data.dim == A.dim
    for i in range(A.dim):
        assert not data.h(A.e(i))


def test_cohomology_acyclic_two_term():
    B = GradedBasis([("a", (0, 0)), ("b", (0, 1))])
    op = LinearOp(B, {0: {1: Fraction(1)}}, (0, 1))
    assert cohomology(op).dim == 0


def test_heisenberg_cohomology_by_degree():
    A = builtin("heisenberg-ce")
    data = cohomology(A.d)
    degs = [A.basis.bidegrees[i][1] for i in range(A.dim)]
    got = [0, 0, 0, 0]
    for v in data.reps:
        (q,) = {degs[i] for i, c in enumerate(v) if c}
        got[q] += 1
    M = A.d.matrix()
    want = []
    for q in range(4):
        rows_q = [i for i in range(A.dim) if degs[i] == q]
        rows_q1 = [i for i in range(A.dim) if degs[i] == q + 1]
        rows_qm = [i for i in range(A.dim) if degs[i] == q - 1]
        out = [[M[r][c] for c in rows_q] for r in rows_q1]
        inc = [[M[r][c] for c in rows_qm] for r in rows_q]
        want.append(len(rows_q) - sympy_rank(out) - sympy_rank(inc))
    assert want == [1, 2, 2, 1]
    assert got == want


@pytest.mark.parametrize("name", sorted(BUILTINS))
def test_cohomology_dims_against_sympy(name):
    A = builtin(name)
    assert cohomology(A.d).dim == cohomology_dim(A.d)
    assert cohomology(A.delta).dim == cohomology_dim(A.delta)


def test_manin_trivial_and_torus():
    A = builtin("torus-n2")
    assert check_manin(A).verdict and check_manin(A).dims() == (0, 0, 0)


def test_manin_fails_on_engineered_fixture():
    A = builtin("non-manin")
    rep = check_manin(A)
    assert not rep.verdict
    assert rep.witness == [0, 0, 0, 1]
    assert manin_cohomology_dims(A) == (2, 4, 3)


def test_integral_normalization():
    A = builtin("torus-n1")
    assert pairing_from_integral(A, A.one(), A.e("psi1*psibar1")) == 1


def test_integral_d_adjoint_random_pairs():
    A = builtin("heisenberg-ce")
    rng = random.Random(5)
    par = A.basis.parities
    for _ in range(30):
        i, j = rng.randrange(A.dim), rng.randrange(A.dim)
        lhs = pairing_from_integral(A, A.d(A.e(i)), A.e(j))
        rhs = -sgn(par[i]) * pairing_from_integral(A, A.e(i), A.d(A.e(j)))
        assert lhs == rhs


def test_literal_integral_sign_contradicts_stokes():
    # ∫(da)∘b = -(-1)^{a+1}∫a∘db read literally fails at a = b = z*
    A = builtin("heisenberg-ce")
    z = A.e("zs")
    xy = A.e("xs*ys")
    assert integrate(A, A.d(A.mul(z, xy))) == 0
    lhs = pairing_from_integral(A, A.d(z), z)
    literal = -sgn(1 + 1) * pairing_from_integral(A, z, A.d(z))
    assert lhs != literal
    assert lhs == -sgn(1) * pairing_from_integral(A, z, A.d(z))


def test_elliptic_gram_is_hyperbolic():
    A = builtin("torus-n1")
    data = cohomology(A.d)
    reps = data.rep_elements()
    G = [[pairing_from_integral(A, a, b) for b in reps] for a in reps]
    names = [A.basis.names[[i for i, c in enumerate(v) if c][0]] for v in data.reps]
    assert G == cup_metric(["psi1", "psibar1"], words_from_names(names), ["psi1", "psibar1"], 1)
    assert G == [[0, 0, 0, 1], [0, 0, 1, 0], [0, -1, 0, 0], [1, 0, 0, 0]]


def test_bracket_table_matches_brute_force_everywhere():
    for name in sorted(BUILTINS):
        A = builtin(name)
        for i in range(A.dim):
            for j in range(A.dim):
                assert derived_bracket(A, A.e(i), A.e(j)).vector() == brute_bracket(A, i, j)
