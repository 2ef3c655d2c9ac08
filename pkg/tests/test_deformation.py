from fractions import Fraction

import pytest

from oracles import brute_bracket
from semiinf.deformation import (DgLieAlgebra, covariant_derivative, drop_term, gauge_action,
                                 is_unit_normalized, mc_residual, normalize_unit, solve_mc,
                                 transport, verify_conjugation, verify_flatness_identities)
from semiinf.dgbv import dgbv_module
from semiinf.errors import ArgumentError, ConfigurationError
from semiinf.kahler_ops import build_model_A
from semiinf.models import builtin
from semiinf.super_core import GradedElement, ParamSpace


def _sol(name, N):
    g = DgLieAlgebra.from_dgbv(builtin(name))
    return g, solve_mc(g, N)


def test_abelian_torus_gamma_is_linear():
    g, sol = _sol("torus-n2", 4)
    assert sol.unobstructed
    assert all(sum(m) == 1 for (_, m, _) in sol.gamma.terms)
    assert not mc_residual(g, sol.gamma)


def test_geometric_torus_model_N4():
    P = build_model_A(2, [[1, 0], [0, 2]])
    g = DgLieAlgebra.from_structure(P.structure, P.unit)
    sol = solve_mc(g, 4)
    assert sol.unobstructed and not mc_residual(g, sol.gamma)
    assert all(sum(m) == 1 for (_, m, _) in sol.gamma.terms)


def _obstruction_oracle(A, reps, params):
    # ½[Γ1•Γ1] with Γ1 = Σ t^a e_a, parameters moved left by hand
    par = params.parities
    out = {}
    idx = [[i for i, c in enumerate(v) if c][0] for v in reps]
    for a, ia in enumerate(idx):
        for b, ib in enumerate(idx):
            vec = brute_bracket(A, ia, ib)
            s = -1 if (par[b] * (A.basis.parities[ia] + 1)) % 2 else 1
            if a > b:
                s *= -1 if par[a] * par[b] else 1
            if a == b and par[a]:
                continue
            m = [0] * params.n
            m[a] += 1
            m[b] += 1
            for k, c in enumerate(vec):
                if c:
                    key = (k, tuple(m))
                    out[key] = out.get(key, 0) + Fraction(s, 2) * c
    return {k: c for k, c in out.items() if c}


def test_obstruction_on_truncated_fixture_order_two():
    A = builtin("truncated-poly")
    g, sol = _sol("truncated-poly", 3)
    assert not sol.unobstructed
    k, obs = sol.obstructions[0]
    assert k == 2
    # d = 0 here, so the harmonic projection is the identity
    assert all(sum(1 for c in v if c) == 1 for v in sol.reps)
    want = _obstruction_oracle(A, sol.reps, sol.params)
    assert {(i, m): c for (i, m, _), c in obs.terms.items()} == want


def test_residual_trivial_cases():
    g, sol = _sol("exact-bracket", 3)
    zero = GradedElement(g.basis, {}, sol.params, 3)
    assert not mc_residual(g, zero)
    assert not mc_residual(g, sol.gamma)


def test_residual_single_generator():
    A = builtin("exact-bracket")
    g = DgLieAlgebra.from_dgbv(A)
    P = ParamSpace(["t"], [0])
    x, uy = A.basis.index("x"), A.basis.index("u*y")
    gamma = GradedElement(A.basis, {(x, (1,), 0): 1, (uy, (1,), 0): 1}, P, 2)
    res = mc_residual(g, gamma)
    want = GradedElement(A.basis, {(A.basis.index("v*y"), (1,), 0): 1,
                                   (A.basis.index("x*v*u"), (2,), 0): -1}, P, 2)
    assert res == want


def test_normalize_unit_idempotent_on_torus():
    g, sol = _sol("torus-n1", 3)
    assert is_unit_normalized(sol)
    assert normalize_unit(sol).gamma == sol.gamma


def test_normalize_after_gauge_shift():
    A = builtin("exact-bracket")
    g, sol = _sol("exact-bracket", 3)
    u = A.basis.index("u")
    t0sq = (2,) + (0,) * (sol.params.n - 1)
    x = GradedElement(g.basis, {(u, t0sq, 0): 1}, sol.params, 3)
    shifted = gauge_action(g, sol.gamma, x)
    assert not mc_residual(g, shifted)
    moved = sol.with_gamma(shifted)
    assert not is_unit_normalized(moved)
    fixed = normalize_unit(moved)
    assert is_unit_normalized(fixed) and not mc_residual(g, fixed.gamma)


def test_gauge_rejects_even_parameter():
    A = builtin("exact-bracket")
    g, sol = _sol("exact-bracket", 2)
    t1 = tuple(int(i == 0) for i in range(sol.params.n))
    x = GradedElement(g.basis, {(A.basis.index("x"), t1, 0): 1}, sol.params, 2)
    with pytest.raises(ArgumentError):
        gauge_action(g, sol.gamma, x)


def test_transport_trivial_and_first_order():
    A = builtin("exact-bracket")
    M = dgbv_module(A, hbar=True)
    g, sol = _sol("exact-bracket", 3)
    a = A.e("y").lift(sol.params, 3)
    zero = GradedElement(g.basis, {}, sol.params, 3)
    assert transport(M, zero, a) == a
    got = transport(M, sol.gamma, a).truncate(1)
    want = (a - M.circ_act(sol.gamma, a)).truncate(1)
    assert got == want


def test_conjugation_identity_elliptic():
    A = builtin("torus-n1")
    M = dgbv_module(A, hbar=True)
    g, sol = _sol("torus-n1", 3)
    assert verify_conjugation(M, sol.gamma).passed


def test_conjugation_identity_exact_bracket():
    A = builtin("exact-bracket")
    M = dgbv_module(A, hbar=True)
    g, sol = _sol("exact-bracket", 3)
    assert verify_conjugation(M, sol.gamma).passed


def test_flatness_torus_and_zero():
    A = builtin("torus-n1")
    M = dgbv_module(A)
    g, sol = _sol("torus-n1", 3)
    assert verify_flatness_identities(M, sol.gamma).passed
    zero = GradedElement(g.basis, {}, sol.params, 3)
    assert verify_flatness_identities(M, zero).passed


def test_flatness_detects_dropped_order_two_term():
    A = builtin("exact-bracket")
    M = dgbv_module(A)
    g, sol = _sol("exact-bracket", 3)
    assert verify_flatness_identities(M, sol.gamma).passed
    bad = drop_term(sol.gamma, 2)
    rep = verify_flatness_identities(M, bad)
    assert not rep["[nabla_a, D] = 0"].passed


def test_solve_mc_rejects_order_zero():
    g, _ = _sol("torus-n1", 1)
    with pytest.raises(ArgumentError):
        solve_mc(g, 0)


def test_normalize_requires_unit():
    A = builtin("torus-n1")
    g = DgLieAlgebra.from_dgbv(A)
    g.unit = None
    sol = solve_mc(g, 2)
    with pytest.raises(ConfigurationError):
        normalize_unit(sol)
