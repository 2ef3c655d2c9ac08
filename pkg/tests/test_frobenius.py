import copy
from fractions import Fraction

import pytest

from oracles import Superpoly, cup_cubic, cup_metric, words_from_names
from semiinf.deformation import DgLieAlgebra, solve_mc
from semiinf.frobenius import cubic_coefficients, eta_weight, frobenius, verify_frobenius
from semiinf.kahler_ops import build_model_A, build_model_B, dgbv_pair
from semiinf.mirror import run_pipeline
from semiinf.models import builtin
from semiinf.super_core import SuperSeries
from semiinf.vhs import period_map

ALL = ("unit: A^c_0b = delta", "A_abc supersymmetric", "potential: d^3 Phi = A_abc",
       "d^3 Phi / dt0 dtb dtc = g_bc", "flatness dA^c_ab/dt^d symmetric", "WDVV",
       "g supersymmetric", "g constant and hbar-independent", "L_E(∘) = ∘")


@pytest.fixture(scope="module")
def torus_A1():
    return run_pipeline(build_model_A(1, [[1]]), 3)


def class_words(F):
    basis = F.P.pair.g_basis
    names = []
    for v in F.P.sol.reps:
        nz = [i for i, c in enumerate(v) if c]
        assert len(nz) == 1 and v[nz[0]] == 1
        names.append(basis.names[nz[0]])
    return words_from_names(names), basis.names[-1].split("*")


def test_all_checks_pass(torus_A1):
    rep = torus_A1.report
    assert rep.passed, rep.failures()
    for name in ALL + ("L_E g = (2-n) g",):
        assert rep[name].passed


def test_unit_row(torus_A1):
    F = torus_A1
    k = F.params.n
    for b in range(k):
        for c in range(k):
            want = SuperSeries.const(F.params, F.A[(0, b)][c].order, int(b == c))
            assert F.A[(0, b)][c] == want


def test_structure_constants_at_origin_are_cup_products(torus_A1):
    F = torus_A1
    words, top = class_words(F)
    gens = ["dz1", "dzbar1"]
    P = Superpoly(gens, [1, 1])
    k = len(words)
    for a in range(k):
        for b in range(k):
            prod = P.word(words[a]) * P.word(words[b])
            for c in range(k):
                cw = P.word(words[c])
                (key, sign), = cw.terms.items()
                want = prod.terms.get(key, 0) * sign
                assert F.A[(a, b)][c].coeff(F.params.one) == want


def test_abelian_structure_constants_are_constant(torus_A1):
    F = torus_A1
    for coeffs in F.A.values():
        for s in coeffs:
            assert all(not any(m) for m in s.terms)


def test_metric_against_cup_oracle(torus_A1):
    F = torus_A1
    words, top = class_words(F)
    G = cup_metric(["dz1", "dzbar1"], words, top, F.g[0][-1])
    assert F.g == G
    assert F.g[0][3] == -1
    from semiinf import linalg
    assert linalg.rank(F.g) == 4


def test_potential_is_cup_cubic(torus_A1):
    F = torus_A1
    words, top = class_words(F)
    want = cup_cubic(["dz1", "dzbar1"], words, top, F.g[0][-1])
    assert dict(F.phi.terms) == want
    assert cubic_coefficients(F.phi) == want
    assert want == {(2, 0, 0, 1): Fraction(-1, 2), (1, 1, 1, 0): 1}


def test_potential_has_no_low_degree_terms(torus_A1):
    assert all(sum(m) >= 3 for m in torus_A1.phi.terms)


def test_euler_field_n1(torus_A1):
    E = torus_A1.E
    p = torus_A1.params
    assert eta_weight(torus_A1.P) == 0
    assert [dict(e.terms) for e in E] == [{p.var(0): 1}, {p.var(1): Fraction(1, 2)},
                                          {p.var(2): Fraction(1, 2)}, {}]


def test_model_B_n1_passes():
    F = run_pipeline(build_model_B(1, [[1]]), 3)
    assert F.report.passed, F.report.failures()


def test_dgbv_route_passes_with_weighted_eta():
    pair = dgbv_pair(builtin("torus-n1"))
    F = run_pipeline(pair, 3)
    assert eta_weight(F.P) == 1
    assert F.report.passed, F.report.failures()
    assert F.report["L_E g = (2-n+w) g"].passed


def test_tilted_W_is_complementary_but_not_isotropic():
    from semiinf.errors import ValidationError
    from semiinf.vhs import HodgeFiltration, build_filtrations, default_spans
    pair = build_model_A(1, [[1]])
    b = pair.m_basis
    spans = default_spans(HodgeFiltration(pair))
    v = [0] * len(b)
    v[b.index("psibar1")] = v[b.index("psi1")] = 1
    spans[Fraction(1, 2)] = [v]
    F, W = build_filtrations(pair, spans)
    assert W.complementary and not W.isotropic
    with pytest.raises(ValidationError):
        build_filtrations(pair, spans, require_isotropic=True)


def test_mutated_structure_constant_breaks_wdvv(torus_A1):
    F = copy.copy(torus_A1)
    F.A = {k: list(v) for k, v in torus_A1.A.items()}
    s = F.A[(1, 2)][3]
    F.A[(1, 2)][3] = s + SuperSeries.const(F.params, s.order, 1)
    rep = verify_frobenius(F)
    assert not rep["WDVV"].passed
    assert rep["WDVV"].witness == ("t1", "t0", "t2", "t3")
