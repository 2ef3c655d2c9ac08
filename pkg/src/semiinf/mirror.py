"""
Flat dual torus pairs: the generator-level map φ between the invariant
sectors of X and X̂, its intertwining checks, and the comparison of the
A-pipeline on one side with the B-pipeline on the other.
"""

from fractions import Fraction

from . import linalg
from .deformation import DgLieAlgebra, is_unit_normalized, normalize_unit, solve_mc
from .errors import DomainError, StructuralError
from .frobenius import frobenius
from .kahler_ops import (FORM, POLY, PolySection, _check_metric, build_model_A,
                         build_model_B, determinant)
from .report import Report, record
from .super_core import GradedElement, SuperSeries
from .vhs import build_filtrations, period_map


class FlatTorusPair:
    """X built from a constant metric g on Y, and its dual X̂ with metric g^{-1}."""

    def __init__(self, n, metric):
        G = _check_metric(metric)
        if len(G) != n:
            raise DomainError("metric size does not match n")
        self.n = n
        self.g = G
        self.ginv = linalg.inverse(G)
        ident = [[sum(G[i][k] * self.ginv[k][j] for k in range(n)) for j in range(n)]
                 for i in range(n)]
        if ident != [[Fraction(int(i == j)) for j in range(n)] for i in range(n)]:
            raise StructuralError("metric inverse check failed")
        self.tags = ("X", "Xhat")

    @property
    def dual_metric(self):
        return self.ginv

    def model(self, kind, side):
        """build_model_A/B on X (side 0, metric g) or X̂ (side 1, metric g^{-1})."""
        metric = self.g if side == 0 else self.ginv
        if kind == "A":
            return build_model_A(self.n, metric, hat=bool(side))
        return build_model_B(self.n, metric, hat=bool(side), volume=self.volume(side))

    def volume(self, side):
        """∫ of the ordered top form on the B side: det g, the volume of Y."""
        return determinant(self.g)


def _generator_images(n, ginv, model, corrupt=False):
    zero = (0,) * n
    imgs = []
    for k in range(2 * n):
        if k < n:
            t = {(zero, zero, 1 << k): Fraction(1)}
        else:
            i = k - n
            if corrupt:
                t = {(zero, zero, 1 << (n + i)): Fraction(1)}
            else:
                t = {(zero, zero, 1 << (n + j)): ginv[i][j] for j in range(n) if ginv[i][j]}
        imgs.append(PolySection(n, model, 0, t))
    return imgs


def generator_map(n, ginv, src, dst, corrupt=False):
    """
    Matrix (list of columns) of the multiplicative map that sends the
    holomorphic generator k to k and the antiholomorphic generator i to
    Σ_j g^{ij} (antiholomorphic j).  ``corrupt`` drops the g^{ij} factor.
    """
    imgs = _generator_images(n, ginv, dst.model, corrupt)
    zero = (0,) * n
    cols = []
    for mask in src.masks:
        x = PolySection(n, dst.model, 0, {(zero, zero, 0): Fraction(1)})
        for k in range(2 * n):
            if mask >> k & 1:
                x = x.wedge(imgs[k])
        cols.append(dst.from_section(x))
    return cols


def apply_matrix(cols, vec):
    out = [Fraction(0)] * len(cols[0]) if cols else []
    for j, c in enumerate(vec):
        if c:
            for i, v in enumerate(cols[j]):
                if v:
                    out[i] += c * v
    return out


def phi_map(pair, v, corrupt=False):
    """
    φ on an X-side invariant polyvector (a PolySection or a coefficient
    vector over the X polyvector sector), returned as an X̂ form vector.
    """
    A = build_model_A(pair.n, pair.g)
    B = build_model_B(pair.n, pair.ginv, hat=True)
    src, dst = A.m_sector, B.m_sector
    if isinstance(v, PolySection):
        if v.model != POLY:
            raise DomainError("phi_map takes a polyvector-model section")
        v = src.from_section(v)
    return apply_matrix(generator_map(pair.n, pair.ginv, src, dst, corrupt), v)


class MirrorSetup:
    """One role assignment: the A-pair on one side and the B-pair on the other."""

    def __init__(self, pair, a_side=0, corrupt=False):
        self.pair = pair
        self.a_side = a_side
        self.A = pair.model("A", a_side)
        self.B = pair.model("B", 1 - a_side)
        n = pair.n
        ginv = pair.ginv
        # g-side: forms of the A-side to polyvectors of the B-side
        self.phi_g = generator_map(n, ginv, self.A.g_sector, self.B.g_sector)
        # m-side: polyvectors of the A-side to forms of the B-side
        self.phi_m = generator_map(n, ginv, self.A.m_sector, self.B.m_sector, corrupt)


def _vec(basis, x):
    v = [Fraction(0)] * len(basis)
    for (i, _, _), c in x.terms.items():
        v[i] += c
    return v


def _elem(basis, v):
    return GradedElement.from_vector(basis, v)


def verify_intertwining(pair, a_side=0, corrupt=False):
    """Exhaustive basis checks that φ intertwines every structure map."""
    S = MirrorSetup(pair, a_side, corrupt)
    MA, MB = S.A.structure, S.B.structure
    gA, gB = MA.g_basis, MB.g_basis
    mA, mB = MA.m_basis, MB.m_basis
    rep = Report("phi intertwining (%s on %s)" % ("A", pair.tags[a_side]))
    bij = rep.start("phi bijective")
    record(bij, linalg.rank([list(r) for r in zip(*S.phi_g)]) == len(gB), "g-side")
    record(bij, linalg.rank([list(r) for r in zip(*S.phi_m)]) == len(mB), "m-side")

    def pg(v):
        return apply_matrix(S.phi_g, v)

    def pm(v):
        return apply_matrix(S.phi_m, v)

    def unit(b, i):
        v = [Fraction(0)] * len(b)
        v[i] = Fraction(1)
        return v

    c = rep.start("phi d_g = d_g phi")
    for i in range(len(gA)):
        a = _elem(gA, unit(gA, i))
        record(c, pg(_vec(gA, MA.g_d(a))) == _vec(gB, MB.g_d(_elem(gB, pg(unit(gA, i))))),
               gA.names[i])
    names = ("phi dbar = dbar phi", "phi Q = d phi") if a_side == 0 else \
        ("phi dbar = dbar phi", "phi d = Q phi")
    for k, label in enumerate(names):
        c = rep.start(label)
        for i in range(len(mA)):
            a = _elem(mA, unit(mA, i))
            lhs = pm(_vec(mA, MA.m_d[k](a)))
            rhs = _vec(mB, MB.m_d[k](_elem(mB, pm(unit(mA, i)))))
            record(c, lhs == rhs, mA.names[i])
    cb = rep.start("phi [a•b] = [phi a • phi b]")
    cc = rep.start("phi(a∘x) = phi(a)∘phi(x)")
    cu = rep.start("phi(a•x) = phi(a)•phi(x)")
    for i in range(len(gA)):
        a = _elem(gA, unit(gA, i))
        fa = _elem(gB, pg(unit(gA, i)))
        for j in range(len(gA)):
            b = _elem(gA, unit(gA, j))
            fb = _elem(gB, pg(unit(gA, j)))
            record(cb, pg(_vec(gA, MA.br(a, b))) == _vec(gB, MB.br(fa, fb)),
                   (gA.names[i], gA.names[j]))
        for j in range(len(mA)):
            x = _elem(mA, unit(mA, j))
            fx = _elem(mB, pm(unit(mA, j)))
            record(cc, pm(_vec(mA, MA.circ_act(a, x))) == _vec(mB, MB.circ_act(fa, fx)),
                   (gA.names[i], mA.names[j]))
            record(cu, pm(_vec(mA, MA.act(a, x))) == _vec(mB, MB.act(fa, fx)),
                   (gA.names[i], mA.names[j]))
    ce = rep.start("phi(eta) = eta")
    record(ce, pm(_vec(mA, S.A.eta)) == _vec(mB, S.B.eta), "eta")
    return rep


def run_pipeline(model_pair, N, W=None):
    """solve_mc, unit normalization if needed, period_map, frobenius."""
    g = DgLieAlgebra.from_structure(model_pair.structure, model_pair.unit)
    sol = solve_mc(g, N)
    if not is_unit_normalized(sol):
        sol = normalize_unit(sol)
    P = period_map(model_pair, sol, W)
    return frobenius(P)


def image_filtration(S, W):
    """Ŵ as the φ-image of W (spans given as A-side m vectors)."""
    return {r: [apply_matrix(S.phi_m, v) for v in vs] for r, vs in W.spans.items()}


def _class_matrix(S, solA, solB):
    """C with φ_g(rep_a) = Σ_b C[b][a] rep_b, so t̂ = C t."""
    RB = solB.reps
    cols = []
    for v in solA.reps:
        img = apply_matrix(S.phi_g, v)
        M = [[RB[b][i] for b in range(len(RB))] for i in range(len(img))]
        x = linalg.solve(M, img)
        if x is None:
            raise StructuralError("φ does not map harmonic classes onto harmonic classes")
        cols.append(x)
    return [[cols[a][b] for a in range(len(cols))] for b in range(len(RB))]


def _pullback_series(s, C, params, order):
    k = len(C)
    images = [sum((SuperSeries.var(params, order, a) * C[b][a]
                   for a in range(len(C[b])) if C[b][a]), SuperSeries(params, order))
              for b in range(k)]
    return SuperSeries(params, order, s.substitute(images).terms)


def _first_diff(x, y):
    keys = sorted(set(x.terms) | set(y.terms))
    for m in keys:
        if x.terms.get(m, 0) != y.terms.get(m, 0):
            return (m, str(x.terms.get(m, 0)), str(y.terms.get(m, 0)))
    return None


def verify_mirror_theorem(pair, N, W=None, a_side=0):
    """
    A-pipeline on one side, B-pipeline on the other with Ŵ = φ(W), and
    coefficient-wise comparison of g, A^c_{ab} and Φ after t̂ = C t.
    """
    S = MirrorSetup(pair, a_side)
    F_A, W_A = build_filtrations(S.A, W)
    FA = run_pipeline(S.A, N, (F_A, W_A))
    FB = run_pipeline(S.B, N, image_filtration(S, W_A))
    C = _class_matrix(S, FA.P.sol, FB.P.sol)
    k = FA.params.n
    if FB.params.n != k:
        raise StructuralError("parameter counts differ: %d vs %d" % (k, FB.params.n))
    Cinv = linalg.inverse(C)
    side = pair.tags[a_side]
    rep = Report("mirror: A on %s vs B on %s, N = %d" % (side, pair.tags[1 - a_side], N))
    cm = rep.start("metric g")
    for a in range(k):
        for b in range(k):
            pulled = sum((C[d][a] * C[e][b] * FB.g[d][e] for d in range(k) for e in range(k)
                          if C[d][a] and C[e][b]), Fraction(0))
            record(cm, pulled == FA.g[a][b], (a, b, str(FA.g[a][b]), str(pulled)))
    order = N - 2
    params = FA.params
    pulledA = {}
    for (d, e), coeffs in FB.A.items():
        pulledA[(d, e)] = [_pullback_series(s, C, params, order) for s in coeffs]
    ca = rep.start("structure constants A^c_ab")
    for a in range(k):
        for b in range(k):
            for c in range(k):
                s = SuperSeries(params, order)
                for d in range(k):
                    if not C[d][a]:
                        continue
                    for e in range(k):
                        if not C[e][b]:
                            continue
                        for f in range(k):
                            if Cinv[c][f]:
                                s = s + pulledA[(d, e)][f] * (C[d][a] * C[e][b] * Cinv[c][f])
                diff = _first_diff(FA.A[(a, b)][c], s)
                record(ca, diff is None, (a, b, c, diff))
    cp = rep.start("potential Phi")
    top = FA.phi.order
    phiB = _pullback_series(FB.phi, C, params, top)
    diff = _first_diff(FA.phi, phiB)
    record(cp, diff is None, diff)
    rep.payload = {"A": FA, "B": FB, "C": C}
    return rep
