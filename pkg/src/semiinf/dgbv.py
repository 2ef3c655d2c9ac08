"""
dGBV algebras: axiom checkers, derived bracket, module actions, integral
pairing, cohomology with an explicit contracting homotopy, and Manin's
intersection condition.
"""

from fractions import Fraction
from itertools import product as iproduct

from . import linalg
from .errors import StructuralError, PreconditionError, ConfigurationError
from .report import Report, record
from .super_core import (GradedElement, LinearOp, StructureConstants, bilinear, mul,
                         swap_sign, op_commutator)


def sgn(*parities):
    """(-1)^(sum), routed through the central sign function."""
    return swap_sign(1, sum(parities) % 2)


class DgbvAlgebra:
    """
    Finite-dimensional bigraded dGBV algebra given by structure constants.

    ``d`` must shift bidegree by (0, 1), ``delta`` by (-1, 0).  ``integral``
    is an optional covector, ``eta`` an optional calibration element.
    """

    def __init__(self, name, basis, n, unit, product, d, delta, integral=None, eta=None):
        if not isinstance(product, StructureConstants):
            product = StructureConstants(basis, product)
        if d.basis != basis or delta.basis != basis or product.basis != basis:
            raise StructuralError("operators and product must share the basis")
        self.name = name
        self.basis = basis
        self.n = int(n)
        self.unit = unit if isinstance(unit, int) else basis.index(unit)
        self.product = product
        self.d = d
        self.delta = delta
        self.integral = None if integral is None else [Fraction(c) for c in integral]
        self.eta = eta
        self._bracket = None
        self._bullet = None

    @property
    def dim(self):
        return len(self.basis)

    def e(self, i):
        if isinstance(i, str):
            i = self.basis.index(i)
        return GradedElement.basis_vector(self.basis, i)

    def one(self):
        return self.e(self.unit)

    def elem(self, d):
        return GradedElement.from_dict(self.basis, d)

    def mul(self, a, b):
        return mul(a, b, self.product)

    def parity(self, i):
        return self.basis.parities[i]

    # basis-level tables for the derived operations
    def bracket_table(self):
        if self._bracket is None:
            tab = {}
            for i in range(self.dim):
                for j in range(self.dim):
                    v = _bracket_plain(self, self.e(i), self.e(j), self.parity(i))
                    if v:
                        tab[(i, j)] = {k: c for (k, _, _), c in v.terms.items()}
            self._bracket = tab
        return self._bracket

    def bullet_table(self):
        if self._bullet is None:
            tab = {}
            for i in range(self.dim):
                for j in range(self.dim):
                    v = _bullet_plain(self, self.e(i), self.e(j), self.parity(i))
                    if v:
                        tab[(i, j)] = {k: c for (k, _, _), c in v.terms.items()}
            self._bullet = tab
        return self._bullet

    def __repr__(self):
        return "DgbvAlgebra(%s, dim=%d, n=%d)" % (self.name, self.dim, self.n)


def _bracket_plain(A, a, b, pa):
    s = sgn(pa)
    D = A.delta
    return D(A.mul(a, b)) * s - A.mul(D(a), b) * s - A.mul(a, D(b))


def _bullet_plain(A, a, b, pa):
    # -[l_a, Delta] b = -(a Delta b - (-1)^a Delta(a b))
    return A.delta(A.mul(a, b)) * sgn(pa) - A.mul(a, A.delta(b))


def _check_basis(A, *xs):
    for x in xs:
        if x.basis != A.basis:
            raise StructuralError("element is not over the algebra's basis")


def derived_bracket(A, a, b):
    """[a•b] = (-1)^a Δ(a∘b) - (-1)^a Δ(a)∘b - a∘Δ(b), extended to series."""
    _check_basis(A, a, b)
    tab = A.bracket_table()
    return bilinear(a, b, lambda i, j: tab.get((i, j)), op_parity=1)


def bullet_action(A, a, b):
    """a•b = -[l_a, Δ] b."""
    _check_basis(A, a, b)
    tab = A.bullet_table()
    return bilinear(a, b, lambda i, j: tab.get((i, j)), op_parity=1)


def pairing_from_integral(A, a, b):
    if A.integral is None:
        raise ConfigurationError("algebra %s carries no integral" % A.name)
    return integrate(A, A.mul(a, b))


def integrate(A, x):
    if A.integral is None:
        raise ConfigurationError("algebra %s carries no integral" % A.name)
    return sum((A.integral[i] * c for (i, m, nu), c in x.terms.items()), Fraction(0))


# ------------------------------------------------------------ axioms

def _names(A, *idx):
    return tuple(A.basis.names[i] for i in idx)


def check_dgbv_axioms(A):
    """Exhaustive check of the dGBV axioms; failures carry witnesses."""
    rep = Report("dgbv axioms: %s" % A.name)
    B = A.basis
    n = A.dim
    e = [A.e(i) for i in range(n)]
    par = B.parities

    rep.add("d bidegree (0,1)", A.d.shift == (0, 1) and not A.d.shift_violations(),
            A.d.shift_violations()[:1] or (None if A.d.shift == (0, 1) else A.d.shift))
    rep.add("delta bidegree (-1,0)", A.delta.shift == (-1, 0) and not A.delta.shift_violations(),
            A.delta.shift_violations()[:1] or (None if A.delta.shift == (-1, 0) else A.delta.shift))
    rep.add("d^2 = 0", A.d.compose(A.d).is_zero())
    rep.add("delta^2 = 0", A.delta.compose(A.delta).is_zero())
    rep.add("d delta + delta d = 0", op_commutator(A.d, A.delta).is_zero())
    rep.add("delta(1) = 0", not A.delta(A.one()), A.delta(A.one()).to_str() or None)

    unit = rep.start("unit law")
    grade = rep.start("product bidegree (0,0)")
    comm = rep.start("supercommutativity")
    for i in range(n):
        record(unit, A.mul(A.one(), e[i]) == e[i] and A.mul(e[i], A.one()) == e[i], _names(A, i))
        for j in range(n):
            ab = A.mul(e[i], e[j])
            ba = A.mul(e[j], e[i])
            record(comm, ab == ba * swap_sign(par[i], par[j]), _names(A, i, j))
            want = (B.bidegrees[i][0] + B.bidegrees[j][0], B.bidegrees[i][1] + B.bidegrees[j][1])
            record(grade, all(B.bidegrees[k] == want for (k, _, _) in ab.terms), _names(A, i, j))

    assoc = rep.start("associativity")
    order2 = rep.start("delta order-2 identity")
    dder = rep.start("d derivation")
    D = A.delta
    for i in range(n):
        for j in range(n):
            eij = A.mul(e[i], e[j])
            lhs = A.d(eij)
            rhs = A.mul(A.d(e[i]), e[j]) + A.mul(e[i], A.d(e[j])) * sgn(par[i])
            record(dder, lhs == rhs, _names(A, i, j))
            if not eij:
                # associativity still needs the other bracketing
                pass
            for k in range(n):
                left = A.mul(eij, e[k])
                right = A.mul(e[i], A.mul(e[j], e[k]))
                record(assoc, left == right, _names(A, i, j, k))
                a, b, c = e[i], e[j], e[k]
                pa, pb, pc = par[i], par[j], par[k]
                lhs = D(left)
                rhs = (A.mul(D(eij), c)
                       + A.mul(b, D(A.mul(a, c))) * sgn(pb * (pa + 1))
                       + A.mul(a, D(A.mul(b, c))) * sgn(pa)
                       - A.mul(A.mul(D(a), b), c)
                       - A.mul(A.mul(a, D(b)), c) * sgn(pa)
                       - A.mul(eij, D(c)) * sgn(pa + pb))
                record(order2, lhs == rhs, _names(A, i, j, k))

    if A.integral is not None:
        ia = rep.start("integral: d adjoint")
        ib = rep.start("integral: delta adjoint")
        for i in range(n):
            for j in range(n):
                l1 = pairing_from_integral(A, A.d(e[i]), e[j])
                r1 = -sgn(par[i]) * pairing_from_integral(A, e[i], A.d(e[j]))
                record(ia, l1 == r1, _names(A, i, j))
                l2 = pairing_from_integral(A, A.delta(e[i]), e[j])
                r2 = sgn(par[i]) * pairing_from_integral(A, e[i], A.delta(e[j]))
                record(ib, l2 == r2, _names(A, i, j))
    return rep


def check_odd_lie(basis, bracket, differential, product=None, label=""):
    """
    Exhaustive check of the odd Lie superalgebra axioms for a basis-level
    ``bracket(i, j) -> {k: c}`` and a differential ``LinearOp``; with a
    ``product`` (StructureConstants) also the odd Poisson identity.
    """
    rep = Report("odd lie" + (": " + label if label else ""))
    n = len(basis)
    par = basis.parities
    e = [GradedElement.basis_vector(basis, i) for i in range(n)]

    def br(x, y):
        return bilinear(x, y, bracket, op_parity=1)

    names = basis.names
    rep.add("(a) d^2 = 0", differential.compose(differential).is_zero())
    anti = rep.start("(b) antisymmetry")
    leib = rep.start("(c) d Leibniz")
    tab = {}
    for i in range(n):
        for j in range(n):
            tab[i, j] = br(e[i], e[j])
    for i in range(n):
        for j in range(n):
            record(anti, tab[i, j] == tab[j, i] * -sgn((par[i] + 1) * (par[j] + 1)),
                   (names[i], names[j]))
            lhs = differential(tab[i, j])
            rhs = br(differential(e[i]), e[j]) - br(e[i], differential(e[j])) * sgn(par[i])
            record(leib, lhs == rhs, (names[i], names[j]))
    jac = rep.start("(d) Jacobi")
    for i in range(n):
        for j in range(n):
            for k in range(n):
                lhs = br(e[i], tab[j, k])
                rhs = br(tab[i, j], e[k]) + br(e[j], tab[i, k]) * sgn((par[i] + 1) * (par[j] + 1))
                record(jac, lhs == rhs, (names[i], names[j], names[k]))
    if product is not None:
        pois = rep.start("odd Poisson identity")
        for i in range(n):
            for j in range(n):
                for k in range(n):
                    lhs = br(e[i], mul(e[j], e[k], product))
                    rhs = (mul(tab[i, j], e[k], product)
                           + mul(e[j], tab[i, k], product) * sgn((par[i] + 1) * par[j]))
                    record(pois, lhs == rhs, (names[i], names[j], names[k]))
    return rep


def check_lie_axioms(A):
    """Both (A,[•],d) and (A,[•],Δ) with the Poisson identity."""
    tab = A.bracket_table()
    f = lambda i, j: tab.get((i, j))
    rep = Report("derived bracket: %s" % A.name)
    rep.extend(check_odd_lie(A.basis, f, A.d, A.product), "d: ")
    rep.extend(check_odd_lie(A.basis, f, A.delta), "delta: ")
    return rep


# -------------------------------------------------------- module pairs

class ModuleStructure:
    """
    A dg Lie algebra g acting on a module m with a compatible even ∘-map.

    Tables are callables ``(i, j) -> {k: c}`` on basis indices.  The
    module differential is a list of ``LinearOp`` (each may carry an hbar
    shift); ``circ_nu`` is the nu-power attached to ∘ (``-2`` for ħ^{-1}∘).
    """

    def __init__(self, g_basis, bracket, g_d, m_basis, bullet, circ, m_d,
                 circ_nu=0, label=""):
        self.g_basis = g_basis
        self.bracket = bracket
        self.g_d = g_d
        self.m_basis = m_basis
        self.bullet = bullet
        self.circ = circ
        self.m_d = list(m_d)
        self.circ_nu = circ_nu
        self.label = label

    def br(self, x, y):
        return bilinear(x, y, self.bracket, op_parity=1)

    def act(self, k, a):
        return bilinear(k, a, self.bullet, op_parity=1, out_basis=self.m_basis)

    def circ_act(self, k, a):
        return bilinear(k, a, self.circ, op_parity=0, nu_shift=self.circ_nu,
                        out_basis=self.m_basis)

    def dm(self, a):
        out = GradedElement(self.m_basis, {}, a.params, a.order)
        for op in self.m_d:
            out = out + op(a)
        return out


def dgbv_module(A, hbar=False):
    """(A,[•],d) acting on (A, •, ∘, d+Δ), or its ħ-extension."""
    br = A.bracket_table()
    bu = A.bullet_table()
    pr = A.product.table
    if hbar:
        dl = LinearOp(A.basis, A.delta.cols, A.delta.shift, A.delta.parity, nu_shift=2)
        return ModuleStructure(A.basis, lambda i, j: br.get((i, j)), A.d, A.basis,
                               lambda i, j: bu.get((i, j)), lambda i, j: pr.get((i, j)),
                               [A.d, dl], circ_nu=-2, label=A.name + " (hbar)")
    return ModuleStructure(A.basis, lambda i, j: br.get((i, j)), A.d, A.basis,
                           lambda i, j: bu.get((i, j)), lambda i, j: pr.get((i, j)),
                           [A.d, A.delta], label=A.name)


def check_module_axioms(M):
    """Exhaustive check of the dg-module and ∘-compatibility identities."""
    rep = Report("module axioms" + (": " + M.label if M.label else ""))
    gb, mb = M.g_basis, M.m_basis
    ge = [GradedElement.basis_vector(gb, i) for i in range(len(gb))]
    me = [GradedElement.basis_vector(mb, i) for i in range(len(mb))]
    gp, mp = gb.parities, mb.parities
    gn, mn = gb.names, mb.names

    sq = rep.start("d_m^2 = 0")
    for a in range(len(mb)):
        record(sq, not M.dm(M.dm(me[a])), mn[a])

    leib = rep.start("d_m(k•a) Leibniz")
    circd = rep.start("d_m(k∘a) compatibility")
    for k in range(len(gb)):
        dk = M.g_d(ge[k])
        for a in range(len(mb)):
            lhs = M.dm(M.act(ge[k], me[a]))
            rhs = M.act(dk, me[a]) - M.act(ge[k], M.dm(me[a])) * sgn(gp[k])
            record(leib, lhs == rhs, (gn[k], mn[a]))
            lhs = M.dm(M.circ_act(ge[k], me[a]))
            rhs = (M.circ_act(dk, me[a]) + M.circ_act(ge[k], M.dm(me[a])) * sgn(gp[k])
                   + M.act(ge[k], me[a]) * sgn(gp[k]))
            record(circd, lhs == rhs, (gn[k], mn[a]))

    lie = rep.start("Lie module identity")
    mixed = rep.start("∘/• exchange identity")
    cc = rep.start("∘ supercommutation")
    for k1 in range(len(gb)):
        for k2 in range(len(gb)):
            b12 = M.br(ge[k1], ge[k2])
            p1, p2 = gp[k1], gp[k2]
            for a in range(len(mb)):
                x = me[a]
                lhs = (M.act(ge[k1], M.act(ge[k2], x))
                       - M.act(ge[k2], M.act(ge[k1], x)) * sgn((p1 + 1) * (p2 + 1)))
                record(lie, lhs == M.act(b12, x), (gn[k1], gn[k2], mn[a]))
                lhs = (M.circ_act(ge[k1], M.act(ge[k2], x))
                       - M.act(ge[k2], M.circ_act(ge[k1], x)) * sgn(p1 * p2 + p1))
                record(mixed, lhs == M.circ_act(b12, x) * -sgn(p2), (gn[k1], gn[k2], mn[a]))
                lhs = M.circ_act(ge[k1], M.circ_act(ge[k2], x))
                rhs = M.circ_act(ge[k2], M.circ_act(ge[k1], x)) * sgn(p1 * p2)
                record(cc, lhs == rhs, (gn[k1], gn[k2], mn[a]))
    return rep


# ------------------------------------------------------------ cohomology

class CohomologyData:
    """
    Splitting V = im ⊕ H ⊕ C of a square-zero operator with projection
    ``pi`` onto the harmonic block and homotopy ``h`` (d h + h d = id - pi).
    """

    def __init__(self, op, reps, pi, h, image, coker_cols):
        self.op = op
        self.reps = reps
        self.pi = pi
        self.h = h
        self.image = image
        self.coker_cols = coker_cols

    @property
    def dim(self):
        return len(self.reps)

    def rep_elements(self):
        return [GradedElement.from_vector(self.op.basis, v) for v in self.reps]

    def coordinates(self, x):
        """Coefficients of the harmonic part of a plain vector in the rep basis."""
        return [sum((r * c for r, c in zip(row, x)), Fraction(0)) for row in self._hcoord]

    def __repr__(self):
        return "CohomologyData(dim H = %d)" % self.dim


def cohomology(op):
    """Harmonic representatives, projection and homotopy for ``op``."""
    basis = op.basis
    n = len(basis)
    if not op.compose(op).is_zero():
        raise PreconditionError("operator does not square to zero")
    M = op.matrix()
    cols = [[M[i][j] for i in range(n)] for j in range(n)]
    image, idx = linalg.column_space_basis(cols)
    reps = []
    span = list(image)
    for v in linalg.nullspace(M, n):
        if not linalg.in_span(span, v):
            span.append(v)
            reps.append(v)
    coker = []
    for j in idx:
        v = [Fraction(0)] * n
        v[j] = Fraction(1)
        coker.append(v)
    frame = image + reps + coker
    if len(frame) != n:
        raise StructuralError("splitting failed: %d != %d" % (len(frame), n))
    T = linalg.transpose(frame)
    Tinv = linalg.inverse(T)
    r, hd = len(image), len(reps)
    # pi = T P Tinv, with P the identity on the harmonic block
    pi_cols, h_cols = {}, {}
    for j in range(n):
        coords = [Tinv[k][j] for k in range(n)]
        pv, hv = {}, {}
        for k in range(r, r + hd):
            c = coords[k]
            if c:
                for i, x in enumerate(frame[k]):
                    if x:
                        pv[i] = pv.get(i, 0) + c * x
        for k in range(r):
            c = coords[k]
            if c:
                jj = idx[k]
                hv[jj] = hv.get(jj, 0) + c
        pi_cols[j] = pv
        h_cols[j] = hv
    pi = LinearOp(basis, pi_cols, (0, 0), 0)
    h = LinearOp(basis, h_cols, (-op.shift[0], -op.shift[1]), op.parity)
    data = CohomologyData(op, reps, pi, h, image, idx)
    data._hcoord = [Tinv[k] for k in range(r, r + hd)]
    return data


def check_homotopy(data):
    d, h, pi = data.op, data.h, data.pi
    lhs = d.compose(h) + h.compose(d)
    rhs = LinearOp.identity(d.basis) - pi
    return lhs.matrix() == rhs.matrix()


# ----------------------------------------------------------------- Manin

class ManinReport:
    def __init__(self, im_d_ker_delta, im_delta_ker_d, im_d_im_delta, verdict, witness):
        self.im_d_ker_delta = im_d_ker_delta
        self.im_delta_ker_d = im_delta_ker_d
        self.im_d_im_delta = im_d_im_delta
        self.verdict = verdict
        self.witness = witness

    def dims(self):
        return (len(self.im_d_ker_delta), len(self.im_delta_ker_d), len(self.im_d_im_delta))

    def __repr__(self):
        return "ManinReport(dims=%r, verdict=%s)" % (self.dims(), self.verdict)


def _image(M, n):
    cols = [[M[i][j] for i in range(n)] for j in range(n)]
    return linalg.column_space_basis(cols)[0]


def check_manin(A):
    n = A.dim
    Md, MD = A.d.matrix(), A.delta.matrix()
    im_d, im_D = _image(Md, n), _image(MD, n)
    ker_d, ker_D = linalg.nullspace(Md, n), linalg.nullspace(MD, n)
    s1 = linalg.intersect(im_d, ker_D, n)
    s2 = linalg.intersect(im_D, ker_d, n)
    s3 = linalg.intersect(im_d, im_D, n)
    witness = None
    for S, T in ((s1, s2), (s2, s1), (s1, s3), (s3, s1), (s2, s3), (s3, s2)):
        for v in S:
            if not linalg.in_span(T, v):
                witness = v
                break
        if witness is not None:
            break
    return ManinReport(s1, s2, s3, witness is None, witness)


def manin_cohomology_dims(A):
    """(dim H(A,d), dim H(A,Δ), dim (Ker d ∩ Ker Δ)/Im dΔ)."""
    n = A.dim
    hd = cohomology(A.d).dim
    hD = cohomology(A.delta).dim
    kk = linalg.intersect(linalg.nullspace(A.d.matrix(), n), linalg.nullspace(A.delta.matrix(), n), n)
    idd = _image(A.d.compose(A.delta).matrix(), n)
    return hd, hD, len(kk) - len(idd)
