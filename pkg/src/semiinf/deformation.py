"""
Order-by-order Maurer–Cartan solver over k[t]/m^{N+1}, gauge action,
unit normalization, the e^{-Γ∘} transport and the flatness checks.
"""

from fractions import Fraction

from . import linalg
from .dgbv import ModuleStructure, check_odd_lie, cohomology
from .errors import ArgumentError, ConfigurationError, StructuralError
from .report import Report, record
from .super_core import GradedElement, ParamSpace, bilinear, swap_sign


class DgLieAlgebra:
    """Odd dg Lie algebra: basis, bracket table ``(i, j) -> {k: c}``, d, unit lift."""

    def __init__(self, basis, bracket, d, unit=None, name=""):
        self.basis = basis
        self.bracket = bracket
        self.d = d
        self.unit = unit
        self.name = name

    @classmethod
    def from_dgbv(cls, A):
        tab = A.bracket_table()
        return cls(A.basis, lambda i, j: tab.get((i, j)), A.d, A.unit, A.name)

    @classmethod
    def from_structure(cls, M, unit=None, name=""):
        return cls(M.g_basis, M.bracket, M.g_d, unit, name or M.label)

    def br(self, x, y):
        return bilinear(x, y, self.bracket, op_parity=1)

    def check(self):
        return check_odd_lie(self.basis, self.bracket, self.d, label=self.name)


class MCSolution:
    """Truncated versal solution Γ(t) with its splitting and obstruction list."""

    def __init__(self, g, params, order, gamma, reps, splitting, obstructions):
        self.g = g
        self.params = params
        self.order = order
        self.gamma = gamma
        self.reps = reps
        self.splitting = splitting
        self.obstructions = obstructions

    @property
    def unobstructed(self):
        return not self.obstructions

    def with_gamma(self, gamma):
        return MCSolution(self.g, self.params, self.order, gamma, self.reps,
                          self.splitting, self.obstructions)

    def __repr__(self):
        return "MCSolution(order=%d, params=%d, obstructions=%d)" % (
            self.order, self.params.n, len(self.obstructions))


def harmonic_basis(g, data=None):
    """
    Harmonic representatives with the unit class moved to the front.

    The representative replacing the first one with a nonzero unit
    coordinate is the harmonic projection of the unit itself, so the
    splitting (π, h) is unchanged.
    """
    data = data or cohomology(g.d)
    reps = [list(v) for v in data.reps]
    if g.unit is not None and reps:
        u = [Fraction(0)] * len(g.basis)
        u[g.unit] = Fraction(1)
        coords = data.coordinates(u)
        k = next((i for i, c in enumerate(coords) if c), None)
        if k is not None:
            pu = data.pi(GradedElement.from_vector(g.basis, u)).vector()
            del reps[k]
            reps.insert(0, pu)
    return reps, data


def rep_parity(basis, v):
    ps = {basis.parities[i] for i, c in enumerate(v) if c}
    if len(ps) != 1:
        raise StructuralError("harmonic representative of mixed parity")
    return ps.pop()


def param_space(basis, reps, prefix="t"):
    return ParamSpace(["%s%d" % (prefix, a) for a in range(len(reps))],
                      [rep_parity(basis, v) for v in reps])


def linear_part(basis, params, reps, order):
    terms = {}
    for a, v in enumerate(reps):
        m = params.var(a)
        for i, c in enumerate(v):
            if c:
                terms[(i, m, 0)] = c
    return GradedElement(basis, terms, params, order)


def mc_residual(g, gamma):
    """dΓ + ½[Γ•Γ], exact and truncated at Γ's order."""
    return g.d(gamma) + g.br(gamma, gamma) * Fraction(1, 2)


def solve_mc(g, N, data=None):
    """
    Versal solution Γ = Γ₁ + Γ₂ + … up to order N.  At order k the harmonic
    part of the quadratic term is recorded as an obstruction and the rest
    is killed by Γ_k = -h(Q_k).
    """
    if N < 1:
        raise ArgumentError("order N must be >= 1")
    reps, data = harmonic_basis(g, data)
    params = param_space(g.basis, reps)
    gamma = linear_part(g.basis, params, reps, N)
    obstructions = []
    for k in range(2, N + 1):
        q = (g.br(gamma, gamma) * Fraction(1, 2)).homogeneous(k)
        obs = data.pi(q)
        if obs:
            obstructions.append((k, obs))
        gamma = gamma - data.h(q)
    return MCSolution(g, params, N, gamma, reps, data, obstructions)


def ad_exp_terms(g, x, y, order):
    """[e^{ad_x} y] and [(e^{ad_x}-1)/ad_x] y as truncated series."""
    e = y
    f = y
    cur = y
    k = 1
    fact = Fraction(1)
    while True:
        cur = g.br(x, cur)
        if not cur:
            break
        fact *= k
        e = e + cur * (1 / fact)
        f = f + cur * (1 / (fact * (k + 1)))
        k += 1
        if k > order + 1:
            break
    return e, f


def gauge_action(g, gamma, x):
    """Γ^x = e^{ad_x}Γ - ((e^{ad_x}-1)/ad_x) dx for x of odd total parity."""
    if x and x.parity() != 1:
        raise ArgumentError("gauge parameter must have odd total parity")
    if any(not any(m) for (_, m, _) in x.terms):
        raise ArgumentError("gauge parameter must lie in the maximal ideal")
    order = gamma.order
    e, _ = ad_exp_terms(g, x, gamma, order)
    _, f = ad_exp_terms(g, x, g.d(x), order)
    return e - f


def _unit_derivative_defect(sol, gamma):
    g = sol.g
    one = GradedElement.basis_vector(g.basis, g.unit).lift(sol.params, sol.order)
    return gamma.deriv(0) - one


def _integrate_t0(x, params, order):
    """Antiderivative in the even parameter t0 (t0 is leftmost)."""
    t = {}
    for (i, m, nu), c in x.terms.items():
        m2 = (m[0] + 1,) + tuple(m[1:])
        if sum(m2) <= order:
            t[(i, m2, nu)] = c / m2[0]
    return GradedElement(x.basis, t, params, order)


def normalize_unit(sol):
    """Gauge-equivalent solution with ∂Γ/∂t⁰ = 1 exactly."""
    g = sol.g
    if g.unit is None:
        raise ConfigurationError("no unit lift declared")
    u = [Fraction(0)] * len(g.basis)
    u[g.unit] = Fraction(1)
    if not sol.reps or sol.reps[0] != u or sol.params.parities[0]:
        raise ConfigurationError("the unit class is not the t0 direction")
    data = sol.splitting
    gamma = sol.gamma
    for j in range(0, sol.order):
        delta = _unit_derivative_defect(sol, gamma)
        low = [k for k in range(j + 1) if delta.homogeneous(k)]
        if not low:
            continue
        dj = delta.homogeneous(low[0])
        if data.pi(dj):
            raise ConfigurationError("unit-direction defect is not exact at order %d" % low[0])
        y = data.h(dj)
        gamma = gauge_action(g, gamma, _integrate_t0(y, sol.params, sol.order))
    if _unit_derivative_defect(sol, gamma):
        raise ConfigurationError("normalization did not converge")
    return sol.with_gamma(gamma)


def is_unit_normalized(sol):
    return not _unit_derivative_defect(sol, sol.gamma)


# ------------------------------------------------------------ transport

def circ_apply(M, gamma, a):
    return M.circ_act(gamma, a)


def transport(M, gamma, a, sign=-1):
    """Σ_k (sign)^k (Γ∘)^k a / k!, i.e. e^{-Γ∘}a by default."""
    order = gamma.order
    if a.params is None:
        a = a.lift(gamma.params, order)
    out = a
    cur = a
    k = 1
    while k <= order:
        cur = M.circ_act(gamma, cur) * Fraction(sign, k)
        if not cur:
            break
        out = out + cur
        k += 1
    return out


def twisted_differential(M, gamma, a):
    """D^Γ a = d_m a + Γ•a."""
    if a.params is None:
        a = a.lift(gamma.params, gamma.order)
    return M.dm(a) + M.act(gamma, a)


def covariant_derivative(M, gamma, b, a):
    """∇_b a = ∂_b a + (∂_bΓ)∘a."""
    if a.params is None:
        a = a.lift(gamma.params, gamma.order)
    return a.deriv(b).truncate(gamma.order - 1) + M.circ_act(gamma.deriv(b), a).truncate(gamma.order - 1)


def verify_conjugation(M, gamma, vectors=None):
    """e^{-Γ∘}(d_m)e^{Γ∘} = D^Γ on module basis vectors."""
    rep = Report("conjugation identity")
    c = rep.start("e^{-G∘} d e^{G∘} = D^G")
    mb = M.m_basis
    idx = range(len(mb)) if vectors is None else vectors
    for i in idx:
        a = GradedElement.basis_vector(mb, i).lift(gamma.params, gamma.order)
        lhs = transport(M, gamma, M.dm(transport(M, gamma, a, sign=1)), sign=-1)
        record(c, lhs == twisted_differential(M, gamma, a), mb.names[i])
    return rep


def verify_flatness_identities(M, gamma, params=None):
    """[∇_a, ∇_b] = 0 and [∇_a, D^Γ] = 0 mod m^N on module basis vectors."""
    params = params or gamma.params
    rep = Report("flatness")
    cab = rep.start("[nabla_a, nabla_b] = 0")
    cad = rep.start("[nabla_a, D] = 0")
    mb = M.m_basis
    N = gamma.order
    par = params.parities
    for i in range(len(mb)):
        x = GradedElement.basis_vector(mb, i).lift(params, N)
        Dx = twisted_differential(M, gamma, x)
        nab = [covariant_derivative(M, gamma, a, x) for a in range(params.n)]
        for a in range(params.n):
            lhs = (covariant_derivative(M, gamma, a, Dx)
                   - twisted_differential(M, gamma, nab[a]) * swap_sign(par[a], 1))
            record(cad, not lhs.truncate(N - 1), (params.names[a], mb.names[i]))
            for b in range(params.n):
                lhs = (covariant_derivative(M, gamma, a, nab[b])
                       - covariant_derivative(M, gamma, b, nab[a]) * swap_sign(par[a], par[b]))
                record(cab, not lhs.truncate(N - 2), (params.names[a], params.names[b], mb.names[i]))
    return rep


def drop_term(gamma, order, index=0):
    """Remove one coefficient of the given order (mutation helper)."""
    keys = sorted(k for k in gamma.terms if sum(k[1]) == order)
    if not keys:
        raise ArgumentError("no term of order %d" % order)
    t = dict(gamma.terms)
    del t[keys[index]]
    return GradedElement(gamma.basis, t, gamma.params, gamma.order)
