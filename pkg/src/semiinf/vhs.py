"""
Semi-infinite variation of Hodge structure: l_ħ, the Hodge filtration F,
an opposite filtration W, the splitting L₀ ⊕ L_W and the period map Ψ^W
with its flat coordinates.

Everything is stored in integer powers of ν = ħ^{1/2}.  An element ν^m e of
the module lives at level ``m``; the level of l_ħ(e) is the weight
n + q - p of e.  At level m the splitting H = F^{≥r} ⊕ W_{≤r} is used with
r = (n - m)/2.
"""

from fractions import Fraction

from . import linalg
from .deformation import transport
from .errors import (ArgumentError, InversionError, PreconditionError, StructuralError,
                     ValidationError, WindowError)
from .report import Report, record
from .super_core import GradedElement, HbarLaurent, SuperSeries, series_invert_map


def _half(x):
    return Fraction(x, 2)


def default_window(N, n):
    w = 2 * (N + n + 1)
    return (-w, w)


def l_hbar(pair, a, inverse=False):
    """Multiply each basis component by ν^{±(n+q-p)}."""
    w = pair.weights
    s = -1 if inverse else 1
    return GradedElement(a.basis, {(i, m, nu + s * w[i]): c for (i, m, nu), c in a.terms.items()},
                         a.params, a.order)


def pq_difference(pair, i):
    p, q = pair.m_basis.bidegrees[i]
    return p - q


class HodgeFiltration:
    """F^{≥r} = span of classes with p - q ≥ 2r and p - q ≡ 2r (mod 2)."""

    def __init__(self, pair):
        self.pair = pair
        diffs = [pq_difference(pair, i) for i in range(len(pair.m_basis))]
        self.diffs = diffs
        self.lo = _half(min(diffs)) if diffs else Fraction(0)
        self.hi = _half(max(diffs)) if diffs else Fraction(0)

    def sector(self, r):
        two_r = int(2 * r)
        return [i for i, d in enumerate(self.diffs) if (d - two_r) % 2 == 0]

    def classes(self, r):
        two_r = int(2 * r)
        return [i for i, d in enumerate(self.diffs) if (d - two_r) % 2 == 0 and d >= two_r]

    def levels(self):
        out = []
        r = self.lo - 1
        while r <= self.hi + 1:
            out.append(r)
            r += Fraction(1, 2)
        return out

    def to_dict(self):
        names = self.pair.m_basis.names
        return {str(r): [names[i] for i in self.classes(r)] for r in self.levels()}


def _unit(dim, i):
    v = [Fraction(0)] * dim
    v[i] = Fraction(1)
    return v


class OppositeFiltration:
    """
    Increasing filtration W_{≤r} of the module cohomology, stored as spanning
    vectors per r.  Outside the explicitly given range, W_{≤r} is 0 below
    and the whole parity sector above.
    """

    def __init__(self, F, spans):
        self.F = F
        self.dim = len(F.pair.m_basis)
        self.spans = {Fraction(r): [list(map(Fraction, v)) for v in vs] for r, vs in spans.items()}
        self.complementary = None
        self.isotropic = None
        self._split = {}
        self._gr = {}

    def space(self, r):
        r = Fraction(r)
        if r in self.spans:
            basis, _ = linalg.column_space_basis(self.spans[r])
            return basis
        if r > self.F.hi:
            return [_unit(self.dim, i) for i in self.F.sector(r)]
        if r < self.F.lo:
            return []
        return []

    def projector(self, r):
        """(P_F, P_W) as dense matrices on the parity sector of r."""
        r = Fraction(r)
        if r not in self._split:
            Fb = [_unit(self.dim, i) for i in self.F.classes(r)]
            Wb = self.space(r)
            frame = Fb + Wb
            sector = self.F.sector(r)
            ok = len(frame) == len(sector) and (not frame or linalg.rank(frame) == len(sector))
            if not ok:
                raise StructuralError("W is not complementary to F at r = %s" % r)
            self._split[r] = (sector, frame, len(Fb))
        return self._split[r]

    def split(self, v, r):
        """Decompose a vector of the parity sector into (F-part, W-part)."""
        sector, frame, kF = self.projector(r)
        dim = self.dim
        if any(v[i] for i in range(dim) if i not in set(sector)):
            raise StructuralError("vector leaves the parity sector of r = %s" % r)
        if not frame:
            return [Fraction(0)] * dim, [Fraction(0)] * dim
        M = linalg.transpose(frame)
        sol = linalg.solve(M, v)
        if sol is None:
            raise StructuralError("splitting solve failed at r = %s" % r)
        fpart = [Fraction(0)] * dim
        wpart = [Fraction(0)] * dim
        for k, c in enumerate(sol):
            if c:
                tgt = fpart if k < kF else wpart
                for i, x in enumerate(frame[k]):
                    if x:
                        tgt[i] += c * x
        return fpart, wpart

    def graded(self, r):
        """Basis of W_{≤r-1} followed by a complement C_r; returns (frame, k)."""
        r = Fraction(r)
        if r not in self._gr:
            lower = self.space(r - 1)
            frame = list(lower)
            for v in self.space(r):
                if linalg.rank(frame + [v]) > len(frame):
                    frame.append(v)
            self._gr[r] = (frame, len(lower))
        return self._gr[r]

    def gr_coordinates(self, v, r):
        """Coordinates of v ∈ W_{≤r} modulo W_{≤r-1} in the complement basis."""
        frame, k = self.graded(r)
        if len(frame) == 0:
            if any(v):
                raise StructuralError("vector outside W at r = %s" % r)
            return []
        sol = linalg.solve(linalg.transpose(frame), v)
        if sol is None:
            raise StructuralError("vector outside W_{≤%s}" % r)
        return sol[k:]

    def gr_levels(self):
        """The r values with nonzero W_{≤r}/W_{≤r-1}, ascending."""
        out = []
        for r in self.F.levels():
            frame, k = self.graded(r)
            if len(frame) > k:
                out.append(r)
        return out

    def to_dict(self):
        names = self.F.pair.m_basis.names
        out = {}
        for r in self.F.levels():
            out[str(r)] = [{names[i]: str(c) for i, c in enumerate(v) if c} for v in self.space(r)]
        return out


def default_spans(F):
    """Bigrading-opposite choice: classes with p - q < 2r in the sector of r."""
    spans = {}
    for r in F.levels():
        two_r = int(2 * r)
        spans[r] = [_unit(len(F.diffs), i) for i in F.sector(r) if F.diffs[i] < two_r]
    return spans


def parse_w_spec(pair, spec):
    """
    ``{r: [vector, ...]}`` with r as number or string ("1/2"); vectors are
    dense lists or ``{basis_name: coeff}`` dicts.
    """
    dim = len(pair.m_basis)
    spans = {}
    for r, vs in spec.items():
        rr = Fraction(r)
        if (2 * rr).denominator != 1:
            raise ArgumentError("filtration index %s is not a half-integer" % r)
        out = []
        for v in vs:
            if isinstance(v, dict):
                w = [Fraction(0)] * dim
                for k, c in v.items():
                    w[pair.m_basis.index(k)] = Fraction(c)
            else:
                if len(v) != dim:
                    raise ArgumentError("vector of length %d, expected %d" % (len(v), dim))
                w = [Fraction(c) for c in v]
            out.append(w)
        spans[rr] = out
    return spans


def validate_filtration(W):
    """Complementarity, monotonicity and isotropy report."""
    F = W.F
    pair = F.pair
    rep = Report("opposite filtration")
    comp = rep.start("complementary to F")
    mono = rep.start("increasing")
    sect = rep.start("inside parity sector")
    for r in F.levels():
        sector = set(F.sector(r))
        Wr = W.space(r)
        record(sect, all(not v[i] for v in Wr for i in range(W.dim) if i not in sector), str(r))
        frame = [_unit(W.dim, i) for i in F.classes(r)] + Wr
        ok = len(frame) == len(sector) and (not frame or linalg.rank(frame) == len(sector))
        record(comp, ok, str(r))
        lower = W.space(r - 1)
        record(mono, all(linalg.in_span(Wr, v) for v in lower), str(r))
    W.complementary = rep.passed
    iso = rep.start("isotropic (W_r, W_{-r+1}) = 0")
    if pair.gram is not None:
        for r in F.levels():
            for u in W.space(r):
                for v in W.space(-r + 1):
                    record(iso, pair.pairing(u, v) == 0, str(r))
    W.isotropic = iso.passed
    return rep


def build_filtrations(pair, W=None, require_isotropic=False):
    """(F, W); W is a spec dict, an OppositeFiltration, or None for the default."""
    F = HodgeFiltration(pair)
    if isinstance(W, OppositeFiltration):
        Wf = W
    elif W is None:
        Wf = OppositeFiltration(F, default_spans(F))
    else:
        Wf = OppositeFiltration(F, parse_w_spec(pair, W))
    rep = validate_filtration(Wf)
    if not Wf.complementary:
        bad = [c for c in rep.failures() if c.name != "isotropic (W_r, W_{-r+1}) = 0"]
        raise ValidationError("filtration W fails: %s" % ", ".join(
            "%s at r = %s" % (c.name, c.witness) for c in bad), rep)
    if require_isotropic and not Wf.isotropic:
        raise ValidationError("filtration W is not isotropic", rep)
    return F, Wf


# ------------------------------------------------------------ splitting

def level_r(pair, m):
    return Fraction(pair.n - m, 2)


def _group(x):
    """Terms grouped by (mono, nu) as dense vectors."""
    dim = len(x.basis)
    out = {}
    for (i, m, nu), c in x.terms.items():
        v = out.setdefault((m, nu), [Fraction(0)] * dim)
        v[i] += c
    return out


def split_L(pair, W, x):
    """x = x_0 + x_W with x_0 ∈ L₀ and x_W ∈ L_W, level by level."""
    t0, tW = {}, {}
    for (m, nu), v in _group(x).items():
        fpart, wpart = W.split(v, level_r(pair, nu))
        for i, c in enumerate(fpart):
            if c:
                t0[(i, m, nu)] = c
        for i, c in enumerate(wpart):
            if c:
                tW[(i, m, nu)] = c
    return (GradedElement(x.basis, t0, x.params, x.order),
            GradedElement(x.basis, tW, x.params, x.order))


def in_L0(pair, W, x):
    return not split_L(pair, W, x)[1]


def in_LW(pair, W, x):
    return not split_L(pair, W, x)[0]


def check_window(x, window):
    for (_, _, nu) in x.terms:
        if not window[0] <= nu <= window[1]:
            raise WindowError("nu^%d outside window %r" % (nu, window))


def check_direct_sum(pair, W, window):
    """Every ν^m e in the window splits uniquely into L₀ ⊕ L_W."""
    rep = Report("L0 + LW")
    c = rep.start("H((hbar)) = L0 (+) LW")
    dim = len(pair.m_basis)
    for m in range(window[0], window[1] + 1):
        r = level_r(pair, m)
        sector, frame, kF = W.projector(r)
        record(c, len(frame) == len(sector) and (not frame or linalg.rank(frame) == len(sector)), m)
    return rep


# ------------------------------------------------------------ period map

class PeriodMap:
    """Ψ^W(t) with its reduction Ψ̂, linear part and flat coordinates."""

    def __init__(self, pair, sol, F, W, psi, eta, window, solves):
        self.pair = pair
        self.sol = sol
        self.F = F
        self.W = W
        self.psi = psi
        self.eta = eta
        self.window = window
        self.solves = solves
        self.order = sol.order
        self.params = sol.params
        self.hat = None
        self.linear = None
        self.coords = None
        self.inverse = None
        self.psi_flat = None

    def reduced(self):
        """Ψ̂ = (Ψ - η) mod ħ^{-1}L_W as gr^W coordinate series."""
        if self.hat is None:
            self.hat = reduced_map(self)
        return self.hat

    def contracted(self):
        """Ψ ⌟ Ω for polyvector-valued models (needs an m-sector with odd masks)."""
        from .kahler_ops import polyvector_to_form, POLY, InvariantSector
        ms = self.pair.m_sector
        if ms is None or ms.model != POLY:
            raise ArgumentError("contraction with Ω needs a polyvector module")
        fs = InvariantSector(self.pair.n, "form")
        t = {}
        for (i, m, nu), c in self.psi.terms.items():
            img = fs.from_section(polyvector_to_form(ms.section(i), self.pair.n))
            for k, a in enumerate(img):
                if a:
                    t[(k, m, nu)] = t.get((k, m, nu), 0) + a * c
        return GradedElement(fs.basis, t, self.psi.params, self.psi.order)


def _require_formal(M, gamma):
    if any(not op.is_zero() for op in M.m_d):
        raise PreconditionError("the period map is implemented for modules with zero differential")
    for i in range(len(M.m_basis)):
        e = GradedElement.basis_vector(M.m_basis, i).lift(gamma.params, gamma.order)
        if M.act(gamma, e):
            raise PreconditionError("Γ• does not vanish on the module")


def period_map(pair, sol, W=None, window=None, eta=None):
    """
    Ψ(t) ∈ L_t ∩ (η + L_W), order by order.  With X = l_ħ e^{Γ∘} l_ħ^{-1},
    Ψ = X ψ₀ for the unique ψ₀ ∈ η + t·L₀ with Xψ₀ - η ∈ L_W.
    """
    if sol.obstructions:
        raise PreconditionError("the Maurer–Cartan solution is obstructed at order %d"
                                % sol.obstructions[0][0])
    M = pair.structure
    gamma = sol.gamma
    _require_formal(M, gamma)
    if isinstance(W, tuple):
        F, Wf = W
    else:
        F, Wf = build_filtrations(pair, W)
    N = sol.order
    window = window or default_window(N, pair.n)
    eta = eta if eta is not None else pair.eta
    if not in_L0(pair, Wf, eta):
        raise ArgumentError("η does not lie in L0")
    eta_s = eta.lift(sol.params, N)

    def X(x):
        y = transport(M, gamma, l_hbar(pair, x, inverse=True), sign=1)
        out = l_hbar(pair, y)
        check_window(out, window)
        return out

    psi0 = eta_s
    solves = 0
    for j in range(1, N + 1):
        R = X(psi0).homogeneous(j)
        r0, _ = split_L(pair, Wf, R)
        solves += 1
        psi0 = psi0 - r0
    psi = X(psi0)
    a0, aW = split_L(pair, Wf, psi - eta_s)
    if a0:
        raise StructuralError("Ψ - η has an L0 component; splitting is not unique")
    return PeriodMap(pair, sol, F, Wf, psi, eta_s, window, solves)


def reduced_map(P):
    """Series coordinates of Ψ̂ in gr^W, ordered by ascending r."""
    pair, W = P.pair, P.W
    levels = W.gr_levels()
    offsets = {}
    k = 0
    for r in levels:
        frame, low = W.graded(r)
        offsets[r] = k
        k += len(frame) - low
    total = k
    coeffs = [dict() for _ in range(total)]
    for (m, nu), v in _group(P.psi - P.eta).items():
        r = level_r(pair, nu)
        if r not in offsets:
            if any(v) and not all(c == 0 for c in W.gr_coordinates(v, r)):
                raise StructuralError("Ψ̂ has a component outside gr^W")
            continue
        for a, c in enumerate(W.gr_coordinates(v, r)):
            if c:
                d = coeffs[offsets[r] + a]
                d[m] = d.get(m, 0) + c
    return [SuperSeries(P.params, P.order, c) for c in coeffs]


def flat_coordinates(P):
    """
    Normalize Ψ̂ by its linear part, invert it, and re-express Ψ in t_W.
    Returns the list of series t^a(t_W).
    """
    hat = P.reduced()
    n = P.params.n
    if len(hat) != n:
        raise StructuralError("gr^W has dimension %d but there are %d parameters" % (len(hat), n))
    L = [[Fraction(h.coeff(P.params.var(a))) for a in range(n)] for h in hat]
    try:
        Linv = linalg.inverse(L)
    except InversionError as exc:
        raise InversionError("Ψ̂ has a singular linear part (degenerate W)", exc.directions) from None
    F = [sum((hat[c] * Linv[a][c] for c in range(n) if Linv[a][c]), SuperSeries(P.params, P.order))
         for a in range(n)]
    G = series_invert_map(F)
    P.linear = L
    P.coords = F
    P.inverse = G
    P.psi_flat = substitute_element(P.psi, G)
    return G


def substitute_element(x, images):
    """Substitute t^a ↦ images[a] in the coefficients of a series element."""
    groups = {}
    for (i, m, nu), c in x.terms.items():
        groups.setdefault((i, nu), {})[m] = c
    order = min([x.order] + [g.order for g in images])
    t = {}
    for (i, nu), d in groups.items():
        s = SuperSeries(x.params, x.order, d).substitute(images)
        for m, c in s.terms.items():
            if c:
                t[(i, m, nu)] = c
    return GradedElement(x.basis, t, x.params, order)


def unit_equation_defect(P, psi=None):
    """∂Ψ/∂t⁰ - ħ^{-1}Ψ truncated to order N-1."""
    psi = psi if psi is not None else P.psi
    return (psi.deriv(0) - psi.scale_hbar(-2)).truncate(P.order - 1)


# ------------------------------------------------------------ pairing

def hbar_pairing(pair, u, v):
    """ħ-bilinear extension of the pairing on plain (nu-graded) elements."""
    if pair.gram is None:
        from .errors import ConfigurationError
        raise ConfigurationError("model has no integral")
    if u.params is not None or v.params is not None:
        raise ArgumentError("hbar_pairing takes elements without parameters")
    t = {}
    G = pair.gram
    for (i, _, n1), c1 in u.terms.items():
        for (j, _, n2), c2 in v.terms.items():
            g = G[i][j]
            if g:
                t[n1 + n2] = t.get(n1 + n2, 0) + c1 * c2 * g
    return HbarLaurent(t, window=(-10 ** 6, 10 ** 6))


def check_LW_pairing(pair, W, window):
    """(v, w) ∈ ħ^{n-2}[[ħ^{-1}]] for generators v, w of L_W in the window."""
    rep = Report("LW pairing")
    c = rep.start("(LW, LW) in hbar^{n-2}[[hbar^-1]]")
    gens = []
    for m in range(window[0], window[1] + 1):
        for v in W.space(level_r(pair, m)):
            gens.append(GradedElement(pair.m_basis, {(i, (), m): x for i, x in enumerate(v) if x}))
    top = 2 * (pair.n - 2)
    for a in gens:
        for b in gens:
            h = hbar_pairing(pair, a, b)
            record(c, all(k <= top for k in h.terms), (a.to_str(), b.to_str()))
    return rep


def reflect_hbar(pair, x):
    """ħ ↦ -ħ relative to l_ħ: ν^m e ↦ (-1)^{(m - w(e))/2} ν^m e."""
    w = pair.weights
    t = {}
    for (i, m, nu), c in x.terms.items():
        k = nu - w[i]
        if k % 2:
            raise StructuralError("term nu^%d %s is off its l_hbar parity" % (nu, pair.m_basis.names[i]))
        t[(i, m, nu)] = -c if (k // 2) % 2 else c
    return GradedElement(x.basis, t, x.params, x.order)
