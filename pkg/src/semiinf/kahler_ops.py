"""
Operator calculus on polynomial sections of the Kähler and polyvector
supermanifolds, the checks of the ♯/Q/i_κ identities, and the torus-invariant
(g, m) pairs used by the period-map pipeline.

Odd coordinates are numbered ``0..2n-1``: the first ``n`` are ψ (``dz^a`` in
the form model, ``Π∂/∂z^a`` in the polyvector model), the last ``n`` are
ψ̄ = dz̄^a.  A term is keyed by ``(zexp, zbexp, mask)``.
"""

import random
from fractions import Fraction

from . import linalg
from .errors import (ArgumentError, DegreeOverflow, StructuralError, DomainError)
from .report import Report, record
from .super_core import (GradedBasis, GradedElement, LinearOp, koszul_sign, swap_sign)
from .dgbv import ModuleStructure

FORM, POLY = "form", "poly"

_merge_cache = {}


def _bits(mask):
    out = []
    k = 0
    while mask:
        if mask & 1:
            out.append(k)
        mask >>= 1
        k += 1
    return out


def merge_sign(m1, m2):
    """Sign of (ordered monomial m1)(ordered monomial m2) -> ordered m1|m2."""
    key = (m1, m2)
    s = _merge_cache.get(key)
    if s is None:
        seq = _bits(m1) + _bits(m2)
        perm = sorted(range(len(seq)), key=lambda k: seq[k])
        s = koszul_sign([1] * len(seq), perm)
        _merge_cache[key] = s
    return s


def _below(mask, k):
    return mask & ((1 << k) - 1)


class PolySection:
    """Polynomial coefficients in z, z̄ times a monomial in the odd variables."""

    __slots__ = ("n", "model", "bound", "terms")

    def __init__(self, n, model, bound, terms=None):
        if model not in (FORM, POLY):
            raise ArgumentError("model must be 'form' or 'poly'")
        self.n = n
        self.model = model
        self.bound = bound
        self.terms = {}
        for key, c in (terms or {}).items():
            if not c:
                continue
            z, zb, mask = key
            if sum(z) + sum(zb) > bound:
                raise DegreeOverflow("term of degree %d exceeds bound %d"
                                     % (sum(z) + sum(zb), bound))
            self.terms[(tuple(z), tuple(zb), mask)] = Fraction(c)

    def _new(self, terms):
        return PolySection(self.n, self.model, self.bound, terms)

    def zero(self):
        return self._new({})

    @classmethod
    def monomial(cls, n, model, bound, odd=(), z=None, zb=None, coeff=1):
        """Ordered product of odd variables ``odd`` times z^z z̄^zb."""
        z = tuple(z or (0,) * n)
        zb = tuple(zb or (0,) * n)
        s = cls(n, model, bound, {(z, zb, 0): Fraction(coeff)})
        for k in reversed(list(odd)):
            s = s.odd_mul(k)
        return s

    def __bool__(self):
        return bool(self.terms)

    def __eq__(self, other):
        if isinstance(other, PolySection):
            return self.terms == other.terms
        if other == 0:
            return not self.terms
        return NotImplemented

    def _check(self, other):
        if other.n != self.n or other.model != self.model:
            raise StructuralError("sections from different models")

    def __add__(self, other):
        if isinstance(other, int) and other == 0:
            return self
        self._check(other)
        t = dict(self.terms)
        for k, c in other.terms.items():
            t[k] = t.get(k, 0) + c
        return PolySection(self.n, self.model, max(self.bound, other.bound), t)

    __radd__ = __add__

    def __neg__(self):
        return self._new({k: -c for k, c in self.terms.items()})

    def __sub__(self, other):
        return self + (-other)

    def __mul__(self, c):
        if isinstance(c, PolySection):
            return self.wedge(c)
        c = Fraction(c)
        return self._new({k: v * c for k, v in self.terms.items()})

    __rmul__ = __mul__

    def parity_parts(self):
        out = {}
        for k, c in self.terms.items():
            out.setdefault(bin(k[2]).count("1") % 2, {})[k] = c
        return {p: self._new(t) for p, t in out.items()}

    def parity(self):
        ps = {bin(k[2]).count("1") % 2 for k in self.terms}
        if not ps:
            return 0
        if len(ps) > 1:
            raise ArgumentError("section is not of homogeneous parity")
        return ps.pop()

    def wedge(self, other):
        self._check(other)
        t = {}
        for (z1, w1, m1), c1 in self.terms.items():
            for (z2, w2, m2), c2 in other.terms.items():
                if m1 & m2:
                    continue
                key = (tuple(a + b for a, b in zip(z1, z2)),
                       tuple(a + b for a, b in zip(w1, w2)), m1 | m2)
                t[key] = t.get(key, 0) + merge_sign(m1, m2) * c1 * c2
        return PolySection(self.n, self.model, max(self.bound, other.bound), t)

    def odd_mul(self, k):
        """Left multiplication by odd variable k."""
        t = {}
        bit = 1 << k
        for (z, zb, m), c in self.terms.items():
            if m & bit:
                continue
            t[(z, zb, m | bit)] = merge_sign(bit, m) * c
        return self._new(t)

    def odd_deriv(self, k):
        """Left derivative in odd variable k."""
        t = {}
        bit = 1 << k
        for (z, zb, m), c in self.terms.items():
            if not m & bit:
                continue
            rest = m & ~bit
            t[(z, zb, rest)] = t.get((z, zb, rest), 0) + merge_sign(bit, rest) * c
        return self._new(t)

    def zbar_deriv(self, a):
        t = {}
        for (z, zb, m), c in self.terms.items():
            e = zb[a]
            if e:
                nb = list(zb)
                nb[a] -= 1
                key = (z, tuple(nb), m)
                t[key] = t.get(key, 0) + e * c
        return self._new(t)

    def z_deriv(self, a):
        t = {}
        for (z, zb, m), c in self.terms.items():
            e = z[a]
            if e:
                nz = list(z)
                nz[a] -= 1
                key = (tuple(nz), zb, m)
                t[key] = t.get(key, 0) + e * c
        return self._new(t)

    def at_origin(self):
        zero = (0,) * self.n
        return self._new({k: c for k, c in self.terms.items() if k[0] == zero and k[1] == zero})

    def is_invariant(self):
        zero = (0,) * self.n
        return all(k[0] == zero and k[1] == zero for k in self.terms)

    def odd_type(self, mask):
        n = self.n
        p = bin(mask & ((1 << n) - 1)).count("1")
        return p, bin(mask >> n).count("1")

    def __repr__(self):
        if not self.terms:
            return "0"
        parts = []
        for (z, zb, m), c in sorted(self.terms.items()):
            s = str(c)
            for a, e in enumerate(z):
                if e:
                    s += "*z%d^%d" % (a + 1, e)
            for a, e in enumerate(zb):
                if e:
                    s += "*zb%d^%d" % (a + 1, e)
            for k in _bits(m):
                s += "*" + odd_name(self.n, self.model, k)
            parts.append(s)
        return " + ".join(parts)


def odd_name(n, model, k):
    if k < n:
        return ("dz%d" if model == FORM else "psi%d") % (k + 1)
    return ("dzbar%d" if model == FORM else "psibar%d") % (k - n + 1)


def zbar_poly(n, bound, coeffs):
    """Even polynomial in z̄ from ``{zbexp: coeff}`` (used for ω entries)."""
    return PolySection(n, POLY, bound, {((0,) * n, tuple(e), 0): c for e, c in coeffs.items()})


# ------------------------------------------------------------- operators

class Op:
    """Linear operator on sections with a declared parity."""

    def __init__(self, fn, parity, name=""):
        self.fn = fn
        self.parity = parity % 2
        self.name = name

    def __call__(self, s):
        return self.fn(s)


def supercommutator(P, Q):
    s = swap_sign(P.parity, Q.parity)
    return Op(lambda x: P(Q(x)) - Q(P(x)) * s, P.parity + Q.parity,
              "[%s,%s]" % (P.name, Q.name))


def scaled(P, c):
    return Op(lambda x: P(x) * c, P.parity, P.name)


class KahlerData:
    """
    Inverse Kähler form ω^{ab̄}(z̄) with polynomial entries, each given as
    ``{zbexp: coeff}``.
    """

    def __init__(self, n, omega_inv, bound=8):
        self.n = n
        self.bound = bound
        self.entries = [[{tuple(e): Fraction(c) for e, c in omega_inv[a][b].items() if c}
                         for b in range(n)] for a in range(n)]
        const = [[self.entries[a][b].get((0,) * n, Fraction(0)) for b in range(n)]
                 for a in range(n)]
        if linalg.rank(const) < n:
            raise ArgumentError("constant part of ω^{ab̄} is singular")
        self.kahler_at_origin = all(sum(e) != 1 for row in self.entries for ent in row for e in ent)

    @classmethod
    def constant(cls, M, bound=8):
        n = len(M)
        return cls(n, [[{(0,) * n: M[a][b]} for b in range(n)] for a in range(n)], bound)

    def is_constant(self):
        return all(set(ent) <= {(0,) * self.n} for row in self.entries for ent in row)

    def entry(self, a, b, bound):
        return zbar_poly(self.n, bound, self.entries[a][b])


def _poly_times(coef, s):
    """Even scalar polynomial (mask 0 section) times a section."""
    t = {}
    for (z1, w1, m1), c1 in coef.terms.items():
        for (z2, w2, m2), c2 in s.terms.items():
            key = (tuple(a + b for a, b in zip(z1, z2)), tuple(a + b for a, b in zip(w1, w2)), m2)
            t[key] = t.get(key, 0) + c1 * c2
    return PolySection(s.n, s.model, s.bound, t)


def build_operators(K, model=POLY):
    """∂̄, ♯ and Q on polyvector-model sections (``model`` must be 'poly')."""
    if model != POLY:
        raise StructuralError("♯ and Q act on the polyvector model")
    n = K.n

    def dbar(s):
        out = s.zero()
        for a in range(n):
            out = out + s.zbar_deriv(a).odd_mul(n + a)
        return out

    def sharp(s):
        out = s.zero()
        for a in range(n):
            for b in range(n):
                w = K.entry(a, b, s.bound)
                if w:
                    out = out + _poly_times(w, s.odd_deriv(n + b).odd_mul(a))
        return out

    def Q(s):
        out = s.zero()
        for a in range(n):
            for b in range(n):
                w = K.entry(a, b, s.bound)
                if not w:
                    continue
                out = out + _poly_times(w, s.zbar_deriv(b).odd_mul(a))
                for c in range(n):
                    dw = w.zbar_deriv(c)
                    if dw:
                        out = out - _poly_times(dw, s.odd_deriv(n + b).odd_mul(a).odd_mul(n + c))
        return out

    return {"dbar": Op(dbar, 1, "dbar"), "sharp": Op(sharp, 0, "sharp"), "Q": Op(Q, 1, "Q")}


def i_kappa(kappa):
    """
    Contraction operator of a form-model section on polyvector sections:
    κ = c dz^{a1..ap} dz̄^{b1..bq} acts as (-1)^{pq} c ψ̄^{b1}..ψ̄^{bq} ∂_{ψa1}..∂_{ψap}.
    """
    if kappa.model != FORM:
        raise StructuralError("i_κ needs a form-model κ")
    n = kappa.n
    terms = list(kappa.terms.items())
    parity = kappa.parity() if kappa.terms else 0

    def apply(s):
        if s.model != POLY or s.n != n:
            raise StructuralError("i_κ acts on polyvector sections of the same n")
        out = s.zero()
        for (z, zb, mask), c in terms:
            bits = _bits(mask)
            holo = [k for k in bits if k < n]
            anti = [k for k in bits if k >= n]
            x = s
            for k in reversed(holo):
                x = x.odd_deriv(k)
            for k in reversed(anti):
                x = x.odd_mul(k)
            if not x:
                continue
            coef = PolySection(n, POLY, s.bound, {(z, zb, 0): c * swap_sign(len(holo), len(anti))})
            out = out + _poly_times(coef, x)
        return out

    return Op(apply, parity, "i")


def bracket_omega(K, k1, k2):
    """Odd Poisson bracket of two form-model sections."""
    if k1.model != FORM or k2.model != FORM:
        raise StructuralError("bracket_omega takes form-model sections")
    out = k1.zero()
    for p1, a in k1.parity_parts().items():
        for p2, b in k2.parity_parts().items():
            out = out + _bracket_half(K, a, b, p1) \
                - _bracket_half(K, b, a, p2) * swap_sign(p1 + 1, p2 + 1)
    return out


def _bracket_half(K, k1, k2, p1):
    n = K.n
    bound = max(k1.bound, k2.bound)
    out = PolySection(n, FORM, bound)
    for a in range(n):
        d1 = k1.odd_deriv(a)
        if not d1:
            continue
        for b in range(n):
            w = K.entry(a, b, bound)
            if not w:
                continue
            wf = PolySection(n, FORM, bound, w.terms)
            out = out + _poly_times(wf, d1.wedge(k2.zbar_deriv(b))) * swap_sign(1, p1)
            for c in range(n):
                dw = wf.zbar_deriv(c)
                if dw:
                    out = out - _poly_times(dw, d1.wedge(k2.odd_deriv(n + b)).odd_mul(n + c))
    return out


# ------------------------------------------------------ random sampling

def random_section(rng, n, model, degree, bound, terms=4, coeff_range=3):
    t = {}
    for _ in range(terms):
        z = [0] * n
        zb = [0] * n
        for _ in range(rng.randint(0, degree)):
            if rng.random() < 0.5:
                z[rng.randrange(n)] += 1
            else:
                zb[rng.randrange(n)] += 1
        mask = rng.randrange(1 << (2 * n))
        c = rng.randint(-coeff_range, coeff_range)
        if c:
            key = (tuple(z), tuple(zb), mask)
            t[key] = t.get(key, 0) + c
    return PolySection(n, model, bound, t)


def random_homogeneous(rng, n, model, degree, bound, parity, terms=3):
    s = random_section(rng, n, model, degree, bound, terms)
    return s.parity_parts().get(parity, PolySection(n, model, bound))


# ------------------------------------------------------ lemma checks

def verify_lemma_342(K, sections, kappas, at_origin=False):
    """
    Check (a) Q² = 0, (b) [Q,∂̄] = 0, (c) [Q,♯] = 0,
    (d) [i_κ1,[Q,i_κ2]] = -i_[κ1•κ2], and (e) the i_{κ1∧κ2} identity.

    ``kappas`` is a list of homogeneous form-model pairs.  With
    ``at_origin`` every result is evaluated at z = z̄ = 0.  Identity (e) is
    checked in the literal form and in the product-rule form
    [i_{κ1∧κ2}, Q] = i_κ1 [i_κ2, Q] + (-1)^{κ2} [i_κ1, Q] i_κ2.
    """
    ops = build_operators(K)
    Q, dbar, sharp = ops["Q"], ops["dbar"], ops["sharp"]
    ev = (lambda s: s.at_origin()) if at_origin else (lambda s: s)
    rep = Report("lemma identities" + (" at origin" if at_origin else ""))
    ca = rep.start("(a) Q^2 = 0")
    cb = rep.start("(b) [Q, dbar] = 0")
    cc = rep.start("(c) [Q, sharp] = 0")
    QQ = supercommutator(Q, dbar)
    QS = supercommutator(Q, sharp)
    for idx, s in enumerate(sections):
        record(ca, not ev(Q(Q(s))), idx)
        record(cb, not ev(QQ(s)), idx)
        record(cc, not ev(QS(s)), idx)
    cd = rep.start("(d) [i1,[Q,i2]] = -i[k1•k2]")
    ce = rep.start("(e) product rule")
    cl = rep.start("(e) literal form")
    for j, (k1, k2) in enumerate(kappas):
        i1, i2 = i_kappa(k1), i_kappa(k2)
        lhs_op = supercommutator(i1, supercommutator(Q, i2))
        rhs_op = i_kappa(bracket_omega(K, k1, k2))
        i12 = i_kappa(k1.wedge(k2))
        e_lhs = supercommutator(i12, Q)
        c2Q = supercommutator(i2, Q)
        c1Q = supercommutator(i1, Q)
        p1, p2 = i1.parity, i2.parity
        for idx, s in enumerate(sections):
            record(cd, ev(lhs_op(s)) == ev(-rhs_op(s)), (j, idx))
            l = ev(e_lhs(s))
            r = ev(i1(c2Q(s)) + c1Q(i2(s)) * swap_sign(1, p2))
            record(ce, l == r, (j, idx))
            if not bracket_omega(K, k1, k2):
                r = ev(i1(c2Q(s)) + i2(c1Q(s)) * swap_sign(p1, p2))
                record(cl, l == r, (j, idx))
    return rep


def bracket_via_operator(K, k1, k2):
    """
    The same bracket through the BV-type formula with D = [∂̄, i_{ω^{-1}}]:
    (-1)^{κ1} D(κ1κ2) - (-1)^{κ1} D(κ1)κ2 - κ1 D(κ2).
    """
    n = K.n

    def contract(s):
        # i_{ω^{-1}} = ω^{ab̄} ∂_{ψ̄^b} ∂_{ψ^a}
        out = s.zero()
        for a in range(n):
            for b in range(n):
                w = K.entry(a, b, s.bound)
                if w:
                    wf = PolySection(n, FORM, s.bound, w.terms)
                    out = out + _poly_times(wf, s.odd_deriv(a).odd_deriv(n + b))
        return out

    def dbar(s):
        out = s.zero()
        for a in range(n):
            out = out + s.zbar_deriv(a).odd_mul(n + a)
        return out

    def D(s):
        return dbar(contract(s)) - contract(dbar(s))

    out = k1.zero()
    for p1, a in k1.parity_parts().items():
        for p2, b in k2.parity_parts().items():
            s = swap_sign(1, p1)
            out = out + D(a.wedge(b)) * s - D(a).wedge(b) * s - a.wedge(D(b))
    return out


# --------------------------------------------------- invariant models

def _odd_basis(n, names):
    """Monomials in 2n odd generators, ordered by degree then mask."""
    masks = sorted(range(1 << (2 * n)), key=lambda m: (bin(m).count("1"), _mask_lex(m, 2 * n)))
    entries = []
    for m in masks:
        bits = _bits(m)
        nm = "*".join(names[k] for k in bits) if bits else "1"
        p = sum(1 for k in bits if k < n)
        q = len(bits) - p
        entries.append((nm, (p, q)))
    return masks, GradedBasis(entries)


def _mask_lex(m, width):
    return tuple(-((m >> k) & 1) for k in range(width))


class InvariantSector:
    """Constant-coefficient sections of one model as a finite basis."""

    def __init__(self, n, model, hat=False):
        self.n = n
        self.model = model
        suffix = "h" if hat else ""
        names = [odd_name(n, model, k) + suffix for k in range(2 * n)]
        self.masks, self.basis = _odd_basis(n, names)
        self.index = {m: i for i, m in enumerate(self.masks)}

    def section(self, i, bound=0):
        zero = (0,) * self.n
        return PolySection(self.n, self.model, bound, {(zero, zero, self.masks[i]): 1})

    def to_section(self, vec, bound=0):
        zero = (0,) * self.n
        return PolySection(self.n, self.model, bound,
                           {(zero, zero, self.masks[i]): c for i, c in enumerate(vec) if c})

    def from_section(self, s):
        if not s.is_invariant():
            raise DomainError("section is not torus-invariant (has z or z̄ dependence)")
        v = [Fraction(0)] * len(self.masks)
        for (_, _, m), c in s.terms.items():
            v[self.index[m]] += c
        return v

    def top(self):
        return self.index[(1 << (2 * self.n)) - 1]


def _table(sector_in, sector_out, f):
    """Basis-level table (i, j) -> {k: c} from a section-level bilinear map."""
    tab = {}
    for i in range(len(sector_in[0].masks)):
        si = sector_in[0].section(i)
        for j in range(len(sector_in[1].masks)):
            v = sector_out.from_section(f(si, sector_in[1].section(j)))
            out = {k: c for k, c in enumerate(v) if c}
            if out:
                tab[(i, j)] = out
    return tab


def contraction_by_polyvector(v):
    """
    Action of a polyvector-model section on form-model sections:
    ψ_a acts as ∂/∂(dz^a) and ψ̄^b as dz̄^b∧, extended multiplicatively
    in the canonical order of the monomial.
    """
    n = v.n
    terms = list(v.terms.items())

    def apply(s):
        out = s.zero()
        for (z, zb, mask), c in terms:
            x = s
            for k in reversed(_bits(mask)):
                x = x.odd_deriv(k) if k < n else x.odd_mul(k)
            out = out + x * c
        return out

    return Op(apply, v.parity() if v.terms else 0, "iv")


class ModelPair:
    """
    A (g, m) pair ready for the period-map pipeline.

    ``structure`` is a ``ModuleStructure``; ``eta`` a plain element of m;
    ``weights[i]`` is the nu-power of l_ħ on the m-basis vector i;
    ``gram`` the pairing matrix on m; ``unit`` the g-index of the unit lift.
    ``pairing_parity`` is the parity of the pairing itself: parameters moving
    to the front of ``(v, w)`` pass v and the pairing.
    """

    def __init__(self, name, structure, n, eta, weights, gram, unit, g_sector=None,
                 m_sector=None, metric=None, pairing_parity=0):
        self.name = name
        self.structure = structure
        self.n = n
        self.eta = eta
        self.weights = weights
        self.gram = gram
        self.unit = unit
        self.g_sector = g_sector
        self.m_sector = m_sector
        self.metric = metric
        self.pairing_parity = pairing_parity

    @property
    def g_basis(self):
        return self.structure.g_basis

    @property
    def m_basis(self):
        return self.structure.m_basis

    def pairing(self, u, v):
        """Bilinear pairing of two plain m-vectors (lists)."""
        return sum((u[i] * self.gram[i][j] * v[j] for i in range(len(u)) if u[i]
                    for j in range(len(v)) if v[j] and self.gram[i][j]), Fraction(0))


def _check_metric(g):
    n = len(g)
    G = linalg.as_fractions(g)
    for i in range(n):
        for j in range(n):
            if G[i][j] != G[j][i]:
                raise ArgumentError("metric is not symmetric")
    for k in range(1, n + 1):
        minor = [row[:k] for row in G[:k]]
        if _det(minor) <= 0:
            raise ArgumentError("metric is not positive definite")
    return G


def _det(M):
    R = [list(r) for r in M]
    n = len(R)
    det = Fraction(1)
    for c in range(n):
        p = next((i for i in range(c, n) if R[i][c]), None)
        if p is None:
            return Fraction(0)
        if p != c:
            R[c], R[p] = R[p], R[c]
            det = -det
        det *= R[c][c]
        for i in range(c + 1, n):
            f = R[i][c] / R[c][c]
            if f:
                R[i] = [x - f * y for x, y in zip(R[i], R[c])]
    return det


def determinant(M):
    return _det(linalg.as_fractions(M))


def polyvector_to_form(v, n):
    """v ⌟ Ω for Ω = dz1..dzn: contract ψ_a as ∂/∂(dz^a), keep ψ̄ as dz̄."""
    zero = (0,) * n
    omega = PolySection(n, FORM, v.bound, {(zero, zero, (1 << n) - 1): 1})
    return contraction_by_polyvector(v)(omega)


def build_model_A(n, metric, hat=False):
    """
    Kähler pair on the invariant sector of the flat torus: g = invariant
    forms, m = invariant polyvector-valued forms with ∘ = ħ^{-1} i_κ.
    The pairing is (v, w) = ∫ (v⌟Ω)∧(w⌟Ω) with ∫ of the ordered top form = 1.
    """
    G = _check_metric(metric)
    if len(G) != n:
        raise ArgumentError("metric size does not match n")
    K = KahlerData.constant(linalg.inverse(G))
    gs = InvariantSector(n, FORM, hat)
    ms = InvariantSector(n, POLY, hat)
    ops = build_operators(K)
    bracket = _table((gs, gs), gs, lambda a, b: bracket_omega(K, a, b))
    circ = _table((gs, ms), ms, lambda k, a: i_kappa(k)(a))
    bullet = _table((gs, ms), ms,
                    lambda k, a: -supercommutator(i_kappa(k), ops["Q"])(a))
    gd = LinearOp(gs.basis, _op_cols(gs, gs, build_operators_form_dbar(n)), (0, 1))
    d0 = LinearOp(ms.basis, _op_cols(ms, ms, ops["dbar"]), (0, 1))
    d1 = LinearOp(ms.basis, _op_cols(ms, ms, ops["Q"]), (1, 0), nu_shift=2)
    structure = ModuleStructure(gs.basis, lambda i, j: bracket.get((i, j)), gd, ms.basis,
                                lambda i, j: bullet.get((i, j)), lambda i, j: circ.get((i, j)),
                                [d0, d1], circ_nu=-2, label="A-model n=%d" % n)
    eta_mask = (1 << n) - 1
    eta = GradedElement.basis_vector(ms.basis, ms.index[eta_mask])
    weights = [n + bd[1] - bd[0] for bd in ms.basis.bidegrees]
    forms = [polyvector_to_form(ms.section(i), n) for i in range(len(ms.masks))]
    top = (1 << (2 * n)) - 1
    gram = [[forms[i].wedge(forms[j]).terms.get(((0,) * n, (0,) * n, top), Fraction(0))
             for j in range(len(forms))] for i in range(len(forms))]
    # (v, w) = ∫(v⌟Ω)∧(w⌟Ω) has the parity of Ω
    return ModelPair("A(n=%d)" % n, structure, n, eta, weights, gram, gs.index[0], gs, ms, G,
                     pairing_parity=n % 2)


def build_operators_form_dbar(n):
    def dbar(s):
        out = s.zero()
        for a in range(n):
            out = out + s.zbar_deriv(a).odd_mul(n + a)
        return out
    return Op(dbar, 1, "dbar")


def _op_cols(src, dst, op):
    cols = {}
    for j in range(len(src.masks)):
        v = dst.from_section(op(src.section(j)))
        col = {i: c for i, c in enumerate(v) if c}
        if col:
            cols[j] = col
    return cols


def build_model_B(n, metric, hat=False, volume=None):
    """
    B-model pair on the invariant sector: g = invariant polyvector-valued
    forms with the Schouten bracket and ∂̄, m = invariant forms with
    κ∘a = ħ^{-1} i_κ a and d = ∂ + ∂̄.  η = Ω = dz1..dzn.  The pairing has
    parity n and reads (α, β) = (-1)^{n(n+1)/2 + (n+1)p + nq} ∫ α∧β for α of
    type (p, q), the form of ∫(v⌟Ω)∧(w⌟Ω) under ψ_i ↦ dz_i, ψ̄^i ↦ dz̄^i;
    ∫ of the ordered top form is ``volume`` (default 1).
    """
    G = _check_metric(metric)
    if len(G) != n:
        raise ArgumentError("metric size does not match n")
    gs = InvariantSector(n, POLY, hat)
    ms = InvariantSector(n, FORM, hat)
    # constant coefficients: Schouten bracket, ∂̄, ∂ and [i_v, ∂] all vanish
    bracket = _table((gs, gs), gs, lambda a, b: _schouten_invariant(a, b))
    circ = _table((gs, ms), ms, lambda v, a: contraction_by_polyvector(v)(a))
    bullet = {}
    gd = LinearOp(gs.basis, _op_cols(gs, gs, build_operators_form_dbar(n)), (0, 1))
    d0 = LinearOp(ms.basis, _op_cols(ms, ms, build_operators_form_dbar(n)), (0, 1))
    d1 = LinearOp(ms.basis, _op_cols(ms, ms, _holo_d(n)), (1, 0))
    structure = ModuleStructure(gs.basis, lambda i, j: bracket.get((i, j)), gd, ms.basis,
                                lambda i, j: bullet.get((i, j)), lambda i, j: circ.get((i, j)),
                                [d0, d1], circ_nu=-2, label="B-model n=%d" % n)
    eta = GradedElement.basis_vector(ms.basis, ms.index[(1 << n) - 1])
    weights = [n + bd[1] - bd[0] for bd in ms.basis.bidegrees]
    vol = Fraction(1) if volume is None else Fraction(volume)
    top = (1 << (2 * n)) - 1
    gram = []
    for i in range(len(ms.masks)):
        si = ms.section(i)
        row = []
        for j in range(len(ms.masks)):
            w = si.wedge(ms.section(j))
            row.append(vol * w.terms.get(((0,) * n, (0,) * n, top), Fraction(0)))
        p, q = ms.basis.bidegrees[i]
        if (n * (n + 1) // 2 + (n + 1) * p + n * q) % 2:
            row = [-x for x in row]
        gram.append(row)
    return ModelPair("B(n=%d)" % n, structure, n, eta, weights, gram, gs.index[0], gs, ms, G,
                     pairing_parity=n % 2)


def _holo_d(n):
    def d(s):
        out = s.zero()
        for a in range(n):
            out = out + s.z_deriv(a).odd_mul(a)
        return out
    return Op(d, 1, "d")


def _schouten_invariant(a, b):
    # on constant-coefficient polyvector-valued forms every term of the
    # Schouten bracket carries a derivative of a coefficient
    if not (a.is_invariant() and b.is_invariant()):
        raise DomainError("only the invariant sector is implemented")
    return a.zero()


def dgbv_pair(A):
    """The dGBV route: g = (A,[•],d), m = A[[ħ,ħ^{-1}]] with ħ^{-1}∘ and d + ħΔ."""
    from .dgbv import dgbv_module
    if A.integral is None:
        raise ArgumentError("the period-map pipeline needs an integral")
    structure = dgbv_module(A, hbar=True)
    weights = [A.n + bd[1] - bd[0] for bd in A.basis.bidegrees]
    eta = GradedElement.basis_vector(A.basis, A.unit).scale_hbar(weights[A.unit])
    gram = [[sum((A.integral[k] * c for k, c in A.product.table.get((i, j), {}).items()),
                 Fraction(0)) for j in range(A.dim)] for i in range(A.dim)]
    return ModelPair(A.name, structure, A.n, eta, weights, gram, A.unit)
