"""
Exact scalars, Koszul signs, graded bases, truncated super power series,
hbar-Laurent coefficients, sparse elements and linear operators.

Every sign produced anywhere in the package comes from :func:`koszul_sign`
(directly or through :func:`swap_sign` / :meth:`ParamSpace.mono_mul`).

Elements are stored flat: a term is keyed by ``(index, mono, nu)`` and
means ``t^mono * nu^nu * e_index`` with the parameter monomial written on
the left of the basis vector and ``nu = hbar^(1/2)``.
"""

from fractions import Fraction
from dataclasses import dataclass

from . import linalg
from .errors import (ArgumentError, StructuralError, InversionError, WindowError,
                     ParseError)


# ---------------------------------------------------------------- scalars

def scalar(x):
    """Coerce ints, Fractions and ``"num/den"`` strings to ``Fraction``."""
    if isinstance(x, Fraction):
        return x
    if isinstance(x, int):
        return Fraction(x)
    if isinstance(x, str):
        try:
            return Fraction(x.strip())
        except (ValueError, ZeroDivisionError) as exc:
            raise ParseError("bad rational %r" % x) from exc
    raise ArgumentError("not an exact scalar: %r" % (x,))


def fmt(x):
    """Serialize a rational as ``"num/den"`` (``"num"`` when integral)."""
    x = Fraction(x)
    if x.denominator == 1:
        return str(x.numerator)
    return "%d/%d" % (x.numerator, x.denominator)


# ------------------------------------------------------------------ signs

def koszul_sign(parities, permutation):
    """
    Sign picked up by reordering graded objects.

    ``permutation[k]`` is the original position of the object that ends up
    in slot ``k``.  Returns ``+1`` or ``-1``: one factor of ``-1`` for each
    pair of odd objects whose relative order is reversed.
    """
    n = len(parities)
    perm = list(permutation)
    if len(perm) != n or sorted(perm) != list(range(n)):
        raise ArgumentError("malformed permutation %r for %d objects" % (permutation, n))
    odd = [p for p in perm if parities[p] % 2]
    inversions = 0
    for i in range(len(odd)):
        oi = odd[i]
        for j in range(i + 1, len(odd)):
            if oi > odd[j]:
                inversions += 1
    return -1 if inversions % 2 else 1


def swap_sign(p, q):
    """Sign for moving an object of parity ``q`` past one of parity ``p``."""
    return koszul_sign((p % 2, q % 2), (1, 0))


def parity_of_bidegree(bd):
    return (bd[0] + bd[1]) % 2


# ------------------------------------------------------------ graded basis

Bidegree = tuple


class GradedBasis:
    """Ordered list of named, bigraded basis symbols."""

    def __init__(self, entries):
        names = [e[0] for e in entries]
        if len(set(names)) != len(names):
            raise StructuralError("duplicate basis symbols")
        self.names = tuple(names)
        self.bidegrees = tuple((int(e[1][0]), int(e[1][1])) for e in entries)
        self.parities = tuple(parity_of_bidegree(b) for b in self.bidegrees)
        self._index = {nm: i for i, nm in enumerate(self.names)}

    def __len__(self):
        return len(self.names)

    @property
    def dim(self):
        return len(self.names)

    def index(self, name):
        try:
            return self._index[name]
        except KeyError:
            raise StructuralError("unknown basis symbol %r" % name) from None

    def parity(self, i):
        return self.parities[i]

    def __eq__(self, other):
        return (isinstance(other, GradedBasis) and self.names == other.names
                and self.bidegrees == other.bidegrees)

    def __hash__(self):
        return hash((self.names, self.bidegrees))

    def __repr__(self):
        return "GradedBasis(%d: %s)" % (len(self), ", ".join(self.names[:6]))


# ---------------------------------------------------------- parameter space

class ParamSpace:
    """
    Deformation parameters t^a with parities.  Monomials are exponent tuples
    in canonical (index) order; odd exponents are 0 or 1.
    """

    def __init__(self, names, parities):
        if len(names) != len(parities):
            raise ArgumentError("names/parities length mismatch")
        self.names = tuple(names)
        self.parities = tuple(int(p) % 2 for p in parities)
        self.n = len(self.names)
        self._mul_cache = {}

    def __eq__(self, other):
        return (isinstance(other, ParamSpace) and self.names == other.names
                and self.parities == other.parities)

    def __hash__(self):
        return hash((self.names, self.parities))

    def __repr__(self):
        return "ParamSpace(%s)" % ", ".join(self.names)

    @property
    def one(self):
        return (0,) * self.n

    def var(self, a):
        m = [0] * self.n
        m[a] = 1
        return tuple(m)

    def degree(self, mono):
        return sum(mono)

    def mono_parity(self, mono):
        return sum(e for e, p in zip(mono, self.parities) if p) % 2

    def mono_mul(self, m1, m2):
        """Return ``(sign, m1*m2)`` or ``None`` when an odd square appears."""
        key = (m1, m2)
        hit = self._mul_cache.get(key)
        if hit is not None:
            return hit if hit != 0 else None
        odd1 = [i for i, e in enumerate(m1) if e and self.parities[i]]
        odd2 = [i for i, e in enumerate(m2) if e and self.parities[i]]
        if set(odd1) & set(odd2):
            self._mul_cache[key] = 0
            return None
        seq = odd1 + odd2
        perm = sorted(range(len(seq)), key=lambda k: seq[k])
        s = koszul_sign([1] * len(seq), perm)
        res = (s, tuple(a + b for a, b in zip(m1, m2)))
        self._mul_cache[key] = res
        return res

    def mono_deriv(self, a, mono):
        """Left derivative d/dt^a of a monomial: ``(coeff, mono')`` or None."""
        e = mono[a]
        if not e:
            return None
        rest = list(mono)
        rest[a] -= 1
        if self.parities[a]:
            before = [i for i in range(a) if mono[i] and self.parities[i]]
            seq = before + [a]
            # move t^a from the back of the odd prefix to the front
            perm = [len(seq) - 1] + list(range(len(seq) - 1))
            c = koszul_sign([1] * len(seq), perm)
        else:
            c = e
        return c, tuple(rest)

    def monomials(self, max_degree):
        """All monomials of total degree <= max_degree, sorted canonically."""
        out = []

        def rec(i, cur, left):
            if i == self.n:
                out.append(tuple(cur))
                return
            top = 1 if self.parities[i] else left
            for e in range(min(top, left) + 1):
                cur.append(e)
                rec(i + 1, cur, left - e)
                cur.pop()

        rec(0, [], max_degree)
        out.sort(key=mono_key)
        return out


def mono_key(mono):
    return (sum(mono), tuple(-e for e in mono))


def mono_str(params, mono):
    if not any(mono):
        return "1"
    parts = []
    for nm, e in zip(params.names, mono):
        if e == 1:
            parts.append(nm)
        elif e:
            parts.append("%s^%d" % (nm, e))
    return "*".join(parts)


# ------------------------------------------------------------ hbar Laurent

class HbarLaurent:
    """Finite Laurent polynomial in nu = hbar^(1/2) with a hard window."""

    __slots__ = ("terms", "window")

    def __init__(self, terms=None, window=(-64, 64)):
        self.window = (int(window[0]), int(window[1]))
        self.terms = {}
        for k, c in (terms or {}).items():
            c = scalar(c)
            if c:
                self._check(k)
                self.terms[int(k)] = c

    def _check(self, k):
        if not self.window[0] <= k <= self.window[1]:
            raise WindowError("nu^%d outside window %r" % (k, self.window))

    @classmethod
    def const(cls, c, window=(-64, 64)):
        return cls({0: c}, window)

    def _new(self, terms):
        return HbarLaurent(terms, self.window)

    def __bool__(self):
        return bool(self.terms)

    def __eq__(self, other):
        if isinstance(other, HbarLaurent):
            return self.terms == other.terms
        if other == 0:
            return not self.terms
        return self.terms == ({0: Fraction(other)} if other else {})

    def __add__(self, other):
        if not isinstance(other, HbarLaurent):
            other = HbarLaurent.const(other, self.window)
        t = dict(self.terms)
        for k, c in other.terms.items():
            t[k] = t.get(k, 0) + c
        return self._new(t)

    __radd__ = __add__

    def __neg__(self):
        return self._new({k: -c for k, c in self.terms.items()})

    def __sub__(self, other):
        return self + (-other)

    def __mul__(self, other):
        if not isinstance(other, HbarLaurent):
            other = scalar(other)
            return self._new({k: c * other for k, c in self.terms.items()})
        t = {}
        for k1, c1 in self.terms.items():
            for k2, c2 in other.terms.items():
                t[k1 + k2] = t.get(k1 + k2, 0) + c1 * c2
        return self._new(t)

    __rmul__ = __mul__

    def shift(self, k):
        return self._new({p + k: c for p, c in self.terms.items()})

    def hbar_powers(self):
        return sorted(Fraction(k, 2) for k in self.terms)

    def __repr__(self):
        if not self.terms:
            return "0"
        return " + ".join("%s*nu^%d" % (fmt(c), k) for k, c in sorted(self.terms.items()))


# ------------------------------------------------------------ super series

class SuperSeries:
    """
    Truncated power series in even and odd parameters.  Coefficients are
    Fractions or any ring type supporting ``+``, ``*`` and truth testing
    (e.g. :class:`HbarLaurent`).
    """

    __slots__ = ("params", "order", "terms")

    def __init__(self, params, order, terms=None):
        if order < 0:
            raise ArgumentError("truncation order must be >= 0")
        self.params = params
        self.order = order
        self.terms = {}
        for m, c in (terms or {}).items():
            if sum(m) <= order and c:
                if any(m[i] > 1 for i in range(params.n) if params.parities[i]):
                    continue
                self.terms[tuple(m)] = c

    @classmethod
    def const(cls, params, order, c):
        return cls(params, order, {params.one: c})

    @classmethod
    def var(cls, params, order, a):
        return cls(params, order, {params.var(a): Fraction(1)})

    def _new(self, terms):
        return SuperSeries(self.params, self.order, terms)

    def _coerce(self, other):
        if isinstance(other, SuperSeries):
            if other.params != self.params:
                raise StructuralError("series over different parameter lists")
            return other
        return SuperSeries.const(self.params, self.order, other)

    def __bool__(self):
        return bool(self.terms)

    def __eq__(self, other):
        if isinstance(other, SuperSeries):
            return self.params == other.params and self.terms == other.terms
        if other == 0:
            return not self.terms
        return NotImplemented

    def __add__(self, other):
        other = self._coerce(other)
        t = dict(self.terms)
        for m, c in other.terms.items():
            t[m] = t.get(m, 0) + c
        return SuperSeries(self.params, min(self.order, other.order), t)

    __radd__ = __add__

    def __neg__(self):
        return self._new({m: -c for m, c in self.terms.items()})

    def __sub__(self, other):
        return self + (-self._coerce(other))

    def __rsub__(self, other):
        return self._coerce(other) - self

    def __mul__(self, other):
        if not isinstance(other, SuperSeries):
            return self._new({m: c * other for m, c in self.terms.items()})
        other = self._coerce(other)
        order = min(self.order, other.order)
        pm = self.params
        t = {}
        for m1, c1 in self.terms.items():
            d1 = sum(m1)
            for m2, c2 in other.terms.items():
                if d1 + sum(m2) > order:
                    continue
                r = pm.mono_mul(m1, m2)
                if r is None:
                    continue
                s, m = r
                v = c1 * c2
                t[m] = t.get(m, 0) + (v if s > 0 else -v)
        return SuperSeries(self.params, order, t)

    def __rmul__(self, other):
        return self._new({m: other * c for m, c in self.terms.items()})

    def truncate(self, order):
        return SuperSeries(self.params, min(order, self.order), self.terms)

    def coeff(self, mono):
        return self.terms.get(tuple(mono), 0)

    def homogeneous(self, k):
        return self._new({m: c for m, c in self.terms.items() if sum(m) == k})

    def deriv(self, a):
        t = {}
        for m, c in self.terms.items():
            r = self.params.mono_deriv(a, m)
            if r is None:
                continue
            f, m2 = r
            t[m2] = t.get(m2, 0) + c * f
        return SuperSeries(self.params, max(self.order - 1, 0), t)

    def parity(self):
        """Parity if homogeneous, else None (zero series reports 0)."""
        ps = {self.params.mono_parity(m) for m in self.terms}
        if not ps:
            return 0
        return ps.pop() if len(ps) == 1 else None

    def min_degree(self):
        return min((sum(m) for m in self.terms), default=None)

    def substitute(self, images):
        """Compose with parity-preserving series ``images[a]`` (no constant term)."""
        if len(images) != self.params.n:
            raise ArgumentError("need one image per parameter")
        target = images[0].params if images else self.params
        order = min([self.order] + [g.order for g in images])
        one = SuperSeries.const(target, order, Fraction(1))
        powers = {}

        def power(a, e):
            key = (a, e)
            if key not in powers:
                powers[key] = one if e == 0 else power(a, e - 1) * images[a]
            return powers[key]

        out = SuperSeries(target, order)
        for m, c in sorted(self.terms.items(), key=lambda kv: mono_key(kv[0])):
            term = one
            for a, e in enumerate(m):
                if e:
                    term = term * power(a, e)
                    if not term:
                        break
            if term:
                out = out + term * c
        return out

    def __repr__(self):
        if not self.terms:
            return "0"
        items = sorted(self.terms.items(), key=lambda kv: mono_key(kv[0]))
        return " + ".join("(%s)*%s" % (c if not isinstance(c, Fraction) else fmt(c),
                                       mono_str(self.params, m)) for m, c in items)


def series_invert_map(F):
    """
    Formal inverse of a parameter map.

    ``F[i]`` is the i-th component of a map with ``F(0) = 0`` whose linear
    part is invertible.  Returns ``G`` with ``F∘G = G∘F = id`` modulo
    terms of degree > N, by fixed-point iteration ``G = L^-1 (t - NL(G))``.
    """
    if not F:
        return []
    params = F[0].params
    N = min(f.order for f in F)
    n = params.n
    if len(F) != n:
        raise ArgumentError("need exactly one series per parameter")
    for i, f in enumerate(F):
        if f.coeff(params.one):
            raise ArgumentError("component %d has a constant term" % i)
        p = f.parity()
        if p is not None and p != params.parities[i] and f:
            raise ArgumentError("component %d has parity %d, expected %d"
                                % (i, p, params.parities[i]))
    L = [[Fraction(F[i].coeff(params.var(j))) for j in range(n)] for i in range(n)]
    try:
        Linv = linalg.inverse(L)
    except InversionError as exc:
        dirs = []
        for v in exc.directions:
            dirs.append([params.names[j] for j, x in enumerate(v) if x])
        zero_rows = [params.names[i] for i in range(n) if not any(L[i])]
        raise InversionError("linear part is singular; degenerate directions %s%s"
                             % (dirs, "; zero rows %s" % zero_rows if zero_rows else ""),
                             dirs) from None
    ident = [SuperSeries.var(params, N, a) for a in range(n)]
    nonlin = [f - SuperSeries(params, N, {params.var(j): L[i][j] for j in range(n)})
              for i, f in enumerate(F)]
    G = [SuperSeries(params, N, {params.var(j): Linv[i][j] for j in range(n)})
         for i in range(n)]
    for _ in range(N):
        comp = [h.substitute(G) for h in nonlin]
        rhs = [ident[i] - comp[i] for i in range(n)]
        G = [sum((rhs[j] * Linv[i][j] for j in range(n) if Linv[i][j]),
                 SuperSeries(params, N)) for i in range(n)]
    return G


# -------------------------------------------------------------- elements

class GradedElement:
    """
    Sparse element over a :class:`GradedBasis`.  Terms are keyed by
    ``(index, mono, nu)``; plain elements use ``params=None`` and the keys
    ``(index, (), 0)``.
    """

    __slots__ = ("basis", "params", "order", "terms")

    def __init__(self, basis, terms=None, params=None, order=None):
        self.basis = basis
        self.params = params
        self.order = order
        self.terms = {}
        dim = len(basis)
        for key, c in (terms or {}).items():
            if not c:
                continue
            i, m, nu = key
            if not 0 <= i < dim:
                raise StructuralError("basis index %d out of range" % i)
            if order is not None and sum(m) > order:
                continue
            self.terms[key] = Fraction(c) if not isinstance(c, Fraction) else c

    # construction helpers
    @classmethod
    def basis_vector(cls, basis, i, params=None, order=None):
        mono = params.one if params is not None else ()
        return cls(basis, {(i, mono, 0): Fraction(1)}, params, order)

    @classmethod
    def from_vector(cls, basis, vec, params=None, order=None):
        mono = params.one if params is not None else ()
        return cls(basis, {(i, mono, 0): c for i, c in enumerate(vec) if c}, params, order)

    @classmethod
    def from_dict(cls, basis, d):
        """Plain element from ``{symbol_or_index: coeff}``."""
        terms = {}
        for k, c in d.items():
            i = basis.index(k) if isinstance(k, str) else k
            terms[(i, (), 0)] = scalar(c)
        return cls(basis, terms)

    def _like(self, terms, params=None, order=None):
        return GradedElement(self.basis, terms, params if params is not None else self.params,
                             order if order is not None else self.order)

    def zero(self):
        return self._like({})

    def lift(self, params, order):
        """View a plain element as a constant series."""
        if self.params is not None:
            if self.params != params:
                raise StructuralError("element already carries other parameters")
            return GradedElement(self.basis, self.terms, params, order)
        one = params.one
        return GradedElement(self.basis, {(i, one, nu): c for (i, _, nu), c in self.terms.items()},
                             params, order)

    def _check(self, other):
        if self.basis != other.basis:
            raise StructuralError("elements live over different bases")

    def _merge_meta(self, other):
        params = self.params or other.params
        if self.params is not None and other.params is not None and self.params != other.params:
            raise StructuralError("parameter lists differ")
        orders = [o for o in (self.order, other.order) if o is not None]
        order = min(orders) if orders else None
        return params, order

    def _align(self, other):
        a, b = self, other
        if a.params is None and b.params is not None:
            a = a.lift(b.params, b.order)
        elif b.params is None and a.params is not None:
            b = b.lift(a.params, a.order)
        return a, b

    def __bool__(self):
        return bool(self.terms)

    def __eq__(self, other):
        if isinstance(other, GradedElement):
            a, b = self._align(other)
            return a.basis == b.basis and a.terms == b.terms
        if other == 0:
            return not self.terms
        return NotImplemented

    def __add__(self, other):
        if isinstance(other, int) and other == 0:
            return self
        self._check(other)
        a, b = self._align(other)
        params, order = a._merge_meta(b)
        t = dict(a.terms)
        for k, c in b.terms.items():
            t[k] = t.get(k, 0) + c
        return GradedElement(self.basis, t, params, order)

    __radd__ = __add__

    def __neg__(self):
        return self._like({k: -c for k, c in self.terms.items()})

    def __sub__(self, other):
        return self + (-other)

    def __mul__(self, c):
        c = scalar(c)
        return self._like({k: v * c for k, v in self.terms.items()})

    __rmul__ = __mul__

    def scale_hbar(self, k):
        """Multiply by nu^k."""
        return self._like({(i, m, nu + k): c for (i, m, nu), c in self.terms.items()})

    def series_mul(self, s):
        """Left multiplication by a scalar series ``s`` (no sign: s sits left)."""
        if not isinstance(s, SuperSeries):
            return self * s
        pm = s.params
        base = self if self.params is not None else self.lift(pm, s.order)
        order = min(s.order, base.order if base.order is not None else s.order)
        t = {}
        for m1, c1 in s.terms.items():
            d1 = sum(m1)
            for (i, m2, nu), c2 in base.terms.items():
                if d1 + sum(m2) > order:
                    continue
                r = pm.mono_mul(m1, m2)
                if r is None:
                    continue
                sg, m = r
                key = (i, m, nu)
                v = c1 * c2
                t[key] = t.get(key, 0) + (v if sg > 0 else -v)
        return GradedElement(self.basis, t, pm, order)

    def truncate(self, order):
        return GradedElement(self.basis, {k: c for k, c in self.terms.items() if sum(k[1]) <= order},
                             self.params, order)

    def homogeneous(self, k):
        return self._like({key: c for key, c in self.terms.items() if sum(key[1]) == k})

    def vector(self):
        """Dense coefficient vector of a plain (or degree-0, nu^0) element."""
        v = [Fraction(0)] * len(self.basis)
        for (i, m, nu), c in self.terms.items():
            if any(m) or nu:
                raise StructuralError("element is not plain")
            v[i] += c
        return v

    def coefficient(self, i):
        """Coefficient of basis vector ``i`` as a series (or Fraction)."""
        if self.params is None:
            return sum((c for (j, _, nu), c in self.terms.items() if j == i and nu == 0), Fraction(0))
        t = {}
        for (j, m, nu), c in self.terms.items():
            if j == i:
                h = t.setdefault(m, HbarLaurent(window=(-10 ** 6, 10 ** 6)))
                t[m] = h + HbarLaurent({nu: c}, h.window)
        if all(set(h.terms) <= {0} for h in t.values()):
            t = {m: h.terms.get(0, Fraction(0)) for m, h in t.items()}
        return SuperSeries(self.params, self.order if self.order is not None else 0, t)

    def bidegree(self):
        bds = {self.basis.bidegrees[i] for (i, _, _) in self.terms}
        if len(bds) != 1:
            return None
        return bds.pop()

    def parity(self):
        """Total parity (basis + parameters) if homogeneous, else None."""
        ps = set()
        for (i, m, _) in self.terms:
            p = self.basis.parities[i]
            if self.params is not None:
                p += self.params.mono_parity(m)
            ps.add(p % 2)
        if not ps:
            return 0
        return ps.pop() if len(ps) == 1 else None

    def components(self):
        """Split into basis-homogeneous plain pieces (by basis parity)."""
        out = {}
        for key, c in self.terms.items():
            out.setdefault(self.basis.parities[key[0]], {})[key] = c
        return {p: self._like(t) for p, t in out.items()}

    def nu_powers(self):
        return sorted({nu for (_, _, nu) in self.terms})

    def deriv(self, a):
        """Left derivative in the parameter t^a."""
        pm = self.params
        t = {}
        for (i, m, nu), c in self.terms.items():
            r = pm.mono_deriv(a, m)
            if r is None:
                continue
            f, m2 = r
            key = (i, m2, nu)
            t[key] = t.get(key, 0) + c * f
        return GradedElement(self.basis, t, pm, self.order - 1 if self.order else 0)

    def to_str(self):
        if not self.terms:
            return "0"
        parts = []
        for (i, m, nu), c in sorted(self.terms.items(), key=lambda kv: (sum(kv[0][1]), kv[0][0], kv[0][2])):
            s = fmt(c)
            if self.params is not None and any(m):
                s += "*" + mono_str(self.params, m)
            if nu:
                s += "*nu^%d" % nu
            parts.append("%s*%s" % (s, self.basis.names[i]))
        return " + ".join(parts)

    __repr__ = to_str


# ---------------------------------------------------------- linear maps

class LinearOp:
    """
    Sparse linear map on a basis.  ``cols[j]`` is the image of ``e_j`` as a
    ``{i: coeff}`` dict.  ``shift`` is the declared bidegree shift.
    """

    def __init__(self, basis, cols=None, shift=(0, 0), parity=None, nu_shift=0):
        self.basis = basis
        self.shift = (int(shift[0]), int(shift[1]))
        self.parity = parity_of_bidegree(self.shift) if parity is None else parity % 2
        self.nu_shift = nu_shift
        self.cols = {}
        for j, col in (cols or {}).items():
            col = {i: scalar(c) for i, c in col.items() if c}
            if col:
                self.cols[j] = col

    @classmethod
    def from_matrix(cls, basis, M, shift=(0, 0), parity=None):
        cols = {}
        for i, row in enumerate(M):
            for j, c in enumerate(row):
                if c:
                    cols.setdefault(j, {})[i] = c
        return cls(basis, cols, shift, parity)

    @classmethod
    def identity(cls, basis):
        return cls(basis, {j: {j: 1} for j in range(len(basis))})

    @classmethod
    def zero(cls, basis, shift=(0, 0), parity=None):
        return cls(basis, {}, shift, parity)

    def matrix(self):
        n = len(self.basis)
        M = linalg.zeros(n, n)
        for j, col in self.cols.items():
            for i, c in col.items():
                M[i][j] = c
        return M

    def is_zero(self):
        return not self.cols

    def shift_violations(self):
        """Entries that break the declared bidegree shift or parity."""
        bad = []
        bd = self.basis.bidegrees
        for j, col in self.cols.items():
            for i in col:
                want = (bd[j][0] + self.shift[0], bd[j][1] + self.shift[1])
                if bd[i] != want:
                    bad.append((self.basis.names[j], self.basis.names[i]))
        return bad

    def apply(self, x):
        if x.basis != self.basis:
            raise StructuralError("operator and element over different bases")
        t = {}
        pm = x.params
        for (j, m, nu), c in x.terms.items():
            col = self.cols.get(j)
            if not col:
                continue
            if pm is not None and self.parity and pm.mono_parity(m):
                c = c * swap_sign(self.parity, 1)
            for i, a in col.items():
                key = (i, m, nu + self.nu_shift)
                t[key] = t.get(key, 0) + a * c
        return GradedElement(self.basis, t, pm, x.order)

    __call__ = apply

    def compose(self, other):
        """self ∘ other."""
        if self.basis != other.basis:
            raise StructuralError("operators over different bases")
        cols = {}
        for j, col in other.cols.items():
            out = {}
            for k, b in col.items():
                for i, a in self.cols.get(k, {}).items():
                    out[i] = out.get(i, 0) + a * b
            cols[j] = out
        shift = (self.shift[0] + other.shift[0], self.shift[1] + other.shift[1])
        return LinearOp(self.basis, cols, shift, self.parity + other.parity,
                        self.nu_shift + other.nu_shift)

    def __add__(self, other):
        if self.basis != other.basis:
            raise StructuralError("operators over different bases")
        cols = {j: dict(c) for j, c in self.cols.items()}
        for j, col in other.cols.items():
            tgt = cols.setdefault(j, {})
            for i, c in col.items():
                tgt[i] = tgt.get(i, 0) + c
        return LinearOp(self.basis, cols, self.shift, self.parity, self.nu_shift)

    def __mul__(self, c):
        c = scalar(c)
        return LinearOp(self.basis, {j: {i: a * c for i, a in col.items()} for j, col in self.cols.items()},
                        self.shift, self.parity, self.nu_shift)

    __rmul__ = __mul__

    def __sub__(self, other):
        return self + other * -1

    def __eq__(self, other):
        return isinstance(other, LinearOp) and self.basis == other.basis and self.cols == other.cols

    def __repr__(self):
        return "LinearOp(shift=%r, parity=%d, nnz=%d)" % (
            self.shift, self.parity, sum(len(c) for c in self.cols.values()))


def op_commutator(P, Q):
    """Super-commutator ``PQ - (-1)^{|P||Q|} QP``."""
    if P.basis != Q.basis:
        raise StructuralError("operators over different bases")
    s = swap_sign(P.parity, Q.parity)
    out = P.compose(Q) - Q.compose(P) * s
    out.shift = (P.shift[0] + Q.shift[0], P.shift[1] + Q.shift[1])
    out.parity = (P.parity + Q.parity) % 2
    return out


# --------------------------------------------------------------- products

class StructureConstants:
    """Bilinear product table ``(i, j) -> {k: c}`` on a basis."""

    def __init__(self, basis, table):
        self.basis = basis
        self.table = {}
        for (i, j), out in table.items():
            out = {k: scalar(c) for k, c in out.items() if c}
            if out:
                self.table[(i, j)] = out

    @classmethod
    def from_triples(cls, basis, triples):
        t = {}
        for a, b, c, coeff in triples:
            ia = basis.index(a) if isinstance(a, str) else a
            ib = basis.index(b) if isinstance(b, str) else b
            ic = basis.index(c) if isinstance(c, str) else c
            d = t.setdefault((ia, ib), {})
            d[ic] = d.get(ic, 0) + scalar(coeff)
        return cls(basis, t)

    def triples(self):
        for (i, j), out in sorted(self.table.items()):
            for k, c in sorted(out.items()):
                yield i, j, k, c


def bilinear(a, b, table, op_parity=0, nu_shift=0, out_basis=None):
    """
    Apply a basis-level bilinear map to series elements with Koszul signs.

    ``table(i, j)`` returns ``{k: c}``.  The map has parity ``op_parity``;
    moving ``t^m'`` of ``b`` past the operation and ``e_i`` gives the sign.
    ``out_basis`` defaults to the common basis of ``a`` and ``b``.
    """
    if out_basis is None:
        if a.basis != b.basis:
            raise StructuralError("elements over different bases")
        out_basis = a.basis
    a, b = a._align(b)
    pm = a.params
    params, order = a._merge_meta(b)
    par = a.basis.parities
    t = {}
    for (i, m1, nu1), c1 in a.terms.items():
        d1 = sum(m1)
        for (j, m2, nu2), c2 in b.terms.items():
            if order is not None and d1 + sum(m2) > order:
                continue
            out = table(i, j)
            if not out:
                continue
            c = c1 * c2
            if pm is not None:
                p2 = pm.mono_parity(m2)
                if p2:
                    c = c * swap_sign(par[i] + op_parity, p2)
                r = pm.mono_mul(m1, m2)
                if r is None:
                    continue
                sg, m = r
                if sg < 0:
                    c = -c
            else:
                m = ()
            nu = nu1 + nu2 + nu_shift
            for k, s in out.items():
                key = (k, m, nu)
                t[key] = t.get(key, 0) + s * c
    return GradedElement(out_basis, t, params, order)


def mul(a, b, sc):
    """Product of two elements with structure constants ``sc``."""
    if a.basis != sc.basis or b.basis != sc.basis:
        raise StructuralError("basis mismatch in product")
    return bilinear(a, b, lambda i, j: sc.table.get((i, j)))
