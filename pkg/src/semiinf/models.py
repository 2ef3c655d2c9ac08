"""
Built-in finite-dimensional algebras.

Every fixture is generated here in code; the bundled JSON specs are
serialized from these builders.
"""

from fractions import Fraction
from itertools import product as iproduct

from .dgbv import DgbvAlgebra
from .errors import ArgumentError
from .super_core import (GradedBasis, GradedElement, LinearOp, StructureConstants,
                         koszul_sign, parity_of_bidegree, swap_sign)


class MonomialAlgebra:
    """
    Graded-commutative algebra on generators with nilpotency caps.

    ``gens`` is a list of ``(name, bidegree, cap)``; odd generators always
    have cap 2.  Basis vectors are the monomials below the caps, ordered by
    total degree then lexicographically.
    """

    def __init__(self, gens):
        self.names = [g[0] for g in gens]
        self.bidegrees = [tuple(g[1]) for g in gens]
        self.parities = [parity_of_bidegree(b) for b in self.bidegrees]
        self.caps = [2 if p else int(g[2]) for g, p in zip(gens, self.parities)]
        monos = list(iproduct(*[range(c) for c in self.caps]))
        monos.sort(key=lambda m: (sum(m), tuple(-e for e in m)))
        self.monos = monos
        self.index = {m: i for i, m in enumerate(monos)}
        entries = []
        for m in monos:
            bd = (sum(e * b[0] for e, b in zip(m, self.bidegrees)),
                  sum(e * b[1] for e, b in zip(m, self.bidegrees)))
            entries.append((self.mono_name(m), bd))
        self.basis = GradedBasis(entries)

    def mono_name(self, m):
        parts = []
        for nm, e in zip(self.names, m):
            if e == 1:
                parts.append(nm)
            elif e:
                parts.append("%s^%d" % (nm, e))
        return "*".join(parts) if parts else "1"

    def mono_mul(self, m1, m2):
        """``(sign, m)`` or None when the product vanishes."""
        m = tuple(a + b for a, b in zip(m1, m2))
        if any(e >= c for e, c in zip(m, self.caps)):
            return None
        odd1 = [i for i, e in enumerate(m1) if e and self.parities[i]]
        odd2 = [i for i, e in enumerate(m2) if e and self.parities[i]]
        seq = odd1 + odd2
        perm = sorted(range(len(seq)), key=lambda k: seq[k])
        return koszul_sign([1] * len(seq), perm), m

    def product(self):
        table = {}
        for i, m1 in enumerate(self.monos):
            for j, m2 in enumerate(self.monos):
                r = self.mono_mul(m1, m2)
                if r is not None:
                    table[(i, j)] = {self.index[r[1]]: r[0]}
        return StructureConstants(self.basis, table)

    def gen_index(self, name):
        return self.names.index(name)

    def mono_of(self, name):
        m = [0] * len(self.names)
        m[self.gen_index(name)] = 1
        return tuple(m)

    def unit(self):
        return self.index[(0,) * len(self.names)]

    def top(self):
        return max(range(len(self.monos)), key=lambda i: (sum(self.monos[i]), -i))

    def _vec_mul(self, u, v):
        out = {}
        for a, ca in u.items():
            for b, cb in v.items():
                r = self.mono_mul(self.monos[a], self.monos[b])
                if r is None:
                    continue
                k = self.index[r[1]]
                out[k] = out.get(k, 0) + r[0] * ca * cb
        return {k: c for k, c in out.items() if c}

    def derivation(self, images, parity):
        """
        Derivation of the given parity from generator images
        ``{gen_name: {mono_index: coeff}}`` (missing generators map to 0).
        """
        img = {}
        for nm, v in images.items():
            img[self.gen_index(nm)] = {k: Fraction(c) for k, c in v.items()}
        cols = {}
        memo = {}

        def D(m):
            if m in memo:
                return memo[m]
            first = next((g for g, e in enumerate(m) if e), None)
            if first is None:
                memo[m] = {}
                return memo[m]
            g = [0] * len(m)
            g[first] = 1
            rest = list(m)
            rest[first] -= 1
            rest = tuple(rest)
            # m = g * rest, since g is the lowest generator present
            out = self._vec_mul(img.get(first, {}), {self.index[rest]: Fraction(1)})
            sign = swap_sign(parity, self.parities[first])
            tail = self._vec_mul({self.index[tuple(g)]: Fraction(1)}, D(rest))
            for k, c in tail.items():
                out[k] = out.get(k, 0) + sign * c
            memo[m] = {k: c for k, c in out.items() if c}
            return memo[m]

        for j, m in enumerate(self.monos):
            v = D(m)
            if v:
                cols[j] = v
        return cols

    def left_mul(self, v):
        return {j: self._vec_mul(v, {j: Fraction(1)}) for j in range(len(self.monos))}

    def op(self, cols, shift):
        return LinearOp(self.basis, cols, shift)

    def vec(self, expr):
        """``{mono_name: coeff}`` -> sparse index vector."""
        return {self.basis.index(k): Fraction(c) for k, c in expr.items()}


def compose_cols(*ops):
    """Compose sparse column maps right-to-left: compose_cols(A, B) = A∘B."""
    out = ops[-1]
    for P in reversed(ops[:-1]):
        new = {}
        for j, col in out.items():
            v = {}
            for k, c in col.items():
                for i, a in P.get(k, {}).items():
                    v[i] = v.get(i, 0) + a * c
            v = {i: c for i, c in v.items() if c}
            if v:
                new[j] = v
        out = new
    return out


# --------------------------------------------------------------- fixtures

def truncated_poly_model():
    """
    k[x]/(x^3) ⊗ Λ(psi) with d = 0 and Δ = x ∂_x ∂_psi.

    The Euler-weighted operator preserves the ideal (x^3), so it descends to
    the truncation as an honest order-2 operator; the bare ∂_x ∂_psi does not.
    """
    M = MonomialAlgebra([("x", (0, 0), 3), ("psi", (1, 0), 2)])
    dx = M.derivation({"x": {M.unit(): 1}}, 0)
    dpsi = M.derivation({"psi": {M.unit(): 1}}, 1)
    lx = M.left_mul({M.basis.index("x"): Fraction(1)})
    delta = M.op(compose_cols(lx, dx, dpsi), (-1, 0))
    d = LinearOp.zero(M.basis, (0, 1))
    return DgbvAlgebra("truncated-poly", M.basis, 1, M.unit(), M.product(), d, delta)


def heisenberg_ce_model():
    """Chevalley–Eilenberg algebra of the 3-dim Heisenberg Lie algebra, Δ = 0."""
    M = MonomialAlgebra([("xs", (0, 1), 2), ("ys", (0, 1), 2), ("zs", (0, 1), 2)])
    d = M.op(M.derivation({"zs": M.vec({"xs*ys": -1})}, 1), (0, 1))
    delta = LinearOp.zero(M.basis, (-1, 0))
    integral = [Fraction(0)] * len(M.basis)
    integral[M.basis.index("xs*ys*zs")] = Fraction(1)
    return DgbvAlgebra("heisenberg-ce", M.basis, 0, M.unit(), M.product(), d, delta, integral)


def non_manin_model():
    """Λ(eta, xi) with d eta = eta*xi, Δ = 0: Im d ∩ Ker Δ ≠ Im d ∩ Im Δ."""
    M = MonomialAlgebra([("eta", (1, 0), 2), ("xi", (0, 1), 2)])
    d = M.op(M.derivation({"eta": M.vec({"eta*xi": 1})}, 1), (0, 1))
    delta = LinearOp.zero(M.basis, (-1, 0))
    return DgbvAlgebra("non-manin", M.basis, 1, M.unit(), M.product(), d, delta)


def exact_bracket_model():
    """
    k[x]/(x^2) ⊗ k[v]/(v^2) ⊗ Λ(u, y) with d = v ∂_u and Δ = v x ∂_x ∂_y.

    Every bracket of closed elements is d-exact (e.g. [x•y] = ±vx = ±d(ux)),
    so the versal solution is unobstructed but has nonzero quadratic part.
    """
    M = MonomialAlgebra([("x", (0, 0), 2), ("v", (1, 1), 2), ("u", (1, 0), 2), ("y", (2, 1), 2)])
    d = M.op(M.derivation({"u": M.vec({"v": 1})}, 1), (0, 1))
    dx = M.derivation({"x": {M.unit(): 1}}, 0)
    dy = M.derivation({"y": {M.unit(): 1}}, 1)
    lvx = M.left_mul(M.vec({"x*v": 1}))
    delta = M.op(compose_cols(lvx, dx, dy), (-1, 0))
    return DgbvAlgebra("exact-bracket", M.basis, 1, M.unit(), M.product(), d, delta)


def _torus(name, gens, n):
    M = MonomialAlgebra([(g, bd, 2) for g, bd in gens])
    d = LinearOp.zero(M.basis, (0, 1))
    delta = LinearOp.zero(M.basis, (-1, 0))
    integral = [Fraction(0)] * len(M.basis)
    integral[M.top()] = Fraction(1)
    return M, DgbvAlgebra(name, M.basis, n, M.unit(), M.product(), d, delta, integral)


def polyvector_gens(n):
    return ([("psi%d" % a, (1, 0)) for a in range(1, n + 1)]
            + [("psibar%d" % a, (0, 1)) for a in range(1, n + 1)])


def form_gens(n):
    return ([("dz%d" % a, (1, 0)) for a in range(1, n + 1)]
            + [("dzbar%d" % a, (0, 1)) for a in range(1, n + 1)])


def torus_polyvector_model(n):
    """Invariant polyvector-valued forms on a flat n-torus (d = Δ = 0)."""
    if n < 1:
        raise ArgumentError("n must be >= 1")
    M, A = _torus("torus-n%d" % n, polyvector_gens(n), n)
    top = M.index[tuple([1] * n + [0] * n)]
    A.eta = GradedElement.basis_vector(A.basis, top)
    return A


def torus_dolbeault_model(n):
    """Invariant (p,q)-forms on a flat n-torus."""
    if n < 1:
        raise ArgumentError("n must be >= 1")
    M, A = _torus("torus-dolbeault-n%d" % n, form_gens(n), n)
    return A


def torus_de_rham_model(n):
    """Invariant real forms on a flat 2n-torus, bidegree (0, k)."""
    if n < 1:
        raise ArgumentError("n must be >= 1")
    gens = [("dx%d" % a, (0, 1)) for a in range(1, 2 * n + 1)]
    M, A = _torus("torus-derham-n%d" % n, gens, n)
    return A


BUILTINS = {
    "truncated-poly": truncated_poly_model,
    "heisenberg-ce": heisenberg_ce_model,
    "exact-bracket": exact_bracket_model,
    "non-manin": non_manin_model,
    "torus-n1": lambda: torus_polyvector_model(1),
    "torus-n2": lambda: torus_polyvector_model(2),
    "torus-dolbeault-n1": lambda: torus_dolbeault_model(1),
    "torus-dolbeault-n2": lambda: torus_dolbeault_model(2),
    "torus-derham-n1": lambda: torus_de_rham_model(1),
    "torus-derham-n2": lambda: torus_de_rham_model(2),
}


def builtin(name):
    try:
        return BUILTINS[name]()
    except KeyError:
        raise ArgumentError("unknown model %r; choose from %s" % (name, sorted(BUILTINS))) from None
