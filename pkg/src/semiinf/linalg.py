"""
Exact Gaussian elimination over the rationals.

Matrices are lists of rows of ``Fraction``.  Pivoting always takes the
first nonzero entry in a column so results depend only on the input order.
"""

from fractions import Fraction

from .errors import InversionError


def zeros(m, n):
    return [[Fraction(0)] * n for _ in range(m)]


def identity(n):
    M = zeros(n, n)
    for i in range(n):
        M[i][i] = Fraction(1)
    return M


def as_fractions(M):
    return [[Fraction(x) for x in row] for row in M]


def transpose(M, ncols=None):
    if not M:
        return [[] for _ in range(ncols or 0)]
    return [list(col) for col in zip(*M)]


def matmul(A, B):
    if not A:
        return []
    n = len(B[0]) if B else 0
    out = zeros(len(A), n)
    for i, row in enumerate(A):
        orow = out[i]
        for k, a in enumerate(row):
            if a:
                brow = B[k]
                for j in range(n):
                    if brow[j]:
                        orow[j] += a * brow[j]
    return out


def matvec(A, v):
    return [sum((a * x for a, x in zip(row, v) if a and x), Fraction(0)) for row in A]


def rref(M):
    """Reduced row echelon form.  Returns ``(R, pivots)``."""
    R = [list(row) for row in M]
    if not R:
        return R, []
    m, n = len(R), len(R[0])
    pivots = []
    r = 0
    for c in range(n):
        if r == m:
            break
        p = None
        for i in range(r, m):
            if R[i][c]:
                p = i
                break
        if p is None:
            continue
        R[r], R[p] = R[p], R[r]
        inv = 1 / R[r][c]
        R[r] = [x * inv for x in R[r]]
        prow = R[r]
        for i in range(m):
            if i != r and R[i][c]:
                f = R[i][c]
                R[i] = [x - f * y for x, y in zip(R[i], prow)]
        pivots.append(c)
        r += 1
    return R, pivots


def rank(M):
    return len(rref(M)[1])


def nullspace(M, ncols=None):
    """Basis of {x : M x = 0}, one vector per free column."""
    if not M:
        n = ncols or 0
        return [[Fraction(int(i == j)) for i in range(n)] for j in range(n)]
    R, pivots = rref(M)
    n = len(M[0])
    free = [c for c in range(n) if c not in pivots]
    basis = []
    for f in free:
        v = [Fraction(0)] * n
        v[f] = Fraction(1)
        for r, pc in enumerate(pivots):
            v[pc] = -R[r][f]
        basis.append(v)
    return basis


def solve(M, b):
    """One solution of ``M x = b`` (free variables zero), or ``None``."""
    m = len(M)
    if m == 0:
        return []
    n = len(M[0])
    aug = [list(row) + [Fraction(bi)] for row, bi in zip(M, b)]
    R, pivots = rref(aug)
    if n in pivots:
        return None
    x = [Fraction(0)] * n
    for r, pc in enumerate(pivots):
        x[pc] = R[r][n]
    return x


def inverse(M):
    n = len(M)
    aug = [list(row) + [Fraction(int(i == j)) for j in range(n)] for i, row in enumerate(M)]
    R, pivots = rref(aug)
    if pivots[:n] != list(range(n)) or len(pivots) < n:
        bad = nullspace(M)
        raise InversionError("matrix is singular", bad)
    return [row[n:] for row in R]


def column_space_basis(vectors):
    """Greedy subset of ``vectors`` that is linearly independent, in order."""
    chosen, idx = [], []
    for i, v in enumerate(vectors):
        if rank(chosen + [v]) > len(chosen):
            chosen.append(v)
            idx.append(i)
    return chosen, idx


def intersect(U, V, dim):
    """Basis of span(U) ∩ span(V) for lists of row vectors in k^dim."""
    if not U or not V:
        return []
    # x in U∩V  <=>  sum a_i u_i - sum b_j v_j = 0
    cols = [list(u) for u in U] + [[-x for x in v] for v in V]
    M = transpose(cols)
    out = []
    for sol in nullspace(M, len(cols)):
        w = [Fraction(0)] * dim
        for a, u in zip(sol[:len(U)], U):
            if a:
                for k in range(dim):
                    w[k] += a * u[k]
        out.append(w)
    basis, _ = column_space_basis(out)
    return basis


def in_span(vectors, v):
    if not any(v):
        return True
    if not vectors:
        return False
    return rank(list(vectors) + [v]) == rank(list(vectors))
