"""Exact linear algebra over the rationals.

Vectors are tuples of ``Fraction``; matrices are tuples of row tuples.
Everything here is small and dense, which is all the graphs in scope need.
"""
from fractions import Fraction
from math import gcd, lcm


def frac(x):
    """Coerce an int, Fraction or "p/q" string to a Fraction."""
    if isinstance(x, Fraction):
        return x
    if isinstance(x, bool) or isinstance(x, float):
        raise TypeError("refusing to coerce %r to an exact rational" % (x,))
    return Fraction(x)


def vec(xs):
    return tuple(frac(x) for x in xs)


def zero(n):
    return (Fraction(0),) * n


def is_zero(v):
    return all(x == 0 for x in v)


def add(u, v):
    return tuple(a + b for a, b in zip(u, v))


def sub(u, v):
    return tuple(a - b for a, b in zip(u, v))


def scale(c, v):
    return tuple(c * a for a in v)


def dot(u, v):
    return sum((a * b for a, b in zip(u, v)), Fraction(0))


def mat_vec(rows, v):
    return tuple(dot(r, v) for r in rows)


def mat_mul(a, b):
    cols = list(zip(*b))
    return tuple(tuple(dot(r, c) for c in cols) for r in a)


def transpose(rows):
    return tuple(zip(*rows))


def identity(n):
    return tuple(tuple(Fraction(int(i == j)) for j in range(n)) for i in range(n))


def rref(rows):
    """Reduced row echelon form. Returns (matrix, pivot columns)."""
    m = [list(map(frac, r)) for r in rows]
    if not m:
        return [], []
    ncols = len(m[0])
    pivots = []
    r = 0
    for c in range(ncols):
        if r == len(m):
            break
        k = next((i for i in range(r, len(m)) if m[i][c] != 0), None)
        if k is None:
            continue
        m[r], m[k] = m[k], m[r]
        piv = m[r][c]
        m[r] = [x / piv for x in m[r]]
        for i in range(len(m)):
            if i != r and m[i][c] != 0:
                f = m[i][c]
                m[i] = [a - f * b for a, b in zip(m[i], m[r])]
        pivots.append(c)
        r += 1
    return m, pivots


def rank(vectors):
    vectors = list(vectors)
    if not vectors:
        return 0
    return len(rref(vectors)[1])


def independent(vectors):
    vectors = list(vectors)
    return rank(vectors) == len(vectors)


def nullspace(rows, ncols=None):
    """Basis of {x : rows x = 0}."""
    rows = list(rows)
    if ncols is None:
        ncols = len(rows[0])
    if not rows:
        return [tuple(Fraction(int(i == j)) for i in range(ncols)) for j in range(ncols)]
    m, pivots = rref(rows)
    free = [c for c in range(ncols) if c not in pivots]
    basis = []
    for f in free:
        x = [Fraction(0)] * ncols
        x[f] = Fraction(1)
        for r, pc in enumerate(pivots):
            x[pc] = -m[r][f]
        basis.append(tuple(x))
    return basis


def solve(rows, b):
    """One solution x of rows x = b, or None if inconsistent."""
    rows = [list(map(frac, r)) for r in rows]
    if not rows:
        return None if not is_zero(b) else ()
    ncols = len(rows[0])
    aug = [r + [frac(bi)] for r, bi in zip(rows, b)]
    m, pivots = rref(aug)
    if ncols in pivots:
        return None
    x = [Fraction(0)] * ncols
    for r, pc in enumerate(pivots):
        x[pc] = m[r][ncols]
    return tuple(x)


def coefficients(vectors, v):
    """Coefficients expressing v in terms of vectors, or None."""
    vectors = list(vectors)
    if not vectors:
        return () if is_zero(v) else None
    return solve(transpose(vectors), v)


def in_span(vectors, v):
    return coefficients(vectors, v) is not None


def multiple_of(v, w):
    """The scalar c with v = c*w, or None. For w = 0 only v = 0 qualifies (c = 0)."""
    if is_zero(w):
        return Fraction(0) if is_zero(v) else None
    k = next(i for i, x in enumerate(w) if x != 0)
    c = v[k] / w[k]
    if all(a == c * b for a, b in zip(v, w)):
        return c
    return None


def primitive(v):
    """Positive rescaling of a nonzero rational vector to a primitive integer vector."""
    den = lcm(*(x.denominator for x in v))
    ints = [int(x * den) for x in v]
    g = 0
    for x in ints:
        g = gcd(g, x)
    if g == 0:
        raise ValueError("zero vector has no primitive form")
    return tuple(Fraction(x // g) for x in ints)


def inverse(rows):
    n = len(rows)
    aug = [list(map(frac, r)) + list(e) for r, e in zip(rows, identity(n))]
    m, pivots = rref(aug)
    if pivots[:n] != list(range(n)):
        raise ValueError("singular matrix")
    return tuple(tuple(r[n:]) for r in m)
