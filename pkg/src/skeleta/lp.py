"""Exact LP feasibility by the two-phase simplex method (phase one only).

Works on ``Fraction`` data with Bland's anticycling rule, so the answers are
exact: either a point, or a Farkas certificate that is checked before it is
returned.
"""
from dataclasses import dataclass
from fractions import Fraction

from .linalg import dot, frac, transpose


@dataclass(frozen=True)
class Feasibility:
    """Outcome of deciding {x >= 0 : A x = b}.

    Exactly one of ``point`` and ``certificate`` is set.  A certificate ``y``
    satisfies ``y A >= 0`` componentwise and ``y . b < 0``.
    """

    point: tuple = None
    certificate: tuple = None

    @property
    def feasible(self):
        return self.point is not None


def check_farkas(A, b, y):
    """True iff y proves {x >= 0 : A x = b} empty."""
    cols = transpose(A) if A else ()
    return all(dot(y, c) >= 0 for c in cols) and dot(y, b) < 0


def solve_standard(A, b):
    """Decide feasibility of A x = b, x >= 0 exactly."""
    A = [[frac(a) for a in row] for row in A]
    b = [frac(x) for x in b]
    m = len(A)
    n = len(A[0]) if m else 0
    if m == 0:
        return Feasibility(point=(Fraction(0),) * n)

    sign = [(-1 if bi < 0 else 1) for bi in b]
    T = [[sign[i] * a for a in A[i]] + [Fraction(int(i == k)) for k in range(m)] for i in range(m)]
    rhs = [sign[i] * b[i] for i in range(m)]
    basis = [n + i for i in range(m)]
    cost = [Fraction(0)] * n + [Fraction(1)] * m
    width = n + m

    while True:
        cb = [cost[j] for j in basis]
        reduced = [cost[j] - sum((cb[i] * T[i][j] for i in range(m)), Fraction(0)) for j in range(width)]
        enter = next((j for j in range(width) if reduced[j] < 0), None)
        if enter is None:
            break
        leave = None
        best = None
        for i in range(m):
            if T[i][enter] > 0:
                ratio = rhs[i] / T[i][enter]
                if best is None or ratio < best or (ratio == best and basis[i] < basis[leave]):
                    best, leave = ratio, i
        if leave is None:
            # phase one is bounded below by zero, so this cannot happen
            raise ArithmeticError("unbounded phase-one problem")
        piv = T[leave][enter]
        T[leave] = [x / piv for x in T[leave]]
        rhs[leave] /= piv
        for i in range(m):
            if i != leave and T[i][enter] != 0:
                f = T[i][enter]
                T[i] = [a - f * c for a, c in zip(T[i], T[leave])]
                rhs[i] -= f * rhs[leave]
        basis[leave] = enter

    objective = sum((cost[basis[i]] * rhs[i] for i in range(m)), Fraction(0))
    if objective == 0:
        x = [Fraction(0)] * n
        for i, j in enumerate(basis):
            if j < n:
                x[j] = rhs[i]
        return Feasibility(point=tuple(x))

    # y_i = 1 - reduced cost of artificial i; certificate for the unflipped rows is -S y
    y = [Fraction(1) - reduced[n + i] for i in range(m)]
    cert = tuple(-sign[i] * y[i] for i in range(m))
    if not check_farkas(A, b, cert):
        raise ArithmeticError("simplex produced an invalid Farkas certificate")
    return Feasibility(certificate=cert)


def interior_point(rows):
    """A point x with r.x >= 1 for every row r, or None.

    Decides nonemptiness of the open cone {r.x > 0}; used for chamber
    enumeration of central arrangements.
    """
    rows = [tuple(map(frac, r)) for r in rows]
    if not rows:
        return None
    n = len(rows[0])
    k = len(rows)
    A = []
    for i, r in enumerate(rows):
        A.append(list(r) + [-x for x in r] + [Fraction(-int(i == j)) for j in range(k)])
    res = solve_standard(A, [1] * k)
    if not res.feasible:
        return None
    z = res.point
    return tuple(z[i] - z[n + i] for i in range(n))
