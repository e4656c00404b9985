"""Brute-force reference computations that share no code with the package.

Everything here works from vertex positions or plain dictionaries and uses
sympy for exact ranks, so it can serve as an independent check.
"""
from fractions import Fraction
from itertools import combinations, product

import sympy


def cube_positions(d=3):
    return {"".join(b): tuple(int(c) for c in b) for b in product("01", repeat=d)}


def cube_pairs(d=3):
    vs = list(cube_positions(d))
    return [(u, v) for u, v in combinations(vs, 2) if sum(a != b for a, b in zip(u, v)) == 1]


def simplex_positions(d):
    pos = {"0": (0,) * d}
    for i in range(d):
        pos[str(i + 1)] = tuple(int(j == i) for j in range(d))
    return pos


def octahedron_positions():
    return {"u": (1, 0, 0), "v": (0, 1, 0), "w": (0, 0, 1), "x": (0, 0, -1), "y": (0, -1, 0), "z": (-1, 0, 0)}


def octahedron_pairs():
    anti = {"u": "z", "v": "y", "w": "x"}
    anti.update({b: a for a, b in list(anti.items())})
    vs = list(octahedron_positions())
    return [(a, b) for a, b in combinations(vs, 2) if anti[a] != b]


def neighbours(pairs):
    nb = {}
    for a, b in pairs:
        nb.setdefault(a, []).append(b)
        nb.setdefault(b, []).append(a)
    return nb


def betti_from_positions(pos, pairs, xi):
    """Count vertices by the number of neighbours lying lower under xi."""
    nb = neighbours(pairs)
    d = max(len(v) for v in nb.values())
    b = [0] * (d + 1)
    for p, qs in nb.items():
        down = 0
        for q in qs:
            s = sum(Fraction(x) * (Fraction(a) - Fraction(c)) for x, a, c in zip(xi, pos[q], pos[p]))
            assert s != 0
            down += s < 0
        b[down] += 1
    return tuple(b)


def rank(vectors):
    if not vectors:
        return 0
    return sympy.Matrix([[sympy.Rational(str(x)) for x in v] for v in vectors]).rank()


def independence_from_vectors(star):
    """star: vertex -> list of vectors. Largest k with all k-subsets independent."""
    k = 0
    d = max(len(v) for v in star.values())
    for size in range(1, d + 1):
        if all(rank(list(s)) == size for vs in star.values() for s in combinations(vs, size)):
            k = size
        else:
            break
    return k


def gA2_brute(skel):
    """List of (e, e') where alpha(e') - lam alpha(theta e') is not on the line of alpha(e)."""
    bad = []
    for e in skel.edges:
        ae = skel.alpha[e]
        for x in skel.out(skel.src(e)):
            if x == e:
                continue
            diff = [a - skel.lam[e][x] * b for a, b in zip(skel.alpha[x], skel.alpha[skel.theta[e][x]])]
            if all(c == 0 for c in ae):
                ok = all(c == 0 for c in diff)
            else:
                ok = rank([ae, diff]) <= 1
            if not ok:
                bad.append((e, x))
    return bad


def directed_cycle_exists(skel, xi):
    """Depth first search for a directed cycle in the xi-orientation."""
    up = {p: [] for p in skel.vertices}
    for e, v in skel.alpha.items():
        if sum(a * b for a, b in zip(xi, v)) > 0:
            up[skel.src(e)].append(skel.dst(e))
    colour = {}

    def visit(p):
        colour[p] = 1
        for q in up[p]:
            if colour.get(q) == 1 or (q not in colour and visit(q)):
                return True
        colour[p] = 2
        return False

    return any(p not in colour and visit(p) for p in skel.vertices)


def walk_normal(skel, loop, e):
    """Carry edge e around a vertex loop by the connection, returning (image, product of lambdas)."""
    num = Fraction(1)
    for p, q in zip(loop, loop[1:]):
        edge = next(x for x in skel.out(p) if skel.dst(x) == q)
        num *= skel.lam[edge][e]
        e = skel.theta[edge][e]
    return e, num
