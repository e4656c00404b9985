"""A library of small skeleta and fans used by the tests and the CLI."""
import random
from fractions import Fraction
from itertools import combinations, product

from . import linalg as la
from .skeleton import Edge, GenSkeleton, Graph, LinearMap, project, skeleton_from_positions


def _unit(n, i, sign=1):
    return tuple(Fraction(sign * int(j == i)) for j in range(n))


def interval():
    return skeleton_from_positions(["0", "1"], [("0", "1")], {"0": (0,), "1": (1,)})


def cube(d=3):
    verts = ["".join(bits) for bits in product("01", repeat=d)]
    pos = {v: tuple(int(c) for c in v) for v in verts}
    pairs = [(u, v) for u, v in combinations(verts, 2) if sum(a != b for a, b in zip(u, v)) == 1]
    return skeleton_from_positions(verts, pairs, pos)


def square():
    return cube(2)


def simplex(d=3):
    verts = [str(i) for i in range(d + 1)]
    pos = {"0": (0,) * d}
    for i in range(1, d + 1):
        pos[str(i)] = _unit(d, i - 1)
    return skeleton_from_positions(verts, list(combinations(verts, 2)), pos)


def octahedron():
    """Vertices +-e_i named so that u, v, w span a triangle and x = -w, y = -v, z = -u."""
    pos = {
        "u": _unit(3, 0), "v": _unit(3, 1), "w": _unit(3, 2),
        "x": _unit(3, 2, -1), "y": _unit(3, 1, -1), "z": _unit(3, 0, -1),
    }
    verts = list(pos)
    antipode = {"u": "z", "v": "y", "w": "x", "x": "w", "y": "v", "z": "u"}
    pairs = [(a, b) for a, b in combinations(verts, 2) if antipode[a] != b]
    return skeleton_from_positions(verts, pairs, pos)


def triangular_prism():
    """The skeleton of a triangle times an interval, a simple 3-polytope."""
    tri = {"a": (0, 0), "b": (2, 0), "c": (0, 2)}
    pos = {}
    for k, (x, y) in tri.items():
        pos[k + "0"] = (x, y, 0)
        pos[k + "1"] = (x, y, 1)
    pairs = [("a0", "b0"), ("b0", "c0"), ("c0", "a0"), ("a1", "b1"), ("b1", "c1"), ("c1", "a1"),
             ("a0", "a1"), ("b0", "b1"), ("c0", "c1")]
    return skeleton_from_positions(list(pos), pairs, pos)


def random_projection(skel, target, seed, bound=5):
    """A random integer surjection R^n -> R^target keeping edge vectors pairwise independent."""
    rng = random.Random(seed)
    while True:
        rows = [[rng.randint(-bound, bound) for _ in range(skel.dimension)] for _ in range(target)]
        p = LinearMap(rows)
        if not p.surjective:
            continue
        imgs = {e: p(v) for e, v in skel.alpha.items()}
        if all(
            la.independent([imgs[a], imgs[b]])
            for q in skel.vertices
            for a, b in combinations(skel.out(q), 2)
        ):
            return p


def projected(skel, target=2, seed=0):
    return project(skel, random_projection(skel, target, seed))


def parallel_triangle():
    """A 2-valent triangle in R^2 whose edge vectors all lie on one line.

    Every generic covector orients it as a directed 3-cycle, so it admits no
    polarization.
    """
    graph = Graph.from_pairs(["a", "b", "c"], [("a", "b"), ("b", "c"), ("c", "a")])
    v = (Fraction(1), Fraction(1))
    alpha = {}
    for p, q in [("a", "b"), ("b", "c"), ("c", "a")]:
        alpha["%s>%s" % (p, q)] = v
        alpha["%s>%s" % (q, p)] = la.scale(-1, v)
    theta, lam = {}, {}
    for e in graph.edges.values():
        other = next(x for x in graph.out(e.src) if x != e.id)
        nxt = next(x for x in graph.out(e.dst) if x != e.rev)
        theta[e.id] = {e.id: e.rev, other: nxt}
        lam[e.id] = {other: Fraction(1)}
    return GenSkeleton(graph, alpha, theta, lam)


def pentagram():
    """A star pentagon in R^2: a valid 2-valent skeleton with two sources."""
    pts = [(2, 0), (1, 2), (-1, 2), (-2, 0), (0, -2)]
    verts = ["s%d" % i for i in range(5)]
    pos = dict(zip(verts, pts))
    order = [0, 2, 4, 1, 3]
    pairs = [(verts[order[i]], verts[order[(i + 1) % 5]]) for i in range(5)]
    graph = Graph.from_pairs(verts, pairs)
    theta = {}
    for e in graph.edges.values():
        other = next(x for x in graph.out(e.src) if x != e.id)
        nxt = next(x for x in graph.out(e.dst) if x != e.rev)
        theta[e.id] = {e.id: e.rev, other: nxt}
    return skeleton_from_positions(verts, pairs, pos, theta)


def hexagon_with_chords():
    """A hexagon with its three long diagonals, placed in R^2.

    The connection makes the outer hexagon a 2-face; closing the pair formed
    by a hexagon edge and a diagonal gives a 6-cycle with two local minima,
    so the skeleton does not have enough 2-faces.
    """
    pts = [(2, 0), (1, 2), (-1, 2), (-2, 0), (-1, -2), (1, -2)]
    verts = ["h%d" % i for i in range(6)]
    pos = dict(zip(verts, pts))
    h = lambda i: verts[i % 6]
    e = lambda i, j: "%s>%s" % (h(i), h(j))
    pairs = [(h(i), h(i + 1)) for i in range(6)] + [(h(i), h(i + 3)) for i in range(3)]
    theta = {}
    for i in range(6):
        # hexagon edge i -> i+1
        theta[e(i, i + 1)] = {e(i, i + 1): e(i + 1, i), e(i, i - 1): e(i + 1, i + 2), e(i, i + 3): e(i + 1, i + 4)}
        # hexagon edge i -> i-1
        theta[e(i, i - 1)] = {e(i, i - 1): e(i - 1, i), e(i, i + 1): e(i - 1, i - 2), e(i, i + 3): e(i - 1, i + 2)}
        # diagonal i -> i+3
        theta[e(i, i + 3)] = {e(i, i + 3): e(i + 3, i), e(i, i + 1): e(i + 3, i + 2), e(i, i - 1): e(i + 3, i + 4)}
    return skeleton_from_positions(verts, pairs, pos, theta)


def unlevel_prism():
    """A triangular prism placed in R^2 whose outer triangle is not level.

    The outer triangle x, y, z has one normal edge per vertex (so trivial
    normal holonomy), but transporting the spoke at x once around the
    triangle multiplies it by 2.
    """
    pos = {"x": (0, 0), "y": (6, 0), "z": (0, 6), "x'": (1, 2), "y'": (4, 1), "z'": (1, 4)}
    verts = list(pos)
    pairs = [("x", "y"), ("y", "z"), ("z", "x"), ("x'", "y'"), ("y'", "z'"), ("z'", "x'"),
             ("x", "x'"), ("y", "y'"), ("z", "z'")]
    tri = {"x": "x'", "y": "y'", "z": "z'"}
    outer = ["x", "y", "z"]
    inner = ["x'", "y'", "z'"]

    def lab(a, b):
        return "%s>%s" % (a, b)

    theta = {}
    for ring in (outer, inner):
        other = inner if ring is outer else outer
        for i in range(3):
            for s in (1, -1):
                a, b, c = ring[i], ring[(i + s) % 3], ring[(i - s) % 3]
                na, nb = ring_partner(a, tri), ring_partner(b, tri)
                theta[lab(a, b)] = {lab(a, b): lab(b, a), lab(a, c): lab(b, ring[(i + 2 * s) % 3]), lab(a, na): lab(b, nb)}
    for a, b in tri.items():
        for p, q, ring_p, ring_q in ((a, b, outer, inner), (b, a, inner, outer)):
            i = ring_p.index(p)
            theta[lab(p, q)] = {lab(p, q): lab(q, p)}
            for s in (1, -1):
                theta[lab(p, q)][lab(p, ring_p[(i + s) % 3])] = lab(q, ring_q[(i + s) % 3])
    return skeleton_from_positions(verts, pairs, pos, theta)


def ring_partner(v, tri):
    if v in tri:
        return tri[v]
    return next(k for k, w in tri.items() if w == v)
