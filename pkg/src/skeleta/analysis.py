"""Subskeleta, transport along paths, holonomy, Morse data and 2-faces."""
import os
import random
from collections import deque
from dataclasses import dataclass, field
from fractions import Fraction
from itertools import combinations

import networkx as nx

from . import linalg as la
from .lp import interior_point
from .skeleton import ValidationReport


class SubskeletonError(ValueError):
    pass


class EmptySliceError(ValueError):
    pass


class Subskeleton:
    """A connected, constant-valency, totally geodesic subgraph of a skeleton."""

    def __init__(self, parent, vertices, edges, check=True):
        self.parent = parent
        vset = set(vertices)
        self.vertices = tuple(v for v in parent.vertices if v in vset)
        if len(self.vertices) != len(vset):
            raise SubskeletonError("unknown vertices in subskeleton")
        self.edges = frozenset(edges)
        unknown = [e for e in self.edges if e not in parent.edges]
        if unknown:
            raise SubskeletonError("unknown edges %s" % sorted(unknown)[:5])
        self._tangent = {p: tuple(e for e in parent.out(p) if e in self.edges) for p in self.vertices}
        self._normal = {p: tuple(e for e in parent.out(p) if e not in self.edges) for p in self.vertices}
        if check:
            rep = self.report()
            if not rep.ok:
                raise SubskeletonError(rep.summary())

    @classmethod
    def from_edges(cls, parent, edges, check=True):
        edges = set(edges)
        vs = {parent.src(e) for e in edges} | {parent.dst(e) for e in edges}
        return cls(parent, vs, edges, check)

    @classmethod
    def point(cls, parent, p):
        return cls(parent, [p], [])

    def tangent(self, p):
        return self._tangent[p]

    def normal(self, p):
        return self._normal[p]

    @property
    def normal_edges(self):
        return [e for p in self.vertices for e in self._normal[p]]

    @property
    def valency(self):
        return len(self._tangent[self.vertices[0]])

    def report(self):
        s = self.parent
        rep = ValidationReport()
        vset = set(self.vertices)
        for e in self.edges:
            if s.src(e) not in vset or s.dst(e) not in vset:
                rep.add("subskeleton", [e], "edge leaves the vertex set")
            if s.rev(e) not in self.edges:
                rep.add("subskeleton", [e], "not closed under reversal")
        if not rep.ok:
            return rep
        if len({len(t) for t in self._tangent.values()}) > 1:
            rep.add("subskeleton", [], "valency is not constant")
        g = nx.Graph()
        g.add_nodes_from(self.vertices)
        g.add_edges_from((s.src(e), s.dst(e)) for e in self.edges)
        if self.vertices and not nx.is_connected(g):
            rep.add("subskeleton", [], "not connected")
        for e in self.edges:
            for x in self._tangent[s.src(e)]:
                if s.theta[e][x] not in self.edges:
                    rep.add("totally-geodesic", [e, x], "theta_e carries a tangent edge off the subskeleton")
        return rep

    def __repr__(self):
        return "Subskeleton(%d vertices, valency %d)" % (len(self.vertices), self.valency)


# -- transport ------------------------------------------------------------

def step(skel, p, q):
    e = skel.graph.between(p, q)
    if e is None:
        raise ValueError("%s and %s are not adjacent" % (p, q))
    return e


def transport(skel, path):
    """Transport every edge at path[0] along the path.

    Returns (image, number): image[e] is the transported edge at the final
    vertex and number[e] the product of the lambda values met on the way
    (the diagonal value being m).
    """
    start = path[0]
    image = {e: e for e in skel.out(start)}
    number = {e: Fraction(1) for e in skel.out(start)}
    for p, q in zip(path, path[1:]):
        edge = step(skel, p, q)
        th = skel.theta[edge]
        for e in image:
            x = image[e]
            number[e] *= skel.lam_at(edge, x)
            image[e] = th[x]
    return image, number


@dataclass
class PathTransport:
    path: tuple
    tangent: dict
    normal: dict
    numbers: dict

    @property
    def tangent_number(self):
        out = Fraction(1)
        for e in self.tangent:
            out *= self.numbers[e]
        return out

    @property
    def normal_number(self):
        out = Fraction(1)
        for e in self.normal:
            out *= self.numbers[e]
        return out


def path_connection(sub, path):
    """Path-connection maps and numbers of a path inside a subskeleton."""
    path = tuple(path)
    for p, q in zip(path, path[1:]):
        e = sub.parent.graph.between(p, q)
        if e is None or e not in sub.edges:
            raise SubskeletonError("path leaves the subskeleton at %s -> %s" % (p, q))
    if path[0] not in sub.vertices:
        raise SubskeletonError("path starts outside the subskeleton")
    image, number = transport(sub.parent, path)
    p0 = path[0]
    return PathTransport(
        path,
        {e: image[e] for e in sub.tangent(p0)},
        {e: image[e] for e in sub.normal(p0)},
        number,
    )


@dataclass
class LoopVerdict:
    """Outcome of a holonomy or levelness test; falsy when a counterexample exists."""

    ok: bool
    loop: tuple = None
    edge: str = None
    image: str = None
    number: Fraction = None

    def __bool__(self):
        return self.ok

    def as_dict(self):
        d = {"ok": self.ok}
        if not self.ok:
            d.update(loop=list(self.loop), edge=self.edge, image=self.image)
            if self.number is not None:
                d["number"] = str(self.number)
        return d


def _normal_transport_graph(sub):
    """Search the graph whose nodes are normal edges and whose arcs are the
    normal transports along single edges of the subskeleton.

    Closed walks in it are exactly the pairs (loop gamma, normal e) with
    K_gamma(e) = e, and the product of arc weights is |K_gamma(e)|.
    Returns, per normal edge, its root, the vertex path from the root and the
    accumulated number; plus the first inconsistency found, if any.
    """
    s = sub.parent
    info = {}
    bad_level = None
    bad_holonomy = None
    for root in sub.normal_edges:
        if root in info:
            continue
        info[root] = (root, (s.src(root),), Fraction(1))
        seen_at = {s.src(root): root}
        queue = deque([root])
        while queue:
            x = queue.popleft()
            _, path, num = info[x]
            p = s.src(x)
            for edge in sub.tangent(p):
                y = s.theta[edge][x]
                w = num * s.lam[edge][x]
                q = s.dst(edge)
                if y not in info:
                    info[y] = (root, path + (q,), w)
                    other = seen_at.setdefault(q, y)
                    if other != y and bad_holonomy is None:
                        bad_holonomy = (root, other, y)
                    queue.append(y)
                elif bad_level is None and info[y][2] != w:
                    bad_level = (root, path + (q,), info[y][1], w / info[y][2], y)
    return info, bad_holonomy, bad_level


def has_trivial_normal_holonomy(sub):
    """True iff transporting normal edges around any loop returns them unchanged."""
    info, bad, _ = _normal_transport_graph(sub)
    if bad is None:
        return LoopVerdict(True)
    root, first, second = bad
    # both paths start at the root's vertex and end at the same vertex q;
    # going back along one and out along the other is a loop at q moving first to second
    p1, p2 = info[first][1], info[second][1]
    loop = tuple(reversed(p1)) + p2[1:]
    image = path_connection(sub, loop).normal[first]
    return LoopVerdict(False, loop=loop, edge=first, image=image)


def is_level(sub):
    """True iff every loop-fixed normal edge has local path-connection number 1."""
    info, _, bad = _normal_transport_graph(sub)
    if bad is None:
        return LoopVerdict(True)
    root, path_u, path_v, ratio, y = bad
    loop = path_u + tuple(reversed(path_v))[1:]
    pt = path_connection(sub, loop)
    return LoopVerdict(False, loop=loop, edge=root, image=pt.normal[root], number=pt.numbers[root])


def blow_up_system_check(sub, n):
    """Violations of n(e')/n(theta_e(e')) = lam_e(e') on the subskeleton."""
    s = sub.parent
    rep = ValidationReport()
    for e in sub.edges:
        for x in sub.normal(s.src(e)):
            if n[x] <= 0:
                rep.add("blow-up system", [x], "n must be positive")
            elif n[x] / n[s.theta[e][x]] != s.lam[e][x]:
                rep.add("blow-up system", [e, x], "n(e')/n(theta_e(e')) != lambda_e(e')")
    return rep


# -- slices ---------------------------------------------------------------

def k_slice(skel, H, seed):
    """Component through ``seed`` of the edges whose axial vector lies in span(H)."""
    H = [la.vec(h) for h in H]
    base = la.rank(H)
    inside = {e for e, v in skel.alpha.items() if la.rank(H + [v]) == base}
    if not any(e in inside for e in skel.out(seed)):
        raise EmptySliceError("no edge at %s has axial vector in the subspace" % seed)
    seen = {seed}
    queue = deque([seed])
    edges = set()
    while queue:
        p = queue.popleft()
        for e in skel.out(p):
            if e in inside:
                edges.add(e)
                q = skel.dst(e)
                if q not in seen:
                    seen.add(q)
                    queue.append(q)
    return Subskeleton(skel, seen, edges)


# -- polarizations and Morse functions --------------------------------------

def pairing(xi, v):
    return la.dot(xi, v)


def is_generic(skel, xi):
    return all(pairing(xi, v) != 0 for v in skel.alpha.values())


def upward_edges(skel, xi):
    return [e for e, v in skel.alpha.items() if pairing(xi, v) > 0]


def oriented_graph(skel, xi):
    g = nx.DiGraph()
    g.add_nodes_from(skel.vertices)
    for e in upward_edges(skel, xi):
        g.add_edge(skel.src(e), skel.dst(e), id=e)
    return g


@dataclass
class Polarization:
    generic: bool
    polarizing: bool
    cycle: tuple = None


def polarization(skel, xi):
    xi = la.vec(xi)
    if not is_generic(skel, xi):
        return Polarization(False, False)
    g = oriented_graph(skel, xi)
    try:
        cyc = nx.find_cycle(g)
    except nx.NetworkXNoCycle:
        return Polarization(True, True)
    return Polarization(True, False, tuple(u for u, _ in cyc) + (cyc[0][0],))


def _hyperplanes(skel):
    """One normal per distinct line spanned by a nonzero axial vector."""
    lines = []
    for v in skel.alpha.values():
        if la.is_zero(v):
            continue
        if not any(la.rank([v, w]) == 1 for w in lines):
            lines.append(v)
    return lines


def chambers(skel, limit=None):
    """Interior points of all chambers of the arrangement {alpha(e)^perp}.

    Exact incremental enumeration: each chamber is recorded by a sign vector,
    and a sign vector is kept only if its open cone is nonempty (decided by
    exact LP).  ``limit`` caps the number of chambers; the cap defaults to the
    SKELETA_MAX_CHAMBERS environment variable (4096 if unset).
    """
    if limit is None:
        limit = int(os.environ.get("SKELETA_MAX_CHAMBERS", "4096"))
    normals = _hyperplanes(skel)
    if any(la.is_zero(v) for v in skel.alpha.values()):
        return []
    regions = [((), None)]
    for i, h in enumerate(normals):
        nxt = []
        for signs, _ in regions:
            for s in (1, -1):
                rows = [la.scale(t, normals[j]) for j, t in enumerate(signs)] + [la.scale(s, h)]
                x = interior_point(rows)
                if x is not None:
                    nxt.append((signs + (s,), x))
                    if len(nxt) > limit:
                        raise OverflowError("more than %d chambers; raise SKELETA_MAX_CHAMBERS" % limit)
        regions = nxt
    return [x for _, x in regions]


@dataclass
class SearchOutcome:
    covector: tuple = None
    exhaustive: bool = False
    tried: int = 0

    @property
    def found(self):
        return self.covector is not None


def find_polarizing(skel, strategy="random", seed=0, tries=200, limit=None):
    """Search for a polarizing covector.

    With ``strategy="chambers"`` the search is complete: a miss certifies
    that no polarizing covector exists.
    """
    n = skel.dimension
    if strategy == "chambers":
        pts = chambers(skel, limit)
        for i, x in enumerate(pts):
            if polarization(skel, x).polarizing:
                return SearchOutcome(x, True, i + 1)
        return SearchOutcome(None, True, len(pts))
    if strategy != "random":
        raise ValueError("unknown strategy %r" % strategy)
    rng = random.Random(seed)
    for t in range(tries):
        bound = 3 + t
        xi = tuple(Fraction(rng.randint(-bound, bound)) for _ in range(n))
        if polarization(skel, xi).polarizing:
            return SearchOutcome(xi, False, t + 1)
    return SearchOutcome(None, False, tries)


def generic_covector(skel, start=1):
    """A deterministic generic covector (1, t, t^2, ...) for the least usable t >= start."""
    t = start
    while True:
        xi = tuple(Fraction(t) ** k for k in range(skel.dimension))
        if is_generic(skel, xi):
            return xi
        t += 1


@dataclass
class MorseData:
    xi: tuple
    phi: dict
    index: dict
    betti: tuple

    def order(self):
        return sorted(self.phi, key=self.phi.get)

    def regular_values(self):
        """Midpoints between consecutive values of phi."""
        vals = sorted(self.phi.values())
        return [(a + b) / 2 for a, b in zip(vals, vals[1:])]


def indices(skel, xi):
    return {p: sum(1 for e in skel.out(p) if pairing(xi, skel.alpha[e]) < 0) for p in skel.vertices}


def betti_numbers(skel, xi):
    xi = la.vec(xi)
    if not is_generic(skel, xi):
        raise ValueError("covector is not generic")
    d = max(skel.graph.degree(p) for p in skel.vertices)
    b = [0] * (d + 1)
    for i in indices(skel, xi).values():
        b[i] += 1
    return tuple(b)


def morse_function(skel, xi):
    """phi(p) = (longest directed path ending at p) + ordinal/(2|V|+1)."""
    xi = la.vec(xi)
    pol = polarization(skel, xi)
    if not pol.polarizing:
        raise ValueError("covector is not polarizing")
    g = oriented_graph(skel, xi)
    longest = {}
    for p in nx.topological_sort(g):
        longest[p] = max((longest[u] + 1 for u in g.predecessors(p)), default=0)
    scale = Fraction(1, 2 * len(skel.vertices) + 1)
    phi = {p: longest[p] + i * scale for i, p in enumerate(skel.vertices)}
    return MorseData(xi, phi, indices(skel, xi), betti_numbers(skel, xi))


def betti_invariance_check(skel, xis):
    vectors = {betti_numbers(skel, xi) for xi in xis}
    return len(vectors) <= 1


def b0(skel, xi, vertices, edges):
    """Number of local minima of a subgraph under xi."""
    edges = set(edges)
    return sum(
        1
        for p in vertices
        if all(pairing(xi, skel.alpha[e]) > 0 for e in skel.out(p) if e in edges)
    )


def is_pointed(skel, xi):
    return b0(skel, la.vec(xi), skel.vertices, skel.edges) == 1


# -- 2-faces -----------------------------------------------------------------

@dataclass(eq=False)
class Face:
    """A 2-face: a cycle of vertices together with its subskeleton."""

    cycle: tuple
    sub: Subskeleton
    xi: tuple
    vmin: str
    vmax: str

    @property
    def edges(self):
        return self.sub.edges

    @property
    def label(self):
        return "(" + ",".join(self.cycle) + ")"

    def oriented(self, sign):
        """The vertex cycle in one of its two orientations (+1 is the stored one)."""
        if sign > 0:
            return self.cycle
        return (self.cycle[0],) + tuple(reversed(self.cycle[1:]))

    def oriented_label(self, sign):
        return self.label + ("+" if sign > 0 else "-")

    def __repr__(self):
        return "Face%s" % self.label


def close_pair(skel, p, e1, e2):
    """Close the pair {e1, e2} at p into a 2-valent totally geodesic cycle.

    Returns the vertex cycle starting p -> t(e1), or None with a reason.
    """
    cycle = [p]
    prev, cur = e2, e1   # pair at the current vertex is {prev, cur}; walk along cur
    for _ in range(len(skel.vertices)):
        q = skel.dst(cur)
        nxt = skel.theta[cur][prev]
        back = skel.rev(cur)
        if q == p:
            if back == e2 and nxt == e1:
                return tuple(cycle), None
            return None, "returns to %s with a different pair" % p
        if q in cycle:
            return None, "revisits %s" % q
        cycle.append(q)
        prev, cur = back, nxt
    return None, "no closure within |V| steps"


@dataclass
class FaceEnumeration:
    faces: list
    enough: bool
    reducible: bool
    failures: list = field(default_factory=list)
    at_pair: dict = field(default_factory=dict)

    def face_through(self, p, e1, e2):
        return self.at_pair.get((p, frozenset((e1, e2))))


def _canonical_cycle(skel, cycle):
    order = {v: i for i, v in enumerate(skel.vertices)}
    k = min(range(len(cycle)), key=lambda i: order[cycle[i]])
    c = cycle[k:] + cycle[:k]
    alt = (c[0],) + tuple(reversed(c[1:]))
    return min(c, alt, key=lambda t: [order[v] for v in t])


def enumerate_2faces(skel, xi):
    """All 2-faces, plus whether there are enough of them and reducibility."""
    xi = la.vec(xi)
    if not polarization(skel, xi).polarizing:
        raise ValueError("covector is not polarizing")
    found = {}
    failures = []
    at_pair = {}
    for p in skel.vertices:
        for e1, e2 in combinations(skel.out(p), 2):
            cyc, why = close_pair(skel, p, e1, e2)
            if cyc is None:
                failures.append((p, e1, e2, why))
                continue
            key = _canonical_cycle(skel, cyc)
            if key not in found:
                n = len(key)
                edges = set()
                for a, b in zip(key, key[1:] + key[:1]):
                    e = skel.graph.between(a, b)
                    edges.add(e)
                    edges.add(skel.rev(e))
                try:
                    sub = Subskeleton(skel, key, edges)
                except SubskeletonError as exc:
                    found[key] = None
                    failures.append((p, e1, e2, str(exc)))
                    continue
                minima = b0(skel, xi, key, edges)
                if minima != 1:
                    found[key] = None
                    failures.append((p, e1, e2, "closes into a cycle with b0 = %d" % minima))
                    continue
                vmin = next(v for v in key if all(pairing(xi, skel.alpha[e]) > 0 for e in sub.tangent(v)))
                vmax = next(v for v in key if all(pairing(xi, skel.alpha[e]) < 0 for e in sub.tangent(v)))
                found[key] = Face(key, sub, xi, vmin, vmax)
            elif found[key] is None:
                failures.append((p, e1, e2, "closes into a non-face"))
                continue
            if found[key] is not None:
                at_pair[(p, frozenset((e1, e2)))] = found[key]
    faces = [f for f in found.values() if f is not None]
    enough = not failures
    return FaceEnumeration(faces, enough, enough, failures, at_pair)


def is_reducible(skel, xi=None):
    if xi is None:
        res = find_polarizing(skel)
        if not res.found:
            return False
        xi = res.covector
    if not polarization(skel, xi).polarizing:
        return False
    return enumerate_2faces(skel, xi).enough


# -- toral skeleta --------------------------------------------------------------

@dataclass
class ToralVerdict:
    ok: bool
    slice: Subskeleton = None
    subspace: tuple = None

    def __bool__(self):
        return self.ok


def slices(skel):
    """Every k-slice (1 <= k <= d) spanned by edge subsets at some vertex."""
    seen = set()
    for p in skel.vertices:
        out = skel.out(p)
        for k in range(1, len(out) + 1):
            for subset in combinations(out, k):
                H = tuple(skel.alpha[e] for e in subset)
                sl = k_slice(skel, H, p)
                key = (frozenset(sl.vertices), sl.edges)
                if key not in seen:
                    seen.add(key)
                    yield H, sl


def is_toral(skel, xi=None):
    d = skel.valency
    if d is None or skel.dimension != d or skel.independence_degree < d:
        raise ValueError("toral check needs a d-valent d-independent skeleton in R^d")
    xi = generic_covector(skel) if xi is None else la.vec(xi)
    for H, sl in slices(skel):
        if b0(skel, xi, sl.vertices, sl.edges) != 1:
            return ToralVerdict(False, sl, H)
    return ToralVerdict(True)
