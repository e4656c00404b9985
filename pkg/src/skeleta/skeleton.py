"""Graphs, connections, compatibility systems and generalized axial functions.

A generalized skeleton is the quadruple (graph, alpha, theta, lam):

* ``theta[e]`` maps every edge issuing from i(e) to an edge issuing from t(e);
* ``lam[e]`` assigns a positive rational to every edge issuing from i(e)
  other than e itself.  The diagonal value lam_e(e) is not stored: it is
  identified with the reversal factor m_e (alpha(e) = -m_e alpha(reverse e)),
  which makes the compatibility rule hold on the diagonal automatically and
  keeps equivalences consistent there as well.
"""
from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property
from itertools import combinations

import networkx as nx

from . import linalg as la


class StructuralError(ValueError):
    """Input is not even well formed (missing or inconsistent map entries)."""


class DanglingReferenceError(StructuralError):
    """An identifier refers to a vertex or edge that does not exist."""


class InvalidSkeleton(ValueError):
    def __init__(self, report):
        super().__init__(report.summary())
        self.report = report


class NotEquivalent(ValueError):
    """Raised when no equivalence witness exists; ``constraint`` says why."""

    def __init__(self, message, edges=()):
        super().__init__(message)
        self.edges = tuple(edges)


def edge_label(u, v):
    return "%s>%s" % (u, v)


@dataclass(frozen=True)
class Edge:
    id: str
    src: str
    dst: str
    rev: str


@dataclass(frozen=True)
class Violation:
    axiom: str
    edges: tuple
    message: str

    def as_dict(self):
        return {"axiom": self.axiom, "edges": list(self.edges), "message": self.message}


@dataclass
class ValidationReport:
    violations: list = field(default_factory=list)
    m: dict = field(default_factory=dict)
    coefficients: dict = field(default_factory=dict)

    @property
    def ok(self):
        return not self.violations

    def add(self, axiom, edges, message):
        self.violations.append(Violation(axiom, tuple(edges), message))

    def extend(self, other):
        self.violations.extend(other.violations)
        self.m.update(other.m)
        self.coefficients.update(other.coefficients)
        return self

    def summary(self):
        if self.ok:
            return "valid"
        lines = ["%s at %s: %s" % (v.axiom, ",".join(v.edges), v.message) for v in self.violations[:10]]
        more = len(self.violations) - 10
        if more > 0:
            lines.append("... and %d more" % more)
        return "; ".join(lines)

    def as_dict(self):
        return {"ok": self.ok, "violations": [v.as_dict() for v in self.violations]}


class Graph:
    """Finite graph with oriented edges and a reversal involution."""

    def __init__(self, vertices, edges):
        self.vertices = tuple(vertices)
        if len(set(self.vertices)) != len(self.vertices):
            raise StructuralError("duplicate vertex identifiers")
        vset = set(self.vertices)
        self.edges = {}
        for e in edges:
            if e.id in self.edges:
                raise StructuralError("duplicate edge identifier %r" % e.id)
            for v in (e.src, e.dst):
                if v not in vset:
                    raise DanglingReferenceError("edge %r refers to unknown vertex %r" % (e.id, v))
            self.edges[e.id] = e
        for e in self.edges.values():
            if e.rev not in self.edges:
                raise DanglingReferenceError("edge %r has unknown reverse %r" % (e.id, e.rev))
        out = {v: [] for v in self.vertices}
        for e in self.edges.values():
            out[e.src].append(e.id)
        self._out = {v: tuple(es) for v, es in out.items()}
        self._between = {}
        for e in self.edges.values():
            self._between.setdefault((e.src, e.dst), e.id)

    @classmethod
    def from_pairs(cls, vertices, pairs):
        """Build from unordered vertex pairs, labelling edges ``u>v``."""
        edges = []
        for u, v in pairs:
            a, b = edge_label(u, v), edge_label(v, u)
            edges.append(Edge(a, u, v, b))
            edges.append(Edge(b, v, u, a))
        return cls(vertices, edges)

    def out(self, p):
        return self._out[p]

    def src(self, e):
        return self.edges[e].src

    def dst(self, e):
        return self.edges[e].dst

    def rev(self, e):
        return self.edges[e].rev

    def between(self, p, q):
        return self._between.get((p, q))

    def degree(self, p):
        return len(self._out[p])

    @property
    def valency(self):
        degs = {len(es) for es in self._out.values()}
        return degs.pop() if len(degs) == 1 else None

    def undirected(self):
        g = nx.Graph()
        g.add_nodes_from(self.vertices)
        g.add_edges_from((e.src, e.dst) for e in self.edges.values())
        return g

    def report(self):
        rep = ValidationReport()
        seen = set()
        for e in self.edges.values():
            if e.src == e.dst:
                rep.add("graph", [e.id], "loop at %s" % e.src)
            if (e.src, e.dst) in seen:
                rep.add("graph", [e.id], "multiple edges %s -> %s" % (e.src, e.dst))
            seen.add((e.src, e.dst))
            r = self.edges[e.rev]
            if e.rev == e.id or r.rev != e.id or r.src != e.dst or r.dst != e.src:
                rep.add("graph", [e.id, e.rev], "reversal is not a fixed-point-free involution")
        if self.vertices and not nx.is_connected(self.undirected()):
            rep.add("graph", [], "graph is not connected")
        if self.valency is None:
            rep.add("graph", [], "valency is not constant")
        return rep

    def __eq__(self, other):
        return (
            isinstance(other, Graph)
            and set(self.vertices) == set(other.vertices)
            and self.edges == other.edges
        )

    def __hash__(self):
        return hash(frozenset(self.edges.values()))


def validate_pre_skeleton(graph, theta, lam):
    """Check the connection (bijections, theta_e(e) = reverse, involutive) and
    the compatibility rule lam_rev(theta_e(e')) * lam_e(e') = 1."""
    rep = graph.report()
    for e in graph.edges.values():
        th = theta[e.id]
        here, there = graph.out(e.src), graph.out(e.dst)
        if th.get(e.id) != e.rev:
            rep.add("connection", [e.id], "theta_e(e) is %r, not the reverse %r" % (th.get(e.id), e.rev))
        image = [th[x] for x in here]
        if sorted(image) != sorted(there):
            rep.add("connection", [e.id], "theta_e is not a bijection onto the edges at %s" % e.dst)
            continue
        back = theta[e.rev]
        for x in here:
            if back.get(th[x]) != x:
                rep.add("connection", [e.id, x], "theta of the reverse does not invert theta_e")
        for x in here:
            if x == e.id:
                continue
            v = lam[e.id][x]
            if v <= 0:
                rep.add("compatibility", [e.id, x], "lambda must be positive, got %s" % v)
                continue
            y = th[x]
            w = lam[e.rev].get(y)
            if w is None or w * v != 1:
                rep.add("compatibility", [e.id, x], "lambda_rev(theta_e(e')) * lambda_e(e') = %s" % (None if w is None else w * v))
    return rep


class GenSkeleton:
    """A generalized 1-skeleton (graph, alpha, theta, lam) over the rationals."""

    def __init__(self, graph, alpha, theta, lam, dimension=None):
        self.graph = graph
        self.alpha = {e: la.vec(alpha[e]) for e in self._require(alpha, "alpha")}
        if dimension is None:
            dims = {len(v) for v in self.alpha.values()}
            if len(dims) != 1:
                raise StructuralError("axial vectors have inconsistent dimensions")
            dimension = dims.pop()
        self.dimension = dimension
        for e, v in self.alpha.items():
            if len(v) != dimension:
                raise StructuralError("alpha(%s) has dimension %d, expected %d" % (e, len(v), dimension))
        self.theta = {}
        for e in self._require(theta, "theta"):
            row = theta[e]
            here = graph.out(graph.src(e))
            missing = [x for x in here if x not in row]
            if missing:
                raise StructuralError("theta[%s] is missing %s" % (e, missing))
            for x, y in row.items():
                if x not in graph.edges or y not in graph.edges:
                    raise DanglingReferenceError("theta[%s] refers to unknown edge" % e)
            self.theta[e] = {x: row[x] for x in here}
        self.lam = {}
        for e in self._require(lam, "lambda"):
            row = lam[e]
            here = [x for x in graph.out(graph.src(e)) if x != e]
            missing = [x for x in here if x not in row]
            if missing:
                raise StructuralError("lambda[%s] is missing %s" % (e, missing))
            for x in row:
                if x not in graph.edges:
                    raise DanglingReferenceError("lambda[%s] refers to unknown edge %r" % (e, x))
            self.lam[e] = {x: la.frac(row[x]) for x in here}

    def _require(self, mapping, name):
        for e in mapping:
            if e not in self.graph.edges:
                raise DanglingReferenceError("%s refers to unknown edge %r" % (name, e))
        missing = [e for e in self.graph.edges if e not in mapping]
        if missing:
            raise StructuralError("%s is missing entries for %s" % (name, missing[:5]))
        return list(self.graph.edges)

    # convenience accessors
    @property
    def vertices(self):
        return self.graph.vertices

    @property
    def edges(self):
        return self.graph.edges

    def out(self, p):
        return self.graph.out(p)

    def src(self, e):
        return self.graph.src(e)

    def dst(self, e):
        return self.graph.dst(e)

    def rev(self, e):
        return self.graph.rev(e)

    @property
    def valency(self):
        return self.graph.valency

    def lam_at(self, e, x):
        """lambda_e(x), with the diagonal value taken to be m_e."""
        if x == e:
            return self.m[e]
        return self.lam[e][x]

    @cached_property
    def m(self):
        return reversal_factors(self)[0]

    @cached_property
    def report(self):
        return validate(self)

    @property
    def is_valid(self):
        return self.report.ok

    def check(self):
        if not self.report.ok:
            raise InvalidSkeleton(self.report)
        return self

    @cached_property
    def _independence(self):
        return independence_degree(self)

    @property
    def independence_degree(self):
        return self._independence[0]

    @property
    def effective(self):
        return self._independence[1]

    @cached_property
    def is_proper_skeleton(self):
        if not self.report.ok or self.independence_degree < min(2, self.valency or 2):
            return False
        return all(self.alpha[e] == la.scale(-1, self.alpha[self.rev(e)]) for e in self.edges)

    @cached_property
    def has_zero_axial_value(self):
        return any(la.is_zero(v) for v in self.alpha.values())

    def with_alpha(self, alpha, dimension=None):
        return GenSkeleton(self.graph, alpha, self.theta, self.lam, dimension)

    def same_frame(self, other):
        """Same graph and connection."""
        return self.graph == other.graph and self.theta == other.theta

    def __repr__(self):
        return "GenSkeleton(|V|=%d, valency=%s, n=%d)" % (len(self.vertices), self.valency, self.dimension)


def reversal_factors(skel):
    """The factors m_e of gA1 and the violations found while computing them."""
    rep = ValidationReport()
    m = {}
    for e in skel.edges:
        a, b = skel.alpha[e], skel.alpha[skel.rev(e)]
        if la.is_zero(a) or la.is_zero(b):
            if not (la.is_zero(a) and la.is_zero(b)):
                rep.add("gA1", [e], "alpha(e) and alpha(reverse) must vanish together")
            m[e] = Fraction(1)
            continue
        c = la.multiple_of(a, b)
        if c is None or c >= 0:
            rep.add("gA1", [e], "alpha(e) is not a negative multiple of alpha(reverse)")
            m[e] = Fraction(1)
            continue
        m[e] = -c
    rep.m = m
    return m, rep


def validate_generalized_axial(skel):
    """gA1 and gA2, returning the factors m_e and the gA2 coefficients.

    ``report.coefficients[(e, e')]`` is the c with
    alpha(e') - lam_e(e') alpha(theta_e(e')) = c alpha(e).
    """
    _, rep = reversal_factors(skel)
    for e in skel.edges:
        ae = skel.alpha[e]
        for x in skel.out(skel.src(e)):
            if x == e:
                continue
            diff = la.sub(skel.alpha[x], la.scale(skel.lam[e][x], skel.alpha[skel.theta[e][x]]))
            c = la.multiple_of(diff, ae)
            if c is None:
                msg = "difference is nonzero while alpha(e) = 0" if la.is_zero(ae) else "difference is not a multiple of alpha(e)"
                rep.add("gA2", [e, x], msg)
            else:
                rep.coefficients[(e, x)] = c
    return rep


def validate(skel):
    rep = validate_pre_skeleton(skel.graph, skel.theta, skel.lam)
    if not rep.ok:
        return rep
    return rep.extend(validate_generalized_axial(skel))


def independence_degree(skel):
    """Largest k such that every k edge vectors at every vertex are independent,
    and whether the edge vectors at every vertex span the ambient space."""
    d = skel.valency or max(skel.graph.degree(p) for p in skel.vertices)
    k = 0
    for size in range(1, d + 1):
        if all(
            la.independent([skel.alpha[e] for e in subset])
            for p in skel.vertices
            for subset in combinations(skel.out(p), size)
        ):
            k = size
        else:
            break
    effective = all(la.rank([skel.alpha[e] for e in skel.out(p)]) == skel.dimension for p in skel.vertices)
    return k, effective


class LinearMap:
    """A rational linear map given by its matrix (rows = target dimension)."""

    def __init__(self, rows, source_dim=None):
        self.rows = tuple(la.vec(r) for r in rows)
        if source_dim is None:
            if not self.rows:
                raise ValueError("cannot infer source dimension of an empty matrix")
            source_dim = len(self.rows[0])
        self.source_dim = source_dim
        if any(len(r) != source_dim for r in self.rows):
            raise ValueError("ragged matrix")

    @property
    def target_dim(self):
        return len(self.rows)

    @cached_property
    def rank(self):
        return la.rank(self.rows) if self.rows else 0

    @property
    def surjective(self):
        return self.rank == self.target_dim

    def __call__(self, v):
        return la.mat_vec(self.rows, v)

    def compose(self, other):
        """self o other."""
        return LinearMap(la.mat_mul(self.rows, other.rows), other.source_dim)

    @classmethod
    def identity(cls, n):
        return cls(la.identity(n))

    @classmethod
    def from_columns(cls, columns, target_dim):
        columns = [la.vec(c) for c in columns]
        if not columns:
            return cls([() for _ in range(target_dim)], 0)
        return cls(la.transpose(columns))

    def __eq__(self, other):
        return isinstance(other, LinearMap) and self.rows == other.rows and self.source_dim == other.source_dim

    def __repr__(self):
        return "LinearMap(%dx%d)" % (self.target_dim, self.source_dim)


def project(skel, p):
    """The projection (graph, p o alpha, theta, lam); p must be surjective."""
    if p.source_dim != skel.dimension:
        raise ValueError("map has source dimension %d, skeleton lives in %d" % (p.source_dim, skel.dimension))
    if not p.surjective:
        raise ValueError("projection must be surjective")
    out = skel.with_alpha({e: p(v) for e, v in skel.alpha.items()}, p.target_dim)
    return out.check()


# -- equivalence --------------------------------------------------------

def _lambda_ratio_edges(s1, s2):
    """Constraints kappa(x) = kappa(theta_e(x)) * r from clause (ii)."""
    for e in s1.edges:
        for x in s1.out(s1.src(e)):
            if x != e:
                yield e, x, s1.theta[e][x], s1.lam[e][x] / s2.lam[e][x]


def check_equivalence(s1, s2, kappa):
    """Violations of alpha = kappa alpha' and lam = kappa(x)/kappa(theta x) lam'."""
    rep = ValidationReport()
    if not s1.same_frame(s2):
        rep.add("equivalence", [], "graphs or connections differ")
        return rep
    for e in s1.edges:
        k = kappa.get(e)
        if k is None or k <= 0:
            rep.add("equivalence", [e], "kappa must be positive")
            continue
        if s1.alpha[e] != la.scale(k, s2.alpha[e]):
            rep.add("equivalence", [e], "alpha(e) != kappa(e) alpha'(e)")
    if not rep.ok:
        return rep
    for e, x, y, r in _lambda_ratio_edges(s1, s2):
        if kappa[x] != kappa[y] * r:
            rep.add("equivalence", [e, x], "lambda_e(e') != kappa(e')/kappa(theta_e(e')) lambda'_e(e')")
    return rep


def equivalence_witness(s1, s2):
    """A positive kappa with s1 = kappa . s2, or NotEquivalent naming a violated constraint."""
    if s1.graph != s2.graph:
        raise NotEquivalent("underlying graphs differ")
    if s1.theta != s2.theta:
        bad = next(e for e in s1.edges if s1.theta[e] != s2.theta[e])
        raise NotEquivalent("connections differ", [bad])
    kappa = {}
    for e in s1.edges:
        a, b = s1.alpha[e], s2.alpha[e]
        if la.is_zero(b):
            if not la.is_zero(a):
                raise NotEquivalent("alpha'(e) = 0 but alpha(e) != 0", [e])
            continue
        c = la.multiple_of(a, b)
        if c is None or c <= 0:
            raise NotEquivalent("alpha(e) is not a positive multiple of alpha'(e)", [e])
        kappa[e] = c
    # edges with zero axial value: propagate the multiplicative constraints
    g = nx.Graph()
    g.add_nodes_from(s1.edges)
    ratio = {}
    for e, x, y, r in _lambda_ratio_edges(s1, s2):
        g.add_edge(x, y)
        ratio[(x, y)] = r          # kappa(x) = kappa(y) * r
        ratio[(y, x)] = 1 / r
    for comp in nx.connected_components(g):
        roots = [e for e in comp if e in kappa]
        root = roots[0] if roots else min(comp)
        kappa.setdefault(root, Fraction(1))
        for u, v in nx.bfs_edges(g, root):
            if v not in kappa:
                kappa[v] = kappa[u] * ratio[(v, u)]
    rep = check_equivalence(s1, s2, kappa)
    if not rep.ok:
        v = rep.violations[0]
        raise NotEquivalent(v.message, v.edges)
    return kappa


def transfer(s2, kappa, alpha=None):
    """The skeleton kappa . s2 (or kappa applied to another axial map on the same frame)."""
    lam = {
        e: {x: kappa[x] / kappa[s2.theta[e][x]] * v for x, v in row.items()}
        for e, row in s2.lam.items()
    }
    src = s2.alpha if alpha is None else alpha
    new_alpha = {e: la.scale(kappa[e], v) for e, v in src.items()}
    return GenSkeleton(s2.graph, new_alpha, s2.theta, lam)


def scale_axial(alpha, kappa):
    return {e: la.scale(kappa[e], v) for e, v in alpha.items()}


def orientation_kappa(skel, positive):
    """kappa = 1 on the chosen orientation and m_e on the reverses."""
    return {e: (Fraction(1) if e in positive else skel.m[e]) for e in skel.edges}


def to_proper(skel, positive=None):
    """An equivalent skeleton with alpha(reverse e) = -alpha(e).

    Returns (proper, kappa) with skel = kappa . proper.  ``positive`` picks one
    edge of each reversal pair; by default the first one in input order.
    """
    if positive is None:
        positive = set()
        for e in skel.edges:
            if skel.rev(e) not in positive:
                positive.add(e)
    kappa = orientation_kappa(skel, positive)
    inv = {e: 1 / k for e, k in kappa.items()}
    proper = transfer(skel, inv)
    return proper, kappa


# -- building connections from axial data --------------------------------

def induce_connection(graph, alpha):
    """The connection forced by A3 when alpha is 3-independent."""
    theta = {}
    for e in graph.edges.values():
        row = {e.id: e.rev}
        others = [x for x in graph.out(e.dst) if x != e.rev]
        for x in graph.out(e.src):
            if x == e.id:
                continue
            plane = [alpha[e.id], alpha[x]]
            hits = [y for y in others if la.rank(plane + [alpha[y]]) == 2]
            if len(hits) != 1:
                raise StructuralError("no unique connection: %d candidates for theta_%s(%s)" % (len(hits), e.id, x))
            row[x] = hits[0]
        theta[e.id] = row
    return theta


def induce_compat(graph, alpha, theta):
    """The compatibility system determined by alpha and theta (2-independent case)."""
    lam = {}
    for e in graph.edges.values():
        row = {}
        for x in graph.out(e.src):
            if x == e.id:
                continue
            y = theta[e.id][x]
            coeffs = la.coefficients([alpha[y], alpha[e.id]], alpha[x])
            if coeffs is None:
                raise StructuralError("alpha(%s) is not in the span of alpha(%s), alpha(%s)" % (x, y, e.id))
            if coeffs[0] == 0:
                raise StructuralError("compatibility value for (%s, %s) is not positive" % (e.id, x))
            row[x] = coeffs[0]
        lam[e.id] = row
    return lam


def skeleton_from_positions(vertices, pairs, positions, theta=None):
    """The skeleton with alpha(pq) = f(q) - f(p) for a vertex placement f."""
    graph = Graph.from_pairs(vertices, pairs)
    pos = {v: la.vec(positions[v]) for v in vertices}
    alpha = {e.id: la.sub(pos[e.dst], pos[e.src]) for e in graph.edges.values()}
    if theta is None:
        theta = induce_connection(graph, alpha)
    lam = induce_compat(graph, alpha, theta)
    return GenSkeleton(graph, alpha, theta, lam)


def relabel(skel, vmap, emap):
    """The same skeleton with vertices renamed by vmap and edges by emap."""
    g = skel.graph
    edges = [Edge(emap[e.id], vmap[e.src], vmap[e.dst], emap[e.rev]) for e in g.edges.values()]
    graph = Graph([vmap[v] for v in g.vertices], edges)
    alpha = {emap[e]: v for e, v in skel.alpha.items()}
    theta = {emap[e]: {emap[x]: emap[y] for x, y in row.items()} for e, row in skel.theta.items()}
    lam = {emap[e]: {emap[x]: v for x, v in row.items()} for e, row in skel.lam.items()}
    return GenSkeleton(graph, alpha, theta, lam, skel.dimension)


def endpoint_edge_map(skel, vmap, target):
    """Edge renaming induced by a vertex map onto the edges of another graph."""
    emap = {}
    for e in skel.edges.values():
        x = target.between(vmap[e.src], vmap[e.dst])
        if x is None:
            raise NotEquivalent("no edge %s -> %s in the target graph" % (vmap[e.src], vmap[e.dst]), [e.id])
        emap[e.id] = x
    return emap
