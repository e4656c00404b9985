"""Complete simplicial fans as skeleta, and embeddings by exact LP feasibility."""
from dataclasses import dataclass, field
from fractions import Fraction
from itertools import combinations

import networkx as nx

from . import linalg as la
from .analysis import generic_covector, is_toral
from .lp import solve_standard
from .skeleton import Edge, GenSkeleton, Graph, edge_label, validate


class FanError(ValueError):
    def __init__(self, message, report=None):
        super().__init__(message)
        self.report = report


class NotToral(ValueError):
    """The skeleton has a k-slice that is not pointed."""

    def __init__(self, verdict):
        sl = verdict.slice
        super().__init__("k-slice through %s is not pointed" % (sorted(sl.vertices) if sl else "?"))
        self.verdict = verdict


@dataclass(frozen=True)
class Fan:
    """Rays in (R^d)* and maximal cones given as sorted tuples of ray indices."""

    dimension: int
    rays: tuple
    cones: tuple

    @classmethod
    def make(cls, dimension, rays, cones):
        return cls(dimension, tuple(la.vec(r) for r in rays), tuple(tuple(sorted(c)) for c in cones))

    def cone_rays(self, i):
        return [self.rays[k] for k in self.cones[i]]

    def facets(self):
        """Map from each (d-1)-subset of ray indices to the cones containing it."""
        out = {}
        for i, c in enumerate(self.cones):
            for tau in combinations(c, self.dimension - 1):
                out.setdefault(tau, []).append(i)
        return out


@dataclass
class FanProblem:
    kind: str
    cones: tuple
    message: str

    def as_dict(self):
        return {"kind": self.kind, "cones": list(self.cones), "message": self.message}


@dataclass
class FanReport:
    problems: list = field(default_factory=list)

    @property
    def ok(self):
        return not self.problems

    def __bool__(self):
        return self.ok

    def kinds(self):
        return {p.kind for p in self.problems}

    def as_dict(self):
        return {"ok": self.ok, "problems": [p.as_dict() for p in self.problems]}


def _overlap_outside(fan, i, j, shared):
    """True if cone i meets cone j in a point off the cone on the shared rays.

    Decides a, b >= 0 with sum a_k r_k = sum b_l r'_l and the coefficients of
    cone i's unshared rays summing to one.
    """
    ci, cj = fan.cones[i], fan.cones[j]
    d = fan.dimension
    extra = [k for k in ci if k not in shared]
    rows = []
    for t in range(d):
        rows.append([fan.rays[k][t] for k in ci] + [-fan.rays[k][t] for k in cj])
    rows.append([Fraction(int(k in extra)) for k in ci] + [Fraction(0)] * len(cj))
    return solve_standard(rows, [0] * d + [1]).feasible


def validate_fan(fan):
    rep = FanReport()
    d = fan.dimension
    for r, ray in enumerate(fan.rays):
        if len(ray) != d or la.is_zero(ray):
            rep.problems.append(FanProblem("ray", (), "ray %d is zero or has the wrong length" % r))
    if not rep.ok:
        return rep
    for i, c in enumerate(fan.cones):
        if len(set(c)) != d or any(k < 0 or k >= len(fan.rays) for k in c):
            rep.problems.append(FanProblem("simplicial", (i,), "cone %d does not have %d distinct rays" % (i, d)))
        elif la.rank(fan.cone_rays(i)) != d:
            rep.problems.append(FanProblem("simplicial", (i,), "rays of cone %d are dependent" % i))
    if not rep.ok:
        return rep
    for i, j in combinations(range(len(fan.cones)), 2):
        shared = set(fan.cones[i]) & set(fan.cones[j])
        if _overlap_outside(fan, i, j, shared):
            rep.problems.append(FanProblem(
                "face-to-face", (i, j), "cones %d and %d meet outside their common face" % (i, j)))
    dual = nx.Graph()
    dual.add_nodes_from(range(len(fan.cones)))
    for tau, owners in sorted(fan.facets().items()):
        if len(owners) != 2:
            rep.problems.append(FanProblem(
                "complete", tuple(owners), "facet %s lies in %d maximal cones" % (list(tau), len(owners))))
        else:
            dual.add_edge(*owners)
    if fan.cones and not nx.is_connected(dual):
        rep.problems.append(FanProblem("complete", (), "maximal cones are not connected through facets"))
    return rep


def facet_normal(fan, tau, inside):
    """Primitive integer normal to the facet spanned by rays tau, positive on ray ``inside``."""
    rows = [fan.rays[k] for k in tau]
    ns = la.nullspace(rows, fan.dimension) if rows else [la.identity(fan.dimension)[0]]
    if len(ns) != 1:
        raise FanError("facet %s does not span a hyperplane" % (list(tau),))
    n = la.primitive(ns[0])
    s = la.dot(n, fan.rays[inside])
    if s == 0:
        raise FanError("ray %d lies on the hyperplane of facet %s" % (inside, list(tau)))
    return n if s > 0 else la.scale(-1, n)


def cone_name(i):
    return "C%d" % i


def _omitted(cone, tau):
    return next(k for k in cone if k not in tau)


def fan_compat(fan, skel, e, x, eta=None):
    """lambda_e(x) from a covector eta on the ray dropped from x (default: that ray)."""
    s1 = int(skel.src(e)[1:])
    s2 = int(skel.dst(e)[1:])
    r = _omitted(fan.cones[s1], _facet_of(fan, skel, x))
    eta = fan.rays[r] if eta is None else la.vec(eta)
    if la.rank([eta, fan.rays[r]]) != 1:
        raise ValueError("eta is not on the ray %d" % r)
    y = skel.theta[e][x]
    assert _omitted(fan.cones[s2], _facet_of(fan, skel, y)) == r
    return la.dot(eta, skel.alpha[x]) / la.dot(eta, skel.alpha[y])


def _facet_of(fan, skel, e):
    a = fan.cones[int(skel.src(e)[1:])]
    b = set(fan.cones[int(skel.dst(e)[1:])])
    return tuple(k for k in a if k in b)


def fan_to_skeleton(fan):
    rep = validate_fan(fan)
    if not rep.ok:
        raise FanError("invalid fan: %s" % "; ".join(p.message for p in rep.problems), rep)
    d = fan.dimension
    verts = [cone_name(i) for i in range(len(fan.cones))]
    # edge out of cone i across the facet omitting ray r
    across = {}
    edges = []
    alpha = {}
    for tau, (i, j) in fan.facets().items():
        for a, b in ((i, j), (j, i)):
            e = edge_label(cone_name(a), cone_name(b))
            r = _omitted(fan.cones[a], tau)
            across[a, r] = e
            alpha[e] = facet_normal(fan, tau, r)
            edges.append(Edge(e, cone_name(a), cone_name(b), edge_label(cone_name(b), cone_name(a))))
    graph = Graph(verts, edges)
    theta, lam = {}, {}
    for (a, r), e in across.items():
        b = int(graph.dst(e)[1:])
        r2 = _omitted(fan.cones[b], set(fan.cones[a]) - {r})
        row = {e: graph.rev(e)}
        lrow = {}
        for k in fan.cones[a]:
            if k == r:
                continue
            x, y = across[a, k], across[b, k]
            row[x] = y
            lrow[x] = la.dot(fan.rays[k], alpha[x]) / la.dot(fan.rays[k], alpha[y])
        assert across[b, r2] == graph.rev(e)
        theta[e] = row
        lam[e] = lrow
    skel = GenSkeleton(graph, alpha, theta, lam, d)
    rep = validate(skel)
    if not rep.ok:
        raise FanError("fan skeleton failed validation: %s" % rep.summary())
    if skel.independence_degree != d:
        raise FanError("fan skeleton is not %d-independent" % d)
    return skel


def skeleton_to_fan(skel, check=True):
    """Cones X_p = {u : <u, alpha(e)> >= 0 for e at p}, cone i belonging to skel.vertices[i]."""
    d = skel.valency
    if d is None or skel.dimension != d or skel.independence_degree < d:
        raise ValueError("need a d-valent d-independent skeleton in R^d")
    verdict = is_toral(skel)
    if not verdict.ok:
        raise NotToral(verdict)
    rays, index, cones = [], {}, []
    for p in skel.vertices:
        M = [skel.alpha[e] for e in skel.out(p)]
        inv = la.inverse(M)
        cone = []
        for col in la.transpose(inv):
            r = la.primitive(col)
            if r not in index:
                index[r] = len(rays)
                rays.append(r)
            cone.append(index[r])
        cones.append(cone)
    fan = Fan.make(d, rays, cones)
    if check:
        rep = validate_fan(fan)
        assert rep.ok, rep.as_dict()
    return fan


# -- embeddings -------------------------------------------------------------------

@dataclass
class EmbeddingCheck:
    ok: bool
    c: dict
    violations: list

    def __bool__(self):
        return self.ok


def check_embedding(skel, f):
    """f(q) - f(p) = c_pq alpha(pq) with c_pq > 0 for every oriented edge."""
    f = {v: la.vec(x) for v, x in f.items()}
    c, bad = {}, []
    for e in skel.edges:
        p, q = skel.src(e), skel.dst(e)
        if p not in f or q not in f or len(f[p]) != skel.dimension:
            bad.append(e)
            continue
        k = la.multiple_of(la.sub(f[q], f[p]), skel.alpha[e])
        if k is None or k <= 0:
            bad.append(e)
        else:
            c[e] = k
    return EmbeddingCheck(not bad, c, bad)


@dataclass
class Embedding:
    f: dict
    c: dict


@dataclass
class FarkasCertificate:
    """Proof that M c = 0, c >= 1 has no solution.

    ``matrix`` stacks the cycle rows M over the rows -I of the inequalities
    -c <= -1, with ``rhs`` (0, ..., -1, ...).  ``vector`` = (y, mu) has
    mu >= 0, vector . matrix = 0 and vector . rhs < 0.  ``standard`` is the
    certificate for the shifted standard form A x = b, x >= 0 with c = 1 + x.
    """

    variables: list
    matrix: list
    rhs: list
    vector: tuple
    n_equalities: int
    standard: tuple

    def check(self):
        mu = self.vector[self.n_equalities:]
        combo = [la.dot(self.vector, col) for col in la.transpose(self.matrix)]
        return all(m >= 0 for m in mu) and all(x == 0 for x in combo) and la.dot(self.vector, self.rhs) < 0

    def as_dict(self):
        return {
            "variables": list(self.variables),
            "vector": [str(x) for x in self.vector],
            "matrix": [[str(x) for x in row] for row in self.matrix],
            "equalities": self.n_equalities,
            "rhs": [str(x) for x in self.rhs],
            "standard": [str(x) for x in self.standard],
        }


@dataclass
class EmbeddingSearch:
    embedding: Embedding = None
    certificate: FarkasCertificate = None

    @property
    def feasible(self):
        return self.embedding is not None


def embedding_system(skel, xi=None):
    """Variables (one oriented representative per edge, oriented up by xi) and cycle rows M."""
    xi = generic_covector(skel) if xi is None else la.vec(xi)
    reps = []
    seen = set()
    for e in skel.edges:
        if e in seen:
            continue
        r = skel.rev(e)
        seen.update((e, r))
        if la.multiple_of(skel.alpha[r], skel.alpha[e]) is None or not la.multiple_of(skel.alpha[r], skel.alpha[e]) < 0:
            raise ValueError("alpha(%s) is not a negative multiple of alpha(%s)" % (r, e))
        reps.append(e if la.dot(xi, skel.alpha[e]) > 0 else r)
    col = {e: i for i, e in enumerate(reps)}
    G = nx.Graph()
    G.add_nodes_from(skel.vertices)
    extra = []
    for e in reps:
        p, q = skel.src(e), skel.dst(e)
        if G.has_edge(p, q):
            extra.append(e)
        else:
            G.add_edge(p, q, rep=e)
    cycles = []
    for cyc in nx.cycle_basis(G):
        terms = []
        for a, b in zip(cyc, cyc[1:] + cyc[:1]):
            e = G[a][b]["rep"]
            terms.append((e, 1 if skel.src(e) == a else -1))
        cycles.append(terms)
    for e in extra:
        p, q = skel.src(e), skel.dst(e)
        t = G[p][q]["rep"]
        cycles.append([(e, 1), (t, -1 if skel.src(t) == p else 1)])
    M = []
    n = skel.dimension
    for terms in cycles:
        for k in range(n):
            row = [Fraction(0)] * len(reps)
            for e, s in terms:
                row[col[e]] += s * skel.alpha[e][k]
            M.append(row)
    return reps, M, G


def find_embedding(skel, xi=None):
    reps, M, G = embedding_system(skel, xi)
    N = len(reps)
    b = [-sum(row, Fraction(0)) for row in M]
    res = solve_standard(M, b) if M else None
    if res is None or res.feasible:
        x = res.point if res is not None else (Fraction(0),) * N
        c = {e: 1 + x[i] for i, e in enumerate(reps)}
        f = {}
        for comp in nx.connected_components(G):
            root = min(comp)
            f[root] = la.zero(skel.dimension)
            for a, b2 in nx.bfs_edges(G, root):
                e = G[a][b2]["rep"]
                step = la.scale(c[e], skel.alpha[e])
                f[b2] = la.add(f[a], step) if skel.src(e) == a else la.sub(f[a], step)
        chk = check_embedding(skel, f)
        assert chk.ok, chk.violations
        return EmbeddingSearch(embedding=Embedding(f, chk.c))
    y = res.certificate
    mu = tuple(sum((y[i] * M[i][j] for i in range(len(M))), Fraction(0)) for j in range(N))
    matrix = [list(r) for r in M] + [[Fraction(-int(i == j)) for j in range(N)] for i in range(N)]
    rhs = [Fraction(0)] * len(M) + [Fraction(-1)] * N
    cert = FarkasCertificate(reps, matrix, rhs, tuple(y) + mu, len(M), tuple(y))
    assert cert.check()
    return EmbeddingSearch(certificate=cert)


def polytopal_check(fan):
    return find_embedding(fan_to_skeleton(fan)).feasible


# -- fan fixtures -----------------------------------------------------------------

def _orthant_fan(d):
    rays = []
    for i in range(d):
        rays.append(tuple(int(j == i) for j in range(d)))
        rays.append(tuple(-int(j == i) for j in range(d)))
    cones = []
    for mask in range(2 ** d):
        cones.append([2 * i + ((mask >> i) & 1) for i in range(d)])
    return Fan.make(d, rays, cones)


def square_fan():
    return _orthant_fan(2)


def cube_fan():
    """Normal fan of the 3-cube: eight orthant cones on the rays +-e_i."""
    return _orthant_fan(3)


def simplex_fan(d=3):
    rays = [tuple(int(j == i) for j in range(d)) for i in range(d)] + [tuple(-1 for _ in range(d))]
    cones = [c for c in combinations(range(d + 1), d)]
    return Fan.make(d, rays, cones)


def twisted_prism_fan():
    """A complete simplicial 3-fan with no strictly convex conewise-linear function.

    Rays e1, e2, e3 span an inner cone; the outer rays b1, b2, b3 surround it
    and each side quadrilateral e_i e_j b_j b_i is split along the diagonal
    e_i b_j, turning the same way all around.  The cyclic twist makes the
    embedding LP of its skeleton infeasible.
    """
    e = [(1, 0, 0), (0, 1, 0), (0, 0, 1)]
    b = [(1, -2, -2), (-2, 1, -2), (-2, -2, 1)]
    rays = e + b
    cones = [(0, 1, 2), (3, 4, 5)]
    for i in range(3):
        j = (i + 1) % 3
        cones.append((i, j, 3 + j))
        cones.append((i, 3 + i, 3 + j))
    return Fan.make(3, rays, cones)
