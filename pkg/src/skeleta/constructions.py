"""Blow-ups, cross sections, cutting with the interval and critical passages."""
from dataclasses import dataclass, field
from fractions import Fraction

import networkx as nx

from . import linalg as la
from .analysis import (
    MorseData,
    Subskeleton,
    SubskeletonError,
    betti_numbers,
    blow_up_system_check,
    enumerate_2faces,
    has_trivial_normal_holonomy,
    indices,
    is_level,
    pairing,
    transport,
)
from .skeleton import (
    Edge,
    GenSkeleton,
    Graph,
    InvalidSkeleton,
    check_equivalence,
    edge_label,
    equivalence_witness,
    relabel,
)


class RegularValueError(ValueError):
    pass


class NotReducibleError(ValueError):
    pass


class BlowUpError(ValueError):
    """Raised for a subskeleton or system the blow-up cannot use; carries a counterexample."""

    def __init__(self, message, verdict=None):
        super().__init__(message)
        self.verdict = verdict


# -- blow-up systems ------------------------------------------------------------

def blow_up_system_from_levelness(sub, basepoint=None):
    """n = 1 on the normal edges at the basepoint, spread by n(theta_e(x)) = n(x) / lam_e(x)."""
    hol = has_trivial_normal_holonomy(sub)
    if not hol:
        raise BlowUpError("normal holonomy is not trivial", hol)
    lev = is_level(sub)
    if not lev:
        raise BlowUpError("subskeleton is not level", lev)
    s = sub.parent
    base = sub.vertices[0] if basepoint is None else basepoint
    if base not in sub.vertices:
        raise SubskeletonError("basepoint %r is not in the subskeleton" % base)
    n = {e: Fraction(1) for e in sub.normal(base)}
    g = nx.Graph()
    g.add_nodes_from(sub.vertices)
    g.add_edges_from((s.src(e), s.dst(e)) for e in sub.edges)
    for p, q in nx.bfs_edges(g, base):
        e = s.graph.between(p, q)
        for x in sub.normal(p):
            n[s.theta[e][x]] = n[x] / s.lam[e][x]
    rep = blow_up_system_check(sub, n)
    assert rep.ok, rep.summary()
    return n


def solve_blow_up_system(sub):
    """Solve n(x) / n(theta_e(x)) = lam_e(x) directly, one normal orbit at a time.

    Unlike blow_up_system_from_levelness this does not need trivial holonomy:
    an orbit that returns to a normal edge only has to come back with
    number 1.  Raises BlowUpError naming the edge where the equations clash.
    """
    s = sub.parent
    tangent = {p: [t for t in sub.edges if s.src(t) == p] for p in sub.vertices}
    n = {}
    for start in sub.normal_edges:
        if start in n:
            continue
        n[start] = Fraction(1)
        stack = [start]
        while stack:
            x = stack.pop()
            for t in tangent[s.src(x)]:
                y = s.theta[t][x]
                val = n[x] / s.lam[t][x]
                if y not in n:
                    n[y] = val
                    stack.append(y)
                elif n[y] != val:
                    raise BlowUpError("no blow-up system: the orbit of %s returns to %s with factor %s"
                                      % (start, y, val / n[y]))
    rep = blow_up_system_check(sub, n)
    assert rep.ok, rep.summary()
    return n


# -- blow-up ------------------------------------------------------------------

def z_name(p, e):
    return "z(%s;%s)" % (p, e)


@dataclass
class BlowUp:
    """A blow-up together with its blow-down data.

    ``vertex_map`` sends each new vertex to the vertex it lies over.
    ``edge_map`` sends each new edge to the edge it lies over, or None for
    vertical edges; ``kind`` tags each edge as kept, normal, conormal
    (reverse of normal), horizontal or vertical.
    """

    skeleton: GenSkeleton
    parent: GenSkeleton
    sub: Subskeleton
    n: dict
    z: dict
    vertex_map: dict
    edge_map: dict
    kind: dict

    def fiber(self, e):
        return [x for x, y in self.edge_map.items() if y == e]


def blow_up(skel, sub, n):
    """Replace the subskeleton by its singular locus of vertices z(p;e), e normal at p."""
    n = {e: la.frac(v) for e, v in n.items()}
    rep = blow_up_system_check(sub, n)
    if not rep.ok:
        raise BlowUpError(rep.summary())
    V0 = set(sub.vertices)
    if not sub.normal_edges:
        raise BlowUpError("subskeleton has no normal edges; the blow-up would be empty")
    for p in sub.vertices:
        for e in sub.normal(p):
            if skel.dst(e) in V0:
                raise BlowUpError("normal edge %s joins two vertices of the subskeleton" % e)
    z = {(p, e): z_name(p, e) for p in sub.vertices for e in sub.normal(p)}
    zv = {name: pe for pe, name in z.items()}
    vertices = [v for v in skel.vertices if v not in V0] + list(z.values())
    vertex_map = {v: v for v in skel.vertices if v not in V0}
    vertex_map.update({name: p for (p, e), name in z.items()})

    edges, edge_map, kind = [], {}, {}

    def add(a, b, over_ab, over_ba, k_ab, k_ba):
        ab, ba = edge_label(a, b), edge_label(b, a)
        edges.append(Edge(ab, a, b, ba))
        edges.append(Edge(ba, b, a, ab))
        edge_map[ab], edge_map[ba] = over_ab, over_ba
        kind[ab], kind[ba] = k_ab, k_ba

    for e in skel.graph.edges.values():
        if e.src not in V0 and e.dst not in V0:
            edges.append(e)
            edge_map[e.id] = e.id
            kind[e.id] = "kept"
    for p in sub.vertices:
        N = sub.normal(p)
        for e in N:
            add(z[(p, e)], skel.dst(e), e, skel.rev(e), "normal", "conormal")
        for i, e in enumerate(N):
            for e2 in N[i + 1:]:
                add(z[(p, e)], z[(p, e2)], None, None, "vertical", "vertical")
    for t in sub.edges:
        p, q = skel.src(t), skel.dst(t)
        if sub.vertices.index(p) > sub.vertices.index(q):
            continue
        for e in sub.normal(p):
            f = skel.theta[t][e]
            add(z[(p, e)], z[(q, f)], t, skel.rev(t), "horizontal", "horizontal")
    graph = Graph(vertices, edges)

    def lift(v, x):
        """The new edge at new vertex v lying over the edge x at beta(v)."""
        if v in zv:
            p, e = zv[v]
            if x == e:
                return edge_label(v, skel.dst(e))
            if x in sub.edges:
                return edge_label(v, z[(skel.dst(x), skel.theta[x][e])])
            return edge_label(v, z[(p, x)])
        q = skel.dst(x)
        if q in V0:
            return edge_label(v, z[(q, skel.rev(x))])
        return x

    def down(v, eps):
        """beta at the new vertex v: the old edge at beta(v) that eps lies over."""
        if kind[eps] == "vertical":
            return zv[graph.dst(eps)][1]
        return edge_map[eps]

    theta, lam, alpha = {}, {}, {}
    for eps in graph.edges.values():
        a, b = eps.src, eps.dst
        k = kind[eps.id]
        here = graph.out(a)
        if k == "vertical":
            p, e = zv[a]
            _, e2 = zv[b]
            row = {}
            for x in here:
                old = down(a, x)
                if old == e:
                    old = e2
                elif old == e2:
                    old = e
                row[x] = lift(b, old)
            theta[eps.id] = row
            lam[eps.id] = {x: Fraction(1) for x in here if x != eps.id}
            alpha[eps.id] = la.sub(skel.alpha[e2], la.scale(n[e2] / n[e], skel.alpha[e]))
            continue
        over = edge_map[eps.id]
        theta[eps.id] = {x: lift(b, skel.theta[over][down(a, x)]) for x in here}
        lam[eps.id] = {x: skel.lam[over][down(a, x)] for x in here if x != eps.id}
        if k == "horizontal":
            _, e = zv[a]
            lam[eps.id][edge_label(a, skel.dst(e))] = Fraction(1)
            alpha[eps.id] = skel.alpha[over]
        elif k == "normal":
            alpha[eps.id] = la.scale(1 / n[over], skel.alpha[over])
        else:
            alpha[eps.id] = skel.alpha[over]
    out = GenSkeleton(graph, alpha, theta, lam, skel.dimension)
    if not out.is_valid:
        raise InvalidSkeleton(out.report)
    return BlowUp(out, skel, sub, dict(n), z, vertex_map, edge_map, kind)


# -- cross sections --------------------------------------------------------------

@dataclass
class CEdge:
    """An oriented 2-face at c-level seen as an edge of the cross section."""

    face: object
    sign: int
    initial: str
    terminal: str
    upper: tuple
    lower: tuple


@dataclass
class CrossSection:
    skeleton: GenSkeleton
    direction: str
    c: Fraction
    xi: tuple
    parent: GenSkeleton
    cedges: dict

    def vertex_parent(self, v):
        return v

    def edge_face(self, e):
        ce = self.cedges[e]
        return ce.face, ce.sign


def _c_edge(skel, phi, c, face, sign):
    cyc = face.oriented(sign)
    n = len(cyc)
    ups = [k for k in range(n) if phi[cyc[k]] < c < phi[cyc[(k + 1) % n]]]
    if len(ups) != 1:
        raise NotReducibleError("face %s crosses level %s %d times upward" % (face.label, c, len(ups)))
    k = ups[0]
    rot = cyc[k:] + cyc[:k]
    i = 1
    while phi[rot[(i + 1) % n]] > c:
        i += 1
    upper = tuple(rot[1:i + 1])
    lower = (rot[0],) + tuple(rot[j] for j in range(n - 1, i, -1))
    p, q = rot[0], rot[1]
    w, v = rot[i], rot[(i + 1) % n]
    g = skel.graph
    return CEdge(face, sign, g.between(p, q), g.between(v, w), upper, lower)


def cross_section(skel, xi, morse, c, direction, faces=None):
    """The up or down cross section of a reducible skeleton at a regular value c."""
    if direction not in ("up", "down"):
        raise ValueError("direction must be 'up' or 'down'")
    xi = la.vec(xi)
    c = la.frac(c)
    phi = morse.phi
    if any(v == c for v in phi.values()):
        raise RegularValueError("%s is a value of the Morse function" % c)
    fe = enumerate_2faces(skel, xi) if faces is None else faces
    if not fe.enough:
        raise NotReducibleError("skeleton does not have enough 2-faces")
    g = skel.graph
    verts = [e for e in skel.edges if phi[g.src(e)] < c < phi[g.dst(e)]]
    cedges = {}
    for f in fe.faces:
        vals = [phi[v] for v in f.cycle]
        if not min(vals) < c < max(vals):
            continue
        for sign in (1, -1):
            cedges[f.oriented_label(sign)] = _c_edge(skel, phi, c, f, sign)

    def arrival(v, w, x):
        """The c-edge starting at the c-vertex v>w whose face also contains x."""
        vw = g.between(v, w)
        if direction == "up":
            F = fe.face_through(w, g.rev(vw), x)
        else:
            F = fe.face_through(v, vw, x)
        for sign in (1, -1):
            lab = F.oriented_label(sign)
            if lab in cedges and cedges[lab].initial == vw:
                return lab
        raise NotReducibleError("no c-edge leaves %s through %s" % (vw, x))

    at = {}
    for lab, ce in cedges.items():
        at.setdefault(ce.initial, []).append(lab)
    theta, lam, alpha = {}, {}, {}
    for lab, ce in cedges.items():
        p, q = g.src(ce.initial), g.dst(ce.initial)
        v, w = g.src(ce.terminal), g.dst(ce.terminal)
        rev = ce.face.oriented_label(-ce.sign)
        path = ce.upper if direction == "up" else ce.lower
        image, number = transport(skel, path)
        row, lrow = {lab: rev}, {}
        for other in at[ce.initial]:
            if other == lab:
                continue
            oc = cedges[other]
            if direction == "up":
                x = g.between(q, oc.upper[1] if len(oc.upper) > 1 else g.src(oc.terminal))
            else:
                x = g.between(p, oc.lower[1] if len(oc.lower) > 1 else g.dst(oc.terminal))
            row[other] = arrival(v, w, image[x])
            lrow[other] = number[x]
        theta[lab], lam[lab] = row, lrow
        if direction == "up":
            base = g.between(q, p)
            r2 = ce.upper[1] if len(ce.upper) > 1 else v
            a2 = skel.alpha[g.between(q, r2)]
        else:
            base = g.between(p, q)
            t2 = ce.lower[1] if len(ce.lower) > 1 else w
            a2 = skel.alpha[g.between(p, t2)]
        ab = skel.alpha[base]
        alpha[lab] = la.sub(a2, la.scale(pairing(xi, a2) / pairing(xi, ab), ab))
    edges = [Edge(lab, ce.initial, ce.terminal, ce.face.oriented_label(-ce.sign)) for lab, ce in cedges.items()]
    graph = Graph(verts, edges)
    out = GenSkeleton(graph, alpha, theta, lam, skel.dimension)
    if not out.is_valid:
        raise InvalidSkeleton(out.report)
    return CrossSection(out, direction, c, xi, skel, cedges)


# -- cutting --------------------------------------------------------------------

def product_vertex(v, t):
    return "(%s,%d)" % (v, t)


@dataclass
class Cut:
    """The product with the interval, with its covector and Morse function."""

    skeleton: GenSkeleton
    xi: tuple
    morse: MorseData
    a: Fraction
    base: GenSkeleton
    base_morse: MorseData

    def level_range(self):
        """Open interval of regular values whose down section recovers the base."""
        lo = max(self.base_morse.phi.values())
        hi = min(self.base_morse.phi.values()) + self.a
        return lo, hi


def cut(skel, xi, morse, a=None):
    """Direct product with the interval, interval coordinate last."""
    xi = la.vec(xi)
    phi = morse.phi
    spread = max(phi.values()) - min(phi.values())
    a = spread + 1 if a is None else la.frac(a)
    if not a > spread:
        raise ValueError("a must exceed max(phi) - min(phi) = %s" % spread)
    n = skel.dimension
    P = product_vertex
    vertices = [P(v, t) for t in (0, 1) for v in skel.vertices]
    edges, alpha, theta, lam = [], {}, {}, {}

    def lbl(u, t, v, s):
        return edge_label(P(u, t), P(v, s))

    for t in (0, 1):
        for e in skel.graph.edges.values():
            edges.append(Edge(lbl(e.src, t, e.dst, t), P(e.src, t), P(e.dst, t), lbl(e.dst, t, e.src, t)))
    for v in skel.vertices:
        edges.append(Edge(lbl(v, 0, v, 1), P(v, 0), P(v, 1), lbl(v, 1, v, 0)))
        edges.append(Edge(lbl(v, 1, v, 0), P(v, 1), P(v, 0), lbl(v, 0, v, 1)))
    for t in (0, 1):
        for e in skel.graph.edges.values():
            lab = lbl(e.src, t, e.dst, t)
            alpha[lab] = skel.alpha[e.id] + (Fraction(0),)
            row = {}
            lrow = {}
            for x in skel.out(e.src):
                y = skel.theta[e.id][x]
                xl = lbl(e.src, t, skel.dst(x), t)
                row[xl] = lbl(e.dst, t, skel.dst(y), t)
                if x != e.id:
                    lrow[xl] = skel.lam[e.id][x]
            vert = lbl(e.src, t, e.src, 1 - t)
            row[vert] = lbl(e.dst, t, e.dst, 1 - t)
            lrow[vert] = Fraction(1)
            theta[lab], lam[lab] = row, lrow
    for v in skel.vertices:
        for t in (0, 1):
            lab = lbl(v, t, v, 1 - t)
            sign = 1 if t == 0 else -1
            alpha[lab] = la.zero(n) + (Fraction(sign),)
            row = {lab: lbl(v, 1 - t, v, t)}
            lrow = {}
            for x in skel.out(v):
                xl = lbl(v, t, skel.dst(x), t)
                row[xl] = lbl(v, 1 - t, skel.dst(x), 1 - t)
                lrow[xl] = Fraction(1)
            theta[lab], lam[lab] = row, lrow
    graph = Graph(vertices, edges)
    out = GenSkeleton(graph, alpha, theta, lam, n + 1)
    if not out.is_valid:
        raise InvalidSkeleton(out.report)
    xi_hat = xi + (Fraction(1),)
    phi_hat = {P(v, t): phi[v] + a * t for t in (0, 1) for v in skel.vertices}
    hat = MorseData(xi_hat, phi_hat, indices(out, xi_hat), betti_numbers(out, xi_hat))
    return Cut(out, xi_hat, hat, a, skel, morse)


def drop_last(v):
    return tuple(v[:-1])


def recover_base(cut_result, section):
    """Rename the down section of a cut at a level in ``level_range`` onto the base.

    Returns the base-shaped skeleton with the interval coordinate dropped and
    the edge renaming used (section label -> base edge).
    """
    base = cut_result.base
    vmap, emap = {}, {}
    for v in base.vertices:
        vmap[edge_label(product_vertex(v, 0), product_vertex(v, 1))] = v
    for lab in section.skeleton.edges:
        s, d = section.skeleton.src(lab), section.skeleton.dst(lab)
        emap[lab] = base.graph.between(vmap[s], vmap[d])
    moved = relabel(section.skeleton, vmap, emap)
    projected = moved.with_alpha({e: drop_last(v) for e, v in moved.alpha.items()}, base.dimension)
    return projected, emap


# -- passage over a critical value ------------------------------------------------

@dataclass
class Passage:
    """Everything built while passing a single critical vertex."""

    vertex: str
    c: Fraction
    c_next: Fraction
    up: CrossSection
    down: CrossSection
    down_next: CrossSection
    incoming: list
    outgoing: list
    kappa_sections: dict
    blow_up_up: BlowUp
    blow_up_down: BlowUp
    identification: dict
    edge_identification: dict
    identified: GenSkeleton
    kappa: dict
    table: dict = field(default_factory=dict)
    clauses: dict = field(default_factory=dict)

    @property
    def ok(self):
        return all(self.clauses.values())

    def table_mismatches(self):
        """Edges where the tabulated rescaling differs from the witness: (edge, row, tabulated, witness)."""
        return [(e, row, v, self.kappa[e]) for e, (row, v) in self.table.items() if self.kappa[e] != v]


def _dagger_on(skel, faces):
    for f in faces:
        for test in (has_trivial_normal_holonomy, is_level):
            v = test(f.sub)
            if not v:
                return f, v
    return None, None


def critical_passage_check(skel, xi, morse, c, c_next, faces=None):
    """Build both blow-ups around the unique critical vertex between c and c_next
    and find the equivalences up = kappa . down at c and between the blow-ups."""
    xi = la.vec(xi)
    c, c_next = la.frac(c), la.frac(c_next)
    phi = morse.phi
    between = [v for v in skel.vertices if c < phi[v] < c_next]
    if len(between) != 1:
        raise ValueError("expected exactly one vertex between %s and %s, found %d" % (c, c_next, len(between)))
    p = between[0]
    fe = enumerate_2faces(skel, xi) if faces is None else faces
    level = [f for f in fe.faces
             if any(min(phi[v] for v in f.cycle) < t < max(phi[v] for v in f.cycle) for t in (c, c_next))]
    bad, verdict = _dagger_on(skel, level)
    if bad is not None:
        raise BlowUpError("face %s fails the level/holonomy condition" % bad.label, verdict)

    up = cross_section(skel, xi, morse, c, "up", fe)
    down = cross_section(skel, xi, morse, c, "down", fe)
    down_next = cross_section(skel, xi, morse, c_next, "down", fe)
    kappa_sections = equivalence_witness(up.skeleton, down.skeleton)

    g = skel.graph
    incoming = [g.rev(e) for e in skel.out(p) if pairing(xi, skel.alpha[e]) < 0]
    outgoing = [e for e in skel.out(p) if pairing(xi, skel.alpha[e]) > 0]

    def locus(section, verts):
        s = section.skeleton
        vs = set(verts)
        edges = [e for e in s.edges if s.src(e) in vs and s.dst(e) in vs]
        return Subskeleton(s, verts, edges)

    sub_up = locus(up, incoming)
    sub_down = locus(down_next, outgoing)
    n_up = {}
    for lab in sub_up.normal_edges:
        ce = up.cedges[lab]
        q_a = ce.upper[1] if len(ce.upper) > 1 else g.src(ce.terminal)
        n_up[lab] = pairing(xi, skel.alpha[g.between(p, q_a)])
    n_down = {}
    for lab in sub_down.normal_edges:
        ce = down_next.cedges[lab]
        p_i = ce.lower[1] if len(ce.lower) > 1 else g.dst(ce.terminal)
        n_down[lab] = pairing(xi, skel.alpha[g.between(p_i, p)])
    bu = blow_up(up.skeleton, sub_up, n_up)
    bd = blow_up(down_next.skeleton, sub_down, n_down)

    # z(p_i p; Q) on the up side and z(p q_a; Q) on the down side name the same vertex
    vmap = {v: v for v in bd.skeleton.vertices}
    for (cv, lab), name in bd.z.items():
        vmap[name] = bu.z[(up.skeleton.src(lab), lab)]
    emap = {}
    for e in bd.skeleton.graph.edges.values():
        emap[e.id] = e.id if bd.kind[e.id] == "kept" else edge_label(vmap[e.src], vmap[e.dst])
    identified = relabel(bd.skeleton, vmap, emap)
    kappa = equivalence_witness(bu.skeleton, identified)

    # the rescaling table: kappa(Q) = lambda_qp(q r2) off the locus, 1 on normal
    # edges, and the normalized-section values on horizontal and vertical edges of the locus
    table = {}
    sk = bu.skeleton
    for e in sk.edges:
        k = bu.kind[e]
        if k in ("kept", "conormal"):
            lab = bu.edge_map[e]
            ce = up.cedges[lab]
            q, pp = g.dst(ce.initial), g.src(ce.initial)
            r2 = ce.upper[1] if len(ce.upper) > 1 else g.src(ce.terminal)
            table[e] = ("section", skel.lam[g.between(q, pp)][g.between(q, r2)])
        elif k == "normal":
            table[e] = ("normal", Fraction(1))
        elif k == "horizontal":
            cv = sk.src(e)
            pi = bu.vertex_map[cv]
            table[e] = ("horizontal", 1 / pairing(xi, skel.alpha[pi]))
        else:
            _, lab = [k2 for k2, name in bu.z.items() if name == sk.src(e)][0]
            ce = up.cedges[lab]
            q_a = ce.upper[1] if len(ce.upper) > 1 else g.src(ce.terminal)
            table[e] = ("vertical", pairing(xi, skel.alpha[g.between(p, q_a)]))
    clauses = {
        "connection": bu.skeleton.theta == identified.theta,
        "equivalence": check_equivalence(bu.skeleton, identified, kappa).ok,
        "sections": check_equivalence(up.skeleton, down.skeleton, kappa_sections).ok,
    }
    return Passage(p, c, c_next, up, down, down_next, incoming, outgoing, kappa_sections,
                   bu, bd, vmap, emap, identified, kappa, table, clauses)
