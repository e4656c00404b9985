"""Total lifts: the level/holonomy certificate, the sweep and verification."""
from dataclasses import dataclass, field

from . import linalg as la
from .analysis import (
    LoopVerdict,
    enumerate_2faces,
    find_polarizing,
    has_trivial_normal_holonomy,
    is_level,
    morse_function,
    pairing,
    polarization,
)
from .constructions import (
    NotReducibleError,
    critical_passage_check,
    cross_section,
    cut,
    recover_base,
)
from .codec import sha256
from .skeleton import LinearMap, equivalence_witness, validate_generalized_axial


class LiftInconsistency(ValueError):
    """A supposed lift fails a property that any genuine lift must have."""


# -- the level / trivial holonomy certificate ----------------------------------

@dataclass
class FaceVerdict:
    face: object
    holonomy: LoopVerdict
    level: LoopVerdict

    @property
    def ok(self):
        return bool(self.holonomy) and bool(self.level)

    def as_dict(self):
        return {
            "face": self.face.label,
            "trivial_holonomy": self.holonomy.as_dict(),
            "level": self.level.as_dict(),
        }


@dataclass
class DaggerCertificate:
    """Per-face verdicts; satisfied iff every 2-face is level with trivial normal holonomy."""

    xi: tuple
    verdicts: list

    @property
    def satisfied(self):
        return all(v.ok for v in self.verdicts)

    def __bool__(self):
        return self.satisfied

    @property
    def failures(self):
        return [v for v in self.verdicts if not v.ok]

    def as_dict(self):
        return {
            "xi": [str(x) for x in self.xi],
            "satisfied": self.satisfied,
            "faces": [v.as_dict() for v in self.verdicts],
        }


def check_dagger(skel, xi, faces=None):
    xi = la.vec(xi)
    fe = enumerate_2faces(skel, xi) if faces is None else faces
    if not fe.enough:
        raise NotReducibleError("skeleton does not have enough 2-faces under %s" % (xi,))
    return DaggerCertificate(xi, [
        FaceVerdict(f, has_trivial_normal_holonomy(f.sub), is_level(f.sub)) for f in fe.faces
    ])


# -- lifts and their verification -------------------------------------------------

@dataclass
class LiftReport:
    dimension_ok: bool = True
    surjective: bool = True
    projection: list = field(default_factory=list)
    axial: object = None
    independent: bool = True

    @property
    def ok(self):
        return (self.dimension_ok and self.surjective and not self.projection
                and (self.axial is None or self.axial.ok) and self.independent)

    def __bool__(self):
        return self.ok

    def as_dict(self):
        return {
            "ok": self.ok,
            "dimension_ok": self.dimension_ok,
            "surjective": self.surjective,
            "projection_failures": list(self.projection),
            "axial": None if self.axial is None else self.axial.as_dict(),
            "independent": self.independent,
        }


@dataclass
class LiftResult:
    """A: edge -> vector in R^N, p: R^N -> R^n with p o A = alpha."""

    A: dict
    p: LinearMap
    verified: bool = False
    report: LiftReport = None


def verify_lift(skel, A, p, total=True):
    """Check p o A = alpha, that A is an axial function for the same theta and lam,
    and that A is N-independent in R^N with N the valency.  With ``total`` the
    target must be the skeleton's space, reached surjectively."""
    rep = LiftReport()
    d = skel.valency
    dims = {len(v) for v in A.values()}
    if set(A) != set(skel.edges) or len(dims) != 1 or dims.pop() != d or p.source_dim != d:
        rep.dimension_ok = False
        return rep
    if p.target_dim != skel.dimension:
        rep.dimension_ok = False
        return rep
    if total:
        rep.surjective = p.surjective
    rep.projection = [e for e in skel.edges if p(A[e]) != skel.alpha[e]]
    lifted = skel.with_alpha(A, d)
    rep.axial = validate_generalized_axial(lifted)
    rep.independent = lifted.independence_degree == d
    return rep


def verify_total_lift(skel, A, p):
    return verify_lift(skel, {e: la.vec(v) for e, v in A.items()}, p, total=True)


def _verified(skel, A, p, total=False):
    rep = verify_lift(skel, A, p, total)
    if not rep.ok:
        raise LiftInconsistency("lift failed verification: %s" % rep.as_dict())
    return LiftResult(A, p, True, rep)


def lift_complete_section(cs):
    """Lift the first section above the source, a complete graph on k vertices, into R^(k-1)."""
    s = cs.skeleton
    vs = list(s.vertices)
    k = len(vs)
    g = s.graph
    for a in vs:
        for b in vs:
            if a != b and g.between(a, b) is None:
                raise ValueError("section graph is not complete")
    Q = lambda i, j: g.between(vs[i], vs[j])
    for i in range(k):
        for j in range(k):
            for l in range(k):
                if len({i, j, l}) == 3 and s.theta[Q(i, j)][Q(i, l)] != Q(j, l):
                    raise ValueError("connection does not send Q_ij, Q_ik to Q_jk")
    xi = cs.xi
    sv = [pairing(xi, cs.parent.alpha[v]) for v in vs]
    m = lambda a, b: sv[a] / sv[b]
    basis = la.identity(k - 1)
    A = {}
    for i in range(1, k):
        A[Q(0, i)] = basis[i - 1]
    for j in range(1, k):
        A[Q(j, 0)] = la.scale(-m(0, j), A[Q(0, j)])
        for l in range(1, k):
            if l != j:
                A[Q(j, l)] = la.sub(A[Q(0, l)], la.scale(m(l, j), A[Q(0, j)]))
    p = LinearMap.from_columns([s.alpha[Q(0, i)] for i in range(1, k)], s.dimension)
    if k == 1:
        p = LinearMap([() for _ in range(s.dimension)], 0)
    return _verified(s, A, p)


def lift_blow_up(lift, bu, total=False):
    """Carry a lift of the parent to the blow-up using the same system n."""
    n = bu.n
    A = lift.A
    out = {}
    zv = {name: pe for pe, name in bu.z.items()}
    sk = bu.skeleton
    for e in sk.edges:
        k = bu.kind[e]
        if k == "vertical":
            _, x = zv[sk.src(e)]
            _, y = zv[sk.dst(e)]
            out[e] = la.sub(A[y], la.scale(n[y] / n[x], A[x]))
        elif k == "normal":
            over = bu.edge_map[e]
            out[e] = la.scale(1 / n[over], A[over])
        else:
            out[e] = A[bu.edge_map[e]]
    return _verified(sk, out, lift.p, total)


def descend_blow_up_lift(lift, bu, total=False):
    """Push a lift of the blow-up down to the parent, checking fibers first."""
    sk = bu.skeleton
    At = lift.A
    A = {}
    for e in sk.edges:
        k = bu.kind[e]
        over = bu.edge_map[e]
        if k == "vertical":
            continue
        if k == "normal":
            val = la.scale(bu.n[over], At[e])
        else:
            val = At[e]
        if over in A and A[over] != val:
            raise LiftInconsistency("lift is not constant on the fiber over %s" % over)
        A[over] = val
    return _verified(bu.parent, A, lift.p, total)


def rescale_lift(lift, kappa, skel, total=False):
    """Lift of kappa . s from a lift of s."""
    A = {e: la.scale(kappa[e], v) for e, v in lift.A.items()}
    return _verified(skel, A, lift.p, total)


def _lift_hash(lift):
    """Hash of a stage's lifted axial values and projection, for replay."""
    return sha256({
        "A": {e: [str(x) for x in v] for e, v in lift.A.items()},
        "p": [[str(x) for x in r] for r in lift.p.rows],
    })


# -- the sweep ---------------------------------------------------------------------

@dataclass
class TotalLift:
    """Outcome of total_lift: status is lifted, obstructed or inconclusive."""

    status: str
    lift: LiftResult = None
    certificate: DaggerCertificate = None
    reason: str = ""
    xi: tuple = None
    stages: list = field(default_factory=list)

    @property
    def ok(self):
        return self.status == "lifted"


def total_lift(skel, xi=None, strategy="random", seed=0, tries=200):
    """Decide whether a reducible skeleton has a total lift, and build one if so."""
    if xi is None:
        found = find_polarizing(skel, strategy=strategy, seed=seed, tries=tries)
        if not found.found:
            why = "no polarizing covector exists" if found.exhaustive else "no polarizing covector found"
            return TotalLift("inconclusive", reason=why)
        xi = found.covector
    xi = la.vec(xi)
    if not polarization(skel, xi).polarizing:
        return TotalLift("inconclusive", reason="covector is not polarizing", xi=xi)
    faces = enumerate_2faces(skel, xi)
    if not faces.enough:
        return TotalLift("inconclusive", reason="skeleton does not have enough 2-faces", xi=xi)
    cert = check_dagger(skel, xi, faces)
    if not cert.satisfied:
        return TotalLift("obstructed", certificate=cert, xi=xi,
                         reason="a 2-face is not level or has non-trivial normal holonomy")

    morse = morse_function(skel, xi)
    prod = cut(skel, xi, morse)
    hat = prod.skeleton
    hfaces = enumerate_2faces(hat, prod.xi)
    phi = prod.morse.phi
    order = sorted(phi, key=phi.get)
    bottom = [v for v in order if v.endswith(",0)")]
    values = [phi[v] for v in order]
    mids = [(a + b) / 2 for a, b in zip(values, values[1:])]
    lo, hi = prod.level_range()
    stages = []

    first = cross_section(hat, prod.xi, prod.morse, mids[0], "down", hfaces)
    try:
        lift = lift_complete_section(first)
    except ValueError as exc:
        return TotalLift("inconclusive", certificate=cert, xi=xi, reason="first section: %s" % exc)
    stages.append({"stage": "first-section", "c": str(mids[0]), "vertices": len(first.skeleton.vertices),
                   "sha256": _lift_hash(lift)})
    c = mids[0]
    for k in range(1, len(bottom)):
        c_next = mids[k]
        ps = critical_passage_check(hat, prod.xi, prod.morse, c, c_next, hfaces)
        lift = rescale_lift(lift, ps.kappa_sections, ps.up.skeleton)
        lift = lift_blow_up(lift, ps.blow_up_up)
        inv = {e: 1 / v for e, v in ps.kappa.items()}
        moved = rescale_lift(lift, inv, ps.identified)
        bd = ps.blow_up_down.skeleton
        A = {e: moved.A[ps.edge_identification[e]] for e in bd.edges}
        lift = _verified(bd, A, lift.p)
        lift = descend_blow_up_lift(lift, ps.blow_up_down)
        stages.append({
            "stage": "passage",
            "vertex": ps.vertex,
            "c": str(c),
            "c_next": str(c_next),
            "index": len(ps.incoming),
            "clauses": dict(ps.clauses),
            "sha256": _lift_hash(lift),
        })
        c = c_next
    assert lo < c < hi
    final = cross_section(hat, prod.xi, prod.morse, c, "down", hfaces)
    base, emap = recover_base(prod, final)
    kappa = equivalence_witness(skel, base)
    A = {emap[lab]: la.scale(kappa[emap[lab]], v) for lab, v in lift.A.items()}
    p = LinearMap(lift.p.rows[:-1], lift.p.source_dim)
    rep = verify_total_lift(skel, A, p)
    stages.append({"stage": "final", "c": str(c), "verified": rep.ok, "sha256": _lift_hash(LiftResult(A, p))})
    if not rep.ok:
        raise LiftInconsistency("sweep produced an invalid lift: %s" % rep.as_dict())
    return TotalLift("lifted", LiftResult(A, p, True, rep), cert, "", xi, stages)
