"""Canonical JSON encoding of skeleta, fans, subskeleta, lifts and reports.

Rationals travel as strings ("p/q" in lowest terms, or "p" for integers) so
nothing passes through floating point.  Instance files are serialized with
sorted keys and no whitespace, which makes their sha256 reproducible.
"""
import hashlib
import json
import re
from dataclasses import dataclass, field
from fractions import Fraction

from .analysis import Subskeleton
from .fans import Fan
from .skeleton import DanglingReferenceError, Edge, GenSkeleton, Graph, LinearMap, StructuralError

FORMAT = "skeleta/1"
KINDS = ("skeleton", "fan", "subskeleton", "lift", "report")

_RATIONAL = re.compile(r"^-?\d+(/\d+)?$")


class InstanceError(ValueError):
    """Base class for unreadable instance files."""


class FormatVersionError(InstanceError):
    pass


class MalformedRationalError(InstanceError):
    pass


class IntegrityError(InstanceError):
    """A stored hash does not match the payload."""


def rat(x):
    x = Fraction(x)
    return str(x)


def parse_rational(s):
    if isinstance(s, bool) or isinstance(s, float):
        raise MalformedRationalError("rational must be a string or integer, got %r" % (s,))
    if isinstance(s, int):
        return Fraction(s)
    if not isinstance(s, str) or not _RATIONAL.match(s.strip()):
        raise MalformedRationalError("malformed rational %r" % (s,))
    num, _, den = s.strip().partition("/")
    if den and int(den) == 0:
        raise MalformedRationalError("zero denominator in %r" % s)
    return Fraction(int(num), int(den or 1))


def _vec(xs):
    if not isinstance(xs, list):
        raise InstanceError("expected a list of rationals, got %r" % (xs,))
    return tuple(parse_rational(x) for x in xs)


def canonical(obj):
    return json.dumps(obj, sort_keys=True, separators=(",", ":"), ensure_ascii=False).encode("utf-8")


def sha256(obj):
    return hashlib.sha256(canonical(obj)).hexdigest()


# -- payload codecs ----------------------------------------------------------------

def skeleton_to_json(skel):
    g = skel.graph
    return {
        "dimension": skel.dimension,
        "vertices": list(g.vertices),
        "edges": [
            {"id": e.id, "from": e.src, "to": e.dst, "reverse_id": e.rev, "alpha": [rat(x) for x in skel.alpha[e.id]]}
            for e in g.edges.values()
        ],
        "theta": {e: dict(row) for e, row in skel.theta.items()},
        "lambda": {e: {x: rat(v) for x, v in row.items()} for e, row in skel.lam.items()},
    }


def skeleton_from_json(d):
    try:
        edges = [Edge(e["id"], e["from"], e["to"], e["reverse_id"]) for e in d["edges"]]
        graph = Graph(d["vertices"], edges)
        alpha = {e["id"]: _vec(e["alpha"]) for e in d["edges"]}
        theta = d["theta"]
        lam = {e: {x: parse_rational(v) for x, v in row.items()} for e, row in d["lambda"].items()}
        for table in (theta, lam):
            for e in table:
                if e not in graph.edges:
                    raise DanglingReferenceError("map entry for unknown edge %r" % e)
        return GenSkeleton(graph, alpha, theta, lam, d["dimension"])
    except (KeyError, TypeError, AttributeError) as exc:
        raise InstanceError("malformed skeleton: %r" % (exc,)) from None


def fan_to_json(fan):
    return {
        "dimension": fan.dimension,
        "rays": [[rat(x) for x in r] for r in fan.rays],
        "cones": [list(c) for c in fan.cones],
    }


def fan_from_json(d):
    try:
        rays = [_vec(r) for r in d["rays"]]
        cones = [list(c) for c in d["cones"]]
        for c in cones:
            for k in c:
                if not isinstance(k, int) or not 0 <= k < len(rays):
                    raise DanglingReferenceError("cone %s refers to unknown ray %r" % (c, k))
        return Fan.make(d["dimension"], rays, cones)
    except (KeyError, TypeError) as exc:
        raise InstanceError("malformed fan: %r" % (exc,)) from None


def subskeleton_to_json(sub):
    return {"vertices": list(sub.vertices), "edges": sorted(sub.edges)}


def subskeleton_from_json(d, parent):
    for v in d.get("vertices", []):
        if v not in parent.graph.vertices:
            raise DanglingReferenceError("subskeleton names unknown vertex %r" % v)
    for e in d.get("edges", []):
        if e not in parent.edges:
            raise DanglingReferenceError("subskeleton names unknown edge %r" % e)
    return Subskeleton(parent, d["vertices"], d["edges"])


def lift_to_json(skel, lift, xi=None, stages=()):
    return {
        "skeleton": skeleton_to_json(skel),
        "A": {e: [rat(x) for x in v] for e, v in lift.A.items()},
        "p": {"rows": [[rat(x) for x in r] for r in lift.p.rows], "source_dim": lift.p.source_dim},
        "xi": None if xi is None else [rat(x) for x in xi],
        "stages": list(stages),
    }


@dataclass
class LiftPayload:
    skeleton: GenSkeleton
    A: dict
    p: LinearMap
    xi: tuple = None
    stages: list = field(default_factory=list)


def lift_from_json(d):
    skel = skeleton_from_json(d["skeleton"])
    A = {}
    for e, v in d["A"].items():
        if e not in skel.edges:
            raise DanglingReferenceError("lift names unknown edge %r" % e)
        A[e] = _vec(v)
    p = LinearMap([_vec(r) for r in d["p"]["rows"]], d["p"]["source_dim"])
    xi = None if d.get("xi") is None else _vec(d["xi"])
    return LiftPayload(skel, A, p, xi, list(d.get("stages", [])))


# -- instance files ------------------------------------------------------------------

@dataclass
class InstanceFile:
    kind: str
    payload: dict
    command: str = ""
    parents: list = field(default_factory=list)

    @property
    def digest(self):
        return sha256(self.payload)

    def as_json(self):
        return {
            "format": FORMAT,
            "kind": self.kind,
            "payload": self.payload,
            "provenance": {"command": self.command, "parents": list(self.parents), "sha256": self.digest},
        }

    def skeleton(self):
        if self.kind != "skeleton":
            raise InstanceError("expected a skeleton instance, got %s" % self.kind)
        return skeleton_from_json(self.payload)

    def fan(self):
        if self.kind != "fan":
            raise InstanceError("expected a fan instance, got %s" % self.kind)
        return fan_from_json(self.payload)

    def lift(self):
        if self.kind != "lift":
            raise InstanceError("expected a lift instance, got %s" % self.kind)
        return lift_from_json(self.payload)


def encode(instance):
    return canonical(instance.as_json())


def decode(data):
    """Parse bytes into an InstanceFile, checking version and stored hash.

    Bare payloads (a skeleton or fan object without the envelope) are
    accepted too, so hand-written files load directly.
    """
    if isinstance(data, bytes):
        data = data.decode("utf-8")
    try:
        obj = json.loads(data, parse_float=_no_float)
    except json.JSONDecodeError as exc:
        raise InstanceError("not JSON: %s" % exc) from None
    if not isinstance(obj, dict):
        raise InstanceError("instance must be a JSON object")
    if "format" not in obj:
        if "rays" in obj:
            inst = InstanceFile("fan", obj)
        elif "edges" in obj:
            inst = InstanceFile("skeleton", obj)
        else:
            raise FormatVersionError("missing format field")
    else:
        if obj["format"] != FORMAT:
            raise FormatVersionError("unsupported format %r (expected %r)" % (obj["format"], FORMAT))
        kind = obj.get("kind")
        if kind not in KINDS:
            raise InstanceError("unknown payload kind %r" % (kind,))
        prov = obj.get("provenance") or {}
        inst = InstanceFile(kind, obj["payload"], prov.get("command", ""), list(prov.get("parents", [])))
        stored = prov.get("sha256")
        if stored is not None and stored != inst.digest:
            raise IntegrityError("payload hash %s does not match stored %s" % (inst.digest, stored))
    # re-validate on load
    if inst.kind == "skeleton":
        inst.skeleton()
    elif inst.kind == "fan":
        inst.fan()
    elif inst.kind == "lift":
        inst.lift()
    return inst


def _no_float(s):
    raise MalformedRationalError("floating point literal %s; write rationals as \"p/q\" strings" % s)


def normalize(data):
    """Canonical bytes of any instance or bare payload (normalizing rationals)."""
    inst = decode(data)
    if inst.kind == "skeleton":
        inst.payload = skeleton_to_json(inst.skeleton())
    elif inst.kind == "fan":
        inst.payload = fan_to_json(inst.fan())
    elif inst.kind == "lift":
        lp = inst.lift()
        inst.payload = lift_to_json(lp.skeleton, lp, lp.xi, lp.stages)
    return encode(inst)


__all__ = [
    "FORMAT", "InstanceFile", "InstanceError", "FormatVersionError", "MalformedRationalError",
    "IntegrityError", "DanglingReferenceError", "StructuralError", "encode", "decode", "normalize",
    "canonical", "sha256", "parse_rational", "skeleton_to_json", "skeleton_from_json",
    "fan_to_json", "fan_from_json", "subskeleton_to_json", "subskeleton_from_json",
    "lift_to_json", "lift_from_json",
]
