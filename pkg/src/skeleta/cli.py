"""Command line interface.

Exit codes: 0 success or true, 1 a definite negative answer (a certificate
is printed), 2 usage or input error, 3 could not decide.
"""
import argparse
import json
import sys

from . import fixtures
from .analysis import (
    SubskeletonError,
    betti_numbers,
    enumerate_2faces,
    find_polarizing,
    generic_covector,
    has_trivial_normal_holonomy,
    is_generic,
    is_level,
    is_toral,
    morse_function,
    oriented_graph,
    polarization,
)
from .codec import (
    InstanceError,
    InstanceFile,
    decode,
    encode,
    fan_to_json,
    lift_to_json,
    parse_rational,
    skeleton_to_json,
    subskeleton_from_json,
)
from .constructions import (
    BlowUpError,
    NotReducibleError,
    RegularValueError,
    blow_up,
    blow_up_system_from_levelness,
    critical_passage_check,
    cross_section,
    cut,
)
from .fans import FanError, NotToral, check_embedding, fan_to_skeleton, find_embedding, skeleton_to_fan
from .lifting import total_lift, verify_total_lift
from .skeleton import StructuralError, validate

OK, NO, USAGE, UNDECIDED = 0, 1, 2, 3

FIXTURES = {
    "interval": fixtures.interval,
    "square": fixtures.square,
    "cube": fixtures.cube,
    "cube4": lambda: fixtures.cube(4),
    "simplex": fixtures.simplex,
    "simplex2": lambda: fixtures.simplex(2),
    "simplex4": lambda: fixtures.simplex(4),
    "octahedron": fixtures.octahedron,
    "prism": fixtures.triangular_prism,
    "unlevel-prism": fixtures.unlevel_prism,
    "pentagram": fixtures.pentagram,
    "parallel-triangle": fixtures.parallel_triangle,
    "hexagon-chords": fixtures.hexagon_with_chords,
}


class UsageError(Exception):
    pass


class Context:
    def __init__(self, args, argv):
        self.args = args
        self.command = " ".join(["skeleta"] + list(argv))
        self.parents = []

    def load(self, path):
        if path is None:
            raise UsageError("--input is required")
        if path.startswith("fixture:"):
            name = path.split(":", 1)[1]
            if name not in FIXTURES:
                raise UsageError("unknown fixture %r (known: %s)" % (name, ", ".join(sorted(FIXTURES))))
            inst = InstanceFile("skeleton", skeleton_to_json(FIXTURES[name]()))
        else:
            try:
                with open(path, "rb") as fh:
                    inst = decode(fh.read())
            except OSError as exc:
                raise UsageError(str(exc)) from None
        self.parents.append(inst.digest)
        return inst

    def skeleton(self, path=None):
        return self.load(path or self.args.input).skeleton()

    def fan(self, path=None):
        return self.load(path or self.args.input).fan()

    def emit(self, report, instance=None, dot=None):
        """Write the instance to --out, then the report (JSON or text) to stdout."""
        if instance is not None:
            instance.command = self.command
            instance.parents = list(self.parents)
            out = getattr(self.args, "out", None)
            if out:
                with open(out, "wb") as fh:
                    fh.write(encode(instance))
                report = dict(report, output=out, sha256=instance.digest)
        if getattr(self.args, "dot", False) and dot is not None:
            sys.stdout.write(dot)
            return
        if getattr(self.args, "json", False):
            sys.stdout.write(json.dumps(report, sort_keys=True, indent=1) + "\n")
            return
        for k in sorted(report):
            v = report[k]
            if isinstance(v, (dict, list)):
                v = json.dumps(v, sort_keys=True)
            sys.stdout.write("%s: %s\n" % (k, v))


def _xi(text, skel=None):
    if text is None:
        return None
    try:
        xi = tuple(parse_rational(x) for x in text.split(","))
    except InstanceError as exc:
        raise UsageError(str(exc)) from None
    if skel is not None and len(xi) != skel.dimension:
        raise UsageError("covector has %d entries, skeleton dimension is %d" % (len(xi), skel.dimension))
    return xi


def _polarizing(skel, text):
    xi = _xi(text, skel)
    if xi is None:
        found = find_polarizing(skel)
        if not found.found:
            return None
        return found.covector
    if not polarization(skel, xi).polarizing:
        raise UsageError("covector %s is not polarizing" % (text,))
    return xi


def _strs(v):
    return [str(x) for x in v]


def to_dot(skel, xi=None, name="skeleton"):
    lines = ["digraph %s {" % json.dumps(name)]
    for v in skel.vertices:
        lines.append("  %s;" % json.dumps(v))
    if xi is not None:
        g = oriented_graph(skel, xi)
        for u, v in g.edges():
            lines.append("  %s -> %s;" % (json.dumps(u), json.dumps(v)))
    else:
        done = set()
        for e in skel.edges:
            if skel.rev(e) in done:
                continue
            done.add(e)
            lines.append("  %s -> %s [dir=none, label=%s];" % (
                json.dumps(skel.src(e)), json.dumps(skel.dst(e)), json.dumps(",".join(_strs(skel.alpha[e])))))
    lines.append("}")
    return "\n".join(lines) + "\n"


# -- subcommands ----------------------------------------------------------------------

def cmd_fixture(ctx):
    a = ctx.args
    if a.name not in FIXTURES:
        raise UsageError("unknown fixture %r (known: %s)" % (a.name, ", ".join(sorted(FIXTURES))))
    skel = FIXTURES[a.name]()
    inst = InstanceFile("skeleton", skeleton_to_json(skel))
    if not a.out:
        sys.stdout.buffer.write(encode(inst) + b"\n")
        return OK
    ctx.emit({"fixture": a.name, "vertices": len(skel.vertices)}, inst)
    return OK


def cmd_validate(ctx):
    skel = ctx.skeleton()
    rep = validate(skel)
    out = dict(rep.as_dict())
    if rep.ok:
        out.update(valency=skel.valency, dimension=skel.dimension, independence=skel.independence_degree)
    ctx.emit(out, dot=to_dot(skel))
    return OK if rep.ok else NO


def cmd_analyze(ctx):
    skel = ctx.skeleton()
    xi = _xi(ctx.args.xi, skel)
    if xi is None:
        xi = generic_covector(skel)
    if not is_generic(skel, xi):
        raise UsageError("covector is not generic")
    wanted = set(ctx.args.report.split(","))
    out = {"xi": _strs(xi), "polarizing": polarization(skel, xi).polarizing,
           "independence": skel.independence_degree}
    if "betti" in wanted:
        out["betti"] = list(betti_numbers(skel, xi))
    if wanted & {"faces", "holonomy", "level"}:
        fe = enumerate_2faces(skel, xi)
        out["enough_faces"] = fe.enough
        out["reducible"] = fe.reducible
        faces = []
        for f in fe.faces:
            row = {"face": f.label}
            if "holonomy" in wanted:
                row["trivial_holonomy"] = has_trivial_normal_holonomy(f.sub).as_dict()
            if "level" in wanted:
                row["level"] = is_level(f.sub).as_dict()
            faces.append(row)
        out["faces"] = faces
        out["face_failures"] = [str(x) for x in fe.failures]
    if "toral" in wanted:
        try:
            out["toral"] = is_toral(skel).ok
        except ValueError as exc:
            out["toral"] = str(exc)
    ctx.emit(out, dot=to_dot(skel, xi))
    return OK


def cmd_blowup(ctx):
    skel = ctx.skeleton()
    a = ctx.args
    if a.sub:
        inst = ctx.load(a.sub)
        if inst.kind != "subskeleton":
            raise UsageError("--sub must be a subskeleton instance")
        sub = subskeleton_from_json(inst.payload, skel)
    elif a.vertex:
        from .analysis import Subskeleton
        sub = Subskeleton.point(skel, a.vertex)
    else:
        raise UsageError("give --sub or --vertex")
    if a.system:
        with open(a.system) as fh:
            n = {e: parse_rational(v) for e, v in json.load(fh).items()}
    else:
        try:
            n = blow_up_system_from_levelness(sub)
        except BlowUpError as exc:
            ctx.emit({"ok": False, "reason": str(exc)})
            return NO
    try:
        bu = blow_up(skel, sub, n)
    except BlowUpError as exc:
        ctx.emit({"ok": False, "reason": str(exc)})
        return NO
    s = bu.skeleton
    inst = InstanceFile("skeleton", skeleton_to_json(s))
    ctx.emit({"ok": True, "vertices": len(s.vertices), "valency": s.valency,
              "system": {e: str(v) for e, v in n.items()}}, inst, to_dot(s))
    return OK


def _sweep_setup(ctx):
    skel = ctx.skeleton()
    xi = _polarizing(skel, ctx.args.xi)
    if xi is None:
        return skel, None, None
    return skel, xi, morse_function(skel, xi)


def cmd_cross_section(ctx):
    skel, xi, morse = _sweep_setup(ctx)
    if xi is None:
        ctx.emit({"ok": False, "reason": "no polarizing covector found"})
        return UNDECIDED
    c = parse_rational(ctx.args.c)
    cs = cross_section(skel, xi, morse, c, ctx.args.dir)
    s = cs.skeleton
    inst = InstanceFile("skeleton", skeleton_to_json(s))
    ctx.emit({"ok": True, "c": str(c), "direction": cs.direction, "vertices": len(s.vertices),
              "xi": _strs(xi)}, inst, to_dot(s))
    return OK


def cmd_cut(ctx):
    skel, xi, morse = _sweep_setup(ctx)
    if xi is None:
        ctx.emit({"ok": False, "reason": "no polarizing covector found"})
        return UNDECIDED
    a = None if ctx.args.a is None else parse_rational(ctx.args.a)
    res = cut(skel, xi, morse, a)
    lo, hi = res.level_range()
    inst = InstanceFile("skeleton", skeleton_to_json(res.skeleton))
    ctx.emit({"ok": True, "a": str(res.a), "xi": _strs(res.xi), "base_levels": [str(lo), str(hi)],
              "vertices": len(res.skeleton.vertices)}, inst, to_dot(res.skeleton, res.xi))
    return OK


def cmd_passage(ctx):
    skel, xi, morse = _sweep_setup(ctx)
    if xi is None:
        ctx.emit({"ok": False, "reason": "no polarizing covector found"})
        return UNDECIDED
    c, c2 = parse_rational(ctx.args.c), parse_rational(ctx.args.cprime)
    try:
        ps = critical_passage_check(skel, xi, morse, c, c2)
    except BlowUpError as exc:
        ctx.emit({"ok": False, "reason": str(exc)})
        return NO
    out = {
        "ok": ps.ok,
        "vertex": ps.vertex,
        "clauses": dict(ps.clauses),
        "kappa": {e: str(v) for e, v in ps.kappa.items()},
        "table_mismatches": [[e, row, str(v), str(w)] for e, row, v, w in ps.table_mismatches()],
    }
    ctx.emit(out)
    return OK if ps.ok else NO


def cmd_lift(ctx):
    a = ctx.args
    if a.verify:
        lp = ctx.load(a.verify).lift()
        rep = verify_total_lift(lp.skeleton, lp.A, lp.p)
        ctx.emit(rep.as_dict())
        return OK if rep.ok else NO
    skel = ctx.skeleton()
    xi = _xi(a.xi, skel)
    res = total_lift(skel, xi, seed=a.seed)
    out = {"status": res.status, "reason": res.reason, "xi": None if res.xi is None else _strs(res.xi)}
    if res.certificate is not None:
        cert = res.certificate.as_dict()
        out["certificate"] = cert if res.status == "obstructed" else {"satisfied": cert["satisfied"]}
        if res.status == "obstructed":
            out["failures"] = [v.face.label for v in res.certificate.failures]
    if res.ok:
        inst = InstanceFile("lift", lift_to_json(skel, res.lift, res.xi, res.stages))
        out["p"] = [_strs(r) for r in res.lift.p.rows]
        out["stages"] = len(res.stages)
        ctx.emit(out, inst)
        return OK
    ctx.emit(out)
    return NO if res.status == "obstructed" else UNDECIDED


def cmd_fan2skel(ctx):
    fan = ctx.fan()
    try:
        s = fan_to_skeleton(fan)
    except FanError as exc:
        rep = exc.report.as_dict() if exc.report is not None else {"ok": False, "problems": [str(exc)]}
        ctx.emit(rep)
        return USAGE
    inst = InstanceFile("skeleton", skeleton_to_json(s))
    ctx.emit({"ok": True, "vertices": len(s.vertices), "valency": s.valency}, inst, to_dot(s))
    return OK


def cmd_skel2fan(ctx):
    skel = ctx.skeleton()
    try:
        fan = skeleton_to_fan(skel)
    except NotToral as exc:
        sl = exc.verdict.slice
        ctx.emit({"ok": False, "reason": str(exc),
                  "slice": {"vertices": list(sl.vertices), "edges": sorted(sl.edges)}})
        return NO
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    inst = InstanceFile("fan", fan_to_json(fan))
    ctx.emit({"ok": True, "rays": len(fan.rays), "cones": len(fan.cones)}, inst)
    return OK


def cmd_embed(ctx):
    a = ctx.args
    skel = ctx.skeleton()
    if a.check:
        with open(a.check) as fh:
            raw = json.load(fh)
        raw = raw.get("f", raw)
        f = {v: tuple(parse_rational(x) for x in xs) for v, xs in raw.items()}
        chk = check_embedding(skel, f)
        ctx.emit({"ok": chk.ok, "c": {e: str(v) for e, v in chk.c.items()}, "violations": chk.violations})
        return OK if chk.ok else NO
    res = find_embedding(skel)
    if res.feasible:
        emb = res.embedding
        ctx.emit({"feasible": True, "f": {v: _strs(x) for v, x in emb.f.items()},
                  "c": {e: str(v) for e, v in emb.c.items()}})
        return OK
    ctx.emit({"feasible": False, "certificate": res.certificate.as_dict()})
    return NO


def cmd_polytopal(ctx):
    fan = ctx.fan()
    try:
        s = fan_to_skeleton(fan)
    except FanError as exc:
        raise UsageError(str(exc)) from None
    res = find_embedding(s)
    out = {"polytopal": res.feasible}
    if res.feasible:
        out["support"] = {v: _strs(x) for v, x in res.embedding.f.items()}
    else:
        out["certificate"] = res.certificate.as_dict()
    ctx.emit(out)
    return OK if res.feasible else NO


def build_parser():
    ap = argparse.ArgumentParser(prog="skeleta", description="Exact computations with 1-skeleta and fans.")
    sp = ap.add_subparsers(dest="cmd", required=True)

    def sub(name, fn, help_, out=True):
        p = sp.add_parser(name, help=help_)
        p.add_argument("--input", "-i", help="instance file, or fixture:NAME")
        p.add_argument("--json", action="store_true", help="machine readable report")
        p.add_argument("--dot", action="store_true", help="emit the graph in DOT format")
        if out:
            p.add_argument("--out", "-o", help="write the resulting instance here")
        p.set_defaults(fn=fn)
        return p

    p = sub("fixture", cmd_fixture, "write a built-in fixture")
    p.add_argument("name")
    sub("validate", cmd_validate, "check the skeleton axioms", out=False)
    p = sub("analyze", cmd_analyze, "Betti numbers, 2-faces, holonomy and levelness", out=False)
    p.add_argument("--xi")
    p.add_argument("--report", default="faces,betti,holonomy,level")
    p = sub("blowup", cmd_blowup, "blow up along a level subskeleton")
    p.add_argument("--sub")
    p.add_argument("--vertex", help="blow up a single vertex")
    p.add_argument("--system", help="JSON map edge -> rational blow-up system")
    p.add_argument("--derive", action="store_true", help="derive the system from levelness (default)")
    p = sub("cross-section", cmd_cross_section, "up or down cross section at a regular value")
    p.add_argument("--xi")
    p.add_argument("--c", required=True)
    p.add_argument("--dir", choices=("up", "down"), default="down")
    p = sub("cut", cmd_cut, "product with the interval")
    p.add_argument("--xi")
    p.add_argument("--a")
    p = sub("passage", cmd_passage, "check the passage over one critical value", out=False)
    p.add_argument("--xi")
    p.add_argument("--c", required=True)
    p.add_argument("--cprime", required=True)
    p = sub("lift", cmd_lift, "decide and build a total lift")
    p.add_argument("--xi")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--verify", help="re-verify a lift instance")
    sub("fan2skel", cmd_fan2skel, "skeleton of a complete simplicial fan")
    sub("skel2fan", cmd_skel2fan, "fan of a toral skeleton")
    p = sub("embed", cmd_embed, "find or check an embedding", out=False)
    g = p.add_mutually_exclusive_group()
    g.add_argument("--find", action="store_true", help="search by exact LP (default)")
    g.add_argument("--check", metavar="F_JSON", help="check a vertex placement")
    sub("polytopal", cmd_polytopal, "is the fan polytopal", out=False)
    return ap


def main(argv=None):
    argv = sys.argv[1:] if argv is None else list(argv)
    ap = build_parser()
    try:
        args = ap.parse_args(argv)
    except SystemExit as exc:
        return USAGE if exc.code else OK
    ctx = Context(args, argv)
    try:
        return args.fn(ctx)
    except (UsageError, InstanceError, StructuralError, SubskeletonError, RegularValueError, OSError,
            json.JSONDecodeError) as exc:
        sys.stderr.write("error: %s\n" % exc)
        return USAGE
    except NotReducibleError as exc:
        sys.stderr.write("undecided: %s\n" % exc)
        return UNDECIDED
    except ValueError as exc:
        sys.stderr.write("error: %s\n" % exc)
        return USAGE


if __name__ == "__main__":
    sys.exit(main())
