import random
from fractions import Fraction

import pytest

from skeleta import fans, fixtures
from skeleta import linalg as la
from skeleta.analysis import Subskeleton, morse_function
from skeleta.constructions import NotReducibleError, blow_up, cross_section
from skeleta.lifting import (
    LiftInconsistency,
    LiftResult,
    check_dagger,
    descend_blow_up_lift,
    lift_blow_up,
    lift_complete_section,
    total_lift,
    verify_lift,
    verify_total_lift,
)
from skeleta.skeleton import LinearMap

XI = (1, 2, 4)


def identity_lift(s):
    return LiftResult(dict(s.alpha), LinearMap.identity(s.dimension), True)


def test_dagger_cube():
    cert = check_dagger(fixtures.cube(), XI)
    assert cert.satisfied and len(cert.verdicts) == 6


def test_dagger_octahedron_fails_on_triangles():
    cert = check_dagger(fixtures.octahedron(), XI)
    assert not cert.satisfied
    failing = {v.face.label for v in cert.failures}
    triangles = {v.face.label for v in cert.verdicts if len(v.face.cycle) == 3}
    assert failing == triangles and len(triangles) == 8
    assert all(not v.holonomy and v.level for v in cert.failures)


def test_dagger_projected_cube():
    s = fixtures.projected(fixtures.cube(), 2, 4)
    xi = next(x for x in [(1, 3), (3, 1), (1, -3), (2, 7)] if _polar(s, x))
    assert check_dagger(s, xi).satisfied


def _polar(s, xi):
    from skeleta.analysis import polarization
    return polarization(s, xi).polarizing


def test_dagger_rejects_non_reducible():
    with pytest.raises(NotReducibleError):
        check_dagger(fixtures.hexagon_with_chords(), (1, 3))


def test_first_section_lift():
    s = fixtures.cube()
    m = morse_function(s, XI)
    cs = cross_section(s, XI, m, m.regular_values()[0], "down")
    assert all(v == 1 for row in cs.skeleton.lam.values() for v in row.values())
    res = lift_complete_section(cs)
    assert res.verified
    assert la.rank(list(res.A.values())) == 2
    assert all(res.p(res.A[e]) == cs.skeleton.alpha[e] for e in res.A)


def test_first_section_of_square_is_k2():
    s = fixtures.square()
    m = morse_function(s, (1, 2))
    cs = cross_section(s, (1, 2), m, m.regular_values()[0], "down")
    res = lift_complete_section(cs)
    assert all(len(v) == 1 for v in res.A.values())


def test_verify_identity_and_perturbation():
    s = fixtures.cube()
    assert verify_total_lift(s, s.alpha, LinearMap.identity(3)).ok
    A = dict(s.alpha)
    A["000>001"] = (0, 0, 2)
    rep = verify_total_lift(s, A, LinearMap.identity(3))
    assert not rep.ok
    assert "000>001" in rep.projection or not rep.axial.ok


def test_verify_flags_non_surjective():
    s = fixtures.interval()
    rep = verify_total_lift(s, {"0>1": (1,), "1>0": (-1,)}, LinearMap([[0]]))
    assert not rep.surjective and not rep.ok


def test_blow_up_lift_round_trip():
    s = fixtures.projected(fixtures.cube(), 2, 1)
    lift = total_lift(s).lift
    p = s.vertices[0]
    sub = Subskeleton.point(s, p)
    n = {e: Fraction(1) for e in s.out(p)}
    bu = blow_up(s, sub, n)
    up = lift_blow_up(lift, bu)
    assert up.verified
    for e in bu.skeleton.edges:
        if bu.kind[e] == "kept":
            assert up.A[e] == lift.A[bu.edge_map[e]]
    down = descend_blow_up_lift(up, bu)
    assert down.A == lift.A


def test_descend_rejects_inconsistent_fiber():
    s = fixtures.cube()
    face_edges = ["000>010", "010>000", "010>110", "110>010", "110>100", "100>110", "100>000", "000>100"]
    face = Subskeleton.from_edges(s, face_edges)
    n = {e: Fraction(1) for e in face.normal_edges}
    bu = blow_up(s, face, n)
    up = lift_blow_up(identity_lift(s), bu)
    bad = dict(up.A)
    e = next(x for x in bu.skeleton.edges if bu.kind[x] == "horizontal")
    bad[e] = la.scale(2, bad[e])
    with pytest.raises(LiftInconsistency):
        descend_blow_up_lift(LiftResult(bad, up.p), bu)


@pytest.mark.parametrize("seed", range(4))
def test_total_lift_projected_cube(seed):
    s = fixtures.projected(fixtures.cube(), 2, seed)
    res = total_lift(s)
    assert res.status == "lifted"
    rep = verify_total_lift(s, res.lift.A, res.lift.p)
    assert rep.ok
    assert la.rank(list(res.lift.A.values())) == 3
    assert all(res.lift.p(res.lift.A[e]) == s.alpha[e] for e in s.edges)


def test_total_lift_cube_itself():
    s = fixtures.cube()
    res = total_lift(s, XI)
    assert res.ok and res.lift.verified
    assert res.stages[0]["stage"] == "first-section"
    assert res.stages[-1]["verified"]


def test_total_lift_octahedron_obstructed():
    res = total_lift(fixtures.octahedron(), XI)
    assert res.status == "obstructed"
    assert not res.certificate.satisfied


def test_total_lift_unlevel_prism_obstructed():
    res = total_lift(fixtures.unlevel_prism())
    assert res.status == "obstructed"
    assert all(v.holonomy for v in res.certificate.verdicts)
    assert any(not v.level for v in res.certificate.verdicts)


def test_total_lift_inconclusive_cases():
    assert total_lift(fixtures.parallel_triangle(), tries=20).status == "inconclusive"
    res = total_lift(fixtures.hexagon_with_chords(), (1, 3))
    assert res.status == "inconclusive" and "2-faces" in res.reason


def test_total_lift_twisted_fan_skeleton():
    # 3-independent in R^3 already; the sweep still has to rebuild a lift
    s = fans.fan_to_skeleton(fans.twisted_prism_fan())
    res = total_lift(s)
    assert res.ok


def test_octahedron_random_lifts_fail():
    # any A with p o A = alpha fails to be a 4-independent axial function
    s = fixtures.octahedron()
    p = LinearMap([[1, 0, 0, 0], [0, 1, 0, 0], [0, 0, 1, 0]])
    rng = random.Random(5)
    pairs = {}
    for e in s.edges:
        key = min(e, s.rev(e))
        pairs.setdefault(key, Fraction(rng.randint(-5, 5)))
    for _ in range(30):
        A = {}
        for key in pairs:
            pairs[key] = Fraction(rng.randint(-5, 5))
        for e in s.edges:
            key = min(e, s.rev(e))
            sign = 1 if e == key else -1
            A[e] = tuple(s.alpha[e]) + (sign * pairs[key],)
        assert not verify_total_lift(s, A, p).ok


@pytest.mark.parametrize("make", [fixtures.cube, fixtures.simplex, lambda: fixtures.cube(4)])
def test_lambda_formula_for_independent_skeleta(make):
    s = make()
    d = s.valency
    for e in s.edges:
        p = s.src(e)
        out = s.out(p)
        for x in out:
            if x == e:
                continue
            # eta kills alpha(e) and every other edge at p except x
            rows = [s.alpha[y] for y in out if y != x]
            eta = la.nullspace(rows, s.dimension)[0]
            lam = la.dot(eta, s.alpha[x]) / la.dot(eta, s.alpha[s.theta[e][x]])
            assert lam == s.lam[e][x]
    assert d == s.independence_degree


def test_verify_lift_partial_dimension():
    s = fixtures.cube()
    rep = verify_lift(s, {e: v + (0,) for e, v in s.alpha.items()}, LinearMap([[1, 0, 0, 0], [0, 1, 0, 0], [0, 0, 1, 0]]))
    assert not rep.dimension_ok
