import random
from fractions import Fraction

import numpy as np
import pytest
from scipy.optimize import linprog

from skeleta import fixtures
from skeleta import linalg as la
from skeleta.analysis import is_generic, is_toral, polarization
from skeleta.fans import (
    Fan,
    FanError,
    NotToral,
    check_embedding,
    cube_fan,
    embedding_system,
    fan_compat,
    fan_to_skeleton,
    find_embedding,
    polytopal_check,
    simplex_fan,
    skeleton_to_fan,
    square_fan,
    twisted_prism_fan,
    validate_fan,
)
from skeleta.skeleton import endpoint_edge_map, equivalence_witness, relabel


def convex_support_exists(fan):
    """Independent float LP: is there a conewise-linear F, strictly convex across every wall?"""
    R = np.array([[float(x) for x in r] for r in fan.rays])
    d, n = fan.dimension, len(fan.cones)
    A_eq, A_ub = [], []
    for tau, (i, j) in fan.facets().items():
        for k in tau:
            row = np.zeros(d * n)
            row[d * i:d * i + d] = R[k]
            row[d * j:d * j + d] -= R[k]
            A_eq.append(row)
        r1 = next(k for k in fan.cones[i] if k not in tau)
        row = np.zeros(d * n)
        row[d * i:d * i + d] = R[r1]
        row[d * j:d * j + d] -= R[r1]
        A_ub.append(row)
    res = linprog(np.zeros(d * n), A_ub=A_ub, b_ub=[-1] * len(A_ub), A_eq=A_eq, b_eq=[0] * len(A_eq),
                  bounds=[(None, None)] * (d * n), method="highs")
    return res.status == 0


def cycle_lp_feasible(skel):
    """Independent float LP on the cycle system M c = 0, c >= 1."""
    reps, M, _ = embedding_system(skel)
    if not M:
        return True
    M = np.array([[float(x) for x in r] for r in M])
    res = linprog(np.zeros(len(reps)), A_eq=M, b_eq=np.zeros(len(M)), bounds=[(1, None)] * len(reps),
                  method="highs")
    return res.status == 0


def fans_equal_up_to_scaling(f1, f2):
    def norm(fan):
        rays = [la.primitive(r) for r in fan.rays]
        return {frozenset(rays[k] for k in c) for c in fan.cones}
    return norm(f1) == norm(f2)


# -- validation ---------------------------------------------------------------------

@pytest.mark.parametrize("make", [square_fan, cube_fan, simplex_fan, twisted_prism_fan, lambda: simplex_fan(2)])
def test_valid_fans(make):
    assert validate_fan(make()).ok


def test_cube_fan_has_eight_cones():
    fan = cube_fan()
    assert len(fan.cones) == 8 and len(fan.rays) == 6


def test_simplex_fan_four_cones():
    assert len(simplex_fan(3).cones) == 4


def test_missing_cone_incomplete():
    fan = simplex_fan(3)
    broken = Fan.make(3, fan.rays, fan.cones[1:])
    rep = validate_fan(broken)
    assert "complete" in rep.kinds()
    assert any(len(p.cones) == 1 for p in rep.problems if p.kind == "complete")


def test_non_simplicial_rejected():
    rep = validate_fan(Fan.make(2, [(1, 0), (2, 0), (0, 1)], [(0, 1), (1, 2)]))
    assert "simplicial" in rep.kinds()


def test_overlapping_cones_rejected():
    fan = Fan.make(2, [(1, 0), (0, 1), (-1, 0), (0, -1), (1, 1)],
                   [(0, 1), (1, 2), (2, 3), (3, 0), (0, 4)])
    rep = validate_fan(fan)
    assert "face-to-face" in rep.kinds()
    assert any(set(p.cones) == {0, 4} for p in rep.problems)


def test_fan_to_skeleton_rejects_invalid():
    fan = simplex_fan(3)
    with pytest.raises(FanError):
        fan_to_skeleton(Fan.make(3, fan.rays, fan.cones[1:]))


# -- the dictionary ---------------------------------------------------------------

def test_square_fan_skeleton():
    s = fan_to_skeleton(square_fan())
    assert len(s.vertices) == 4 and s.valency == 2
    vectors = {tuple(v) for v in s.alpha.values()}
    assert vectors == {(1, 0), (-1, 0), (0, 1), (0, -1)}


def test_cube_fan_skeleton_is_cube_graph():
    s = fan_to_skeleton(cube_fan())
    assert len(s.vertices) == 8 and s.valency == 3
    # brute force: adjacent cones share exactly two rays
    fan = cube_fan()
    adj = sum(1 for i in range(8) for j in range(8) if i < j and len(set(fan.cones[i]) & set(fan.cones[j])) == 2)
    assert adj == 12 == len(s.edges) // 2


def test_simplex_fan_skeleton_complete_graph():
    for d in (2, 3, 4):
        s = fan_to_skeleton(simplex_fan(d))
        assert len(s.vertices) == d + 1
        assert all(s.graph.between(a, b) for a in s.vertices for b in s.vertices if a != b)


def test_alpha_points_into_source_cone():
    fan = twisted_prism_fan()
    s = fan_to_skeleton(fan)
    for e in s.edges:
        i = int(s.src(e)[1:])
        j = int(s.dst(e)[1:])
        inside = [k for k in fan.cones[i] if k not in fan.cones[j]][0]
        assert la.dot(fan.rays[inside], s.alpha[e]) > 0
        assert s.alpha[s.rev(e)] == la.scale(-1, s.alpha[e])


@pytest.mark.parametrize("make", [square_fan, cube_fan, simplex_fan, twisted_prism_fan])
def test_fan_skeleton_independent_and_toral(make):
    fan = make()
    s = fan_to_skeleton(fan)
    assert s.independence_degree == fan.dimension
    assert is_toral(s)


@pytest.mark.parametrize("make", [square_fan, cube_fan, simplex_fan, twisted_prism_fan])
def test_round_trip_fan(make):
    fan = make()
    back = skeleton_to_fan(fan_to_skeleton(fan))
    assert fans_equal_up_to_scaling(fan, back)


@pytest.mark.parametrize("make", [fixtures.cube, fixtures.simplex, fixtures.square, fixtures.triangular_prism])
def test_round_trip_skeleton(make):
    s = make()
    t = fan_to_skeleton(skeleton_to_fan(s))
    vmap = {"C%d" % i: v for i, v in enumerate(s.vertices)}
    emap = endpoint_edge_map(t, vmap, s.graph)
    t = relabel(t, vmap, emap)
    assert equivalence_witness(t, s)


def test_cube_skeleton_gives_orthant_fan():
    fan = skeleton_to_fan(fixtures.cube())
    assert fans_equal_up_to_scaling(fan, cube_fan())
    assert fans_equal_up_to_scaling(skeleton_to_fan(fixtures.simplex(3)), simplex_fan(3))


def test_skeleton_to_fan_needs_toral_input():
    with pytest.raises(ValueError):
        skeleton_to_fan(fixtures.octahedron())
    # a two-source polygon in the plane is 2-valent and 2-independent but not pointed
    s = fixtures.pentagram()
    with pytest.raises(NotToral) as exc:
        skeleton_to_fan(s)
    assert exc.value.verdict.slice is not None


@pytest.mark.parametrize("make", [cube_fan, simplex_fan, twisted_prism_fan])
def test_lambda_independent_of_eta(make):
    fan = make()
    s = fan_to_skeleton(fan)
    for e in s.edges:
        for x in s.out(s.src(e)):
            if x == e:
                continue
            a = fan_compat(fan, s, e, x)
            i = int(s.src(e)[1:])
            j = int(s.dst(x)[1:])
            r = [k for k in fan.cones[i] if k not in fan.cones[j]][0]
            b = fan_compat(fan, s, e, x, la.scale(Fraction(7, 3), fan.rays[r]))
            assert a == b == s.lam[e][x]


# -- embeddings ----------------------------------------------------------------------

def test_cube_coordinates_embed():
    s = fixtures.cube()
    f = {v: tuple(int(c) for c in v) for v in s.vertices}
    chk = check_embedding(s, f)
    assert chk.ok and set(chk.c.values()) == {1}


def test_negated_vertex_breaks_embedding():
    s = fixtures.cube()
    f = {v: tuple(int(c) for c in v) for v in s.vertices}
    f["111"] = (-1, -1, -1)
    chk = check_embedding(s, f)
    assert not chk.ok
    assert set(chk.violations) == {"111>011", "111>101", "111>110", "011>111", "101>111", "110>111"}


def test_stacked_product_embedding():
    from skeleta.analysis import morse_function
    from skeleta.constructions import cut

    s = fixtures.cube()
    res = cut(s, (1, 2, 4), morse_function(s, (1, 2, 4)))
    f = {}
    for v in s.vertices:
        base = tuple(Fraction(int(c)) for c in v)
        f["(%s,0)" % v] = base + (Fraction(0),)
        f["(%s,1)" % v] = base + (Fraction(1),)
    assert check_embedding(res.skeleton, f).ok


@pytest.mark.parametrize("make", [fixtures.cube, fixtures.interval, fixtures.simplex, fixtures.triangular_prism,
                                  lambda: fixtures.projected(fixtures.cube(), 2, 1)])
def test_find_embedding_feasible(make):
    s = make()
    res = find_embedding(s)
    assert res.feasible
    assert check_embedding(s, res.embedding.f).ok
    assert cycle_lp_feasible(s)


def test_twisted_fan_skeleton_has_no_embedding():
    fan = twisted_prism_fan()
    s = fan_to_skeleton(fan)
    res = find_embedding(s)
    assert not res.feasible
    cert = res.certificate
    assert cert.check()
    # independent validation of the certificate: vector . matrix = 0, vector . rhs < 0, multipliers >= 0
    z = cert.vector
    cols = list(zip(*cert.matrix))
    assert all(sum(a * b for a, b in zip(z, col)) == 0 for col in cols)
    assert sum(a * b for a, b in zip(z, cert.rhs)) < 0
    assert all(m >= 0 for m in z[cert.n_equalities:])
    # and by floating point LPs that share nothing with the exact solver
    assert not cycle_lp_feasible(s)
    assert not convex_support_exists(fan)


def test_polytopal():
    assert polytopal_check(square_fan())
    assert polytopal_check(simplex_fan(3))
    assert polytopal_check(cube_fan())
    assert convex_support_exists(cube_fan())
    assert not polytopal_check(twisted_prism_fan())


def test_embedded_skeleta_polarize():
    rng = random.Random(2)
    s = fixtures.triangular_prism()
    assert find_embedding(s).feasible
    for _ in range(10):
        xi = tuple(Fraction(rng.randint(-9, 9)) for _ in range(3))
        if is_generic(s, xi):
            assert polarization(s, xi).polarizing
