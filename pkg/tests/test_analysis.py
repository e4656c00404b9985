import random
from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from skeleta import fixtures
from skeleta.analysis import (
    EmptySliceError,
    Subskeleton,
    SubskeletonError,
    betti_invariance_check,
    betti_numbers,
    blow_up_system_check,
    chambers,
    enumerate_2faces,
    find_polarizing,
    has_trivial_normal_holonomy,
    is_generic,
    is_level,
    is_pointed,
    is_reducible,
    is_toral,
    k_slice,
    morse_function,
    path_connection,
    polarization,
)

import oracles

XI = (1, 2, 4)


def random_generic(skel, rng, bound=50):
    while True:
        xi = tuple(Fraction(rng.randint(-bound, bound)) for _ in range(skel.dimension))
        if is_generic(skel, xi):
            return xi


# -- slices and paths ---------------------------------------------------------------

def test_cube_bottom_square_slice():
    s = fixtures.cube()
    sl = k_slice(s, [(1, 0, 0), (0, 1, 0)], "000")
    assert set(sl.vertices) == {"000", "010", "100", "110"}
    assert sl.valency == 2
    assert len(sl.edges) == 8


def test_full_space_slice_is_everything():
    s = fixtures.cube()
    sl = k_slice(s, [(1, 0, 0), (0, 1, 0), (0, 0, 1)], "000")
    assert set(sl.vertices) == set(s.vertices) and sl.edges == set(s.edges)


def test_octahedron_triangle_plane_slice():
    s = fixtures.octahedron()
    u, v, w = (1, 0, 0), (0, 1, 0), (0, 0, 1)
    H = [tuple(a - b for a, b in zip(v, u)), tuple(a - b for a, b in zip(w, u))]
    sl = k_slice(s, H, "u")
    # the edges u-v, v-w, w-u are the only ones whose direction lies in that plane
    assert set(sl.vertices) == {"u", "v", "w"}
    assert sl.valency == 2


def test_empty_slice_error():
    with pytest.raises(EmptySliceError):
        k_slice(fixtures.square(), [(1, 1)], "00")


def test_empty_path_is_identity():
    s = fixtures.cube()
    sub = Subskeleton.point(s, "000")
    pt = path_connection(sub, ["000"])
    assert pt.normal == {e: e for e in s.out("000")}
    assert set(pt.numbers.values()) == {1}


def test_octahedron_loop_action():
    s = fixtures.octahedron()
    tri = enumerate_2faces(s, XI).face_through("u", "u>v", "u>w").sub
    pt = path_connection(tri, ["u", "v", "w", "u"])
    # ux -> vx -> wy -> uy
    assert oracles.walk_normal(s, ["u", "v"], "u>x")[0] == "v>x"
    assert oracles.walk_normal(s, ["u", "v", "w"], "u>x")[0] == "w>y"
    assert pt.normal["u>x"] == "u>y"
    assert oracles.walk_normal(s, ["u", "v", "w", "u"], "u>x")[0] == "u>y"


def test_path_leaving_sub_rejected():
    s = fixtures.cube()
    face = k_slice(s, [(1, 0, 0), (0, 1, 0)], "000")
    with pytest.raises(SubskeletonError):
        path_connection(face, ["000", "001"])


def _random_path(s, rng, start, length):
    path = [start]
    for _ in range(length):
        path.append(s.dst(rng.choice(s.out(path[-1]))))
    return path


@pytest.mark.parametrize("make", [fixtures.cube, fixtures.unlevel_prism, fixtures.octahedron])
def test_path_connection_functorial(make):
    s = make()
    whole = Subskeleton(s, s.vertices, s.edges)
    rng = random.Random(3)
    for _ in range(20):
        g1 = _random_path(s, rng, s.vertices[0], rng.randint(0, 4))
        g2 = _random_path(s, rng, g1[-1], rng.randint(0, 4))
        a = path_connection(whole, g1)
        b = path_connection(whole, g2)
        ab = path_connection(whole, g1 + g2[1:])
        for e in s.out(g1[0]):
            img = a.tangent[e]
            assert ab.tangent[e] == b.tangent[img]
            assert ab.numbers[e] == a.numbers[e] * b.numbers[img]
        back = path_connection(whole, list(reversed(g1)))
        for e in s.out(g1[0]):
            assert a.numbers[e] * back.numbers[a.tangent[e]] == 1


# -- holonomy and levelness -------------------------------------------------------

def test_cube_faces_trivial_holonomy_and_level():
    s = fixtures.cube()
    fe = enumerate_2faces(s, XI)
    for f in fe.faces:
        assert has_trivial_normal_holonomy(f.sub)
        assert is_level(f.sub)
        # brute force: every normal edge comes back to itself with number 1
        loop = list(f.cycle) + [f.cycle[0]]
        for e in f.sub.normal(f.cycle[0]):
            assert oracles.walk_normal(s, loop, e) == (e, 1)


def test_octahedron_triangle_nontrivial_holonomy():
    s = fixtures.octahedron()
    fe = enumerate_2faces(s, XI)
    tri = [f for f in fe.faces if len(f.cycle) == 3]
    assert len(tri) == 8
    for f in tri:
        v = has_trivial_normal_holonomy(f.sub)
        assert not v
        img, _ = oracles.walk_normal(s, v.loop, v.edge)
        assert img == v.image != v.edge


def test_whole_skeleton_has_no_normal_edges():
    s = fixtures.cube()
    whole = Subskeleton(s, s.vertices, s.edges)
    assert has_trivial_normal_holonomy(whole) and is_level(whole)


def test_unlevel_prism_outer_triangle():
    s = fixtures.unlevel_prism()
    assert s.valency == 3 and s.dimension == 2
    sub = Subskeleton.from_edges(s, ["x>y", "y>x", "y>z", "z>y", "z>x", "x>z"])
    assert has_trivial_normal_holonomy(sub)
    v = is_level(sub)
    assert not v
    img, num = oracles.walk_normal(s, ["x", "y", "z", "x"], "x>x'")
    assert img == "x>x'" and num == 2
    assert v.number in (2, Fraction(1, 2))


def test_blow_up_system_check_flags_bad_system():
    s = fixtures.cube()
    sub = k_slice(s, [(1, 0, 0), (0, 1, 0)], "000")
    n = {e: Fraction(1) for e in sub.normal_edges}
    assert blow_up_system_check(sub, n).ok
    n[sub.normal_edges[0]] = Fraction(2)
    assert not blow_up_system_check(sub, n).ok


# -- polarizations and Morse data -------------------------------------------------

def test_cube_generic_xi_polarizing():
    s = fixtures.cube()
    rng = random.Random(0)
    for _ in range(10):
        xi = random_generic(s, rng)
        assert polarization(s, xi).polarizing
        assert not oracles.directed_cycle_exists(s, xi)


def test_non_generic_xi():
    pol = polarization(fixtures.cube(), (1, 0, 0))
    assert not pol.generic and not pol.polarizing


def test_parallel_triangle_never_polarizes():
    s = fixtures.parallel_triangle()
    pol = polarization(s, (1, 0))
    assert pol.generic and not pol.polarizing
    assert len(pol.cycle) >= 3
    assert oracles.directed_cycle_exists(s, (1, 0))
    res = find_polarizing(s, strategy="chambers")
    assert not res.found and res.exhaustive
    assert len(chambers(s)) == 2


def test_find_polarizing():
    s = fixtures.cube()
    res = find_polarizing(s)
    assert res.found and polarization(s, res.covector).polarizing
    assert polarization(s, XI).polarizing
    res = find_polarizing(s, strategy="chambers")
    assert res.found and res.exhaustive
    assert find_polarizing(fixtures.interval(), strategy="chambers").found


def test_morse_function_compatible_and_injective():
    s = fixtures.cube()
    m = morse_function(s, XI)
    assert len(set(m.phi.values())) == 8
    for e, v in s.alpha.items():
        if sum(a * b for a, b in zip(XI, v)) > 0:
            assert m.phi[s.src(e)] < m.phi[s.dst(e)]
    assert sum(m.betti) == 8


def test_morse_rejects_non_polarizing():
    with pytest.raises(ValueError):
        morse_function(fixtures.parallel_triangle(), (1, 0))


def test_betti_values_against_positions():
    assert betti_numbers(fixtures.cube(), XI) == (1, 3, 3, 1)
    assert betti_numbers(fixtures.cube(), XI) == oracles.betti_from_positions(
        oracles.cube_positions(), oracles.cube_pairs(), XI)
    assert betti_numbers(fixtures.octahedron(), XI) == (1, 1, 2, 1, 1)
    assert betti_numbers(fixtures.octahedron(), XI) == oracles.betti_from_positions(
        oracles.octahedron_positions(), oracles.octahedron_pairs(), XI)
    for d in range(1, 6):
        assert betti_numbers(fixtures.simplex(d), tuple(range(1, d + 1))) == (1,) * (d + 1)


@pytest.mark.parametrize("make,expected", [
    (fixtures.cube, (1, 3, 3, 1)),
    (fixtures.octahedron, (1, 1, 2, 1, 1)),
    (fixtures.triangular_prism, (1, 2, 2, 1)),
])
def test_betti_invariance(make, expected):
    s = make()
    rng = random.Random(11)
    xis = [random_generic(s, rng) for _ in range(20)]
    assert betti_invariance_check(s, xis)
    assert betti_numbers(s, xis[0]) == expected
    assert betti_invariance_check(s, xis[:1])


def test_pointed():
    assert is_pointed(fixtures.cube(), XI)
    assert not is_pointed(fixtures.pentagram(), (1, 3))


# -- faces ---------------------------------------------------------------------------

def test_cube_faces():
    fe = enumerate_2faces(fixtures.cube(), XI)
    assert len(fe.faces) == 6 and fe.enough and fe.reducible
    assert all(len(f.cycle) == 4 for f in fe.faces)


def test_octahedron_faces():
    fe = enumerate_2faces(fixtures.octahedron(), XI)
    assert fe.enough
    lengths = sorted(len(f.cycle) for f in fe.faces)
    # eight triangles plus the three squares through antipodal pairs
    assert lengths == [3] * 8 + [4] * 3


def test_hexagon_with_chords_not_enough_faces():
    s = fixtures.hexagon_with_chords()
    fe = enumerate_2faces(s, (1, 3))
    assert not fe.enough
    assert any("b0 = 2" in why for *_, why in fe.failures)
    assert any(len(f.cycle) == 6 for f in fe.faces)
    assert not is_reducible(s, (1, 3))


def test_every_pair_has_one_face_on_cube():
    s = fixtures.cube()
    fe = enumerate_2faces(s, XI)
    for p in s.vertices:
        out = s.out(p)
        for i in range(3):
            for j in range(i + 1, 3):
                assert fe.face_through(p, out[i], out[j]) is not None


def test_toral():
    assert is_toral(fixtures.cube())
    assert is_toral(fixtures.simplex(3))
    # the octahedron lives in R^3 but is 4-valent
    with pytest.raises(ValueError):
        is_toral(fixtures.octahedron())


@pytest.mark.parametrize("make", [fixtures.cube, fixtures.simplex, fixtures.triangular_prism,
                                  fixtures.octahedron, lambda: fixtures.cube(4), lambda: fixtures.simplex(4)])
def test_three_independent_faces_are_level(make):
    s = make()
    assert s.independence_degree >= 3
    fe = enumerate_2faces(s, find_polarizing(s).covector)
    assert all(is_level(f.sub) for f in fe.faces)
    if s.independence_degree >= 4:
        assert all(has_trivial_normal_holonomy(f.sub) for f in fe.faces)


@settings(max_examples=15, deadline=None)
@given(st.integers(0, 10 ** 6))
def test_embedded_generic_is_polarizing(seed):
    s = fixtures.projected(fixtures.cube(), 2, seed % 50)
    xi = random_generic(s, random.Random(seed))
    assert polarization(s, xi).polarizing
