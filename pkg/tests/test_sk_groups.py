"""Scissors-congruence group tests: presentations, exactness, witnesses."""

import itertools

import pytest

from cutpaste.abgroup import NormalForm
from cutpaste.sk_groups import (
    Caps,
    SearchExhausted,
    apply_move,
    boundary_count_hom,
    boundary_sk_presentation,
    circles_group,
    closed_inclusion_hom,
    closed_sk_presentation,
    decide_equivalent,
    double_surface,
    doubling_witness,
    find_witness,
    glue_to_mirror,
    replay_witness,
    skk_collapse_check,
    verify_exact_sequence,
)
from cutpaste.surface import (
    DiffeoClass,
    SurfaceError,
    build_standard,
    disjoint_union,
    fan_disk,
    octahedron,
    seven_vertex_torus,
)


# ---------------------------------------------------------------------------
# Presentations
# ---------------------------------------------------------------------------


def test_closed_group_is_z_with_euler_coordinates():
    pres = closed_sk_presentation(Caps(3, 3, 3))
    assert pres.group.quotient_invariants() == (1, ())
    sphere = DiffeoClass.connected(0, 0)
    for g in range(4):
        got = pres.coordinate_of(DiffeoClass.connected(g, 0))
        want = pres.group.element_normal_form(pres.vector_of([(sphere, 1 - g)]))
        assert got == want
    # torus class dies
    assert pres.coordinate_of(DiffeoClass.connected(1, 0)).is_zero()


def test_boundary_group_is_z2():
    pres = boundary_sk_presentation(Caps(3, 3, 3))
    assert pres.group.quotient_invariants() == (2, ())


def test_disjoint_union_is_addition_in_coordinates():
    pres = boundary_sk_presentation(Caps(2, 2, 2))
    pairs = [((0, 1), (1, 1)), ((0, 0), (0, 2)), ((1, 0), (2, 1))]
    for p1, p2 in pairs:
        a = DiffeoClass.connected(*p1)
        b = DiffeoClass.connected(*p2)
        u = a.union(b)
        vec = pres.vector_of([(u, 1), (a, -1), (b, -1)])
        assert pres.group.element_normal_form(vec).is_zero()


def test_circles_group():
    g = circles_group()
    assert g.quotient_invariants() == (1, ())
    nf = g.element_normal_form([3])
    assert nf == NormalForm((), (), (3,))


# ---------------------------------------------------------------------------
# The two homomorphisms
# ---------------------------------------------------------------------------


def test_boundary_count_on_disk():
    beta = boundary_count_hom(Caps(2, 2, 2))
    pres = boundary_sk_presentation(Caps(2, 2, 2))
    disk_vec = pres.vector_of([(DiffeoClass.connected(0, 1), 1)])
    assert beta.apply(disk_vec) == (1,)
    assert beta.is_surjective()


def test_composite_is_zero():
    alpha = closed_inclusion_hom(Caps(2, 2, 2))
    beta = boundary_count_hom(Caps(2, 2, 2))
    assert beta.compose(alpha).is_zero()


def test_inclusion_coordinates_of_sphere():
    alpha = closed_inclusion_hom(Caps(2, 2, 2))
    closed = closed_sk_presentation(Caps(2, 2, 2))
    bdry = boundary_sk_presentation(Caps(2, 2, 2))
    sphere = DiffeoClass.connected(0, 0)
    img = alpha.apply(closed.vector_of([(sphere, 1)]))
    assert bdry.group.element_normal_form(img) == bdry.coordinate_of(sphere)


@pytest.mark.parametrize("caps", [Caps(2, 2, 2), Caps(3, 3, 3)])
def test_exact_sequence(caps):
    report = verify_exact_sequence(caps)
    assert report.inclusion_injective
    assert report.exact_at_middle
    assert report.count_surjective
    assert report.composite_zero
    assert report.passed


# ---------------------------------------------------------------------------
# Doubling
# ---------------------------------------------------------------------------


def test_double_of_disk_is_sphere():
    disk = fan_disk(3)
    assert double_surface(disk).classify() == DiffeoClass.connected(0, 0)


def test_double_is_closed():
    for g, b in [(0, 1), (1, 1), (0, 2), (2, 1)]:
        dm = double_surface(build_standard(g, b))
        assert dm.classify().is_closed
        # chi(DM) = 2 chi(M)
        assert dm.euler_characteristic() == 2 * (2 - 2 * g - b)


def test_doubling_witness_disk_vs_disk():
    w = doubling_witness(fan_disk(3), fan_disk(4))
    assert w.certified
    assert w.double == DiffeoClass.connected(0, 0)
    assert w.glued == DiffeoClass.connected(0, 0)


def test_doubling_witness_mixed_pair():
    w = doubling_witness(build_standard(1, 1), build_standard(0, 1))
    assert w.certified
    assert w.double == DiffeoClass.connected(2, 0)
    assert w.glued == DiffeoClass.connected(1, 0)


def test_doubling_requires_matching_boundaries():
    with pytest.raises(SurfaceError):
        doubling_witness(fan_disk(3), octahedron())


def test_doubling_witness_generator_pairs_small():
    types = [(g, b) for g in range(2) for b in range(3)]
    for m1, m2 in itertools.combinations_with_replacement(types, 2):
        if m1[1] != m2[1]:
            continue
        w = doubling_witness(build_standard(*m1), build_standard(*m2))
        assert w.certified, (m1, m2)


def test_glue_to_mirror_produces_closed_surface():
    out = glue_to_mirror(build_standard(0, 2), build_standard(1, 2))
    assert out.classify().is_closed


# ---------------------------------------------------------------------------
# Equivalence decision
# ---------------------------------------------------------------------------


def fig2_surfaces():
    m = disjoint_union(build_standard(2, 0), build_standard(0, 0))
    n = disjoint_union(build_standard(1, 0), build_standard(1, 0))
    return m, n


def test_decide_fig2_yes():
    m, n = fig2_surfaces()
    dec = decide_equivalent(m, n)
    assert dec.equivalent
    assert dec.chi == (-2 + 2, 0 + 0)


def test_decide_disk_vs_sphere_no():
    dec = decide_equivalent(fan_disk(3), octahedron())
    assert not dec.equivalent
    assert dec.boundary_circles == (1, 0)


def test_decide_torus_vs_sphere_no():
    dec = decide_equivalent(seven_vertex_torus(), octahedron())
    assert not dec.equivalent
    assert dec.chi == (0, 2)


# ---------------------------------------------------------------------------
# Witness search
# ---------------------------------------------------------------------------


def test_witness_for_isomorphic_surfaces_is_empty():
    m = build_standard(1, 1)
    w = find_witness(m, build_standard(1, 1), budget=3)
    assert w.steps == ()
    assert replay_witness(w) == m.classify()


def test_witness_exhausted_on_zero_budget():
    m, n = fig2_surfaces()
    with pytest.raises(SearchExhausted):
        find_witness(m, n, budget=0)


def test_fig2_witness_within_budget():
    m, n = fig2_surfaces()
    w = find_witness(m, n, budget=6)
    assert 1 <= len(w.steps) <= 6
    assert w.end == DiffeoClass.from_pairs([(1, 0), (1, 0)])
    assert replay_witness(w) == n.classify()


def test_witness_steps_preserve_invariants():
    m, n = fig2_surfaces()
    w = find_witness(m, n, budget=6)
    cls = w.start
    for step in w.steps:
        nxt = apply_move(cls, step)
        assert nxt.chi == cls.chi
        assert nxt.boundary_circles == cls.boundary_circles
        cls = nxt
    assert cls == w.end


def test_witness_determinism():
    m, n = fig2_surfaces()
    w1 = find_witness(m, n, budget=6)
    w2 = find_witness(m, n, budget=6)
    assert w1 == w2


# ---------------------------------------------------------------------------
# Cylinder regluing collapse
# ---------------------------------------------------------------------------


def test_single_circle_collapse():
    rep = skk_collapse_check(1, (0,), (0,), first_offsets=[0], second_offsets=[1])
    assert rep.certified
    assert rep.first_class == DiffeoClass.connected(0, 2)


def test_two_circle_swap_collapse():
    rep = skk_collapse_check(2, (0, 1), (1, 0))
    assert rep.certified
    assert rep.first_class == DiffeoClass.from_pairs([(0, 2), (0, 2)])
    assert rep.second_class == DiffeoClass.from_pairs([(0, 2), (0, 2)])


@pytest.mark.parametrize("k", [1, 2, 3])
def test_collapse_for_all_pairings(k):
    identity = tuple(range(k))
    for phi in itertools.permutations(range(k)):
        rep = skk_collapse_check(k, identity, phi)
        assert rep.certified, (k, phi)
        assert rep.coordinates_equal


def test_signature_vanishes_in_dimension_two():
    from cutpaste.sk_groups import signature

    for s in (octahedron(), seven_vertex_torus(), build_standard(2, 1)):
        assert signature(s) == 0


def test_decide_beyond_default_caps():
    # genus five vs a two-component class with equal chi and no boundary
    m = build_standard(5, 0)
    n = disjoint_union(build_standard(4, 0), build_standard(2, 0))
    assert m.euler_characteristic() == n.euler_characteristic() == -8
    dec = decide_equivalent(m, n)
    assert dec.equivalent
    # and a near miss differing in chi only
    n2 = disjoint_union(build_standard(4, 0), build_standard(1, 0))
    assert not decide_equivalent(m, n2).equivalent
