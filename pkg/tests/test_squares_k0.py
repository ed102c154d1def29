"""Tests for the K0-of-squares engine and the truncated surface instance."""

import random

import pytest

from cutpaste.squares_k0 import (
    Caps,
    FiniteSquaresCategory,
    Morphism,
    SquaresPresentation,
    check_lemma_hypotheses,
    glue_class_components,
    glue_connected,
    k0_of_surfaces,
    k0_presentation,
    surface_squares_presentation,
    within_caps,
)
from cutpaste.surface import (
    BoundaryGluing,
    DiffeoClass,
    build_standard,
    disjoint_union,
    paste,
)


# ---------------------------------------------------------------------------
# k0_presentation
# ---------------------------------------------------------------------------


def test_k0_no_squares_is_free_on_nonbasepoint_objects():
    p = SquaresPresentation(objects=("O", "X"), basepoint=0, squares=())
    g = k0_presentation(p)
    assert g.quotient_invariants() == (1, ())


def test_k0_coproduct_square_relation():
    p = SquaresPresentation(
        objects=("O", "A", "B", "S"), basepoint=0, squares=((0, 1, 2, 3),)
    )
    g = k0_presentation(p)
    assert g.quotient_invariants() == (2, ())
    # [S] = [A] + [B]
    n = 4
    vec = [0, -1, -1, 1]
    assert g.is_relation(vec)


def test_k0_degenerate_square_changes_nothing():
    base = SquaresPresentation(objects=("O", "A", "B"), basepoint=0, squares=())
    with_degenerate = SquaresPresentation(
        objects=("O", "A", "B"), basepoint=0, squares=((1, 2, 1, 2),)
    )
    assert (
        k0_presentation(base).quotient_invariants()
        == k0_presentation(with_degenerate).quotient_invariants()
    )


def random_presentation(rng) -> SquaresPresentation:
    n = rng.randint(2, 6)
    objects = tuple(f"X{i}" for i in range(n))
    squares = tuple(
        tuple(rng.randrange(n) for _ in range(4)) for _ in range(rng.randint(0, 8))
    )
    return SquaresPresentation(objects=objects, basepoint=0, squares=squares)


def test_k0_square_set_order_irrelevant():
    rng = random.Random(31)
    for _ in range(30):
        p = random_presentation(rng)
        inv = k0_presentation(p).quotient_invariants()
        shuffled = list(p.squares)
        rng.shuffle(shuffled)
        p2 = SquaresPresentation(p.objects, p.basepoint, tuple(shuffled))
        assert k0_presentation(p2).quotient_invariants() == inv


def test_k0_axiom4_shaped_squares_never_change_invariants():
    rng = random.Random(37)
    for _ in range(30):
        p = random_presentation(rng)
        inv = k0_presentation(p).quotient_invariants()
        n = len(p.objects)
        a, b = rng.randrange(n), rng.randrange(n)
        # both horizontals equal (A,B,A,B) or both verticals equal (A,A,B,B)
        extra = (a, b, a, b) if rng.random() < 0.5 else (a, a, b, b)
        p2 = SquaresPresentation(p.objects, p.basepoint, p.squares + (extra,))
        assert k0_presentation(p2).quotient_invariants() == inv


def test_squares_presentation_json_round_trip():
    p = SquaresPresentation(objects=("O", "A"), basepoint=0, squares=((0, 1, 1, 0),))
    assert SquaresPresentation.from_json(p.to_json()) == p


# ---------------------------------------------------------------------------
# Finite category checker
# ---------------------------------------------------------------------------


def poset_category() -> FiniteSquaresCategory:
    """The join-semilattice O <= A, B <= S with unions as coproducts and
    every commuting square distinguished; satisfies all the hypotheses."""
    objects = ("O", "A", "B", "S")
    leq = {
        (0, 0), (1, 1), (2, 2), (3, 3),
        (0, 1), (0, 2), (0, 3), (1, 3), (2, 3),
    }
    morphisms = []
    mor_index = {}
    for s, t in sorted(leq):
        mor_index[(s, t)] = len(morphisms)
        morphisms.append(Morphism(f"{objects[s]}->{objects[t]}", s, t))
    identities = tuple(mor_index[(i, i)] for i in range(4))
    composition = {}
    for (s1, t1), f in mor_index.items():
        for (s2, t2), g in mor_index.items():
            if t1 == s2:
                composition[(g, f)] = mor_index[(s1, t2)]
    join = {}
    for i in range(4):
        for j in range(4):
            join[(i, j)] = min(
                k for k in range(4) if (i, k) in leq and (j, k) in leq
            )
    morphism_coproducts = {}
    for (s1, t1), f in mor_index.items():
        for (s2, t2), g in mor_index.items():
            morphism_coproducts[(f, g)] = mor_index[
                (join[(s1, s2)], join[(t1, t2)])
            ]
    squares = set()
    for (pa, qa), top in mor_index.items():
        for (pl, rl), left in mor_index.items():
            if pl != pa:
                continue
            for (qr, tr), right in mor_index.items():
                if qr != qa:
                    continue
                for (rb, tb), bottom in mor_index.items():
                    if rb == rl and tb == tr:
                        squares.add((top, left, right, bottom))
    all_mor = frozenset(range(len(morphisms)))
    return FiniteSquaresCategory(
        objects=objects,
        morphisms=tuple(morphisms),
        identities=identities,
        composition=composition,
        cof=all_mor,
        fib=all_mor,
        basepoint=0,
        squares=frozenset(squares),
        coproducts=join,
        morphism_coproducts=morphism_coproducts,
    )


def test_poset_category_passes_all_hypotheses():
    report = check_lemma_hypotheses(poset_category())
    failing = [c for c in report.checks if c.status == "fail"]
    assert not failing, failing
    assert report.passed
    assert all(c.status == "pass" for c in report.checks)


def test_missing_coproduct_square_fails_condition_three():
    cat = poset_category()
    # drop every square witnessing the pair (A, B)
    bad = {
        q
        for q in cat.squares
        if cat.morphisms[q[0]].src == 0
        and cat.morphisms[q[0]].tgt == 1
        and cat.morphisms[q[1]].src == 0
        and cat.morphisms[q[1]].tgt == 2
    }
    cat2 = FiniteSquaresCategory(
        objects=cat.objects,
        morphisms=cat.morphisms,
        identities=cat.identities,
        composition=cat.composition,
        cof=cat.cof,
        fib=cat.fib,
        basepoint=cat.basepoint,
        squares=frozenset(cat.squares - bad),
        coproducts=cat.coproducts,
        morphism_coproducts=cat.morphism_coproducts,
    )
    report = check_lemma_hypotheses(cat2)
    cond3 = next(c for c in report.checks if c.name == "coproduct_squares_exist")
    assert cond3.status == "fail"
    assert "A" in cond3.detail and "B" in cond3.detail


def test_undistinguished_iso_square_fails_axiom_four():
    cat = poset_category()
    iso_square = None
    for q in cat.squares:
        top, left, right, bottom = q
        if (
            cat.morphisms[top].src == cat.morphisms[top].tgt
            and cat.morphisms[bottom].src == cat.morphisms[bottom].tgt
            and cat.morphisms[left].src != cat.morphisms[left].tgt
        ):
            iso_square = q
            break
    assert iso_square is not None
    cat2 = FiniteSquaresCategory(
        objects=cat.objects,
        morphisms=cat.morphisms,
        identities=cat.identities,
        composition=cat.composition,
        cof=cat.cof,
        fib=cat.fib,
        basepoint=cat.basepoint,
        squares=frozenset(cat.squares - {iso_square}),
        coproducts=cat.coproducts,
        morphism_coproducts=cat.morphism_coproducts,
    )
    report = check_lemma_hypotheses(cat2)
    axiom4 = next(c for c in report.checks if c.name.startswith("axiom4"))
    assert axiom4.status == "fail"


def test_skipped_when_no_coproduct_tables():
    cat = poset_category()
    cat2 = FiniteSquaresCategory(
        objects=cat.objects,
        morphisms=cat.morphisms,
        identities=cat.identities,
        composition=cat.composition,
        cof=cat.cof,
        fib=cat.fib,
        basepoint=cat.basepoint,
        squares=cat.squares,
    )
    report = check_lemma_hypotheses(cat2)
    axiom1 = next(c for c in report.checks if c.name.startswith("axiom1"))
    assert axiom1.status == "skipped"
    assert report.passed  # skips do not fail the report


# ---------------------------------------------------------------------------
# Gluing rules
# ---------------------------------------------------------------------------


def test_glue_connected_rules():
    # one circle between distinct pieces merges
    assert glue_connected((1, 1), (2, 2), 1) == (3, 1)
    # a second circle adds a handle
    assert glue_connected((0, 2), (0, 2), 2) == (1, 0)
    assert glue_connected((0, 1), (0, 1), 1) == (0, 0)
    with pytest.raises(ValueError):
        glue_connected((0, 1), (0, 1), 2)


def test_glue_class_components_matches_connected_rule():
    left = DiffeoClass.from_pairs([(1, 2)])
    right = DiffeoClass.from_pairs([(0, 2)])
    out = glue_class_components(left, right, [(0, 0), (0, 0)])
    assert out == DiffeoClass.from_pairs([glue_connected((1, 2), (0, 2), 2)])
    # untouched components pass through (components are kept sorted, so the
    # (1,1) piece sits at index 1)
    left2 = DiffeoClass.from_pairs([(1, 1), (0, 0)])
    out2 = glue_class_components(left2, DiffeoClass.from_pairs([(0, 1)]), [(1, 0)])
    assert out2 == DiffeoClass.from_pairs([(1, 0), (0, 0)])


def concrete_glue(m1, m2, k) -> DiffeoClass:
    """Glue library surfaces along k boundary circle pairs, classifying."""
    s = disjoint_union(build_standard(*m1), build_standard(*m2))
    for step in range(k):
        cycles = s.boundary_cycles
        comp = s.component_of_triangle
        by_comp = {}
        for idx, cyc in enumerate(cycles):
            by_comp.setdefault(comp[cyc[0][0]], []).append(idx)
        if step == 0:
            groups = sorted(by_comp.values(), key=len)
            i, j = groups[0][0], groups[-1][0]
            if i == j:
                j = groups[-1][1]
        else:
            # pieces already merged; any two distinct cycles work
            i, j = 0, 1
        s = paste(s, BoundaryGluing(i, j, 0))
    return s.classify()


@pytest.mark.parametrize(
    "m1,m2,k",
    [
        ((0, 1), (0, 1), 1),
        ((0, 2), (0, 1), 1),
        ((1, 1), (0, 1), 1),
        ((0, 2), (0, 2), 2),
        ((1, 2), (0, 2), 2),
    ],
)
def test_class_level_gluing_matches_concrete_paste(m1, m2, k):
    expected = DiffeoClass.from_pairs([glue_connected(m1, m2, k)])
    assert concrete_glue(m1, m2, k) == expected


# ---------------------------------------------------------------------------
# Surface instance
# ---------------------------------------------------------------------------


def test_instance_object_enumeration():
    inst = surface_squares_presentation(Caps(2, 2, 2))
    # 9 connected types, multisets of size <= 2, plus the empty class
    assert len(inst.classes) == 1 + 9 + 45
    assert inst.presentation.objects[inst.presentation.basepoint] == "{}"
    assert all(within_caps(c, inst.caps) for c in inst.classes)


def test_instance_contains_expected_squares():
    inst = surface_squares_presentation(Caps(2, 2, 2))
    pres = inst.presentation
    idx = {label: i for i, label in enumerate(pres.objects)}
    disk = DiffeoClass.connected(0, 1).label()
    sphere = DiffeoClass.connected(0, 0).label()
    ann = DiffeoClass.connected(0, 2).label()
    torus = DiffeoClass.connected(1, 0).label()
    two_disks = DiffeoClass.from_pairs([(0, 1), (0, 1)]).label()
    two_ann = DiffeoClass.from_pairs([(0, 2), (0, 2)]).label()
    # collar square: disk + disk glued along one circle = sphere
    assert (idx[ann], idx[disk], idx[disk], idx[sphere]) in pres.squares
    # collar square: annulus + annulus along two circles = torus
    assert (idx[two_ann], idx[ann], idx[ann], idx[torus]) in pres.squares
    # coproduct square for (torus, disk)
    td = DiffeoClass.from_pairs([(1, 0), (0, 1)]).label()
    assert (pres.basepoint, idx[torus], idx[disk], idx[td]) in pres.squares or (
        pres.basepoint,
        idx[disk],
        idx[torus],
        idx[td],
    ) in pres.squares


def test_instance_squares_respect_chi_and_boundary_additivity():
    inst = surface_squares_presentation(Caps(3, 3, 3))
    classes = inst.classes
    for a, b, c, d in inst.presentation.squares:
        ca, cb, cc, cd = classes[a], classes[b], classes[c], classes[d]
        assert ca.chi + cd.chi == cb.chi + cc.chi
        assert ca.boundary_circles + cd.boundary_circles == (
            cb.boundary_circles + cc.boundary_circles
        )


def test_instance_monotone_in_caps():
    small = surface_squares_presentation(Caps(2, 2, 2))
    big = surface_squares_presentation(Caps(3, 3, 3))

    def labeled(inst):
        objs = inst.presentation.objects
        return {
            (objs[a], objs[b], objs[c], objs[d])
            for a, b, c, d in inst.presentation.squares
        }

    assert labeled(small) <= labeled(big)


def test_k0_of_surfaces_small_caps():
    res = k0_of_surfaces(Caps(2, 2, 2))
    assert res.free_rank == 2
    assert res.torsion == ()
    # [S^2] and [D^2] coordinates form a basis of the free part
    s2 = res.coordinate_of(DiffeoClass.connected(0, 0))
    d2 = res.coordinate_of(DiffeoClass.connected(0, 1))
    from cutpaste.abgroup import IntMatrix

    m = IntMatrix.from_rows([list(s2.free), list(d2.free)])
    assert abs(m.det()) == 1
    # the torus class vanishes
    assert res.coordinate_of(DiffeoClass.connected(1, 0)).is_zero()


def test_k0_of_surfaces_rejects_tiny_caps():
    with pytest.raises(ValueError):
        k0_of_surfaces(Caps(1, 1, 1))


from hypothesis import given, settings, strategies as st


@settings(max_examples=60, deadline=None)
@given(st.data())
def test_k0_invariants_stable_under_square_permutation_hypothesis(data):
    n = data.draw(st.integers(2, 5))
    objects = tuple(f"X{i}" for i in range(n))
    squares = tuple(
        tuple(data.draw(st.integers(0, n - 1)) for _ in range(4))
        for _ in range(data.draw(st.integers(0, 6)))
    )
    p = SquaresPresentation(objects=objects, basepoint=0, squares=squares)
    inv = k0_presentation(p).quotient_invariants()
    perm = data.draw(st.permutations(list(squares))) if squares else []
    p2 = SquaresPresentation(objects, 0, tuple(perm))
    assert k0_presentation(p2).quotient_invariants() == inv
    a = data.draw(st.integers(0, n - 1))
    b = data.draw(st.integers(0, n - 1))
    p3 = SquaresPresentation(objects, 0, squares + ((a, b, a, b),))
    assert k0_presentation(p3).quotient_invariants() == inv
