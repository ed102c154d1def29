"""Scissors congruence groups of surfaces at a chosen truncation.

Two presentations are computed.  The with-boundary group reuses the
truncated gluing-square instance verbatim: its K0 presentation is the
with-boundary cut-and-paste group.  The closed group is presented on
closed classes with disjoint-union relations plus difference relations
[result of gluing phi] = [result of gluing psi] for every pair of gluing
patterns of the same two piece collections (pieces range over bounded
multisets of connected types, gluing all boundary circles).

The two groups sit in a short exact sequence with the free group on the
circle: closed classes include into with-boundary classes, and a
with-boundary class maps to its total boundary circle count.  Exactness is
verified lattice-exactly at the truncation, with a constructive doubling
witness for the middle-kernel argument: for M, N with diffeomorphic
boundaries, [M] - [N] = [double of M] - [N glued to reversed M].

Move witnesses are sequences of cut-and-paste operations over a canonical
circle family (handle seams and disk-bounding circles of the standard
library surfaces); search is breadth-first and returns the first witness
in deterministic order, never claiming inequivalence on exhaustion.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from functools import lru_cache

from .abgroup import AbGroupPresentation, AbHom, NormalForm, check_exact_at
from .squares_k0 import (
    Caps,
    glue_class_components,
    k0_presentation,
    surface_squares_presentation,
    within_caps,
)
from .surface import (
    DiffeoClass,
    NonSeparatingCut,
    SurfaceError,
    TriSurface,
    _Builder,
    _annulus_strip,
    _glue_ref_pairs,
    _order_cycle,
    _paste_cycles_raw,
    _refine_cycle_raw,
    library_for_class,
    sk_system_move,
)

CIRCLE_LABEL = "[S^1]"

# piece enumeration bound for the closed-group gluing relations: patterns
# that differ only beyond four glued circles are consequences of smaller ones
_MAX_GLUED_CIRCLES = 4
_MAX_PIECE_COMPONENTS = 3


@dataclass(frozen=True)
class SKPresentation:
    flavor: str  # "closed" | "with_boundary"
    caps: Caps
    group: AbGroupPresentation
    classes: tuple[DiffeoClass, ...]

    def contains(self, cls: DiffeoClass) -> bool:
        return cls.label() in self.group.generator_index

    def vector_of(self, combo) -> list[int]:
        """Integer vector of a formal sum given as (class, coefficient) pairs
        (repeated classes accumulate)."""
        vec = [0] * len(self.group.generators)
        for cls, coeff in combo:
            vec[self.group.generator_index[cls.label()]] += coeff
        return vec

    def coordinate_of(self, cls: DiffeoClass) -> NormalForm:
        return self.group.element_normal_form(self.vector_of([(cls, 1)]))


@dataclass(frozen=True)
class SKClass:
    """A group element: its presentation and canonical coordinates."""

    presentation: SKPresentation
    coordinates: NormalForm


def closed_classes_within(caps: Caps) -> list[DiffeoClass]:
    types = [(g, 0) for g in range(caps.genus + 1)]
    out = [DiffeoClass.empty()]
    for k in range(1, caps.components + 1):
        for combo in itertools.combinations_with_replacement(types, k):
            out.append(DiffeoClass.from_pairs(combo))
    out.sort(key=lambda c: (-c.component_count, c.components))
    return out


def _piece_multisets(caps: Caps):
    """Bounded multisets of connected pieces with boundary, keyed by their
    total boundary circle count."""
    types = [
        (g, b)
        for g in range(caps.genus + 1)
        for b in range(1, _MAX_GLUED_CIRCLES + 1)
    ]
    by_circles: dict[int, list[tuple[tuple[int, int], ...]]] = {}
    for k in range(1, _MAX_PIECE_COMPONENTS + 1):
        for combo in itertools.combinations_with_replacement(types, k):
            m = sum(b for _, b in combo)
            if m <= _MAX_GLUED_CIRCLES:
                by_circles.setdefault(m, []).append(combo)
    return by_circles


def _gluing_results(left, right, caps: Caps) -> set[DiffeoClass]:
    """All closed classes obtainable by gluing every circle of the left
    pieces to a circle of the right pieces, truncated to the caps."""
    lslots = [i for i, (_, b) in enumerate(left) for _ in range(b)]
    rslots = [j for j, (_, b) in enumerate(right) for _ in range(b)]
    lcls = DiffeoClass.from_pairs(left)
    rcls = DiffeoClass.from_pairs(right)
    # indices into the *sorted* class components
    lorder = {}
    for i, comp in enumerate(sorted(range(len(left)), key=lambda i: left[i])):
        lorder[comp] = i
    rorder = {}
    for j, comp in enumerate(sorted(range(len(right)), key=lambda j: right[j])):
        rorder[comp] = j
    out = set()
    seen_patterns = set()
    for perm in itertools.permutations(range(len(rslots))):
        edges = tuple(
            sorted((lorder[lslots[a]], rorder[rslots[perm[a]]]) for a in range(len(lslots)))
        )
        if edges in seen_patterns:
            continue
        seen_patterns.add(edges)
        glued = glue_class_components(lcls, rcls, edges)
        if within_caps(glued, caps):
            out.add(glued)
    return out


@lru_cache(maxsize=None)
def closed_sk_presentation(caps: Caps) -> SKPresentation:
    """Cut-and-paste group of closed oriented surfaces at the truncation."""
    caps = Caps(*caps)
    classes = closed_classes_within(caps)
    index = {c: i for i, c in enumerate(classes)}
    n = len(classes)
    relations = []
    base = [0] * n
    base[index[DiffeoClass.empty()]] = 1
    relations.append(base)
    nonempty = [c for c in classes if not c.is_empty]
    for i, a in enumerate(nonempty):
        for b in nonempty[i:]:
            u = a.union(b)
            if u in index:
                rel = [0] * n
                rel[index[u]] += 1
                rel[index[a]] -= 1
                rel[index[b]] -= 1
                relations.append(rel)
    pieces = _piece_multisets(caps)
    for m, combos in sorted(pieces.items()):
        for x, left in enumerate(combos):
            for right in combos[x:]:
                results = sorted(_gluing_results(left, right, caps))
                for r1, r2 in zip(results, results[1:]):
                    rel = [0] * n
                    rel[index[r1]] += 1
                    rel[index[r2]] -= 1
                    relations.append(rel)
    group = AbGroupPresentation.make([c.label() for c in classes], relations)
    return SKPresentation(
        flavor="closed", caps=caps, group=group, classes=tuple(classes)
    )


@lru_cache(maxsize=None)
def boundary_sk_presentation(caps: Caps) -> SKPresentation:
    """Cut-and-paste group of surfaces with boundary: exactly the truncated
    gluing-square presentation."""
    caps = Caps(*caps)
    inst = surface_squares_presentation(caps)
    group = k0_presentation(inst.presentation)
    return SKPresentation(
        flavor="with_boundary", caps=caps, group=group, classes=inst.classes
    )


def circles_group() -> AbGroupPresentation:
    """Free abelian group on the circle: every closed oriented 1-manifold is
    a disjoint union of circles and bounds."""
    return AbGroupPresentation.free([CIRCLE_LABEL])


def signature(s: TriSurface) -> int:
    """The signature invariant.

    Identically zero in dimension two (the intersection form on middle
    homology is antisymmetric); kept as the second classical cut-and-paste
    invariant slot alongside the Euler characteristic.
    """
    s.require_valid()
    return 0


def closed_inclusion_hom(caps: Caps) -> AbHom:
    """Closed classes included into the with-boundary group."""
    closed = closed_sk_presentation(Caps(*caps))
    bdry = boundary_sk_presentation(Caps(*caps))
    return AbHom.on_generators(
        closed.group, bdry.group, lambda label: {label: 1}
    )


def boundary_count_hom(caps: Caps) -> AbHom:
    """A with-boundary class maps to (number of boundary circles) [S^1]."""
    bdry = boundary_sk_presentation(Caps(*caps))
    target = circles_group()

    def image(label):
        cls = DiffeoClass.from_label(label)
        return {CIRCLE_LABEL: cls.boundary_circles}

    return AbHom.on_generators(bdry.group, target, image)


@dataclass(frozen=True)
class ExactSequenceReport:
    caps: Caps
    closed_invariants: tuple[int, tuple[int, ...]]
    boundary_invariants: tuple[int, tuple[int, ...]]
    inclusion_injective: bool
    exact_at_middle: bool
    count_surjective: bool
    composite_zero: bool

    @property
    def passed(self) -> bool:
        return (
            self.inclusion_injective
            and self.exact_at_middle
            and self.count_surjective
            and self.composite_zero
        )

    def to_lines(self) -> list[str]:
        cr, ct = self.closed_invariants
        br, bt = self.boundary_invariants
        return [
            f"caps={self.caps.genus},{self.caps.boundary},{self.caps.components}",
            f"closed_group=Z^{cr}" + "".join(f"+Z/{d}" for d in ct),
            f"boundary_group=Z^{br}" + "".join(f"+Z/{d}" for d in bt),
            f"inclusion_injective={'PASS' if self.inclusion_injective else 'FAIL'}",
            f"exact_at_middle={'PASS' if self.exact_at_middle else 'FAIL'}",
            f"boundary_count_surjective={'PASS' if self.count_surjective else 'FAIL'}",
            f"composite_zero={'PASS' if self.composite_zero else 'FAIL'}",
        ]


def verify_exact_sequence(caps: Caps) -> ExactSequenceReport:
    """Check 0 -> closed -> with-boundary -> circles -> 0 at the truncation."""
    caps = Caps(*caps)
    alpha = closed_inclusion_hom(caps)
    beta = boundary_count_hom(caps)
    composite = beta.compose(alpha)
    return ExactSequenceReport(
        caps=caps,
        closed_invariants=closed_sk_presentation(caps).group.quotient_invariants(),
        boundary_invariants=boundary_sk_presentation(caps).group.quotient_invariants(),
        inclusion_injective=alpha.is_injective(),
        exact_at_middle=check_exact_at(alpha, beta),
        count_surjective=beta.is_surjective(),
        composite_zero=composite.is_zero(),
    )


# ---------------------------------------------------------------------------
# Doubling
# ---------------------------------------------------------------------------


def _add_mirror_raw(b: _Builder, s: TriSurface) -> tuple[int, int]:
    """Append the orientation reversal of s; returns (vertex, triangle) offsets."""
    voff = b.next_vertex
    toff = len(b.triangles)
    for (x, y, z) in s.triangles:
        b.triangles.append([x + voff, z + voff, y + voff])
    emap = {0: 2, 1: 1, 2: 0}
    for r1, r2 in s.gluing:
        a = (r1[0] + toff, emap[r1[1]])
        bb = (r2[0] + toff, emap[r2[1]])
        b.glue[a] = bb
        b.glue[bb] = a
    b.next_vertex += s.vertex_count
    return voff, toff


_MIRROR_EMAP = {0: 2, 1: 1, 2: 0}


def double_surface(m: TriSurface) -> TriSurface:
    """Glue m to its orientation reversal along the whole boundary by the
    identity correspondence of boundary edges."""
    b = _Builder.from_surface(m)
    _, toff = _add_mirror_raw(b, m)
    pairs = [
        (ref, (ref[0] + toff, _MIRROR_EMAP[ref[1]])) for ref in m.boundary_refs
    ]
    _glue_ref_pairs(b, pairs)
    out, _ = b.finish()
    return out.require_valid()


def glue_to_mirror(n: TriSurface, m: TriSurface) -> TriSurface:
    """Glue n to the orientation reversal of m along a canonical matching of
    their boundary cycles (cycle lengths are equalized by refinement)."""
    if n.boundary_circle_count() != m.boundary_circle_count():
        raise SurfaceError("boundary circle counts differ; cannot glue")
    b = _Builder.from_surface(n)
    _, toff = _add_mirror_raw(b, m)
    n_cycles = [list(cyc) for cyc in n.boundary_cycles]
    m_cycles = [
        [(t + toff, _MIRROR_EMAP[e]) for (t, e) in cyc] for cyc in m.boundary_cycles
    ]
    all_lists = n_cycles + m_cycles
    for left, right in zip(n_cycles, m_cycles):
        target = max(len(left), len(right))
        _refine_cycle_raw(b, left, target, [l for l in all_lists if l is not left])
        _refine_cycle_raw(b, right, target, [l for l in all_lists if l is not right])
    for left, right in zip(n_cycles, m_cycles):
        lcyc = _order_cycle(b.endpoints, left)
        rcyc = _order_cycle(b.endpoints, right)
        _paste_cycles_raw(b, lcyc, rcyc, 0)
    out, _ = b.finish()
    return out.require_valid()


@dataclass(frozen=True)
class DoublingWitness:
    original: DiffeoClass
    other: DiffeoClass
    double: DiffeoClass
    glued: DiffeoClass
    caps: Caps
    difference_matches: bool

    @property
    def certified(self) -> bool:
        return self.difference_matches and self.double.is_closed and self.glued.is_closed

    def to_lines(self) -> list[str]:
        return [
            f"m={self.original.label()} n={self.other.label()}",
            f"double={self.double.label()} glued={self.glued.label()}",
            f"closed={'PASS' if self.double.is_closed and self.glued.is_closed else 'FAIL'}",
            f"difference={'PASS' if self.difference_matches else 'FAIL'}",
        ]


def _covering_caps(classes, floor=Caps(2, 2, 2)) -> Caps:
    g = max([floor.genus] + [gg for c in classes for gg, _ in c.components])
    b = max([floor.boundary] + [bb for c in classes for _, bb in c.components])
    k = max([floor.components] + [c.component_count for c in classes])
    return Caps(g, b, k)


def doubling_witness(m: TriSurface, n: TriSurface) -> DoublingWitness:
    """Constructive middle-kernel witness: builds the double DM and the
    cross-gluing L = N glued to reversed M, then certifies
    [M] - [N] = [DM] - [L] in with-boundary coordinates."""
    if m.boundary_circle_count() != n.boundary_circle_count():
        raise SurfaceError(
            "boundaries are not diffeomorphic (circle counts differ)"
        )
    dm = double_surface(m)
    glued = glue_to_mirror(n, m)
    cls_m, cls_n = m.classify(), n.classify()
    cls_dm, cls_l = dm.classify(), glued.classify()
    caps = _covering_caps([cls_m, cls_n, cls_dm, cls_l])
    pres = boundary_sk_presentation(caps)
    lhs = pres.group.element_normal_form(pres.vector_of([(cls_m, 1), (cls_n, -1)]))
    rhs = pres.group.element_normal_form(pres.vector_of([(cls_dm, 1), (cls_l, -1)]))
    return DoublingWitness(
        original=cls_m,
        other=cls_n,
        double=cls_dm,
        glued=cls_l,
        caps=caps,
        difference_matches=lhs == rhs,
    )


# ---------------------------------------------------------------------------
# Equivalence decision
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class EquivalenceDecision:
    equivalent: bool
    left: DiffeoClass
    right: DiffeoClass
    chi: tuple[int, int]
    boundary_circles: tuple[int, int]
    caps: Caps

    def to_lines(self) -> list[str]:
        return [
            f"left={self.left.label()} right={self.right.label()}",
            f"chi={self.chi[0]},{self.chi[1]} boundary={self.boundary_circles[0]},{self.boundary_circles[1]}",
            f"equivalent={'yes' if self.equivalent else 'no'}",
        ]


def decide_equivalent(m: TriSurface, n: TriSurface) -> EquivalenceDecision:
    """Cut-and-paste equivalence of two surfaces.

    The decision is taken by coordinate equality in the truncated
    with-boundary group; the Euler characteristic and boundary circle count
    are reported as the explaining invariants."""
    cls_m, cls_n = m.classify(), n.classify()
    caps = _covering_caps([cls_m, cls_n])
    pres = boundary_sk_presentation(caps)
    same = pres.coordinate_of(cls_m) == pres.coordinate_of(cls_n)
    return EquivalenceDecision(
        equivalent=same,
        left=cls_m,
        right=cls_n,
        chi=(cls_m.chi, cls_n.chi),
        boundary_circles=(cls_m.boundary_circles, cls_n.boundary_circles),
        caps=caps,
    )


# ---------------------------------------------------------------------------
# Move witnesses
# ---------------------------------------------------------------------------


@dataclass(frozen=True, order=True)
class CircleSpec:
    """Names a canonical circle on a library surface of a class."""

    component: int
    kind: str  # "seam" | "null"
    index: int


@dataclass(frozen=True)
class MoveStep:
    circles: tuple[CircleSpec, ...]
    pairing: tuple[int, ...]


@dataclass(frozen=True)
class MoveWitness:
    start: DiffeoClass
    steps: tuple[MoveStep, ...]
    end: DiffeoClass


class SearchExhausted(SurfaceError):
    """The bounded witness search ran out of budget; says nothing about
    inequivalence."""


def _resolve_circles(cls: DiffeoClass):
    surf, entries = library_for_class(cls)
    mapping = {}
    for comp, ent in enumerate(entries):
        for i, c in enumerate(ent.seams):
            mapping[CircleSpec(comp, "seam", i)] = c
        for i, c in enumerate(ent.nulls):
            mapping[CircleSpec(comp, "null", i)] = c
    return surf, mapping


def apply_move(cls: DiffeoClass, step: MoveStep) -> DiffeoClass:
    """Apply a named cut-and-paste move to (the library surface of) a class."""
    surf, mapping = _resolve_circles(cls)
    circles = [mapping[spec] for spec in step.circles]
    moved = sk_system_move(surf, circles, pairing=step.pairing)
    return moved.classify()


def replay_witness(w: MoveWitness) -> DiffeoClass:
    cls = w.start
    for step in w.steps:
        cls = apply_move(cls, step)
    return cls


def _candidate_moves(cls: DiffeoClass) -> list[MoveStep]:
    _, mapping = _resolve_circles(cls)
    specs = sorted(mapping)
    moves = []
    for a, b in itertools.combinations(specs, 2):
        moves.append(MoveStep(circles=(a, b), pairing=(1, 0)))
    return moves


def find_witness(m: TriSurface, n: TriSurface, budget: int) -> MoveWitness:
    """Bounded breadth-first search for a cut-and-paste move sequence taking
    the class of m to the class of n.  Raises SearchExhausted when the
    budget runs out; the witness, when found, replays deterministically."""
    start = m.classify()
    target = n.classify()
    if start == target:
        return MoveWitness(start=start, steps=(), end=target)
    comp_bound = max(start.component_count, target.component_count) + max(budget, 0)
    parents: dict[DiffeoClass, tuple[DiffeoClass, MoveStep] | None] = {start: None}
    frontier = [start]
    depth = 0
    while frontier and depth < budget:
        depth += 1
        next_frontier = []
        for cls in frontier:
            for step in _candidate_moves(cls):
                try:
                    out = apply_move(cls, step)
                except NonSeparatingCut:
                    continue
                if out in parents or out.component_count > comp_bound:
                    continue
                parents[out] = (cls, step)
                if out == target:
                    steps = []
                    cur = out
                    while parents[cur] is not None:
                        prev, st = parents[cur]
                        steps.append(st)
                        cur = prev
                    return MoveWitness(
                        start=start, steps=tuple(reversed(steps)), end=target
                    )
                next_frontier.append(out)
        frontier = next_frontier
    raise SearchExhausted(
        f"no witness within {budget} moves (this does not prove inequivalence)"
    )


# ---------------------------------------------------------------------------
# Cylinder regluing collapse
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class CylinderRegluingReport:
    circle_count: int
    first_pairing: tuple[int, ...]
    second_pairing: tuple[int, ...]
    first_class: DiffeoClass
    second_class: DiffeoClass
    coordinates_equal: bool

    @property
    def certified(self) -> bool:
        return self.first_class == self.second_class and self.coordinates_equal

    def to_lines(self) -> list[str]:
        return [
            f"circles={self.circle_count}",
            f"first_pairing={list(self.first_pairing)} class={self.first_class.label()}",
            f"second_pairing={list(self.second_pairing)} class={self.second_class.label()}",
            f"collapse={'PASS' if self.certified else 'FAIL'}",
        ]


def _glue_cylinder_stacks(k: int, pairing, offsets=None) -> TriSurface:
    """Concrete gluing of k annuli onto k annuli: annulus i's far cycle is
    glued to annulus (k + pairing[i])'s near cycle."""
    offsets = list(offsets) if offsets is not None else [0] * k
    b = _Builder()
    cycles_near = []
    cycles_far = []
    length = 3
    for _ in range(2 * k):
        a_row = [b.new_vertex() for _ in range(length)]
        b_row = [b.new_vertex() for _ in range(length)]
        base = len(b.triangles)
        _annulus_strip(a_row, b_row, b.triangles, b.glue)
        cycles_near.append([(base + 2 * i, 2) for i in range(length)])
        cycles_far.append([(base + 2 * i + 1, 0) for i in range(length)])
    for i in range(k):
        left = _order_cycle(b.endpoints, cycles_far[i])
        right = _order_cycle(b.endpoints, cycles_near[k + pairing[i]])
        _paste_cycles_raw(b, left, right, offsets[i])
    out, _ = b.finish()
    return out.require_valid()


def skk_collapse_check(
    circle_count: int,
    first_pairing,
    second_pairing,
    first_offsets=None,
    second_offsets=None,
) -> CylinderRegluingReport:
    """Certify that regluing cylinder stacks by two different pairings gives
    the same class, so the controlled-regluing difference terms vanish and
    the refined relation collapses onto the plain cut-and-paste relation."""
    k = int(circle_count)
    if k < 1:
        raise ValueError("need at least one circle")
    first = tuple(first_pairing)
    second = tuple(second_pairing)
    for p in (first, second):
        if sorted(p) != list(range(k)):
            raise ValueError("pairing must be a permutation of the circles")
    s1 = _glue_cylinder_stacks(k, first, first_offsets)
    s2 = _glue_cylinder_stacks(k, second, second_offsets)
    c1, c2 = s1.classify(), s2.classify()
    caps = _covering_caps([c1, c2])
    pres = boundary_sk_presentation(caps)
    diff = pres.group.element_normal_form(pres.vector_of([(c1, 1), (c2, -1)]))
    return CylinderRegluingReport(
        circle_count=k,
        first_pairing=first,
        second_pairing=second,
        first_class=c1,
        second_class=c2,
        coordinates_equal=diff.is_zero(),
    )
