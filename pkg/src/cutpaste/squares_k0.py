"""K0 of finitely presented categories with squares.

The engine itself only consumes square quadruples: the group is the free
abelian group on the object list modulo [basepoint] = 0 and, for every
distinguished square (A, B, C, D), the relation [A] + [D] = [B] + [C].

On top of that sit two concrete providers:

* ``FiniteSquaresCategory`` plus ``check_lemma_hypotheses`` -- a finite
  category with chosen cofibration / cofiber-map subcategories whose
  axioms, and the side conditions under which the object-and-squares
  presentation computes K0, can be verified exhaustively.

* ``surface_squares_presentation`` -- the truncated gluing category of
  compact oriented surfaces with boundary: objects are diffeomorphism
  classes within caps, squares are the disjoint-union squares and the
  collar squares (annulus stack, piece, piece, glued result).  Collar
  squares are enumerated between connected pieces; gluings of disconnected
  objects decompose into these plus disjoint-union squares, which the
  computed group confirms (rank stabilizes at two).
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import NamedTuple

from .abgroup import AbGroupPresentation, NormalForm
from .surface import DiffeoClass


class Caps(NamedTuple):
    """Truncation caps: per-component genus and boundary circles, and the
    number of components per object."""

    genus: int
    boundary: int
    components: int

    @classmethod
    def parse(cls, text: str) -> "Caps":
        parts = [int(x) for x in text.replace(" ", "").split(",")]
        if len(parts) != 3:
            raise ValueError("caps must be genus,boundary,components")
        return cls(*parts)


@dataclass(frozen=True)
class SquaresPresentation:
    """Finite object list, basepoint index, distinguished-square quadruples."""

    objects: tuple[str, ...]
    basepoint: int
    squares: tuple[tuple[int, int, int, int], ...]

    def __post_init__(self):
        n = len(self.objects)
        if not 0 <= self.basepoint < n:
            raise ValueError("basepoint index out of range")
        for q in self.squares:
            if len(q) != 4 or any(not 0 <= i < n for i in q):
                raise ValueError(f"square {q} references invalid objects")

    def to_json(self) -> dict:
        return {
            "objects": list(self.objects),
            "basepoint": self.basepoint,
            "squares": [list(q) for q in self.squares],
        }

    @classmethod
    def from_json(cls, data: dict) -> "SquaresPresentation":
        return cls(
            tuple(str(x) for x in data["objects"]),
            int(data["basepoint"]),
            tuple(tuple(int(i) for i in q) for q in data["squares"]),
        )


def k0_presentation(p: SquaresPresentation) -> AbGroupPresentation:
    """Free abelian group on the objects modulo [O] = 0 and, per square
    (A, B, C, D), the relation [A] + [D] - [B] - [C] = 0."""
    n = len(p.objects)
    relations = []
    base = [0] * n
    base[p.basepoint] = 1
    relations.append(base)
    seen = set()
    for a, b, c, d in p.squares:
        key = (a, b, c, d)
        if key in seen:
            continue
        seen.add(key)
        rel = [0] * n
        rel[a] += 1
        rel[d] += 1
        rel[b] -= 1
        rel[c] -= 1
        relations.append(rel)
    return AbGroupPresentation.make(p.objects, relations)


# ---------------------------------------------------------------------------
# Finite categories with squares: exhaustive hypothesis checking
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class Morphism:
    name: str
    src: int
    tgt: int


@dataclass
class FiniteSquaresCategory:
    """Fully tabulated finite category with squares.

    ``squares`` holds (top, left, right, bottom) morphism indices for each
    distinguished square: top: A -> B and bottom: C -> D are cofibrations,
    left: A -> C and right: B -> D are cofiber maps.  ``coproducts`` maps
    object pairs to the coproduct object; ``morphism_coproducts`` maps
    morphism pairs to their coproduct morphism (both optional -- without
    them the coproduct-closure check reports as skipped).
    """

    objects: tuple[str, ...]
    morphisms: tuple[Morphism, ...]
    identities: tuple[int, ...]
    composition: dict
    cof: frozenset
    fib: frozenset
    basepoint: int
    squares: frozenset
    coproducts: dict | None = None
    morphism_coproducts: dict | None = None

    def compose(self, g: int, f: int) -> int | None:
        return self.composition.get((g, f))


@dataclass(frozen=True)
class CheckResult:
    name: str
    status: str  # "pass" | "fail" | "skipped"
    detail: str = ""


@dataclass(frozen=True)
class HypothesisReport:
    checks: tuple[CheckResult, ...]

    @property
    def passed(self) -> bool:
        return all(c.status != "fail" for c in self.checks)

    def to_lines(self) -> list[str]:
        out = [f"check={c.name} status={c.status.upper()}" + (f" detail={c.detail}" if c.detail else "") for c in self.checks]
        out.append(f"hypotheses={'PASS' if self.passed else 'FAIL'}")
        return out


def _isomorphisms(cat: FiniteSquaresCategory) -> set[int]:
    isos = set()
    for f_idx, f in enumerate(cat.morphisms):
        for g_idx, g in enumerate(cat.morphisms):
            if g.src == f.tgt and g.tgt == f.src:
                if (
                    cat.compose(g_idx, f_idx) == cat.identities[f.src]
                    and cat.compose(f_idx, g_idx) == cat.identities[f.tgt]
                ):
                    isos.add(f_idx)
    return isos


def check_lemma_hypotheses(cat: FiniteSquaresCategory) -> HypothesisReport:
    """Exhaustively verify the squares-category axioms and the side
    conditions of the K0 presentation on the finite data, reporting a
    witness for each failure."""
    checks: list[CheckResult] = []
    mor = cat.morphisms

    def add(name, ok, detail=""):
        checks.append(CheckResult(name, "pass" if ok else "fail", detail))

    # category sanity -------------------------------------------------------
    ok, detail = True, ""
    for i, obj_id in enumerate(cat.identities):
        m = mor[obj_id]
        if m.src != i or m.tgt != i:
            ok, detail = False, f"identity of object {i} has wrong endpoints"
            break
    add("identities_well_formed", ok, detail)

    ok, detail = True, ""
    for g_idx, g in enumerate(mor):
        for f_idx, f in enumerate(mor):
            if f.tgt == g.src:
                gf = cat.compose(g_idx, f_idx)
                if gf is None:
                    ok, detail = False, f"missing composite {g.name}*{f.name}"
                    break
                h = mor[gf]
                if h.src != f.src or h.tgt != g.tgt:
                    ok, detail = False, f"composite {g.name}*{f.name} has wrong endpoints"
                    break
        if not ok:
            break
    add("composition_total", ok, detail)

    ok, detail = True, ""
    for h_idx, h in enumerate(mor):
        for g_idx, g in enumerate(mor):
            if g.tgt != h.src:
                continue
            for f_idx, f in enumerate(mor):
                if f.tgt != g.src:
                    continue
                left = cat.compose(cat.compose(h_idx, g_idx), f_idx)
                right = cat.compose(h_idx, cat.compose(g_idx, f_idx))
                if left != right:
                    ok = False
                    detail = f"({h.name}{g.name}){f.name} != {h.name}({g.name}{f.name})"
                    break
            if not ok:
                break
        if not ok:
            break
    add("composition_associative", ok, detail)

    ok, detail = True, ""
    for f_idx, f in enumerate(mor):
        if cat.compose(f_idx, cat.identities[f.src]) != f_idx:
            ok, detail = False, f"{f.name} * id != {f.name}"
            break
        if cat.compose(cat.identities[f.tgt], f_idx) != f_idx:
            ok, detail = False, f"id * {f.name} != {f.name}"
            break
    add("identity_laws", ok, detail)

    for name, sub in (("cof_subcategory", cat.cof), ("fib_subcategory", cat.fib)):
        ok, detail = True, ""
        for i in range(len(cat.objects)):
            if cat.identities[i] not in sub:
                ok, detail = False, f"identity of object {i} missing"
                break
        if ok:
            for g_idx in sub:
                for f_idx in sub:
                    if mor[f_idx].tgt == mor[g_idx].src:
                        if cat.compose(g_idx, f_idx) not in sub:
                            ok = False
                            detail = f"{mor[g_idx].name}*{mor[f_idx].name} escapes"
                            break
                if not ok:
                    break
        add(name + "_closed", ok, detail)

    # axiom 1: coproducts and closure of squares under them -----------------
    if cat.coproducts is None or cat.morphism_coproducts is None:
        checks.append(
            CheckResult(
                "axiom1_squares_closed_under_coproducts",
                "skipped",
                "no coproduct tables provided",
            )
        )
    else:
        ok, detail = True, ""
        for q1 in cat.squares:
            for q2 in cat.squares:
                parts = []
                missing = False
                for m1, m2 in zip(q1, q2):
                    mc = cat.morphism_coproducts.get((m1, m2))
                    if mc is None:
                        missing = True
                        break
                    parts.append(mc)
                if missing:
                    continue
                if tuple(parts) not in cat.squares:
                    ok = False
                    detail = f"coproduct of {q1} and {q2} not distinguished"
                    break
            if not ok:
                break
        add("axiom1_squares_closed_under_coproducts", ok, detail)

    # axiom 2: squares commute and compose ----------------------------------
    ok, detail = True, ""
    for top, left, right, bottom in cat.squares:
        if (
            mor[top].src != mor[left].src
            or mor[top].tgt != mor[right].src
            or mor[left].tgt != mor[bottom].src
            or mor[right].tgt != mor[bottom].tgt
        ):
            ok, detail = False, f"square {(top, left, right, bottom)} malformed"
            break
        if top not in cat.cof or bottom not in cat.cof:
            ok, detail = False, f"square {(top, left, right, bottom)}: horizontals not cofibrations"
            break
        if left not in cat.fib or right not in cat.fib:
            ok, detail = False, f"square {(top, left, right, bottom)}: verticals not cofiber maps"
            break
        if cat.compose(right, top) != cat.compose(bottom, left):
            ok, detail = False, f"square {(top, left, right, bottom)} does not commute"
            break
    add("axiom2_squares_commute", ok, detail)

    ok, detail = True, ""
    for q1 in cat.squares:
        for q2 in cat.squares:
            # horizontal: q1 then q2 when q2's left edge is q1's right edge
            if q2[1] == q1[2]:
                comp = (
                    cat.compose(q2[0], q1[0]),
                    q1[1],
                    q2[2],
                    cat.compose(q2[3], q1[3]),
                )
                if None not in comp and comp not in cat.squares:
                    ok, detail = False, f"horizontal composite of {q1},{q2} missing"
                    break
            # vertical: q1 on top of q2 when q2's top edge is q1's bottom edge
            if q2[0] == q1[3]:
                comp = (
                    q1[0],
                    cat.compose(q2[1], q1[1]),
                    cat.compose(q2[2], q1[2]),
                    q2[3],
                )
                if None not in comp and comp not in cat.squares:
                    ok, detail = False, f"vertical composite of {q1},{q2} missing"
                    break
        if not ok:
            break
    add("axiom2_squares_compose", ok, detail)

    # axiom 3: isomorphisms in both subcategories ---------------------------
    isos = _isomorphisms(cat)
    missing = [i for i in isos if i not in cat.cof or i not in cat.fib]
    add(
        "axiom3_isos_in_both_subcategories",
        not missing,
        f"isomorphism {mor[missing[0]].name} missing" if missing else "",
    )

    # axiom 4: squares with iso horizontals or iso verticals distinguished --
    ok, detail = True, ""
    for top in cat.cof:
        for bottom in cat.cof:
            for left in cat.fib:
                for right in cat.fib:
                    tm, bm, lm, rm = mor[top], mor[bottom], mor[left], mor[right]
                    if (
                        tm.src != lm.src
                        or tm.tgt != rm.src
                        or lm.tgt != bm.src
                        or rm.tgt != bm.tgt
                    ):
                        continue
                    if cat.compose(right, top) != cat.compose(bottom, left):
                        continue
                    if (top in isos and bottom in isos) or (
                        left in isos and right in isos
                    ):
                        if (top, left, right, bottom) not in cat.squares:
                            ok = False
                            detail = (
                                f"commuting square ({tm.name},{lm.name},"
                                f"{rm.name},{bm.name}) with iso pair not distinguished"
                            )
                            break
                if not ok:
                    break
            if not ok:
                break
        if not ok:
            break
    add("axiom4_iso_squares_distinguished", ok, detail)

    # side conditions of the K0 presentation --------------------------------
    def initial_or_terminal(sub, name):
        o = cat.basepoint
        initial = all(
            sum(1 for i in sub if mor[i].src == o and mor[i].tgt == x) == 1
            for x in range(len(cat.objects))
        )
        terminal = all(
            sum(1 for i in sub if mor[i].tgt == o and mor[i].src == x) == 1
            for x in range(len(cat.objects))
        )
        add(name, initial or terminal, "" if initial or terminal else "basepoint neither initial nor terminal")

    initial_or_terminal(cat.cof, "basepoint_initial_or_terminal_in_cof")
    initial_or_terminal(cat.fib, "basepoint_initial_or_terminal_in_fib")

    ok, detail = True, ""
    o = cat.basepoint
    for a in range(len(cat.objects)):
        for b in range(len(cat.objects)):
            found = False
            for top, left, right, bottom in cat.squares:
                if (
                    mor[top].src == o
                    and mor[top].tgt == a
                    and mor[left].src == o
                    and mor[left].tgt == b
                ):
                    x = mor[bottom].tgt
                    # need the mirrored square over the same object
                    for t2, l2, r2, b2 in cat.squares:
                        if (
                            mor[t2].src == o
                            and mor[t2].tgt == b
                            and mor[l2].src == o
                            and mor[l2].tgt == a
                            and mor[b2].tgt == x
                        ):
                            found = True
                            break
                if found:
                    break
            if not found:
                ok = False
                detail = f"no coproduct squares for pair ({cat.objects[a]},{cat.objects[b]})"
                break
        if not ok:
            break
    add("coproduct_squares_exist", ok, detail)

    return HypothesisReport(checks=tuple(checks))


# ---------------------------------------------------------------------------
# The truncated surface instance
# ---------------------------------------------------------------------------


def connected_types(caps: Caps) -> list[tuple[int, int]]:
    return [
        (g, b)
        for g in range(caps.genus + 1)
        for b in range(caps.boundary + 1)
    ]


def classes_within(caps: Caps) -> list[DiffeoClass]:
    """All diffeomorphism classes within the caps, the empty class included,
    ordered by descending component count (the empty class comes last)."""
    types = connected_types(caps)
    out = [DiffeoClass.empty()]
    for k in range(1, caps.components + 1):
        for combo in itertools.combinations_with_replacement(types, k):
            out.append(DiffeoClass.from_pairs(combo))
    out.sort(key=lambda c: (-c.component_count, c.components))
    return out


def within_caps(cls: DiffeoClass, caps: Caps) -> bool:
    if cls.component_count > caps.components:
        return False
    return all(g <= caps.genus and b <= caps.boundary for g, b in cls.components)


def glue_connected(m1: tuple[int, int], m2: tuple[int, int], k: int) -> tuple[int, int]:
    """Class of two connected pieces glued along k boundary-circle pairs:
    one circle merges the pieces, each further circle adds a handle."""
    g1, b1 = m1
    g2, b2 = m2
    if k < 1 or k > min(b1, b2):
        raise ValueError("invalid circle count for gluing")
    return (g1 + g2 + k - 1, b1 + b2 - 2 * k)


def glue_class_components(
    left: DiffeoClass, right: DiffeoClass, edges
) -> DiffeoClass:
    """Gluing along a bipartite multigraph: edges are (left component index,
    right component index) pairs, one per glued circle pair; degrees may not
    exceed the boundary-circle counts."""
    ln = left.component_count
    nodes = list(left.components) + list(right.components)
    deg = [0] * len(nodes)
    parent = list(range(len(nodes)))

    def find(x):
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    edge_list = []
    for i, j in edges:
        a, b = i, ln + j
        deg[a] += 1
        deg[b] += 1
        edge_list.append((a, b))
        ra, rb = find(a), find(b)
        if ra != rb:
            parent[ra] = rb
    for x, (g, b) in enumerate(nodes):
        if deg[x] > b:
            raise ValueError("component does not have enough boundary circles")
    groups: dict[int, list[int]] = {}
    for x in range(len(nodes)):
        groups.setdefault(find(x), []).append(x)
    edge_count: dict[int, int] = {}
    for a, b in edge_list:
        edge_count[find(a)] = edge_count.get(find(a), 0) + 1
    pairs = []
    for root, members in groups.items():
        chi = sum(2 - 2 * nodes[x][0] - nodes[x][1] for x in members)
        b = sum(nodes[x][1] for x in members) - 2 * edge_count.get(root, 0)
        g2 = 2 - chi - b
        if b < 0 or g2 < 0 or g2 % 2:
            raise ValueError("gluing pattern does not produce oriented surfaces")
        pairs.append((g2 // 2, b))
    return DiffeoClass.from_pairs(pairs)


ANNULUS = (0, 2)


@dataclass(frozen=True)
class SurfaceSquares:
    caps: Caps
    presentation: SquaresPresentation
    classes: tuple[DiffeoClass, ...]
    skipped: int

    def index_of(self, cls: DiffeoClass) -> int:
        return self.presentation.objects.index(cls.label())


def surface_squares_presentation(caps: Caps) -> SurfaceSquares:
    """The truncated category-with-squares instance for compact oriented
    surfaces with boundary.

    Squares are (i) disjoint-union squares (empty, A, B, A|B) and (ii)
    collar squares (annulus stack, M, M', glued result) for connected M, M'
    and every circle count that stays within the caps; entries that would
    leave the caps are skipped and counted.
    """
    caps = Caps(*caps)
    if min(caps) < 1:
        raise ValueError("caps must be at least (1,1,1)")
    classes = classes_within(caps)
    index = {c: i for i, c in enumerate(classes)}
    basepoint = index[DiffeoClass.empty()]
    squares: list[tuple[int, int, int, int]] = []
    skipped = 0

    # disjoint-union squares
    nonempty = [c for c in classes if not c.is_empty]
    for i, a in enumerate(nonempty):
        for b in nonempty[i:]:
            u = a.union(b)
            if within_caps(u, caps):
                squares.append((basepoint, index[a], index[b], index[u]))
            else:
                skipped += 1

    # collar squares between connected pieces
    types = [t for t in connected_types(caps) if t[1] >= 1]
    for x, m1 in enumerate(types):
        for m2 in types[x:]:
            for k in range(1, min(m1[1], m2[1], caps.components) + 1):
                glued = glue_connected(m1, m2, k)
                collar = DiffeoClass.from_pairs([ANNULUS] * k)
                d_cls = DiffeoClass.from_pairs([glued])
                if not (within_caps(d_cls, caps) and within_caps(collar, caps)):
                    skipped += 1
                    continue
                squares.append(
                    (
                        index[collar],
                        index[DiffeoClass.from_pairs([m1])],
                        index[DiffeoClass.from_pairs([m2])],
                        index[d_cls],
                    )
                )

    pres = SquaresPresentation(
        objects=tuple(c.label() for c in classes),
        basepoint=basepoint,
        squares=tuple(squares),
    )
    return SurfaceSquares(
        caps=caps, presentation=pres, classes=tuple(classes), skipped=skipped
    )


@dataclass(frozen=True)
class K0Computation:
    caps: Caps
    group: AbGroupPresentation
    free_rank: int
    torsion: tuple[int, ...]
    coordinates: dict  # class label -> NormalForm
    instance: SurfaceSquares

    def coordinate_of(self, cls: DiffeoClass) -> NormalForm:
        return self.coordinates[cls.label()]

    def to_lines(self) -> list[str]:
        out = [
            f"caps={self.caps.genus},{self.caps.boundary},{self.caps.components}",
            f"objects={len(self.group.generators)}",
            f"squares={len(self.instance.presentation.squares)}",
            f"free_rank={self.free_rank}",
            f"torsion={list(self.torsion)}",
        ]
        return out


def k0_of_surfaces(caps: Caps) -> K0Computation:
    """Invariant factors and per-class coordinates of the truncated K0 group."""
    caps = Caps(*caps)
    if caps.genus < 2 or caps.boundary < 2 or caps.components < 2:
        raise ValueError("k0_of_surfaces needs caps of at least (2,2,2)")
    inst = surface_squares_presentation(caps)
    group = k0_presentation(inst.presentation)
    rank, torsion = group.quotient_invariants()
    coords = {}
    n = len(group.generators)
    for i, label in enumerate(group.generators):
        vec = [0] * n
        vec[i] = 1
        coords[label] = group.element_normal_form(vec)
    return K0Computation(
        caps=caps,
        group=group,
        free_rank=rank,
        torsion=torsion,
        coordinates=coords,
        instance=inst,
    )
