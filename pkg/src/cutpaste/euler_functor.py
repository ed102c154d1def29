"""The chain functor on triangulated surfaces and its square-preservation checks.

``chains_of`` sends a surface to its simplicial chain complex in degrees
0..2 (vertices, geometric edges, triangles, with orientation signs taken
from the directed-edge structure).  Subcomplexes of a common surface get
chain bases keyed by the parent's cells, which makes inclusion maps plain
0/1 monomial matrices and the pushout of B <- A -> C land literally on the
Mayer-Vietoris subcomplex of D.

Square instances package a surface D with two triangle subsets covering it
whose intersection A is the gluing locus; ``functor_on_square`` verifies
that the chain-level pushout of B <- A -> C is quasi-isomorphic to the
chains of D, and ``pi0_commutation`` checks that the induced class in
K0 of chain complexes equals the Euler characteristic.
"""

from __future__ import annotations

from dataclasses import dataclass

from .abgroup import IntMatrix
from .chains import ChainComplex, ChainMap, HomologyType, pushout
from .surface import (
    Ref,
    SurfaceError,
    TriSurface,
    _Builder,
    _canonical_form,
    _cut_circle_raw,
    _insert_collar_raw,
    circles_vertex_disjoint,
)


@dataclass(frozen=True)
class ChainData:
    """Chain complex of a subcomplex with its basis keyed by parent cells."""

    complex: ChainComplex
    vertices: tuple[int, ...]
    edges: tuple[Ref, ...]
    triangles: tuple[int, ...]


def surface_chain_data(s: TriSurface, subset=None) -> ChainData:
    """Simplicial chains of the full surface or of a triangle subset."""
    if subset is None:
        tris = list(range(s.triangle_count))
    else:
        tris = sorted(subset)
        for t in tris:
            if not 0 <= t < s.triangle_count:
                raise SurfaceError(f"triangle {t} outside the surface")
    verts = sorted({v for t in tris for v in s.triangles[t]})
    vidx = {v: i for i, v in enumerate(verts)}
    edge_set = {s.edge_rep((t, e))[0] for t in tris for e in range(3)}
    edges = sorted(edge_set)
    eidx = {r: i for i, r in enumerate(edges)}
    nv, ne, nf = len(verts), len(edges), len(tris)

    d2 = [[0] * nf for _ in range(ne)]
    for j, t in enumerate(tris):
        for e in range(3):
            rep, sign = s.edge_rep((t, e))
            d2[eidx[rep]][j] += sign
    d1 = [[0] * ne for _ in range(nv)]
    for j, rep in enumerate(edges):
        u, v = s.endpoints(rep)
        if u != v:
            d1[vidx[v]][j] += 1
            d1[vidx[u]][j] -= 1
    cx = ChainComplex.make(0, 2, (nv, ne, nf), [d1, d2])
    return ChainData(
        complex=cx, vertices=tuple(verts), edges=tuple(edges), triangles=tuple(tris)
    )


def chains_of(s: TriSurface) -> ChainComplex:
    """Simplicial chain complex of the whole surface, degrees 0..2."""
    return surface_chain_data(s).complex


def inclusion_chain_map(small: ChainData, big: ChainData) -> ChainMap:
    """Inclusion of one subcomplex into a larger one of the same parent."""
    vpos = {v: i for i, v in enumerate(big.vertices)}
    epos = {r: i for i, r in enumerate(big.edges)}
    tpos = {t: i for i, t in enumerate(big.triangles)}
    mats = []
    for keys, positions, nbig in (
        (small.vertices, vpos, len(big.vertices)),
        (small.edges, epos, len(big.edges)),
        (small.triangles, tpos, len(big.triangles)),
    ):
        rows = [[0] * len(keys) for _ in range(nbig)]
        for j, key in enumerate(keys):
            if key not in positions:
                raise SurfaceError("not a subcomplex: cell missing from the bigger piece")
            rows[positions[key]][j] = 1
        mats.append(
            IntMatrix.from_rows(rows)
            if nbig and keys
            else IntMatrix.zeros(nbig, len(keys))
        )
    return ChainMap(small.complex, big.complex, tuple(mats))


def extract_subcomplex(s: TriSurface, tris) -> TriSurface:
    """The triangle subset as a standalone surface (induced gluing)."""
    order = sorted(tris)
    reindex = {t: i for i, t in enumerate(order)}
    triangles = [tuple(s.triangles[t]) for t in order]
    glue = {}
    for r1, r2 in s.gluing:
        if r1[0] in reindex and r2[0] in reindex:
            a = (reindex[r1[0]], r1[1])
            b = (reindex[r2[0]], r2[1])
            glue[a] = b
            glue[b] = a
    out, _ = _canonical_form(triangles, glue)
    return out


@dataclass(frozen=True)
class SquareInstance:
    """A gluing square inside one surface: D covered by B and C with A = B & C.

    ``b_triangles`` and ``c_triangles`` must cover every triangle of the
    surface; their intersection is the common subcomplex along which the
    two pieces are glued.
    """

    surface: TriSurface
    b_triangles: frozenset[int]
    c_triangles: frozenset[int]

    def __post_init__(self):
        all_tris = set(range(self.surface.triangle_count))
        if set(self.b_triangles) | set(self.c_triangles) != all_tris:
            raise SurfaceError("square pieces must cover the surface")

    @property
    def a_triangles(self) -> frozenset[int]:
        return self.b_triangles & self.c_triangles

    def piece_surfaces(self) -> tuple[TriSurface, TriSurface, TriSurface, TriSurface]:
        a = extract_subcomplex(self.surface, self.a_triangles)
        b = extract_subcomplex(self.surface, self.b_triangles)
        c = extract_subcomplex(self.surface, self.c_triangles)
        return a, b, c, self.surface

    def to_json(self) -> dict:
        a, b, c, d = self.piece_surfaces()
        return {
            "d": d.to_json(),
            "b_triangles": sorted(self.b_triangles),
            "c_triangles": sorted(self.c_triangles),
            "a": a.to_json(),
            "b": b.to_json(),
            "c": c.to_json(),
        }

    @classmethod
    def from_json(cls, data: dict) -> "SquareInstance":
        surf = TriSurface.from_json(data["d"])
        return cls(
            surface=surf,
            b_triangles=frozenset(int(t) for t in data["b_triangles"]),
            c_triangles=frozenset(int(t) for t in data["c_triangles"]),
        )


@dataclass(frozen=True)
class SquareReport:
    passed: bool
    pushout_model: str
    pushout_homology: HomologyType
    total_homology: HomologyType
    failing_degree: int | None

    def to_lines(self) -> list[str]:
        out = [f"square_check={'PASS' if self.passed else 'FAIL'}"]
        out.append(f"pushout_model={self.pushout_model}")
        out.append(f"pushout_homology={self.pushout_homology.describe()}")
        out.append(f"glued_homology={self.total_homology.describe()}")
        if self.failing_degree is not None:
            out.append(f"first_failing_degree={self.failing_degree}")
        return out


def functor_on_square(q: SquareInstance) -> SquareReport:
    """Check that chains turn the gluing square into a pushout square up to
    quasi-isomorphism (the Mayer-Vietoris comparison)."""
    data_a = surface_chain_data(q.surface, q.a_triangles)
    data_b = surface_chain_data(q.surface, q.b_triangles)
    data_c = surface_chain_data(q.surface, q.c_triangles)
    data_d = surface_chain_data(q.surface)
    f = inclusion_chain_map(data_a, data_b)
    g = inclusion_chain_map(data_a, data_c)
    if not f.levelwise_injective:
        raise SurfaceError("inclusion is not levelwise injective")
    res = pushout(f, g)
    hp = res.complex.homology()
    hd = data_d.complex.homology()
    failing = None
    for n in sorted(set(hp.degrees()) | set(hd.degrees())):
        if hp.at(n) != hd.at(n):
            failing = n
            break
    return SquareReport(
        passed=failing is None,
        pushout_model=res.model,
        pushout_homology=hp,
        total_homology=hd,
        failing_degree=failing,
    )


def coproduct_square(x: TriSurface, y: TriSurface) -> SquareInstance:
    """The disjoint-union square: A empty, B = x, C = y, D = x | y."""
    nx = x.triangle_count
    b = _Builder.from_surface(x)
    b.add_surface(y)
    d, refmap = b.finish()
    b_tris = frozenset(refmap.tri_map[t] for t in range(nx))
    c_tris = frozenset(refmap.tri_map[t] for t in range(nx, nx + y.triangle_count))
    return SquareInstance(surface=d, b_triangles=b_tris, c_triangles=c_tris)


def square_from_circles(s: TriSurface, circles) -> SquareInstance:
    """Build a gluing square by thickening each circle to a collar annulus.

    A is the union of the collars; the complementary pieces are split
    between B and C alternately (every piece keeps the collars, so
    B & C = A and B | C = D)."""
    circles = list(circles)
    if not circles:
        raise SurfaceError("need at least one circle")
    if not circles_vertex_disjoint(circles):
        raise SurfaceError("circles must be pairwise vertex-disjoint")
    b = _Builder.from_surface(s)
    raw_seams = []
    raw_cores = []
    raw_collars = []
    for c in circles:
        seam, core, collar = _insert_collar_raw(b, c.refs)
        raw_seams.append(seam)
        raw_cores.append(core)
        raw_collars.append(collar)
    refined, refmap = b.finish()
    refined.require_valid()
    collar_tris = [frozenset(refmap.tri_map[t] for t in coll) for coll in raw_collars]
    seam_refs = [refmap.refs(rs) for rs in raw_seams]
    core_refs = [refmap.refs(rc) for rc in raw_cores]
    b2 = _Builder.from_surface(refined)
    for rs in seam_refs:
        _cut_circle_raw(b2, rs)
    for rc in core_refs:
        _cut_circle_raw(b2, rc)
    comp = b2.components()
    pieces: dict[int, set[int]] = {}
    for t, c in enumerate(comp):
        pieces.setdefault(c, set()).add(t)
    all_collar = set().union(*collar_tris)
    outer = []
    for p in pieces.values():
        overlap = p & all_collar
        if overlap and overlap != p:
            raise SurfaceError("internal error: piece straddles a collar")
        if not overlap:
            outer.append(p)
    outer.sort(key=min)
    b_tris = set(all_collar)
    c_tris = set(all_collar)
    for i, piece in enumerate(outer):
        (b_tris if i % 2 == 0 else c_tris).update(piece)
    return SquareInstance(
        surface=refined,
        b_triangles=frozenset(b_tris),
        c_triangles=frozenset(c_tris),
    )


@dataclass(frozen=True)
class CommutationReport:
    entries: tuple[tuple[str, int, int], ...]  # (class label, chi, k0 class)

    @property
    def passed(self) -> bool:
        return all(chi == k for _, chi, k in self.entries)

    def to_lines(self) -> list[str]:
        out = []
        for label, chi, k in self.entries:
            status = "PASS" if chi == k else "FAIL"
            out.append(f"class={label} chi={chi} k0={k} status={status}")
        out.append(f"commutation={'PASS' if self.passed else 'FAIL'}")
        return out


def pi0_commutation(surfaces) -> CommutationReport:
    """Check k0(chains) == Euler characteristic on each sample surface."""
    entries = []
    for s in surfaces:
        chi = s.euler_characteristic()
        k = chains_of(s).k0_class()
        entries.append((s.classify().label(), chi, k))
    return CommutationReport(entries=tuple(entries))
