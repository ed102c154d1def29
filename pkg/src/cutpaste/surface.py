"""Combinatorial compact oriented surfaces with boundary, and their cut-and-paste calculus.

A surface is a collection of oriented triangles together with a partial
pairing of directed edges: a directed edge (t, e) runs from vertex
``triangles[t][e]`` to ``triangles[t][(e+1) % 3]``, and a glued pair must
consist of mutually reversed directed edges (this is what makes the whole
complex oriented).  Unglued edges form the boundary.  Repeated vertex
labels inside a triangle are allowed (the complex is a Delta-complex, not
a strict simplicial complex); validity is governed by the vertex-link
condition: the corners around every vertex form a single cycle (interior
vertex) or a single path (boundary vertex).

Everything is immutable; operations return new surfaces with canonically
regenerated labels (breadth-first from the lexicographically least
triangle), so equal constructions serialize identically.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass
from functools import cached_property, lru_cache

Ref = tuple[int, int]


class SurfaceError(ValueError):
    """Base class for domain errors in the surface calculus."""


class InvalidSurface(SurfaceError):
    pass


class NonSeparatingCut(SurfaceError):
    """Raised when a cut system fails to two-color the complement.

    For a single circle this means the two new boundary cycles would land
    in the same connected component; take a parallel copy (double_circle)
    and cut along the pair instead.
    """


class CircleTouchesBoundary(SurfaceError):
    pass


class LengthMismatch(SurfaceError):
    """Cycle lengths differ; refine_boundary can equalize them."""


class OrientationClash(SurfaceError):
    pass


# ---------------------------------------------------------------------------
# Diffeomorphism classes
# ---------------------------------------------------------------------------


@dataclass(frozen=True, order=True)
class DiffeoClass:
    """Multiset of connected-surface types (genus, boundary circles)."""

    components: tuple[tuple[int, int], ...]

    def __post_init__(self):
        for g, b in self.components:
            if g < 0 or b < 0:
                raise ValueError("genus and boundary count must be nonnegative")
        if tuple(sorted(self.components)) != self.components:
            raise ValueError("components must be sorted; use from_pairs")

    @classmethod
    def from_pairs(cls, pairs) -> "DiffeoClass":
        return cls(tuple(sorted((int(g), int(b)) for g, b in pairs)))

    @classmethod
    def empty(cls) -> "DiffeoClass":
        return cls(())

    @classmethod
    def connected(cls, genus: int, boundary: int) -> "DiffeoClass":
        return cls(((genus, boundary),))

    @property
    def is_empty(self) -> bool:
        return not self.components

    @property
    def component_count(self) -> int:
        return len(self.components)

    @property
    def chi(self) -> int:
        return sum(2 - 2 * g - b for g, b in self.components)

    @property
    def boundary_circles(self) -> int:
        return sum(b for _, b in self.components)

    @property
    def is_closed(self) -> bool:
        return self.boundary_circles == 0

    def union(self, other: "DiffeoClass") -> "DiffeoClass":
        return DiffeoClass.from_pairs(self.components + other.components)

    def label(self) -> str:
        if not self.components:
            return "{}"
        return "{" + ",".join(f"({g},{b})" for g, b in self.components) + "}"

    def __str__(self):
        return self.label()

    @classmethod
    def from_label(cls, text: str) -> "DiffeoClass":
        text = text.strip()
        if not (text.startswith("{") and text.endswith("}")):
            raise ValueError(f"bad class label {text!r}")
        inner = text[1:-1]
        pairs = []
        for chunk in inner.split(")"):
            chunk = chunk.strip().lstrip(",").strip().lstrip("(")
            if not chunk:
                continue
            g, b = chunk.split(",")
            pairs.append((int(g), int(b)))
        return cls.from_pairs(pairs)


# ---------------------------------------------------------------------------
# The surface type
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class TriSurface:
    vertex_count: int
    triangles: tuple[tuple[int, int, int], ...]
    gluing: tuple[tuple[Ref, Ref], ...]

    # -- basic accessors ----------------------------------------------------

    @cached_property
    def _partner(self) -> dict[Ref, Ref]:
        out = {}
        for r1, r2 in self.gluing:
            out[r1] = r2
            out[r2] = r1
        return out

    def partner(self, ref: Ref) -> Ref | None:
        return self._partner.get(ref)

    def endpoints(self, ref: Ref) -> tuple[int, int]:
        t, e = ref
        tri = self.triangles[t]
        return tri[e], tri[(e + 1) % 3]

    def is_boundary_ref(self, ref: Ref) -> bool:
        return ref not in self._partner

    @property
    def triangle_count(self) -> int:
        return len(self.triangles)

    @property
    def edge_count(self) -> int:
        """Geometric edges: glued pairs count once."""
        return 3 * len(self.triangles) - len(self.gluing)

    def edge_rep(self, ref: Ref) -> tuple[Ref, int]:
        """Canonical representative of the geometric edge carrying ref, and
        the sign of ref relative to it (+1 when ref is the representative)."""
        p = self._partner.get(ref)
        if p is None or ref <= p:
            return ref, 1
        return p, -1

    @cached_property
    def edge_representatives(self) -> tuple[Ref, ...]:
        reps = []
        for t in range(len(self.triangles)):
            for e in range(3):
                ref = (t, e)
                p = self._partner.get(ref)
                if p is None or ref <= p:
                    reps.append(ref)
        return tuple(reps)

    def euler_characteristic(self) -> int:
        return self.vertex_count - self.edge_count + len(self.triangles)

    # -- connectivity ---------------------------------------------------------

    @cached_property
    def component_of_triangle(self) -> tuple[int, ...]:
        n = len(self.triangles)
        comp = [-1] * n
        cur = 0
        for start in range(n):
            if comp[start] != -1:
                continue
            dq = deque([start])
            comp[start] = cur
            while dq:
                t = dq.popleft()
                for e in range(3):
                    p = self._partner.get((t, e))
                    if p is not None and comp[p[0]] == -1:
                        comp[p[0]] = cur
                        dq.append(p[0])
            cur += 1
        return tuple(comp)

    @property
    def component_count(self) -> int:
        return max(self.component_of_triangle, default=-1) + 1

    # -- corners and links ----------------------------------------------------

    def _corner_next(self, corner: tuple[int, int]) -> tuple[int, int] | None:
        """Rotate around the corner's vertex by crossing the incoming edge."""
        t, i = corner
        return self._partner.get((t, (i + 2) % 3))

    @cached_property
    def _corners_at(self) -> dict[int, list[tuple[int, int]]]:
        out: dict[int, list[tuple[int, int]]] = {}
        for t, tri in enumerate(self.triangles):
            for i in range(3):
                out.setdefault(tri[i], []).append((t, i))
        return out

    def vertex_is_interior(self, v: int) -> bool:
        corners = self._corners_at.get(v, [])
        return all(self._corner_next(c) is not None for c in corners)

    # -- validation -------------------------------------------------------------

    def validate(self) -> str | None:
        """Check all structural invariants; returns the first violation or None."""
        n_tri = len(self.triangles)
        used = set()
        for t, tri in enumerate(self.triangles):
            if len(tri) != 3:
                return f"triangle {t} does not have three vertices"
            for v in tri:
                if not (0 <= v < self.vertex_count):
                    return f"triangle {t} references vertex {v} outside 0..{self.vertex_count - 1}"
                used.add(v)
        if len(used) != self.vertex_count:
            return "vertex ids are not exactly 0..vertex_count-1 (isolated or missing ids)"

        seen: set[Ref] = set()
        for r1, r2 in self.gluing:
            for t, e in (r1, r2):
                if not (0 <= t < n_tri and 0 <= e < 3):
                    return f"gluing references invalid edge ({t},{e})"
            if r1 == r2:
                return f"edge {r1} glued to itself"
            if r1 in seen or r2 in seen:
                return f"edge glued more than once near {r1}"
            seen.add(r1)
            seen.add(r2)
            u, v = self.endpoints(r1)
            x, y = self.endpoints(r2)
            if (u, v) != (y, x):
                return (
                    f"glued pair {r1}~{r2} is not orientation-reversing: "
                    f"({u},{v}) vs ({x},{y})"
                )

        for v, corners in self._corners_at.items():
            cset = set(corners)
            nxt = {}
            preds = set()
            for c in corners:
                c2 = self._corner_next(c)
                if c2 is not None:
                    if c2 not in cset:
                        return f"link of vertex {v} jumps to a corner of another vertex"
                    if c2 in preds:
                        return f"link of vertex {v} branches"
                    nxt[c] = c2
                    preds.add(c2)
            starts = [c for c in corners if c not in preds]
            if not starts:
                walk = corners[0]
                count = 0
                cur = walk
                while True:
                    cur = nxt.get(cur)
                    count += 1
                    if cur is None:
                        return f"link of vertex {v} has a dead end inside a cycle"
                    if cur == walk:
                        break
                if count != len(corners):
                    return f"link of vertex {v} is not a single cycle"
            else:
                if len(starts) != 1:
                    return f"link of vertex {v} splits into {len(starts)} arcs"
                cur = starts[0]
                count = 1
                while cur in nxt:
                    cur = nxt[cur]
                    count += 1
                if count != len(corners):
                    return f"link of vertex {v} is not a single path"
        return None

    def require_valid(self) -> "TriSurface":
        violation = self.validate()
        if violation is not None:
            raise InvalidSurface(violation)
        return self

    # -- boundary ---------------------------------------------------------------

    @cached_property
    def boundary_refs(self) -> tuple[Ref, ...]:
        out = []
        for t in range(len(self.triangles)):
            for e in range(3):
                if (t, e) not in self._partner:
                    out.append((t, e))
        return tuple(out)

    def _next_boundary_ref(self, ref: Ref) -> Ref:
        """The boundary edge leaving the endpoint of ref."""
        t, e = ref
        corner = (t, (e + 1) % 3)  # corner at the endpoint vertex
        while True:
            p = self._partner.get(corner)
            if p is None:
                return corner
            corner = (p[0], (p[1] + 1) % 3)

    @cached_property
    def boundary_cycles(self) -> tuple[tuple[Ref, ...], ...]:
        """Boundary decomposed into directed edge cycles, canonically ordered."""
        remaining = set(self.boundary_refs)
        cycles = []
        for start in sorted(self.boundary_refs):
            if start not in remaining:
                continue
            cyc = [start]
            remaining.discard(start)
            cur = start
            while True:
                cur = self._next_boundary_ref(cur)
                if cur == start:
                    break
                cyc.append(cur)
                remaining.discard(cur)
            k = cyc.index(min(cyc))
            cycles.append(tuple(cyc[k:] + cyc[:k]))
        cycles.sort()
        return tuple(cycles)

    def boundary_circle_count(self) -> int:
        return len(self.boundary_cycles)

    # -- classification ------------------------------------------------------------

    @cached_property
    def diffeo_class(self) -> DiffeoClass:
        comp = self.component_of_triangle
        ncomp = self.component_count
        verts: list[set[int]] = [set() for _ in range(ncomp)]
        faces = [0] * ncomp
        edges = [0] * ncomp
        for t, tri in enumerate(self.triangles):
            c = comp[t]
            faces[c] += 1
            verts[c].update(tri)
        for t, e in self.edge_representatives:
            edges[comp[t]] += 1
        bnd = [0] * ncomp
        for cyc in self.boundary_cycles:
            bnd[comp[cyc[0][0]]] += 1
        pairs = []
        for c in range(ncomp):
            chi = len(verts[c]) - edges[c] + faces[c]
            b = bnd[c]
            g2 = 2 - chi - b
            if g2 < 0 or g2 % 2:
                raise InvalidSurface(
                    f"component {c} has chi={chi}, boundary={b}; not an oriented surface"
                )
            pairs.append((g2 // 2, b))
        return DiffeoClass.from_pairs(pairs)

    def classify(self) -> DiffeoClass:
        return self.diffeo_class

    # -- serialization --------------------------------------------------------------

    def to_json(self) -> dict:
        return {
            "vertices": self.vertex_count,
            "triangles": [list(t) for t in self.triangles],
            "gluing": [[list(r1), list(r2)] for r1, r2 in self.gluing],
        }

    @classmethod
    def from_json(cls, data: dict) -> "TriSurface":
        triangles = [tuple(int(v) for v in t) for t in data["triangles"]]
        glue = {}
        for pair in data["gluing"]:
            (t1, e1), (t2, e2) = pair
            a, b = (int(t1), int(e1)), (int(t2), int(e2))
            glue[a] = b
            glue[b] = a
        surf, _ = _canonical_form(triangles, glue)
        return surf


# ---------------------------------------------------------------------------
# Canonicalization and the mutable builder
# ---------------------------------------------------------------------------


@dataclass
class RefMap:
    """Tracks where triangles, edges and vertices land after canonicalization."""

    tri_map: dict[int, int]
    rotations: dict[int, int]
    vertex_map: dict[int, int]

    def ref(self, ref: Ref) -> Ref:
        t, e = ref
        return (self.tri_map[t], (e - self.rotations[t]) % 3)

    def refs(self, refs) -> tuple[Ref, ...]:
        return tuple(self.ref(r) for r in refs)

    def vertex(self, v: int) -> int:
        return self.vertex_map[v]


def _canonical_form(triangles, glue) -> tuple[TriSurface, RefMap]:
    n_tri = len(triangles)
    visited = [False] * n_tri
    order: list[int] = []
    by_key = sorted(range(n_tri), key=lambda t: (tuple(triangles[t]), t))
    for start in by_key:
        if visited[start]:
            continue
        visited[start] = True
        dq = deque([start])
        while dq:
            t = dq.popleft()
            order.append(t)
            for e in range(3):
                p = glue.get((t, e))
                if p is not None and not visited[p[0]]:
                    visited[p[0]] = True
                    dq.append(p[0])
    tri_map = {old: new for new, old in enumerate(order)}
    vmap: dict[int, int] = {}
    for old in order:
        for v in triangles[old]:
            if v not in vmap:
                vmap[v] = len(vmap)
    new_tris = []
    rots: dict[int, int] = {}
    for old in order:
        tri = [vmap[v] for v in triangles[old]]
        rot = min(range(3), key=lambda r: tri[r:] + tri[:r])
        rots[old] = rot
        new_tris.append(tuple(tri[rot:] + tri[:rot]))
    refmap = RefMap(tri_map, rots, vmap)
    pairs = set()
    for r1, r2 in glue.items():
        a, b = refmap.ref(r1), refmap.ref(r2)
        pairs.add((a, b) if a <= b else (b, a))
    surf = TriSurface(
        vertex_count=len(vmap),
        triangles=tuple(new_tris),
        gluing=tuple(sorted(pairs)),
    )
    return surf, refmap


class _Builder:
    """Mutable scratch representation used inside operations."""

    def __init__(self):
        self.triangles: list[list[int]] = []
        self.glue: dict[Ref, Ref] = {}
        self.next_vertex = 0

    @classmethod
    def from_surface(cls, s: TriSurface) -> "_Builder":
        b = cls()
        b.triangles = [list(t) for t in s.triangles]
        b.glue = dict(s._partner)
        b.next_vertex = s.vertex_count
        return b

    def new_vertex(self) -> int:
        v = self.next_vertex
        self.next_vertex += 1
        return v

    def add_surface(self, s: TriSurface) -> tuple[int, int]:
        """Disjointly add another surface; returns (vertex offset, triangle offset)."""
        voff = self.next_vertex
        toff = len(self.triangles)
        for tri in s.triangles:
            self.triangles.append([v + voff for v in tri])
        for r1, r2 in s.gluing:
            a = (r1[0] + toff, r1[1])
            b = (r2[0] + toff, r2[1])
            self.glue[a] = b
            self.glue[b] = a
        self.next_vertex += s.vertex_count
        return voff, toff

    def endpoints(self, ref: Ref) -> tuple[int, int]:
        t, e = ref
        tri = self.triangles[t]
        return tri[e], tri[(e + 1) % 3]

    def unglue(self, ref: Ref) -> Ref:
        p = self.glue.pop(ref)
        del self.glue[p]
        return p

    def glue_pair(self, r1: Ref, r2: Ref) -> None:
        if r1 in self.glue or r2 in self.glue:
            raise SurfaceError("edge already glued")
        u, v = self.endpoints(r1)
        x, y = self.endpoints(r2)
        if (u, v) != (y, x):
            raise OrientationClash(
                f"cannot glue {r1}:{(u, v)} to {r2}:{(x, y)}; directions must be mutually reversed"
            )
        self.glue[r1] = r2
        self.glue[r2] = r1

    def identify_vertices(self, pairs) -> None:
        """Union-find merge of vertex ids, then rewrite all triangles."""
        parent: dict[int, int] = {}

        def find(x):
            root = x
            while parent.get(root, root) != root:
                root = parent[root]
            while parent.get(x, x) != x:
                parent[x], x = root, parent[x]
            return root

        for a, b in pairs:
            ra, rb = find(a), find(b)
            if ra != rb:
                if rb < ra:
                    ra, rb = rb, ra
                parent[rb] = ra
        if not parent:
            return
        for tri in self.triangles:
            for i in range(3):
                tri[i] = find(tri[i])

    def drop_triangles(self, indices: set[int]) -> dict[int, int]:
        """Remove triangles (they must not be glued to the kept part)."""
        for (t, e) in list(self.glue):
            if t in indices:
                p = self.glue.get((t, e))
                if p is None:
                    continue
                if p[0] not in indices:
                    raise SurfaceError("cannot drop triangles still glued to the rest")
                self.glue.pop((t, e), None)
                self.glue.pop(p, None)
        keep = [t for t in range(len(self.triangles)) if t not in indices]
        remap = {old: new for new, old in enumerate(keep)}
        self.triangles = [self.triangles[t] for t in keep]
        self.glue = {
            (remap[t1], e1): (remap[t2], e2)
            for (t1, e1), (t2, e2) in self.glue.items()
        }
        return remap

    def components(self) -> list[int]:
        n = len(self.triangles)
        comp = [-1] * n
        cur = 0
        for start in range(n):
            if comp[start] != -1:
                continue
            comp[start] = cur
            dq = deque([start])
            while dq:
                t = dq.popleft()
                for e in range(3):
                    p = self.glue.get((t, e))
                    if p is not None and comp[p[0]] == -1:
                        comp[p[0]] = cur
                        dq.append(p[0])
            cur += 1
        return comp

    def corners_at_vertex(self, v: int) -> list[tuple[int, int]]:
        return [
            (t, i)
            for t, tri in enumerate(self.triangles)
            for i in range(3)
            if tri[i] == v
        ]

    def split_vertex_at_circle(self, v: int, keep_corner: tuple[int, int]) -> int:
        """After ungluing the two circle edges at v, relabel the arc of
        corners not containing keep_corner with a fresh vertex id."""
        corners = self.corners_at_vertex(v)
        cset = set(corners)
        nxt = {}
        preds = set()
        for c in corners:
            t, i = c
            p = self.glue.get((t, (i + 2) % 3))
            if p is not None and p in cset:
                nxt[c] = p
                preds.add(p)
        starts = [c for c in corners if c not in preds]
        arcs = []
        for s0 in sorted(starts):
            arc = [s0]
            cur = s0
            while cur in nxt:
                cur = nxt[cur]
                arc.append(cur)
            arcs.append(arc)
        if len(arcs) != 2:
            raise SurfaceError(
                f"vertex {v} did not split into two arcs when cutting (got {len(arcs)})"
            )
        if keep_corner in arcs[0]:
            other = arcs[1]
        elif keep_corner in arcs[1]:
            other = arcs[0]
        else:
            raise SurfaceError("keep corner not found at split vertex")
        w = self.new_vertex()
        for t, i in other:
            self.triangles[t][i] = w
        return w

    def finish(self) -> tuple[TriSurface, RefMap]:
        return _canonical_form(self.triangles, self.glue)


# ---------------------------------------------------------------------------
# Embedded circles
# ---------------------------------------------------------------------------


@dataclass(frozen=True, eq=False)
class EmbeddedCircle:
    """Simple closed edge-cycle in the interior of the 1-skeleton.

    ``refs`` are directed edges, consecutively chained, on pairwise distinct
    vertices, each glued (interior), with every vertex interior.
    """

    surface: TriSurface
    refs: tuple[Ref, ...]

    def __post_init__(self):
        s = self.surface
        refs = self.refs
        if not refs:
            raise SurfaceError("empty circle")
        verts = []
        for i, r in enumerate(refs):
            if s.partner(r) is None:
                raise CircleTouchesBoundary(f"circle edge {r} lies on the boundary")
            u, v = s.endpoints(r)
            verts.append(u)
            nu, _ = s.endpoints(refs[(i + 1) % len(refs)])
            if v != nu:
                raise SurfaceError(f"circle edges {i} and {i + 1} do not chain")
        if len(set(verts)) != len(verts):
            raise SurfaceError("circle revisits a vertex")
        for v in verts:
            if not s.vertex_is_interior(v):
                raise CircleTouchesBoundary(f"circle vertex {v} lies on the boundary")

    def __len__(self):
        return len(self.refs)

    @property
    def vertices(self) -> tuple[int, ...]:
        return tuple(self.surface.endpoints(r)[0] for r in self.refs)

    @classmethod
    def from_vertices(cls, s: TriSurface, vertices) -> "EmbeddedCircle":
        """Build a circle from a vertex cycle, picking the least matching edge refs."""
        vertices = list(vertices)
        refs = []
        for a, b in zip(vertices, vertices[1:] + vertices[:1]):
            candidates = [
                (t, e)
                for t in range(len(s.triangles))
                for e in range(3)
                if s.endpoints((t, e)) == (a, b)
            ]
            if not candidates:
                raise SurfaceError(f"no edge from {a} to {b}")
            refs.append(min(candidates))
        return cls(s, tuple(refs))

    @classmethod
    def triangle_boundary(cls, s: TriSurface, t: int) -> "EmbeddedCircle":
        return cls(s, ((t, 0), (t, 1), (t, 2)))


def circles_vertex_disjoint(circles) -> bool:
    seen: set[int] = set()
    for c in circles:
        vs = set(c.vertices)
        if seen & vs:
            return False
        seen |= vs
    return True


# ---------------------------------------------------------------------------
# Records
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class CutRecord:
    """The two new boundary cycles after a cut, with their edge correspondence.

    ``left[i]`` and ``right[i]`` are the two copies of the i-th circle edge;
    re-gluing them pairwise restores the original surface exactly.
    """

    left: tuple[Ref, ...]
    right: tuple[Ref, ...]


@dataclass(frozen=True)
class BoundaryGluing:
    """Selects two boundary cycles (by index into boundary_cycles) and a
    cyclic offset for the orientation-reversing matching."""

    left: int
    right: int
    offset: int = 0


@dataclass(frozen=True)
class DoubledCircle:
    """A circle plus an inserted parallel collar.

    ``first`` is the original circle's position in the refined surface,
    ``second`` the parallel copy, ``collar_triangles`` the annulus between
    them; cutting along both circles always detaches that annulus.
    """

    surface: TriSurface
    first: EmbeddedCircle
    second: EmbeddedCircle
    collar_triangles: frozenset[int]


# ---------------------------------------------------------------------------
# Elementary constructions
# ---------------------------------------------------------------------------


def surface_from_data(vertex_count, triangles, gluing_pairs) -> TriSurface:
    glue = {}
    for r1, r2 in gluing_pairs:
        r1, r2 = tuple(r1), tuple(r2)
        glue[r1] = r2
        glue[r2] = r1
    surf, _ = _canonical_form([tuple(t) for t in triangles], glue)
    return surf.require_valid()


def empty_surface() -> TriSurface:
    return TriSurface(0, (), ())


def closed_surface_from_triangles(triangles) -> TriSurface:
    """Glue every directed edge to its unique reverse (fixture helper)."""
    triangles = [tuple(t) for t in triangles]
    where: dict[tuple[int, int], list[Ref]] = {}
    for t, tri in enumerate(triangles):
        for e in range(3):
            u, v = tri[e], tri[(e + 1) % 3]
            where.setdefault((u, v), []).append((t, e))
    glue = {}
    for (u, v), refs in where.items():
        if len(refs) != 1:
            raise SurfaceError(f"directed edge ({u},{v}) appears {len(refs)} times")
        rev = where.get((v, u))
        if not rev or len(rev) != 1:
            raise SurfaceError(f"directed edge ({u},{v}) has no unique reverse")
        glue[refs[0]] = rev[0]
    surf, _ = _canonical_form(triangles, glue)
    return surf.require_valid()


def octahedron() -> TriSurface:
    tris = [
        (0, 1, 2), (0, 2, 3), (0, 3, 4), (0, 4, 1),
        (5, 2, 1), (5, 3, 2), (5, 4, 3), (5, 1, 4),
    ]
    return closed_surface_from_triangles(tris)


def seven_vertex_torus() -> TriSurface:
    tris = []
    for i in range(7):
        tris.append((i % 7, (i + 1) % 7, (i + 3) % 7))
        tris.append((i % 7, (i + 3) % 7, (i + 2) % 7))
    return closed_surface_from_triangles(tris)


def fan_disk(k: int = 3) -> TriSurface:
    """Disk triangulated as a fan with boundary cycle of length k (k >= 3)."""
    if k < 3:
        raise ValueError("fan disk needs boundary length >= 3")
    c = k
    tris = [(c, i, (i + 1) % k) for i in range(k)]
    glue = {}
    for i in range(k):
        a = (i, 2)               # ((i+1)%k -> c)
        b = ((i + 1) % k, 0)     # (c -> (i+1)%k)
        glue[a] = b
        glue[b] = a
    surf, _ = _canonical_form(tris, glue)
    return surf.require_valid()


def _annulus_strip(a_row: list[int], b_row: list[int], tris: list, glue: dict) -> None:
    """Append one cylinder band between two vertex rows of equal length.

    Unglued edges afterwards: (t1_i, 2) = (a_{i+1} -> a_i) on the a side and
    (t2_i, 0) = (b_i -> b_{i+1}) on the b side.
    """
    k = len(a_row)
    base = len(tris)
    for i in range(k):
        j = (i + 1) % k
        tris.append([a_row[i], b_row[i], a_row[j]])  # t1_i = base + 2i
        tris.append([b_row[i], b_row[j], a_row[j]])  # t2_i = base + 2i + 1
    for i in range(k):
        j = (i + 1) % k
        t1 = base + 2 * i
        t2 = base + 2 * i + 1
        glue[(t1, 1)] = (t2, 2)      # (b_i -> a_j) ~ (a_j -> b_i)
        glue[(t2, 2)] = (t1, 1)
        t1n = base + 2 * j
        glue[(t2, 1)] = (t1n, 0)     # (b_j -> a_j) ~ (a_j -> b_j)
        glue[(t1n, 0)] = (t2, 1)


def annulus(k: int = 4) -> TriSurface:
    """Annulus with two boundary cycles of length k."""
    if k < 3:
        raise ValueError("annulus needs cycle length >= 3")
    tris: list = []
    glue: dict = {}
    _annulus_strip(list(range(k)), list(range(k, 2 * k)), tris, glue)
    surf, _ = _canonical_form(tris, glue)
    return surf.require_valid()


# ---------------------------------------------------------------------------
# Operations
# ---------------------------------------------------------------------------


def disjoint_union(a: TriSurface, b: TriSurface) -> TriSurface:
    bld = _Builder.from_surface(a)
    bld.add_surface(b)
    out, _ = bld.finish()
    return out


def mirror(s: TriSurface) -> TriSurface:
    """Orientation reversal: each triangle (a,b,c) becomes (a,c,b)."""
    tris = [(a, c, b) for (a, b, c) in s.triangles]
    emap = {0: 2, 1: 1, 2: 0}
    glue = {}
    for r1, r2 in s.gluing:
        a = (r1[0], emap[r1[1]])
        b = (r2[0], emap[r2[1]])
        glue[a] = b
        glue[b] = a
    out, _ = _canonical_form(tris, glue)
    return out


def subdivide(s: TriSurface) -> TriSurface:
    """Global midpoint (1-to-4) subdivision; classify is unchanged."""
    next_vertex = s.vertex_count
    mid: dict[Ref, int] = {}
    for t in range(len(s.triangles)):
        for e in range(3):
            ref = (t, e)
            if ref in mid:
                continue
            mid[ref] = next_vertex
            p = s.partner(ref)
            if p is not None:
                mid[p] = next_vertex
            next_vertex += 1
    tris: list = []
    glue: dict = {}
    for t, (va, vb, vc) in enumerate(s.triangles):
        m01, m12, m20 = mid[(t, 0)], mid[(t, 1)], mid[(t, 2)]
        tris.append((va, m01, m20))   # 4t
        tris.append((vb, m12, m01))   # 4t+1
        tris.append((vc, m20, m12))   # 4t+2
        tris.append((m01, m12, m20))  # 4t+3
        for e in range(3):
            a = (4 * t + 3, e)
            b = (4 * t + (e + 1) % 3, 1)
            glue[a] = b
            glue[b] = a

    def halves(ref: Ref) -> tuple[Ref, Ref]:
        t, e = ref
        return (4 * t + e, 0), (4 * t + (e + 1) % 3, 2)

    for r1, r2 in s.gluing:
        a1, a2 = halves(r1)
        b1, b2 = halves(r2)
        glue[a1] = b2
        glue[b2] = a1
        glue[a2] = b1
        glue[b1] = a2
    out, _ = _canonical_form(tris, glue)
    return out.require_valid()


def _cut_circle_raw(b: _Builder, refs: tuple[Ref, ...]) -> tuple[list[Ref], list[Ref]]:
    """Unglue a circle and split its vertices; triangle indices stay valid."""
    partners = [b.unglue(r) for r in refs]
    for r in refs:
        v = b.endpoints(r)[0]
        b.split_vertex_at_circle(v, keep_corner=r)
    return list(refs), partners


def cut(s: TriSurface, circle: EmbeddedCircle) -> tuple[TriSurface, CutRecord]:
    """Cut along a separating circle, producing two new boundary cycles.

    Raises NonSeparatingCut when the two copies stay in one component (use
    double_circle and cut along the resulting pair instead).
    """
    _check_circle_on(s, circle)
    b = _Builder.from_surface(s)
    left, right = _cut_circle_raw(b, circle.refs)
    out, refmap = b.finish()
    rec = CutRecord(left=refmap.refs(left), right=refmap.refs(right))
    comp = out.component_of_triangle
    if comp[rec.left[0][0]] == comp[rec.right[0][0]]:
        raise NonSeparatingCut(
            "circle does not separate; cut along it together with a parallel "
            "copy from double_circle"
        )
    return out.require_valid(), rec


def cut_nonseparating_ok(s: TriSurface, circle: EmbeddedCircle) -> tuple[TriSurface, CutRecord]:
    """Cut without the separation requirement."""
    _check_circle_on(s, circle)
    b = _Builder.from_surface(s)
    left, right = _cut_circle_raw(b, circle.refs)
    out, refmap = b.finish()
    return out.require_valid(), CutRecord(left=refmap.refs(left), right=refmap.refs(right))


def _check_circle_on(s: TriSurface, circle: EmbeddedCircle) -> None:
    if circle.surface is not s and circle.surface != s:
        raise SurfaceError("circle does not live on this surface")


def _order_cycle(endpoints, refs) -> list[Ref]:
    """Order refs into a chained cycle (next starts where previous ends)."""
    by_start = {}
    for r in refs:
        u, _ = endpoints(r)
        if u in by_start:
            raise SurfaceError("refs do not form a simple cycle")
        by_start[u] = r
    start = min(refs)
    out = [start]
    cur = start
    while True:
        nxt = by_start[endpoints(cur)[1]]
        if nxt == start:
            break
        out.append(nxt)
        cur = nxt
    if len(out) != len(refs):
        raise SurfaceError("refs split into several cycles")
    return out


def _glue_ref_pairs(b: _Builder, pairs) -> None:
    """Identify endpoint vertices and glue each (r1, r2) pair reversed."""
    ident = []
    for r1, r2 in pairs:
        u, v = b.endpoints(r1)
        x, y = b.endpoints(r2)
        ident.append((u, y))
        ident.append((v, x))
    b.identify_vertices(ident)
    for r1, r2 in pairs:
        b.glue_pair(r1, r2)


def _paste_cycles_raw(b: _Builder, left: list[Ref], right: list[Ref], offset: int) -> None:
    """Glue two equal-length boundary cycles, reversing orientation, with a
    cyclic offset; merges vertices as needed."""
    k = len(left)
    if k != len(right):
        raise LengthMismatch(
            f"cycle lengths {k} and {len(right)} differ; refine_boundary can fix this"
        )
    _glue_ref_pairs(b, [(left[i], right[(offset - i) % k]) for i in range(k)])


def paste(s: TriSurface, gluing: BoundaryGluing) -> TriSurface:
    """Glue two distinct boundary cycles of s along an orientation-reversing
    matching with the given cyclic offset."""
    cycles = s.boundary_cycles
    if not (0 <= gluing.left < len(cycles) and 0 <= gluing.right < len(cycles)):
        raise SurfaceError(f"boundary cycle index out of range (have {len(cycles)})")
    if gluing.left == gluing.right:
        raise OrientationClash("cannot glue a boundary circle to itself and stay oriented")
    left = cycles[gluing.left]
    right = cycles[gluing.right]
    if len(left) != len(right):
        raise LengthMismatch(
            f"cycles have lengths {len(left)} and {len(right)}; use refine_boundary"
        )
    lverts = {s.endpoints(r)[0] for r in left}
    rverts = {s.endpoints(r)[0] for r in right}
    if lverts & rverts:
        raise SurfaceError("boundary cycles share vertices; refine before pasting")
    b = _Builder.from_surface(s)
    _paste_cycles_raw(b, list(left), list(right), gluing.offset)
    out, _ = b.finish()
    out.require_valid()
    if out.euler_characteristic() != s.euler_characteristic():
        raise SurfaceError("internal error: paste changed the Euler characteristic")
    return out


def paste_cut(s: TriSurface, record: CutRecord, offset: int = 0) -> TriSurface:
    """Re-glue the two cycles produced by cut.  Offset 0 uses the exact edge
    correspondence, restoring the pre-cut surface up to canonical relabeling."""
    b = _Builder.from_surface(s)
    if offset == 0:
        _glue_ref_pairs(b, list(zip(record.left, record.right)))
    else:
        left = _order_cycle(b.endpoints, record.left)
        right = _order_cycle(b.endpoints, record.right)
        _paste_cycles_raw(b, left, right, offset)
    out, _ = b.finish()
    return out.require_valid()


def _split_boundary_edge_raw(b: _Builder, ref: Ref):
    """Split an unglued edge (and its triangle) in two.

    Returns (first piece, second piece, moved) where moved maps the two
    relocated sibling edges of the old triangle to their new refs.
    """
    if ref in b.glue:
        raise SurfaceError("can only split boundary edges")
    t, e = ref
    tri = b.triangles[t]
    u, v, x = tri[e], tri[(e + 1) % 3], tri[(e + 2) % 3]
    e1 = (t, (e + 1) % 3)
    e2 = (t, (e + 2) % 3)
    p1 = b.glue.pop(e1, None)
    self_glued = p1 == e2
    if p1 is not None:
        b.glue.pop(p1, None)
    p2 = None
    if not self_glued:
        p2 = b.glue.pop(e2, None)
        if p2 is not None:
            b.glue.pop(p2, None)
    w = b.new_vertex()
    b.triangles[t] = [u, w, x]
    t2 = len(b.triangles)
    b.triangles.append([w, v, x])
    b.glue[(t, 1)] = (t2, 2)
    b.glue[(t2, 2)] = (t, 1)
    moved = {e1: (t2, 1), e2: (t, 2)}
    if self_glued:
        b.glue[(t2, 1)] = (t, 2)
        b.glue[(t, 2)] = (t2, 1)
    else:
        if p1 is not None:
            b.glue[(t2, 1)] = p1
            b.glue[p1] = (t2, 1)
        if p2 is not None:
            b.glue[(t, 2)] = p2
            b.glue[p2] = (t, 2)
    return (t, 0), (t2, 0), moved


def _apply_moves(moved: dict, *ref_lists) -> None:
    for lst in ref_lists:
        for i, r in enumerate(lst):
            if r in moved:
                lst[i] = moved[r]


def _refine_cycle_raw(b: _Builder, refs: list[Ref], target: int, watched=()) -> list[Ref]:
    """Split the cycle's first edge until it has target edges.

    ``watched`` is a collection of other mutable ref lists to keep in sync
    when splitting relocates sibling edges.
    """
    if target < len(refs):
        raise SurfaceError(f"cannot shrink a cycle from {len(refs)} to {target} edges")
    while len(refs) < target:
        first, second, moved = _split_boundary_edge_raw(b, refs[0])
        rest = refs[1:]
        _apply_moves(moved, rest, *watched)
        refs[:] = [first, second] + rest
    return refs


def refine_boundary(s: TriSurface, cycle_index: int, target_length: int) -> TriSurface:
    """Subdivide boundary edges until the selected cycle has target_length edges."""
    cycles = s.boundary_cycles
    if not 0 <= cycle_index < len(cycles):
        raise SurfaceError(f"boundary cycle index out of range (have {len(cycles)})")
    b = _Builder.from_surface(s)
    _refine_cycle_raw(b, list(cycles[cycle_index]), target_length)
    out, _ = b.finish()
    return out.require_valid()


# -- collars and parallel circles ------------------------------------------------


def _insert_collar_raw(b: _Builder, refs: tuple[Ref, ...]):
    """Cut along refs and splice in a two-band annulus.

    Returns (seam refs, core refs, collar triangle indices); the seam sits at
    the original circle's position, the core is the parallel copy.
    """
    k = len(refs)
    left, right = _cut_circle_raw(b, tuple(refs))
    a_row = [b.new_vertex() for _ in range(k)]
    m_row = [b.new_vertex() for _ in range(k)]
    b_row = [b.new_vertex() for _ in range(k)]
    base1 = len(b.triangles)
    _annulus_strip(a_row, m_row, b.triangles, b.glue)
    base2 = len(b.triangles)
    _annulus_strip(m_row, b_row, b.triangles, b.glue)
    # the annulus between the seam and the core circle is band one only;
    # band two is a collar padding that stays with the far side
    collar = frozenset(range(base1, base2))
    a_refs = [(base1 + 2 * i, 2) for i in range(k)]       # (a_{i+1} -> a_i)
    core_b1 = [(base1 + 2 * i + 1, 0) for i in range(k)]  # (m_i -> m_{i+1})
    core_b2 = [(base2 + 2 * i, 2) for i in range(k)]      # (m_{i+1} -> m_i)
    b_refs = [(base2 + 2 * i + 1, 0) for i in range(k)]   # (b_i -> b_{i+1})
    for r1 in core_b1:
        u, v = b.endpoints(r1)
        match = next(r for r in core_b2 if b.endpoints(r) == (v, u))
        b.glue_pair(r1, match)
    left_cycle = _order_cycle(b.endpoints, left)
    right_cycle = _order_cycle(b.endpoints, right)
    a_cycle = _order_cycle(b.endpoints, a_refs)
    b_cycle = _order_cycle(b.endpoints, b_refs)
    _paste_cycles_raw(b, left_cycle, a_cycle, 0)
    _paste_cycles_raw(b, right_cycle, b_cycle, 0)
    return left, core_b1, collar


def double_circle(s: TriSurface, circle: EmbeddedCircle) -> DoubledCircle:
    """Insert a parallel copy of the circle inside an annular collar.

    Cutting the refined surface along both returned circles detaches the
    collar annulus, so the pair is a separating system even when the
    original circle is not separating."""
    _check_circle_on(s, circle)
    b = _Builder.from_surface(s)
    seam, core, collar = _insert_collar_raw(b, circle.refs)
    out, refmap = b.finish()
    out.require_valid()
    first = EmbeddedCircle(out, tuple(_order_cycle(out.endpoints, refmap.refs(seam))))
    second = EmbeddedCircle(out, tuple(_order_cycle(out.endpoints, refmap.refs(core))))
    collar_new = frozenset(refmap.tri_map[t] for t in collar)
    return DoubledCircle(surface=out, first=first, second=second, collar_triangles=collar_new)


# -- cut-and-paste moves -----------------------------------------------------


def sk_system_move(s: TriSurface, circles, pairing=None, offsets=None) -> TriSurface:
    """One cut-and-paste operation along a system of disjoint circles.

    The system must two-color the cut surface (each circle sees its two
    copies in opposite color classes); the regluing pairs the color-0 copy
    of circle i with the color-1 copy of circle pairing[i].  The identity
    pairing with zero offsets restores the surface up to canonical
    relabeling.
    """
    circles = list(circles)
    if not circles:
        return s
    for c in circles:
        _check_circle_on(s, c)
    if not circles_vertex_disjoint(circles):
        raise SurfaceError("system circles must be pairwise vertex-disjoint")
    k = len(circles)
    pairing = tuple(pairing) if pairing is not None else tuple(range(k))
    if sorted(pairing) != list(range(k)):
        raise SurfaceError("pairing must be a permutation of the circles")
    offsets = list(offsets) if offsets is not None else [0] * k

    b = _Builder.from_surface(s)
    copies = [_cut_circle_raw(b, c.refs) for c in circles]
    comp = b.components()

    color: dict[int, int] = {}
    adj: dict[int, list[int]] = {}
    edges = []
    for left, right in copies:
        ca, cb = comp[left[0][0]], comp[right[0][0]]
        edges.append((ca, cb))
        adj.setdefault(ca, []).append(cb)
        adj.setdefault(cb, []).append(ca)
    for root in sorted(adj):
        if root in color:
            continue
        color[root] = 0
        dq = deque([root])
        while dq:
            x = dq.popleft()
            for y in adj[x]:
                if y not in color:
                    color[y] = 1 - color[x]
                    dq.append(y)
                elif color[y] == color[x]:
                    raise NonSeparatingCut(
                        "circle system does not separate the surface; add "
                        "parallel copies via double_circle"
                    )

    side0: list[list[Ref]] = []
    side1: list[list[Ref]] = []
    for (left, right), (ca, cb) in zip(copies, edges):
        if color[ca] == 0:
            side0.append(left)
            side1.append(right)
        else:
            side0.append(right)
            side1.append(left)

    exact = [pairing[i] == i and offsets[i] == 0 for i in range(k)]
    # order the cycles that need generic pasting before any refinement
    cycles0 = {i: _order_cycle(b.endpoints, side0[i]) for i in range(k) if not exact[i]}
    cycles1 = {j: _order_cycle(b.endpoints, side1[j]) for j in range(k) if not exact[pairing.index(j)]}
    all_lists = list(cycles0.values()) + list(cycles1.values()) + [cp[0] for cp in copies] + [cp[1] for cp in copies]
    for i in range(k):
        if exact[i]:
            continue
        j = pairing[i]
        n = max(len(cycles0[i]), len(cycles1[j]))
        watched = [lst for lst in all_lists if lst is not cycles0[i]]
        _refine_cycle_raw(b, cycles0[i], n, watched)
        watched = [lst for lst in all_lists if lst is not cycles1[j]]
        _refine_cycle_raw(b, cycles1[j], n, watched)
    for i in range(k):
        if exact[i]:
            _glue_ref_pairs(b, list(zip(copies[i][0], copies[i][1])))
        else:
            _paste_cycles_raw(b, cycles0[i], cycles1[pairing[i]], offsets[i])

    out, _ = b.finish()
    out.require_valid()
    if out.euler_characteristic() != s.euler_characteristic():
        raise SurfaceError("internal error: move changed the Euler characteristic")
    return out


def sk_move(s: TriSurface, circle: EmbeddedCircle, offset: int = 0) -> TriSurface:
    """Cut along one separating circle and re-glue with a cyclic offset."""
    cut_surface, record = cut(s, circle)  # enforces the separating condition
    return paste_cut(cut_surface, record, offset)


# ---------------------------------------------------------------------------
# Standard generator library
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class LibrarySurface:
    """A standard surface together with named circles for move searches.

    ``seams``: one separating circle per handle (cutting splits off a
    genus-1, one-boundary-circle piece).  ``nulls``: disk-bounding triangle
    circles, pairwise disjoint and disjoint from the seams.
    """

    surface: TriSurface
    seams: tuple[EmbeddedCircle, ...]
    nulls: tuple[EmbeddedCircle, ...]


def _disjoint_site_triangles(s: TriSurface, count: int) -> list[int] | None:
    """Greedy pairwise vertex-disjoint interior triangles, or None if scarce."""
    chosen: list[int] = []
    blocked: set[int] = set()
    for t, tri in enumerate(s.triangles):
        if count == 0:
            break
        if len(set(tri)) != 3:
            continue
        if any(v in blocked for v in tri):
            continue
        if any(s.partner((t, e)) is None for e in range(3)):
            continue
        if not all(s.vertex_is_interior(v) for v in tri):
            continue
        chosen.append(t)
        blocked.update(tri)
        if len(chosen) == count:
            return chosen
    return chosen if len(chosen) >= count else None


@lru_cache(maxsize=None)
def _handle_piece() -> TriSurface:
    """Genus one, one boundary circle of length 3."""
    torus = paste(annulus(4), BoundaryGluing(0, 1, 0))
    torus = subdivide(torus)
    site = _disjoint_site_triangles(torus, 1)
    assert site, "no hole site on the subdivided torus"
    circle = EmbeddedCircle.triangle_boundary(torus, site[0])
    cut_surface, rec = cut(torus, circle)
    comp = cut_surface.component_of_triangle
    side_a = comp[rec.left[0][0]]
    counts = [sum(1 for c in comp if c == x) for x in range(cut_surface.component_count)]
    disk_comp = side_a if counts[side_a] == 1 else comp[rec.right[0][0]]
    b = _Builder.from_surface(cut_surface)
    b.drop_triangles({t for t, c in enumerate(comp) if c == disk_comp})
    out, _ = b.finish()
    out.require_valid()
    assert out.classify() == DiffeoClass.connected(1, 1)
    return out


@lru_cache(maxsize=None)
def standard_library(genus: int, boundary: int) -> LibrarySurface:
    """Connected oriented surface of the given type, with named circles."""
    if genus < 0 or boundary < 0:
        raise ValueError("genus and boundary must be nonnegative")
    sites_needed = genus + boundary
    base = subdivide(octahedron())
    while _disjoint_site_triangles(base, sites_needed + 2) is None:
        base = subdivide(base)
    sites = _disjoint_site_triangles(base, sites_needed) or []
    b = _Builder.from_surface(base)
    drop: set[int] = set()
    for t in sites:
        _cut_circle_raw(b, ((t, 0), (t, 1), (t, 2)))
        drop.add(t)
    if drop:
        b.drop_triangles(drop)
    boundary_refs = [
        (t, e)
        for t in range(len(b.triangles))
        for e in range(3)
        if (t, e) not in b.glue
    ]
    cycles: list[list[Ref]] = []
    unused = set(boundary_refs)
    while unused:
        start = min(unused)
        cyc = _trace_builder_boundary(b, start)
        for r in cyc:
            unused.discard(r)
        cycles.append(cyc)
    cycles.sort()
    assert len(cycles) == sites_needed, f"expected {sites_needed} holes, found {len(cycles)}"
    seam_refs: list[list[Ref]] = []
    piece = _handle_piece() if genus else None
    for h in range(genus):
        hole = cycles[boundary + h]
        _, toff = b.add_surface(piece)
        piece_cycle = [(t + toff, e) for (t, e) in piece.boundary_cycles[0]]
        _paste_cycles_raw(b, hole, piece_cycle, 0)
        seam_refs.append(hole)
    out, refmap = b.finish()
    out.require_valid()
    seams = tuple(
        EmbeddedCircle(out, tuple(_order_cycle(out.endpoints, refmap.refs(refs))))
        for refs in seam_refs
    )
    blocked = {v for c in seams for v in c.vertices}
    nulls: list[EmbeddedCircle] = []
    for t, tri in enumerate(out.triangles):
        if len(nulls) == 2:
            break
        if len(set(tri)) != 3 or any(v in blocked for v in tri):
            continue
        try:
            circle = EmbeddedCircle.triangle_boundary(out, t)
        except SurfaceError:
            continue
        nulls.append(circle)
        blocked.update(tri)
    expected = DiffeoClass.connected(genus, boundary)
    if out.classify() != expected:
        raise SurfaceError(
            f"library construction produced {out.classify()} instead of {expected}"
        )
    return LibrarySurface(surface=out, seams=seams, nulls=tuple(nulls))


def _trace_builder_boundary(b: _Builder, start: Ref) -> list[Ref]:
    out = [start]
    cur = start
    while True:
        t, e = cur
        corner = (t, (e + 1) % 3)
        while True:
            p = b.glue.get(corner)
            if p is None:
                nxt = corner
                break
            corner = (p[0], (p[1] + 1) % 3)
        if nxt == start:
            return out
        out.append(nxt)
        cur = nxt


def build_standard(genus: int, boundary: int) -> TriSurface:
    """Standard connected surface of the given genus and boundary-circle count."""
    return standard_library(genus, boundary).surface


@lru_cache(maxsize=None)
def library_for_class(cls: DiffeoClass) -> tuple[TriSurface, tuple[LibrarySurface, ...]]:
    """Disjoint union of library components, circles remapped to the union."""
    entries = [standard_library(g, bb) for g, bb in cls.components]
    b = _Builder()
    offs = []
    for ent in entries:
        _, toff = b.add_surface(ent.surface)
        offs.append(toff)
    out, refmap = b.finish()

    def remap_circle(idx: int, circ: EmbeddedCircle) -> EmbeddedCircle:
        toff = offs[idx]
        refs = tuple(refmap.ref((t + toff, e)) for (t, e) in circ.refs)
        return EmbeddedCircle(out, refs)

    remapped = tuple(
        LibrarySurface(
            surface=out,
            seams=tuple(remap_circle(i, c) for c in ent.seams),
            nulls=tuple(remap_circle(i, c) for c in ent.nulls),
        )
        for i, ent in enumerate(entries)
    )
    return out, remapped
