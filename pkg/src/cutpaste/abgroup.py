"""Exact linear algebra over the integers.

Everything in this module runs on arbitrary-precision Python ints; there is
no floating point and no modular shortcut anywhere.  It provides

* ``IntMatrix`` -- a small immutable integer matrix with exact determinants,
* ``smith_normal_form`` -- Smith normal form with unimodular transforms,
* ``IntegerLattice`` -- an incremental Hermite-style row basis used for
  membership, canonical residues and kernel computations,
* ``AbGroupPresentation`` -- a finitely presented abelian group (free group
  on named generators modulo integer relation vectors) with invariant
  factors and canonical element normal forms,
* ``AbHom`` -- homomorphisms between presentations with exact injectivity,
  surjectivity and exactness tests.

Matrix intermediate entries can blow up during elimination, which is why
fixed-width arithmetic is banned here: Python ints keep everything exact.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from functools import cached_property


def xgcd(a: int, b: int) -> tuple[int, int, int]:
    """Extended gcd: returns (g, x, y) with x*a + y*b == g and g >= 0.

    >>> xgcd(12, -18)
    (6, -1, -1)
    """
    old_r, r = a, b
    old_s, s = 1, 0
    old_t, t = 0, 1
    while r:
        q = old_r // r
        old_r, r = r, old_r - q * r
        old_s, s = s, old_s - q * s
        old_t, t = t, old_t - q * t
    if old_r < 0:
        old_r, old_s, old_t = -old_r, -old_s, -old_t
    return old_r, old_s, old_t


@dataclass(frozen=True)
class IntMatrix:
    """Immutable integer matrix, entries stored row-major."""

    rows: int
    cols: int
    entries: tuple[int, ...]

    def __post_init__(self):
        if self.rows < 0 or self.cols < 0:
            raise ValueError("negative dimensions")
        if len(self.entries) != self.rows * self.cols:
            raise ValueError(
                f"expected {self.rows * self.cols} entries, got {len(self.entries)}"
            )

    @classmethod
    def from_rows(cls, rows) -> "IntMatrix":
        rows = [list(r) for r in rows]
        m = len(rows)
        n = len(rows[0]) if rows else 0
        for r in rows:
            if len(r) != n:
                raise ValueError("ragged rows")
        return cls(m, n, tuple(int(x) for r in rows for x in r))

    @classmethod
    def identity(cls, n: int) -> "IntMatrix":
        return cls(n, n, tuple(1 if i == j else 0 for i in range(n) for j in range(n)))

    @classmethod
    def zeros(cls, m: int, n: int) -> "IntMatrix":
        return cls(m, n, (0,) * (m * n))

    def entry(self, i: int, j: int) -> int:
        return self.entries[i * self.cols + j]

    def row(self, i: int) -> tuple[int, ...]:
        return self.entries[i * self.cols : (i + 1) * self.cols]

    def column(self, j: int) -> tuple[int, ...]:
        return self.entries[j :: self.cols][: self.rows] if self.cols else ()

    def to_rows(self) -> list[list[int]]:
        return [list(self.row(i)) for i in range(self.rows)]

    def transpose(self) -> "IntMatrix":
        return IntMatrix(
            self.cols,
            self.rows,
            tuple(self.entry(i, j) for j in range(self.cols) for i in range(self.rows)),
        )

    def __mul__(self, other: "IntMatrix") -> "IntMatrix":
        if self.cols != other.rows:
            raise ValueError("dimension mismatch in matrix product")
        out = []
        orows = other.to_rows()
        for i in range(self.rows):
            srow = self.row(i)
            acc = [0] * other.cols
            for k, a in enumerate(srow):
                if a:
                    orow = orows[k]
                    for j in range(other.cols):
                        acc[j] += a * orow[j]
            out.extend(acc)
        return IntMatrix(self.rows, other.cols, tuple(out))

    def vec_times(self, v) -> tuple[int, ...]:
        """Row vector times matrix: v (len rows) -> v @ M (len cols)."""
        if len(v) != self.rows:
            raise ValueError("vector length mismatch")
        acc = [0] * self.cols
        for i, a in enumerate(v):
            if a:
                row = self.row(i)
                for j in range(self.cols):
                    acc[j] += a * row[j]
        return tuple(acc)

    def det(self) -> int:
        """Exact determinant by fraction-free (Bareiss) elimination."""
        if self.rows != self.cols:
            raise ValueError("determinant of non-square matrix")
        n = self.rows
        if n == 0:
            return 1
        m = self.to_rows()
        sign = 1
        prev = 1
        for k in range(n - 1):
            if m[k][k] == 0:
                for i in range(k + 1, n):
                    if m[i][k]:
                        m[k], m[i] = m[i], m[k]
                        sign = -sign
                        break
                else:
                    return 0
            for i in range(k + 1, n):
                for j in range(k + 1, n):
                    m[i][j] = (m[i][j] * m[k][k] - m[i][k] * m[k][j]) // prev
                m[i][k] = 0
            prev = m[k][k]
        return sign * m[n - 1][n - 1]

    def inverse_unimodular(self) -> "IntMatrix":
        """Inverse of a matrix with det +-1 (exact, via rational elimination)."""
        if self.rows != self.cols:
            raise ValueError("not square")
        n = self.rows
        aug = [
            [Fraction(self.entry(i, j)) for j in range(n)]
            + [Fraction(1 if i == j else 0) for j in range(n)]
            for i in range(n)
        ]
        for k in range(n):
            piv = next((i for i in range(k, n) if aug[i][k]), None)
            if piv is None:
                raise ValueError("singular matrix")
            aug[k], aug[piv] = aug[piv], aug[k]
            inv = 1 / aug[k][k]
            aug[k] = [x * inv for x in aug[k]]
            for i in range(n):
                if i != k and aug[i][k]:
                    f = aug[i][k]
                    aug[i] = [x - f * y for x, y in zip(aug[i], aug[k])]
        out = []
        for i in range(n):
            for j in range(n):
                x = aug[i][n + j]
                if x.denominator != 1:
                    raise ValueError("matrix is not unimodular")
                out.append(int(x))
        return IntMatrix(n, n, tuple(out))

    def to_json(self) -> dict:
        return {"rows": self.rows, "cols": self.cols, "entries": list(self.entries)}

    @classmethod
    def from_json(cls, data: dict) -> "IntMatrix":
        return cls(int(data["rows"]), int(data["cols"]), tuple(int(x) for x in data["entries"]))


@dataclass(frozen=True)
class SNFResult:
    """Smith normal form: U @ A @ V == diag(d) with U, V unimodular.

    Invariant factors ``d`` are nonnegative, each divides the next nonzero
    one, and trailing zeros account for the free rank of the cokernel.
    """

    d: tuple[int, ...]
    U: IntMatrix
    V: IntMatrix

    def diagonal_matrix(self) -> IntMatrix:
        m, n = self.U.rows, self.V.rows
        ents = [0] * (m * n)
        for k, dk in enumerate(self.d):
            ents[k * n + k] = dk
        return IntMatrix(m, n, tuple(ents))

    def verify(self, a: IntMatrix) -> None:
        """Assert every SNF invariant exactly; raises AssertionError otherwise."""
        assert self.U * a * self.V == self.diagonal_matrix(), "U*A*V is not diag(d)"
        assert abs(self.U.det()) == 1, "U not unimodular"
        assert abs(self.V.det()) == 1, "V not unimodular"
        assert all(dk >= 0 for dk in self.d), "negative invariant factor"
        nz = [dk for dk in self.d if dk]
        for a_, b_ in zip(nz, nz[1:]):
            assert b_ % a_ == 0, "divisibility chain broken"
        seen_zero = False
        for dk in self.d:
            if dk == 0:
                seen_zero = True
            elif seen_zero:
                raise AssertionError("zero invariant factor before a nonzero one")


def _find_pivot(m, t, rows, cols):
    best = None
    best_abs = None
    for i in range(t, rows):
        mi = m[i]
        for j in range(t, cols):
            a = mi[j]
            if a:
                a = -a if a < 0 else a
                if best_abs is None or a < best_abs:
                    best_abs = a
                    best = (i, j)
    return best


def smith_normal_form(a: IntMatrix) -> SNFResult:
    """Smith normal form with transforms, deterministic for a fixed input.

    The pivot at each stage is a nonzero entry of minimal absolute value in
    the remaining submatrix, ties broken by lowest (row, col) index.
    """
    rows, cols = a.rows, a.cols
    m = a.to_rows()
    u = IntMatrix.identity(rows).to_rows()
    v = IntMatrix.identity(cols).to_rows()

    def swap_rows(i, k):
        m[i], m[k] = m[k], m[i]
        u[i], u[k] = u[k], u[i]

    def swap_cols(j, k):
        for r in m:
            r[j], r[k] = r[k], r[j]
        for r in v:
            r[j], r[k] = r[k], r[j]

    def row_addmul(i, k, q):
        mi, mk = m[i], m[k]
        for j in range(cols):
            mi[j] += q * mk[j]
        ui, uk = u[i], u[k]
        for j in range(rows):
            ui[j] += q * uk[j]

    def col_addmul(j, k, q):
        for r in m:
            r[j] += q * r[k]
        for r in v:
            r[j] += q * r[k]

    def negate_row(i):
        m[i] = [-x for x in m[i]]
        u[i] = [-x for x in u[i]]

    t = 0
    limit = min(rows, cols)
    while t < limit:
        piv = _find_pivot(m, t, rows, cols)
        if piv is None:
            break
        i0, j0 = piv
        if i0 != t:
            swap_rows(i0, t)
        if j0 != t:
            swap_cols(j0, t)
        while True:
            if m[t][t] < 0:
                negate_row(t)
            p = m[t][t]
            restart = False
            for i in range(t + 1, rows):
                if m[i][t]:
                    q, r = divmod(m[i][t], p)
                    row_addmul(i, t, -q)
                    if r:
                        swap_rows(i, t)
                        restart = True
                        break
            if restart:
                continue
            for j in range(t + 1, cols):
                if m[t][j]:
                    q, r = divmod(m[t][j], p)
                    col_addmul(j, t, -q)
                    if r:
                        swap_cols(j, t)
                        restart = True
                        break
            if restart:
                continue
            offender = None
            for i in range(t + 1, rows):
                mi = m[i]
                for j in range(t + 1, cols):
                    if mi[j] % p:
                        offender = i
                        break
                if offender is not None:
                    break
            if offender is None:
                break
            row_addmul(t, offender, 1)
        t += 1

    d = tuple(m[k][k] for k in range(limit))
    return SNFResult(d=d, U=IntMatrix.from_rows(u) if rows else IntMatrix(0, 0, ()), V=IntMatrix.from_rows(v) if cols else IntMatrix(0, 0, ()))


# ---------------------------------------------------------------------------
# Sparse integer row lattices (Hermite-style echelon bases)
# ---------------------------------------------------------------------------


def _submul(v: dict, row: dict, q: int) -> None:
    # v -= q * row, dropping zeros
    for c, x in row.items():
        nv = v.get(c, 0) - q * x
        if nv:
            v[c] = nv
        else:
            v.pop(c, None)


def to_sparse(vec) -> dict:
    return {i: int(x) for i, x in enumerate(vec) if x}


class IntegerLattice:
    """Subgroup of Z^width maintained as an echelon row basis.

    Rows are sparse dicts; each basis row is keyed by its pivot column and
    has a positive pivot entry.  ``add`` inserts a vector (gcd-combining
    with existing pivots where needed), ``reduce`` returns the canonical
    residue of a vector modulo the lattice (entries at pivot columns lie in
    [0, pivot)), which makes coset equality a plain dict comparison.
    """

    def __init__(self, width: int):
        self.width = width
        self.rows: dict[int, dict] = {}

    def add(self, vec) -> bool:
        """Insert a vector; returns True if the lattice grew."""
        v = dict(vec) if isinstance(vec, dict) else to_sparse(vec)
        v = {c: x for c, x in v.items() if x}
        while v:
            j = min(v)
            if j >= self.width or j < 0:
                raise ValueError("vector outside ambient space")
            row = self.rows.get(j)
            if row is None:
                if v[j] < 0:
                    v = {c: -x for c, x in v.items()}
                self.rows[j] = v
                return True
            p = row[j]
            b = v[j]
            if b % p == 0:
                _submul(v, row, b // p)
            else:
                g, x, y = xgcd(p, b)
                keys = set(row) | set(v)
                new_row = {}
                for c in keys:
                    val = x * row.get(c, 0) + y * v.get(c, 0)
                    if val:
                        new_row[c] = val
                new_v = {}
                pg, bg = p // g, b // g
                for c in keys:
                    val = pg * v.get(c, 0) - bg * row.get(c, 0)
                    if val:
                        new_v[c] = val
                self.rows[j] = new_row
                v = new_v
        return False

    def reduce(self, vec) -> dict:
        """Canonical residue of vec modulo the lattice (sparse dict)."""
        v = dict(vec) if isinstance(vec, dict) else to_sparse(vec)
        v = {c: x for c, x in v.items() if x}
        for j in sorted(self.rows):
            x = v.get(j)
            if x:
                row = self.rows[j]
                q = x // row[j]
                if q:
                    _submul(v, row, q)
        return v

    def contains(self, vec) -> bool:
        return not self.reduce(vec)

    @property
    def rank(self) -> int:
        return len(self.rows)

    def pivots(self) -> list[tuple[int, int]]:
        """Sorted (column, pivot value) pairs."""
        return [(j, self.rows[j][j]) for j in sorted(self.rows)]

    def normalize(self) -> None:
        """Fully reduce rows against each other (entries above pivots into [0, p))."""
        pivot_cols = sorted(self.rows)
        for j0 in pivot_cols:
            row = self.rows[j0]
            for j in pivot_cols:
                if j <= j0:
                    continue
                x = row.get(j)
                if x:
                    other = self.rows[j]
                    q = x // other[j]
                    if q:
                        _submul(row, other, q)

    def basis_rows(self) -> list[dict]:
        return [dict(self.rows[j]) for j in sorted(self.rows)]

    def copy(self) -> "IntegerLattice":
        out = IntegerLattice(self.width)
        out.rows = {j: dict(r) for j, r in self.rows.items()}
        return out


def kernel_into_quotient(rows: list[dict], m: int, width: int, target: IntegerLattice) -> list[dict]:
    """Generators of {x in Z^m : sum x_i rows_i lies in the target lattice}.

    Works by echelon-reducing the stacked, identity-augmented system; rows
    whose lattice part dies carry the kernel combination in their tail.
    """
    aug = IntegerLattice(width + m)
    for r in target.basis_rows():
        aug.add(r)
    for i, r in enumerate(rows):
        v = dict(r)
        v[width + i] = v.get(width + i, 0) + 1
        aug.add(v)
    out = []
    for j in sorted(aug.rows):
        if j >= width:
            out.append({c - width: x for c, x in aug.rows[j].items()})
    return out


# ---------------------------------------------------------------------------
# Finitely presented abelian groups
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class NormalForm:
    """Canonical coordinates of a group element in the diagonalized basis.

    ``torsion[i]`` is reduced modulo ``moduli[i]`` (each modulus > 1, in
    divisibility order); ``free`` carries the unreduced free coordinates.
    Two vectors represent the same element iff their normal forms are equal.
    """

    torsion: tuple[int, ...]
    moduli: tuple[int, ...]
    free: tuple[int, ...]

    def is_zero(self) -> bool:
        return not any(self.torsion) and not any(self.free)


class _Analysis:
    """Cached diagonalization of a presentation's relation lattice."""

    def __init__(self, n: int, relations):
        self.n = n
        lat = IntegerLattice(n)
        for r in relations:
            lat.add(r)
        lat.normalize()
        self.lattice = lat
        unit_cols = {j for j, p in lat.pivots() if p == 1}
        surviving = [j for j in range(n) if j not in unit_cols]
        self.surviving = surviving
        self.surv_index = {j: k for k, j in enumerate(surviving)}
        small_rows = []
        for j, p in lat.pivots():
            if p != 1:
                row = lat.rows[j]
                small_rows.append([row.get(c, 0) for c in surviving])
        n2 = len(surviving)
        if small_rows:
            m2 = IntMatrix.from_rows(small_rows)
            snf = smith_normal_form(m2)
            self.small_d = snf.d
            self.small_v = snf.V
        else:
            self.small_d = ()
            self.small_v = None
        self.free_rank = n - lat.rank
        self.torsion = tuple(dk for dk in self.small_d if dk > 1)
        # positions in the diagonal basis, in order
        self._positions = []
        for k in range(n2):
            dk = self.small_d[k] if k < len(self.small_d) else 0
            self._positions.append(dk)

    def normal_form(self, vec) -> NormalForm:
        w = self.lattice.reduce(vec)
        u = [w.get(j, 0) for j in self.surviving]
        if self.small_v is not None:
            u = list(self.small_v.vec_times(u))
        torsion = []
        moduli = []
        free = []
        for k, x in enumerate(u):
            dk = self._positions[k]
            if dk == 0:
                free.append(x)
            elif dk > 1:
                torsion.append(x % dk)
                moduli.append(dk)
        return NormalForm(torsion=tuple(torsion), moduli=tuple(moduli), free=tuple(free))


@dataclass(frozen=True)
class AbGroupPresentation:
    """Free abelian group on named generators modulo integer relation rows."""

    generators: tuple[str, ...]
    relations: tuple[tuple[int, ...], ...]

    def __post_init__(self):
        if len(set(self.generators)) != len(self.generators):
            raise ValueError("generator labels must be pairwise distinct")
        n = len(self.generators)
        for r in self.relations:
            if len(r) != n:
                raise ValueError("relation length does not match generator count")

    @classmethod
    def make(cls, generators, relations) -> "AbGroupPresentation":
        return cls(
            tuple(str(g) for g in generators),
            tuple(tuple(int(x) for x in r) for r in relations),
        )

    @classmethod
    def free(cls, generators) -> "AbGroupPresentation":
        return cls.make(generators, [])

    @cached_property
    def _analysis(self) -> _Analysis:
        return _Analysis(len(self.generators), self.relations)

    @cached_property
    def generator_index(self) -> dict[str, int]:
        return {g: i for i, g in enumerate(self.generators)}

    def generator_vector(self, label: str) -> tuple[int, ...]:
        vec = [0] * len(self.generators)
        vec[self.generator_index[label]] = 1
        return tuple(vec)

    def quotient_invariants(self) -> tuple[int, tuple[int, ...]]:
        """Isomorphism type as (free rank, invariant factors > 1)."""
        a = self._analysis
        return a.free_rank, a.torsion

    def element_normal_form(self, vec) -> NormalForm:
        if len(vec) != len(self.generators):
            raise ValueError("vector length does not match generator count")
        return self._analysis.normal_form(vec)

    def is_relation(self, vec) -> bool:
        """True iff vec lies in the relation lattice (represents zero)."""
        if len(vec) != len(self.generators):
            raise ValueError("vector length does not match generator count")
        return self._analysis.lattice.contains(vec)

    def relation_lattice(self) -> IntegerLattice:
        return self._analysis.lattice.copy()

    def describe(self) -> str:
        """Human-readable isomorphism type, e.g. 'Z^2' or 'Z + Z/6'."""
        rank, torsion = self.quotient_invariants()
        parts = []
        if rank == 1:
            parts.append("Z")
        elif rank > 1:
            parts.append(f"Z^{rank}")
        parts.extend(f"Z/{d}" for d in torsion)
        return " + ".join(parts) if parts else "0"

    def to_json(self) -> dict:
        return {
            "generators": list(self.generators),
            "relations": [list(r) for r in self.relations],
        }

    @classmethod
    def from_json(cls, data: dict) -> "AbGroupPresentation":
        return cls.make(data["generators"], data["relations"])


@dataclass(frozen=True)
class AbHom:
    """Homomorphism between presented groups, given on generators.

    ``matrix`` has one row per source generator; row i is the image of
    source generator i written in target generator coordinates.  The
    constructor rejects matrices that do not send every source relation
    into the target relation lattice (ill-defined maps).
    """

    source: AbGroupPresentation
    target: AbGroupPresentation
    matrix: IntMatrix

    def __post_init__(self):
        if self.matrix.rows != len(self.source.generators):
            raise ValueError("matrix rows must match source generator count")
        if self.matrix.cols != len(self.target.generators):
            raise ValueError("matrix cols must match target generator count")
        for rel in self.source.relations:
            img = self.matrix.vec_times(rel)
            if not self.target.is_relation(img):
                raise ValueError("map is not well-defined: a source relation escapes the target lattice")

    @classmethod
    def on_generators(cls, source, target, image_of) -> "AbHom":
        """Build from a mapping generator-label -> sparse {target label: coeff}."""
        rows = []
        for g in source.generators:
            vec = [0] * len(target.generators)
            for lbl, coeff in image_of(g).items():
                vec[target.generator_index[lbl]] += coeff
            rows.append(vec)
        if rows:
            matrix = IntMatrix.from_rows(rows)
        else:
            matrix = IntMatrix(0, len(target.generators), ())
        return cls(source, target, matrix)

    def apply(self, vec) -> tuple[int, ...]:
        return self.matrix.vec_times(vec)

    def kernel_lattice_rows(self) -> list[dict]:
        """Generators of the full preimage of the target relation lattice."""
        rows = [to_sparse(self.matrix.row(i)) for i in range(self.matrix.rows)]
        return kernel_into_quotient(
            rows,
            len(self.source.generators),
            len(self.target.generators),
            self.target._analysis.lattice,
        )

    def is_injective(self) -> bool:
        src_lat = self.source._analysis.lattice
        return all(src_lat.contains(k) for k in self.kernel_lattice_rows())

    def is_surjective(self) -> bool:
        lat = self.target.relation_lattice()
        for i in range(self.matrix.rows):
            lat.add(to_sparse(self.matrix.row(i)))
        pivs = lat.pivots()
        return len(pivs) == len(self.target.generators) and all(p == 1 for _, p in pivs)

    def is_zero(self) -> bool:
        return all(self.target.is_relation(self.matrix.row(i)) for i in range(self.matrix.rows))

    def compose(self, first: "AbHom") -> "AbHom":
        """self after first (first: A->B, self: B->C)."""
        if first.target is not self.source and first.target != self.source:
            raise ValueError("maps are not composable")
        return AbHom(first.source, self.target, first.matrix * self.matrix)


def check_exact_at(f: AbHom, g: AbHom) -> bool:
    """Exactness at the middle of  source(f) -> target(f)=source(g) -> target(g).

    Compares image-of-f + middle relations against kernel-of-g + middle
    relations by mutual lattice membership.
    """
    if f.target != g.source:
        raise ValueError("target of f must equal source of g")
    mid = f.target
    image_rows = [to_sparse(f.matrix.row(i)) for i in range(f.matrix.rows)]
    kernel_rows = g.kernel_lattice_rows()

    im_lat = mid.relation_lattice()
    for r in image_rows:
        im_lat.add(dict(r))
    ker_lat = mid.relation_lattice()
    for r in kernel_rows:
        ker_lat.add(dict(r))

    if not all(im_lat.contains(k) for k in kernel_rows):
        return False
    return all(ker_lat.contains(r) for r in image_rows)
