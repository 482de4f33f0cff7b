"""First homology of surgery boundaries as finitely presented abelian groups.

The group presented by generators g_1..g_k and relation rows r_1..r_m is
Z^k / rowspace(R).  With U R V = D in Smith normal form, a row vector x over
the generators has SNF coordinates y = x V, and x is trivial exactly when
y lies in rowspace(D).  Canonical element forms are those coordinates,
dropped where the invariant factor is 1 and reduced modulo it otherwise.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property
from typing import Mapping, Sequence

from .links import FramedLink

__all__ = [
    "SmithForm",
    "smith_normal_form",
    "solve_left",
    "H1Presentation",
    "GroupElement",
    "GeneratorMap",
    "IsoVerdict",
    "boundary_h1",
    "reduce_element",
    "verify_iso",
    "format_group",
]

Matrix = list[list[int]]


@dataclass(frozen=True)
class SmithForm:
    U: tuple[tuple[int, ...], ...]
    D: tuple[tuple[int, ...], ...]
    V: tuple[tuple[int, ...], ...]
    V_inv: tuple[tuple[int, ...], ...]

    @property
    def diagonal(self) -> tuple[int, ...]:
        return tuple(self.D[i][i] for i in range(min(len(self.D), len(self.V))))

    @property
    def rank(self) -> int:
        return sum(1 for d in self.diagonal if d)


def _identity(n: int) -> Matrix:
    return [[int(i == j) for j in range(n)] for i in range(n)]


def _freeze(m: Matrix) -> tuple[tuple[int, ...], ...]:
    return tuple(tuple(row) for row in m)


def smith_normal_form(A: Sequence[Sequence[int]], ncols: int | None = None) -> SmithForm:
    """Return U, D, V with U A V = D, U and V unimodular, d_1 | d_2 | ...

    Pivot: smallest nonzero absolute value in the active block, first in
    row-major order on ties.  ``ncols`` is only needed for a 0-row matrix.
    """
    D = [list(map(int, row)) for row in A]
    m = len(D)
    n = len(D[0]) if m else (ncols or 0)
    # Vt holds V transposed so that column operations become row operations.
    U, Vt, Vi = _identity(m), _identity(n), _identity(n)
    active = [0]  # first row of D that can be nonzero outside the finished diagonal

    def swap_rows(i, j):
        D[i], D[j] = D[j], D[i]
        U[i], U[j] = U[j], U[i]

    def swap_cols(i, j):
        for row in D:
            row[i], row[j] = row[j], row[i]
        Vt[i], Vt[j] = Vt[j], Vt[i]
        Vi[i], Vi[j] = Vi[j], Vi[i]

    def add_row(dst, src, c):  # row dst += c * row src
        for M in (D, U):
            M[dst] = [a + c * b for a, b in zip(M[dst], M[src])]

    def add_col(dst, src, c):  # col dst += c * col src
        for i in range(active[0], m):
            row = D[i]
            row[dst] += c * row[src]
        Vt[dst] = [a + c * b for a, b in zip(Vt[dst], Vt[src])]
        Vi[src] = [a - c * b for a, b in zip(Vi[src], Vi[dst])]

    def pivot_at(t):
        best = None
        for i in range(t, m):
            for j in range(t, n):
                v = abs(D[i][j])
                if v and (best is None or v < best[0]):
                    best = (v, i, j)
                    if v == 1:
                        return best
        return best

    for t in range(min(m, n)):
        active[0] = t
        while True:
            best = pivot_at(t)
            if best is None:
                break
            _, i, j = best
            if i != t:
                swap_rows(t, i)
            if j != t:
                swap_cols(t, j)
            p = D[t][t]
            clean = True
            for i in range(t + 1, m):
                q = D[i][t] // p
                if q:
                    add_row(i, t, -q)
                if D[i][t]:
                    clean = False
            for j in range(t + 1, n):
                q = D[t][j] // p
                if q:
                    add_col(j, t, -q)
                if D[t][j]:
                    clean = False
            if not clean:
                continue
            if abs(p) == 1:
                break
            bad = next(
                (i for i in range(t + 1, m) for j in range(t + 1, n) if D[i][j] % p),
                None,
            )
            if bad is None:
                break
            add_row(t, bad, 1)
        if best is None:
            break
        if D[t][t] < 0:
            D[t] = [-v for v in D[t]]
            U[t] = [-v for v in U[t]]
    V = [list(col) for col in zip(*Vt)] if n else []
    return SmithForm(_freeze(U), _freeze(D), _freeze(V), _freeze(Vi))


def solve_left(B: Sequence[Sequence[int]], t: Sequence[int], ncols: int | None = None):
    """Integer row vector w with w B = t, or None if there is none."""
    snf = smith_normal_form(B, ncols=ncols if ncols is not None else len(t))
    m = len(B)
    tV = [sum(t[k] * snf.V[k][j] for k in range(len(t))) for j in range(len(t))]
    u = [0] * m
    diag = snf.diagonal
    for j, value in enumerate(tV):
        d = diag[j] if j < len(diag) else 0
        if d == 0:
            if value:
                return None
        else:
            if value % d:
                return None
            u[j] = value // d
    return [sum(u[i] * snf.U[i][k] for i in range(m)) for k in range(m)]


def _left_kernel(B: Sequence[Sequence[int]], ncols: int) -> list[list[int]]:
    snf = smith_normal_form(B, ncols=ncols)
    return [list(snf.U[i]) for i in range(snf.rank, len(B))]


class H1Presentation:
    """Z^generators modulo the row span of ``relations``."""

    def __init__(
        self,
        generators: Sequence[str],
        relations: Sequence[Sequence[int]],
        names: Mapping[str, str] | None = None,
    ):
        self.generators = tuple(generators)
        self.relations = tuple(tuple(int(v) for v in row) for row in relations)
        if any(len(row) != len(self.generators) for row in self.relations):
            raise ValueError("relation length does not match generator count")
        self.names = {g: (names or {}).get(g, g) for g in self.generators}
        self.snf = smith_normal_form(self.relations, ncols=len(self.generators))
        diag = list(self.snf.diagonal) + [0] * (len(self.generators) - len(self.snf.diagonal))
        self._coords = tuple(i for i, d in enumerate(diag) if d != 1)
        self.invariant_factors = tuple(diag[i] for i in self._coords)

    def __repr__(self):
        return f"H1Presentation({format_group(self.invariant_factors)}, gens={self.generators})"

    @property
    def order(self) -> int | None:
        """Group order, or None when the group is infinite."""
        if 0 in self.invariant_factors:
            return None
        out = 1
        for d in self.invariant_factors:
            out *= d
        return out

    @property
    def is_cyclic(self) -> bool:
        return len(self.invariant_factors) <= 1

    def index(self, generator: str) -> int:
        return self.generators.index(generator)

    def gen(self, generator: str) -> "GroupElement":
        vec = [0] * len(self.generators)
        vec[self.index(generator)] = 1
        return GroupElement(self, tuple(vec))

    def element(self, coeffs: Sequence[int] | Mapping[str, int]) -> "GroupElement":
        if isinstance(coeffs, Mapping):
            vec = [0] * len(self.generators)
            for g, c in coeffs.items():
                vec[self.index(g)] += c
            return GroupElement(self, tuple(vec))
        if len(coeffs) != len(self.generators):
            raise ValueError(
                f"element has {len(coeffs)} coefficients, presentation has "
                f"{len(self.generators)} generators"
            )
        return GroupElement(self, tuple(int(c) for c in coeffs))

    def zero(self) -> "GroupElement":
        return GroupElement(self, (0,) * len(self.generators))

    def canonical(self, coeffs: Sequence[int]) -> tuple[int, ...]:
        V = self.snf.V
        k = len(self.generators)
        out = []
        for pos, d in zip(self._coords, self.invariant_factors):
            y = sum(coeffs[r] * V[r][pos] for r in range(k))
            out.append(y % d if d else y)
        return tuple(out)

    def from_canonical(self, coords: Sequence[int]) -> tuple[int, ...]:
        """A generator-coefficient vector whose canonical form is ``coords``."""
        k = len(self.generators)
        vec = [0] * k
        for pos, y in zip(self._coords, coords):
            row = self.snf.V_inv[pos]
            for r in range(k):
                vec[r] += y * row[r]
        return tuple(vec)

    def cyclic_coefficient(self, element: "GroupElement", generator: str) -> int:
        """c in [0, N) with element = c * generator, in a cyclic group of order N."""
        if not self.is_cyclic or self.order is None:
            raise ValueError(f"group {format_group(self.invariant_factors)} is not finite cyclic")
        N = self.order
        if N == 1:
            return 0
        (yg,) = self.canonical(self.gen(generator).coeffs)
        (ye,) = element.canonical
        try:
            inv = pow(yg, -1, N)
        except ValueError:
            raise ValueError(f"{generator} does not generate Z/{N}") from None
        return ye * inv % N

    def describe(self) -> str:
        return format_group(self.invariant_factors)


def format_group(factors: Sequence[int]) -> str:
    if not factors:
        return "0"
    return " ⊕ ".join("Z" if d == 0 else f"Z/{d}" for d in factors)


@dataclass(frozen=True, eq=False)
class GroupElement:
    presentation: H1Presentation
    coeffs: tuple[int, ...]

    @cached_property
    def canonical(self) -> tuple[int, ...]:
        return self.presentation.canonical(self.coeffs)

    def _check(self, other: "GroupElement") -> None:
        if other.presentation is not self.presentation:
            raise ValueError("elements belong to different presentations")

    def __add__(self, other: "GroupElement") -> "GroupElement":
        self._check(other)
        return GroupElement(self.presentation, tuple(a + b for a, b in zip(self.coeffs, other.coeffs)))

    def __sub__(self, other: "GroupElement") -> "GroupElement":
        return self + (-other)

    def __neg__(self) -> "GroupElement":
        return GroupElement(self.presentation, tuple(-a for a in self.coeffs))

    def __mul__(self, k: int) -> "GroupElement":
        return GroupElement(self.presentation, tuple(k * a for a in self.coeffs))

    __rmul__ = __mul__

    def __eq__(self, other) -> bool:
        if not isinstance(other, GroupElement):
            return NotImplemented
        return other.presentation is self.presentation and other.canonical == self.canonical

    def __hash__(self) -> int:
        return hash((id(self.presentation), self.canonical))

    def is_zero(self) -> bool:
        return not any(self.canonical)

    def reduced(self) -> "GroupElement":
        """Representative rebuilt from the canonical coordinates."""
        return GroupElement(self.presentation, self.presentation.from_canonical(self.canonical))

    def coefficient(self, generator: str) -> int:
        return self.presentation.cyclic_coefficient(self, generator)

    def __repr__(self):
        return f"GroupElement({self.coeffs}, canonical={self.canonical})"


def boundary_h1(link: FramedLink, names: Mapping[str, str] | None = None) -> H1Presentation:
    """H_1 of the surgered 3-manifold: meridians modulo the linking-matrix rows."""
    return H1Presentation(link.labels, link.matrix, names)


def reduce_element(p: H1Presentation, e: GroupElement | Sequence[int]) -> GroupElement:
    if isinstance(e, GroupElement):
        if len(e.coeffs) != len(p.generators):
            raise ValueError("dimension mismatch")
        e = e.coeffs
    return p.element(e).reduced()


@dataclass(frozen=True)
class IsoVerdict:
    kind: str  # "iso" | "not-well-defined" | "not-bijective"
    witness: object = None
    detail: str = ""

    @property
    def ok(self) -> bool:
        return self.kind == "iso"

    def __bool__(self) -> bool:
        return self.ok


class GeneratorMap:
    """Homomorphism given by the image of every source generator."""

    def __init__(
        self,
        source: H1Presentation,
        target: H1Presentation,
        images: Sequence[GroupElement | Sequence[int] | Mapping[str, int]] | Mapping[str, object],
    ):
        self.source = source
        self.target = target
        if isinstance(images, Mapping):
            missing = set(source.generators) - set(images)
            if missing:
                raise ValueError(f"no image given for {sorted(missing)}")
            images = [images[g] for g in source.generators]
        if len(images) != len(source.generators):
            raise ValueError("need one image per source generator")
        self.images = tuple(
            img.coeffs if isinstance(img, GroupElement) else target.element(img).coeffs
            for img in images
        )

    def apply(self, e: GroupElement | Sequence[int]) -> GroupElement:
        coeffs = e.coeffs if isinstance(e, GroupElement) else tuple(e)
        if len(coeffs) != len(self.source.generators):
            raise ValueError("dimension mismatch")
        k = len(self.target.generators)
        out = [0] * k
        for c, img in zip(coeffs, self.images):
            if c:
                for r in range(k):
                    out[r] += c * img[r]
        return GroupElement(self.target, tuple(out))

    __call__ = apply

    def _canonical_matrix(self):
        src = self.source
        rows = []
        for pos in src._coords:
            rows.append(list(self.target.canonical(self.apply(src.snf.V_inv[pos]).coeffs)))
        lattice = [
            [d if i == j else 0 for j in range(len(self.target.invariant_factors))]
            for i, d in enumerate(self.target.invariant_factors)
            if d
        ]
        return rows, lattice

    def verify(self) -> IsoVerdict:
        for idx, rel in enumerate(self.source.relations):
            img = self.apply(rel)
            if not img.is_zero():
                return IsoVerdict(
                    "not-well-defined", idx, f"relation {idx} maps to {img.canonical}, not 0"
                )
        rows, lattice = self._canonical_matrix()
        r = len(self.target.invariant_factors)
        B = rows + lattice
        for j in range(r):
            e = [int(i == j) for i in range(r)]
            if solve_left(B, e, ncols=r) is None:
                witness = self.target.element(self.target.from_canonical(e))
                return IsoVerdict("not-bijective", witness, "map is not surjective")
        s = len(rows)
        for w in _left_kernel(B, r):
            x = w[:s]
            vec = [0] * len(self.source.generators)
            for c, pos in zip(x, self.source._coords):
                row = self.source.snf.V_inv[pos]
                for k in range(len(vec)):
                    vec[k] += c * row[k]
            elem = self.source.element(vec)
            if not elem.is_zero():
                return IsoVerdict("not-bijective", elem, "map is not injective")
        return IsoVerdict("iso")

    def inverse(self) -> "GeneratorMap":
        verdict = self.verify()
        if not verdict:
            raise ValueError(f"cannot invert: {verdict.kind} ({verdict.detail})")
        rows, lattice = self._canonical_matrix()
        r = len(self.target.invariant_factors)
        B = rows + lattice
        images = []
        for g in self.target.generators:
            w = solve_left(B, list(self.target.canonical(self.target.gen(g).coeffs)), ncols=r)
            images.append(self.source.from_canonical(w[: len(rows)]))
        return GeneratorMap(self.target, self.source, images)

    def compose(self, other: "GeneratorMap") -> "GeneratorMap":
        """self after other."""
        if other.target is not self.source:
            raise ValueError("maps do not compose")
        return GeneratorMap(other.source, self.target, [self.apply(img) for img in other.images])


def verify_iso(gmap: GeneratorMap) -> IsoVerdict:
    return gmap.verify()
