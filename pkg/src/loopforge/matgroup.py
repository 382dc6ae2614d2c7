"""Finite matrix groups by generator closure, their endomorphisms, and the
ambient block-matrix group of triples g(u, v, M).

Closures are breadth-first products of generators starting from the
identity, deduplicated on a canonical row-major key, so enumeration order
is reproducible.  g(u, v, M) stands for the (2n+1) x (2n+1) block matrix
with rows (1 | 0 | 0), (u | M | 0), (v | 0 | M^delta); it is stored as the
triple, never densely, and multiplies by

    g(u1, v1, M1) g(u2, v2, M2) = g(u1 + M1 u2, v1 + M1^delta v2, M1 M2).
"""

from __future__ import annotations

from dataclasses import dataclass, field as dc_field
from typing import List, Optional, Sequence, Tuple

from .errors import (
    CapExceeded,
    ClosureCapExceeded,
    ElementNotInClosure,
    InvalidEndomorphism,
    SingularMatrix,
)
from .fields import Field
from .linalg import (
    SquareMatrix,
    Vector,
    vec_add,
    vec_key,
    zero_vector,
    iter_vectors,
)

DEFAULT_CLOSURE_CAP = 100_000


@dataclass
class GroupDesc:
    """Generating data for a finite subgroup of GL(n, K)."""

    field: Field
    n: int
    generators: List[SquareMatrix]
    closure_cap: int = DEFAULT_CLOSURE_CAP


class GroupClosure:
    """BFS closure of a generator set: elements[0] is the identity."""

    def __init__(self, elements: List[SquareMatrix], gen_indices: List[int],
                 parents: List[Optional[Tuple[int, int]]]):
        self.elements = elements
        self.index = {m.key(): i for i, m in enumerate(elements)}
        self.gen_indices = gen_indices
        self._parents = parents  # parents[i] = (generator position, previous index)
        self._mul = {}
        self._inv = {}

    def __len__(self):
        return len(self.elements)

    def __iter__(self):
        return iter(self.elements)

    def index_of(self, m: SquareMatrix) -> int:
        try:
            return self.index[m.key()]
        except KeyError:
            raise ElementNotInClosure(f"{m!r} is not in the closure")

    def contains(self, m: SquareMatrix) -> bool:
        return m.key() in self.index

    def mul(self, i: int, j: int) -> int:
        key = (i, j)
        got = self._mul.get(key)
        if got is None:
            got = self.index_of(self.elements[i] * self.elements[j])
            self._mul[key] = got
        return got

    def inv(self, i: int) -> int:
        got = self._inv.get(i)
        if got is None:
            got = self.index_of(self.elements[i].inv())
            self._inv[i] = got
        return got


def close_group(desc: GroupDesc) -> GroupClosure:
    """Breadth-first closure of the generators under multiplication.

    Contains the identity; for a finite group the product closure already
    holds every inverse.  Raises ClosureCapExceeded past desc.closure_cap.
    """
    field, n = desc.field, desc.n
    for g in desc.generators:
        try:
            g.inv()
        except SingularMatrix:
            raise ValueError(f"generator {g!r} is not invertible")
    ident = SquareMatrix.identity(field, n)
    elements = [ident]
    parents: List[Optional[Tuple[int, int]]] = [None]
    seen = {ident.key()}
    gen_indices = []
    for gi, g in enumerate(desc.generators):
        k = g.key()
        if k not in seen:
            if len(elements) >= desc.closure_cap:
                raise ClosureCapExceeded(desc.closure_cap)
            seen.add(k)
            parents.append((gi, 0))
            elements.append(g)
        gen_indices.append(next(i for i, m in enumerate(elements) if m.key() == k))
    frontier = list(range(1, len(elements)))
    while frontier:
        new_frontier = []
        for gi, g in enumerate(desc.generators):
            for bi in frontier:
                c = g * elements[bi]
                k = c.key()
                if k in seen:
                    continue
                if len(elements) >= desc.closure_cap:
                    raise ClosureCapExceeded(desc.closure_cap)
                seen.add(k)
                parents.append((gi, bi))
                elements.append(c)
                new_frontier.append(len(elements) - 1)
        frontier = new_frontier
    return GroupClosure(elements, gen_indices, parents)


@dataclass
class EndoDesc:
    """An endomorphism of the closed group.

    kind 'identity' maps M to M, 'zero' maps every M to I, 'inner' maps M to
    C^-1 M C, and 'gen_images' assigns an image to each generator and
    extends multiplicatively (validated over the whole closure).
    """

    kind: str
    C: Optional[SquareMatrix] = None
    images: Optional[List[SquareMatrix]] = None

    def __post_init__(self):
        if self.kind not in ("identity", "zero", "inner", "gen_images"):
            raise ValueError(f"unknown endomorphism kind {self.kind!r}")
        if self.kind == "inner" and self.C is None:
            raise ValueError("inner endomorphism needs the conjugating matrix")
        if self.kind == "gen_images" and self.images is None:
            raise ValueError("gen_images endomorphism needs generator images")


class Endo:
    """EndoDesc bound to a closure, with the image table memoized."""

    def __init__(self, desc: EndoDesc, closure: GroupClosure, group: GroupDesc):
        self.desc = desc
        self.closure = closure
        self.table = self._build_table(desc, closure, group)

    def _build_table(self, desc, closure, group) -> List[int]:
        size = len(closure)
        if desc.kind == "identity":
            return list(range(size))
        if desc.kind == "zero":
            return [0] * size
        if desc.kind == "inner":
            c = desc.C
            try:
                cinv = c.inv()
            except SingularMatrix:
                raise InvalidEndomorphism("inner: conjugating matrix is singular")
            table = []
            for m in closure.elements:
                img = cinv * m * c
                if not closure.contains(img):
                    raise InvalidEndomorphism(
                        "inner: conjugation does not preserve the group"
                    )
                table.append(closure.index_of(img))
            return table
        # gen_images: propagate along the BFS derivation, then let
        # validate_endomorphism audit every pair.
        if len(desc.images) != len(group.generators):
            raise InvalidEndomorphism("gen_images: one image per generator required")
        gen_image_idx = []
        for img in desc.images:
            if not closure.contains(img):
                raise InvalidEndomorphism("gen_images: image outside the closure")
            gen_image_idx.append(closure.index_of(img))
        table: List[Optional[int]] = [None] * size
        table[0] = 0
        for i in range(1, size):
            gi, prev = closure._parents[i]
            assert table[prev] is not None  # BFS order guarantees the parent
            table[i] = closure.mul(gen_image_idx[gi], table[prev])
        return table  # type: ignore[return-value]

    def apply_index(self, i: int) -> int:
        return self.table[i]

    def apply(self, m: SquareMatrix) -> SquareMatrix:
        return self.closure.elements[self.table[self.closure.index_of(m)]]


def apply_endo(endo: Endo, m: SquareMatrix) -> SquareMatrix:
    """M^delta for a closure member; raises ElementNotInClosure otherwise."""
    return endo.apply(m)


@dataclass
class EndoValidation:
    ok: bool
    counterexample: Optional[Tuple[SquareMatrix, SquareMatrix]] = None


def validate_endomorphism(endo: Endo) -> EndoValidation:
    """Check delta(MN) = delta(M) delta(N) over every closure pair."""
    closure = endo.closure
    size = len(closure)
    for i in range(size):
        di = endo.table[i]
        for j in range(size):
            left = endo.table[closure.mul(i, j)]
            right = closure.mul(di, endo.table[j])
            if left != right:
                return EndoValidation(
                    False, (closure.elements[i], closure.elements[j])
                )
    return EndoValidation(True)


class GammaElement:
    """The block matrix g(u, v, M), stored as (u, v, closure index of M)."""

    __slots__ = ("u", "v", "mi")

    def __init__(self, u: Vector, v: Vector, mi: int):
        self.u = u
        self.v = v
        self.mi = mi

    def key(self):
        return (vec_key(self.u), vec_key(self.v), self.mi)

    def __eq__(self, other):
        if not isinstance(other, GammaElement):
            return NotImplemented
        return self.key() == other.key()

    def __hash__(self):
        return hash(self.key())

    def __repr__(self):
        return f"g({self.u}, {self.v}, M#{self.mi})"


class Gamma:
    """Ambient group of triples g(u, v, M) for one (closure, delta) pair."""

    def __init__(self, field: Field, n: int, closure: GroupClosure, endo: Endo):
        self.field = field
        self.n = n
        self.closure = closure
        self.endo = endo

    def matrix(self, mi: int) -> SquareMatrix:
        return self.closure.elements[mi]

    def delta_matrix(self, mi: int) -> SquareMatrix:
        return self.closure.elements[self.endo.table[mi]]

    def element(self, u, v, m) -> GammaElement:
        mi = m if isinstance(m, int) else self.closure.index_of(m)
        return GammaElement(tuple(u), tuple(v), mi)

    def identity(self) -> GammaElement:
        z = zero_vector(self.field, self.n)
        return GammaElement(z, z, 0)

    def mul(self, g1: GammaElement, g2: GammaElement) -> GammaElement:
        m1 = self.matrix(g1.mi)
        d1 = self.delta_matrix(g1.mi)
        return GammaElement(
            vec_add(g1.u, m1.apply(g2.u)),
            vec_add(g1.v, d1.apply(g2.v)),
            self.closure.mul(g1.mi, g2.mi),
        )

    def inv(self, g: GammaElement) -> GammaElement:
        mi_inv = self.closure.inv(g.mi)
        m_inv = self.matrix(mi_inv)
        d_inv = self.delta_matrix(mi_inv)
        return GammaElement(
            tuple(-x for x in m_inv.apply(g.u)),
            tuple(-x for x in d_inv.apply(g.v)),
            mi_inv,
        )

    def conjugate(self, g: GammaElement, by: GammaElement) -> GammaElement:
        return self.mul(self.mul(by, g), self.inv(by))

    def decompose(self, g: GammaElement, a: SquareMatrix):
        """Split g into a u=0 coset representative times an element of
        H = {g(w, Aw, I)}:

            g(x, y, M) = g(0, y - M^delta A M^-1 x, M) . g(M^-1 x, A M^-1 x, I)
        """
        m = self.matrix(g.mi)
        d = self.delta_matrix(g.mi)
        minv = m.inv()
        w = minv.apply(g.u)
        rep = GammaElement(
            zero_vector(self.field, self.n),
            tuple(y - z for y, z in zip(g.v, d.apply(a.apply(w)))),
            g.mi,
        )
        h = GammaElement(w, a.apply(w), 0)
        return rep, h

    def size(self):
        s = self.field.size()
        if s is None:
            return None
        return s ** (2 * self.n) * len(self.closure)

    def enumerate(self, cap: int = 1_000_000):
        """Every g(u, v, M) in canonical order (finite fields only)."""
        total = self.size()
        if total is None:
            raise CapExceeded("the ambient group is infinite")
        if total > cap:
            raise CapExceeded(f"|Gamma| = {total} exceeds cap {cap}")
        out = []
        for mi in range(len(self.closure)):
            for u in iter_vectors(self.field, self.n):
                for v in iter_vectors(self.field, self.n):
                    out.append(GammaElement(u, v, mi))
        return out

    def generators(self) -> List[GammaElement]:
        """A generating set: additive translations in both slots plus the
        closure generators embedded as g(0, 0, M)."""
        z = zero_vector(self.field, self.n)
        gens = []
        for c in self.field.additive_generators():
            for i in range(self.n):
                e = tuple(
                    c if j == i else self.field.zero() for j in range(self.n)
                )
                gens.append(GammaElement(e, z, 0))
                gens.append(GammaElement(z, e, 0))
        for gi in self.closure.gen_indices:
            gens.append(GammaElement(z, z, gi))
        return gens


def gamma_mul(ctx: Gamma, g1: GammaElement, g2: GammaElement) -> GammaElement:
    return ctx.mul(g1, g2)


def coset_decompose(ctx: Gamma, g: GammaElement, a: SquareMatrix):
    return ctx.decompose(g, a)
