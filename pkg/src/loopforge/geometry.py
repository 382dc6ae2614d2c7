"""Orbits of transversal affine subspaces and the orbit realization of the loop.

A transversal subspace with slope C and offset r is the affine n-space
{(1, x, r + Cx)}; the ambient group acts by

    g(u, v, M) (1, x, y) = (1, u + Mx, v + M^delta y),

sending slope C to M^delta C M^-1.  When the slope orbit of Q_A is regular
(all |Gamma_0| slopes distinct), the loop is realized on the full orbit of
Q_A with X o Y = tau(Y), tau the unique translation-like element of Xi
mapping Q_A onto X.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import List, Optional, Tuple

from .errors import CapExceeded, LoopforgeError, NonUniqueTau, NotInOrbit
from .linalg import (
    SquareMatrix,
    Vector,
    format_vector,
    iter_vectors,
    vec_add,
    vec_key,
    vec_sub,
    zero_vector,
)
from .matgroup import Gamma, GammaElement
from .loops import Loop, GAMMA_CAP


class AffineTransversal:
    """Slope + normalized offset; the point set {(1, x, offset + slope x)}."""

    __slots__ = ("slope", "offset")

    def __init__(self, slope: SquareMatrix, offset: Vector):
        slope.inv()  # transversality requires an invertible slope
        self.slope = slope
        self.offset = tuple(offset)

    @classmethod
    def from_base(cls, slope: SquareMatrix, p: Vector, q: Vector) -> "AffineTransversal":
        """From the raw parameterization {(1, p + x, q + C x)}."""
        return cls(slope, vec_sub(q, slope.apply(p)))

    def key(self):
        return (self.slope.key(), vec_key(self.offset))

    def point(self, x: Vector) -> Tuple[Vector, Vector]:
        return (x, vec_add(self.offset, self.slope.apply(x)))

    def __eq__(self, other):
        if not isinstance(other, AffineTransversal):
            return NotImplemented
        return self.key() == other.key()

    def __hash__(self):
        return hash(self.key())

    def __repr__(self):
        return f"Q[{self.slope!r} @ {format_vector(self.offset)}]"


@dataclass(frozen=True)
class InfinityTrace:
    """Trace at infinity: the projective set K*(0, x, Cx)."""

    slope: SquareMatrix


def base_transversal(loop: Loop) -> AffineTransversal:
    return AffineTransversal(loop.spec.A, zero_vector(loop.field, loop.n))


def act_on_transversal(gamma: Gamma, g: GammaElement, q: AffineTransversal) -> AffineTransversal:
    """Image of q under g: slope M^delta C M^-1, offset v + M^delta r - slope' u."""
    m = gamma.matrix(g.mi)
    d = gamma.delta_matrix(g.mi)
    slope = d * q.slope * m.inv()
    offset = vec_sub(vec_add(g.v, d.apply(q.offset)), slope.apply(g.u))
    image = AffineTransversal(slope, offset)
    # Pointwise spot check: g maps sampled points of q onto the image.
    field, n = gamma.field, gamma.n
    samples = [zero_vector(field, n)] + [
        tuple(field.one() if j == i else field.zero() for j in range(n))
        for i in range(min(n, 2))
    ]
    for x in samples:
        px, py = q.point(x)
        ix = vec_add(g.u, m.apply(px))
        iy = vec_add(g.v, d.apply(py))
        _, want = image.point(ix)
        if vec_key(want) != vec_key(iy):
            raise LoopforgeError("transversal action failed its pointwise check")
    return image


def gamma0_orbit(loop: Loop) -> List[SquareMatrix]:
    """Deduplicated slopes {M^delta A M^-1 : M in Gamma_0}, closure order."""
    seen = {}
    for mi, m in enumerate(loop.closure.elements):
        slope = loop.gamma.delta_matrix(mi) * loop.spec.A * m.inv()
        seen.setdefault(slope.key(), slope)
    return list(seen.values())


def is_regular_orbit(loop: Loop) -> bool:
    return len(gamma0_orbit(loop)) == len(loop.closure)


@dataclass
class StabilizerReport:
    order: int
    equals_H: bool
    extra_example: Optional[GammaElement]


def stabilizer_of_QA(loop: Loop, cap: int = GAMMA_CAP) -> StabilizerReport:
    """Enumerate {g in Gamma : g Q_A = Q_A} and compare with H = {g(u, Au, I)}."""
    qa = base_transversal(loop)
    gamma = loop.gamma
    field, n = loop.field, loop.n
    a_mat = loop.spec.A
    order = 0
    equals_h = True
    extra = None
    h_size = field.size() ** n
    for g in gamma.enumerate(cap):
        if act_on_transversal(gamma, g, qa) == qa:
            order += 1
            in_h = g.mi == 0 and vec_key(g.v) == vec_key(a_mat.apply(g.u))
            if not in_h and extra is None:
                extra = g
    if order != h_size or extra is not None:
        equals_h = False
    return StabilizerReport(order, equals_h, extra)


def _tau_for(loop: Loop, x: AffineTransversal) -> GammaElement:
    """The unique xi = g(u, Bu, M) in Xi with xi Q_A = X."""
    slope_key = x.slope.key()
    hits = [
        mi
        for mi in range(len(loop.closure))
        if (loop.gamma.delta_matrix(mi) * loop.spec.A * loop.closure.elements[mi].inv()).key()
        == slope_key
    ]
    if not hits:
        raise NotInOrbit("slope is not on the orbit of Q_A")
    if len(hits) > 1:
        raise NonUniqueTau(f"{len(hits)} group elements share the slope")
    mi = hits[0]
    b_mat = loop.spec.B
    diff = b_mat - x.slope  # invertible: equals (B M - M^delta A) M^-1
    u = diff.inv().apply(x.offset)
    return GammaElement(u, b_mat.apply(u), mi)


def orbit_loop_mul(loop: Loop, x: AffineTransversal, y: AffineTransversal) -> AffineTransversal:
    """X o Y = tau(Y) where tau in Xi is the unique map with tau(Q_A) = X."""
    loop.require_eligible()
    tau = _tau_for(loop, x)
    qa = base_transversal(loop)
    if act_on_transversal(loop.gamma, tau, qa) != x:
        raise NotInOrbit("offset is not reachable from Q_A")
    return act_on_transversal(loop.gamma, tau, y)


def transversal_intersection_check(loop: Loop) -> bool:
    """Q_B meets every orbit slope subspace in exactly one point:
    det(B - C) != 0 for every orbit slope C."""
    for slope in gamma0_orbit(loop):
        if (loop.spec.B - slope).det().is_zero():
            return False
    return True


def orbit_report(loop: Loop) -> str:
    """Plain-text orbit listing: slopes (and trace representatives) in
    canonical order."""
    lines = ["orbit of Q_A under Gamma_0'"]
    slopes = gamma0_orbit(loop)
    lines.append(f"regular: {len(slopes) == len(loop.closure)}")
    lines.append(f"slopes: {len(slopes)} of |Gamma_0| = {len(loop.closure)}")
    for i, s in enumerate(slopes):
        lines.append(f"  slope[{i}] = {s!r}")
    lines.append(f"transversal intersections with Q_B: "
                 f"{'all simple' if transversal_intersection_check(loop) else 'DEGENERATE'}")
    return "\n".join(lines) + "\n"
