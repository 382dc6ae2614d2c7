"""The permutation group generated by right translations, finite scale.

Right translation by (u2, M2) sends (u1, M1) to (u1 + psi(M1, M2) u2, M1 M2),
so it permutes the carrier and maps each fiber P_M = {(u, M)} onto P_{M M2}.
Collapsing to the fiber action gives the epimorphism omega onto Gamma_0;
its kernel N is the fiber-preserving part and Sigma decomposes as
N x| Gamma_0.  The conjugates of the basic translation subgroup
S = {rho_(u, I)} generate an abelian subgroup D inside N whose elements add
a per-fiber constant vector.  The per-fiber operators

    Phi(M) = [B - M^delta A M^-1]^-1 M^delta (B - A)

drive S; dropping the constant right factor, the span of
[B - M^delta A M^-1]^-1 M^delta over M measures how many independent
directions the conjugates produce.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Dict, List, Optional, Tuple

from .errors import CapExceeded, LoopforgeError
from .linalg import SquareMatrix, rank_of_rows, vec_key, zero_vector
from .loops import Loop, LoopElement

SIGMA_CARRIER_CAP = 2048
PERM_CLOSURE_CAP = 1_000_000

Perm = Tuple[int, ...]


def _compose(p: Perm, q: Perm) -> Perm:
    """Apply q first, then p."""
    return tuple(p[i] for i in q)


def _invert(p: Perm) -> Perm:
    out = [0] * len(p)
    for i, j in enumerate(p):
        out[j] = i
    return tuple(out)


def mulclose_perms(gens: List[Perm], cap: int = PERM_CLOSURE_CAP) -> List[Perm]:
    """BFS closure of permutations under composition; identity first."""
    degree = len(gens[0]) if gens else 0
    ident = tuple(range(degree))
    elems = {ident: 0}
    order = [ident]
    frontier = []
    for g in gens:
        if g not in elems:
            elems[g] = len(order)
            order.append(g)
            frontier.append(g)
    while frontier:
        new = []
        for g in gens:
            for b in frontier:
                c = _compose(g, b)
                if c not in elems:
                    if len(order) >= cap:
                        raise CapExceeded(f"permutation closure exceeded {cap}")
                    elems[c] = len(order)
                    order.append(c)
                    new.append(c)
        frontier = new
    return order


class CarrierIndex:
    """Canonical carrier with point lookup and per-point fiber ids."""

    def __init__(self, loop: Loop, cap: int = SIGMA_CARRIER_CAP):
        self.loop = loop
        self.points = loop.carrier(cap)
        self.lookup = {(vec_key(x.u), x.mi): i for i, x in enumerate(self.points)}
        self.fiber = [x.mi for x in self.points]

    def index(self, x: LoopElement) -> int:
        return self.lookup[(vec_key(x.u), x.mi)]

    def right_translation(self, by: LoopElement) -> Perm:
        loop = self.loop
        return tuple(self.index(loop.mul(x, by)) for x in self.points)


def _fiber_action(carrier: CarrierIndex, p: Perm) -> Optional[List[int]]:
    """Induced map on fibers, or None if p tears a fiber apart."""
    nfibers = len(carrier.loop.closure)
    image = [-1] * nfibers
    for i, j in enumerate(p):
        src, dst = carrier.fiber[i], carrier.fiber[j]
        if image[src] == -1:
            image[src] = dst
        elif image[src] != dst:
            return None
    return image


@dataclass
class SigmaReport:
    carrier_size: int
    order_sigma: int
    order_n: int
    order_gamma0: int
    semidirect_ok: bool        # |Sigma| == |N| * |Gamma_0|
    omega_ok: bool             # fiber action well-defined and multiplicative
    n_is_normal: bool
    complement_trivial_meet: Optional[bool]


def sigma_group(loop: Loop, carrier_cap: int = SIGMA_CARRIER_CAP,
                closure_cap: int = PERM_CLOSURE_CAP) -> SigmaReport:
    """Close the right translations, split off the fiber-preserving kernel,
    and audit the semidirect structure."""
    loop.require_eligible()
    carrier = CarrierIndex(loop, carrier_cap)
    gens = []
    seen = set()
    for x in carrier.points:
        p = carrier.right_translation(x)
        if p not in seen:
            seen.add(p)
            gens.append(p)
    sigma = mulclose_perms(gens, closure_cap)
    nfibers = len(loop.closure)

    omega_ok = True
    kernel = []
    ident_fibers = list(range(nfibers))
    fiber_of: Dict[Perm, Tuple[int, ...]] = {}
    for p in sigma:
        img = _fiber_action(carrier, p)
        if img is None:
            omega_ok = False
            break
        fiber_of[p] = tuple(img)
        if img == ident_fibers:
            kernel.append(p)
    if omega_ok:
        # omega is multiplicative on the generators over the whole group.
        for g in gens:
            fg = fiber_of[g]
            for p in sigma:
                lhs = fiber_of[_compose(g, p)]
                rhs = tuple(fg[i] for i in fiber_of[p])
                if lhs != rhs:
                    omega_ok = False
                    break
            if not omega_ok:
                break

    kernel_set = set(kernel)
    n_is_normal = all(
        _compose(_compose(g, k), _invert(g)) in kernel_set
        for g in gens
        for k in kernel
    )
    semidirect_ok = len(sigma) == len(kernel) * nfibers

    complement_trivial = None
    if omega_ok:
        z = zero_vector(loop.field, loop.n)
        comp_gens = [
            carrier.right_translation(LoopElement(z, mi)) for mi in range(nfibers)
        ]
        comp = mulclose_perms(list(dict.fromkeys(comp_gens)), closure_cap)
        ident = tuple(range(len(carrier.points)))
        complement_trivial = all(
            p == ident or p not in kernel_set for p in comp
        )
    return SigmaReport(
        carrier_size=len(carrier.points),
        order_sigma=len(sigma),
        order_n=len(kernel),
        order_gamma0=nfibers,
        semidirect_ok=semidirect_ok,
        omega_ok=omega_ok,
        n_is_normal=n_is_normal,
        complement_trivial_meet=complement_trivial,
    )


@dataclass
class DeeReport:
    order_s: int
    order_dee: int
    abelian: bool
    inside_kernel: bool
    fiberwise_translation: bool


def dee_subgroup(loop: Loop, carrier_cap: int = SIGMA_CARRIER_CAP,
                 closure_cap: int = PERM_CLOSURE_CAP) -> DeeReport:
    """Generate D from all conjugates rho_(0,M)^-1 S rho_(0,M) and audit it."""
    loop.require_eligible()
    carrier = CarrierIndex(loop, carrier_cap)
    field, n = loop.field, loop.n
    z = zero_vector(field, n)
    s_gens = []
    for c in field.additive_generators():
        for i in range(n):
            e = tuple(c if j == i else field.zero() for j in range(n))
            s_gens.append(carrier.right_translation(LoopElement(e, 0)))
    s_group = mulclose_perms(list(dict.fromkeys(s_gens)), closure_cap)

    d_gens = []
    for mi in range(len(loop.closure)):
        rho = carrier.right_translation(LoopElement(z, mi))
        rho_inv = _invert(rho)
        for s in s_gens:
            d_gens.append(_compose(_compose(rho_inv, s), rho))
    d_gens = list(dict.fromkeys(d_gens))
    dee = mulclose_perms(d_gens, closure_cap)

    # Generators pairwise commuting already forces the group abelian; audit
    # the full group anyway while it is small.
    audit = dee if len(dee) <= 1024 else d_gens
    abelian = all(
        _compose(p, q) == _compose(q, p) for p in audit for q in audit
    )
    inside_kernel = all(
        _fiber_action(carrier, p) == list(range(len(loop.closure))) for p in dee
    )
    fiberwise = True
    for p in dee:
        per_fiber: Dict[int, tuple] = {}
        for i, j in enumerate(p):
            x, y = carrier.points[i], carrier.points[j]
            if x.mi != y.mi:
                fiberwise = False
                break
            shift = vec_key(tuple(b - a for a, b in zip(x.u, y.u)))
            if per_fiber.setdefault(x.mi, shift) != shift:
                fiberwise = False
                break
        if not fiberwise:
            break
    return DeeReport(
        order_s=len(s_group),
        order_dee=len(dee),
        abelian=abelian,
        inside_kernel=inside_kernel,
        fiberwise_translation=fiberwise,
    )


@dataclass
class PhiOperator:
    M: SquareMatrix
    matrix: SquareMatrix  # [B - M^delta A M^-1]^-1 M^delta (B - A)


def phi_operators(loop: Loop) -> List[PhiOperator]:
    loop.require_eligible()
    bma = loop.spec.B - loop.spec.A
    out = []
    for mi, m in enumerate(loop.closure.elements):
        op = loop._f_inv(mi) * loop.gamma.delta_matrix(mi) * bma
        out.append(PhiOperator(m, op))
    return out


def phi_family_rank(loop: Loop) -> int:
    """Rank of span{[B - M^delta A M^-1]^-1 M^delta : M in Gamma_0} inside
    the n^2-dimensional matrix space, by exact row reduction."""
    loop.require_eligible()
    if not loop.field.is_exact:
        raise LoopforgeError("phi_family_rank needs an exact field")
    rows = []
    for mi in range(len(loop.closure)):
        op = loop._f_inv(mi) * loop.gamma.delta_matrix(mi)
        rows.append([x for row in op.rows for x in row])
    return rank_of_rows(rows, loop.field)


def sigma_report_text(loop: Loop) -> str:
    s = sigma_group(loop)
    d = dee_subgroup(loop)
    r = phi_family_rank(loop) if loop.field.is_exact else None
    lines = [
        f"carrier: {s.carrier_size}",
        f"|Sigma| = {s.order_sigma}",
        f"|N| = {s.order_n}",
        f"|Gamma_0| = {s.order_gamma0}",
        f"|Sigma| == |N|*|Gamma_0|: {s.semidirect_ok}",
        f"omega homomorphism: {s.omega_ok}",
        f"N normal: {s.n_is_normal}",
        f"complement meets N trivially: {s.complement_trivial_meet}",
        f"|S| = {d.order_s}",
        f"|D| = {d.order_dee}",
        f"D abelian: {d.abelian}",
        f"D fiber-preserving: {d.inside_kernel and d.fiberwise_translation}",
    ]
    if r is not None:
        lines.append(f"phi family rank: {r}")
    return "\n".join(lines) + "\n"
