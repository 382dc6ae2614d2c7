"""Loop construction on K^n x Gamma_0 and its exhaustive verifiers.

Given invertible A, B, a finite matrix group Gamma_0 and an endomorphism
delta of it, the construction is *eligible* when no matrix

    S_M = M^-1 B^-1 M^delta A,   M in Gamma_0,

has eigenvalue 1.  Eligibility makes every map

    psi(M1, M2) = [B - (M1 M2)^delta A (M1 M2)^-1]^-1 [M1^delta (B - M2^delta A M2^-1)]

invertible, and

    (u1, M1) * (u2, M2) = (u1 + psi(M1, M2) u2, M1 M2)

a loop with identity (0, I).  The loop is a group exactly when
M^delta = B M B^-1 for every M (equivalently {M^-1 B^-1 M^delta} = {B^-1},
equivalently T_B = {g(u, Bu, I)} is normal in the ambient group).
"""

from __future__ import annotations

from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field as dc_field
from typing import Dict, List, Optional, Sequence, Tuple

from .errors import (
    CapExceeded,
    LoopforgeError,
    SingularMatrix,
    SingularPsi,
)
from .fields import Field, FieldElement
from .linalg import (
    SquareMatrix,
    Vector,
    det,
    has_eigenvalue_one,
    iter_vectors,
    kernel_basis,
    vec_add,
    vec_key,
    vec_sub,
    format_vector,
    zero_vector,
)
from .matgroup import (
    Endo,
    EndoDesc,
    Gamma,
    GammaElement,
    GroupDesc,
    close_group,
    validate_endomorphism,
)
from .util import spaced_indices, worker_count

AXIOM_CAP = 10_000
SHARP_CAP = 10_000
TABLE_CAP = 4096
GAMMA_CAP = 1_000_000


@dataclass
class LoopSpec:
    """The construction data (A, B, Gamma_0, delta) over one field."""

    field: Field
    n: int
    A: SquareMatrix
    B: SquareMatrix
    group: GroupDesc
    delta: EndoDesc


class LoopElement:
    """Carrier element (u, M); M is held as its closure index."""

    __slots__ = ("u", "mi")

    def __init__(self, u: Vector, mi: int):
        self.u = u
        self.mi = mi

    def __eq__(self, other):
        if not isinstance(other, LoopElement):
            return NotImplemented
        return self.mi == other.mi and self.u == other.u

    def __hash__(self):
        return hash((vec_key(self.u), self.mi))

    def __repr__(self):
        return f"({format_vector(self.u)}|{self.mi})"


@dataclass
class EligibilityReport:
    eligible: bool
    violations: List[Tuple[SquareMatrix, FieldElement]]
    is_group: bool
    tb_prime_full: bool
    witness_M0: Optional[SquareMatrix]


class Loop:
    """A validated construction: closure, endomorphism table, psi cache."""

    def __init__(self, spec: LoopSpec):
        if spec.A.n != spec.n or spec.B.n != spec.n:
            raise LoopforgeError("A and B must be n x n")
        try:
            spec.A.inv()
            self._Binv = spec.B.inv()
        except SingularMatrix:
            raise LoopforgeError("A and B must be invertible")
        self.spec = spec
        self.field = spec.field
        self.n = spec.n
        self.closure = close_group(spec.group)
        self.endo = Endo(spec.delta, self.closure, spec.group)
        check = validate_endomorphism(self.endo)
        if not check.ok:
            m1, m2 = check.counterexample
            raise LoopforgeError(
                f"delta is not an endomorphism: fails on ({m1!r}, {m2!r})"
            )
        self.gamma = Gamma(self.field, self.n, self.closure, self.endo)
        self._F: Dict[int, SquareMatrix] = {}
        self._Finv: Dict[int, SquareMatrix] = {}
        self._psi: Dict[Tuple[int, int], SquareMatrix] = {}
        self._psi_inv: Dict[Tuple[int, int], SquareMatrix] = {}
        self._carrier: Optional[List[LoopElement]] = None
        self._kernel = False  # False = not built yet; None = not applicable
        self.eligibility = self._check_eligibility()

    # -- construction checks -------------------------------------------

    def _mats_equal(self, a: SquareMatrix, b: SquareMatrix) -> bool:
        if self.field.is_exact:
            return a.key() == b.key()
        diff = a - b
        scale = max(
            (self.field.mag(x.val) for m in (a, b) for row in m.rows for x in row),
            default=0.0,
        )
        worst = max(self.field.mag(x.val) for row in diff.rows for x in row)
        return worst <= 1e-9 * max(scale, 1.0)

    def _check_eligibility(self) -> EligibilityReport:
        a, b = self.spec.A, self.spec.B
        binv = self._Binv
        ident = SquareMatrix.identity(self.field, self.n)
        violations = []
        is_group = True
        witness = None
        for mi, m in enumerate(self.closure.elements):
            minv = m.inv()
            d = self.gamma.delta_matrix(mi)
            s = minv * binv * d * a
            if has_eigenvalue_one(s):
                violations.append((m, det(s - ident)))
            if is_group and not self._mats_equal(d, b * m * binv):
                is_group = False
            if witness is None:
                t = minv * binv * d * b
                if not has_eigenvalue_one(t):
                    witness = m
        return EligibilityReport(
            eligible=not violations,
            violations=violations,
            is_group=is_group,
            tb_prime_full=witness is not None,
            witness_M0=witness,
        )

    def require_eligible(self):
        if not self.eligibility.eligible:
            raise LoopforgeError("the construction is not eligible (eigenvalue-1 matrix found)")

    # -- psi and the loop operations ------------------------------------

    def _f(self, mi: int) -> SquareMatrix:
        """F(M) = B - M^delta A M^-1."""
        got = self._F.get(mi)
        if got is None:
            m = self.closure.elements[mi]
            got = self.spec.B - self.gamma.delta_matrix(mi) * self.spec.A * m.inv()
            self._F[mi] = got
        return got

    def _f_inv(self, mi: int) -> SquareMatrix:
        got = self._Finv.get(mi)
        if got is None:
            try:
                got = self._f(mi).inv()
            except SingularMatrix:
                raise SingularPsi(f"B - M^delta A M^-1 singular at closure index {mi}")
            self._Finv[mi] = got
        return got

    def psi(self, mi1: int, mi2: int) -> SquareMatrix:
        key = (mi1, mi2)
        got = self._psi.get(key)
        if got is None:
            prod = self.closure.mul(mi1, mi2)
            got = self._f_inv(prod) * (self.gamma.delta_matrix(mi1) * self._f(mi2))
            self._psi[key] = got
        return got

    def psi_inv(self, mi1: int, mi2: int) -> SquareMatrix:
        key = (mi1, mi2)
        got = self._psi_inv.get(key)
        if got is None:
            try:
                got = self.psi(mi1, mi2).inv()
            except SingularMatrix:
                raise SingularPsi(f"psi{key} is singular")
            self._psi_inv[key] = got
        return got

    def psi_matrix(self, m1: SquareMatrix, m2: SquareMatrix) -> SquareMatrix:
        """psi for closure members given as matrices."""
        self.require_eligible()
        return self.psi(self.closure.index_of(m1), self.closure.index_of(m2))

    def element(self, u, m) -> LoopElement:
        mi = m if isinstance(m, int) else self.closure.index_of(m)
        return LoopElement(tuple(self.field.element(x) for x in u), mi)

    def matrix_of(self, x: LoopElement) -> SquareMatrix:
        return self.closure.elements[x.mi]

    def identity_element(self) -> LoopElement:
        return LoopElement(zero_vector(self.field, self.n), 0)

    def mul(self, x: LoopElement, y: LoopElement) -> LoopElement:
        return LoopElement(
            vec_add(x.u, self.psi(x.mi, y.mi).apply(y.u)),
            self.closure.mul(x.mi, y.mi),
        )

    def left_div(self, a: LoopElement, b: LoopElement) -> LoopElement:
        """The unique x with a * x = b."""
        mi_x = self.closure.mul(self.closure.inv(a.mi), b.mi)
        u = self.psi_inv(a.mi, mi_x).apply(vec_sub(b.u, a.u))
        return LoopElement(u, mi_x)

    def right_div(self, b: LoopElement, a: LoopElement) -> LoopElement:
        """The unique x with x * a = b."""
        mi_x = self.closure.mul(b.mi, self.closure.inv(a.mi))
        u = vec_sub(b.u, self.psi(mi_x, a.mi).apply(a.u))
        return LoopElement(u, mi_x)

    def section_sigma(self, v, m) -> GammaElement:
        """Image of the coset g(0, v, M) H under the sharply transitive
        section: g(M T^-1 v, B M T^-1 v, M) with T = B M - M^delta A."""
        self.require_eligible()
        mi = m if isinstance(m, int) else self.closure.index_of(m)
        mat = self.closure.elements[mi]
        t = self.spec.B * mat - self.gamma.delta_matrix(mi) * self.spec.A
        w = t.inv().apply(tuple(self.field.element(x) for x in v))
        u = mat.apply(w)
        return GammaElement(u, self.spec.B.apply(u), mi)

    # -- carrier ---------------------------------------------------------

    def carrier_size(self) -> Optional[int]:
        s = self.field.size()
        if s is None:
            return None
        return s ** self.n * len(self.closure)

    def carrier(self, cap: int = AXIOM_CAP) -> List[LoopElement]:
        """Canonical enumeration: closure index major, vector lexicographic."""
        size = self.carrier_size()
        if size is None:
            raise CapExceeded("the carrier is infinite")
        if size > cap:
            raise CapExceeded(f"carrier size {size} exceeds cap {cap}")
        if self._carrier is None or len(self._carrier) != size:
            self._carrier = [
                LoopElement(u, mi)
                for mi in range(len(self.closure))
                for u in iter_vectors(self.field, self.n)
            ]
        return self._carrier

    def fast_kernel(self):
        """Batched integer kernel for prime fields, or None."""
        if self._kernel is False:
            from .fastpath import PrimeKernel

            self._kernel = PrimeKernel.build(self)
        return self._kernel


def check_eligibility(spec: LoopSpec) -> EligibilityReport:
    return Loop(spec).eligibility


def loop_mul(loop: Loop, x: LoopElement, y: LoopElement) -> LoopElement:
    loop.require_eligible()
    return loop.mul(x, y)


def left_div(loop: Loop, a: LoopElement, b: LoopElement) -> LoopElement:
    loop.require_eligible()
    return loop.left_div(a, b)


def right_div(loop: Loop, b: LoopElement, a: LoopElement) -> LoopElement:
    loop.require_eligible()
    return loop.right_div(b, a)


# -- exhaustive verifiers -------------------------------------------------

@dataclass
class AxiomReport:
    passed: bool
    identity_ok: bool
    pairs_checked: int
    failures: List[str] = dc_field(default_factory=list)


def verify_loop_axioms(loop: Loop, cap: int = AXIOM_CAP,
                       force_generic: bool = False) -> AxiomReport:
    """Two-sided identity plus the four division identities over all pairs:
    a*(a\\b)=b, a\\(a*b)=b, (b/a)*a=b, (b*a)/a=b."""
    loop.require_eligible()
    carrier = loop.carrier(cap)
    kernel = None if force_generic else loop.fast_kernel()
    if kernel is not None:
        identity_ok = kernel.identity_ok()
        pairs, first = kernel.axiom_failures()
        failures = []
        if not identity_ok:
            failures.append("identity fails")
        if first is not None:
            failures.append(
                f"division identity fails at ({carrier[first[0]]!r}, {carrier[first[1]]!r})"
            )
        return AxiomReport(identity_ok and first is None, identity_ok, pairs, failures)
    e = loop.identity_element()
    failures: List[str] = []
    identity_ok = True
    for x in carrier:
        if loop.mul(e, x) != x or loop.mul(x, e) != x:
            identity_ok = False
            failures.append(f"identity fails at {x!r}")
            break
    pairs = 0
    for a in carrier:
        for b in carrier:
            pairs += 1
            if loop.mul(a, loop.left_div(a, b)) != b:
                failures.append(f"a*(a\\b) != b at ({a!r}, {b!r})")
            elif loop.left_div(a, loop.mul(a, b)) != b:
                failures.append(f"a\\(a*b) != b at ({a!r}, {b!r})")
            elif loop.mul(loop.right_div(b, a), a) != b:
                failures.append(f"(b/a)*a != b at ({a!r}, {b!r})")
            elif loop.right_div(loop.mul(b, a), a) != b:
                failures.append(f"(b*a)/a != b at ({a!r}, {b!r})")
            if len(failures) > 8:
                return AxiomReport(False, identity_ok, pairs, failures)
    return AxiomReport(identity_ok and not failures, identity_ok, pairs, failures)


@dataclass
class SharpTransitivityReport:
    passed: bool
    cosets: int
    closed_form_ok: bool
    counts_ok: bool
    failure: Optional[str] = None


def verify_sharp_transitivity(loop: Loop, cap: int = SHARP_CAP) -> SharpTransitivityReport:
    """Every ordered pair of cosets g(0, v, M) H is connected by exactly one
    element of Xi = {g(u, Bu, M)}; checked by brute-force counting over Xi
    and against the closed-form solution

        M = M2 M1^-1,  u = M2 (B M2 - M2^delta A)^-1 (v2 - M2^delta M1^-delta v1).
    """
    loop.require_eligible()
    size = loop.carrier_size()
    if size is None:
        raise CapExceeded("coset space is infinite")
    if size > cap:
        raise CapExceeded(f"{size} cosets exceed cap {cap}")
    field, n = loop.field, loop.n
    a_mat, b_mat = loop.spec.A, loop.spec.B
    gamma = loop.gamma
    reps = [
        (v, mi)
        for mi in range(len(loop.closure))
        for v in iter_vectors(field, n)
    ]
    rep_index = {(vec_key(v), mi): k for k, (v, mi) in enumerate(reps)}
    nreps = len(reps)

    # Brute force: row r counts which target cosets each xi reaches from reps[r].
    counts = [[0] * nreps for _ in range(nreps)]
    for mi in range(len(loop.closure)):
        for u in iter_vectors(field, n):
            xi = GammaElement(u, b_mat.apply(u), mi)
            for k, (v, mi1) in enumerate(reps):
                moved = gamma.mul(xi, GammaElement(zero_vector(field, n), v, mi1))
                rep, _ = gamma.decompose(moved, a_mat)
                counts[k][rep_index[(vec_key(rep.v), rep.mi)]] += 1
    counts_ok = all(c == 1 for row in counts for c in row)

    closed_form_ok = True
    failure = None
    for v1, mi1 in reps:
        d1_inv = loop.closure.elements[
            loop.endo.apply_index(loop.closure.inv(mi1))
        ]
        for v2, mi2 in reps:
            mi = loop.closure.mul(mi2, loop.closure.inv(mi1))
            m2 = loop.closure.elements[mi2]
            d2 = gamma.delta_matrix(mi2)
            t = b_mat * m2 - d2 * a_mat
            rhs = vec_sub(v2, d2.apply(d1_inv.apply(v1)))
            u = m2.apply(t.inv().apply(rhs))
            xi = GammaElement(u, b_mat.apply(u), mi)
            moved = gamma.mul(xi, GammaElement(zero_vector(field, n), v1, mi1))
            rep, _ = gamma.decompose(moved, a_mat)
            if vec_key(rep.v) != vec_key(v2) or rep.mi != mi2:
                closed_form_ok = False
                failure = f"closed form misses coset pair ({v1},{mi1}) -> ({v2},{mi2})"
                break
        if not closed_form_ok:
            break
    return SharpTransitivityReport(
        counts_ok and closed_form_ok, nreps, closed_form_ok, counts_ok, failure
    )


def psi_associativity(loop: Loop) -> bool:
    """Exact associativity decision at the matrix level.

    The product is associative iff psi(M1, M2) does not depend on M2 (so
    psi(M1, M2) = psi(M1, I) =: psi1(M1)) and psi1 is multiplicative; both
    conditions are decided over all group pairs, covering every carrier
    triple without enumerating the carrier.  This can disagree with the
    is_group flag: the criterion behind is_group forces the left
    translations to form a group inside the ambient matrix group, which is
    strictly stronger than associativity whenever the kernel of the coset
    action (the theta subgroup) is nontrivial.
    """
    loop.require_eligible()
    g = len(loop.closure)
    for i in range(g):
        base = loop.psi(i, 0).key()
        for j in range(1, g):
            if loop.psi(i, j).key() != base:
                return False
    for i in range(g):
        pi = loop.psi(i, 0)
        for j in range(g):
            prod = loop.psi(loop.closure.mul(i, j), 0)
            if prod.key() != (pi * loop.psi(j, 0)).key():
                return False
    return True


def _nonassoc_scan(loop: Loop, carrier: Sequence[LoopElement], lo: int, hi: int):
    for ai in range(lo, hi):
        a = carrier[ai]
        for bi, b in enumerate(carrier):
            ab = loop.mul(a, b)
            for ci, c in enumerate(carrier):
                if loop.mul(ab, c) != loop.mul(a, loop.mul(b, c)):
                    return (ai, bi, ci)
    return None


def _nonassoc_worker(args):
    loop, lo, hi = args
    return _nonassoc_scan(loop, loop.carrier(), lo, hi)


def find_nonassoc_witness(loop: Loop, cap: int = AXIOM_CAP, workers: Optional[int] = None):
    """First triple (a, b, c) in canonical order with (a*b)*c != a*(b*c),
    or None.  Partitionable across workers; the minimal triple is reduced
    deterministically."""
    loop.require_eligible()
    carrier = loop.carrier(cap)
    kernel = loop.fast_kernel()
    if kernel is not None:
        hit = kernel.first_nonassoc()
        return None if hit is None else tuple(carrier[i] for i in hit)
    if workers is None:
        workers = worker_count()
    size = len(carrier)
    if workers > 1 and size >= 64:
        bounds = [(size * k) // workers for k in range(workers + 1)]
        tasks = [(loop, bounds[k], bounds[k + 1]) for k in range(workers)]
        with ProcessPoolExecutor(max_workers=workers) as pool:
            hits = [h for h in pool.map(_nonassoc_worker, tasks) if h is not None]
        hit = min(hits) if hits else None
    else:
        hit = _nonassoc_scan(loop, carrier, 0, size)
    if hit is None:
        return None
    return tuple(carrier[i] for i in hit)


@dataclass
class InversePropertyReport:
    """Witnesses against the left/right inverse properties.

    lip/rip use the inverses x\\e and e/x respectively; lip_alt/rip_alt use
    the opposite assignment, since in a loop the two one-sided inverses may
    differ.  None means no violating pair exists.
    """

    lip: Optional[Tuple[LoopElement, LoopElement]]
    rip: Optional[Tuple[LoopElement, LoopElement]]
    lip_alt: Optional[Tuple[LoopElement, LoopElement]]
    rip_alt: Optional[Tuple[LoopElement, LoopElement]]


def inverse_property_witnesses(loop: Loop, cap: int = AXIOM_CAP,
                               force_generic: bool = False) -> InversePropertyReport:
    loop.require_eligible()
    carrier = loop.carrier(cap)
    kernel = None if force_generic else loop.fast_kernel()
    if kernel is not None:
        hits = kernel.inverse_property_first()
        decoded = [
            None if h is None else (carrier[h[0]], carrier[h[1]]) for h in hits
        ]
        return InversePropertyReport(*decoded)
    e = loop.identity_element()
    right_inv = [loop.left_div(x, e) for x in carrier]   # x * r = e
    left_inv = [loop.right_div(e, x) for x in carrier]   # l * x = e
    lip = rip = lip_alt = rip_alt = None
    for xi, x in enumerate(carrier):
        rx, lx = right_inv[xi], left_inv[xi]
        for y in carrier:
            if lip is None and loop.mul(rx, loop.mul(x, y)) != y:
                lip = (x, y)
            if rip is None and loop.mul(loop.mul(y, x), lx) != y:
                rip = (x, y)
            if lip_alt is None and loop.mul(lx, loop.mul(x, y)) != y:
                lip_alt = (x, y)
            if rip_alt is None and loop.mul(loop.mul(y, x), rx) != y:
                rip_alt = (x, y)
        if lip and rip and lip_alt and rip_alt:
            break
    return InversePropertyReport(lip, rip, lip_alt, rip_alt)


def theta_subspace(loop: Loop) -> List[Vector]:
    """Basis of the maximal subspace V with M^delta A v = A M v for all M.

    Stacking the generator blocks M_g^delta A - A M_g suffices: the
    condition is stable under products and inverses.  A deterministic
    sample of closure elements cross-checks that claim at runtime.
    """
    a_mat = loop.spec.A
    rows = []
    for gi in loop.closure.gen_indices:
        m = loop.closure.elements[gi]
        block = loop.gamma.delta_matrix(gi) * a_mat - a_mat * m
        rows.extend(list(r) for r in block.rows)
    basis = kernel_basis(rows, loop.field, width=loop.n)
    for mi in spaced_indices(len(loop.closure), 100):
        m = loop.closure.elements[mi]
        block = loop.gamma.delta_matrix(mi) * a_mat - a_mat * m
        for v in basis:
            if any(not x.is_zero() for x in block.apply(v)):
                raise LoopforgeError(
                    "theta cross-check failed: generator kernel not closure-stable"
                )
    return basis


def theta_elements(loop: Loop, cap: int = GAMMA_CAP) -> List[GammaElement]:
    """The subgroup {g(v, Av, I) : v in V}, enumerated over the span of the
    theta basis (finite fields)."""
    basis = theta_subspace(loop)
    field, n = loop.field, loop.n
    if field.size() is None:
        raise CapExceeded("cannot enumerate theta over an infinite field")
    if field.size() ** len(basis) > cap:
        raise CapExceeded("theta span too large to enumerate")
    a_mat = loop.spec.A
    out = []
    for coeffs in iter_vectors(field, len(basis)) if basis else [()]:
        v = zero_vector(field, n)
        for c, bv in zip(coeffs, basis):
            v = vec_add(v, tuple(c * x for x in bv))
        out.append(GammaElement(v, a_mat.apply(v), 0))
    return out


def _mulclose_gamma(gamma: Gamma, gens: List[GammaElement], cap: int):
    elems = {}
    for g in gens:
        elems.setdefault(g.key(), g)
    ident = gamma.identity()
    elems.setdefault(ident.key(), ident)
    frontier = list(elems.values())
    while frontier:
        new = []
        for g in gens:
            for b in frontier:
                c = gamma.mul(g, b)
                k = c.key()
                if k not in elems:
                    if len(elems) >= cap:
                        raise CapExceeded(f"gamma subgroup closure exceeded {cap}")
                    elems[k] = c
                    new.append(c)
        frontier = new
    return elems


@dataclass
class TranslationGroupReport:
    order_gamma: int
    order_tb: int
    order_tb_prime: int
    tb_prime_full: bool
    order_delta_prime: int
    delta_prime_is_gamma: bool
    order_theta: int
    order_theta_cap_delta_prime: int
    order_delta: int


def left_translation_group_report(loop: Loop, cap: int = GAMMA_CAP) -> TranslationGroupReport:
    """Orders of T_B' (normal closure of T_B), Delta' = T_B' Gamma_0',
    Theta and Delta = Delta' / (Theta n Delta'), by enumeration."""
    loop.require_eligible()
    field, n = loop.field, loop.n
    gamma = loop.gamma
    total = gamma.size()
    if total is None:
        raise CapExceeded("the ambient group is infinite")
    if total > cap:
        raise CapExceeded(f"|Gamma| = {total} exceeds cap {cap}")
    b_mat = loop.spec.B
    z = zero_vector(field, n)
    tb_gens = []
    for c in field.additive_generators():
        for i in range(n):
            e = tuple(c if j == i else field.zero() for j in range(n))
            tb_gens.append(GammaElement(e, b_mat.apply(e), 0))
    tb = _mulclose_gamma(gamma, tb_gens, cap)

    conj_by = []
    for g in gamma.generators():
        conj_by.append(g)
        conj_by.append(gamma.inv(g))
    gens = list(tb.values())
    current = _mulclose_gamma(gamma, gens, cap)
    while True:
        extra = []
        for g in conj_by:
            for x in current.values():
                y = gamma.conjugate(x, g)
                if y.key() not in current:
                    extra.append(y)
        if not extra:
            break
        gens = list(current.values()) + extra
        current = _mulclose_gamma(gamma, gens, cap)
    tb_prime = current
    tb_prime_full = len(tb_prime) == field.size() ** (2 * n) and all(
        g.mi == 0 for g in tb_prime.values()
    )

    delta_prime_keys = set()
    for t in tb_prime.values():
        for mi in range(len(loop.closure)):
            delta_prime_keys.add(gamma.mul(t, GammaElement(z, z, mi)).key())
    theta = theta_elements(loop, cap)
    theta_cap = sum(1 for th in theta if th.key() in delta_prime_keys)
    order_delta = len(delta_prime_keys) // theta_cap
    return TranslationGroupReport(
        order_gamma=total,
        order_tb=len(tb),
        order_tb_prime=len(tb_prime),
        tb_prime_full=tb_prime_full,
        order_delta_prime=len(delta_prime_keys),
        delta_prime_is_gamma=len(delta_prime_keys) == total,
        order_theta=len(theta),
        order_theta_cap_delta_prime=theta_cap,
        order_delta=order_delta,
    )


# -- Cayley table ---------------------------------------------------------

CAYLEY_HEADER = "# loopforge cayley v1"


@dataclass
class CayleyTable:
    labels: List[str]
    grid: List[List[int]]  # grid[i][j] = index of carrier[i] * carrier[j]

    def to_csv(self) -> str:
        lines = [CAYLEY_HEADER]
        lines.append(",".join([""] + self.labels))
        for lbl, row in zip(self.labels, self.grid):
            lines.append(",".join([lbl] + [self.labels[k] for k in row]))
        return "\n".join(lines) + "\n"


def element_label(loop: Loop, x: LoopElement) -> str:
    return f"{format_vector(x.u)}|{x.mi}"


def cayley_table(loop: Loop, cap: int = TABLE_CAP,
                 force_generic: bool = False) -> CayleyTable:
    """Full multiplication table in canonical order; deterministic."""
    loop.require_eligible()
    carrier = loop.carrier(cap)
    labels = [element_label(loop, x) for x in carrier]
    kernel = None if force_generic else loop.fast_kernel()
    if kernel is not None:
        grid = [row.tolist() for row in kernel.cayley_rows()]
        return CayleyTable(labels, grid)
    index = {(vec_key(x.u), x.mi): i for i, x in enumerate(carrier)}
    grid = []
    for a in carrier:
        row = []
        for b in carrier:
            c = loop.mul(a, b)
            row.append(index[(vec_key(c.u), c.mi)])
        grid.append(row)
    return CayleyTable(labels, grid)


def parse_cayley_csv(text: str) -> Tuple[List[str], List[List[str]]]:
    """Read the v1 CSV back as (labels, label cells); raises on bad header."""
    lines = [ln for ln in text.splitlines() if ln]
    if not lines or lines[0] != CAYLEY_HEADER:
        raise LoopforgeError("missing cayley v1 header")
    header = lines[1].split(",")
    labels = header[1:]
    cells = []
    for ln in lines[2:]:
        parts = ln.split(",")
        cells.append(parts[1:])
    return labels, cells


def latin_square_verdict(labels: List[str], cells: List[List[str]]) -> bool:
    """Independent checker: every label appears exactly once per row and
    column of the label grid."""
    want = sorted(labels)
    if len(cells) != len(labels):
        return False
    for row in cells:
        if sorted(row) != want:
            return False
    for j in range(len(labels)):
        if sorted(row[j] for row in cells) != want:
            return False
    return True
