"""Tangent algebra of the real loops: closed forms and limit extraction.

On R^n (+) m (m the matrix Lie algebra of Gamma_0, delta_tilde the induced
endomorphism of m) the bilinear bracket and trilinear associator are

    [(x1,m1),(x2,m2)] =
        ((B-A)^-1 {(m1^dt B - A m1) x2 + (A m2 - m2^dt B) x1}, [m1, m2])

    <(x1,m1),(x2,m2),(x3,m3)> =
        ((B-A)^-1 {(m3^dt A - A m3)(B-A)^-1 (A m1 - m1^dt B)
                   + (m3^dt A m1 - A m3 m1)} x2, 0)

and both satisfy the Akivis identity

    sum_cyc [[x,y],z] = <x,y,z>+<y,z,x>+<z,x,y>-<z,y,x>-<x,z,y>-<y,x,z>.

The same two operations are recovered numerically from the loop itself via

    [a1,a2] = lim (1/t^2) C12(t)/C21(t),   <a1,a2,a3> = lim (1/t^3) D1(t)/D2(t),

where C/D are loop products of (t x_i, exp(t m_i)) and "/" is the loop's
right division; the limits are Richardson-extrapolated over t = 2^-3..2^-10.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, List, Optional, Tuple

import numpy as np

from .errors import LoopforgeError, NumericEligibilityLost

VALIDATION_TOL = 1e-10
RICHARDSON_DIVERGENCE = 1e-4
_SINGULAR_FLOOR = 1e-12


class _NearSingular(Exception):
    pass


def expm(x: np.ndarray) -> np.ndarray:
    """Scaling-and-squaring with the Taylor series run to machine precision."""
    norm = np.linalg.norm(x)
    s = max(0, int(np.ceil(np.log2(norm))) + 1) if norm > 1e-300 else 0
    y = x / (2.0 ** s)
    n = x.shape[0]
    total = np.eye(n, dtype=x.dtype)
    term = np.eye(n, dtype=x.dtype)
    for k in range(1, 64):
        term = term @ y / k
        total = total + term
        if np.linalg.norm(term) <= 1e-16 * max(np.linalg.norm(total), 1.0):
            break
    for _ in range(s):
        total = total @ total
    return total


def logm_near_identity(g: np.ndarray) -> np.ndarray:
    """Series log for matrices close to I (all limit-curve group parts are)."""
    n = g.shape[0]
    x = g - np.eye(n, dtype=g.dtype)
    if np.linalg.norm(x) >= 0.9:
        raise LoopforgeError("matrix log requested far from the identity")
    total = np.zeros_like(x)
    p = np.eye(n, dtype=g.dtype)
    for k in range(1, 80):
        p = p @ x
        term = ((-1.0) ** (k + 1)) * p / k
        total = total + term
        if np.linalg.norm(term) <= 1e-17 * max(np.linalg.norm(total), 1e-30):
            break
    return total


@dataclass
class LoopDelta:
    """Group-level endomorphism for the analytic families.

    kinds: identity; diag_power (diag(m, 1/m) -> diag(m^c, m^-c));
    rotation_multiple (angle phi -> k phi); scalar_power (x -> x^k, odd k);
    complex_conj / complex_recip on the 2x2 real picture of C^*.
    """

    kind: str
    param: float = 0.0

    def __call__(self, m: np.ndarray) -> np.ndarray:
        if self.kind == "identity":
            return m
        if self.kind == "diag_power":
            c = self.param
            top = m[0, 0]
            if top <= 0:
                raise LoopforgeError("diag_power expects a positive diagonal")
            return np.diag([top ** c, top ** (-c)])
        if self.kind == "rotation_multiple":
            k = self.param
            phi = np.arctan2(m[0, 1], m[0, 0])
            kp = k * phi
            return np.array([[np.cos(kp), np.sin(kp)], [-np.sin(kp), np.cos(kp)]])
        if self.kind == "scalar_power":
            k = int(self.param)
            return np.array([[m[0, 0] ** k]])
        if self.kind == "complex_conj":
            j = np.diag([1.0, -1.0])
            return j @ m @ j
        if self.kind == "complex_recip":
            return m / np.linalg.det(m)
        raise LoopforgeError(f"unknown loop delta kind {self.kind!r}")

    def tangent_matrix(self, dim: int) -> np.ndarray:
        """delta_tilde on the standard basis used by the catalog families."""
        if self.kind == "identity":
            return np.eye(dim)
        if self.kind in ("diag_power", "rotation_multiple", "scalar_power"):
            return np.eye(dim) * self.param
        if self.kind == "complex_conj":
            return np.diag([1.0, -1.0])
        if self.kind == "complex_recip":
            return np.diag([-1.0, 1.0])
        raise LoopforgeError(f"unknown loop delta kind {self.kind!r}")


@dataclass
class AkivisElement:
    x: np.ndarray
    m: np.ndarray

    def norm(self) -> float:
        return float(np.sqrt(np.sum(self.x ** 2) + np.sum(self.m ** 2)))


def _as_elem(n: int, d: int, x, m) -> AkivisElement:
    return AkivisElement(np.asarray(x, dtype=float).reshape(n),
                         np.asarray(m, dtype=float).reshape(d))


class LieData:
    """Validated tangent data: A, B, a basis of m, delta_tilde, and the
    optional group-level delta needed by the limit pipeline."""

    def __init__(self, n: int, A, B, basis, delta_tilde,
                 loop_delta: Optional[LoopDelta] = None, tol: float = VALIDATION_TOL):
        self.n = n
        self.A = np.asarray(A, dtype=float)
        self.B = np.asarray(B, dtype=float)
        self.basis = [np.asarray(b, dtype=float) for b in basis]
        self.dim = len(self.basis)
        self.delta_tilde = np.asarray(delta_tilde, dtype=float)
        self.loop_delta = loop_delta
        if self.A.shape != (n, n) or self.B.shape != (n, n):
            raise LoopforgeError("A and B must be n x n")
        if self.delta_tilde.shape != (self.dim, self.dim):
            raise LoopforgeError("delta_tilde must be d x d on the basis")
        self._stack = np.stack([b.reshape(-1) for b in self.basis], axis=1)
        if np.linalg.matrix_rank(self._stack) != self.dim:
            raise LoopforgeError("basis of m is linearly dependent")
        beta = self.B - self.A
        if abs(np.linalg.det(beta)) < _SINGULAR_FLOOR:
            raise LoopforgeError("B - A must be invertible")
        self._beta_inv = np.linalg.inv(beta)
        # Structure constants; also validates closure of m under the bracket.
        self._struct = np.zeros((self.dim, self.dim, self.dim))
        for i in range(self.dim):
            for j in range(self.dim):
                br = self.basis[i] @ self.basis[j] - self.basis[j] @ self.basis[i]
                coords, res = self._project(br)
                if res > tol:
                    raise LoopforgeError(
                        f"m is not closed under the bracket (residual {res:.2e})"
                    )
                self._struct[i, j] = coords
        # delta_tilde must respect brackets.
        for i in range(self.dim):
            for j in range(self.dim):
                lhs = self.delta_tilde @ self._struct[i, j]
                rhs = self.bracket_coords(self.delta_tilde[:, i], self.delta_tilde[:, j])
                if np.linalg.norm(lhs - rhs) > tol:
                    raise LoopforgeError("delta_tilde does not respect the bracket")

    def _project(self, mat: np.ndarray) -> Tuple[np.ndarray, float]:
        coords, *_ = np.linalg.lstsq(self._stack, mat.reshape(-1), rcond=None)
        res = float(np.linalg.norm(self._stack @ coords - mat.reshape(-1)))
        return coords, res

    def matrix(self, coords) -> np.ndarray:
        """The element of m with the given basis coordinates."""
        coords = np.asarray(coords, dtype=float)
        return np.tensordot(coords, np.stack(self.basis), axes=1)

    def coords(self, mat: np.ndarray, tol: float = 1e-6) -> np.ndarray:
        coords, res = self._project(mat)
        if res > tol * max(1.0, np.linalg.norm(mat)):
            raise LoopforgeError(f"matrix is not in span(m) (residual {res:.2e})")
        return coords

    def dt(self, coords) -> np.ndarray:
        return self.delta_tilde @ np.asarray(coords, dtype=float)

    def dt_matrix(self, coords) -> np.ndarray:
        return self.matrix(self.dt(coords))

    def bracket_coords(self, c1, c2) -> np.ndarray:
        c1 = np.asarray(c1, dtype=float)
        c2 = np.asarray(c2, dtype=float)
        return np.einsum("i,j,ijk->k", c1, c2, self._struct)

    def element(self, x, m) -> AkivisElement:
        return _as_elem(self.n, self.dim, x, m)


def commutator(data: LieData, a1: AkivisElement, a2: AkivisElement) -> AkivisElement:
    m1, m2 = data.matrix(a1.m), data.matrix(a2.m)
    d1, d2 = data.dt_matrix(a1.m), data.dt_matrix(a2.m)
    a, b = data.A, data.B
    x = data._beta_inv @ ((d1 @ b - a @ m1) @ a2.x + (a @ m2 - d2 @ b) @ a1.x)
    return AkivisElement(x, data.bracket_coords(a1.m, a2.m))


def associator(data: LieData, a1: AkivisElement, a2: AkivisElement,
               a3: AkivisElement) -> AkivisElement:
    m1, m3 = data.matrix(a1.m), data.matrix(a3.m)
    d1, d3 = data.dt_matrix(a1.m), data.dt_matrix(a3.m)
    a, b = data.A, data.B
    core = (d3 @ a - a @ m3) @ data._beta_inv @ (a @ m1 - d1 @ b) + (d3 @ a @ m1 - a @ m3 @ m1)
    return AkivisElement(data._beta_inv @ core @ a2.x, np.zeros(data.dim))


def akivis_identity_lhs(data: LieData, a1, a2, a3) -> AkivisElement:
    t1 = commutator(data, commutator(data, a1, a2), a3)
    t2 = commutator(data, commutator(data, a3, a1), a2)
    t3 = commutator(data, commutator(data, a2, a3), a1)
    return AkivisElement(t1.x + t2.x + t3.x, t1.m + t2.m + t3.m)


def akivis_identity_rhs(data: LieData, a1, a2, a3) -> AkivisElement:
    pos = [(a1, a2, a3), (a2, a3, a1), (a3, a1, a2)]
    neg = [(a3, a2, a1), (a1, a3, a2), (a2, a1, a3)]
    x = np.zeros(data.n)
    m = np.zeros(data.dim)
    for trip in pos:
        t = associator(data, *trip)
        x, m = x + t.x, m + t.m
    for trip in neg:
        t = associator(data, *trip)
        x, m = x - t.x, m - t.m
    return AkivisElement(x, m)


def akivis_identity_closed_form(data: LieData, a1, a2, a3) -> AkivisElement:
    """One closed expression equal to both identity sides."""
    a, b = data.A, data.B
    bi = data._beta_inv

    def brace(ci, cj):
        mi, mj = data.matrix(ci), data.matrix(cj)
        di, dj = data.dt_matrix(ci), data.dt_matrix(cj)
        return ((di @ a - a @ mi) @ bi @ (a @ mj - dj @ b)
                + (a @ mj - dj @ a) @ bi @ (a @ mi - di @ b)
                + (di @ a @ mj - dj @ a @ mi - a @ mi @ mj + a @ mj @ mi))

    x = bi @ (brace(a2.m, a3.m) @ a1.x
              + brace(a3.m, a1.m) @ a2.x
              + brace(a1.m, a2.m) @ a3.x)
    return AkivisElement(x, np.zeros(data.dim))


@dataclass
class IdentityResiduals:
    lhs_rhs: float
    lhs_closed: float
    rhs_closed: float


def akivis_identity_check(data: LieData, a1, a2, a3) -> IdentityResiduals:
    lhs = akivis_identity_lhs(data, a1, a2, a3)
    rhs = akivis_identity_rhs(data, a1, a2, a3)
    closed = akivis_identity_closed_form(data, a1, a2, a3)

    def dist(p, q):
        return float(np.sqrt(np.sum((p.x - q.x) ** 2) + np.sum((p.m - q.m) ** 2)))

    return IdentityResiduals(dist(lhs, rhs), dist(lhs, closed), dist(rhs, closed))


# -- the numeric loop over R and the limit pipeline ------------------------

def _num_psi(data: LieData, g1: np.ndarray, g2: np.ndarray) -> np.ndarray:
    delta = data.loop_delta
    prod = g1 @ g2
    f_prod = data.B - delta(prod) @ data.A @ np.linalg.inv(prod)
    if abs(np.linalg.det(f_prod)) < _SINGULAR_FLOOR:
        raise _NearSingular
    f2 = data.B - delta(g2) @ data.A @ np.linalg.inv(g2)
    return np.linalg.solve(f_prod, delta(g1) @ f2)


def _num_mul(data: LieData, e1, e2):
    (x1, g1), (x2, g2) = e1, e2
    return (x1 + _num_psi(data, g1, g2) @ x2, g1 @ g2)


def _num_rdiv(data: LieData, eb, ea):
    (xb, gb), (xa, ga) = eb, ea
    gx = gb @ np.linalg.inv(ga)
    return (xb - _num_psi(data, gx, ga) @ xa, gx)


def _richardson(values: List[AkivisElement]) -> AkivisElement:
    """Two Richardson levels at grid ratio 2 for a leading O(t) error."""
    if len(values) < 3:
        raise LoopforgeError("need at least three grid points")

    def comb(seq, w_fine, w_coarse, denom):
        return [
            AkivisElement((w_fine * b.x + w_coarse * a.x) / denom,
                          (w_fine * b.m + w_coarse * a.m) / denom)
            for a, b in zip(seq, seq[1:])
        ]

    level1 = comb(values, 2.0, -1.0, 1.0)
    level2 = comb(level1, 4.0, -1.0, 3.0)
    last, prev = level2[-1], level2[-2]
    drift = float(np.sqrt(np.sum((last.x - prev.x) ** 2) + np.sum((last.m - prev.m) ** 2)))
    if drift > RICHARDSON_DIVERGENCE * max(1.0, last.norm()):
        raise LoopforgeError(f"extrapolation levels diverge ({drift:.2e})")
    return last


def _t_grid(t_min_exponent: int) -> List[float]:
    return [2.0 ** (-k) for k in range(3, t_min_exponent + 1)]


def _limit_values(data: LieData, f: Callable[[float], AkivisElement],
                  t_min_exponent: int) -> List[AkivisElement]:
    if data.loop_delta is None:
        raise LoopforgeError("limits need the group-level delta (loop_delta)")
    out = []
    for t in _t_grid(t_min_exponent):
        try:
            out.append(f(t))
        except _NearSingular:
            raise NumericEligibilityLost(t)
    return out


def _raw_commutator(data: LieData, a1, a2, t: float) -> AkivisElement:
    e1 = (t * a1.x, expm(t * data.matrix(a1.m)))
    e2 = (t * a2.x, expm(t * data.matrix(a2.m)))
    c12 = _num_mul(data, e1, e2)
    c21 = _num_mul(data, e2, e1)
    x, g = _num_rdiv(data, c12, c21)
    return AkivisElement(x / t ** 2, data.coords(logm_near_identity(g)) / t ** 2)


def _raw_associator(data: LieData, a1, a2, a3, t: float) -> AkivisElement:
    e1 = (t * a1.x, expm(t * data.matrix(a1.m)))
    e2 = (t * a2.x, expm(t * data.matrix(a2.m)))
    e3 = (t * a3.x, expm(t * data.matrix(a3.m)))
    d1 = _num_mul(data, _num_mul(data, e1, e2), e3)
    d2 = _num_mul(data, e1, _num_mul(data, e2, e3))
    x, g = _num_rdiv(data, d1, d2)
    return AkivisElement(x / t ** 3, data.coords(logm_near_identity(g)) / t ** 3)


def numeric_commutator_limit(data: LieData, a1: AkivisElement, a2: AkivisElement,
                             t_min_exponent: int = 10) -> AkivisElement:
    values = _limit_values(data, lambda t: _raw_commutator(data, a1, a2, t), t_min_exponent)
    return _richardson(values)


def numeric_associator_limit(data: LieData, a1: AkivisElement, a2: AkivisElement,
                             a3: AkivisElement, t_min_exponent: int = 10) -> AkivisElement:
    values = _limit_values(data, lambda t: _raw_associator(data, a1, a2, a3, t), t_min_exponent)
    return _richardson(values)


def convergence_rows(data: LieData, kind: str, elements, t_min_exponent: int = 10):
    """(t, raw estimate norm, error vs closed form) per grid point."""
    if kind == "commutator":
        closed = commutator(data, *elements)
        raw = lambda t: _raw_commutator(data, *elements, t)
    elif kind == "associator":
        closed = associator(data, *elements)
        raw = lambda t: _raw_associator(data, *elements, t)
    else:
        raise ValueError(f"unknown kind {kind!r}")
    rows = []
    for t in _t_grid(t_min_exponent):
        try:
            est = raw(t)
        except _NearSingular:
            raise NumericEligibilityLost(t)
        err = float(np.sqrt(np.sum((est.x - closed.x) ** 2) + np.sum((est.m - closed.m) ** 2)))
        rows.append((t, est.norm(), err))
    return rows


def convergence_csv(rows) -> str:
    lines = ["t,raw_estimate_norm,error_vs_closed_form"]
    for t, norm, err in rows:
        lines.append(f"{t!r},{norm!r},{err!r}")
    return "\n".join(lines) + "\n"


@dataclass
class Prop5Report:
    gamma_hom_residual: float
    kernel_bracket_residual: float
    kernel_associator_residual: float
    lie_criterion_holds: bool
    reduced_bracket_residual: Optional[float]


def prop5_checks(data: LieData, pairs: int = 100, seed: int = 0) -> Prop5Report:
    """The projection (x, m) -> m is a bracket homomorphism onto m; the
    kernel {(x, 0)} has trivial brackets and associators in slots 1 and 3;
    and when m^dt B = B m holds on all of m the bracket collapses to
    ((m1 x2 - m2 x1), [m1, m2])."""
    rng = np.random.Generator(np.random.Philox(seed))
    n, d = data.n, data.dim

    def rand_elem():
        return data.element(rng.normal(size=n), rng.normal(size=d))

    gamma_res = 0.0
    kernel_bracket = 0.0
    kernel_assoc = 0.0
    for _ in range(pairs):
        a1, a2 = rand_elem(), rand_elem()
        br = commutator(data, a1, a2)
        direct = data.matrix(a1.m) @ data.matrix(a2.m) - data.matrix(a2.m) @ data.matrix(a1.m)
        gamma_res = max(gamma_res, float(np.linalg.norm(data.matrix(br.m) - direct)))
        k1 = data.element(a1.x, np.zeros(d))
        k2 = data.element(a2.x, np.zeros(d))
        kernel_bracket = max(kernel_bracket, commutator(data, k1, k2).norm())
        kernel_assoc = max(kernel_assoc, associator(data, k1, a2, k2).norm())

    lie_criterion = all(
        np.linalg.norm(data.dt_matrix(np.eye(d)[i]) @ data.B - data.B @ data.basis[i])
        <= VALIDATION_TOL
        for i in range(d)
    )
    reduced = None
    if lie_criterion:
        reduced = 0.0
        for _ in range(pairs):
            a1, a2 = rand_elem(), rand_elem()
            br = commutator(data, a1, a2)
            want_x = data.matrix(a1.m) @ a2.x - data.matrix(a2.m) @ a1.x
            want_m = data.bracket_coords(a1.m, a2.m)
            reduced = max(reduced, float(np.sqrt(
                np.sum((br.x - want_x) ** 2) + np.sum((br.m - want_m) ** 2)
            )))
    return Prop5Report(gamma_res, kernel_bracket, kernel_assoc, lie_criterion, reduced)
