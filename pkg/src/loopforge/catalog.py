"""Parameterized constructors for the known eligible families.

Exact families (3.1a, 3.1b, 3.1c, 3.2, 3.5i, 3.6, 3.9a) produce a LoopSpec
over a finite field or the rationals, validate their parameter predicate
first, and then confirm eligibility by full enumeration of the closure.
Numeric families (N3.7, N3.8, N3.9b, N3.9c) produce LieData for the tangent
module; N3.3, N3.7 and N3.8 additionally support seeded random eligibility
sampling over their (infinite) groups.  Family ids are opaque catalog codes.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Dict, List, Optional

import numpy as np

from .akivis import LieData, LoopDelta
from .errors import EligibilityFailed, InvalidParams
from .fields import Field, PrimeField, QuadraticField, RationalField
from .linalg import SquareMatrix, iter_vectors
from .loops import Loop, LoopSpec, psi_associativity
from .matgroup import EndoDesc, GroupDesc, close_group

FAMILY_IDS = [
    "3.1a", "3.1b", "3.1c", "3.2", "3.5i", "3.6", "3.9a",
    "N3.3", "N3.7", "N3.8", "N3.9b", "N3.9c",
]

EXACT_FAMILIES = {"3.1a", "3.1b", "3.1c", "3.2", "3.5i", "3.6", "3.9a"}
SAMPLING_FAMILIES = {"N3.3", "N3.7", "N3.8"}


@dataclass
class BuildResult:
    family: str
    kind: str  # "loop" | "lie" | "sampling"
    loop_spec: Optional[LoopSpec] = None
    loop: Optional[Loop] = None
    lie_data: Optional[LieData] = None
    sampling: Optional[Dict[str, np.ndarray]] = None
    proper_expected: Optional[bool] = None
    geometric_expected: Optional[bool] = None


@dataclass
class SamplingReport:
    family: str
    samples: int
    seed: int
    min_abs_det: float
    trace_min: Optional[float] = None
    trace_max: Optional[float] = None
    trace_margin_from_2: Optional[float] = None
    predicted_trace_bound: Optional[float] = None


def list_families() -> List[str]:
    return list(FAMILY_IDS)


def default_params(family: str) -> dict:
    try:
        return {k: (list(v) if isinstance(v, list) else v)
                for k, v in _DEFAULTS[family].items()}
    except KeyError:
        raise InvalidParams(f"unknown family {family!r}")


_DEFAULTS = {
    "3.1a": {
        "p": 3,
        "gamma0_gens": [[[0, 2], [1, 0]], [[1, 1], [0, 1]]],
        "C": [[1, 1], [0, 1]],
        "B": [[1, 0], [1, 1]],
    },
    "3.1b": {
        "p": 3,
        "gamma0_gens": [[[1, 1], [0, 1]]],
        "A": [[2, 0], [0, 2]],
        "B": [[1, 0], [1, 1]],
    },
    "3.1c": {
        "p": 5,
        "m": 2,
        "gamma0_hat_gens": [[[1, 1], [0, 1]]],
        "B_prime": [[0, 1], [2, 0]],
        "A_prime": [[1]],
        "a": 2,
        "b": 3,
    },
    "3.2": {
        "p": 5,
        "gamma0_gens": [[[4, 0], [0, 1]], [[1, 1], [0, 1]]],
        "B": [[1, 0], [0, 1]],
        "t": [2, 3],
    },
    "3.5i": {"p": 5, "poly": [2, 0], "t": 1, "c": 4, "a": [0, 1]},
    "3.6": {"p": 7, "omega_gen": 2, "d": 0, "a": 2, "r": 2, "s": 1, "b": 0},
    "3.9a": {"p": 7, "gamma0_gens": [2], "delta": "inverse", "a": 3, "b": 1},
    "N3.3": {"theta1": 1.2, "theta2": 0.6, "c_angle": 0.9},
    "N3.7": {"c": 2.0, "binv": [[2.0, 1.0], [1.0, 1.0]], "amat": [[1.0, 1.0], [1.0, 2.0]]},
    "N3.8": {"n_mult": 3, "a": 0.0, "b": 0.5, "c": -0.5},
    "N3.9b": {"k": 1, "b": 1.0, "a": -2.0},
    "N3.9c": {"a": [2.0, 0.0], "b": [1.0, 0.0]},
}


def build(family: str, params: Optional[dict] = None) -> BuildResult:
    """Instantiate a family; InvalidParams when the predicate fails,
    EligibilityFailed when an exact family slips past its predicate but
    enumeration still finds an eigenvalue-1 matrix."""
    if family not in FAMILY_IDS:
        raise InvalidParams(f"unknown family {family!r}")
    p = default_params(family)
    if params:
        p.update(params)
    result = _BUILDERS[family](p)
    if result.kind == "loop":
        loop = Loop(result.loop_spec)
        if not loop.eligibility.eligible:
            m, d = loop.eligibility.violations[0]
            raise EligibilityFailed(
                f"family {family}: S_M has eigenvalue 1 at M={m!r} (det(S-I)={d})"
            )
        result.loop = loop
        # Properness is decided by the exact matrix-level associativity
        # test, not by the is_group criterion: several parameter corners
        # (A central, inner delta with A = C^-1, the triangular family)
        # are associative even though that criterion fails.
        result.proper_expected = not psi_associativity(loop)
    return result


# -- exact families ---------------------------------------------------------

def _centralizes(m: SquareMatrix, closure) -> bool:
    return all((m * g).key() == (g * m).key() for g in closure.elements)


def _build_31a(p: dict) -> BuildResult:
    field = PrimeField(p["p"])
    gens = [SquareMatrix(field, g) for g in p["gamma0_gens"]]
    n = gens[0].n
    c_mat = SquareMatrix(field, p["C"])
    b_mat = SquareMatrix(field, p["B"])
    group = GroupDesc(field, n, gens)
    closure = close_group(group)
    if all((g * h).key() == (h * g).key() for g in closure.elements for h in closure.elements):
        raise InvalidParams("3.1a: the group must be non-commutative")
    cinv = c_mat.inv()
    if all((cinv * m * c_mat).key() == m.key() for m in closure.elements):
        raise InvalidParams("3.1a: conjugation by C must move some group element")
    probe = b_mat.inv() * cinv
    if _centralizes(probe, closure):
        raise InvalidParams("3.1a: B^-1 C^-1 must not centralize the group")
    if (probe - SquareMatrix.identity(field, n)).det().is_zero():
        raise InvalidParams("3.1a: B^-1 C^-1 must not have eigenvalue 1")
    spec = LoopSpec(field, n, cinv, b_mat, group, EndoDesc("inner", C=c_mat))
    return BuildResult("3.1a", "loop", loop_spec=spec, geometric_expected=False)


def _build_31b(p: dict) -> BuildResult:
    field = PrimeField(p["p"])
    gens = [SquareMatrix(field, g) for g in p["gamma0_gens"]]
    n = gens[0].n
    a_mat = SquareMatrix(field, p["A"])
    b_mat = SquareMatrix(field, p["B"])
    group = GroupDesc(field, n, gens)
    closure = close_group(group)
    if not _centralizes(a_mat, closure):
        raise InvalidParams("3.1b: A must centralize the group")
    if _centralizes(b_mat, closure):
        raise InvalidParams("3.1b: B must not centralize the group")
    if (b_mat.inv() * a_mat - SquareMatrix.identity(field, n)).det().is_zero():
        raise InvalidParams("3.1b: B^-1 A must not have eigenvalue 1")
    spec = LoopSpec(field, n, a_mat, b_mat, group, EndoDesc("identity"))
    return BuildResult("3.1b", "loop", loop_spec=spec, geometric_expected=False)


def _build_31c(p: dict) -> BuildResult:
    field = PrimeField(p["p"])
    m_dim = p["m"]
    hat_gens = [SquareMatrix(field, g) for g in p["gamma0_hat_gens"]]
    if any(g.n != m_dim for g in hat_gens):
        raise InvalidParams("3.1c: top-block generators must be m x m")
    b_prime = SquareMatrix(field, p["B_prime"])
    a_prime = SquareMatrix(field, p["A_prime"])
    tail = a_prime.n
    n = m_dim + tail
    a_el, b_el = field.element(p["a"]), field.element(p["b"])
    if a_el == b_el:
        raise InvalidParams("3.1c: a and b must differ")
    if (a_prime - SquareMatrix.scalar(field, tail, b_el)).det().is_zero():
        raise InvalidParams("3.1c: the lower block of A must not have eigenvalue b")
    if (b_prime - SquareMatrix.scalar(field, m_dim, a_el)).det().is_zero():
        raise InvalidParams("3.1c: the upper block of B must not have eigenvalue a")

    def embed(top: SquareMatrix) -> SquareMatrix:
        zero, one = field.zero(), field.one()
        rows = []
        for i in range(n):
            row = []
            for j in range(n):
                if i < m_dim and j < m_dim:
                    row.append(top.rows[i][j])
                elif i >= m_dim and j >= m_dim:
                    row.append(one if i == j else zero)
                else:
                    row.append(zero)
            rows.append(row)
        return SquareMatrix(field, rows)

    def block_diag(top: SquareMatrix, bottom: SquareMatrix) -> SquareMatrix:
        zero = field.zero()
        rows = []
        for i in range(n):
            row = []
            for j in range(n):
                if i < top.n and j < top.n:
                    row.append(top.rows[i][j])
                elif i >= top.n and j >= top.n:
                    row.append(bottom.rows[i - top.n][j - top.n])
                else:
                    row.append(zero)
            rows.append(row)
        return SquareMatrix(field, rows)

    a_mat = block_diag(SquareMatrix.scalar(field, m_dim, a_el), a_prime)
    b_mat = block_diag(b_prime, SquareMatrix.scalar(field, tail, b_el))
    gens = [embed(g) for g in hat_gens]
    group = GroupDesc(field, n, gens)
    hat_closure = close_group(GroupDesc(field, m_dim, hat_gens))
    if len(hat_closure) == 1:
        raise InvalidParams("3.1c: the top-block group must be nontrivial")
    spec = LoopSpec(field, n, a_mat, b_mat, group, EndoDesc("identity"))
    return BuildResult("3.1c", "loop", loop_spec=spec, geometric_expected=False)


def _build_32(p: dict) -> BuildResult:
    field = PrimeField(p["p"])
    gens = [SquareMatrix(field, g) for g in p["gamma0_gens"]]
    n = gens[0].n
    group = GroupDesc(field, n, gens)
    closure = close_group(group)
    for m in closure.elements:
        for i in range(n):
            for j in range(i):
                if not m.rows[i][j].is_zero():
                    raise InvalidParams("3.2: the group must be upper triangular")
    if all((g * h).key() == (h * g).key() for g in closure.elements for h in closure.elements):
        raise InvalidParams("3.2: the group must be non-abelian")
    t_vals = [field.element(t) for t in p["t"]]
    if len(t_vals) != n:
        raise InvalidParams("3.2: need one diagonal ratio per dimension")
    nonzero = field.size() - 1
    for i in range(n):
        phi = {m.rows[i][i] for m in closure.elements}
        if len(phi) == nonzero:
            raise InvalidParams(f"3.2: diagonal characters at position {i} fill K*")
        if t_vals[i] in phi:
            raise InvalidParams(f"3.2: t_{i} lies in the character image")
    b_mat = SquareMatrix(field, p["B"])
    a_mat = b_mat * SquareMatrix.diagonal(field, t_vals)
    spec = LoopSpec(field, n, a_mat, b_mat, group, EndoDesc("zero"))
    return BuildResult("3.2", "loop", loop_spec=spec, geometric_expected=True)


def _build_35i(p: dict) -> BuildResult:
    prime = p["p"]
    field = QuadraticField(prime, tuple(p["poly"]))
    subfield = PrimeField(prime)
    t_el, c_el = subfield.element(p["t"]), subfield.element(p["c"])
    ct = t_el * c_el
    if ct.is_zero():
        raise InvalidParams("3.5i: ct must be nonzero")
    if pow(ct.val, (prime - 1) // 2, prime) != 1:
        raise InvalidParams("3.5i: ct must be a square in the prime subfield")
    a_el = field.element(p["a"])
    if a_el.val[1] == 0:
        raise InvalidParams("3.5i: a must lie outside the prime subfield")
    gens = [
        SquareMatrix(field, [[1, 1], [0, 1]]),
        SquareMatrix(field, [[0, 1], [prime - 1, 0]]),
    ]
    group = GroupDesc(field, 2, gens)
    b_mat = SquareMatrix(field, [[1, -p["t"]], [0, 1]])
    a_mat = SquareMatrix(field, [[a_el, field.zero()], [field.element(p["c"]), a_el]])
    spec = LoopSpec(field, 2, a_mat, b_mat, group, EndoDesc("identity"))
    return BuildResult("3.5i", "loop", loop_spec=spec, geometric_expected=False)


def _upper_unipotent(field: Field, m, nn) -> SquareMatrix:
    return SquareMatrix(field, [[m, nn], [field.zero(), field.element(m).inv()]])


def _build_36(p: dict) -> BuildResult:
    field = PrimeField(p["p"])
    omega_gen = field.element(p["omega_gen"])
    if omega_gen.is_zero():
        raise InvalidParams("3.6: the diagonal generator must be a unit")
    omega = []
    x = field.one()
    while True:
        omega.append(x)
        x = x * omega_gen
        if x == field.one():
            break
    minus_one = field.element(-1)
    if minus_one != field.one() and minus_one in omega:
        raise InvalidParams("3.6: the diagonal subgroup must not contain -1")
    a_el, r_el = field.element(p["a"]), field.element(p["r"])
    s_el, b_el, d_el = field.element(p["s"]), field.element(p["b"]), field.element(p["d"])
    if a_el.is_zero() or r_el.is_zero():
        raise InvalidParams("3.6: a and r must be units")
    if a_el * r_el == field.one():
        raise InvalidParams("3.6: ar must differ from 1")
    gens = [
        _upper_unipotent(field, omega_gen, field.zero()),
        _upper_unipotent(field, field.one(), field.one()),
    ]
    images = [
        _upper_unipotent(field, omega_gen, field.zero()),
        _upper_unipotent(field, field.one(), d_el),
    ]
    group = GroupDesc(field, 2, gens)
    b_mat = SquareMatrix(field, [[a_el.inv(), -b_el], [field.zero(), a_el]])
    a_mat = SquareMatrix(field, [[r_el, s_el], [field.zero(), r_el.inv()]])
    # Regularity of the slope orbit: s r (1 - m^2) + n m (r^2 - d) != 0 for
    # every group element (m, n) != (1, 0).
    geometric = True
    one = field.one()
    for m in omega:
        for nn in field.elements():
            if m == one and nn.is_zero():
                continue
            expr = s_el * r_el * (one - m * m) + nn * m * (r_el * r_el - d_el)
            if expr.is_zero():
                geometric = False
                break
        if not geometric:
            break
    spec = LoopSpec(field, 2, a_mat, b_mat, group, EndoDesc("gen_images", images=images))
    return BuildResult("3.6", "loop", loop_spec=spec, geometric_expected=geometric)


def _build_39a(p: dict) -> BuildResult:
    if p.get("field") == "rational":
        field = RationalField()
    else:
        field = PrimeField(p["p"])
    gens = [SquareMatrix(field, [[g]]) for g in p["gamma0_gens"]]
    group = GroupDesc(field, 1, gens)
    closure = close_group(group)
    if len(closure) == 1:
        raise InvalidParams("3.9a: the scalar group must be nontrivial")
    if field.size() is not None and len(closure) == field.size() - 1:
        raise InvalidParams("3.9a: the scalar group must be a proper subgroup of K*")
    delta_spec = p["delta"]
    if delta_spec == "inverse":
        delta = EndoDesc("gen_images", images=[g.inv() for g in gens])
    elif delta_spec == "zero":
        delta = EndoDesc("zero")
    elif delta_spec == "identity":
        delta = EndoDesc("identity")
    else:
        delta = EndoDesc(
            "gen_images", images=[SquareMatrix(field, [[v]]) for v in delta_spec]
        )
    a_el, b_el = field.element(p["a"]), field.element(p["b"])
    if a_el.is_zero() or b_el.is_zero():
        raise InvalidParams("3.9a: a and b must be units")
    spec = LoopSpec(field, 1, SquareMatrix(field, [[a_el]]),
                    SquareMatrix(field, [[b_el]]), group, delta)
    loop_probe = Loop(spec)
    table = loop_probe.endo.table
    if any(table[i] == i for i in range(1, len(closure))):
        raise InvalidParams("3.9a: delta must be fixed-point-free away from 1")
    ratio = SquareMatrix(field, [[b_el.inv() * a_el]])
    if closure.contains(ratio):
        raise InvalidParams("3.9a: b^-1 a must lie outside the scalar group")
    return BuildResult("3.9a", "loop", loop_spec=spec, geometric_expected=True)


# -- numeric families -------------------------------------------------------

def _su2(angle: float) -> np.ndarray:
    return np.array([
        [np.cos(angle) + 0j, 1j * np.sin(angle)],
        [1j * np.sin(angle), np.cos(angle) - 0j],
    ])


def _build_n33(p: dict) -> BuildResult:
    th1, th2 = float(p["theta1"]), float(p["theta2"])
    if not (0.0 < th2 < th1 and th1 + th2 <= math.pi):
        raise InvalidParams("N3.3: need theta1 > theta2 > 0 and theta1 + theta2 <= pi")
    c_mat = _su2(float(p["c_angle"]))
    r1 = np.diag([np.exp(1j * th1), np.exp(-1j * th1)])
    r2 = np.diag([np.exp(1j * th2), np.exp(-1j * th2)])
    c_inv = np.linalg.inv(c_mat)
    b_mat = c_inv @ np.linalg.inv(r1)  # so that B^-1 C^-1 = R1
    a_mat = c_inv @ r2                 # so that C A = R2
    return BuildResult(
        "N3.3", "sampling",
        sampling={"A": a_mat, "B": b_mat, "C": c_mat,
                  "theta1": th1, "theta2": th2},
        proper_expected=True, geometric_expected=False,
    )


def _build_n37(p: dict) -> BuildResult:
    binv = np.asarray(p["binv"], dtype=float)
    amat = np.asarray(p["amat"], dtype=float)
    c = float(p["c"])
    if c == 0.0:
        raise InvalidParams("N3.7: c must be nonzero")
    if abs(np.linalg.det(binv) - 1.0) > 1e-12 or abs(np.linalg.det(amat) - 1.0) > 1e-12:
        raise InvalidParams("N3.7: both matrices must have determinant 1")
    k, l, nn, s = binv[0, 0], binv[0, 1], binv[1, 0], binv[1, 1]
    pp, q, r, v = amat[0, 0], amat[0, 1], amat[1, 0], amat[1, 1]
    d = k * pp
    if abs(d - s * v) > 1e-12:
        raise InvalidParams("N3.7: the diagonal products kp and sv must agree")
    if not ((d > 1 and l * r >= 0 and nn * q >= 0)
            or (d < -1 and l * r <= 0 and nn * q <= 0)):
        raise InvalidParams("N3.7: need d>1 with lr,nq >= 0 or d<-1 with lr,nq <= 0")
    delta = LoopDelta("diag_power", c)
    data = LieData(
        n=2, A=amat, B=np.linalg.inv(binv),
        basis=[np.diag([1.0, -1.0])], delta_tilde=[[c]], loop_delta=delta,
    )
    proper = True if c != 1.0 else (l != 0.0 or nn != 0.0)
    geometric = True if c != 1.0 else (q != 0.0 or r != 0.0)
    return BuildResult(
        "N3.7", "lie", lie_data=data,
        sampling={"A": amat, "Binv": binv, "c": c},
        proper_expected=proper, geometric_expected=geometric,
    )


def _rot(phi: float) -> np.ndarray:
    return np.array([[np.cos(phi), np.sin(phi)], [-np.sin(phi), np.cos(phi)]])


def _build_n38(p: dict) -> BuildResult:
    a, b, c = float(p["a"]), float(p["b"]), float(p["c"])
    n_mult = int(p["n_mult"])
    if not (b > 0 and c < 0 and -math.sqrt(2) < c - b < 0):
        raise InvalidParams("N3.8: need b > 0, c < 0 and -sqrt(2) < c - b < 0")
    binv = np.array([[a, b], [c, -a]])
    if abs(np.linalg.det(binv)) < 1e-12:
        raise InvalidParams("N3.8: the matrix (a b; c -a) must be invertible")
    amat = _rot(math.pi / 4)
    delta = LoopDelta("rotation_multiple", float(n_mult))
    data = LieData(
        n=2, A=amat, B=np.linalg.inv(binv),
        basis=[np.array([[0.0, 1.0], [-1.0, 0.0]])],
        delta_tilde=[[float(n_mult)]], loop_delta=delta,
    )
    return BuildResult(
        "N3.8", "lie", lie_data=data,
        sampling={"A": amat, "Binv": binv, "n_mult": n_mult,
                  "b": b, "c": c},
        proper_expected=True, geometric_expected=(n_mult != 1),
    )


def _build_n39b(p: dict) -> BuildResult:
    k = int(p["k"])
    a, b = float(p["a"]), float(p["b"])
    if k == 0:
        raise InvalidParams("N3.9b: k must be a nonzero integer")
    if b == 0.0 or a / b >= 0.0:
        raise InvalidParams("N3.9b: b^-1 a must be negative")
    delta = LoopDelta("scalar_power", float(2 * k + 1))
    data = LieData(
        n=1, A=[[a]], B=[[b]], basis=[np.array([[1.0]])],
        delta_tilde=[[float(2 * k + 1)]], loop_delta=delta,
    )
    return BuildResult("N3.9b", "lie", lie_data=data,
                       proper_expected=True, geometric_expected=False)


def _complex_repr(z: complex) -> np.ndarray:
    return np.array([[z.real, -z.imag], [z.imag, z.real]])


def _build_n39c(p: dict) -> BuildResult:
    def as_complex(v):
        if isinstance(v, (list, tuple)):
            return complex(float(v[0]), float(v[1]))
        return complex(v)

    a, b = as_complex(p["a"]), as_complex(p["b"])
    if a == 0 or b == 0:
        raise InvalidParams("N3.9c: a and b must be nonzero")
    ratio = a / b
    if abs(ratio.imag) < 1e-14:
        if abs(abs(ratio.real) - 1.0) < 1e-14:
            raise InvalidParams("N3.9c: a real ratio must have modulus != 1")
        delta = LoopDelta("complex_conj")
    else:
        delta = LoopDelta("complex_recip")
    basis = [np.eye(2), np.array([[0.0, -1.0], [1.0, 0.0]])]
    data = LieData(
        n=2, A=_complex_repr(a), B=_complex_repr(b), basis=basis,
        delta_tilde=delta.tangent_matrix(2), loop_delta=delta,
    )
    return BuildResult("N3.9c", "lie", lie_data=data,
                       proper_expected=True, geometric_expected=False)


_BUILDERS = {
    "3.1a": _build_31a,
    "3.1b": _build_31b,
    "3.1c": _build_31c,
    "3.2": _build_32,
    "3.5i": _build_35i,
    "3.6": _build_36,
    "3.9a": _build_39a,
    "N3.3": _build_n33,
    "N3.7": _build_n37,
    "N3.8": _build_n38,
    "N3.9b": _build_n39b,
    "N3.9c": _build_n39c,
}


# -- numeric eligibility sampling ------------------------------------------

def sample_numeric_eligibility(family: str, params: Optional[dict] = None,
                               samples: int = 10_000, seed: int = 1) -> SamplingReport:
    """min |det(S_M - I)| over seeded random group elements, plus trace
    statistics where the family bounds a trace.  Philox keeps draws
    reproducible and splittable."""
    if family not in SAMPLING_FAMILIES:
        raise InvalidParams(f"family {family!r} does not support sampling")
    result = build(family, params)
    rng = np.random.Generator(np.random.Philox(seed))
    pay = result.sampling
    eye = np.eye(2)
    min_det = math.inf
    traces: List[float] = []
    if family == "N3.3":
        a_mat, b_mat, c_mat = pay["A"], pay["B"], pay["C"]
        binv = np.linalg.inv(b_mat)
        cinv = np.linalg.inv(c_mat)
        for _ in range(samples):
            quat = rng.normal(size=4)
            quat /= np.linalg.norm(quat)
            z = complex(quat[0], quat[1])
            w = complex(quat[2], quat[3])
            m = np.array([[z, w], [-w.conjugate(), z.conjugate()]])
            s = np.linalg.inv(m) @ binv @ (cinv @ m @ c_mat) @ a_mat
            min_det = min(min_det, abs(np.linalg.det(s - eye)))
        return SamplingReport(family, samples, seed, float(min_det))
    if family == "N3.7":
        a_mat, binv, c = pay["A"], pay["Binv"], pay["c"]
        for _ in range(samples):
            logm = rng.uniform(-5.0, 5.0)
            m = math.exp(logm)
            mat = np.diag([m, 1.0 / m])
            mdelta = np.diag([m ** c, m ** (-c)])
            s = np.linalg.inv(mat) @ binv @ mdelta @ a_mat
            min_det = min(min_det, abs(np.linalg.det(s - eye)))
            traces.append(float(np.trace(s)))
        return SamplingReport(
            family, samples, seed, float(min_det),
            trace_min=min(traces), trace_max=max(traces),
            trace_margin_from_2=min(abs(t - 2.0) for t in traces),
        )
    # N3.8
    a_mat, binv, n_mult = pay["A"], pay["Binv"], pay["n_mult"]
    bound = 2.0 * (pay["b"] - pay["c"]) / math.sqrt(2.0)
    for _ in range(samples):
        phi = rng.uniform(0.0, 2.0 * math.pi)
        s = _rot(-phi) @ binv @ _rot(n_mult * phi) @ a_mat
        min_det = min(min_det, abs(np.linalg.det(s - eye)))
        traces.append(float(np.trace(s)))
    return SamplingReport(
        family, samples, seed, float(min_det),
        trace_min=min(traces), trace_max=max(traces),
        trace_margin_from_2=min(abs(t - 2.0) for t in traces),
        predicted_trace_bound=bound,
    )
