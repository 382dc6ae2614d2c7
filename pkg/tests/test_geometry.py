import pytest

from loopforge import Loop, SquareMatrix
from loopforge.catalog import build
from loopforge.errors import NonUniqueTau, NotInOrbit
from loopforge.geometry import (
    AffineTransversal,
    act_on_transversal,
    base_transversal,
    gamma0_orbit,
    is_regular_orbit,
    orbit_loop_mul,
    orbit_report,
    stabilizer_of_QA,
    transversal_intersection_check,
)
from loopforge.linalg import vector, zero_vector
from loopforge.loops import cayley_table, element_label
from loopforge.matgroup import GammaElement


def test_normalized_base():
    loop = build("3.9a").loop
    f = loop.field
    slope = SquareMatrix(f, [[3]])
    q = AffineTransversal.from_base(slope, vector(f, [2]), vector(f, [5]))
    # offset = q - C p = 5 - 3*2 = -1 = 6
    assert q.offset[0].val == 6
    same = AffineTransversal.from_base(slope, vector(f, [0]), vector(f, [6]))
    assert q == same


def test_act_identity_and_translation(loop39a):
    gamma = loop39a.gamma
    qa = base_transversal(loop39a)
    assert act_on_transversal(gamma, gamma.identity(), qa) == qa
    f = loop39a.field
    shift = GammaElement(vector(f, [2]), vector(f, [5]), 0)
    moved = act_on_transversal(gamma, shift, qa)
    assert moved.slope == qa.slope
    # offset = v - A u = 5 - 3*2 = -1 = 6
    assert moved.offset[0].val == 6


def test_act_is_group_action(loop39a):
    gamma = loop39a.gamma
    f = loop39a.field
    qs = [base_transversal(loop39a),
          AffineTransversal(SquareMatrix(f, [[5]]), vector(f, [1]))]
    elements = gamma.enumerate()
    for g1 in elements[:21]:
        for g2 in elements[::13]:
            for q in qs:
                lhs = act_on_transversal(gamma, gamma.mul(g1, g2), q)
                rhs = act_on_transversal(gamma, g1, act_on_transversal(gamma, g2, q))
                assert lhs == rhs


def test_orbit_values(loop39a):
    slopes = [m.rows[0][0].val for m in gamma0_orbit(loop39a)]
    assert slopes == [3, 6, 5]
    assert is_regular_orbit(loop39a)


def test_orbit_central_A(loop31b):
    slopes = gamma0_orbit(loop31b)
    assert len(slopes) == 1 and slopes[0] == loop31b.spec.A
    assert not is_regular_orbit(loop31b)


def test_orbit_trivial_group(trivial_loop):
    slopes = gamma0_orbit(trivial_loop)
    assert slopes == [trivial_loop.spec.A]
    assert is_regular_orbit(trivial_loop)  # |orbit| = |Gamma_0| = 1


def test_stabilizer_equals_H_exactly_when_regular(loop39a, loop31b, theta_strict_loop):
    for loop in (loop39a, loop31b, theta_strict_loop):
        rep = stabilizer_of_QA(loop)
        assert rep.equals_H == is_regular_orbit(loop)
    extra = stabilizer_of_QA(loop31b).extra_example
    assert extra is not None and extra.mi != 0  # some g(0, 0, M) fixes Q_A


def test_orbit_loop_identity_laws(loop39a):
    qa = base_transversal(loop39a)
    f = loop39a.field
    x = AffineTransversal(SquareMatrix(f, [[5]]), vector(f, [4]))
    assert orbit_loop_mul(loop39a, qa, x) == x
    assert orbit_loop_mul(loop39a, x, qa) == x


def test_orbit_loop_isomorphic_to_carrier_loop(loop39a):
    """The bijection (u, M) -> xi(u, M) . Q_A intertwines the carrier
    multiplication with the orbit multiplication, table against table."""
    loop = loop39a
    gamma = loop.gamma
    qa = base_transversal(loop)
    carrier = loop.carrier()
    images = []
    for x in carrier:
        xi = GammaElement(x.u, loop.spec.B.apply(x.u), x.mi)
        images.append(act_on_transversal(gamma, xi, qa))
    assert len({q.key() for q in images}) == len(carrier)  # bijection
    for i, x in enumerate(carrier):
        for j, y in enumerate(carrier):
            z = loop.mul(x, y)
            k = carrier.index(z)
            assert orbit_loop_mul(loop, images[i], images[j]) == images[k]


def test_orbit_errors(loop39a, loop31b):
    f = loop39a.field
    off_orbit = AffineTransversal(SquareMatrix(f, [[2]]), zero_vector(f, 1))
    with pytest.raises(NotInOrbit):
        orbit_loop_mul(loop39a, off_orbit, base_transversal(loop39a))
    with pytest.raises(NonUniqueTau):
        orbit_loop_mul(loop31b, base_transversal(loop31b), base_transversal(loop31b))


def test_transversal_intersections(loop39a):
    assert transversal_intersection_check(loop39a)
    b = loop39a.spec.B
    vals = sorted((b - c).det().val for c in gamma0_orbit(loop39a))
    assert vals == [2, 3, 5]  # 1 - {3,5,6} mod 7, all nonzero


def test_transversal_intersections_all_eligible():
    for fam in ("3.1b", "3.2", "3.9a"):
        loop = build(fam).loop
        assert transversal_intersection_check(loop)


def test_orbit_report_deterministic(loop39a):
    assert orbit_report(loop39a) == orbit_report(loop39a)
    assert "regular: True" in orbit_report(loop39a)
