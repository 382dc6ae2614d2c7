import random

import pytest

from loopforge import (
    ClosureCapExceeded,
    EndoDesc,
    GroupDesc,
    PrimeField,
    RationalField,
    SquareMatrix,
    apply_endo,
    close_group,
    validate_endomorphism,
)
from loopforge.errors import ElementNotInClosure
from loopforge.fields import FieldElement
from loopforge.matgroup import Endo, Gamma, GammaElement
from loopforge.linalg import vector


def scalar(f, v):
    return SquareMatrix(f, [[v]])


def test_close_group_trivial():
    f = PrimeField(7)
    closure = close_group(GroupDesc(f, 1, []))
    assert len(closure) == 1
    assert closure.elements[0].is_identity()


def test_close_group_scalar_powers():
    f = PrimeField(7)
    closure = close_group(GroupDesc(f, 1, [scalar(f, 2)]))
    assert [m.rows[0][0].val for m in closure.elements] == [1, 2, 4]


def test_close_group_cyclic_order_four():
    f = PrimeField(5)
    m = SquareMatrix(f, [[0, 1], [4, 0]])
    closure = close_group(GroupDesc(f, 2, [m]))
    # oracle: m^2 = 4I, m^3 = 4m, m^4 = 16I = I
    assert len(closure) == 4
    assert closure.contains(SquareMatrix(f, [[4, 0], [0, 4]]))
    assert closure.contains(SquareMatrix(f, [[0, 4], [1, 0]]))


def test_closure_idempotent_and_contains_inverses():
    f = PrimeField(3)
    gens = [SquareMatrix(f, [[0, 2], [1, 0]]), SquareMatrix(f, [[1, 1], [0, 1]])]
    closure = close_group(GroupDesc(f, 2, gens))
    assert len(closure) == 24  # SL(2,3)
    again = close_group(GroupDesc(f, 2, list(closure.elements)))
    assert len(again) == len(closure)
    for i in range(len(closure)):
        closure.inv(i)  # raises if an inverse escaped the closure


def test_closure_cap():
    q = RationalField()
    with pytest.raises(ClosureCapExceeded):
        close_group(GroupDesc(q, 1, [scalar(q, 2)], closure_cap=64))


def test_noninvertible_generator_rejected():
    f = PrimeField(5)
    with pytest.raises(ValueError):
        close_group(GroupDesc(f, 2, [SquareMatrix(f, [[1, 1], [1, 1]])]))


def test_endomorphism_identity_zero():
    f = PrimeField(3)
    desc = GroupDesc(f, 2, [SquareMatrix(f, [[0, 2], [1, 0]]),
                            SquareMatrix(f, [[1, 1], [0, 1]])])
    closure = close_group(desc)
    for kind in ("identity", "zero"):
        endo = Endo(EndoDesc(kind), closure, desc)
        assert validate_endomorphism(endo).ok


def test_endomorphism_gen_images_inversion():
    f = PrimeField(7)
    desc = GroupDesc(f, 1, [scalar(f, 2)])
    closure = close_group(desc)
    endo = Endo(EndoDesc("gen_images", images=[scalar(f, 4)]), closure, desc)
    assert validate_endomorphism(endo).ok  # checks all 9 pairs
    assert apply_endo(endo, scalar(f, 2)) == scalar(f, 4)
    assert apply_endo(endo, scalar(f, 4)) == scalar(f, 2)


def test_endomorphism_gen_images_invalid():
    f = PrimeField(3)
    g1 = SquareMatrix(f, [[0, 2], [1, 0]])
    g2 = SquareMatrix(f, [[1, 1], [0, 1]])
    desc = GroupDesc(f, 2, [g1, g2])
    closure = close_group(desc)
    # swapping the generator images does not extend to an endomorphism here
    endo = Endo(EndoDesc("gen_images", images=[g2, g1]), closure, desc)
    check = validate_endomorphism(endo)
    assert not check.ok
    assert check.counterexample is not None


def test_endomorphism_inner():
    f = PrimeField(3)
    g1 = SquareMatrix(f, [[0, 2], [1, 0]])
    g2 = SquareMatrix(f, [[1, 1], [0, 1]])
    desc = GroupDesc(f, 2, [g1, g2])
    closure = close_group(desc)
    endo = Endo(EndoDesc("inner", C=g2), closure, desc)
    assert validate_endomorphism(endo).ok
    assert apply_endo(endo, g1) == g2.inv() * g1 * g2


def test_apply_endo_outside_closure():
    f = PrimeField(7)
    desc = GroupDesc(f, 1, [scalar(f, 2)])
    closure = close_group(desc)
    endo = Endo(EndoDesc("identity"), closure, desc)
    with pytest.raises(ElementNotInClosure):
        apply_endo(endo, scalar(f, 3))


def test_endo_respects_products_on_all_pairs():
    f = PrimeField(7)
    desc = GroupDesc(f, 1, [scalar(f, 3)])  # order 6
    closure = close_group(desc)
    endo = Endo(EndoDesc("gen_images", images=[scalar(f, 3).inv()]), closure, desc)
    assert validate_endomorphism(endo).ok
    for i in range(len(closure)):
        for j in range(len(closure)):
            assert endo.apply_index(closure.mul(i, j)) \
                == closure.mul(endo.apply_index(i), endo.apply_index(j))


def _gamma_ctx_39a():
    f = PrimeField(7)
    desc = GroupDesc(f, 1, [scalar(f, 2)])
    closure = close_group(desc)
    endo = Endo(EndoDesc("gen_images", images=[scalar(f, 4)]), closure, desc)
    return f, Gamma(f, 1, closure, endo)


def test_gamma_mul_examples():
    f, gamma = _gamma_ctx_39a()
    e = gamma.identity()
    g = gamma.element(vector(f, [3]), vector(f, [5]), scalar(f, 4))
    assert gamma.mul(e, g) == g and gamma.mul(g, e) == g
    g1 = gamma.element(vector(f, [1]), vector(f, [1]), scalar(f, 2))
    g2 = gamma.element(vector(f, [1]), vector(f, [1]), scalar(f, 4))
    prod = gamma.mul(g1, g2)
    # g(1 + 2*1, 1 + 2^delta * 1, 2*4) = g(3, 5, 1)
    assert prod.u[0].val == 3 and prod.v[0].val == 5 and prod.mi == 0


def test_gamma_mul_dense_block_oracle():
    """Cross-check the triple product rule against dense block matrices."""
    f, gamma = _gamma_ctx_39a()
    rng = random.Random(9)

    def dense(g):
        m = gamma.matrix(g.mi).rows[0][0].val
        d = gamma.delta_matrix(g.mi).rows[0][0].val
        return [[1, 0, 0], [g.u[0].val, m, 0], [g.v[0].val, 0, d]]

    def dense_mul(a, b):
        return [[sum(a[i][k] * b[k][j] for k in range(3)) % 7 for j in range(3)]
                for i in range(3)]

    for _ in range(40):
        g1 = gamma.element(vector(f, [rng.randrange(7)]), vector(f, [rng.randrange(7)]),
                           rng.randrange(3))
        g2 = gamma.element(vector(f, [rng.randrange(7)]), vector(f, [rng.randrange(7)]),
                           rng.randrange(3))
        assert dense(gamma.mul(g1, g2)) == dense_mul(dense(g1), dense(g2))


def test_gamma_inverse():
    f, gamma = _gamma_ctx_39a()
    for g in gamma.enumerate():
        assert gamma.mul(g, gamma.inv(g)) == gamma.identity()


def test_coset_decompose_examples():
    f, gamma = _gamma_ctx_39a()
    a = scalar(f, 3)
    rep0 = gamma.element(vector(f, [0]), vector(f, [5]), scalar(f, 4))
    rep, h = gamma.decompose(rep0, a)
    assert rep == rep0 and h == gamma.identity()
    in_h = gamma.element(vector(f, [2]), vector(f, [6]), 0)  # g(x, Ax, I), A=3
    rep, h = gamma.decompose(in_h, a)
    assert rep == gamma.identity() and h == in_h
    g = gamma.element(vector(f, [2]), vector(f, [1]), scalar(f, 4))
    rep, h = gamma.decompose(g, a)
    assert (rep.u[0].val, rep.v[0].val, rep.mi) == (0, 5, gamma.closure.index_of(scalar(f, 4)))
    assert (h.u[0].val, h.v[0].val, h.mi) == (4, 5, 0)


def test_coset_decompose_round_trip_everywhere():
    f, gamma = _gamma_ctx_39a()
    a = scalar(f, 3)
    for g in gamma.enumerate():
        rep, h = gamma.decompose(g, a)
        assert all(x.is_zero() for x in rep.u)
        assert h.mi == 0
        assert gamma.mul(rep, h) == g
