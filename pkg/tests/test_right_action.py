import pytest

from loopforge.catalog import build
from loopforge.errors import LoopforgeError
from loopforge.right_action import (
    dee_subgroup,
    mulclose_perms,
    phi_family_rank,
    phi_operators,
    sigma_group,
    sigma_report_text,
)

from helpers import minor_rank


def test_mulclose_perms_cyclic():
    gens = [(1, 2, 0)]
    group = mulclose_perms(gens)
    assert len(group) == 3
    assert group[0] == (0, 1, 2)


def test_sigma_structure_39a(loop39a):
    rep = sigma_group(loop39a)
    assert rep.carrier_size == 21
    assert rep.omega_ok and rep.n_is_normal and rep.semidirect_ok
    assert rep.order_sigma == rep.order_n * rep.order_gamma0
    assert rep.order_gamma0 == 3
    # N collects one translation per fiber choice: |N| = 7^3
    assert rep.order_n == 343
    assert rep.complement_trivial_meet


def test_sigma_group_case_regular_representation(trivial_loop, group21_loop):
    rep = sigma_group(trivial_loop)
    assert rep.order_sigma == 3  # K^n acting on itself
    rep = sigma_group(group21_loop)
    assert rep.order_sigma == 21  # a group acts regularly on itself
    assert rep.order_n == 7


def test_dee_abelian_and_fiberwise(loop39a):
    rep = dee_subgroup(loop39a)
    assert rep.abelian
    assert rep.inside_kernel and rep.fiberwise_translation
    assert rep.order_s == 7
    assert rep.order_dee == 343


def test_dee_trivial_group(trivial_loop):
    rep = dee_subgroup(trivial_loop)
    assert rep.order_s == rep.order_dee == 3  # D = S here


def test_phi_operators_invertible(loop39a):
    for op in phi_operators(loop39a):
        op.matrix.inv()


def test_phi_rank_scalar_case(loop39a, trivial_loop):
    assert phi_family_rank(loop39a) == 1
    assert phi_family_rank(trivial_loop) == 1


def test_phi_rank_32_with_minor_oracle(loop32):
    rank = phi_family_rank(loop32)
    assert rank >= 2
    rows = []
    for mi in range(len(loop32.closure)):
        op = loop32._f_inv(mi) * loop32.gamma.delta_matrix(mi)
        rows.append([x for row in op.rows for x in row])
    assert rank == minor_rank(rows, loop32.field)


def test_phi_rank_reorder_invariant(loop32):
    rank = phi_family_rank(loop32)
    from loopforge.linalg import rank_of_rows

    rows = []
    for mi in range(len(loop32.closure)):
        op = loop32._f_inv(mi) * loop32.gamma.delta_matrix(mi)
        rows.append([x for row in op.rows for x in row])
    assert rank_of_rows(list(reversed(rows)), loop32.field) == rank
    assert rank_of_rows(rows[1::2] + rows[::2], loop32.field) == rank


def test_phi_rank_rejects_float_fields():
    from loopforge import EndoDesc, GroupDesc, Loop, LoopSpec, RealField, SquareMatrix

    r = RealField()
    spec = LoopSpec(r, 1, SquareMatrix(r, [[3.0]]), SquareMatrix(r, [[1.0]]),
                    GroupDesc(r, 1, []), EndoDesc("identity"))
    with pytest.raises(LoopforgeError):
        phi_family_rank(Loop(spec))


def test_sigma_report_text(loop39a):
    text = sigma_report_text(loop39a)
    assert "|Sigma| = 1029" in text
    assert "phi family rank: 1" in text
    assert text == sigma_report_text(loop39a)
