import random

import pytest

from loopforge import (
    CapExceeded,
    LoopSpec,
    EndoDesc,
    GroupDesc,
    Loop,
    PrimeField,
    RationalField,
    SquareMatrix,
    cayley_table,
    check_eligibility,
    find_nonassoc_witness,
    inverse_property_witnesses,
    latin_square_verdict,
    left_translation_group_report,
    parse_cayley_csv,
    theta_subspace,
    verify_loop_axioms,
    verify_sharp_transitivity,
)
from loopforge.catalog import build
from loopforge.loops import CAYLEY_HEADER, element_label, psi_associativity
from loopforge.linalg import vec_key, vector

from helpers import (
    brute_divisions,
    ineligible_spec,
    scalar_group_spec,
    theta_strict_spec,
    trivial_spec,
)


def scalar(f, v):
    return SquareMatrix(f, [[v]])


# -- eligibility -----------------------------------------------------------

def test_eligibility_39a_values(loop39a):
    rep = loop39a.eligibility
    assert rep.eligible and not rep.is_group
    assert rep.violations == []
    f = loop39a.field
    s_vals = []
    for mi, m in enumerate(loop39a.closure.elements):
        s = m.inv() * loop39a.spec.B.inv() * loop39a.gamma.delta_matrix(mi) * loop39a.spec.A
        s_vals.append(s.rows[0][0].val)
    assert s_vals == [3, 6, 5]
    assert rep.tb_prime_full and rep.witness_M0 is not None


def test_eligibility_trivial_group(trivial_loop):
    rep = trivial_loop.eligibility
    assert rep.eligible and rep.is_group


def test_eligibility_failure_A_equals_B():
    rep = check_eligibility(ineligible_spec())
    assert not rep.eligible
    assert len(rep.violations) >= 1
    # S_I = B^-1 A = I is among the violations
    ms = {m.rows[0][0].val for m, _ in rep.violations}
    assert 1 in ms


# -- psi and the basic operations -------------------------------------------

def test_psi_identity_first_argument(loop39a):
    g = len(loop39a.closure)
    ident = SquareMatrix.identity(loop39a.field, 1)
    for j in range(g):
        assert loop39a.psi(0, j) == ident


def test_psi_canonical_value(loop39a):
    f = loop39a.field
    assert loop39a.psi_matrix(scalar(f, 2), scalar(f, 4)) == scalar(f, 1)


def test_psi_zero_endo_closed_form():
    # n = 1 with the zero endomorphism: M^delta = 1 throughout, so
    # psi(m1, m2) = [b - a (m1 m2)^-1]^-1 (b - a m2^-1).
    f = PrimeField(11)
    a, b = f.element(2), f.element(5)
    loop = Loop(
        LoopSpec(f, 1, scalar(f, 2), scalar(f, 5),
                 GroupDesc(f, 1, [scalar(f, 3)]), EndoDesc("zero"))
    )
    assert loop.eligibility.eligible
    for i, m1 in enumerate(loop.closure.elements):
        for j, m2 in enumerate(loop.closure.elements):
            prod = m1.rows[0][0] * m2.rows[0][0]
            want = (b - a * m2.rows[0][0].inv()) / (b - a * prod.inv())
            assert loop.psi(i, j).rows[0][0] == want
    assert loop.psi(0, 2) == SquareMatrix.identity(f, 1)  # psi(I, .) = I


def test_psi_never_singular_when_eligible(loop39a, loop32):
    for loop in (loop39a, loop32):
        g = len(loop.closure)
        for i in range(g):
            for j in range(g):
                loop.psi_inv(i, j)  # raises SingularPsi on failure


def test_loop_mul_examples(loop39a):
    f = loop39a.field
    x = loop39a.element([1], scalar(f, 2))
    y = loop39a.element([1], scalar(f, 4))
    z = loop39a.mul(x, y)
    assert z == loop39a.element([2], scalar(f, 1))
    e = loop39a.identity_element()
    for w in loop39a.carrier():
        assert loop39a.mul(e, w) == w
        assert loop39a.mul(w, e) == w


def test_divisions_examples(loop39a):
    f = loop39a.field
    x = loop39a.element([1], scalar(f, 2))
    z = loop39a.element([2], scalar(f, 1))
    y = loop39a.element([1], scalar(f, 4))
    assert loop39a.left_div(x, z) == y
    assert loop39a.right_div(z, y) == x
    e = loop39a.identity_element()
    for a in loop39a.carrier()[:7]:
        assert loop39a.left_div(a, a) == e
        assert loop39a.left_div(e, a) == a
        assert loop39a.right_div(a, a) == e
        assert loop39a.right_div(a, e) == a


def test_divisions_match_brute_force_table(loop39a):
    carrier = loop39a.carrier()
    index, ldiv, rdiv = brute_divisions(loop39a, carrier)
    for i, a in enumerate(carrier):
        for k, b in enumerate(carrier):
            x = loop39a.left_div(a, b)
            assert index[(vec_key(x.u), x.mi)] == ldiv[(i, k)]
            y = loop39a.right_div(b, a)
            assert index[(vec_key(y.u), y.mi)] == rdiv[(k, i)]


# -- section and sharp transitivity -----------------------------------------

def test_section_sigma_values(loop39a):
    f = loop39a.field
    img = loop39a.section_sigma([0], scalar(f, 1))
    assert img == loop39a.gamma.identity()
    # sigma(v, I) = g((B-A)^-1 v, B (B-A)^-1 v, I): B - A = 1 - 3 = 5, 5^-1 = 3
    img = loop39a.section_sigma([1], scalar(f, 1))
    assert img.u[0].val == 3 and img.v[0].val == 3 and img.mi == 0


def test_sharp_transitivity(loop39a, trivial_loop):
    rep = verify_sharp_transitivity(loop39a)
    assert rep.passed and rep.cosets == 21
    assert rep.closed_form_ok and rep.counts_ok
    assert verify_sharp_transitivity(trivial_loop).passed


def test_sharp_transitivity_cap():
    loop = build("3.2", {"p": 7, "gamma0_gens": [[[2, 0], [0, 1]], [[1, 1], [0, 1]]],
                         "B": [[1, 0], [0, 1]], "t": [3, 2]}).loop
    with pytest.raises(CapExceeded):
        verify_sharp_transitivity(loop, cap=100)


# -- axioms ------------------------------------------------------------------

def test_axioms_39a(loop39a):
    rep = verify_loop_axioms(loop39a)
    assert rep.passed and rep.identity_ok and rep.pairs_checked == 441


def test_axioms_group_case(group21_loop):
    assert verify_loop_axioms(group21_loop).passed


def test_axioms_fast_equals_generic(loop39a, theta_strict_loop):
    for loop in (loop39a, theta_strict_loop):
        fast = verify_loop_axioms(loop)
        slow = verify_loop_axioms(loop, force_generic=True)
        assert (fast.passed, fast.identity_ok, fast.pairs_checked) \
            == (slow.passed, slow.identity_ok, slow.pairs_checked)


def test_axioms_infinite_carrier_raises():
    q = RationalField()
    spec = LoopSpec(
        q, 1, SquareMatrix(q, [[3]]), SquareMatrix(q, [[1]]),
        GroupDesc(q, 1, [SquareMatrix(q, [[-1]])]), EndoDesc("zero"),
    )
    loop = Loop(spec)
    assert loop.eligibility.eligible
    with pytest.raises(CapExceeded):
        verify_loop_axioms(loop)


def test_rational_loop_pointwise_identities():
    q = RationalField()
    spec = LoopSpec(
        q, 1, SquareMatrix(q, [[3]]), SquareMatrix(q, [[1]]),
        GroupDesc(q, 1, [SquareMatrix(q, [[-1]])]), EndoDesc("zero"),
    )
    loop = Loop(spec)
    rng = random.Random(2)
    mats = loop.closure.elements
    for _ in range(50):
        a = loop.element([rng.randrange(-9, 9)], mats[rng.randrange(2)])
        b = loop.element([rng.randrange(-9, 9)], mats[rng.randrange(2)])
        assert loop.mul(a, loop.left_div(a, b)) == b
        assert loop.left_div(a, loop.mul(a, b)) == b
        assert loop.mul(loop.right_div(b, a), a) == b
        assert loop.right_div(loop.mul(b, a), a) == b


# -- witnesses ---------------------------------------------------------------

def test_nonassoc_witness_first_in_canonical_order(loop39a):
    w = find_nonassoc_witness(loop39a)
    assert w is not None
    a, b, c = w
    assert loop39a.mul(loop39a.mul(a, b), c) != loop39a.mul(a, loop39a.mul(b, c))
    carrier = loop39a.carrier()
    # deterministic first triple: a = (0, M_1), b = (1, I), c = (0, M_1)
    assert a == carrier[7] and b == carrier[1] and c == carrier[7]


def test_nonassoc_witness_none_for_groups(trivial_loop, group21_loop):
    assert find_nonassoc_witness(trivial_loop) is None
    assert find_nonassoc_witness(group21_loop) is None


def test_nonassoc_witness_parallel_matches(loop39a):
    loop = Loop(loop39a.spec)  # fresh, so the kernel cache is unused
    loop._kernel = None        # force the generic scan
    seq = find_nonassoc_witness(loop, workers=1)
    par = find_nonassoc_witness(loop, workers=4)
    assert seq == par == find_nonassoc_witness(loop39a)


def test_inverse_property_witnesses(loop39a, group21_loop):
    rep = inverse_property_witnesses(loop39a)
    assert rep.lip is not None and rep.rip is not None
    x, y = rep.lip
    e = loop39a.identity_element()
    xinv = loop39a.left_div(x, e)
    assert loop39a.mul(xinv, loop39a.mul(x, y)) != y
    x, y = rep.rip
    xinv = loop39a.right_div(e, x)
    assert loop39a.mul(loop39a.mul(y, x), xinv) != y
    grp = inverse_property_witnesses(group21_loop)
    assert grp.lip is None and grp.rip is None
    assert grp.lip_alt is None and grp.rip_alt is None


def test_inverse_property_fast_equals_generic(loop39a):
    fast = inverse_property_witnesses(loop39a)
    slow = inverse_property_witnesses(loop39a, force_generic=True)
    assert (fast.lip, fast.rip, fast.lip_alt, fast.rip_alt) \
        == (slow.lip, slow.rip, slow.lip_alt, slow.rip_alt)


# -- the associativity / criterion gap ---------------------------------------

def test_psi_associativity_matches_witness(loop39a, group21_loop, loop32):
    assert not psi_associativity(loop39a)
    assert psi_associativity(group21_loop)
    assert not psi_associativity(loop32)


def test_group_criterion_is_strictly_stronger_than_associativity():
    """The normality criterion behind is_group can fail on an associative
    instance when the theta subgroup is nontrivial; the triangular family
    with d = 0 is such a case (verified here by full enumeration)."""
    res = build("3.6", {"p": 3, "omega_gen": 1, "d": 0, "a": 1, "r": 2,
                        "s": 1, "b": 1})
    loop = res.loop
    assert not loop.eligibility.is_group          # criterion fails...
    assert psi_associativity(loop)                # ...yet the loop associates
    assert find_nonassoc_witness(loop) is None    # confirmed exhaustively
    assert len(theta_subspace(loop)) > 0          # the enabling degeneracy
    assert res.proper_expected is False


# -- theta -------------------------------------------------------------------

def test_theta_trivial_for_39a(loop39a):
    assert theta_subspace(loop39a) == []


def test_theta_full_space_for_central_A(trivial_loop):
    basis = theta_subspace(trivial_loop)
    assert len(basis) == 1


def test_theta_strict_line(theta_strict_loop):
    basis = theta_subspace(theta_strict_loop)
    assert len(basis) == 1
    v = basis[0]
    assert v[0].is_zero() and not v[1].is_zero()


def test_theta_elements_stable_under_conjugation(theta_strict_loop):
    from loopforge.loops import theta_elements

    loop = theta_strict_loop
    elems = theta_elements(loop)
    keys = {t.key() for t in elems}
    for g in loop.gamma.enumerate():
        for t in elems:
            assert loop.gamma.conjugate(t, g).key() in keys


# -- left translation group ---------------------------------------------------

def test_translation_group_39a(loop39a):
    rep = left_translation_group_report(loop39a)
    assert rep.order_gamma == 147
    assert rep.order_tb == 7
    assert rep.order_tb_prime == 49 and rep.tb_prime_full
    assert rep.order_delta_prime == 147 and rep.delta_prime_is_gamma
    assert rep.order_theta == 1 and rep.order_theta_cap_delta_prime == 1
    assert rep.order_delta == 147


def test_translation_group_trivial(trivial_loop):
    rep = left_translation_group_report(trivial_loop)
    assert rep.order_tb == 3
    assert rep.order_tb_prime == 3  # T_B already normal: Gamma abelian here
    assert rep.order_delta_prime == 3


def test_translation_group_matches_witness_flag(theta_strict_loop):
    rep = left_translation_group_report(theta_strict_loop)
    assert rep.tb_prime_full == theta_strict_loop.eligibility.tb_prime_full
    assert rep.order_delta * rep.order_theta_cap_delta_prime == rep.order_delta_prime


# -- Cayley tables -------------------------------------------------------------

def test_cayley_trivial_cyclic(trivial_loop):
    table = cayley_table(trivial_loop)
    assert table.labels == ["0|0", "1|0", "2|0"]
    assert table.grid == [[0, 1, 2], [1, 2, 0], [2, 0, 1]]


def test_cayley_39a_latin_and_roundtrip(loop39a):
    table = cayley_table(loop39a)
    assert len(table.labels) == 21
    csv = table.to_csv()
    assert csv.splitlines()[0] == CAYLEY_HEADER
    labels, cells = parse_cayley_csv(csv)
    assert labels == table.labels
    assert latin_square_verdict(labels, cells)
    # determinism: regeneration is byte-identical
    assert cayley_table(loop39a).to_csv() == csv


def test_cayley_fast_equals_generic(theta_strict_loop):
    fast = cayley_table(theta_strict_loop)
    slow = cayley_table(theta_strict_loop, force_generic=True)
    assert fast.labels == slow.labels and fast.grid == slow.grid


def test_cayley_cap():
    loop = build("3.5i").loop
    with pytest.raises(CapExceeded):
        cayley_table(loop)


def test_latin_square_verdict_rejects_bad_tables():
    labels = ["a", "b"]
    assert latin_square_verdict(labels, [["a", "b"], ["b", "a"]])
    assert not latin_square_verdict(labels, [["a", "a"], ["b", "a"]])
    assert not latin_square_verdict(labels, [["a", "b"], ["a", "b"]])
