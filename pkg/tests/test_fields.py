from fractions import Fraction

import pytest

from loopforge import (
    ComplexField,
    DivisionByZero,
    FieldMismatch,
    PrimeField,
    QuadraticField,
    RationalField,
    RealField,
    fe_arith,
)


def test_prime_field_basics():
    f = PrimeField(7)
    assert (f.element(5) * f.element(3)).val == 1  # 15 mod 7
    assert (f.element(2) - f.element(5)).val == 4
    assert f.element(-1).val == 6


def test_prime_field_inverses_exhaustive():
    for p in (2, 3, 5, 7, 11):
        f = PrimeField(p)
        for a in range(1, p):
            inv = f.element(a).inv()
            assert (f.element(a) * inv).val == 1


def test_prime_field_rejects_composites_and_large_p():
    with pytest.raises(ValueError):
        PrimeField(6)
    with pytest.raises(ValueError):
        PrimeField(1)
    with pytest.raises(ValueError):
        PrimeField(2**31 + 11)


def test_division_by_zero():
    f = PrimeField(5)
    with pytest.raises(DivisionByZero):
        f.element(3) / f.element(0)
    with pytest.raises(DivisionByZero):
        f.element(0).inv()


def test_field_mismatch():
    a = PrimeField(5).element(2)
    b = PrimeField(7).element(2)
    with pytest.raises(FieldMismatch):
        a + b
    assert a != b


def test_rational_arithmetic():
    q = RationalField()
    s = q.element("2/3") + q.element("1/6")
    assert s.val == Fraction(5, 6)
    # always reduced with positive denominator
    v = (q.element("4/6") * q.element("-3/2")).val
    assert v == Fraction(-1, 1)
    assert v.denominator > 0


def test_quadratic_field_reduction():
    # GF(25) with w^2 + 2 irreducible: w * w = -2 = 3.
    f = QuadraticField(5, (2, 0))
    w = f.generator()
    prod = w * w
    # oracle: multiply as polynomials, reduce by w^2 = -2 by hand
    assert prod.val == (3, 0)


def test_quadratic_field_general_poly_oracle():
    # w^2 + w + 2 over GF(5) (roots: r^2+r+2 != 0 for all r).
    f = QuadraticField(5, (2, 1))

    def poly_mul(a, b):
        # (a0 + a1 w)(b0 + b1 w) reduced by w^2 = -w - 2, all mod 5
        c0 = a[0] * b[0]
        c1 = a[0] * b[1] + a[1] * b[0]
        c2 = a[1] * b[1]
        return ((c0 - 2 * c2) % 5, (c1 - c2) % 5)

    for a0 in range(5):
        for a1 in range(5):
            for b0 in range(5):
                for b1 in range(5):
                    got = f.mul((a0, a1), (b0, b1))
                    assert got == poly_mul((a0, a1), (b0, b1))


def test_quadratic_irreducibility_check():
    with pytest.raises(ValueError):
        QuadraticField(5, (4, 0))  # w^2 + 4 has root 1 mod 5


def test_quadratic_inverses_exhaustive():
    f = QuadraticField(5, (2, 0))
    one = f.one()
    count = 0
    for e in f.elements():
        if e.is_zero():
            continue
        count += 1
        assert e * e.inv() == one
    assert count == 24


def test_quadratic_field_axioms_gf9():
    f = QuadraticField(3, (1, 0))
    elems = f.elements()
    assert len(elems) == 9
    for a in elems:
        for b in elems:
            assert a + b == b + a
            assert a * b == b * a
            for c in elems:
                assert (a * (b + c)) == a * b + a * c
                assert (a * b) * c == a * (b * c)


def test_fe_arith_dispatch():
    f = PrimeField(7)
    assert fe_arith(f.element(5), f.element(3), "mul").val == 1
    assert fe_arith(f.element(5), f.element(3), "add").val == 1
    assert fe_arith(f.element(5), f.element(3), "sub").val == 2
    assert fe_arith(f.element(5), f.element(3), "div").val == 4  # 5 * 3^-1 = 5*5
    with pytest.raises(ValueError):
        fe_arith(f.element(1), f.element(1), "pow")


def test_float_fields():
    r = RealField()
    assert (r.element(2) / r.element(4)).val == 0.5
    c = ComplexField()
    assert (c.element([0.0, 1.0]) * c.element([0.0, 1.0])).val == -1 + 0j
    with pytest.raises(DivisionByZero):
        r.element(1.0) / r.element(0.0)


def test_canonical_enumeration_orders():
    f = PrimeField(5)
    assert [e.val for e in f.elements()] == [0, 1, 2, 3, 4]
    q = QuadraticField(3, (1, 0))
    encs = [q.enc(e.val) for e in q.elements()]
    assert encs == sorted(encs) == list(range(9))


def test_additive_generators_span():
    q = QuadraticField(3, (1, 0))
    gens = q.additive_generators()
    span = {q.zero().val}
    frontier = [q.zero()]
    while frontier:
        new = []
        for x in frontier:
            for g in gens:
                y = x + g
                if y.val not in span:
                    span.add(y.val)
                    new.append(y)
        frontier = new
    assert len(span) == 9
