"""Scalar fields: GF(p), GF(p^2), the rationals, and float real/complex.

All five kinds share one interface so the linear algebra layer stays
field-generic.  Exact kinds never touch floats: prime residues are ints,
quadratic-extension elements are residue pairs reduced modulo a validated
irreducible polynomial, rationals are `fractions.Fraction` (always reduced,
positive denominator).  Elements are immutable wrappers carrying a reference
to their field; mixing fields raises FieldMismatch.
"""

from __future__ import annotations

from fractions import Fraction

from .errors import DivisionByZero, FieldMismatch

PRIME_CAP = 2**31


def is_prime(p: int) -> bool:
    if p < 2:
        return False
    if p % 2 == 0:
        return p == 2
    d = 3
    while d * d <= p:
        if p % d == 0:
            return False
        d += 2
    return True


class FieldElement:
    """Immutable element of a Field; arithmetic delegates to the field."""

    __slots__ = ("field", "val")

    def __init__(self, field, val):
        self.field = field
        self.val = val

    def _coerce(self, other):
        if isinstance(other, FieldElement):
            if other.field is not self.field and other.field != self.field:
                raise FieldMismatch(f"{self.field} vs {other.field}")
            return other.val
        if isinstance(other, (int, Fraction)) and not isinstance(other, bool):
            return self.field.element(other).val
        return None

    def __add__(self, other):
        v = self._coerce(other)
        if v is None:
            return NotImplemented
        return FieldElement(self.field, self.field.add(self.val, v))

    __radd__ = __add__

    def __sub__(self, other):
        v = self._coerce(other)
        if v is None:
            return NotImplemented
        return FieldElement(self.field, self.field.sub(self.val, v))

    def __rsub__(self, other):
        v = self._coerce(other)
        if v is None:
            return NotImplemented
        return FieldElement(self.field, self.field.sub(v, self.val))

    def __mul__(self, other):
        v = self._coerce(other)
        if v is None:
            return NotImplemented
        return FieldElement(self.field, self.field.mul(self.val, v))

    __rmul__ = __mul__

    def __truediv__(self, other):
        v = self._coerce(other)
        if v is None:
            return NotImplemented
        return FieldElement(self.field, self.field.div(self.val, v))

    def __rtruediv__(self, other):
        v = self._coerce(other)
        if v is None:
            return NotImplemented
        return FieldElement(self.field, self.field.div(v, self.val))

    def __neg__(self):
        return FieldElement(self.field, self.field.neg(self.val))

    def inv(self) -> "FieldElement":
        return FieldElement(self.field, self.field.inv(self.val))

    def is_zero(self) -> bool:
        return self.field.is_zero(self.val)

    def __eq__(self, other):
        if isinstance(other, FieldElement):
            if self.field is other.field or self.field == other.field:
                return self.val == other.val
            return False
        if isinstance(other, (int, Fraction)) and not isinstance(other, bool):
            return self.val == self.field.element(other).val
        return NotImplemented

    def __hash__(self):
        return hash((self.field.desc(), self.field.enc(self.val)))

    def __repr__(self):
        return f"<{self.field.format(self.val)} in {self.field}>"

    def __str__(self):
        return self.field.format(self.val)


class Field:
    """Abstract base; subclasses implement arithmetic on raw values."""

    kind = "abstract"
    is_exact = True

    # -- raw arithmetic -------------------------------------------------
    def add(self, a, b):
        raise NotImplementedError

    def sub(self, a, b):
        raise NotImplementedError

    def mul(self, a, b):
        raise NotImplementedError

    def div(self, a, b):
        if self.is_zero(b):
            raise DivisionByZero(f"division by zero in {self}")
        return self.mul(a, self.inv(b))

    def neg(self, a):
        raise NotImplementedError

    def inv(self, a):
        raise NotImplementedError

    def is_zero(self, a) -> bool:
        raise NotImplementedError

    # -- element plumbing -----------------------------------------------
    def element(self, x) -> FieldElement:
        """Build an element from a plain Python value."""
        if isinstance(x, FieldElement):
            if x.field != self:
                raise FieldMismatch(f"{self} vs {x.field}")
            return x
        return FieldElement(self, self.canon(x))

    def canon(self, x):
        """Canonical raw value from a Python value."""
        raise NotImplementedError

    def zero(self) -> FieldElement:
        return self.element(0)

    def one(self) -> FieldElement:
        return self.element(1)

    def enc(self, a):
        """Hashable canonical encoding of a raw value."""
        return a

    def sort_key(self, a):
        """Total order used for canonical enumeration."""
        return self.enc(a)

    def mag(self, a) -> float:
        """Pivot size: exact fields only distinguish zero from nonzero."""
        return 0.0 if self.is_zero(a) else 1.0

    def size(self):
        """Number of elements, or None when infinite."""
        return None

    def elements(self):
        """All elements in canonical order (finite fields only)."""
        raise TypeError(f"{self} is not finite")

    def additive_generators(self):
        """Elements whose additive closure is the whole field (finite kinds)."""
        raise TypeError(f"{self} is not finite")

    def format(self, a) -> str:
        return str(a)

    def to_json(self, a):
        return a

    def parse_json(self, obj):
        return self.canon(obj)

    def desc(self) -> tuple:
        raise NotImplementedError

    def __eq__(self, other):
        if self is other:
            return True
        return isinstance(other, Field) and self.desc() == other.desc()

    def __hash__(self):
        return hash(self.desc())


class PrimeField(Field):
    """GF(p) with residues in [0, p)."""

    kind = "prime"

    def __init__(self, p: int):
        if not isinstance(p, int) or not is_prime(p):
            raise ValueError(f"p={p!r} is not prime")
        if p >= PRIME_CAP:
            raise ValueError(f"p={p} exceeds the 2^31 cap")
        self.p = p

    def add(self, a, b):
        return (a + b) % self.p

    def sub(self, a, b):
        return (a - b) % self.p

    def mul(self, a, b):
        return (a * b) % self.p

    def neg(self, a):
        return (-a) % self.p

    def inv(self, a):
        if a == 0:
            raise DivisionByZero(f"inverse of 0 in {self}")
        return pow(a, self.p - 2, self.p)

    def is_zero(self, a):
        return a == 0

    def canon(self, x):
        if isinstance(x, Fraction):
            if x.denominator % self.p == 0:
                raise DivisionByZero(f"{x} has no image in {self}")
            return self.div(x.numerator % self.p, x.denominator % self.p)
        if not isinstance(x, int) or isinstance(x, bool):
            raise TypeError(f"cannot build a {self} element from {x!r}")
        return x % self.p

    def size(self):
        return self.p

    def elements(self):
        return [FieldElement(self, v) for v in range(self.p)]

    def additive_generators(self):
        return [self.one()]

    def desc(self):
        return ("prime", self.p)

    def __repr__(self):
        return f"GF({self.p})"


class QuadraticField(Field):
    """GF(p^2) as GF(p)[w] / (w^2 + c1*w + c0), elements (a0, a1) = a0 + a1*w.

    The polynomial must have no root mod p (degree 2, so that is
    irreducibility).
    """

    kind = "quadratic"

    def __init__(self, p: int, poly: tuple):
        if not isinstance(p, int) or not is_prime(p):
            raise ValueError(f"p={p!r} is not prime")
        if p >= PRIME_CAP:
            raise ValueError(f"p={p} exceeds the 2^31 cap")
        c0, c1 = (int(c) % p for c in poly)
        for r in range(p):
            if (r * r + c1 * r + c0) % p == 0:
                raise ValueError(
                    f"w^2 + {c1}w + {c0} has root {r} mod {p}; not irreducible"
                )
        self.p = p
        self.c0 = c0
        self.c1 = c1

    def add(self, a, b):
        p = self.p
        return ((a[0] + b[0]) % p, (a[1] + b[1]) % p)

    def sub(self, a, b):
        p = self.p
        return ((a[0] - b[0]) % p, (a[1] - b[1]) % p)

    def mul(self, a, b):
        # (a0 + a1 w)(b0 + b1 w) with w^2 = -c1 w - c0
        p = self.p
        hi = a[1] * b[1]
        return (
            (a[0] * b[0] - self.c0 * hi) % p,
            (a[0] * b[1] + a[1] * b[0] - self.c1 * hi) % p,
        )

    def neg(self, a):
        p = self.p
        return ((-a[0]) % p, (-a[1]) % p)

    def inv(self, a):
        a0, a1 = a
        if a0 == 0 and a1 == 0:
            raise DivisionByZero(f"inverse of 0 in {self}")
        # Solve (a0 + a1 w)(b0 + b1 w) = 1; the 2x2 system has determinant
        # a0^2 - c1 a0 a1 + c0 a1^2, nonzero by irreducibility.
        p = self.p
        d = (a0 * a0 - self.c1 * a0 * a1 + self.c0 * a1 * a1) % p
        di = pow(d, p - 2, p)
        return (((a0 - self.c1 * a1) * di) % p, (-a1 * di) % p)

    def is_zero(self, a):
        return a == (0, 0)

    def canon(self, x):
        if isinstance(x, int) and not isinstance(x, bool):
            return (x % self.p, 0)
        if isinstance(x, (tuple, list)) and len(x) == 2:
            return (int(x[0]) % self.p, int(x[1]) % self.p)
        raise TypeError(f"cannot build a {self} element from {x!r}")

    def generator(self) -> FieldElement:
        """The adjoined root w."""
        return FieldElement(self, (0, 1))

    def subfield_values(self):
        return [FieldElement(self, (v, 0)) for v in range(self.p)]

    def enc(self, a):
        return a[0] + self.p * a[1]

    def size(self):
        return self.p * self.p

    def elements(self):
        return [
            FieldElement(self, (a0, a1))
            for a1 in range(self.p)
            for a0 in range(self.p)
        ]

    def additive_generators(self):
        return [self.one(), self.generator()]

    def format(self, a):
        if a[1] == 0:
            return str(a[0])
        return f"{a[0]}+{a[1]}w"

    def to_json(self, a):
        return [a[0], a[1]]

    def desc(self):
        return ("quadratic", self.p, self.c0, self.c1)

    def __repr__(self):
        return f"GF({self.p}^2)"


class RationalField(Field):
    """The rationals; Fraction keeps every value reduced with positive denominator."""

    kind = "rational"

    def add(self, a, b):
        return a + b

    def sub(self, a, b):
        return a - b

    def mul(self, a, b):
        return a * b

    def neg(self, a):
        return -a

    def inv(self, a):
        if a == 0:
            raise DivisionByZero("inverse of 0 in Q")
        return 1 / a

    def is_zero(self, a):
        return a == 0

    def canon(self, x):
        if isinstance(x, bool):
            raise TypeError("bool is not a rational")
        if isinstance(x, (int, Fraction)):
            return Fraction(x)
        if isinstance(x, str):
            return Fraction(x)
        raise TypeError(f"cannot build a rational from {x!r}")

    def enc(self, a):
        return (a.numerator, a.denominator)

    def sort_key(self, a):
        return a

    def to_json(self, a):
        return f"{a.numerator}/{a.denominator}"

    def desc(self):
        return ("rational",)

    def __repr__(self):
        return "Q"


class RealField(Field):
    """Machine doubles; used by the numeric modules, never by exact paths."""

    kind = "real"
    is_exact = False

    def add(self, a, b):
        return a + b

    def sub(self, a, b):
        return a - b

    def mul(self, a, b):
        return a * b

    def neg(self, a):
        return -a

    def inv(self, a):
        if a == 0.0:
            raise DivisionByZero("inverse of 0.0")
        return 1.0 / a

    def is_zero(self, a):
        return a == 0.0

    def canon(self, x):
        if isinstance(x, bool):
            raise TypeError("bool is not a real")
        if isinstance(x, (int, float, Fraction)):
            return float(x)
        raise TypeError(f"cannot build a real from {x!r}")

    def mag(self, a):
        return abs(a)

    def desc(self):
        return ("real",)

    def __repr__(self):
        return "R"


class ComplexField(Field):
    """Machine complex doubles."""

    kind = "complex"
    is_exact = False

    def add(self, a, b):
        return a + b

    def sub(self, a, b):
        return a - b

    def mul(self, a, b):
        return a * b

    def neg(self, a):
        return -a

    def inv(self, a):
        if a == 0:
            raise DivisionByZero("inverse of 0j")
        return 1.0 / a

    def is_zero(self, a):
        return a == 0

    def canon(self, x):
        if isinstance(x, bool):
            raise TypeError("bool is not a complex")
        if isinstance(x, (int, float, complex, Fraction)):
            return complex(x)
        if isinstance(x, (tuple, list)) and len(x) == 2:
            return complex(float(x[0]), float(x[1]))
        raise TypeError(f"cannot build a complex from {x!r}")

    def enc(self, a):
        return (a.real, a.imag)

    def sort_key(self, a):
        return (a.real, a.imag)

    def mag(self, a):
        return abs(a)

    def to_json(self, a):
        return [a.real, a.imag]

    def desc(self):
        return ("complex",)

    def __repr__(self):
        return "C"


def fe_arith(a: FieldElement, b: FieldElement, op: str) -> FieldElement:
    """Field arithmetic dispatch: op in {add, sub, mul, div}."""
    if not isinstance(a, FieldElement) or not isinstance(b, FieldElement):
        raise TypeError("fe_arith expects FieldElement operands")
    if a.field != b.field:
        raise FieldMismatch(f"{a.field} vs {b.field}")
    if op == "add":
        return a + b
    if op == "sub":
        return a - b
    if op == "mul":
        return a * b
    if op == "div":
        return a / b
    raise ValueError(f"unknown op {op!r}")
