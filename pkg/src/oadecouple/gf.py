"""Arithmetic in prime-power finite fields GF(p^m).

Elements are plain integers in [0, p^m).  The base-p digits of an
element are the coefficients of its polynomial representative, least
significant digit first, so digit i is the coefficient of x^i.

Every field uses a canonical modulus: the monic irreducible polynomial
of degree m whose integer encoding is smallest, found by exhaustive
search with trial division.  Constructions that consume a field (the
orthogonal-array builders in particular) are therefore reproducible
across runs and platforms.  Orders are capped at MAX_ORDER, which is
plenty for the arrays this package works with, and small enough that
full operation tables are cheap to precompute.
"""

from __future__ import annotations

import numpy as np

#: Largest supported field order p^m.
MAX_ORDER = 256

#: Field elements are integers in [0, p^m).
FieldElement = int


def is_prime(n: int) -> bool:
    if n < 2:
        return False
    i = 2
    while i * i <= n:
        if n % i == 0:
            return False
        i += 1
    return True


def _to_digits(value: int, p: int, width: int) -> list[int]:
    digits = []
    for _ in range(width):
        digits.append(value % p)
        value //= p
    return digits


def _from_digits(digits, p: int) -> int:
    value = 0
    for d in reversed(digits):
        value = value * p + d
    return value


def _poly_trim(poly: list[int]) -> list[int]:
    while len(poly) > 1 and poly[-1] == 0:
        poly.pop()
    return poly


def _poly_mul(a, b, p: int) -> list[int]:
    out = [0] * (len(a) + len(b) - 1)
    for i, ai in enumerate(a):
        if ai == 0:
            continue
        for j, bj in enumerate(b):
            out[i + j] = (out[i + j] + ai * bj) % p
    return _poly_trim(out)


def _poly_mod(a, b, p: int) -> list[int]:
    """Remainder of a modulo b over GF(p); b must have a nonzero lead."""
    a = _poly_trim(list(a))
    b = _poly_trim(list(b))
    deg_b = len(b) - 1
    lead_inv = pow(b[-1], -1, p)
    while len(a) - 1 >= deg_b and not (len(a) == 1 and a[0] == 0):
        shift = len(a) - 1 - deg_b
        factor = (a[-1] * lead_inv) % p
        for i, bi in enumerate(b):
            a[shift + i] = (a[shift + i] - factor * bi) % p
        _poly_trim(a)
    return a


def _is_irreducible(poly, p: int) -> bool:
    """Trial division by every monic polynomial of degree <= deg/2."""
    degree = len(poly) - 1
    if degree < 1:
        return False
    for div_degree in range(1, degree // 2 + 1):
        for tail in range(p**div_degree):
            divisor = _to_digits(tail, p, div_degree) + [1]
            remainder = _poly_mod(poly, divisor, p)
            if remainder == [0]:
                return False
    return True


def _find_modulus(p: int, m: int) -> tuple[int, ...]:
    """Smallest-encoding monic irreducible of degree m over GF(p)."""
    for tail in range(p**m):
        candidate = _to_digits(tail, p, m) + [1]
        if _is_irreducible(candidate, p):
            return tuple(candidate)
    raise AssertionError(f"no irreducible polynomial of degree {m} over GF({p})")


def poly_str(coeffs) -> str:
    """Human-readable polynomial, e.g. (1, 1, 1) -> 'x^2 + x + 1'."""
    parts = []
    for power in range(len(coeffs) - 1, -1, -1):
        c = coeffs[power]
        if c == 0:
            continue
        if power == 0:
            parts.append(str(c))
        elif power == 1:
            parts.append("x" if c == 1 else f"{c}x")
        else:
            parts.append(f"x^{power}" if c == 1 else f"{c}x^{power}")
    return " + ".join(parts) if parts else "0"


class Field:
    """GF(p^m) with precomputed addition, multiplication and inverse tables."""

    def __init__(self, p: int, m: int):
        if not is_prime(p):
            raise ValueError(f"characteristic must be prime, got {p}")
        if m < 1:
            raise ValueError(f"extension degree must be >= 1, got {m}")
        order = p**m
        if order > MAX_ORDER:
            raise ValueError(f"field order {order} exceeds the cap {MAX_ORDER}")
        self.p = p
        self.m = m
        self.order = order
        self.modulus = _find_modulus(p, m)
        self._build_tables()

    def _build_tables(self) -> None:
        p, m, order = self.p, self.m, self.order
        digits = np.array([_to_digits(e, p, m) for e in range(order)], dtype=np.int64)
        powers = p ** np.arange(m, dtype=np.int64)
        summed = (digits[:, None, :] + digits[None, :, :]) % p
        self.add_table = (summed * powers).sum(axis=2)
        self.neg_table = np.array(
            [_from_digits([(-d) % p for d in _to_digits(e, p, m)], p) for e in range(order)],
            dtype=np.int64,
        )
        mul = np.zeros((order, order), dtype=np.int64)
        modulus = list(self.modulus)
        polys = [_to_digits(e, p, m) for e in range(order)]
        for a in range(order):
            for b in range(a, order):
                prod = _poly_mod(_poly_mul(polys[a], polys[b], p), modulus, p)
                value = _from_digits(prod, p)
                mul[a, b] = value
                mul[b, a] = value
        self.mul_table = mul
        inv = np.zeros(order, dtype=np.int64)
        for a in range(1, order):
            hits = np.nonzero(mul[a] == 1)[0]
            if hits.size != 1:
                raise AssertionError(f"element {a} of GF({order}) lacks a unique inverse")
            inv[a] = hits[0]
        self.inv_table = inv

    def _check(self, a: int) -> int:
        if not 0 <= a < self.order:
            raise ValueError(f"{a} is not an element of {self!r}")
        return a

    def add(self, a: int, b: int) -> int:
        return int(self.add_table[self._check(a), self._check(b)])

    def neg(self, a: int) -> int:
        return int(self.neg_table[self._check(a)])

    def sub(self, a: int, b: int) -> int:
        return self.add(a, self.neg(b))

    def mul(self, a: int, b: int) -> int:
        return int(self.mul_table[self._check(a), self._check(b)])

    def inv(self, a: int) -> int:
        if self._check(a) == 0:
            raise ZeroDivisionError("zero has no multiplicative inverse")
        return int(self.inv_table[a])

    @property
    def elements(self) -> range:
        return range(self.order)

    def __eq__(self, other) -> bool:
        return isinstance(other, Field) and (self.p, self.m) == (other.p, other.m)

    def __hash__(self) -> int:
        return hash((self.p, self.m))

    def __repr__(self) -> str:
        return f"GF({self.order})"


def field_for_order(order: int) -> Field:
    """Field of the given prime-power order."""
    if order < 2:
        raise ValueError(f"field order must be >= 2, got {order}")
    p = 2
    while p * p <= order:
        if order % p == 0:
            break
        p += 1
    else:
        return Field(order, 1)
    m = 0
    rest = order
    while rest % p == 0:
        rest //= p
        m += 1
    if rest != 1:
        raise ValueError(f"{order} is not a prime power")
    return Field(p, m)
