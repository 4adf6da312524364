"""Generalized Pauli operators X^a Z^b on d-level systems.

A single factor is X^a Z^b with shift and clock exponents a, b in
[0, d), where X|x> = |x+1 mod d> and Z|x> = w^x |x> for w the primitive
d-th root of unity.  An n-factor string stores the two exponent vectors
plus a global phase, kept as an integer exponent of exp(2*pi*i/D) with
D = d for odd d and D = 2d for even d.  That modulus is enough to track
every scalar produced by products, inverses and conjugation without
floating point, including the factor i needed to make qubit XZ factors
Hermitian.

Reordering gives the single commutation rule everything else reduces
to: Z^b X^c = w^(b c) X^c Z^b.  Two strings x, y then obey
x y = w^k y x with k the symplectic form sum_i (b_i c_i - a_i d_i) for
x = X^a Z^b and y = X^c Z^d, so commutation and conjugation scalars are
integer arithmetic on exponents.

The symbol map used when reading strings out of orthogonal-array rows
sends symbol v in {1..d^2} to exponents a = (v-1) // d, b = (v-1) % d.
For qubits this maps 1, 2, 3, 4 to I, Z, X, XZ.
"""

from __future__ import annotations

import cmath
import re
from dataclasses import dataclass

import numpy as np

from .errors import ParseError

#: Cap on the dimension of dense realizations of whole strings.
MAX_DENSE_DIM = 4096

#: Cap on d for single-factor dense matrices.
MAX_QUDIT_DIM = 16


def phase_modulus(d: int) -> int:
    return d if d % 2 else 2 * d


def phase_value(d: int, exponent: int) -> complex:
    """exp(2*pi*i*exponent/D), exact for quarter turns."""
    modulus = phase_modulus(d)
    k = exponent % modulus
    quarter, rem = divmod(4 * k, modulus)
    if rem == 0:
        return (1 + 0j, 1j, -1 + 0j, -1j)[quarter % 4]
    return cmath.exp(2j * cmath.pi * k / modulus)


def _phase_str(d: int, exponent: int) -> str:
    modulus = phase_modulus(d)
    k = exponent % modulus
    quarter, rem = divmod(4 * k, modulus)
    if rem == 0:
        return ("+1", "+i", "-1", "-i")[quarter % 4]
    return f"w^{k}"


@dataclass(frozen=True)
class QuditPauli:
    """A single X^a Z^b factor on a d-level system."""

    d: int
    a: int
    b: int

    def __post_init__(self):
        if self.d < 2:
            raise ValueError(f"need d >= 2, got {self.d}")
        if not (0 <= self.a < self.d and 0 <= self.b < self.d):
            raise ValueError(f"exponents ({self.a}, {self.b}) outside [0, {self.d})")

    @property
    def index(self) -> int:
        """Symbol in {1..d^2}: 1 + a*d + b."""
        return 1 + self.a * self.d + self.b

    @classmethod
    def from_index(cls, d: int, index: int) -> "QuditPauli":
        if not 1 <= index <= d * d:
            raise ValueError(f"symbol {index} outside 1..{d * d}")
        return cls(d, (index - 1) // d, (index - 1) % d)


def matrix_of(p: QuditPauli) -> np.ndarray:
    """Dense d x d matrix of X^a Z^b."""
    if p.d > MAX_QUDIT_DIM:
        raise ValueError(f"d={p.d} exceeds the dense cap {MAX_QUDIT_DIM}")
    kappa = phase_modulus(p.d) // p.d
    m = np.zeros((p.d, p.d), dtype=complex)
    for col in range(p.d):
        m[(col + p.a) % p.d, col] = phase_value(p.d, kappa * p.b * col)
    return m


def _token(a: int, b: int) -> str:
    if a == 0 and b == 0:
        return "I"
    part_x = "" if a == 0 else ("X" if a == 1 else f"X{a}")
    part_z = "" if b == 0 else ("Z" if b == 1 else f"Z{b}")
    return part_x + part_z


@dataclass(frozen=True)
class PauliString:
    """Tensor product of X^a Z^b factors with a tracked global phase."""

    d: int
    xs: tuple[int, ...]
    zs: tuple[int, ...]
    phase_exp: int = 0

    def __post_init__(self):
        if self.d < 2:
            raise ValueError(f"need d >= 2, got {self.d}")
        xs = tuple(int(x) for x in self.xs)
        zs = tuple(int(z) for z in self.zs)
        if len(xs) != len(zs) or not xs:
            raise ValueError("xs and zs must be nonempty and equally long")
        if any(not 0 <= e < self.d for e in xs + zs):
            raise ValueError(f"exponents must lie in [0, {self.d})")
        object.__setattr__(self, "xs", xs)
        object.__setattr__(self, "zs", zs)
        object.__setattr__(self, "phase_exp", self.phase_exp % phase_modulus(self.d))

    @property
    def n(self) -> int:
        return len(self.xs)

    @property
    def weight(self) -> int:
        return sum(1 for a, b in zip(self.xs, self.zs) if a or b)

    @property
    def is_identity(self) -> bool:
        return self.weight == 0

    @property
    def factors(self) -> tuple[QuditPauli, ...]:
        return tuple(QuditPauli(self.d, a, b) for a, b in zip(self.xs, self.zs))

    def phase(self) -> complex:
        return phase_value(self.d, self.phase_exp)

    def inverse(self) -> "PauliString":
        d = self.d
        kappa = phase_modulus(d) // d
        xs = tuple((-a) % d for a in self.xs)
        zs = tuple((-b) % d for b in self.zs)
        cross = sum(b * a2 for b, a2 in zip(self.zs, xs))
        return PauliString(d, xs, zs, -(self.phase_exp + kappa * cross))

    def to_matrix(self) -> np.ndarray:
        dim = self.d**self.n
        if dim > MAX_DENSE_DIM:
            raise ValueError(f"dense dimension {dim} exceeds the cap {MAX_DENSE_DIM}")
        m = np.array([[self.phase()]], dtype=complex)
        for factor in self.factors:
            m = np.kron(m, matrix_of(factor))
        return m

    def x_mask(self) -> int:
        """X exponents as a bit mask over basis-state indices (d=2 only).

        Qudit 0 is the leftmost tensor factor and therefore the most
        significant bit of a basis-state index.
        """
        if self.d != 2:
            raise ValueError("bit masks are defined for d=2 only")
        n = self.n
        return sum(a << (n - 1 - i) for i, a in enumerate(self.xs))

    def z_mask(self) -> int:
        if self.d != 2:
            raise ValueError("bit masks are defined for d=2 only")
        n = self.n
        return sum(b << (n - 1 - i) for i, b in enumerate(self.zs))

    def __str__(self) -> str:
        tokens = []
        for i, (a, b) in enumerate(zip(self.xs, self.zs)):
            tok = _token(a, b)
            if tok == "I":
                continue
            tokens.append(f"({tok}){i + 1}" if len(tok) > 1 else f"{tok}{i + 1}")
        body = " ".join(tokens) if tokens else "I"
        return f"{_phase_str(self.d, self.phase_exp)} * {body}"


def identity(n: int, d: int) -> PauliString:
    return PauliString(d, (0,) * n, (0,) * n)


def single(n: int, d: int, position: int, a: int, b: int) -> PauliString:
    """String acting as X^a Z^b on one position, identity elsewhere."""
    if not 0 <= position < n:
        raise ValueError(f"position {position} outside 0..{n - 1}")
    xs = [0] * n
    zs = [0] * n
    xs[position] = a
    zs[position] = b
    return PauliString(d, tuple(xs), tuple(zs))


def _check_compatible(x: PauliString, y: PauliString) -> None:
    if x.d != y.d:
        raise ValueError(f"mixed qudit dimensions {x.d} and {y.d}")
    if x.n != y.n:
        raise ValueError(f"mixed string lengths {x.n} and {y.n}")


def multiply(x: PauliString, y: PauliString) -> PauliString:
    """Product x*y with the exact reordering phase."""
    _check_compatible(x, y)
    d = x.d
    kappa = phase_modulus(d) // d
    cross = sum(b * c for b, c in zip(x.zs, y.xs))
    xs = tuple((a + c) % d for a, c in zip(x.xs, y.xs))
    zs = tuple((b + e) % d for b, e in zip(x.zs, y.zs))
    return PauliString(d, xs, zs, x.phase_exp + y.phase_exp + kappa * cross)


def symplectic_exponent(x: PauliString, y: PauliString) -> int:
    """k in x y = w^k y x, reduced mod d."""
    _check_compatible(x, y)
    d = x.d
    k = sum(b * c - a * e for a, b, c, e in zip(x.xs, x.zs, y.xs, y.zs))
    return k % d


def commutes(x: PauliString, y: PauliString) -> tuple[bool, int]:
    k = symplectic_exponent(x, y)
    return (k == 0, k)


def conjugate_term(u: PauliString, h: PauliString) -> PauliString:
    """u h u^dagger, which is h times the scalar w^k from the symplectic form."""
    d = u.d
    kappa = phase_modulus(d) // d
    k = symplectic_exponent(u, h)
    return PauliString(d, h.xs, h.zs, h.phase_exp + kappa * k)


def string_from_oa_row(row, d: int) -> PauliString:
    """Decode one orthogonal-array row over s = d^2 symbols into a string."""
    xs = []
    zs = []
    for value in row:
        value = int(value)
        if not 1 <= value <= d * d:
            raise ValueError(f"symbol {value} outside 1..{d * d}; need s = d^2")
        xs.append((value - 1) // d)
        zs.append((value - 1) % d)
    return PauliString(d, tuple(xs), tuple(zs))


_TOKEN_RE = re.compile(r"^(?:\(([^()]+)\)|([XZ]))(\d+)$")
_FACTOR_RE = re.compile(r"^(?:X(\d*))?(?:Z(\d*))?$")


def parse_string(text: str, n: int, d: int) -> PauliString:
    """Inverse of str(); accepts an optional leading phase token."""
    parts = text.strip().split()
    phase_exp = 0
    if "*" in parts:
        star = parts.index("*")
        if star != 1:
            raise ParseError(f"misplaced '*' in {text!r}")
        phase_tok = parts[0]
        table = {"+1": 0, "+i": 1, "-1": 2, "-i": 3}
        if phase_tok in table:
            quarter = table[phase_tok]
            modulus = phase_modulus(d)
            if (quarter * modulus) % 4 != 0:
                raise ParseError(f"phase {phase_tok} not representable for d={d}")
            phase_exp = quarter * modulus // 4
        elif phase_tok.startswith("w^"):
            phase_exp = int(phase_tok[2:])
        else:
            raise ParseError(f"bad phase token {phase_tok!r}")
        parts = parts[star + 1 :]
    xs = [0] * n
    zs = [0] * n
    if parts == ["I"]:
        parts = []
    for tok in parts:
        m = _TOKEN_RE.match(tok)
        if not m:
            raise ParseError(f"bad factor token {tok!r}")
        inner = m.group(1) or m.group(2)
        position = int(m.group(3)) - 1
        if not 0 <= position < n:
            raise ParseError(f"qudit index {position + 1} outside 1..{n}")
        if xs[position] or zs[position]:
            raise ParseError(f"qudit {position + 1} assigned twice")
        fm = _FACTOR_RE.match(inner)
        if not fm or (fm.group(1) is None and fm.group(2) is None):
            raise ParseError(f"bad factor {inner!r}")
        a = 0 if fm.group(1) is None else int(fm.group(1) or 1)
        b = 0 if fm.group(2) is None else int(fm.group(2) or 1)
        if not (0 < a < d or 0 < b < d) or a >= d or b >= d:
            raise ParseError(f"exponents of {tok!r} outside [0, {d})")
        xs[position] = a
        zs[position] = b
    return PauliString(d, tuple(xs), tuple(zs), phase_exp)
