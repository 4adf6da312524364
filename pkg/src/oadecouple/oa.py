"""Orthogonal arrays: representation, verification and construction.

An OA(N, n, s, t) is an N x n array over the alphabet {1..s} in which
every selection of t columns contains every one of the s^t possible
t-tuples equally often, namely N / s^t times.  Verification here is
exhaustive over all column subsets, so a passing report is a proof for
the array at hand rather than a spot check.

Two constructions are provided.  ``construct_rao_hamming`` builds the
strength-2 family OA(s^ell, (s^ell - 1)/(s - 1), s, 2) for a prime
power s by evaluating inner products against canonical representatives
of the one-dimensional subspaces of GF(s)^ell.  In matrix language the
representatives are the columns of a parity-check style generator, one
per subspace, each scaled so its first nonzero coordinate is 1.
``construct_from_linear_code`` turns any full-rank generator matrix
over GF(s) into the array of its codewords and verifies the claimed
strength.  Arrays from other constructions are supported through
``load``, which accepts the plain-text format used by published
orthogonal-array tables.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from importlib import resources

import numpy as np

from .errors import ParseError, VerificationError
from .gf import Field


@dataclass(frozen=True)
class VerificationReport:
    """Outcome of a strength check.

    For a failing report, ``columns`` names the offending column
    subset, ``symbols`` the t-tuple whose count is off, and ``count``
    versus ``expected`` quantifies the imbalance.
    """

    ok: bool
    columns: tuple[int, ...] | None = None
    symbols: tuple[int, ...] | None = None
    count: int | None = None
    expected: int | None = None

    def message(self) -> str:
        if self.ok:
            return "array verified"
        return (
            f"columns {self.columns}: tuple {self.symbols} occurs "
            f"{self.count} times, expected {self.expected}"
        )


@dataclass(frozen=True)
class OrthogonalArray:
    """An N x n array over {1..s} together with its claimed strength.

    Construction validates shape, alphabet and the divisibility
    N = lambda * s^t; it does not verify the strength itself, which is
    what :func:`verify` is for.
    """

    entries: np.ndarray
    levels: int
    strength: int

    def __post_init__(self):
        entries = np.array(self.entries, dtype=np.int64)
        if entries.ndim != 2 or entries.size == 0:
            raise ParseError("array must be a nonempty two-dimensional table")
        if self.levels < 2:
            raise ParseError(f"levels must be >= 2, got {self.levels}")
        if not 1 <= self.strength <= entries.shape[1]:
            raise ParseError(
                f"strength {self.strength} out of range for {entries.shape[1]} columns"
            )
        if entries.min() < 1 or entries.max() > self.levels:
            raise ParseError(f"entries must lie in 1..{self.levels}")
        if entries.shape[0] % self.levels**self.strength != 0:
            raise ParseError(
                f"run count {entries.shape[0]} is not a multiple of "
                f"{self.levels}^{self.strength}"
            )
        entries.setflags(write=False)
        object.__setattr__(self, "entries", entries)

    @property
    def runs(self) -> int:
        return self.entries.shape[0]

    @property
    def factors(self) -> int:
        return self.entries.shape[1]

    @property
    def multiplicity(self) -> int:
        return self.runs // self.levels**self.strength

    def parameters(self) -> tuple[int, int, int, int]:
        return (self.runs, self.factors, self.levels, self.strength)

    def __repr__(self) -> str:
        n, k, s, t = self.parameters()
        return f"OA({n}, {k}, {s}, {t})"


def verify(arr: OrthogonalArray) -> VerificationReport:
    """Exhaustively check the strength over every t-column subset."""
    s, t, lam = arr.levels, arr.strength, arr.multiplicity
    shifted = arr.entries - 1
    for columns in itertools.combinations(range(arr.factors), t):
        codes = np.zeros(arr.runs, dtype=np.int64)
        for c in columns:
            codes = codes * s + shifted[:, c]
        counts = np.bincount(codes, minlength=s**t)
        if not np.all(counts == lam):
            bad_index = int(np.nonzero(counts != lam)[0][0])
            symbols = []
            remainder = bad_index
            for _ in range(t):
                symbols.append(remainder % s + 1)
                remainder //= s
            return VerificationReport(
                ok=False,
                columns=columns,
                symbols=tuple(reversed(symbols)),
                count=int(counts[bad_index]),
                expected=lam,
            )
    return VerificationReport(ok=True, expected=lam)


def construct_rao_hamming(field: Field, ell: int) -> OrthogonalArray:
    """OA(s^ell, (s^ell - 1)/(s - 1), s, 2) over the given field.

    Rows are indexed by the vectors v of GF(s)^ell in lexicographic
    order; columns by the canonical subspace representatives c (first
    nonzero coordinate equal to 1), ordered by their big-endian integer
    encoding.  The entry in row v, column c is 1 plus the encoding of
    the inner product <v, c>.
    """
    if ell < 2:
        raise ValueError(f"need ell >= 2, got {ell}")
    s = field.order
    n_runs = s**ell
    reps = []
    for code in range(1, n_runs):
        vec = []
        value = code
        for i in range(ell):
            vec.append(value // s ** (ell - 1 - i) % s)
        first = next(x for x in vec if x != 0)
        if first == 1:
            reps.append(tuple(vec))
    expected_cols = (n_runs - 1) // (s - 1)
    if len(reps) != expected_cols:
        raise AssertionError("subspace representative count mismatch")

    add, mul = field.add_table, field.mul_table
    row_index = np.arange(n_runs, dtype=np.int64)
    row_digits = [(row_index // s ** (ell - 1 - i)) % s for i in range(ell)]
    entries = np.zeros((n_runs, expected_cols), dtype=np.int64)
    for j, rep in enumerate(reps):
        acc = np.zeros(n_runs, dtype=np.int64)
        for i, coord in enumerate(rep):
            if coord == 0:
                continue
            acc = add[acc, mul[row_digits[i], coord]]
        entries[:, j] = acc + 1
    return OrthogonalArray(entries, levels=s, strength=2)


def _row_reduce_rank(field: Field, rows: list[list[int]]) -> int:
    """Rank of a matrix over the field, by Gaussian elimination."""
    rows = [list(r) for r in rows]
    n_cols = len(rows[0]) if rows else 0
    rank = 0
    for col in range(n_cols):
        pivot = next((r for r in range(rank, len(rows)) if rows[r][col] != 0), None)
        if pivot is None:
            continue
        rows[rank], rows[pivot] = rows[pivot], rows[rank]
        scale = field.inv(rows[rank][col])
        rows[rank] = [field.mul(scale, x) for x in rows[rank]]
        for r in range(len(rows)):
            if r != rank and rows[r][col] != 0:
                factor = rows[r][col]
                rows[r] = [
                    field.sub(x, field.mul(factor, y))
                    for x, y in zip(rows[r], rows[rank])
                ]
        rank += 1
    return rank


def construct_from_linear_code(
    field: Field, generator, strength: int
) -> OrthogonalArray:
    """Array of the s^k codewords of a full-row-rank k x n generator.

    Entries are codeword symbols shifted from field elements to {1..s}.
    The result is verified at the claimed strength and rejected with a
    VerificationError if the check fails.
    """
    gen = [list(map(int, row)) for row in generator]
    if not gen or not gen[0]:
        raise ValueError("generator matrix must be nonempty")
    k, n_cols = len(gen), len(gen[0])
    if any(len(row) != n_cols for row in gen):
        raise ValueError("generator rows must have equal length")
    s = field.order
    for row in gen:
        for x in row:
            if not 0 <= x < s:
                raise ValueError(f"generator entry {x} outside GF({s})")
    if _row_reduce_rank(field, gen) != k:
        raise ValueError("generator matrix is rank deficient")

    add, mul = field.add_table, field.mul_table
    n_runs = s**k
    msg_index = np.arange(n_runs, dtype=np.int64)
    msg_digits = [(msg_index // s ** (k - 1 - j)) % s for j in range(k)]
    entries = np.zeros((n_runs, n_cols), dtype=np.int64)
    for col in range(n_cols):
        acc = np.zeros(n_runs, dtype=np.int64)
        for j in range(k):
            coord = gen[j][col]
            if coord == 0:
                continue
            acc = add[acc, mul[msg_digits[j], coord]]
        entries[:, col] = acc + 1
    arr = OrthogonalArray(entries, levels=s, strength=strength)
    report = verify(arr)
    if not report.ok:
        raise VerificationError(
            f"codeword array misses strength {strength}: {report.message()}"
        )
    return arr


def restrict_columns(arr: OrthogonalArray, columns) -> OrthogonalArray:
    """Sub-array on the given distinct columns, same levels and strength."""
    columns = list(columns)
    if len(set(columns)) != len(columns):
        raise ValueError("column indices must be distinct")
    if any(not 0 <= c < arr.factors for c in columns):
        raise ValueError("column index out of range")
    if len(columns) < arr.strength:
        raise ValueError(
            f"need at least {arr.strength} columns to keep strength "
            f"{arr.strength}, got {len(columns)}"
        )
    return OrthogonalArray(arr.entries[:, columns], arr.levels, arr.strength)


def load(
    text: str, levels: int, strength: int, transpose: bool = False
) -> OrthogonalArray:
    """Parse a whitespace-separated array and verify the claimed strength.

    Lines starting with '#' and blank lines are skipped.  Entries may
    use either {0..s-1} or {1..s}; a zero-based table is detected by
    its minimum and shifted up.  Published tables sometimes print the
    transpose (one line per column); pass ``transpose=True`` for those.
    """
    rows = []
    for lineno, line in enumerate(text.splitlines(), start=1):
        stripped = line.strip()
        if not stripped or stripped.startswith("#"):
            continue
        try:
            row = [int(tok) for tok in stripped.split()]
        except ValueError as exc:
            raise ParseError(f"line {lineno}: {exc}") from None
        rows.append(row)
    if not rows:
        raise ParseError("no data rows found")
    width = len(rows[0])
    for lineno, row in enumerate(rows[1:], start=2):
        if len(row) != width:
            raise ParseError(
                f"ragged table: row 1 has {width} entries, a later row has {len(row)}"
            )
    table = np.array(rows, dtype=np.int64)
    if transpose:
        table = table.T
    low, high = int(table.min()), int(table.max())
    if low == 0:
        if high > levels - 1:
            raise ParseError(f"entry {high} outside 0..{levels - 1}")
        table = table + 1
    elif low >= 1:
        if high > levels:
            raise ParseError(f"entry {high} outside 1..{levels}")
    else:
        raise ParseError(f"negative entry {low}")
    arr = OrthogonalArray(table, levels=levels, strength=strength)
    report = verify(arr)
    if not report.ok:
        raise VerificationError(f"array fails verification: {report.message()}")
    return arr


def to_text(arr: OrthogonalArray) -> str:
    n, k, s, t = arr.parameters()
    lines = [f"# OA({n}, {k}, {s}, {t})  lambda={arr.multiplicity}"]
    for row in arr.entries:
        lines.append(" ".join(str(int(x)) for x in row))
    return "\n".join(lines) + "\n"


#: Bundled arrays, keyed as "N.n.s.t".  The 16-run array is the
#: strength-2 array over four symbols used throughout the tests; the
#: 32-run array extends to nine factors, which a linear construction
#: over GF(4) cannot reach at that run count.
BUILTIN_ARRAYS = ("16.5.4.2", "32.9.4.2")


def builtin_array(name: str) -> OrthogonalArray:
    if name not in BUILTIN_ARRAYS:
        raise ValueError(f"unknown builtin array {name!r}; have {BUILTIN_ARRAYS}")
    parts = name.split(".")
    levels, strength = int(parts[2]), int(parts[3])
    text = resources.files(__package__).joinpath(f"data/oa.{name}.txt").read_text()
    return load(text, levels=levels, strength=strength)
