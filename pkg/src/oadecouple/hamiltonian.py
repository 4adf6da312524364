"""k-local qudit Hamiltonians as real-weighted sums of Pauli strings.

Stored strings carry phase exponent zero.  On qubits, a factor with
both exponents set (the XZ case) is anti-Hermitian on its own, so the
dense realization multiplies each term by i per such factor; the stored
term then realizes the familiar Hermitian Y on those positions while
the string algebra stays phase-free.  Conjugation by Pauli strings
never changes a term's factors, only its sign, so this convention is
preserved by every scheme operation in the package.

Random instances are drawn uniformly over the distinct non-identity
strings of the requested locality, with coefficients uniform in
[0, 2*pi).  Generators are deterministic in their seed.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass

import numpy as np

from .errors import ParseError
from .pauli import PauliString, parse_string

#: Dense realizations are refused above this many amplitudes.
MAX_DENSE_DIM = 1024


@dataclass(frozen=True)
class Term:
    coeff: float
    string: PauliString


def y_factor_count(string: PauliString) -> int:
    """Number of positions with both exponents nonzero (qubit Y positions)."""
    return sum(1 for a, b in zip(string.xs, string.zs) if a and b)


@dataclass(frozen=True)
class KLocalHamiltonian:
    """Sum of real-weighted Pauli strings, each of weight at most k."""

    n: int
    d: int
    k: int
    terms: tuple[Term, ...]

    def __post_init__(self):
        if self.n < 1 or self.d < 2 or not 1 <= self.k <= self.n:
            raise ValueError(f"bad shape (n={self.n}, d={self.d}, k={self.k})")
        terms = tuple(self.terms)
        seen = set()
        for term in terms:
            s = term.string
            if s.n != self.n or s.d != self.d:
                raise ValueError("term string shape does not match the Hamiltonian")
            if s.phase_exp != 0:
                raise ValueError("stored terms must carry phase exponent zero")
            if s.is_identity:
                raise ValueError("identity terms are not allowed")
            if s.weight > self.k:
                raise ValueError(f"term weight {s.weight} exceeds locality {self.k}")
            key = (s.xs, s.zs)
            if key in seen:
                raise ValueError("duplicate term")
            seen.add(key)
            if not np.isfinite(term.coeff):
                raise ValueError("coefficients must be finite")
        object.__setattr__(self, "terms", terms)

    @property
    def dim(self) -> int:
        return self.d**self.n


def term_matrix(term: Term, d: int) -> np.ndarray:
    m = term.string.to_matrix()
    if d == 2:
        m = m * (1j ** y_factor_count(term.string))
    return term.coeff * m


def to_matrix(h: KLocalHamiltonian) -> np.ndarray:
    if h.dim > MAX_DENSE_DIM:
        raise ValueError(f"dense dimension {h.dim} exceeds the cap {MAX_DENSE_DIM}")
    m = np.zeros((h.dim, h.dim), dtype=complex)
    for term in h.terms:
        m += term_matrix(term, h.d)
    return m


def frobenius_norm(h: KLocalHamiltonian) -> float:
    """Frobenius norm of the dense realization, computed from coefficients.

    Pauli strings are orthogonal under the trace inner product with
    squared norm equal to the dimension, so no dense matrix is needed.
    """
    return float(np.sqrt(h.dim * sum(t.coeff**2 for t in h.terms)))


def _enumerate_strings(n: int, k: int) -> list[tuple[tuple[int, ...], tuple[int, ...]]]:
    """All distinct qubit strings of weight 1..k, in deterministic order."""
    out = []
    for weight in range(1, k + 1):
        for support in itertools.combinations(range(n), weight):
            for assignment in itertools.product(
                [(0, 1), (1, 0), (1, 1)], repeat=weight
            ):
                xs = [0] * n
                zs = [0] * n
                for pos, (a, b) in zip(support, assignment):
                    xs[pos] = a
                    zs[pos] = b
                out.append((tuple(xs), tuple(zs)))
    return out


def random_klocal(n: int, m: int, k: int, rng_seed: int) -> KLocalHamiltonian:
    """m distinct uniformly random weight-<=k non-identity qubit strings."""
    pool = _enumerate_strings(n, k)
    if m < 1 or m > len(pool):
        raise ValueError(f"term count {m} outside 1..{len(pool)}")
    rng = np.random.default_rng(rng_seed)
    chosen = rng.choice(len(pool), size=m, replace=False)
    coeffs = rng.uniform(0.0, 2.0 * np.pi, size=m)
    terms = tuple(
        Term(float(c), PauliString(2, *pool[int(i)])) for c, i in zip(coeffs, chosen)
    )
    return KLocalHamiltonian(n, 2, k, terms)


def random_sparse(n: int, m: int, rng_seed: int) -> KLocalHamiltonian:
    """m random 2-local terms on n qubits."""
    return random_klocal(n, m, 2, rng_seed)


def random_dense_all_terms(n: int, rng_seed: int) -> KLocalHamiltonian:
    """Every weight-1 and weight-2 term on n qubits with random coefficients."""
    pool = _enumerate_strings(n, 2)
    rng = np.random.default_rng(rng_seed)
    coeffs = rng.uniform(0.0, 2.0 * np.pi, size=len(pool))
    terms = tuple(Term(float(c), PauliString(2, *p)) for c, p in zip(coeffs, pool))
    return KLocalHamiltonian(n, 2, 2, terms)


def example_3local_4qubit() -> KLocalHamiltonian:
    """Fixed four-qubit instance mixing weight-2 and weight-3 terms.

    X X I X + Y I I Y + (Z I Z Z)/2 + (X I X X)/2, with Y stored as the
    XZ factor under the realization convention above.
    """
    terms = (
        Term(1.0, PauliString(2, (1, 1, 0, 1), (0, 0, 0, 0))),
        Term(1.0, PauliString(2, (1, 0, 0, 1), (1, 0, 0, 1))),
        Term(0.5, PauliString(2, (0, 0, 0, 0), (1, 0, 1, 1))),
        Term(0.5, PauliString(2, (1, 0, 1, 1), (0, 0, 0, 0))),
    )
    return KLocalHamiltonian(4, 2, 3, terms)


def _random_edge_terms(edges, n: int, rng) -> list[Term]:
    pairs = [(a, b) for a in range(2) for b in range(2)]
    nonid = [p for p in pairs if p != (0, 0)]
    terms = []
    used = set()
    for i, j in edges:
        while True:
            fi = nonid[rng.integers(len(nonid))]
            fj = nonid[rng.integers(len(nonid))]
            xs = [0] * n
            zs = [0] * n
            xs[i], zs[i] = fi
            xs[j], zs[j] = fj
            key = (tuple(xs), tuple(zs))
            if key not in used:
                used.add(key)
                break
        coeff = float(rng.uniform(0.0, 2.0 * np.pi))
        terms.append(Term(coeff, PauliString(2, *key)))
    for v in range(n):
        fv = nonid[rng.integers(len(nonid))]
        xs = [0] * n
        zs = [0] * n
        xs[v], zs[v] = fv
        terms.append(Term(float(rng.uniform(0.0, 2.0 * np.pi)), PauliString(2, tuple(xs), tuple(zs))))
    return terms


def random_chain(n: int, rng_seed: int) -> KLocalHamiltonian:
    """Random 2-local Hamiltonian on a nearest-neighbor chain."""
    if n < 2:
        raise ValueError("chain needs at least two qubits")
    rng = np.random.default_rng(rng_seed)
    edges = [(i, i + 1) for i in range(n - 1)]
    return KLocalHamiltonian(n, 2, 2, tuple(_random_edge_terms(edges, n, rng)))


def random_grid(rows: int, cols: int, rng_seed: int) -> KLocalHamiltonian:
    """Random 2-local Hamiltonian on a rows x cols nearest-neighbor grid."""
    if rows < 1 or cols < 1 or rows * cols < 2:
        raise ValueError("grid needs at least two sites")
    rng = np.random.default_rng(rng_seed)
    edges = []
    for r in range(rows):
        for c in range(cols):
            v = r * cols + c
            if c + 1 < cols:
                edges.append((v, v + 1))
            if r + 1 < rows:
                edges.append((v, v + cols))
    return KLocalHamiltonian(rows * cols, 2, 2, tuple(_random_edge_terms(edges, rows * cols, rng)))


def _apply_term_d2(term: Term, vec: np.ndarray, n: int) -> np.ndarray:
    amask = term.string.x_mask()
    bmask = term.string.z_mask()
    dim = 1 << n
    idx = np.arange(dim)
    signs = 1.0 - 2.0 * (
        np.bitwise_count(np.bitwise_and(idx, bmask)) % 2
    ).astype(float)
    out = np.empty_like(vec)
    out[idx ^ amask] = signs * vec
    scale = term.coeff * (1j ** y_factor_count(term.string))
    return scale * out


def apply_dense_free(h: KLocalHamiltonian, vec: np.ndarray) -> np.ndarray:
    """H @ vec without building H (qubits only)."""
    if h.d != 2:
        raise ValueError("matrix-free application is implemented for d=2 only")
    out = np.zeros_like(vec, dtype=complex)
    for term in h.terms:
        out += _apply_term_d2(term, vec.astype(complex), h.n)
    return out


def spectral_norm(h: KLocalHamiltonian, iterations: int = 100, tol: float = 1e-8) -> float:
    """Largest absolute eigenvalue.

    Dense diagonalization when the realization fits, otherwise power
    iteration on the matrix-free Pauli action.
    """
    if h.dim <= MAX_DENSE_DIM:
        if not h.terms:
            return 0.0
        eigs = np.linalg.eigvalsh(to_matrix(h))
        return float(np.max(np.abs(eigs)))
    if h.d != 2:
        raise ValueError("large non-qubit Hamiltonians are not supported")
    if not h.terms:
        return 0.0
    rng = np.random.default_rng(0)
    vec = rng.standard_normal(1 << h.n) + 1j * rng.standard_normal(1 << h.n)
    vec /= np.linalg.norm(vec)
    estimate = 0.0
    for _ in range(iterations):
        nxt = apply_dense_free(h, vec)
        norm = float(np.linalg.norm(nxt))
        if norm == 0.0:
            return 0.0
        if abs(norm - estimate) <= tol * max(1.0, norm):
            return norm
        estimate = norm
        vec = nxt / norm
    return estimate


@dataclass(frozen=True)
class InteractionGraph:
    n: int
    edges: frozenset[tuple[int, int]]

    def degree(self, v: int) -> int:
        return sum(1 for e in self.edges if v in e)


def interaction_graph(h: KLocalHamiltonian) -> InteractionGraph:
    """One vertex per qudit, an edge wherever some term acts on both."""
    edges = set()
    for term in h.terms:
        support = [i for i, (a, b) in enumerate(zip(term.string.xs, term.string.zs)) if a or b]
        for i, j in itertools.combinations(support, 2):
            edges.add((i, j))
    return InteractionGraph(h.n, frozenset(edges))


@dataclass(frozen=True)
class Coloring:
    assignment: tuple[int, ...]
    count: int


def greedy_coloring(graph: InteractionGraph) -> Coloring:
    """Descending-degree greedy coloring with the smallest available color.

    Ties in degree break by vertex index, so the result is
    deterministic.  The count bounds the number of array columns a
    coloring-compressed scheme needs.
    """
    neighbors: dict[int, set[int]] = {v: set() for v in range(graph.n)}
    for i, j in graph.edges:
        neighbors[i].add(j)
        neighbors[j].add(i)
    order = sorted(range(graph.n), key=lambda v: (-len(neighbors[v]), v))
    colors: dict[int, int] = {}
    for v in order:
        taken = {colors[u] for u in neighbors[v] if u in colors}
        c = 0
        while c in taken:
            c += 1
        colors[v] = c
    assignment = tuple(colors[v] for v in range(graph.n))
    return Coloring(assignment, max(assignment) + 1 if assignment else 0)


def to_text(h: KLocalHamiltonian) -> str:
    """One header line, then one `coeff factor@qudit ...` line per term."""
    lines = [f"n={h.n} d={h.d} k={h.k}"]
    for term in h.terms:
        body = str(term.string).split(" * ", 1)[1]
        lines.append(f"{term.coeff!r} {body}")
    return "\n".join(lines) + "\n"


def from_text(text: str) -> KLocalHamiltonian:
    lines = [
        ln.strip()
        for ln in text.splitlines()
        if ln.strip() and not ln.strip().startswith("#")
    ]
    if not lines:
        raise ParseError("empty Hamiltonian file")
    header = dict(
        part.split("=", 1) for part in lines[0].split() if "=" in part
    )
    try:
        n, d, k = int(header["n"]), int(header["d"]), int(header["k"])
    except (KeyError, ValueError):
        raise ParseError(f"bad header line {lines[0]!r}") from None
    terms = []
    for line in lines[1:]:
        coeff_tok, _, rest = line.partition(" ")
        try:
            coeff = float(coeff_tok)
        except ValueError:
            raise ParseError(f"bad coefficient {coeff_tok!r}") from None
        terms.append(Term(coeff, parse_string(rest, n, d)))
    return KLocalHamiltonian(n, d, k, tuple(terms))
