"""Control schemes compiled from orthogonal arrays.

A scheme is a sequence of steps (tau_j, U_j), each a relative duration
and a Pauli string.  Its effective generator on a Hamiltonian H is the
average sum_j tau_j U_j H U_j^dagger.  A decoupling scheme drives that
average to zero for every Hamiltonian within the source array's
locality; compiling row j of a strength-t array over s = d^2 symbols
into a string of n factors does exactly that for t-local H on n
qudits, with uniform durations 1/N.

Derived forms:

* time reversal: with the identity step pulled to the front, the scheme
  (tau_j / tau_1, U_j) over the remaining steps averages to -H,
  because the sum of all conjugations vanishes.
* controlization: marking every step controlled lifts U_j to act only
  on the control-zero branch.  The average then decouples the zero
  branch and leaves the one branch evolving, so black-box evolution
  under 1_2 (x) H simulates the controlled evolution |1><1| (x) H.

The average here is computed symbolically.  Conjugating a Pauli string
by a Pauli string returns the same string times an integer power of a
root of unity, so coefficients combine by exact phase-exponent
bookkeeping with no matrix in sight; dense cross checks live in
``average_dense``.
"""

from __future__ import annotations

from collections import defaultdict
from dataclasses import dataclass

import numpy as np

from .errors import ParseError
from .hamiltonian import KLocalHamiltonian, Term
from .linalg import expm_i_hermitian, lambda_op
from .oa import OrthogonalArray
from .pauli import (
    PauliString,
    identity,
    multiply,
    parse_string,
    phase_modulus,
    phase_value,
    single,
    string_from_oa_row,
    symplectic_exponent,
)

KINDS = ("decoupling", "time_reversal", "controlization", "simulation")

#: Average-Hamiltonian coefficients below this are treated as zero.
COEFF_EPS = 1e-14

#: Decoupling durations must sum to one within this.
DURATION_EPS = 1e-9

#: Cap d^k for the depolarizing channel.
MAX_DEPOLARIZE_DIM = 64


@dataclass(frozen=True)
class SchemeStep:
    tau: float
    u: PauliString
    controlled: bool = False


@dataclass(frozen=True)
class Scheme:
    kind: str
    steps: tuple[SchemeStep, ...]

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ValueError(f"unknown scheme kind {self.kind!r}")
        steps = tuple(self.steps)
        if not steps:
            raise ValueError("a scheme needs at least one step")
        first = steps[0].u
        for step in steps:
            if step.tau < 0 or not np.isfinite(step.tau):
                raise ValueError(f"bad duration {step.tau}")
            if step.u.n != first.n or step.u.d != first.d:
                raise ValueError("steps must share one (n, d) shape")
        if self.kind == "decoupling":
            total = sum(step.tau for step in steps)
            if abs(total - 1.0) > DURATION_EPS:
                raise ValueError(f"decoupling durations sum to {total}, not 1")
        if self.kind == "controlization" and not all(s.controlled for s in steps):
            raise ValueError("controlization steps must all be controlled")
        object.__setattr__(self, "steps", steps)

    @property
    def n(self) -> int:
        return self.steps[0].u.n

    @property
    def d(self) -> int:
        return self.steps[0].u.d

    @property
    def total_duration(self) -> float:
        return float(sum(step.tau for step in self.steps))

    def __len__(self) -> int:
        return len(self.steps)


def scheme_from_oa(arr: OrthogonalArray, d: int) -> Scheme:
    """Decoupling scheme with one uniform step per array row."""
    if arr.levels != d * d:
        raise ValueError(f"need s = d^2 = {d * d}, got s = {arr.levels}")
    tau = 1.0 / arr.runs
    steps = tuple(
        SchemeStep(tau, string_from_oa_row(row, d)) for row in arr.entries
    )
    return Scheme("decoupling", steps)


def scheme_from_oa_with_coloring(arr: OrthogonalArray, d: int, colors) -> Scheme:
    """Coloring-compressed scheme: qudit i follows column colors[i].

    Qudits that share a color receive identical pulses, which is sound
    whenever no interaction couples two same-colored qudits.
    """
    if arr.levels != d * d:
        raise ValueError(f"need s = d^2 = {d * d}, got s = {arr.levels}")
    colors = [int(c) for c in colors]
    if not colors:
        raise ValueError("empty coloring")
    if min(colors) < 0 or max(colors) >= arr.factors:
        raise ValueError(
            f"coloring uses column {max(colors)} but the array has {arr.factors}"
        )
    tau = 1.0 / arr.runs
    steps = tuple(
        SchemeStep(tau, string_from_oa_row([row[c] for c in colors], d))
        for row in arr.entries
    )
    return Scheme("decoupling", steps)


def average_hamiltonian(scheme: Scheme, h: KLocalHamiltonian) -> KLocalHamiltonian:
    """sum_j tau_j U_j H U_j^dagger by exact phase bookkeeping.

    Conjugation never changes a term's factors, so the result has the
    same terms with rescaled coefficients; exact cancellations stay
    exact because scalars are accumulated as grouped integer counts of
    roots of unity before any multiplication.
    """
    if h.n != scheme.n or h.d != scheme.d:
        raise ValueError("scheme and Hamiltonian shapes do not match")
    if any(step.controlled for step in scheme.steps):
        raise ValueError("averaging is defined for uncontrolled steps")
    d = scheme.d
    kappa = phase_modulus(d) // d
    out = []
    for term in h.terms:
        weights: dict[int, float] = defaultdict(float)
        for step in scheme.steps:
            k = symplectic_exponent(step.u, term.string)
            weights[k] += step.tau
        scalar = complex(0)
        for k, w in sorted(weights.items()):
            scalar += w * phase_value(d, kappa * k)
        coeff = term.coeff * scalar
        if abs(coeff) <= COEFF_EPS:
            continue
        if abs(coeff.imag) > 1e-12 * max(1.0, abs(coeff)):
            raise ValueError("average produced a non-real coefficient")
        out.append(Term(float(coeff.real), term.string))
    return KLocalHamiltonian(h.n, h.d, h.k, tuple(out))


def average_dense(scheme: Scheme, matrix: np.ndarray) -> np.ndarray:
    """Dense sum_j tau_j V_j M V_j^dagger, lifting controlled steps.

    For controlled steps the input must live on the control-extended
    space and V_j is the control-zero-activated lift of U_j.
    """
    matrix = np.asarray(matrix, dtype=complex)
    acc = np.zeros_like(matrix)
    for step in scheme.steps:
        u = step.u.to_matrix()
        if step.controlled:
            u = lambda_op(u)
        if u.shape != matrix.shape:
            raise ValueError(f"operand shape {matrix.shape} does not match {u.shape}")
        acc += step.tau * (u @ matrix @ u.conj().T)
    return acc


def derive_time_reversal(scheme: Scheme) -> Scheme:
    """Reversal scheme from a decoupling scheme containing an identity step.

    Steps are rotated so the identity leads, then dropped from the
    front; the rest keep their strings with durations divided by the
    identity's.  The result averages to -H whenever the source scheme
    averages to zero.
    """
    if scheme.kind != "decoupling":
        raise ValueError(f"need a decoupling scheme, got {scheme.kind!r}")
    idx = next(
        (i for i, s in enumerate(scheme.steps) if s.u.is_identity and s.tau > 0),
        None,
    )
    if idx is None:
        raise ValueError("no identity step with positive duration to factor out")
    rotated = scheme.steps[idx:] + scheme.steps[:idx]
    tau1 = rotated[0].tau
    steps = tuple(SchemeStep(s.tau / tau1, s.u) for s in rotated[1:])
    if not steps:
        raise ValueError("scheme has no non-identity steps to reverse with")
    return Scheme("time_reversal", steps)


def controlize(scheme: Scheme) -> Scheme:
    """Mark every step controlled, turning decoupling into controlization."""
    if scheme.kind != "decoupling":
        raise ValueError(f"need a decoupling scheme, got {scheme.kind!r}")
    steps = tuple(SchemeStep(s.tau, s.u, controlled=True) for s in scheme.steps)
    return Scheme("controlization", steps)


def us_to_vs(scheme: Scheme) -> tuple[PauliString, ...]:
    """Interleaving pulses V_j with V_j = U_j U_{j-1}^dagger, U_0 = I.

    Returns N+1 strings; the last is U_N^dagger, so the full product
    telescopes to the identity exactly, phase included.
    """
    prev = identity(scheme.n, scheme.d)
    vs = []
    for step in scheme.steps:
        vs.append(multiply(step.u, prev.inverse()))
        prev = step.u
    vs.append(prev.inverse())
    return tuple(vs)


def vs_to_us(vs) -> tuple[PauliString, ...]:
    """Cumulative products recovering U_j from the interleaving pulses."""
    vs = tuple(vs)
    if len(vs) < 2:
        raise ValueError("need at least two pulses")
    us = []
    acc = identity(vs[0].n, vs[0].d)
    for v in vs[:-1]:
        acc = multiply(v, acc)
        us.append(acc)
    return tuple(us)


@dataclass(frozen=True)
class WeightReport:
    weights: tuple[int, ...]
    max_weight: int
    mean_weight: float


def weight_report(scheme: Scheme) -> WeightReport:
    """Pulse weights of the interleaving V-form of the scheme."""
    weights = tuple(v.weight for v in us_to_vs(scheme))
    return WeightReport(weights, max(weights), sum(weights) / len(weights))


def depolarize(d: int, kqu: int, h: np.ndarray) -> np.ndarray:
    """Average of U h U^dagger over all d^(2 kqu) Pauli strings on kqu qudits."""
    dim = d**kqu
    if dim > MAX_DEPOLARIZE_DIM:
        raise ValueError(f"dimension {dim} exceeds the cap {MAX_DEPOLARIZE_DIM}")
    h = np.asarray(h, dtype=complex)
    if h.shape != (dim, dim):
        raise ValueError(f"operand must be {dim} x {dim}, got {h.shape}")
    acc = np.zeros_like(h)
    count = (d * d) ** kqu
    for code in range(count):
        symbols = []
        rest = code
        for _ in range(kqu):
            symbols.append(rest % (d * d) + 1)
            rest //= d * d
        u = string_from_oa_row(symbols, d).to_matrix()
        acc += u @ h @ u.conj().T
    return acc / count


def depolarize_check(d: int, kqu: int, h: np.ndarray) -> float:
    """Frobenius norm of the depolarized operator.

    Zero (to rounding) exactly when h is traceless, since the channel
    projects onto the identity component.
    """
    return float(np.linalg.norm(depolarize(d, kqu, h)))


def find_anticommuting_pauli(p: PauliString) -> PauliString:
    """Weight-1 string that fails to commute with p.

    Acts on p's lowest-index non-identity qudit; candidates are tried
    in a fixed order (X, then Z, then the remaining factors), so the
    choice is deterministic.  On qubits the returned Q anticommutes:
    Q p Q^dagger = -p.
    """
    if p.is_identity:
        raise ValueError("identity has no anticommuting partner")
    d = p.d
    pos = next(i for i, (a, b) in enumerate(zip(p.xs, p.zs)) if a or b)
    a, b = p.xs[pos], p.zs[pos]
    candidates = [(1, 0), (0, 1)] + [
        (a2, b2)
        for a2 in range(d)
        for b2 in range(d)
        if (a2, b2) not in ((0, 0), (1, 0), (0, 1))
    ]
    for a2, b2 in candidates:
        if (b * a2 - b2 * a) % d != 0:
            return single(p.n, d, pos, a2, b2)
    raise AssertionError("non-identity factor admits no anticommuting partner")


@dataclass(frozen=True)
class EvolveStep:
    """Uncontrolled black-box evolution exp(-i P t) on the target register."""

    generator: PauliString
    duration: float


@dataclass(frozen=True)
class ControlledPauliStep:
    """Pauli pulse applied on the control-zero branch only."""

    u: PauliString
    adjoint: bool = False


def controlize_known_term(p: PauliString, t: float):
    """Gate sequence realizing ctrl(exp(-i P t)) from uncontrolled evolution.

    Uses a weight-1 anticommuting Q: evolving half the time, pulsing Q
    on the control-zero branch, evolving the other half and undoing Q
    cancels the zero branch and leaves the one branch fully evolved.
    Qubits only; p must be Hermitian as realized, which means its phase
    exponent matches its XZ-factor count mod 2.
    """
    if p.d != 2:
        raise ValueError("known-term controlization is implemented for qubits")
    if p.is_identity:
        raise ValueError("identity evolution needs no controlization")
    y_count = sum(1 for a, b in zip(p.xs, p.zs) if a and b)
    if (p.phase_exp - y_count) % 2 != 0:
        raise ValueError("generator is not Hermitian as realized")
    q = find_anticommuting_pauli(p)
    return (
        EvolveStep(p, t / 2.0),
        ControlledPauliStep(q),
        EvolveStep(p, t / 2.0),
        ControlledPauliStep(q, adjoint=True),
    )


def gate_sequence_matrix(sequence) -> np.ndarray:
    """Dense realization of a gate sequence on control (x) target."""
    matrix = None
    for step in sequence:
        if isinstance(step, EvolveStep):
            gen = step.generator.to_matrix()
            dim = gen.shape[0]
            gate = np.kron(np.eye(2), expm_i_hermitian(gen, step.duration))
        elif isinstance(step, ControlledPauliStep):
            u = step.u.to_matrix()
            if step.adjoint:
                u = u.conj().T
            gate = lambda_op(u)
        else:
            raise ValueError(f"unknown step {step!r}")
        matrix = gate if matrix is None else gate @ matrix
    if matrix is None:
        raise ValueError("empty gate sequence")
    return matrix


def save_text(scheme: Scheme) -> str:
    """Plain-text export: a header line, then `tau factors [ctrl]` lines."""
    if any(step.u.phase_exp != 0 for step in scheme.steps):
        raise ValueError("only phase-free steps are exported")
    lines = [f"kind={scheme.kind} steps={len(scheme)} n={scheme.n} d={scheme.d}"]
    for step in scheme.steps:
        body = str(step.u).split(" * ", 1)[1]
        suffix = " ctrl" if step.controlled else ""
        lines.append(f"{step.tau!r} {body}{suffix}")
    return "\n".join(lines) + "\n"


def load_text(text: str) -> Scheme:
    lines = [
        ln.strip()
        for ln in text.splitlines()
        if ln.strip() and not ln.strip().startswith("#")
    ]
    if not lines:
        raise ParseError("empty scheme file")
    header = dict(part.split("=", 1) for part in lines[0].split() if "=" in part)
    try:
        kind = header["kind"]
        count, n, d = int(header["steps"]), int(header["n"]), int(header["d"])
    except (KeyError, ValueError):
        raise ParseError(f"bad header line {lines[0]!r}") from None
    if len(lines) - 1 != count:
        raise ParseError(f"expected {count} steps, found {len(lines) - 1}")
    steps = []
    for line in lines[1:]:
        tokens = line.split()
        controlled = tokens and tokens[-1] == "ctrl"
        if controlled:
            tokens = tokens[:-1]
        if len(tokens) < 2:
            raise ParseError(f"bad step line {line!r}")
        try:
            tau = float(tokens[0])
        except ValueError:
            raise ParseError(f"bad duration {tokens[0]!r}") from None
        u = parse_string(" ".join(tokens[1:]), n, d)
        steps.append(SchemeStep(tau, u, controlled))
    try:
        return Scheme(kind, tuple(steps))
    except ValueError as exc:
        raise ParseError(str(exc)) from None
