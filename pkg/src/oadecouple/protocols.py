"""Block-structured decoupling and controlization experiments.

The benchmark treats the target evolution as a black box invoked in
slices: a block is 2N invocations of U(delta) = exp(-i H delta), each
flanked by a Pauli string from the scheme.  One block covers two
first-order passes over the N scheme steps, or one symmetrized
second-order pass (forward half-steps then the reverse; the central
two invocations stay separate), or 2N qDRIFT samples.  Every variant
therefore spends the same black-box time per block, and B blocks
spend exactly the total time t.

The decoupling runner measures how well B blocks freeze the evolution:
for each Haar initial state it forms the mixture of the final states
over r independent scheme instances and records the trace distance to
the initial state.  The controlization runner instead lifts the steps
to control-zero-activated gates and records the operator-norm error
against ctrl(exp(-i H t)).

Evolution in the decoupling runner is carried out by a basis-state
engine rather than matrix products: a qubit Pauli string acts as a
signed permutation of basis states, so conjugating by it costs one
gather and one sign flip per amplitude, and the U(delta) factor is one
dense matrix product shared by all (state, instance) columns.  The
engine drops a global sign per conjugation (it applies the adjoint
permutation on both sides), which cancels in the density matrices the
metric consumes; anything phase-sensitive must use the dense block
functions instead.
"""

from __future__ import annotations

import math
import time
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .errors import ParseError
from .hamiltonian import (
    KLocalHamiltonian,
    random_chain,
    random_dense_all_terms,
    random_sparse,
    to_matrix,
)
from .linalg import ctrl, expm_i_hermitian, haar_state, lambda_op, operator_norm, trace_distance
from .oa import BUILTIN_ARRAYS, OrthogonalArray, builtin_array, load, restrict_columns
from .pauli import string_from_oa_row
from .schemes import Scheme, controlize, scheme_from_oa

CSV_HEADER = (
    "scheme",
    "order",
    "randomized",
    "qdrift_mode",
    "blocks",
    "state_id",
    "instance_reps",
    "metric",
    "value",
    "seconds",
)

ORDERS = ("first", "second")
QDRIFT_MODES = ("off", "full_pauli_group", "oa_subset")

#: Dense-simulation guard for the decoupling benchmark.
MAX_QUBITS = 10

#: Control qubit doubles the dimension, so the guard is tighter.
MAX_CONTROLIZE_QUBITS = 6

#: Black-box time bookkeeping must close to this.
TIME_EPS = 1e-12


@dataclass(frozen=True)
class SchemeVariant:
    """One curve of the benchmark: ordering discipline plus sampling mode."""

    label: str
    order: str
    randomized: bool
    qdrift_mode: str = "off"
    reps: int = 1

    def __post_init__(self):
        if self.order not in ORDERS:
            raise ValueError(f"order must be one of {ORDERS}, got {self.order!r}")
        if self.qdrift_mode not in QDRIFT_MODES:
            raise ValueError(f"unknown qdrift mode {self.qdrift_mode!r}")
        if self.qdrift_mode != "off" and not self.randomized:
            raise ValueError("qDRIFT variants are randomized by definition")
        if self.qdrift_mode != "off" and self.order != "first":
            raise ValueError("qDRIFT sampling has no second-order form here")
        if self.reps < 1:
            raise ValueError(f"reps must be >= 1, got {self.reps}")


#: The six curves of the trace-distance benchmark; deterministic
#: variants need a single instance because all instances coincide.
DEFAULT_VARIANTS = (
    SchemeVariant("det-first", "first", False, "off", 1),
    SchemeVariant("det-second", "second", False, "off", 1),
    SchemeVariant("rand-first", "first", True, "off", 100),
    SchemeVariant("rand-second", "second", True, "off", 100),
    SchemeVariant("qdrift-full", "first", True, "full_pauli_group", 100),
    SchemeVariant("qdrift-oa", "first", True, "oa_subset", 100),
)

HAMILTONIAN_KINDS = ("sparse", "dense_all", "chain", "zero")


@dataclass(frozen=True)
class ExperimentConfig:
    n_qubits: int
    hamiltonian_kind: str = "sparse"
    hamiltonian_terms: int = 40
    hamiltonian_seed: int = 1
    oa_name: str = "32.9.4.2"
    oa_columns: tuple[int, ...] | None = None
    variants: tuple[SchemeVariant, ...] = DEFAULT_VARIANTS
    block_counts: tuple[int, ...] = (1, 2, 4, 8, 16, 32, 64)
    total_time: float = 1.0
    n_states: int = 10
    reps_override: int | None = None
    master_seed: int = 7

    def __post_init__(self):
        if self.hamiltonian_kind not in HAMILTONIAN_KINDS:
            raise ValueError(f"unknown hamiltonian kind {self.hamiltonian_kind!r}")
        if not self.block_counts:
            raise ValueError("need at least one block count")
        if any(b < 1 for b in self.block_counts):
            raise ValueError("block counts must be positive")
        if self.total_time < 0:
            raise ValueError("total time must be nonnegative")
        if self.n_states < 1:
            raise ValueError("need at least one initial state")
        if not self.variants:
            raise ValueError("need at least one scheme variant")


@dataclass(frozen=True)
class ResultRow:
    scheme: str
    order: str
    randomized: int
    qdrift_mode: str
    blocks: int
    state_id: str
    instance_reps: int
    metric: str
    value: float
    seconds: float


def write_csv(rows, path) -> None:
    lines = [",".join(CSV_HEADER)]
    for row in rows:
        lines.append(
            ",".join(
                (
                    row.scheme,
                    row.order,
                    str(int(row.randomized)),
                    row.qdrift_mode,
                    str(row.blocks),
                    row.state_id,
                    str(row.instance_reps),
                    row.metric,
                    repr(float(row.value)),
                    repr(float(row.seconds)),
                )
            )
        )
    Path(path).write_text("\n".join(lines) + "\n")


def read_csv(path) -> list[ResultRow]:
    text = Path(path).read_text()
    lines = [ln for ln in text.splitlines() if ln.strip()]
    if not lines or tuple(lines[0].split(",")) != CSV_HEADER:
        raise ParseError(f"missing or wrong header in {path}")
    rows = []
    for ln in lines[1:]:
        parts = ln.split(",")
        if len(parts) != len(CSV_HEADER):
            raise ParseError(f"bad row {ln!r}")
        try:
            rows.append(
                ResultRow(
                    scheme=parts[0],
                    order=parts[1],
                    randomized=int(parts[2]),
                    qdrift_mode=parts[3],
                    blocks=int(parts[4]),
                    state_id=parts[5],
                    instance_reps=int(parts[6]),
                    metric=parts[7],
                    value=float(parts[8]),
                    seconds=float(parts[9]),
                )
            )
        except ValueError:
            raise ParseError(f"bad row {ln!r}") from None
    return rows


def build_hamiltonian(cfg: ExperimentConfig) -> KLocalHamiltonian:
    if cfg.hamiltonian_kind == "sparse":
        return random_sparse(cfg.n_qubits, cfg.hamiltonian_terms, cfg.hamiltonian_seed)
    if cfg.hamiltonian_kind == "dense_all":
        return random_dense_all_terms(cfg.n_qubits, cfg.hamiltonian_seed)
    if cfg.hamiltonian_kind == "chain":
        return random_chain(cfg.n_qubits, cfg.hamiltonian_seed)
    return KLocalHamiltonian(cfg.n_qubits, 2, 2, ())


def load_scheme_array(cfg: ExperimentConfig) -> OrthogonalArray:
    """Resolve the config's array source: builtin name or file path."""
    if cfg.oa_name in BUILTIN_ARRAYS:
        arr = builtin_array(cfg.oa_name)
    else:
        arr = load(Path(cfg.oa_name).read_text(), levels=4, strength=2)
    if cfg.oa_columns is not None:
        arr = restrict_columns(arr, cfg.oa_columns)
    return arr


# ---------------------------------------------------------------------------
# dense reference blocks


def _dense_operand(h) -> np.ndarray:
    if isinstance(h, KLocalHamiltonian):
        return to_matrix(h)
    return np.asarray(h, dtype=complex)


def _step_unitaries(scheme: Scheme) -> list[np.ndarray]:
    mats = []
    for step in scheme.steps:
        u = step.u.to_matrix()
        mats.append(lambda_op(u) if step.controlled else u)
    return mats


def first_order_block(scheme: Scheme, h, dt: float) -> np.ndarray:
    """One pass: product over steps of U_j exp(-i h tau_j dt) U_j^dagger.

    Step 1 acts first in time, so it sits rightmost in the product.
    Controlled steps are lifted to the control-extended space, in which
    case h must already live there.
    """
    hmat = _dense_operand(h)
    mats = _step_unitaries(scheme)
    if mats[0].shape != hmat.shape:
        raise ValueError(f"operand is {hmat.shape}, steps are {mats[0].shape}")
    cache: dict[float, np.ndarray] = {}
    acc = np.eye(hmat.shape[0], dtype=complex)
    for step, u in zip(scheme.steps, mats):
        e = cache.get(step.tau)
        if e is None:
            e = cache[step.tau] = expm_i_hermitian(hmat, step.tau * dt)
        acc = u @ e @ u.conj().T @ acc
    return acc


def second_order_block(scheme: Scheme, h, dt: float) -> np.ndarray:
    """Symmetrized pass: forward half-steps, then the same steps reversed.

    All 2N invocations are kept, including the two central ones, so the
    invocation count matches two first-order passes.
    """
    hmat = _dense_operand(h)
    mats = _step_unitaries(scheme)
    if mats[0].shape != hmat.shape:
        raise ValueError(f"operand is {hmat.shape}, steps are {mats[0].shape}")
    cache: dict[float, np.ndarray] = {}
    acc = np.eye(hmat.shape[0], dtype=complex)
    pairs = list(zip(scheme.steps, mats))
    for step, u in pairs + pairs[::-1]:
        e = cache.get(step.tau)
        if e is None:
            e = cache[step.tau] = expm_i_hermitian(hmat, step.tau * dt / 2.0)
        acc = u @ e @ u.conj().T @ acc
    return acc


def qdrift_block(
    h: KLocalHamiltonian,
    dt: float,
    mode: str,
    n_samples: int = 64,
    rng=None,
    strings=None,
) -> np.ndarray:
    """Sampled pass: n_samples factors P exp(-i h dt/n_samples) P^dagger.

    Strings are drawn uniformly, either from the full generalized Pauli
    group on h's qudits (identity included) or from an explicit pool.
    """
    if mode not in ("full_pauli_group", "oa_subset"):
        raise ValueError(f"unknown qdrift mode {mode!r}")
    if mode == "oa_subset" and not strings:
        raise ValueError("oa_subset sampling needs the pool of strings")
    if rng is None:
        raise ValueError("sampling needs an explicit rng")
    if n_samples < 1:
        raise ValueError(f"n_samples must be >= 1, got {n_samples}")
    hmat = to_matrix(h)
    e = expm_i_hermitian(hmat, dt / n_samples)
    acc = np.eye(hmat.shape[0], dtype=complex)
    s = h.d * h.d
    for _ in range(n_samples):
        if mode == "full_pauli_group":
            symbols = rng.integers(1, s + 1, size=h.n)
            p = string_from_oa_row(symbols, h.d)
        else:
            p = strings[int(rng.integers(len(strings)))]
        u = p.to_matrix()
        acc = u @ e @ u.conj().T @ acc
    return acc


# ---------------------------------------------------------------------------
# batched qubit engine


def _pulse_tables(strings, dim: int) -> tuple[np.ndarray, np.ndarray]:
    """Permutation and sign tables for signed-permutation Pauli action.

    Row j encodes string j as out[x] = sign[j,x] * in[perm[j,x]], which
    is the adjoint action; using it on both sides of a conjugation is
    off by a global sign only.
    """
    basis = np.arange(dim)
    perm = np.empty((len(strings), dim), dtype=np.int64)
    sign = np.empty((len(strings), dim), dtype=np.float64)
    for j, p in enumerate(strings):
        perm[j] = basis ^ p.x_mask()
        sign[j] = 1.0 - 2.0 * (np.bitwise_count(basis & p.z_mask()) & 1)
    return perm, sign


def _block_indices(variant: SchemeVariant, n_steps: int, n_cols: int, rng) -> np.ndarray:
    """Per-column pulse indices for one block: shape (n_cols, 2 n_steps)."""
    order = np.arange(n_steps)
    if variant.qdrift_mode == "oa_subset":
        return rng.integers(0, n_steps, size=(n_cols, 2 * n_steps))
    if not variant.randomized:
        seq = (
            np.concatenate([order, order])
            if variant.order == "first"
            else np.concatenate([order, order[::-1]])
        )
        return np.broadcast_to(seq, (n_cols, 2 * n_steps))
    tile = np.tile(order, (n_cols, 1))
    if variant.order == "first":
        first = rng.permuted(tile, axis=1)
        second = rng.permuted(tile, axis=1)
        return np.concatenate([first, second], axis=1)
    forward = rng.permuted(tile, axis=1)
    return np.concatenate([forward, forward[:, ::-1]], axis=1)


def _run_blocks(variant, states, perm, sign, e_t, n_blocks, rng) -> tuple[np.ndarray, int]:
    """Evolve the (columns, dim) batch through n_blocks blocks in place."""
    n_cols, dim = states.shape
    n_steps = perm.shape[0]
    basis = np.arange(dim)
    invocations = 0
    for _ in range(n_blocks):
        if variant.qdrift_mode == "full_pauli_group":
            amasks = rng.integers(0, dim, size=(n_cols, 2 * n_steps))
            bmasks = rng.integers(0, dim, size=(n_cols, 2 * n_steps))
            for i in range(2 * n_steps):
                rows = basis[None, :] ^ amasks[:, i, None]
                signs = 1.0 - 2.0 * (
                    np.bitwise_count(basis[None, :] & bmasks[:, i, None]) & 1
                )
                states = signs * np.take_along_axis(states, rows, axis=1)
                states = states @ e_t
                states = signs * np.take_along_axis(states, rows, axis=1)
                invocations += 1
        else:
            idx = _block_indices(variant, n_steps, n_cols, rng)
            for i in range(2 * n_steps):
                rows = perm[idx[:, i]]
                signs = sign[idx[:, i]]
                states = signs * np.take_along_axis(states, rows, axis=1)
                states = states @ e_t
                states = signs * np.take_along_axis(states, rows, axis=1)
                invocations += 1
    return states, invocations


def run_decoupling_experiment(cfg: ExperimentConfig) -> list[ResultRow]:
    """Trace-distance benchmark over (variant, block count, initial state).

    Deterministic for a fixed master seed: state s is seeded by
    (master, 101, s) and the randomness of variant v at block count B
    by (master, 7, v, B), independent of execution order.
    """
    if not 1 <= cfg.n_qubits <= MAX_QUBITS:
        raise ValueError(f"need 1..{MAX_QUBITS} qubits, got {cfg.n_qubits}")
    h = build_hamiltonian(cfg)
    arr = load_scheme_array(cfg)
    if arr.factors != cfg.n_qubits:
        raise ValueError(
            f"array has {arr.factors} columns for {cfg.n_qubits} qubits; restrict first"
        )
    scheme = scheme_from_oa(arr, 2)
    n_steps = len(scheme)
    dim = 2**cfg.n_qubits
    hmat = to_matrix(h)
    evals, evecs = np.linalg.eigh(hmat)
    states = np.stack(
        [haar_state(dim, [cfg.master_seed, 101, s]) for s in range(cfg.n_states)]
    )
    rhos = [np.outer(v, v.conj()) for v in states]
    perm, sign = _pulse_tables([step.u for step in scheme.steps], dim)
    rows = []
    for v_idx, variant in enumerate(cfg.variants):
        reps = 1
        if variant.randomized:
            reps = cfg.reps_override if cfg.reps_override else variant.reps
        for n_blocks in cfg.block_counts:
            started = time.perf_counter()
            rng = np.random.default_rng([cfg.master_seed, 7, v_idx, n_blocks])
            delta = cfg.total_time / (n_blocks * 2 * n_steps)
            e_t = np.ascontiguousarray(
                ((evecs * np.exp(-1j * evals * delta)) @ evecs.conj().T).T
            )
            batch = np.repeat(states, reps, axis=0)
            batch, invocations = _run_blocks(
                variant, batch, perm, sign, e_t, n_blocks, rng
            )
            spent = invocations * delta
            if abs(spent - cfg.total_time) > TIME_EPS * max(1.0, cfg.total_time):
                raise AssertionError(
                    f"black-box time drifted: {spent} != {cfg.total_time}"
                )
            elapsed = time.perf_counter() - started
            for s in range(cfg.n_states):
                final = batch[s * reps : (s + 1) * reps]
                sigma = final.T @ final.conj() / reps
                value = trace_distance(rhos[s], sigma)
                rows.append(
                    ResultRow(
                        scheme=variant.label,
                        order=variant.order,
                        randomized=int(variant.randomized),
                        qdrift_mode=variant.qdrift_mode,
                        blocks=n_blocks,
                        state_id=str(s),
                        instance_reps=reps,
                        metric="trace_distance",
                        value=value,
                        seconds=elapsed,
                    )
                )
    return rows


def run_controlization_experiment(cfg: ExperimentConfig) -> list[ResultRow]:
    """Operator-error sweep: Trotterized controlization vs the exact gate.

    block_counts is reused as the Trotter-step sweep r; each r composes
    r lifted blocks of duration t/r and compares against
    ctrl(exp(-i H t)) in operator norm.  Only deterministic variants
    make sense here.
    """
    if not 1 <= cfg.n_qubits <= MAX_CONTROLIZE_QUBITS:
        raise ValueError(f"need 1..{MAX_CONTROLIZE_QUBITS} qubits, got {cfg.n_qubits}")
    for variant in cfg.variants:
        if variant.randomized or variant.qdrift_mode != "off":
            raise ValueError("controlization sweep supports deterministic variants only")
    h = build_hamiltonian(cfg)
    arr = load_scheme_array(cfg)
    if arr.factors != cfg.n_qubits:
        raise ValueError(
            f"array has {arr.factors} columns for {cfg.n_qubits} qubits; restrict first"
        )
    scheme = controlize(scheme_from_oa(arr, 2))
    hmat = to_matrix(h)
    lifted = np.kron(np.eye(2), hmat)
    target = ctrl(expm_i_hermitian(hmat, cfg.total_time))
    rows = []
    for variant in cfg.variants:
        block = first_order_block if variant.order == "first" else second_order_block
        for steps in cfg.block_counts:
            started = time.perf_counter()
            dt = cfg.total_time / steps
            one = block(scheme, lifted, dt)
            approx = np.linalg.matrix_power(one, steps)
            value = operator_norm(approx - target)
            if abs(steps * dt - cfg.total_time) > TIME_EPS * max(1.0, cfg.total_time):
                raise AssertionError("black-box time drifted")
            elapsed = time.perf_counter() - started
            rows.append(
                ResultRow(
                    scheme=variant.label,
                    order=variant.order,
                    randomized=0,
                    qdrift_mode="off",
                    blocks=steps,
                    state_id="-",
                    instance_reps=1,
                    metric="operator_error",
                    value=value,
                    seconds=elapsed,
                )
            )
    return rows


@dataclass(frozen=True)
class ResourceEstimate:
    trotter_steps: int
    controlled_ops: int


def estimate_resources(
    n_runs: int,
    total_time: float,
    norm_h: float,
    eps: float,
    order: str,
    c1: float = 1.0,
    c2: float = 1.0,
) -> ResourceEstimate:
    """Trotter steps and controlled-operation count hitting error eps.

    First order needs r = ceil(c1 (t |H|)^2 / eps) steps of N controlled
    operations each; second order r = ceil(c2 (t |H|)^(3/2) / sqrt(eps))
    steps of 2N.
    """
    if n_runs < 1:
        raise ValueError(f"need a positive run count, got {n_runs}")
    if eps <= 0:
        raise ValueError(f"need a positive error budget, got {eps}")
    if total_time < 0 or norm_h < 0:
        raise ValueError("time and norm must be nonnegative")
    if order not in ORDERS:
        raise ValueError(f"order must be one of {ORDERS}, got {order!r}")
    scale = total_time * norm_h
    if order == "first":
        steps = max(1, math.ceil(c1 * scale * scale / eps))
        return ResourceEstimate(steps, steps * n_runs)
    steps = max(1, math.ceil(c2 * scale**1.5 / math.sqrt(eps)))
    return ResourceEstimate(steps, 2 * steps * n_runs)


def loglog_slope(xs, ys, drop_first: bool = True) -> float:
    """Least-squares slope of log y against log x.

    The smallest-x point is dropped by default; it is usually outside
    the asymptotic regime the slope is meant to probe.
    """
    xs = np.asarray(xs, dtype=float)
    ys = np.asarray(ys, dtype=float)
    if xs.shape != ys.shape or xs.ndim != 1:
        raise ValueError("need two equal-length 1-d samples")
    if drop_first:
        keep = np.argsort(xs)[1:]
        xs, ys = xs[keep], ys[keep]
    if xs.size < 2:
        raise ValueError("need at least two points for a slope")
    if np.any(xs <= 0) or np.any(ys <= 0):
        raise ValueError("log-log slope needs positive samples")
    return float(np.polyfit(np.log(xs), np.log(ys), 1)[0])
