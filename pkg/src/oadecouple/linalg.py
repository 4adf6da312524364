"""Dense complex linear algebra for the numerical checks.

Thin wrappers around LAPACK via numpy, with the validation and
size guards the rest of the package relies on.  Dimensions are capped
at MAX_DIM; everything here is meant for verification-scale problems,
not production simulation.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

MAX_DIM = 1024


@dataclass(frozen=True)
class Tolerances:
    """Validation thresholds used by the guards in this module."""

    hermiticity: float = 1e-10
    unitarity: float = 1e-10
    density: float = 1e-8


DEFAULT_TOLS = Tolerances()


def _as_square(m, what: str) -> np.ndarray:
    m = np.asarray(m, dtype=complex)
    if m.ndim != 2 or m.shape[0] != m.shape[1]:
        raise ValueError(f"{what} must be square, got shape {m.shape}")
    if m.shape[0] > MAX_DIM:
        raise ValueError(f"{what} dimension {m.shape[0]} exceeds the cap {MAX_DIM}")
    return m


def _require_hermitian(m: np.ndarray, tol: float, what: str) -> None:
    gap = float(np.max(np.abs(m - m.conj().T))) if m.size else 0.0
    if gap > tol:
        raise ValueError(f"{what} is not Hermitian (max deviation {gap:.3e})")


def _require_unitary(m: np.ndarray, tol: float, what: str) -> None:
    gap = float(np.max(np.abs(m.conj().T @ m - np.eye(m.shape[0]))))
    if gap > tol:
        raise ValueError(f"{what} is not unitary (max deviation {gap:.3e})")


def eigh(h, tols: Tolerances = DEFAULT_TOLS) -> tuple[np.ndarray, np.ndarray]:
    """Eigenvalues (ascending, real) and orthonormal eigenvectors."""
    h = _as_square(h, "matrix")
    _require_hermitian(h, tols.hermiticity, "matrix")
    w, v = np.linalg.eigh(h)
    return w, v


def expm_i_hermitian(h, t: float, tols: Tolerances = DEFAULT_TOLS) -> np.ndarray:
    """exp(-i h t) for Hermitian h, via the spectral decomposition.

    The result is unitary to machine precision by construction.
    """
    w, v = eigh(h, tols)
    return (v * np.exp(-1j * w * t)) @ v.conj().T


def trace_distance(rho, sigma, tols: Tolerances = DEFAULT_TOLS) -> float:
    """Half the trace norm of rho - sigma for two density matrices."""
    rho = _as_square(rho, "rho")
    sigma = _as_square(sigma, "sigma")
    if rho.shape != sigma.shape:
        raise ValueError(f"shape mismatch {rho.shape} vs {sigma.shape}")
    for name, m in (("rho", rho), ("sigma", sigma)):
        _require_hermitian(m, tols.density, name)
        if abs(np.trace(m).real - 1.0) > tols.density:
            raise ValueError(f"{name} does not have unit trace")
    eigs = np.linalg.eigvalsh(rho - sigma)
    return float(min(1.0, 0.5 * np.sum(np.abs(eigs))))


def haar_state(dim: int, rng_seed) -> np.ndarray:
    """Haar-random pure state: normalized complex Gaussian vector."""
    if dim < 1:
        raise ValueError(f"dimension must be positive, got {dim}")
    rng = np.random.default_rng(rng_seed)
    vec = rng.standard_normal(dim) + 1j * rng.standard_normal(dim)
    return vec / np.linalg.norm(vec)


def ctrl(u, tols: Tolerances = DEFAULT_TOLS) -> np.ndarray:
    """Controlled u: acts as u on the control-one block.

    The control qubit is the most significant (leftmost) tensor factor.
    """
    u = _as_square(u, "unitary")
    _require_unitary(u, tols.density, "unitary")
    dim = u.shape[0]
    out = np.zeros((2 * dim, 2 * dim), dtype=complex)
    out[:dim, :dim] = np.eye(dim)
    out[dim:, dim:] = u
    return out


def lambda_op(u, tols: Tolerances = DEFAULT_TOLS) -> np.ndarray:
    """Control-zero-activated u: acts as u on the control-zero block."""
    u = _as_square(u, "unitary")
    _require_unitary(u, tols.density, "unitary")
    dim = u.shape[0]
    out = np.zeros((2 * dim, 2 * dim), dtype=complex)
    out[:dim, :dim] = u
    out[dim:, dim:] = np.eye(dim)
    return out


def operator_norm(a) -> float:
    """Largest singular value, via the Hermitian square."""
    a = _as_square(a, "matrix")
    eigs = np.linalg.eigvalsh(a.conj().T @ a)
    return float(np.sqrt(max(0.0, float(eigs[-1]))))
