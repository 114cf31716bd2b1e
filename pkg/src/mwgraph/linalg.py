"""Dense symmetric linear algebra kernel.

Everything downstream (Laplacians, edge counts, frames) funnels through
these few operations, so semantics are pinned here once: symmetrization on
ingestion, relative rank cutoffs, and Loewner comparison.  All functions are
pure and deterministic: ``numpy.linalg.eigh`` uses a fixed LAPACK driver with
no randomized pivoting, so identical input bits give identical output.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import (
    DimMismatchError,
    NonFiniteError,
    NotPsdError,
    NotSymmetricError,
)


@dataclass(frozen=True)
class Tolerances:
    """Numeric tolerances used across the package.

    Rank cutoffs are relative (``rank_rel_tol * lambda_max``) because
    absolute cutoffs break on scaled inputs.
    """

    sym_tol: float = 1e-9
    psd_tol: float = 1e-9
    rank_rel_tol: float = 1e-10
    loewner_tol: float = 1e-9
    resid_tol: float = 1e-8
    ortho_tol: float = 1e-8

    def __post_init__(self):
        for name in ("sym_tol", "psd_tol", "rank_rel_tol", "loewner_tol",
                     "resid_tol", "ortho_tol"):
            value = getattr(self, name)
            if not np.isfinite(value) or value < 0:
                raise ValueError(f"{name} must be finite and >= 0, got {value}")


DEFAULT_TOL = Tolerances()


@dataclass(frozen=True)
class Spectrum:
    """Eigenvalues with matching orthonormal eigenvectors (as columns)."""

    values: np.ndarray
    vectors: np.ndarray

    def reversed(self) -> "Spectrum":
        return Spectrum(self.values[::-1].copy(), self.vectors[:, ::-1].copy())


def as_symmetric(m, tol: Tolerances = DEFAULT_TOL) -> np.ndarray:
    """Validate and canonically symmetrize a square matrix.

    Asymmetry beyond ``sym_tol`` is an error, not silently fixed; within
    tolerance the matrix is stored as (M + M^T)/2.
    """
    arr = np.asarray(m, dtype=float)
    if arr.ndim != 2 or arr.shape[0] != arr.shape[1]:
        raise DimMismatchError(f"expected a square matrix, got shape {arr.shape}")
    if arr.size and not np.all(np.isfinite(arr)):
        raise NonFiniteError("matrix contains NaN or Inf entries")
    if arr.size:
        gap = float(np.max(np.abs(arr - arr.T)))
        if gap > tol.sym_tol:
            raise NotSymmetricError(
                f"asymmetry {gap:.3e} exceeds sym_tol {tol.sym_tol:.3e}")
    return (arr + arr.T) / 2.0


def spectral_norm(m) -> float:
    """Operator 2-norm. For the symmetric matrices used here, max |eigenvalue|."""
    arr = np.asarray(m, dtype=float)
    if arr.size == 0:
        return 0.0
    return float(np.linalg.norm(arr, 2))


def eigh(m, tol: Tolerances = DEFAULT_TOL) -> Spectrum:
    """Full eigendecomposition of a symmetric matrix, eigenvalues ascending."""
    sym = as_symmetric(m, tol)
    values, vectors = np.linalg.eigh(sym)
    return Spectrum(values, vectors)


def is_psd(m, tol: Tolerances = DEFAULT_TOL) -> bool:
    """True iff the minimum eigenvalue is >= -psd_tol * max(1, ||M||)."""
    sym = as_symmetric(m, tol)
    if sym.size == 0:
        return True
    values = np.linalg.eigvalsh(sym)
    norm = max(abs(float(values[0])), abs(float(values[-1])))
    return float(values[0]) >= -tol.psd_tol * max(1.0, norm)


def pseudo_sqrt_inv(m, tol: Tolerances = DEFAULT_TOL) -> np.ndarray:
    """Moore-Penrose pseudoinverse of the square root of a PSD matrix.

    Eigenvalues above ``rank_rel_tol * lambda_max`` map to lambda^(-1/2),
    the rest to zero, in the eigenbasis of M.
    """
    sym = as_symmetric(m, tol)
    if not is_psd(sym, tol):
        raise NotPsdError("pseudo_sqrt_inv requires a PSD matrix")
    if sym.size == 0:
        return sym
    values, vectors = np.linalg.eigh(sym)
    cutoff = tol.rank_rel_tol * max(float(values[-1]), 0.0)
    inv_sqrt = np.where(values > cutoff, 1.0 / np.sqrt(np.maximum(values, 1e-300)), 0.0)
    result = (vectors * inv_sqrt) @ vectors.T
    return (result + result.T) / 2.0


def loewner_leq(a, b, tol: Tolerances = DEFAULT_TOL) -> bool:
    """Loewner order: A <= B iff B - A is PSD within loewner_tol."""
    sa = as_symmetric(a, tol)
    sb = as_symmetric(b, tol)
    if sa.shape != sb.shape:
        raise DimMismatchError(f"shape mismatch {sa.shape} vs {sb.shape}")
    diff = sb - sa
    if diff.size == 0:
        return True
    values = np.linalg.eigvalsh(diff)
    norm = max(abs(float(values[0])), abs(float(values[-1])))
    return float(values[0]) >= -tol.loewner_tol * max(1.0, norm)


def kernel_dim(m, tol: Tolerances = DEFAULT_TOL) -> int:
    """Number of eigenvalues <= rank_rel_tol * max(1, lambda_max) of a PSD matrix."""
    sym = as_symmetric(m, tol)
    if not is_psd(sym, tol):
        raise NotPsdError("kernel_dim requires a PSD matrix")
    if sym.size == 0:
        return 0
    values = np.linalg.eigvalsh(sym)
    cutoff = tol.rank_rel_tol * max(1.0, float(values[-1]))
    return int(np.sum(values <= cutoff))


def rank_psd(m, tol: Tolerances = DEFAULT_TOL) -> int:
    """Numeric rank of a PSD matrix under the same cutoff as kernel_dim."""
    sym = as_symmetric(m, tol)
    if sym.size == 0:
        return 0
    return sym.shape[0] - kernel_dim(sym, tol)


def multiplicity_near(values, target: float, tol_abs: float) -> int:
    """Count eigenvalues within tol_abs of target (gap-based clustering)."""
    arr = np.asarray(values, dtype=float)
    return int(np.sum(np.abs(arr - target) <= tol_abs))
