"""Input validation helpers shared by the functional API and the estimators."""

import os

import numpy as np

from ._errors import DimensionMismatch, InputError, NotHermitian

#: Default tolerances; all are relative to ``1 + ||M||_2`` where applicable.
DEFAULT_TOLERANCES = {
    "tol_herm": 1e-10,
    "tol_psd": 1e-10,
    "tol_ricc": 1e-8,
    "tol_graph": 1e-8,
    "tol_proj": 1e-8,
    "quad_tol": 1e-12,
}


def resolve_tolerances(tolerances=None):
    """Merge user tolerances over the defaults; reject non-positive values."""
    tol = dict(DEFAULT_TOLERANCES)
    for key, value in (tolerances or {}).items():
        if value is None:
            continue
        if key not in tol:
            raise InputError(f"unknown tolerance {key!r}")
        value = float(value)
        if not value > 0:
            raise InputError(f"tolerance {key} must be positive, got {value}")
        tol[key] = value
    return tol


def check_matrix(M, name="matrix"):
    """Return ``M`` as a finite 2-D complex128 array."""
    arr = np.asarray(M)
    if arr.ndim == 0:
        arr = arr.reshape(1, 1)
    if arr.ndim != 2 or arr.shape[0] == 0 or arr.shape[1] == 0:
        raise DimensionMismatch(f"{name} must be a non-empty 2-D array, got shape {arr.shape}")
    arr = arr.astype(np.complex128, copy=True)
    if not np.all(np.isfinite(arr)):
        raise InputError(f"{name} contains NaN or Inf entries")
    return arr


def check_square(M, name="matrix"):
    arr = check_matrix(M, name)
    if arr.shape[0] != arr.shape[1]:
        raise DimensionMismatch(f"{name} must be square, got shape {arr.shape}")
    return arr


def norm2(M):
    """Spectral norm; 0 for empty input."""
    M = np.asarray(M)
    if M.size == 0:
        return 0.0
    return float(np.linalg.norm(M, 2))


def hermitian_part(M):
    return (M + M.conj().T) / 2


def hermiticity_defect(M):
    return norm2(M - M.conj().T)


def check_hermitian(M, name="matrix", tol=DEFAULT_TOLERANCES["tol_herm"]):
    """Square-check ``M`` and verify ``||M - M*|| <= tol (1 + ||M||)``."""
    arr = check_square(M, name)
    defect = hermiticity_defect(arr)
    if defect > tol * (1.0 + norm2(arr)):
        raise NotHermitian(f"{name} is not Hermitian (defect {defect:.3e})", defect=defect)
    return arr


def min_eig_hermitian(M):
    return float(np.linalg.eigvalsh(hermitian_part(M))[0])


def max_eig_hermitian(M):
    return float(np.linalg.eigvalsh(hermitian_part(M))[-1])


def is_psd(M, tol=DEFAULT_TOLERANCES["tol_psd"]):
    return min_eig_hermitian(M) >= -tol * (1.0 + norm2(M))


def sigma_min(M):
    return float(np.linalg.svd(M, compute_uv=False)[-1])


def max_threads():
    """Worker cap from ``DICHORICC_THREADS`` (default: CPU count)."""
    raw = os.environ.get("DICHORICC_THREADS", "").strip()
    if raw:
        try:
            value = int(raw)
        except ValueError as exc:
            raise InputError(f"DICHORICC_THREADS must be an integer, got {raw!r}") from exc
        if value < 1:
            raise InputError("DICHORICC_THREADS must be at least 1")
        return value
    return os.cpu_count() or 1
