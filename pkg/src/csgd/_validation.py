"""Input validation helpers for complex arrays.

scikit-learn's ``check_array`` rejects complex input, so the estimators and
library functions route through these instead.
"""

import numbers

import numpy as np

from .exceptions import ContractViolation, DimensionError


def check_complex_vector(z, name="z", *, allow_empty=False):
    """Return ``z`` as a 1-D complex128 array with finite entries."""
    arr = np.asarray(z)
    if arr.ndim == 0:
        arr = arr.reshape(1)
    if arr.ndim != 1:
        raise DimensionError(f"{name} must be 1-D, got shape {arr.shape}")
    if arr.size == 0 and not allow_empty:
        raise DimensionError(f"{name} must have at least one entry")
    arr = arr.astype(np.complex128, copy=False)
    if not np.all(np.isfinite(arr)):
        raise ContractViolation(f"{name} contains NaN or Inf")
    return arr


def check_complex_matrix(A, name="A"):
    """Return ``A`` as a 2-D complex128 array with finite entries."""
    arr = np.asarray(A)
    if arr.ndim != 2:
        raise DimensionError(f"{name} must be 2-D, got shape {arr.shape}")
    if arr.shape[0] < 1 or arr.shape[1] < 1:
        raise DimensionError(f"{name} must be non-empty, got shape {arr.shape}")
    arr = arr.astype(np.complex128, copy=False)
    if not np.all(np.isfinite(arr)):
        raise ContractViolation(f"{name} contains NaN or Inf")
    return arr


def check_square(A, name="A"):
    arr = check_complex_matrix(A, name)
    if arr.shape[0] != arr.shape[1]:
        raise DimensionError(f"{name} must be square, got shape {arr.shape}")
    return arr


def check_complex_scalar(c, name="c"):
    if not isinstance(c, numbers.Number):
        raise ContractViolation(f"{name} must be a number, got {type(c).__name__}")
    c = complex(c)
    if not (np.isfinite(c.real) and np.isfinite(c.imag)):
        raise ContractViolation(f"{name} must be finite")
    return c


def check_positive(x, name, *, strict=True):
    if not isinstance(x, numbers.Real) or not np.isfinite(x):
        raise ContractViolation(f"{name} must be a finite real number, got {x!r}")
    if strict and x <= 0:
        raise ContractViolation(f"{name} must be > 0, got {x!r}")
    if not strict and x < 0:
        raise ContractViolation(f"{name} must be >= 0, got {x!r}")
    return float(x)


def check_same_length(z, w, names=("z", "w")):
    if z.shape[0] != w.shape[0]:
        raise DimensionError(
            f"length mismatch: {names[0]} has {z.shape[0]}, {names[1]} has {w.shape[0]}"
        )


def is_hermitian(H, rtol=1e-12):
    scale = max(np.linalg.norm(H), np.finfo(float).tiny)
    return np.linalg.norm(H - H.conj().T) <= rtol * scale
