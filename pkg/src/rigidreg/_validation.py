"""Input validation helpers shared by the estimators and the functional API."""

from __future__ import annotations

import numpy as np


def as_points(x, name="points", min_rows=1):
    """Coerce to a finite float64 array of shape (n, 3)."""
    arr = np.asarray(x, dtype=np.float64)
    if arr.ndim == 1 and arr.shape == (3,):
        arr = arr.reshape(1, 3)
    if arr.ndim != 2 or arr.shape[1] != 3:
        raise ValueError(f"{name} must have shape (n, 3), got {arr.shape}")
    if arr.shape[0] < min_rows:
        raise ValueError(f"{name} needs at least {min_rows} rows, got {arr.shape[0]}")
    if not np.isfinite(arr).all():
        raise ValueError(f"{name} contains non-finite values")
    return arr


def as_paired_points(b, r, min_rows=1):
    """Validate a correspondence pair: equal-length (n, 3) point arrays."""
    b = as_points(b, "body points", min_rows)
    r = as_points(r, "reference points", min_rows)
    if b.shape[0] != r.shape[0]:
        raise ValueError(
            f"paired point sets must have equal length, got {b.shape[0]} and {r.shape[0]}"
        )
    return b, r


def as_weights(weights, n):
    """Validate per-pair weights: positive, finite, length n. None means uniform."""
    if weights is None:
        return np.full(n, 1.0 / n)
    w = np.asarray(weights, dtype=np.float64)
    if w.shape != (n,):
        raise ValueError(f"weights must have shape ({n},), got {w.shape}")
    if not np.isfinite(w).all():
        raise ValueError("weights contain non-finite values")
    if (w <= 0.0).any():
        raise ValueError("weights must all be positive")
    return w


def as_matrix3(m, name="matrix"):
    arr = np.asarray(m, dtype=np.float64)
    if arr.shape != (3, 3):
        raise ValueError(f"{name} must have shape (3, 3), got {arr.shape}")
    if not np.isfinite(arr).all():
        raise ValueError(f"{name} contains non-finite values")
    return arr


def as_sym4(m, name="matrix", tol=1e-9):
    """Validate a symmetric finite 4x4 matrix."""
    arr = np.asarray(m, dtype=np.float64)
    if arr.shape != (4, 4):
        raise ValueError(f"{name} must have shape (4, 4), got {arr.shape}")
    if not np.isfinite(arr).all():
        raise ValueError(f"{name} contains non-finite values")
    scale = max(1.0, float(np.abs(arr).max()))
    if float(np.abs(arr - arr.T).max()) > tol * scale:
        raise ValueError(f"{name} is not symmetric")
    return arr


def as_rotation(c, tol=1e-6, name="rotation"):
    """Validate a special orthogonal 3x3 matrix within ``tol``."""
    arr = as_matrix3(c, name)
    err = float(np.abs(arr.T @ arr - np.eye(3)).max())
    if err > tol:
        raise ValueError(f"{name} is not orthogonal (|C^T C - I|_max = {err:.3e})")
    if float(np.linalg.det(arr)) <= 0.0:
        raise ValueError(f"{name} has non-positive determinant (reflection)")
    return arr


def as_quaternion(q, tol=1e-9, name="quaternion"):
    """Validate a unit quaternion (scalar first) within ``tol`` of norm 1."""
    arr = np.asarray(q, dtype=np.float64)
    if arr.shape != (4,):
        raise ValueError(f"{name} must have shape (4,), got {arr.shape}")
    if not np.isfinite(arr).all():
        raise ValueError(f"{name} contains non-finite values")
    norm = float(np.linalg.norm(arr))
    if abs(norm - 1.0) > tol:
        raise ValueError(f"{name} is not unit length (|q| = {norm!r})")
    return arr
