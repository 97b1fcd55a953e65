"""Independent numerical reference solvers.

These are the slow-but-trustworthy routes used to cross-validate the
symbolic solver and to serve as the iterative EIG / SVD baselines in the
benchmarks: a cyclic Jacobi eigensolver for the symmetric 4x4 score matrix,
a one-sided Jacobi SVD for 3x3 cross-covariances, the classic
SVD-with-determinant-correction rigid solve, and a companion-matrix quartic
root finder. None of them share code with the symbolic eigenvalue path.
"""

from __future__ import annotations

import math
from typing import NamedTuple

import numpy as np

from ._validation import as_matrix3
from .exceptions import ConvergenceError
from .rotations import canonicalize_quaternion, quat_to_rotation
from .solver import CharPoly, RigidTransform, compute_profile, davenport_matrix

__all__ = [
    "EigenPairs",
    "Svd3",
    "jacobi_eig_sym",
    "svd3_jacobi",
    "svd_rigid_solve",
    "eig_rigid_solve",
    "quartic_roots",
]


class EigenPairs(NamedTuple):
    values: np.ndarray  # descending
    vectors: np.ndarray  # orthonormal columns, matched to values


class Svd3(NamedTuple):
    u: np.ndarray
    s: np.ndarray  # descending, nonnegative
    vt: np.ndarray


def jacobi_eig_sym(w, max_sweeps=50, tol_factor=1e-13) -> EigenPairs:
    """Eigendecomposition of a symmetric matrix by cyclic Jacobi rotations.

    Sweeps run until the off-diagonal Frobenius norm drops below
    ``tol_factor`` times the Frobenius norm of the input, raising
    :class:`ConvergenceError` after ``max_sweeps`` (which does not happen
    for symmetric input). Eigenpairs are returned sorted descending.
    """
    w = np.asarray(w, dtype=np.float64)
    if w.ndim != 2 or w.shape[0] != w.shape[1]:
        raise ValueError(f"matrix must be square, got shape {w.shape}")
    if not np.isfinite(w).all():
        raise ValueError("matrix contains non-finite values")
    n = w.shape[0]
    sym_scale = max(1.0, float(np.abs(w).max()))
    if float(np.abs(w - w.T).max()) > 1e-9 * sym_scale:
        raise ValueError("matrix is not symmetric")

    a = [[float(w[i, j]) for j in range(n)] for i in range(n)]
    v = [[1.0 if i == j else 0.0 for j in range(n)] for i in range(n)]

    fro = math.sqrt(sum(a[i][j] * a[i][j] for i in range(n) for j in range(n)))
    stop = tol_factor * fro

    pairs = [(p, q) for p in range(n - 1) for q in range(p + 1, n)]
    converged = False
    for _ in range(max_sweeps + 1):
        off = math.sqrt(2.0 * sum(a[p][q] * a[p][q] for p, q in pairs))
        if off <= stop:
            converged = True
            break
        for p, q in pairs:
            apq = a[p][q]
            if apq == 0.0:
                continue
            app = a[p][p]
            aqq = a[q][q]
            tau = (aqq - app) / (2.0 * apq)
            if tau >= 0.0:
                t = 1.0 / (tau + math.sqrt(1.0 + tau * tau))
            else:
                t = -1.0 / (-tau + math.sqrt(1.0 + tau * tau))
            c = 1.0 / math.sqrt(1.0 + t * t)
            s = t * c
            for i in range(n):
                if i != p and i != q:
                    aip = a[i][p]
                    aiq = a[i][q]
                    a[i][p] = a[p][i] = aip * c - aiq * s
                    a[i][q] = a[q][i] = aiq * c + aip * s
            a[p][p] = app - t * apq
            a[q][q] = aqq + t * apq
            a[p][q] = a[q][p] = 0.0
            for i in range(n):
                vip = v[i][p]
                viq = v[i][q]
                v[i][p] = vip * c - viq * s
                v[i][q] = viq * c + vip * s
    if not converged:
        raise ConvergenceError(f"Jacobi did not converge in {max_sweeps} sweeps")

    values = np.array([a[i][i] for i in range(n)])
    vectors = np.array(v)
    order = np.argsort(values)[::-1]
    return EigenPairs(values[order], vectors[:, order])


def _orthonormal_complement(columns):
    """Extend a list of orthonormal 3-vectors to a full right-handed basis."""
    basis = [np.asarray(c, dtype=np.float64) for c in columns]
    candidates = [np.eye(3)[k] for k in range(3)]
    while len(basis) < 3:
        best, best_norm = None, -1.0
        for cand in candidates:
            residual = cand.copy()
            for u in basis:
                residual -= (u @ cand) * u
            norm = float(np.linalg.norm(residual))
            if norm > best_norm:
                best, best_norm = residual / norm if norm > 0 else None, norm
        basis.append(best)
    return basis


def svd3_jacobi(a, max_sweeps=30) -> Svd3:
    """SVD of a 3x3 matrix by one-sided Jacobi column orthogonalization.

    Rank-deficient input is fine: vanished columns are completed to an
    orthonormal basis, so ``u @ diag(s) @ vt`` always reconstructs the
    input and singular values are nonnegative descending.
    """
    a = as_matrix3(a, "matrix")
    b = [[float(a[i, j]) for j in range(3)] for i in range(3)]
    v = [[1.0 if i == j else 0.0 for j in range(3)] for i in range(3)]

    scale = max(abs(a).max(), 1e-300)
    eps = 1e-15
    for _ in range(max_sweeps):
        rotated = False
        for p, q in ((0, 1), (0, 2), (1, 2)):
            alpha = sum(b[i][p] * b[i][p] for i in range(3))
            beta = sum(b[i][q] * b[i][q] for i in range(3))
            gamma = sum(b[i][p] * b[i][q] for i in range(3))
            if abs(gamma) <= eps * math.sqrt(alpha * beta) or gamma == 0.0:
                continue
            rotated = True
            zeta = (beta - alpha) / (2.0 * gamma)
            if zeta >= 0.0:
                t = 1.0 / (zeta + math.sqrt(1.0 + zeta * zeta))
            else:
                t = -1.0 / (-zeta + math.sqrt(1.0 + zeta * zeta))
            c = 1.0 / math.sqrt(1.0 + t * t)
            s = c * t
            for i in range(3):
                bip, biq = b[i][p], b[i][q]
                b[i][p] = c * bip - s * biq
                b[i][q] = s * bip + c * biq
                vip, viq = v[i][p], v[i][q]
                v[i][p] = c * vip - s * viq
                v[i][q] = s * vip + c * viq
        if not rotated:
            break

    norms = [math.sqrt(sum(b[i][j] * b[i][j] for i in range(3))) for j in range(3)]
    order = sorted(range(3), key=lambda j: -norms[j])
    s_vals = [norms[j] for j in order]

    u_cols = []
    for j in order:
        if norms[j] > 1e-14 * scale:
            u_cols.append(np.array([b[i][j] for i in range(3)]) / norms[j])
    if len(u_cols) < 3:
        u_cols = _orthonormal_complement(u_cols)

    u = np.column_stack(u_cols)
    v_np = np.array(v)[:, order]
    return Svd3(u, np.array(s_vals), v_np.T)


def svd_rigid_solve(b, r, weights=None) -> RigidTransform:
    """Rigid registration baseline via SVD of the centered cross-covariance.

    The sign of the smallest singular direction is corrected so the
    recovered rotation is always proper (determinant +1), which keeps
    reflection-prone planar inputs safe. Rank-deficient data yields a valid
    but non-unique rotation.
    """
    profile = compute_profile(b, r, weights)
    u, s, vt = svd3_jacobi(profile.h)
    d = float(np.linalg.det(u @ vt))
    sign = 1.0 if d >= 0.0 else -1.0
    c = (u * np.array([1.0, 1.0, sign])) @ vt
    t = profile.b_bar - c @ profile.r_bar
    return RigidTransform(c, t)


def eig_rigid_solve(b, r, weights=None) -> RigidTransform:
    """Rigid registration baseline via the Jacobi eigensolver.

    Same accumulation code path as the other solvers; only the eigenvalue
    extraction differs (iterative instead of symbolic).
    """
    from .solver import davenport_matrix  # local import to avoid cycle at module load

    profile = compute_profile(b, r, weights)
    w = davenport_matrix(profile.h)
    pairs = jacobi_eig_sym(w)
    q = canonicalize_quaternion(pairs.vectors[:, 0])
    c = quat_to_rotation(q)
    t = profile.b_bar - c @ profile.r_bar
    return RigidTransform(c, t)


def quartic_roots(coeffs: CharPoly):
    """All four roots of ``x^4 + tau1 x^2 + tau2 x + tau3``.

    Companion-matrix eigenvalues, with a Newton polish per root (skipped at
    near-critical points). Returned sorted by descending real part.
    """
    poly = np.array([1.0, 0.0, coeffs.tau1, coeffs.tau2, coeffs.tau3])
    roots = np.roots(poly).astype(np.complex128)

    dpoly = np.array([4.0, 0.0, 2.0 * coeffs.tau1, coeffs.tau2])
    scale = max(1.0, float(np.abs(poly).max()))
    polished = []
    for z in roots:
        for _ in range(2):
            dp = np.polyval(dpoly, z)
            if abs(dp) < 1e-12 * scale:
                break
            z = z - np.polyval(poly, z) / dp
        polished.append(z)
    polished.sort(key=lambda z: (-z.real, -z.imag))
    return np.array(polished)
