"""Closed-form symbolic solver for weighted rigid point-set registration.

Estimates the rotation ``C`` and translation ``T`` minimizing

    sum_i a_i * || b_i - C r_i - T ||^2

over unit-determinant orthogonal ``C``, via the quartic characteristic
polynomial of the 4x4 quaternion score matrix. The eigenvalue is obtained
symbolically in real arithmetic (no complex intermediates) and the
eigenvector by cofactor extraction, so the whole solve is loop-free and
runs in deterministic time. This is the FS3R path; iterative baselines
live in :mod:`rigidreg.oracle`.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from ._validation import as_matrix3, as_paired_points, as_sym4, as_weights
from .exceptions import DegenerateEigenvectorError, NumericDomainError
from .rotations import canonicalize_quaternion, quat_to_rotation

__all__ = [
    "SolverConfig",
    "ProfileMatrix",
    "CharPoly",
    "EigenSolution",
    "RigidTransform",
    "compute_profile",
    "davenport_matrix",
    "davenport_matrix_block",
    "characteristic_coeffs",
    "max_eigenvalue",
    "eigenvector_for",
    "fs3r_solve",
    "alignment_loss",
]

_SQRT6 = math.sqrt(6.0)
_CBRT2 = 2.0 ** (1.0 / 3.0)
_CBRT4 = 4.0 ** (1.0 / 3.0)

# Relative slack for clamping radicands that are nonnegative in exact
# arithmetic but may round below zero.
_CLAMP_REL = 1e-8

COFACTOR_LARGEST = "largest_row_set"
COFACTOR_FAIL = "fail"


@dataclass(frozen=True)
class SolverConfig:
    """Tunables of the symbolic solve.

    ``xi`` is the relative tolerance of the extreme-case (near-collinear)
    detector. ``cofactor_fallback`` selects what happens when the primary
    cofactor row set yields a vanishing eigenvector candidate:
    ``"largest_row_set"`` tries all four row sets and keeps the largest,
    ``"fail"`` raises once all four are below the norm threshold.
    """

    xi: float = 1e-8
    cofactor_fallback: str = COFACTOR_LARGEST

    def __post_init__(self):
        if not (self.xi > 0.0):
            raise ValueError("xi must be positive")
        if self.cofactor_fallback not in (COFACTOR_LARGEST, COFACTOR_FAIL):
            raise ValueError(f"unknown cofactor_fallback {self.cofactor_fallback!r}")


_DEFAULT_CONFIG = SolverConfig()


@dataclass(frozen=True)
class ProfileMatrix:
    """Weighted, centroid-corrected cross-covariance of a correspondence set."""

    h: np.ndarray  # (3, 3)
    b_bar: np.ndarray  # (3,)
    r_bar: np.ndarray  # (3,)
    weight_sum_pre_normalization: float


@dataclass(frozen=True)
class CharPoly:
    """Coefficients of the depressed quartic  x^4 + tau1 x^2 + tau2 x + tau3."""

    tau1: float
    tau2: float
    tau3: float


@dataclass(frozen=True)
class EigenSolution:
    """Staged intermediates of the symbolic maximum-eigenvalue computation."""

    t0: float
    alpha_t1: float
    beta_t1: float
    theta: float
    t2: float
    lambda_max: float
    degenerate: bool


@dataclass(frozen=True)
class RigidTransform:
    """Rotation plus translation, applied as ``p -> rotation @ p + translation``."""

    rotation: np.ndarray  # (3, 3)
    translation: np.ndarray  # (3,)

    def apply(self, points):
        points = np.asarray(points, dtype=np.float64)
        return points @ self.rotation.T + self.translation

    def compose(self, other: "RigidTransform") -> "RigidTransform":
        """Return self applied after ``other``."""
        return RigidTransform(
            self.rotation @ other.rotation,
            self.rotation @ other.translation + self.translation,
        )

    def inverse(self) -> "RigidTransform":
        rt = self.rotation.T
        return RigidTransform(rt, -(rt @ self.translation))

    def validate(self, tol=1e-9):
        """Check the special-orthogonality invariant; raises ValueError."""
        err = float(np.abs(self.rotation.T @ self.rotation - np.eye(3)).max())
        if err >= tol:
            raise ValueError(f"rotation is not orthogonal within {tol} (err={err:.3e})")
        if float(np.linalg.det(self.rotation)) <= 0.0:
            raise ValueError("rotation has non-positive determinant")
        return self

    @staticmethod
    def identity() -> "RigidTransform":
        return RigidTransform(np.eye(3), np.zeros(3))


def compute_profile(b, r, weights=None) -> ProfileMatrix:
    """Weighted centroids and profile matrix of paired points.

    Weights are normalized to sum 1 internally, so the result is invariant
    under scaling all weights by a common positive constant. Accumulation is
    a fixed-order sequential scalar loop: results are run-to-run identical
    and every solver baseline shares this exact code path.
    """
    b, r = as_paired_points(b, r)
    n = b.shape[0]
    w = as_weights(weights, n)
    total = float(w.sum())
    a = w / total

    b_list = b.tolist()
    r_list = r.tolist()
    a_list = a.tolist()

    bx = by = bz = 0.0
    rx = ry = rz = 0.0
    s00 = s01 = s02 = 0.0
    s10 = s11 = s12 = 0.0
    s20 = s21 = s22 = 0.0
    for i in range(n):
        ai = a_list[i]
        b0, b1, b2 = b_list[i]
        r0, r1, r2 = r_list[i]
        wb0 = ai * b0
        wb1 = ai * b1
        wb2 = ai * b2
        bx += wb0
        by += wb1
        bz += wb2
        rx += ai * r0
        ry += ai * r1
        rz += ai * r2
        s00 += wb0 * r0
        s01 += wb0 * r1
        s02 += wb0 * r2
        s10 += wb1 * r0
        s11 += wb1 * r1
        s12 += wb1 * r2
        s20 += wb2 * r0
        s21 += wb2 * r1
        s22 += wb2 * r2

    h = np.array(
        [
            [s00 - bx * rx, s01 - bx * ry, s02 - bx * rz],
            [s10 - by * rx, s11 - by * ry, s12 - by * rz],
            [s20 - bz * rx, s21 - bz * ry, s22 - bz * rz],
        ]
    )
    return ProfileMatrix(h, np.array([bx, by, bz]), np.array([rx, ry, rz]), total)


def davenport_matrix(h):
    """Symmetric 4x4 quaternion score matrix from the profile matrix entries.

    The last diagonal entry is evaluated as minus the sum of the first
    three, which is the same algebraic expression and makes the trace
    vanish exactly in floating point.
    """
    h = as_matrix3(h, "profile matrix")
    hx1, hy1, hz1 = h[0]
    hx2, hy2, hz2 = h[1]
    hx3, hy3, hz3 = h[2]

    w11 = hx1 + hy2 + hz3
    w12 = -hy3 + hz2
    w13 = -hz1 + hx3
    w14 = -hx2 + hy1
    w22 = hx1 - hy2 - hz3
    w23 = hx2 + hy1
    w24 = hx3 + hz1
    w33 = hy2 - hx1 - hz3
    w34 = hy3 + hz2
    w44 = -(w11 + w22 + w33)
    return np.array(
        [
            [w11, w12, w13, w14],
            [w12, w22, w23, w24],
            [w13, w23, w33, w34],
            [w14, w24, w34, w44],
        ]
    )


def davenport_matrix_block(d):
    """Quaternion score matrix via its block definition.

    Built as ``[[tr(D), z^T], [z, D + D^T - tr(D) I]]`` where ``z`` collects
    the antisymmetric part of ``D``. Agrees entrywise with
    :func:`davenport_matrix`; keeping both constructions makes the
    equivalence executable as a test.
    """
    d = as_matrix3(d, "cross-covariance")
    t = d[0, 0] + d[1, 1] + d[2, 2]
    z = np.array([d[1, 2] - d[2, 1], d[2, 0] - d[0, 2], d[0, 1] - d[1, 0]])
    block = (d + d.T) - t * np.eye(3)
    g = np.empty((4, 4))
    g[0, 0] = t
    g[0, 1:] = z
    g[1:, 0] = z
    g[1:, 1:] = block
    return g


def _det3(a00, a01, a02, a10, a11, a12, a20, a21, a22):
    return (
        a00 * (a11 * a22 - a12 * a21)
        - a01 * (a10 * a22 - a12 * a20)
        + a02 * (a10 * a21 - a11 * a20)
    )


def _det4_sym(w):
    """Determinant of a symmetric 4x4 by cofactor expansion along row 0."""
    m = w
    return (
        m[0, 0] * _det3(m[1, 1], m[1, 2], m[1, 3], m[1, 2], m[2, 2], m[2, 3], m[1, 3], m[2, 3], m[3, 3])
        - m[0, 1] * _det3(m[0, 1], m[1, 2], m[1, 3], m[0, 2], m[2, 2], m[2, 3], m[0, 3], m[2, 3], m[3, 3])
        + m[0, 2] * _det3(m[0, 1], m[1, 1], m[1, 3], m[0, 2], m[1, 2], m[2, 3], m[0, 3], m[1, 3], m[3, 3])
        - m[0, 3] * _det3(m[0, 1], m[1, 1], m[1, 2], m[0, 2], m[1, 2], m[2, 2], m[0, 3], m[1, 3], m[2, 3])
    )


def characteristic_coeffs(h, w=None) -> CharPoly:
    """Coefficients of the characteristic quartic of the score matrix.

    ``tau1`` is minus twice the squared Frobenius norm of the profile
    matrix, ``tau2`` equals ``-8 det(h)`` (expanded product form), and
    ``tau3`` is the 4x4 determinant computed by direct cofactor expansion.
    """
    h = as_matrix3(h, "profile matrix")
    if w is None:
        w = davenport_matrix(h)
    else:
        w = as_sym4(w, "score matrix")
    hx1, hy1, hz1 = h[0]
    hx2, hy2, hz2 = h[1]
    hx3, hy3, hz3 = h[2]

    tau1 = -2.0 * (
        hx1 * hx1
        + hx2 * hx2
        + hx3 * hx3
        + hy1 * hy1
        + hy2 * hy2
        + hy3 * hy3
        + hz1 * hz1
        + hz2 * hz2
        + hz3 * hz3
    )
    tau2 = 8.0 * (
        hx3 * hy2 * hz1
        - hx2 * hy3 * hz1
        - hx3 * hy1 * hz2
        + hx1 * hy3 * hz2
        + hx2 * hy1 * hz3
        - hx1 * hy2 * hz3
    )
    tau3 = float(_det4_sym(w))
    return CharPoly(float(tau1), float(tau2), float(tau3))


def _clamp_radicand(value, scale, what):
    """Round tiny negative radicands to zero; raise beyond the slack."""
    if value >= 0.0:
        return value
    if value > -_CLAMP_REL * scale:
        return 0.0
    raise NumericDomainError(f"negative radicand in {what}", value)


def max_eigenvalue(coeffs: CharPoly, config: SolverConfig | None = None) -> EigenSolution:
    """Largest root of the characteristic quartic, in real arithmetic.

    The root is evaluated through the staged quantities ``t0``, the real and
    imaginary parts of the complex cube root, and ``t2``; all intermediate
    radicands are nonnegative for a symmetric score matrix, so tiny negative
    values are clamped and anything beyond roundoff raises
    :class:`NumericDomainError`.

    Extreme-case handling: when the data is nearly collinear the quartic has
    a (near-)double top root, detected as ``tau2 ~ 0`` together with
    ``tau1^2 - 4 tau3 ~ 0`` (or ``t2 ~ 0``, the zero-information case). The
    limit value ``sqrt(-tau1 / 2)`` is returned there, with the
    ``degenerate`` flag set. A vanishing ``tau2`` alone (any rank-deficient
    profile, e.g. planar data) does not enter the limit branch: the general
    formula stays well defined because the ``tau2 / t2`` quotient tends to
    zero, and the limit value would be wrong for a simple top root.
    """
    cfg = config or _DEFAULT_CONFIG
    tau1, tau2, tau3 = coeffs.tau1, coeffs.tau2, coeffs.tau3
    if tau1 > 0.0:
        raise ValueError(f"tau1 must be nonpositive, got {tau1!r}")

    t0 = 2.0 * tau1**3 + 27.0 * tau2 * tau2 - 72.0 * tau1 * tau3

    p = tau1 * tau1 + 12.0 * tau3
    p = _clamp_radicand(p, max(1.0, tau1 * tau1, abs(12.0 * tau3)), "tau1^2 + 12 tau3")

    disc = 4.0 * p**3 - t0 * t0
    disc = _clamp_radicand(disc, max(1.0, t0 * t0), "resolvent discriminant")
    sqrt_disc = math.sqrt(disc)

    if sqrt_disc < 1e-300 and abs(t0) < 1e-300:
        theta = 0.0
    else:
        theta = math.atan2(sqrt_disc, t0)

    sqrt_p = math.sqrt(p)
    alpha_t1 = _CBRT2 * sqrt_p * math.cos(theta / 3.0)
    beta_t1 = _CBRT2 * sqrt_p * math.sin(theta / 3.0)

    t2 = math.sqrt(max(0.0, -4.0 * tau1 + 2.0 * _CBRT4 * alpha_t1))

    scale = max(1.0, abs(tau1) ** 0.75)
    double_root_gap = tau1 * tau1 - 4.0 * tau3
    near_collinear = (
        abs(tau2) <= cfg.xi * scale
        and abs(double_root_gap) <= cfg.xi * max(1.0, tau1 * tau1)
    )
    if near_collinear or t2 <= cfg.xi * scale:
        lam = math.sqrt(max(0.0, -0.5 * tau1))
        return EigenSolution(t0, alpha_t1, beta_t1, theta, t2, lam, True)

    inner = -t2 * t2 - 12.0 * tau1 - 12.0 * _SQRT6 * tau2 / t2
    inner = _clamp_radicand(inner, max(1.0, t2 * t2, abs(12.0 * tau1)), "eigenvalue radicand")
    lam = (t2 + math.sqrt(inner)) / (2.0 * _SQRT6)
    return EigenSolution(t0, alpha_t1, beta_t1, theta, t2, lam, False)


def _cofactor_primary(m):
    """Null-space candidate from the fourth row set of 3x3 minors.

    These are the closed-form adjugate-column expressions of the shifted
    score matrix; for a simple eigenvalue the column is proportional to the
    eigenvector.
    """
    g11, g12, g13, g14 = m[0]
    g22, g23, g24 = m[1][1], m[1][2], m[1][3]
    g33, g34 = m[2][2], m[2][3]
    q0 = (
        g14 * g23 * g23
        - g13 * g24 * g23
        - g12 * g34 * g23
        - g14 * g22 * g33
        + g12 * g24 * g33
        + g13 * g22 * g34
    )
    q1 = (
        g24 * g13 * g13
        - g12 * g34 * g13
        - g13 * g14 * g23
        + g12 * g14 * g33
        - g11 * g24 * g33
        + g11 * g23 * g34
    )
    q2 = (
        g34 * g12 * g12
        - g14 * g23 * g12
        - g13 * g24 * g12
        + g13 * g14 * g22
        + g11 * g23 * g24
        - g11 * g22 * g34
    )
    q3 = (
        -g33 * g12 * g12
        + 2.0 * g13 * g23 * g12
        - g11 * g23 * g23
        - g13 * g13 * g22
        + g11 * g22 * g33
    )
    return (q0, q1, q2, q3)


def _cofactor_column(m, col):
    """Signed cofactors of column ``col``: one adjugate column of ``m``."""
    out = []
    cols = [c for c in range(4) if c != col]
    for i in range(4):
        rs = [r for r in range(4) if r != i]
        minor = _det3(
            m[rs[0]][cols[0]], m[rs[0]][cols[1]], m[rs[0]][cols[2]],
            m[rs[1]][cols[0]], m[rs[1]][cols[1]], m[rs[1]][cols[2]],
            m[rs[2]][cols[0]], m[rs[2]][cols[1]], m[rs[2]][cols[2]],
        )
        out.append(minor if (i + col) % 2 == 0 else -minor)
    return tuple(out)


def eigenvector_for(g, lambda_max, config: SolverConfig | None = None):
    """Unit eigenvector of the score matrix for (approximately) ``lambda_max``.

    Computes the closed-form cofactor candidate first; if its norm is below
    ``1e-14 * ||g||_inf^3`` the remaining three adjugate columns are tried
    and the largest is kept. With the default fallback policy a
    below-threshold but nonzero candidate is still normalized (for nearly
    coincident top eigenvalues the tiny columns remain directionally valid
    members of the top eigenspace); only an exactly vanishing adjugate of a
    nonzero shifted matrix raises :class:`DegenerateEigenvectorError`. A
    zero shifted matrix means every direction is an eigenvector and the
    identity quaternion is returned as the canonical representative.
    """
    cfg = config or _DEFAULT_CONFIG
    g = as_sym4(g, "score matrix")
    lam = float(lambda_max)

    m = [
        [g[0, 0] - lam, g[0, 1], g[0, 2], g[0, 3]],
        [g[0, 1], g[1, 1] - lam, g[1, 2], g[1, 3]],
        [g[0, 2], g[1, 2], g[2, 2] - lam, g[2, 3]],
        [g[0, 3], g[1, 3], g[2, 3], g[3, 3] - lam],
    ]

    norm_inf = max(sum(abs(x) for x in row) for row in m)
    threshold = 1e-14 * norm_inf**3

    best = _cofactor_primary(m)
    best_norm = math.sqrt(sum(x * x for x in best))
    if best_norm <= threshold:
        for col in (0, 1, 2):
            cand = _cofactor_column(m, col)
            norm = math.sqrt(sum(x * x for x in cand))
            if norm > best_norm:
                best, best_norm = cand, norm
        if best_norm <= threshold:
            if cfg.cofactor_fallback == COFACTOR_FAIL:
                raise DegenerateEigenvectorError(
                    f"all cofactor candidates below threshold {threshold:.3e}"
                )
            if best_norm == 0.0:
                if norm_inf == 0.0:
                    # Zero matrix: the eigenspace is all of R^4.
                    return np.array([1.0, 0.0, 0.0, 0.0])
                raise DegenerateEigenvectorError(
                    "adjugate of the shifted score matrix vanished exactly"
                )

    q = np.array(best) / best_norm
    return canonicalize_quaternion(q)


def fs3r_solve(b, r, weights=None, config: SolverConfig | None = None):
    """Closed-form weighted rigid registration of paired points.

    Parameters
    ----------
    b : (n, 3) array
        Body-frame points (targets).
    r : (n, 3) array
        Reference-frame points (sources).
    weights : (n,) array, optional
        Positive pair weights; uniform when omitted.
    config : SolverConfig, optional

    Returns
    -------
    (RigidTransform, EigenSolution)
        Transform with ``rotation @ r + translation ~ b`` and the staged
        eigenvalue intermediates (including the degenerate-branch flag).

    Inputs with fewer than 3 pairs, or with collinear/coplanar geometry,
    are accepted and produce the algebraic result of the formulas; the
    transform is then one representative of an underdetermined family.
    """
    cfg = config or _DEFAULT_CONFIG
    profile = compute_profile(b, r, weights)
    w = davenport_matrix(profile.h)
    coeffs = characteristic_coeffs(profile.h, w)
    eig = max_eigenvalue(coeffs, cfg)
    q = eigenvector_for(w, eig.lambda_max, cfg)
    c = quat_to_rotation(q)
    t = profile.b_bar - c @ profile.r_bar
    return RigidTransform(c, t), eig


def alignment_loss(b, r, transform: RigidTransform, weights=None) -> float:
    """Weighted mean squared residual of a transform on paired points.

    Weights are normalized to sum 1, matching the solver's objective.
    """
    b, r = as_paired_points(b, r)
    w = as_weights(weights, b.shape[0])
    a = w / w.sum()
    residual = b - r @ transform.rotation.T - transform.translation
    return float(a @ np.einsum("ij,ij->i", residual, residual))
