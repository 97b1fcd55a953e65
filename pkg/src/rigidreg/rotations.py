"""Rotation representations: quaternions, matrices, and X-Y-Z Euler angles.

Conventions used throughout the package:

* Quaternions are scalar-first ``(q0, q1, q2, q3)`` and canonicalized to
  ``q0 >= 0`` (first nonzero component positive when ``q0 == 0``).
* ``quat_to_rotation`` follows the attitude convention: for correspondence
  data ``b ~ C r + T`` the optimal quaternion of the alignment solver maps
  reference-frame vectors into the body frame, ``quat_to_rotation(q) @ r ~ b``.
* Euler angles are extrinsic X-Y-Z: ``C = Rz(psi) @ Ry(theta) @ Rx(phi)``.
"""

from __future__ import annotations

import math

import numpy as np

from ._validation import as_quaternion, as_rotation

__all__ = [
    "canonicalize_quaternion",
    "quat_to_rotation",
    "rotation_to_quat",
    "euler_xyz_to_rotation",
    "rotation_to_euler_xyz",
]


def canonicalize_quaternion(q):
    """Fix the +/-q ambiguity: scalar part nonnegative, tie broken by the
    first nonzero component."""
    q = np.asarray(q, dtype=np.float64)
    for component in q:
        if component != 0.0:
            return -q if component < 0.0 else q.copy()
    return q.copy()


def quat_to_rotation(q):
    """Rotation matrix of a unit quaternion (reference frame into body frame).

    Raises ValueError if ``q`` is not unit length within 1e-9.
    """
    q = as_quaternion(q, tol=1e-9)
    q0, q1, q2, q3 = q
    return np.array(
        [
            [
                1.0 - 2.0 * (q2 * q2 + q3 * q3),
                2.0 * (q1 * q2 + q0 * q3),
                2.0 * (q1 * q3 - q0 * q2),
            ],
            [
                2.0 * (q1 * q2 - q0 * q3),
                1.0 - 2.0 * (q1 * q1 + q3 * q3),
                2.0 * (q2 * q3 + q0 * q1),
            ],
            [
                2.0 * (q1 * q3 + q0 * q2),
                2.0 * (q2 * q3 - q0 * q1),
                1.0 - 2.0 * (q1 * q1 + q2 * q2),
            ],
        ]
    )


def rotation_to_quat(c):
    """Unit quaternion of a rotation matrix, canonical sign applied.

    Uses Shepperd's branch selection (largest diagonal combination) for
    numerical stability. Raises ValueError for non-orthogonal input.
    """
    c = as_rotation(c, tol=1e-6)
    m00, m01, m02 = c[0]
    m10, m11, m12 = c[1]
    m20, m21, m22 = c[2]
    trace = m00 + m11 + m22

    # The four squared components, up to a common positive factor. Pick the
    # branch whose divisor is largest.
    choices = (trace, m00, m11, m22)
    branch = max(range(4), key=lambda i: choices[i])
    if branch == 0:
        s = math.sqrt(trace + 1.0) * 2.0
        q = (0.25 * s, (m12 - m21) / s, (m20 - m02) / s, (m01 - m10) / s)
    elif branch == 1:
        s = math.sqrt(1.0 + m00 - m11 - m22) * 2.0
        q = ((m12 - m21) / s, 0.25 * s, (m01 + m10) / s, (m02 + m20) / s)
    elif branch == 2:
        s = math.sqrt(1.0 + m11 - m00 - m22) * 2.0
        q = ((m20 - m02) / s, (m01 + m10) / s, 0.25 * s, (m12 + m21) / s)
    else:
        s = math.sqrt(1.0 + m22 - m00 - m11) * 2.0
        q = ((m01 - m10) / s, (m02 + m20) / s, (m12 + m21) / s, 0.25 * s)

    q = np.array(q)
    q /= np.linalg.norm(q)
    return canonicalize_quaternion(q)


def euler_xyz_to_rotation(phi, theta, psi):
    """Rotation matrix from extrinsic X-Y-Z Euler angles (radians)."""
    if not (math.isfinite(phi) and math.isfinite(theta) and math.isfinite(psi)):
        raise ValueError("Euler angles must be finite")
    cx, sx = math.cos(phi), math.sin(phi)
    cy, sy = math.cos(theta), math.sin(theta)
    cz, sz = math.cos(psi), math.sin(psi)
    return np.array(
        [
            [cz * cy, -sz * cx + cz * sy * sx, sz * sx + cz * sy * cx],
            [sz * cy, cz * cx + sz * sy * sx, -cz * sx + sz * sy * cx],
            [-sy, cy * sx, cy * cx],
        ]
    )


def rotation_to_euler_xyz(c):
    """Extrinsic X-Y-Z Euler angles ``(phi, theta, psi)`` of a rotation matrix.

    At an exact gimbal-lock matrix (pitch entries exactly zero) the
    one-parameter family of solutions is collapsed to the canonical
    representative with ``phi = 0``. Near-lock matrices keep the regular
    path: the shared ``cos(theta)`` factor cancels inside atan2, so the
    reconstruction error stays at the input's own resolution.
    """
    c = as_rotation(c, tol=1e-6)
    s_theta = min(1.0, max(-1.0, -c[2, 0]))
    if c[0, 0] == 0.0 and c[1, 0] == 0.0:
        theta = math.copysign(math.pi / 2.0, s_theta)
        return 0.0, theta, math.atan2(-c[0, 1], c[1, 1])
    phi = math.atan2(c[2, 1], c[2, 2])
    theta = math.asin(s_theta)
    psi = math.atan2(c[1, 0], c[0, 0])
    return phi, theta, psi
