"""
SO(3) Kernel Module - Exponential, logarithm, axis-angle extraction and the
closed-form Baker-Campbell-Hausdorff product for orthogonal generators.

Norms follow ||X||^2 = tr(X^T X)/2, so ||theta E_kl|| = theta.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass

import numpy as np
from scipy.linalg import expm, logm

from services.errors import BranchError, DimensionError, OrthogonalityError
from services.exact_scalar import QuadSurd, Scalar
from services.matrices import RotationMatrix, SkewMatrix

logger = logging.getLogger(__name__)

BRANCH_MARGIN = 1e-6
ARCSIN_MARGIN = 1e-12
ORTHOGONAL_TOL = 1e-10
AXIS_TOL = 1e-12


@dataclass(frozen=True, eq=False)
class AxisAngle:
    """
    Rotation axis and angle of an SO(3) element.

    The axis is oriented so its first nonzero component is positive;
    ``orientation`` records the sense, so R = exp(orientation * angle * hat(axis)).
    """

    axis: np.ndarray
    angle: float
    orientation: int = 1

    def signed_axis(self) -> np.ndarray:
        return self.orientation * self.axis


def _require_so3(matrix, name: str) -> None:
    if matrix.dimension != 3:
        raise DimensionError(f"{name} needs a 3x3 matrix, got {matrix.dimension}x{matrix.dimension}")


def axis_vector(X: SkewMatrix) -> np.ndarray:
    """Vector w with hat(w) = X, i.e. X v = w x v."""
    _require_so3(X, "axis_vector")
    e = X.entries
    return np.array([-e[1, 2], e[0, 2], -e[0, 1]])


def skew_from_axis(w) -> SkewMatrix:
    w1, w2, w3 = (float(x) for x in w)
    return SkewMatrix(np.array([[0.0, -w3, w2], [w3, 0.0, -w1], [-w2, w1, 0.0]]))


def exp_so3(X: SkewMatrix) -> RotationMatrix:
    """Rodrigues formula I + (sin t/t) X + (2 sin^2(t/2)/t^2) X^2 with t = ||X||."""
    _require_so3(X, "exp_so3")
    theta = X.norm()
    K = X.entries
    if theta < 1e-8:
        # series limits of both coefficients
        a = 1.0 - theta * theta / 6.0
        b = 0.5 - theta * theta / 24.0
    else:
        a = math.sin(theta) / theta
        b = 2.0 * math.sin(theta / 2.0) ** 2 / (theta * theta)
    return RotationMatrix(np.eye(3) + a * K + b * (K @ K))


def log_so3(R: RotationMatrix) -> SkewMatrix:
    """
    Principal logarithm of R in SO(3).

    The angle comes from atan2(||Z||, (tr R - 1)/2) with Z = (R - R^T)/2, which
    agrees with arcsin(||Z||) up to pi/2 and resolves the obtuse branch beyond.
    """
    _require_so3(R, "log_so3")
    Z = (R.entries - R.entries.T) / 2.0
    z = float(np.sqrt(0.5 * np.sum(Z * Z)))
    cos_theta = (np.trace(R.entries) - 1.0) / 2.0
    theta = math.atan2(z, cos_theta)
    if math.pi - theta < BRANCH_MARGIN:
        raise BranchError(f"rotation angle {theta!r} is within {BRANCH_MARGIN} of pi")
    if z == 0.0:
        return SkewMatrix(np.zeros((3, 3)))
    return SkewMatrix((theta / z) * Z)


def axis_angle(R: RotationMatrix) -> AxisAngle:
    _require_so3(R, "axis_angle")
    entries = R.entries
    angle = float(np.arccos(np.clip((np.trace(entries) - 1.0) / 2.0, -1.0, 1.0)))
    if angle < AXIS_TOL:
        return AxisAngle(np.array([1.0, 0.0, 0.0]), 0.0, 1)
    Z = (entries - entries.T) / 2.0
    w = np.array([-Z[1, 2], Z[0, 2], -Z[0, 1]])
    if np.linalg.norm(w) > 1e-6:
        axis = w / np.linalg.norm(w)
    else:
        # near pi: (R + I)/2 = n n^T
        outer = (entries + np.eye(3)) / 2.0
        column = outer[:, int(np.argmax(np.diag(outer)))]
        axis = column / np.linalg.norm(column)
    first = next(i for i in range(3) if abs(axis[i]) > AXIS_TOL)
    orientation = 1
    if axis[first] < 0:
        axis = -axis
        orientation = -1
    if np.linalg.norm(w) <= 1e-6:
        orientation = 1
    return AxisAngle(axis, angle, orientation)


def bch_orthogonal(X: SkewMatrix, Y: SkewMatrix, principal: bool = False) -> SkewMatrix:
    """
    Z with exp(Z) = exp(X) exp(Y) for orthogonal X, Y in so(3).

    Z = alpha X + beta Y + gamma [X, Y] with a = sin t cos^2(f/2),
    b = sin f cos^2(t/2), c = sin t sin f / 2, d = sqrt(a^2 + b^2 + c^2),
    t = ||X||, f = ||Y||. With ``principal`` the common factor is arcsin(d)/d,
    valid while the product angle stays below pi/2; otherwise the angle is
    recovered with atan2 so every product angle short of pi is covered.
    """
    _require_so3(X, "bch_orthogonal")
    _require_so3(Y, "bch_orthogonal")
    trace = float(np.trace(X.entries.T @ Y.entries))
    if abs(trace) > ORTHOGONAL_TOL:
        raise OrthogonalityError(f"generators are not orthogonal: tr(X^T Y) = {trace!r}")
    theta, phi = X.norm(), Y.norm()
    if phi == 0.0:
        return X
    if theta == 0.0:
        return Y
    half_t, half_f = math.cos(theta / 2.0), math.cos(phi / 2.0)
    a = math.sin(theta) * half_f ** 2
    b = math.sin(phi) * half_t ** 2
    c = 0.5 * math.sin(theta) * math.sin(phi)
    d = math.sqrt(a * a + b * b + c * c)
    if principal:
        if d >= 1.0 - ARCSIN_MARGIN:
            raise BranchError(f"arcsin argument {d!r} leaves the principal domain")
        factor = math.asin(d) / d if d > 0.0 else 1.0
    else:
        cos_psi = 2.0 * half_t ** 2 * half_f ** 2 - 1.0
        psi = math.atan2(d, cos_psi)
        if math.pi - psi < BRANCH_MARGIN:
            raise BranchError(f"product angle {psi!r} is within {BRANCH_MARGIN} of pi")
        factor = psi / d if d > 0.0 else 1.0
    bracket = X.entries @ Y.entries - Y.entries @ X.entries
    entries = (factor * a / theta) * X.entries + (factor * b / phi) * Y.entries \
        + (factor * c / (theta * phi)) * bracket
    return SkewMatrix(entries)


def product_angle(theta: float) -> float:
    """Rotation angle alpha in [0, pi] of O_12(theta) O_23(theta)."""
    cos_theta = math.cos(theta)
    value = (2.0 * cos_theta + cos_theta * cos_theta - 1.0) / 2.0
    return float(np.arccos(np.clip(value, -1.0, 1.0)))


def product_angle_cosine(cos_theta: Scalar) -> QuadSurd:
    """Exact cos(alpha) = (2 cos t + cos^2 t - 1)/2 for O_12(t) O_23(t)."""
    c = QuadSurd.coerce(cos_theta)
    return (2 * c + c * c - 1) / 2


def exp_skew(X: SkewMatrix) -> RotationMatrix:
    """exp on so(N): Rodrigues for N = 3, scaling and squaring otherwise."""
    if X.dimension == 3:
        return exp_so3(X)
    return RotationMatrix(expm(X.entries))


def log_rotation(R: RotationMatrix) -> SkewMatrix:
    """
    Principal logarithm on SO(N).

    Raises BranchError when R has an eigenvalue within the branch margin of -1.
    """
    if R.dimension == 3:
        return log_so3(R)
    eigenvalues = np.linalg.eigvals(R.entries)
    angles = np.abs(np.angle(eigenvalues))
    if np.any(math.pi - angles < BRANCH_MARGIN):
        raise BranchError("rotation has an eigenvalue at -1; the logarithm is not unique")
    result = np.real(logm(R.entries))
    return SkewMatrix((result - result.T) / 2.0)
