"""Geometric value types shared by the pose solver and the benchmark.

Vectors and matrices are plain float64 numpy arrays: a 3-vector has shape
(3,) and a rotation shape (3, 3).  The small wrapper classes below validate
their payloads once and then freeze them (read-only arrays, frozen
dataclasses), so instances are safe to share between threads.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from numba import njit

__all__ = [
    "BearingVector",
    "Correspondence",
    "P3pProblem",
    "Pose",
    "Solution",
    "rotation_to_quaternion",
    "rotation_from_quaternion",
]

# Below this input norm a direction is considered noise, not a bearing.
MIN_BEARING_NORM = 1e-9

# Two bearings (or two world points) closer than this are treated as equal.
DISTINCT_TOL = 1e-12


def _vec3(value, name: str) -> np.ndarray:
    arr = np.asarray(value, dtype=np.float64)
    if arr.shape != (3,):
        raise ValueError(f"{name} must be a 3-vector, got shape {arr.shape}")
    if not np.all(np.isfinite(arr)):
        raise ValueError(f"{name} must be finite, got {arr!r}")
    arr = arr.copy()
    arr.setflags(write=False)
    return arr


def _mat3(value, name: str) -> np.ndarray:
    arr = np.asarray(value, dtype=np.float64)
    if arr.shape != (3, 3):
        raise ValueError(f"{name} must be a 3x3 matrix, got shape {arr.shape}")
    if not np.all(np.isfinite(arr)):
        raise ValueError(f"{name} must be finite")
    arr = np.ascontiguousarray(arr).copy()
    arr.setflags(write=False)
    return arr


@dataclass(frozen=True)
class BearingVector:
    """Unit direction from the camera center toward an observed point.

    The constructor normalizes its input and rejects near-zero vectors,
    so ``dir`` always has unit norm.
    """

    dir: np.ndarray

    def __post_init__(self):
        arr = np.asarray(self.dir, dtype=np.float64)
        if arr.shape != (3,):
            raise ValueError(f"bearing must be a 3-vector, got shape {arr.shape}")
        if not np.all(np.isfinite(arr)):
            raise ValueError("bearing must be finite")
        n = math.sqrt(float(arr[0] * arr[0] + arr[1] * arr[1] + arr[2] * arr[2]))
        if n < MIN_BEARING_NORM:
            raise ValueError(f"bearing norm {n:.3e} too small to define a direction")
        arr = arr / n
        arr.setflags(write=False)
        object.__setattr__(self, "dir", arr)


@dataclass(frozen=True)
class Correspondence:
    """One unit bearing vector paired with the 3D world point it observes."""

    bearing: BearingVector
    point: np.ndarray

    def __post_init__(self):
        if not isinstance(self.bearing, BearingVector):
            object.__setattr__(self, "bearing", BearingVector(self.bearing))
        object.__setattr__(self, "point", _vec3(self.point, "point"))


@dataclass(frozen=True)
class P3pProblem:
    """Exactly three correspondences; the solver's sole input.

    Construction rejects coincident bearings and coincident world points
    (within ``DISTINCT_TOL``); those make the pose unrecoverable.
    """

    corr: tuple[Correspondence, Correspondence, Correspondence]

    def __post_init__(self):
        corr = tuple(self.corr)
        if len(corr) != 3 or not all(isinstance(c, Correspondence) for c in corr):
            raise ValueError("P3pProblem needs exactly 3 Correspondence instances")
        for i in range(3):
            for j in range(i + 1, 3):
                db = corr[i].bearing.dir - corr[j].bearing.dir
                if math.sqrt(float(db @ db)) <= DISTINCT_TOL:
                    raise ValueError(f"bearings {i} and {j} coincide")
                dp = corr[i].point - corr[j].point
                if math.sqrt(float(dp @ dp)) <= DISTINCT_TOL:
                    raise ValueError(f"world points {i} and {j} coincide")
        object.__setattr__(self, "corr", corr)

    @classmethod
    def from_arrays(cls, bearings, points) -> "P3pProblem":
        """Build a problem from two (3, 3) arrays of row vectors."""
        b = np.asarray(bearings, dtype=np.float64)
        p = np.asarray(points, dtype=np.float64)
        if b.shape != (3, 3) or p.shape != (3, 3):
            raise ValueError("bearings and points must both have shape (3, 3)")
        return cls(tuple(Correspondence(BearingVector(b[i]), p[i]) for i in range(3)))

    def bearings_matrix(self) -> np.ndarray:
        """Rows are the three unit bearings."""
        return np.ascontiguousarray([c.bearing.dir for c in self.corr])

    def points_matrix(self) -> np.ndarray:
        """Rows are the three world points."""
        return np.ascontiguousarray([c.point for c in self.corr])


@dataclass(frozen=True)
class Pose:
    """Rotation matrix plus translation vector.

    Entries are only checked for finiteness: the solver's alignment step
    yields R orthonormal up to numerical error, and the benchmark's
    classifier is what judges whether a rotation is acceptable.
    """

    R: np.ndarray
    t: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "R", _mat3(self.R, "R"))
        object.__setattr__(self, "t", _vec3(self.t, "t"))


@dataclass(frozen=True)
class Solution:
    """A candidate pose together with the three recovered depths."""

    pose: Pose
    depths: np.ndarray

    def __post_init__(self):
        d = _vec3(self.depths, "depths")
        if not np.all(d > 0.0):
            raise ValueError(f"depths must be strictly positive, got {d!r}")
        object.__setattr__(self, "depths", d)


@njit(cache=True, nogil=True)
def _quat_from_rot(R):
    # Shepperd-style extraction: evaluate the four squared denominators and
    # take the branch with the largest one.  Their sum is exactly 4, so the
    # chosen value is >= 1 and the sqrt below is always safe.
    t0 = 1.0 + R[0, 0] + R[1, 1] + R[2, 2]
    t1 = 1.0 + R[0, 0] - R[1, 1] - R[2, 2]
    t2 = 1.0 - R[0, 0] + R[1, 1] - R[2, 2]
    t3 = 1.0 - R[0, 0] - R[1, 1] + R[2, 2]
    if t0 >= t1 and t0 >= t2 and t0 >= t3:
        r = math.sqrt(t0)
        s = 0.5 / r
        return 0.5 * r, (R[2, 1] - R[1, 2]) * s, (R[0, 2] - R[2, 0]) * s, (R[1, 0] - R[0, 1]) * s
    if t1 >= t2 and t1 >= t3:
        r = math.sqrt(t1)
        s = 0.5 / r
        return (R[2, 1] - R[1, 2]) * s, 0.5 * r, (R[0, 1] + R[1, 0]) * s, (R[0, 2] + R[2, 0]) * s
    if t2 >= t3:
        r = math.sqrt(t2)
        s = 0.5 / r
        return (R[0, 2] - R[2, 0]) * s, (R[0, 1] + R[1, 0]) * s, 0.5 * r, (R[1, 2] + R[2, 1]) * s
    r = math.sqrt(t3)
    s = 0.5 / r
    return (R[1, 0] - R[0, 1]) * s, (R[0, 2] + R[2, 0]) * s, (R[1, 2] + R[2, 1]) * s, 0.5 * r


@njit(cache=True, nogil=True)
def _rot_from_unit_quat(w, x, y, z, out):
    xx = x * x
    yy = y * y
    zz = z * z
    xy = x * y
    xz = x * z
    yz = y * z
    wx = w * x
    wy = w * y
    wz = w * z
    out[0, 0] = 1.0 - 2.0 * (yy + zz)
    out[0, 1] = 2.0 * (xy - wz)
    out[0, 2] = 2.0 * (xz + wy)
    out[1, 0] = 2.0 * (xy + wz)
    out[1, 1] = 1.0 - 2.0 * (xx + zz)
    out[1, 2] = 2.0 * (yz - wx)
    out[2, 0] = 2.0 * (xz - wy)
    out[2, 1] = 2.0 * (yz + wx)
    out[2, 2] = 1.0 - 2.0 * (xx + yy)


def rotation_to_quaternion(R) -> np.ndarray:
    """Extract a (w, x, y, z) quaternion from a 3x3 matrix.

    The quaternion is deliberately *not* renormalized: when R is a proper
    rotation the norm comes out as 1 up to rounding, and the deviation of
    the norm from 1 is a cheap diagnostic for matrices that are not
    rotations.  Branch selection picks the largest of the four candidate
    denominators, which stays accurate near 180-degree rotations.
    """
    arr = np.ascontiguousarray(R, dtype=np.float64)
    if arr.shape != (3, 3):
        raise ValueError(f"expected a 3x3 matrix, got shape {arr.shape}")
    if not np.all(np.isfinite(arr)):
        raise ValueError("matrix must be finite")
    return np.array(_quat_from_rot(arr))


def rotation_from_quaternion(q) -> np.ndarray:
    """Rotation matrix of a quaternion given as (w, x, y, z).

    The quaternion is normalized first, so any non-zero 4-vector works.
    """
    arr = np.asarray(q, dtype=np.float64)
    if arr.shape != (4,):
        raise ValueError(f"expected a 4-vector quaternion, got shape {arr.shape}")
    n = math.sqrt(float(arr @ arr))
    if n < 1e-12 or not math.isfinite(n):
        raise ValueError("quaternion norm too small")
    w, x, y, z = arr / n
    out = np.empty((3, 3))
    _rot_from_unit_quat(w, x, y, z, out)
    return out
