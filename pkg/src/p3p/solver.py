"""Pose recovery from three bearing/point correspondences.

The pipeline: pairwise cosines and squared distances -> canonical
reindexing -> quartic in the depth ratio x = d1/d3 -> rational recovery of
y = d2/d3 per root -> depth extraction -> fixed-count Newton refinement of
the depths -> closed-form alignment to a rotation and translation.  Up to
four candidate poses come back; filtering and deduplication are left to
the caller (see :mod:`p3p.bench`).

Each stage exists both as a plain Python function operating on the value
types from :mod:`p3p.geometry` and as a numba kernel; the public
:func:`solve` and the benchmark share the same kernels, so results are
bit-identical across entry points.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from numba import njit

from .geometry import P3pProblem, Pose, Solution
from .quartic import (
    ALL_ZERO_ABS_TOL,
    LEADING_COEFF_REL_TOL,
    VARIANT_DISPATCH_RATIO,
    _classical_ferrari_monic,
    _ferrari_lagrange_monic,
    _reduced_roots,
    _sort_small,
)

__all__ = [
    "DegenerateInput",
    "CollinearPoints",
    "PairwiseData",
    "SolverConfig",
    "VARIANTS",
    "D3_SOURCES",
    "compute_pairwise",
    "canonical_reindex",
    "quartic_coefficients",
    "recover_y",
    "recover_depths",
    "refine_depths_gauss_newton",
    "align_pose",
    "solve",
]

VARIANTS = ("adaptive", "ferrari_lagrange", "classical")
D3_SOURCES = ("s12", "s13", "s23")

# Squared-distance floor and cosine tolerance for input validation.
MIN_SQUARED_DISTANCE = 1e-24
MAX_COSINE_EXCESS = 1e-12

# Collinearity test: |det X| < 1e-18 * (largest column norm)^3.
COLLINEAR_DET_TOL = 1e-18

# All six permutations of (0, 1, 2) in lexicographic order; the first one
# that satisfies the canonical cosine ordering wins, so ties resolve to
# the lexicographically smallest permutation.
_PERMS = np.array(
    [[0, 1, 2], [0, 2, 1], [1, 0, 2], [1, 2, 0], [2, 0, 1], [2, 1, 0]],
    dtype=np.int64,
)


class DegenerateInput(ValueError):
    """Coincident points or non-unit bearings; no pose can be recovered."""


class CollinearPoints(ValueError):
    """The three world points are collinear; the alignment is singular."""


@dataclass(frozen=True)
class PairwiseData:
    """The six scalars the solver actually consumes.

    ``m12``, ``m13``, ``m23`` are cosines between bearing pairs (raw dot
    products of unit vectors, never clamped); ``s12``, ``s13``, ``s23``
    are squared distances between world-point pairs.  ``perm`` records the
    reindexing applied relative to the original correspondence order.
    """

    m12: float
    m13: float
    m23: float
    s12: float
    s13: float
    s23: float
    perm: tuple[int, int, int] = (0, 1, 2)

    def __post_init__(self):
        for name in ("m12", "m13", "m23"):
            v = getattr(self, name)
            if not math.isfinite(v) or abs(v) > 1.0 + MAX_COSINE_EXCESS:
                raise ValueError(f"{name}={v!r} is not a valid cosine")
        for name in ("s12", "s13", "s23"):
            v = getattr(self, name)
            if not math.isfinite(v) or v <= 0.0:
                raise ValueError(f"{name}={v!r} must be positive")
        if sorted(self.perm) != [0, 1, 2]:
            raise ValueError(f"perm={self.perm!r} is not a permutation of (0, 1, 2)")


@dataclass(frozen=True)
class SolverConfig:
    """Solver knobs; the defaults are the accurate configuration.

    ``force_variant`` pins the quartic method ("adaptive",
    "ferrari_lagrange", "classical"), ``reindex_enabled`` toggles the
    canonical reordering, and ``d3_source`` picks which pairwise distance
    equation recovers the depth scale ("s12", "s13" or "s23" for the
    correspondence pair whose constraint is used).  These are exactly the
    axes the benchmark's ablation sweeps.
    """

    gn_iterations: int = 2
    denom_epsilon: float = 1e-14
    force_variant: str = "adaptive"
    reindex_enabled: bool = True
    d3_source: str = "s23"

    def __post_init__(self):
        if not 0 <= self.gn_iterations <= 16:
            raise ValueError("gn_iterations must be in [0, 16]")
        if not (self.denom_epsilon > 0.0 and math.isfinite(self.denom_epsilon)):
            raise ValueError("denom_epsilon must be positive and finite")
        if self.force_variant not in VARIANTS:
            raise ValueError(f"force_variant must be one of {VARIANTS}")
        if self.d3_source not in D3_SOURCES:
            raise ValueError(f"d3_source must be one of {D3_SOURCES}")

    def _codes(self) -> tuple[int, float, int, bool, int]:
        return (
            self.gn_iterations,
            self.denom_epsilon,
            VARIANTS.index(self.force_variant),
            self.reindex_enabled,
            D3_SOURCES.index(self.d3_source),
        )


_DEFAULT_CONFIG = SolverConfig()


@njit(cache=True, nogil=True)
def _pairwise(M, X):
    m12 = M[0, 0] * M[1, 0] + M[0, 1] * M[1, 1] + M[0, 2] * M[1, 2]
    m13 = M[0, 0] * M[2, 0] + M[0, 1] * M[2, 1] + M[0, 2] * M[2, 2]
    m23 = M[1, 0] * M[2, 0] + M[1, 1] * M[2, 1] + M[1, 2] * M[2, 2]
    s12 = 0.0
    s13 = 0.0
    s23 = 0.0
    for k in range(3):
        a = X[0, k] - X[1, k]
        b = X[0, k] - X[2, k]
        c = X[1, k] - X[2, k]
        s12 += a * a
        s13 += b * b
        s23 += c * c
    ok = (
        s12 >= MIN_SQUARED_DISTANCE
        and s13 >= MIN_SQUARED_DISTANCE
        and s23 >= MIN_SQUARED_DISTANCE
        and abs(m12) <= 1.0 + MAX_COSINE_EXCESS
        and abs(m13) <= 1.0 + MAX_COSINE_EXCESS
        and abs(m23) <= 1.0 + MAX_COSINE_EXCESS
    )
    return m12, m13, m23, s12, s13, s23, ok


@njit(cache=True, nogil=True)
def _pair_value(i, j, v12, v13, v23):
    # Unordered pair lookup: i+j is 1, 2 or 3 for the three distinct pairs.
    k = i + j
    if k == 1:
        return v12
    if k == 2:
        return v13
    return v23


@njit(cache=True, nogil=True)
def _find_perm(m12, m13, m23):
    for p in range(6):
        i0 = _PERMS[p, 0]
        i1 = _PERMS[p, 1]
        i2 = _PERMS[p, 2]
        nm12 = _pair_value(i0, i1, m12, m13, m23)
        nm13 = _pair_value(i0, i2, m12, m13, m23)
        nm23 = _pair_value(i1, i2, m12, m13, m23)
        if nm13 <= nm12 <= nm23:
            return p
    return 0  # unreachable: sorting the three cosines is always achievable


@njit(cache=True, nogil=True)
def _coefficients(m12, m13, m23, s12, s13, s23):
    # Shared monomials are evaluated once so every coefficient sees the
    # same rounded products.
    p1213 = s12 * s13
    p1223 = s12 * s23
    p1323 = s13 * s23
    q12 = s12 * s12
    q13 = s13 * s13
    q23 = s23 * s23
    mm12 = m12 * m12
    mm13 = m13 * m13
    mm23 = m23 * m23
    m1223 = m12 * m23
    m121323 = m1223 * m13
    c4 = -q12 + 2.0 * p1213 + 2.0 * p1223 - q13 + 4.0 * p1323 * mm12 - 2.0 * p1323 - q23
    c3 = (
        4.0 * q12 * m13
        - 4.0 * p1213 * m1223
        - 4.0 * p1213 * m13
        - 8.0 * p1223 * m13
        + 4.0 * q13 * m1223
        - 8.0 * p1323 * mm12 * m13
        - 4.0 * p1323 * m1223
        + 4.0 * p1323 * m13
        + 4.0 * q23 * m13
    )
    c2 = (
        -4.0 * q12 * mm13
        - 2.0 * q12
        + 8.0 * p1213 * m121323
        + 4.0 * p1213 * mm23
        + 8.0 * p1223 * mm13
        + 4.0 * p1223
        - 4.0 * q13 * mm12
        - 4.0 * q13 * mm23
        + 2.0 * q13
        + 4.0 * p1323 * mm12
        + 8.0 * p1323 * m121323
        - 4.0 * q23 * mm13
        - 2.0 * q23
    )
    c1 = (
        4.0 * q12 * m13
        - 4.0 * p1213 * m1223
        - 8.0 * p1213 * m13 * mm23
        + 4.0 * p1213 * m13
        - 8.0 * p1223 * m13
        + 4.0 * q13 * m1223
        - 4.0 * p1323 * m1223
        - 4.0 * p1323 * m13
        + 4.0 * q23 * m13
    )
    c0 = -q12 + 4.0 * p1213 * mm23 - 2.0 * p1213 + 2.0 * p1223 - q13 + 2.0 * p1323 - q23
    return c4, c3, c2, c1, c0


@njit(cache=True, nogil=True)
def _quad_candidates(qa, qb, qc, out):
    # Positive real solutions of qa*y^2 + qb*y + qc = 0, ascending.
    n = 0
    if abs(qa) <= 1e-14 * max(abs(qb), abs(qc)):
        if qb != 0.0:
            y = -qc / qb
            if y > 0.0:
                out[0] = y
                n = 1
        return n
    disc = qb * qb - 4.0 * qa * qc
    if disc < 0.0:
        return 0
    s = math.sqrt(disc)
    if qb >= 0.0:
        r1 = 0.5 * (-qb - s) / qa
    else:
        r1 = 0.5 * (-qb + s) / qa
    r2 = qc / (qa * r1) if r1 != 0.0 else -qb / qa
    lo = min(r1, r2)
    hi = max(r1, r2)
    if lo > 0.0:
        out[n] = lo
        n += 1
    if hi > 0.0 and hi != lo:
        out[n] = hi
        n += 1
    return n


@njit(cache=True, nogil=True)
def _conic12_residual_ok(x, y, m12, m23, a):
    # x^2 - 2 m12 x y + (1-a) y^2 + 2 a m23 y - a, scaled by its own terms.
    t1 = x * x
    t2 = -2.0 * m12 * x * y
    t3 = (1.0 - a) * y * y
    t4 = 2.0 * a * m23 * y
    res = t1 + t2 + t3 + t4 - a
    scale = max(1.0, abs(t1), abs(t2), abs(t3), abs(t4), a)
    return abs(res) < 1e-6 * scale


@njit(cache=True, nogil=True)
def _conic13_residual_ok(x, y, m13, m23, b):
    # x^2 - b y^2 - 2 m13 x + 2 b m23 y + 1 - b, scaled by its own terms.
    t1 = x * x
    t2 = -b * y * y
    t3 = -2.0 * m13 * x
    t4 = 2.0 * b * m23 * y
    res = t1 + t2 + t3 + t4 + 1.0 - b
    scale = max(1.0, abs(t1), abs(t2), abs(t3), abs(t4), abs(1.0 - b))
    return abs(res) < 1e-6 * scale


@njit(cache=True, nogil=True)
def _recover_y(x, m12, m13, m23, s12, s13, s23, denom_eps, out):
    """Positive y candidates for a quartic root x, written to out[:n]."""
    dc = m12 * x - m23
    if abs(dc) >= denom_eps * max(1.0, abs(x)):
        va = -s12 + s23 + s13
        vb = 2.0 * (s12 - s23) * m13
        vc = -s12 + s23 - s13
        y = (va * x * x + vb * x + vc) / (2.0 * s13 * dc)
        if y > 0.0:
            out[0] = y
            return 1
        return 0
    # Vanishing denominator: fall back to intersecting the two d3^2 conics
    # directly at this x.  The first conic is quadratic in y; if it
    # degenerates to the zero polynomial (symmetric geometry), the second
    # carries the information instead.
    a = s12 / s23
    b = s13 / s23
    qa = 1.0 - a
    qb = 2.0 * (a * m23 - m12 * x)
    qc = x * x - a
    cands = np.empty(2)
    n = 0
    if max(abs(qa), abs(qb), abs(qc)) <= 1e-12 * max(1.0, a, x * x):
        m = _quad_candidates(-b, 2.0 * b * m23, x * x - 2.0 * m13 * x + 1.0 - b, cands)
        for k in range(m):
            if _conic12_residual_ok(x, cands[k], m12, m23, a):
                out[n] = cands[k]
                n += 1
    else:
        m = _quad_candidates(qa, qb, qc, cands)
        for k in range(m):
            if _conic13_residual_ok(x, cands[k], m13, m23, b):
                out[n] = cands[k]
                n += 1
    return n


@njit(cache=True, nogil=True)
def _recover_d3(x, y, m12, m13, m23, s12, s13, s23, d3_code):
    if d3_code == 0:
        den = x * x - 2.0 * x * y * m12 + y * y
        s = s12
    elif d3_code == 1:
        den = x * x - 2.0 * x * m13 + 1.0
        s = s13
    else:
        den = y * y - 2.0 * y * m23 + 1.0
        s = s23
    if den <= 0.0:
        return -1.0
    d3 = math.sqrt(s / den)
    if not (d3 > 0.0 and math.isfinite(d3)):
        return -1.0
    return d3


@njit(cache=True, nogil=True)
def _gauss_newton(d1, d2, d3, m12, m13, m23, s12, s13, s23, iters):
    # Newton on the three pairwise distance residuals with the exact 3x3
    # Jacobian; a step that grows the residual or leaves the positive
    # octant is rejected and iteration stops.
    smax = max(s12, s13, s23)
    floor = 1e-15 * smax
    for _ in range(iters):
        f1 = d1 * d1 + d2 * d2 - 2.0 * d1 * d2 * m12 - s12
        f2 = d1 * d1 + d3 * d3 - 2.0 * d1 * d3 * m13 - s13
        f3 = d2 * d2 + d3 * d3 - 2.0 * d2 * d3 * m23 - s23
        fn = max(abs(f1), abs(f2), abs(f3))
        if fn < floor:
            break
        a11 = 2.0 * d1 - 2.0 * d2 * m12
        a12 = 2.0 * d2 - 2.0 * d1 * m12
        a21 = 2.0 * d1 - 2.0 * d3 * m13
        a23 = 2.0 * d3 - 2.0 * d1 * m13
        a32 = 2.0 * d2 - 2.0 * d3 * m23
        a33 = 2.0 * d3 - 2.0 * d2 * m23
        # Partial-pivot elimination on
        #   [a11 a12   0 | -f1]
        #   [a21   0 a23 | -f2]
        #   [  0 a32 a33 | -f3]
        r0c0, r0c1, r0c2, rhs0 = a11, a12, 0.0, -f1
        r1c0, r1c1, r1c2, rhs1 = a21, 0.0, a23, -f2
        r2c0, r2c1, r2c2, rhs2 = 0.0, a32, a33, -f3
        if abs(r1c0) > abs(r0c0):
            r0c0, r1c0 = r1c0, r0c0
            r0c1, r1c1 = r1c1, r0c1
            r0c2, r1c2 = r1c2, r0c2
            rhs0, rhs1 = rhs1, rhs0
        if abs(r2c0) > abs(r0c0):
            r0c0, r2c0 = r2c0, r0c0
            r0c1, r2c1 = r2c1, r0c1
            r0c2, r2c2 = r2c2, r0c2
            rhs0, rhs2 = rhs2, rhs0
        if abs(r0c0) < 1e-300:
            return d1, d2, d3
        l1 = r1c0 / r0c0
        r1c1 -= l1 * r0c1
        r1c2 -= l1 * r0c2
        rhs1 -= l1 * rhs0
        l2 = r2c0 / r0c0
        r2c1 -= l2 * r0c1
        r2c2 -= l2 * r0c2
        rhs2 -= l2 * rhs0
        if abs(r2c1) > abs(r1c1):
            r1c1, r2c1 = r2c1, r1c1
            r1c2, r2c2 = r2c2, r1c2
            rhs1, rhs2 = rhs2, rhs1
        if abs(r1c1) < 1e-300:
            return d1, d2, d3
        l3 = r2c1 / r1c1
        r2c2 -= l3 * r1c2
        rhs2 -= l3 * rhs1
        if abs(r2c2) < 1e-300:
            return d1, d2, d3
        dz = rhs2 / r2c2
        dy = (rhs1 - r1c2 * dz) / r1c1
        dx = (rhs0 - r0c1 * dy - r0c2 * dz) / r0c0
        n1 = d1 + dx
        n2 = d2 + dy
        n3 = d3 + dz
        if n1 <= 0.0 or n2 <= 0.0 or n3 <= 0.0:
            return d1, d2, d3
        g1 = n1 * n1 + n2 * n2 - 2.0 * n1 * n2 * m12 - s12
        g2 = n1 * n1 + n3 * n3 - 2.0 * n1 * n3 * m13 - s13
        g3 = n2 * n2 + n3 * n3 - 2.0 * n2 * n3 * m23 - s23
        if max(abs(g1), abs(g2), abs(g3)) > fn:
            return d1, d2, d3
        d1, d2, d3 = n1, n2, n3
    return d1, d2, d3


@njit(cache=True, nogil=True)
def _align(d1, d2, d3, M, X, R_out, t_out):
    """Pose aligning the back-projected points to the world points.

    Returns 1 on success, 0 when the world points are collinear.  No
    re-orthonormalization is applied to the result.
    """
    b1x = d1 * M[0, 0]
    b1y = d1 * M[0, 1]
    b1z = d1 * M[0, 2]
    y1x = b1x - d2 * M[1, 0]
    y1y = b1y - d2 * M[1, 1]
    y1z = b1z - d2 * M[1, 2]
    y2x = b1x - d3 * M[2, 0]
    y2y = b1y - d3 * M[2, 1]
    y2z = b1z - d3 * M[2, 2]
    y3x = y1y * y2z - y1z * y2y
    y3y = y1z * y2x - y1x * y2z
    y3z = y1x * y2y - y1y * y2x
    ux = X[0, 0] - X[1, 0]
    uy = X[0, 1] - X[1, 1]
    uz = X[0, 2] - X[1, 2]
    vx = X[0, 0] - X[2, 0]
    vy = X[0, 1] - X[2, 1]
    vz = X[0, 2] - X[2, 2]
    wx = uy * vz - uz * vy
    wy = uz * vx - ux * vz
    wz = ux * vy - uy * vx
    # det[U V W] with W = U x V equals |W|^2 and is never negative.
    det = wx * wx + wy * wy + wz * wz
    nu = math.sqrt(ux * ux + uy * uy + uz * uz)
    nv = math.sqrt(vx * vx + vy * vy + vz * vz)
    nw = math.sqrt(det)
    scale = max(nu, nv, nw)
    if det < COLLINEAR_DET_TOL * scale * scale * scale:
        return 0
    # Rows of adj(X): V x W, W x U, U x V.
    a1x = vy * wz - vz * wy
    a1y = vz * wx - vx * wz
    a1z = vx * wy - vy * wx
    a2x = wy * uz - wz * uy
    a2y = wz * ux - wx * uz
    a2z = wx * uy - wy * ux
    inv = 1.0 / det
    R_out[0, 0] = (y1x * a1x + y2x * a2x + y3x * wx) * inv
    R_out[0, 1] = (y1x * a1y + y2x * a2y + y3x * wy) * inv
    R_out[0, 2] = (y1x * a1z + y2x * a2z + y3x * wz) * inv
    R_out[1, 0] = (y1y * a1x + y2y * a2x + y3y * wx) * inv
    R_out[1, 1] = (y1y * a1y + y2y * a2y + y3y * wy) * inv
    R_out[1, 2] = (y1y * a1z + y2y * a2z + y3y * wz) * inv
    R_out[2, 0] = (y1z * a1x + y2z * a2x + y3z * wx) * inv
    R_out[2, 1] = (y1z * a1y + y2z * a2y + y3z * wy) * inv
    R_out[2, 2] = (y1z * a1z + y2z * a2z + y3z * wz) * inv
    t_out[0] = b1x - (R_out[0, 0] * X[0, 0] + R_out[0, 1] * X[0, 1] + R_out[0, 2] * X[0, 2])
    t_out[1] = b1y - (R_out[1, 0] * X[0, 0] + R_out[1, 1] * X[0, 1] + R_out[1, 2] * X[0, 2])
    t_out[2] = b1z - (R_out[2, 0] * X[0, 0] + R_out[2, 1] * X[0, 1] + R_out[2, 2] * X[0, 2])
    return 1


@njit(cache=True, nogil=True)
def _solve_kernel(M, X, gn_iters, denom_eps, variant, reindex_on, d3_code, R_out, t_out, d_out):
    """Full pipeline.  Returns the solution count, -1 for degenerate input
    or -2 for collinear world points."""
    m12, m13, m23, s12, s13, s23, ok = _pairwise(M, X)
    if not ok:
        return -1
    p = _find_perm(m12, m13, m23) if reindex_on else 0
    i0 = _PERMS[p, 0]
    i1 = _PERMS[p, 1]
    i2 = _PERMS[p, 2]
    pm12 = _pair_value(i0, i1, m12, m13, m23)
    pm13 = _pair_value(i0, i2, m12, m13, m23)
    pm23 = _pair_value(i1, i2, m12, m13, m23)
    ps12 = _pair_value(i0, i1, s12, s13, s23)
    ps13 = _pair_value(i0, i2, s12, s13, s23)
    ps23 = _pair_value(i1, i2, s12, s13, s23)
    c4, c3, c2, c1, c0 = _coefficients(pm12, pm13, pm23, ps12, ps13, ps23)
    maxc = max(abs(c4), abs(c3), abs(c2), abs(c1), abs(c0))
    roots = np.empty(4)
    if maxc < ALL_ZERO_ABS_TOL:
        nr = 0
    elif abs(c4) < LEADING_COEFF_REL_TOL * maxc:
        nr = _reduced_roots(c3, c2, c1, c0, LEADING_COEFF_REL_TOL * maxc, roots)
    elif variant == 1 or (variant == 0 and abs(c3 / c4) > VARIANT_DISPATCH_RATIO):
        nr = _ferrari_lagrange_monic(c3 / c4, c2 / c4, c1 / c4, c0 / c4, roots)
    else:
        nr = _classical_ferrari_monic(c3 / c4, c2 / c4, c1 / c4, c0 / c4, roots)
    # No residual filtering here: sloppy roots from near-degenerate
    # factorizations are exactly what the depth refinement downstream
    # rescues, and the evaluation side classifies whatever remains.
    _sort_small(roots, nr)
    Mp = np.empty((3, 3))
    Xp = np.empty((3, 3))
    for c in range(3):
        Mp[0, c] = M[i0, c]
        Mp[1, c] = M[i1, c]
        Mp[2, c] = M[i2, c]
        Xp[0, c] = X[i0, c]
        Xp[1, c] = X[i1, c]
        Xp[2, c] = X[i2, c]
    ybuf = np.empty(2)
    n = 0
    for k in range(nr):
        x = roots[k]
        if x <= 0.0:
            continue
        ny = _recover_y(x, pm12, pm13, pm23, ps12, ps13, ps23, denom_eps, ybuf)
        for j in range(ny):
            y = ybuf[j]
            d3 = _recover_d3(x, y, pm12, pm13, pm23, ps12, ps13, ps23, d3_code)
            if d3 < 0.0:
                continue
            d1, d2, d3 = _gauss_newton(
                x * d3, y * d3, d3, pm12, pm13, pm23, ps12, ps13, ps23, gn_iters
            )
            if _align(d1, d2, d3, Mp, Xp, R_out[n], t_out[n]) == 0:
                return -2
            # Depths go back to the caller's correspondence order.
            d_out[n, i0] = d1
            d_out[n, i1] = d2
            d_out[n, i2] = d3
            n += 1
            if n == 4:
                return 4
    return n


def _pairwise_of(problem: P3pProblem):
    M = problem.bearings_matrix()
    X = problem.points_matrix()
    m12, m13, m23, s12, s13, s23, ok = _pairwise(M, X)
    if not ok:
        raise DegenerateInput(
            "correspondences have coincident points or non-unit bearings"
        )
    return m12, m13, m23, s12, s13, s23


def compute_pairwise(problem: P3pProblem) -> PairwiseData:
    """Bearing cosines and squared point distances, identity permutation."""
    m12, m13, m23, s12, s13, s23 = _pairwise_of(problem)
    return PairwiseData(m12, m13, m23, s12, s13, s23)


def canonical_reindex(
    data: PairwiseData, problem: P3pProblem
) -> tuple[PairwiseData, P3pProblem]:
    """Reorder correspondences so that m13 <= m12 <= m23.

    Scalars are relabeled along with the permutation; ties pick the
    lexicographically smallest permutation, so conforming inputs come back
    unchanged.
    """
    p = int(_find_perm(data.m12, data.m13, data.m23))
    idx = tuple(int(v) for v in _PERMS[p])
    i0, i1, i2 = idx
    new_data = PairwiseData(
        m12=_pair_value(i0, i1, data.m12, data.m13, data.m23),
        m13=_pair_value(i0, i2, data.m12, data.m13, data.m23),
        m23=_pair_value(i1, i2, data.m12, data.m13, data.m23),
        s12=_pair_value(i0, i1, data.s12, data.s13, data.s23),
        s13=_pair_value(i0, i2, data.s12, data.s13, data.s23),
        s23=_pair_value(i1, i2, data.s12, data.s13, data.s23),
        perm=tuple(data.perm[i] for i in idx),
    )
    new_problem = P3pProblem(tuple(problem.corr[i] for i in idx))
    return new_data, new_problem


def quartic_coefficients(data: PairwiseData) -> np.ndarray:
    """Quartic coefficients in the depth ratio x = d1/d3, highest first."""
    return np.array(
        _coefficients(data.m12, data.m13, data.m23, data.s12, data.s13, data.s23)
    )


def recover_y(x: float, data: PairwiseData, denom_epsilon: float = 1e-14) -> tuple[float, ...]:
    """Positive candidates for y = d2/d3 at a quartic root x, ascending.

    The regular path is the rational formula; it is abandoned when its
    denominator ``2*s13*(m12*x - m23)`` vanishes (symmetric geometry), in
    which case the conic pair is intersected directly and candidates are
    cross-checked on the other conic.  An empty tuple means every
    candidate was rejected.
    """
    out = np.empty(2)
    n = _recover_y(
        float(x), data.m12, data.m13, data.m23, data.s12, data.s13, data.s23,
        float(denom_epsilon), out,
    )
    return tuple(float(v) for v in out[:n])


def recover_depths(x: float, y: float, data: PairwiseData, source: str = "s23"):
    """Depths (d1, d2, d3) from the ratios, or None if the chosen
    denominator is not positive."""
    if source not in D3_SOURCES:
        raise ValueError(f"source must be one of {D3_SOURCES}")
    d3 = _recover_d3(
        float(x), float(y), data.m12, data.m13, data.m23,
        data.s12, data.s13, data.s23, D3_SOURCES.index(source),
    )
    if d3 < 0.0:
        return None
    return np.array([x * d3, y * d3, d3])


def refine_depths_gauss_newton(depths, data: PairwiseData, iters: int = 2) -> np.ndarray:
    """Run ``iters`` Newton steps on the pairwise distance residuals.

    Steps that worsen the max residual or leave the positive octant are
    rejected (the pre-step depths are returned), so refinement never
    degrades a solution.
    """
    if iters < 0:
        raise ValueError("iters must be >= 0")
    d = np.asarray(depths, dtype=np.float64)
    if d.shape != (3,) or not np.all(d > 0.0):
        raise ValueError("depths must be 3 positive values")
    d1, d2, d3 = _gauss_newton(
        d[0], d[1], d[2], data.m12, data.m13, data.m23,
        data.s12, data.s13, data.s23, int(iters),
    )
    return np.array([d1, d2, d3])


def align_pose(depths, problem: P3pProblem) -> Pose:
    """Closed-form pose aligning back-projected points to world points."""
    d = np.asarray(depths, dtype=np.float64)
    if d.shape != (3,) or not np.all(d > 0.0):
        raise ValueError("depths must be 3 positive values")
    R = np.empty((3, 3))
    t = np.empty(3)
    ok = _align(d[0], d[1], d[2], problem.bearings_matrix(), problem.points_matrix(), R, t)
    if ok == 0:
        raise CollinearPoints("the three world points are collinear")
    return Pose(R, t)


def solve(problem: P3pProblem, config: SolverConfig | None = None) -> list[Solution]:
    """All candidate poses for a three-point problem (0 to 4 of them).

    Candidates are neither deduplicated nor filtered by reprojection;
    an empty list is a valid outcome.  Results are deterministic for a
    given (problem, config).
    """
    cfg = config if config is not None else _DEFAULT_CONFIG
    R_buf = np.empty((4, 3, 3))
    t_buf = np.empty((4, 3))
    d_buf = np.empty((4, 3))
    n = _solve_kernel(
        problem.bearings_matrix(), problem.points_matrix(), *cfg._codes(),
        R_buf, t_buf, d_buf,
    )
    if n == -1:
        raise DegenerateInput(
            "correspondences have coincident points or non-unit bearings"
        )
    if n == -2:
        raise CollinearPoints("the three world points are collinear")
    return [
        Solution(Pose(R_buf[i].copy(), t_buf[i].copy()), d_buf[i].copy())
        for i in range(n)
    ]
