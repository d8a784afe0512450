"""Closed-form real-root extraction for quartic polynomials.

Coefficients are always given highest degree first, so ``(c4, c3, c2, c1,
c0)`` stands for ``c4*x**4 + c3*x**3 + c2*x**2 + c1*x + c0``.

Two Ferrari-style factorizations are implemented: ``ferrari_lagrange``
works on the monic quartic directly, ``classical`` shifts to the depressed
form first.  Both split the quartic into two monic quadratics via one real
root of a cubic solvent.  ``solve_quartic_adaptive`` dispatches between
them on the magnitude of the normalized cubic coefficient and falls back
to lower-degree solves when the leading coefficient is negligible.

Whenever a square root would receive a negative argument, the associated
pair of roots is dropped instead of being computed in complex arithmetic.
Near-degenerate inputs may therefore yield fewer real roots than the
algebraic count, but no spurious ones.  Repeated roots are reported as
often as the factorization produces them; deduplication is up to the
caller.  All returned root lists are sorted ascending.
"""

from __future__ import annotations

import math

import numpy as np
from numba import njit

__all__ = [
    "DegenerateLeading",
    "NoPolynomial",
    "solve_cubic_one_real",
    "solve_quartic_ferrari_lagrange",
    "solve_quartic_classical",
    "solve_quartic_adaptive",
]

# |c4| below this fraction of the largest coefficient counts as degenerate.
LEADING_COEFF_REL_TOL = 1e-12

# Every coefficient below this absolute value means there is no polynomial.
ALL_ZERO_ABS_TOL = 1e-300

# Dispatch threshold on |c3/c4| between the two Ferrari variants.
VARIANT_DISPATCH_RATIO = 10.0

# A square-root argument this far below zero (relative to the terms that
# formed it) is rounding noise on a double root, not a complex pair.
_NEG_CLAMP_REL = 1e-12

_BRANCH_REDUCED = 0
_BRANCH_FERRARI_LAGRANGE = 1
_BRANCH_CLASSICAL = 2
_BRANCH_NAMES = ("reduced", "ferrari_lagrange", "classical")


class DegenerateLeading(ValueError):
    """Leading coefficient negligible; solve the reduced-degree polynomial."""


class NoPolynomial(ValueError):
    """All coefficients are numerically zero."""


@njit(cache=True, nogil=True)
def _cubic_one_real(a3, a2, a1, a0):
    # Normalize to monic, depress with t = u - p2/3, then branch on the
    # discriminant: three real roots -> trigonometric form (largest root),
    # one real root -> Cardano in the cancellation-free arrangement.
    p2 = a2 / a3
    p1 = a1 / a3
    p0 = a0 / a3
    ofs = p2 / 3.0
    p = p1 - 3.0 * ofs * ofs
    q = p0 + ofs * (2.0 * ofs * ofs - p1)
    big_q = -p / 3.0
    big_r = 0.5 * q
    disc = big_r * big_r - big_q * big_q * big_q
    if disc <= 0.0:
        # disc <= 0 forces big_q >= 0; equality only with big_r == 0.
        if big_q <= 0.0:
            u = 0.0
        else:
            sq = math.sqrt(big_q)
            den = big_q * sq
            # den can underflow for subnormal-scale cubics; |big_r| <= den
            # in exact arithmetic, so the limit argument is 0.
            arg = -big_r / den if den > 0.0 else 0.0
            if arg > 1.0:
                arg = 1.0
            elif arg < -1.0:
                arg = -1.0
            u = 2.0 * sq * math.cos(math.acos(arg) / 3.0)
    else:
        s = math.sqrt(disc)
        if big_r >= 0.0:
            a = -((big_r + s) ** (1.0 / 3.0))
        else:
            a = (s - big_r) ** (1.0 / 3.0)
        b = 0.0 if a == 0.0 else big_q / a
        u = a + b
    t = u - ofs
    # Guarded Newton polish in the original variable: the depression shift
    # costs all relative accuracy of roots much smaller than the shift, and
    # the closed forms lose digits near multiple roots.  Stop as soon as
    # the residual stops shrinking.
    f = ((t + p2) * t + p1) * t + p0
    for _ in range(8):
        if f == 0.0:
            break
        df = (3.0 * t + 2.0 * p2) * t + p1
        if df == 0.0:
            break
        t_new = t - f / df
        f_new = ((t_new + p2) * t_new + p1) * t_new + p0
        if abs(f_new) >= abs(f):
            break
        t = t_new
        f = f_new
    return t


@njit(cache=True, nogil=True)
def _monic_quad_into(p, q, roots, n):
    # Real roots of x^2 + p x + q into roots[n:], Vieta for the small one.
    # Discriminants a few ulps below zero are double roots in disguise.
    disc = p * p - 4.0 * q
    if disc < 0.0:
        if disc < -_NEG_CLAMP_REL * (p * p + 4.0 * abs(q)):
            return n
        disc = 0.0
    s = math.sqrt(disc)
    if p >= 0.0:
        r1 = 0.5 * (-p - s)
    else:
        r1 = 0.5 * (-p + s)
    r2 = q / r1 if r1 != 0.0 else -p
    roots[n] = r1
    roots[n + 1] = r2
    return n + 2


@njit(cache=True, nogil=True)
def _ferrari_lagrange_monic(a, b, c, d, roots):
    # x^4+ax^3+bx^2+cx+d == (x^2 + a/2 x + y/2)^2 - (e x + f)^2 for any
    # solvent root y, with e^2 = a^2/4 - b + y, f^2 = y^2/4 - d and
    # 2 e f = a y / 2 - c.
    y = _cubic_one_real(1.0, -b, a * c - 4.0 * d, 4.0 * b * d - a * a * d - c * c)
    e2 = 0.25 * a * a - b + y
    e2_scale = max(0.25 * a * a, abs(b), abs(y))
    num = 0.5 * a * y - c
    if e2 > 1e-14 * e2_scale:
        e = math.sqrt(e2)
        f = num / (2.0 * e)
    elif e2 >= -1e-14 * e2_scale:
        # e is numerically zero: the coupling equation is 0 = 0, so take f
        # from its own square root, keeping num's sign for consistency.
        e = 0.0
        f2 = 0.25 * y * y - d
        if f2 < 0.0:
            if f2 < -_NEG_CLAMP_REL * (0.25 * y * y + abs(d)):
                return 0
            f2 = 0.0
        f = math.sqrt(f2) if num >= 0.0 else -math.sqrt(f2)
    else:
        return 0
    n = _monic_quad_into(0.5 * a - e, 0.5 * y - f, roots, 0)
    n = _monic_quad_into(0.5 * a + e, 0.5 * y + f, roots, n)
    return n


@njit(cache=True, nogil=True)
def _classical_ferrari_monic(a, b, c, d, roots):
    # Depress with x = u - a/4, then factor u^4 + p u^2 + q u + r through
    # one real solvent root: (u^2 + p/2 + z)^2 == 2z u^2 - q u + (...) with
    # z = yf + p/2 for the solvent variable yf used below.
    ofs = 0.25 * a
    aa = a * a
    p = b - 0.375 * aa
    q = c - 0.5 * a * b + 0.125 * aa * a
    r = d - 0.25 * a * c + 0.0625 * aa * b - (3.0 / 256.0) * aa * aa
    yf = _cubic_one_real(
        8.0, 20.0 * p, 16.0 * p * p - 8.0 * r, 4.0 * p * p * p - 4.0 * p * r - q * q
    )
    z = yf + 0.5 * p
    # Re-polish the solvent root in its shifted form: for near-biquadratic
    # quartics (q ~ 0) the shift above cancels and z keeps only absolute
    # accuracy, which the division q/alpha below would amplify.  Same
    # equation, better variable.
    lin = 2.0 * p * p - 8.0 * r
    g = ((8.0 * z + 8.0 * p) * z + lin) * z - q * q
    for _ in range(8):
        if g == 0.0:
            break
        dg = (24.0 * z + 16.0 * p) * z + lin
        if dg == 0.0:
            break
        z_new = z - g / dg
        g_new = ((8.0 * z_new + 8.0 * p) * z_new + lin) * z_new - q * q
        if abs(g_new) >= abs(g):
            break
        z = z_new
        g = g_new
    alpha2 = 2.0 * z
    scale = max(abs(p), abs(z), math.sqrt(abs(r)))
    n = 0
    if alpha2 > 1e-14 * scale:
        alpha = math.sqrt(alpha2)
        beta = 0.5 * q / alpha
        half = 0.5 * p + z
        n = _monic_quad_into(-alpha, half + beta, roots, 0)
        n = _monic_quad_into(alpha, half - beta, roots, n)
    elif alpha2 < -1e-14 * scale:
        return 0
    else:
        # alpha ~ 0 forces q ~ 0 through the solvent: biquadratic in u^2.
        vbuf = np.empty(2)
        m = _monic_quad_into(p, r, vbuf, 0)
        vscale = abs(p) + math.sqrt(abs(r))
        for k in range(m):
            v = vbuf[k]
            if v < 0.0:
                if v < -_NEG_CLAMP_REL * vscale:
                    continue
                v = 0.0
            sv = math.sqrt(v)
            roots[n] = sv
            roots[n + 1] = -sv
            n += 2
    for i in range(n):
        roots[i] -= ofs
    return n


@njit(cache=True, nogil=True)
def _residual_filter(c4, c3, c2, c1, c0, roots, n):
    # Enforce the residual bound on everything we hand back: factorization
    # round-off near multiple roots can produce values that no longer solve
    # the polynomial, and those must be dropped, not returned.
    scale = max(abs(c4), abs(c3), abs(c2), abs(c1), abs(c0))
    m = 0
    for i in range(n):
        r = roots[i]
        val = (((c4 * r + c3) * r + c2) * r + c1) * r + c0
        mr = max(1.0, abs(r))
        if abs(val) <= 1e-6 * scale * mr * mr * mr * mr:
            roots[m] = r
            m += 1
    return m


@njit(cache=True, nogil=True)
def _sort_small(values, n):
    for i in range(1, n):
        v = values[i]
        j = i - 1
        while j >= 0 and values[j] > v:
            values[j + 1] = values[j]
            j -= 1
        values[j + 1] = v


@njit(cache=True, nogil=True)
def _reduced_roots(c3, c2, c1, c0, tol, roots):
    # Degree <= 3 solve used once the quartic's leading coefficient is gone;
    # the same relative tolerance keeps cascading down the degrees.
    if abs(c3) >= tol:
        r0 = _cubic_one_real(c3, c2, c1, c0)
        roots[0] = r0
        b1 = c2 / c3 + r0
        b0 = c1 / c3 + r0 * b1
        return _monic_quad_into(b1, b0, roots, 1)
    if abs(c2) >= tol:
        return _monic_quad_into(c1 / c2, c0 / c2, roots, 0)
    if abs(c1) >= tol:
        roots[0] = -c0 / c1
        return 1
    return 0


@njit(cache=True, nogil=True)
def _quartic_adaptive(c4, c3, c2, c1, c0, roots):
    """Returns (count, branch); count == -1 flags the all-zero input."""
    maxc = max(abs(c4), abs(c3), abs(c2), abs(c1), abs(c0))
    if maxc < ALL_ZERO_ABS_TOL:
        return -1, _BRANCH_REDUCED
    tol = LEADING_COEFF_REL_TOL * maxc
    if abs(c4) >= tol:
        a = c3 / c4
        b = c2 / c4
        c = c1 / c4
        d = c0 / c4
        if abs(a) > VARIANT_DISPATCH_RATIO:
            n = _ferrari_lagrange_monic(a, b, c, d, roots)
            branch = _BRANCH_FERRARI_LAGRANGE
        else:
            n = _classical_ferrari_monic(a, b, c, d, roots)
            branch = _BRANCH_CLASSICAL
    else:
        n = _reduced_roots(c3, c2, c1, c0, tol, roots)
        branch = _BRANCH_REDUCED
    n = _residual_filter(c4, c3, c2, c1, c0, roots, n)
    _sort_small(roots, n)
    return n, branch


def _coeffs5(coeffs) -> tuple[float, float, float, float, float]:
    arr = np.asarray(coeffs, dtype=np.float64)
    if arr.shape != (5,):
        raise ValueError(f"expected 5 coefficients (c4..c0), got shape {arr.shape}")
    if not np.all(np.isfinite(arr)):
        raise ValueError("coefficients must be finite")
    return float(arr[0]), float(arr[1]), float(arr[2]), float(arr[3]), float(arr[4])


def solve_cubic_one_real(a3: float, a2: float, a1: float, a0: float) -> float:
    """One real root of ``a3*y**3 + a2*y**2 + a1*y + a0`` (a3 != 0).

    With three real roots the largest one is returned; with a single real
    root, that one.
    """
    if not all(math.isfinite(v) for v in (a3, a2, a1, a0)):
        raise ValueError("coefficients must be finite")
    if a3 == 0.0:
        raise ValueError("leading coefficient must be nonzero")
    return float(_cubic_one_real(a3, a2, a1, a0))


def _check_leading(c4: float, maxc: float) -> None:
    if abs(c4) < LEADING_COEFF_REL_TOL * maxc or c4 == 0.0:
        raise DegenerateLeading(
            f"|c4|={abs(c4):.3e} is negligible against max|ci|={maxc:.3e}"
        )


def solve_quartic_ferrari_lagrange(coeffs) -> list[float]:
    """Real roots via the monic-form factorization, sorted ascending."""
    c4, c3, c2, c1, c0 = _coeffs5(coeffs)
    _check_leading(c4, max(abs(c4), abs(c3), abs(c2), abs(c1), abs(c0)))
    roots = np.empty(4)
    n = _ferrari_lagrange_monic(c3 / c4, c2 / c4, c1 / c4, c0 / c4, roots)
    n = _residual_filter(c4, c3, c2, c1, c0, roots, n)
    _sort_small(roots, n)
    return [float(r) for r in roots[:n]]


def solve_quartic_classical(coeffs) -> list[float]:
    """Real roots via the depressed-form factorization, sorted ascending."""
    c4, c3, c2, c1, c0 = _coeffs5(coeffs)
    _check_leading(c4, max(abs(c4), abs(c3), abs(c2), abs(c1), abs(c0)))
    roots = np.empty(4)
    n = _classical_ferrari_monic(c3 / c4, c2 / c4, c1 / c4, c0 / c4, roots)
    n = _residual_filter(c4, c3, c2, c1, c0, roots, n)
    _sort_small(roots, n)
    return [float(r) for r in roots[:n]]


def solve_quartic_adaptive(coeffs, return_branch: bool = False):
    """Real roots of an arbitrary degree-<=4 polynomial, sorted ascending.

    Dispatches to the monic-form variant when |c3/c4| exceeds
    ``VARIANT_DISPATCH_RATIO`` and to the depressed-form variant otherwise;
    a negligible c4 routes to the reduced-degree solver instead.  With
    ``return_branch=True`` the name of the branch taken is returned
    alongside the roots (the flag never changes the numbers).
    """
    c4, c3, c2, c1, c0 = _coeffs5(coeffs)
    roots = np.empty(4)
    n, branch = _quartic_adaptive(c4, c3, c2, c1, c0, roots)
    if n < 0:
        raise NoPolynomial("all coefficients are numerically zero")
    out = [float(r) for r in roots[:n]]
    if return_branch:
        return out, _BRANCH_NAMES[branch]
    return out
