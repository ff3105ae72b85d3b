"""Jammer power control: one convexified (SCA) block update.

At fixed trajectory and source powers the exact per-slot contribution is
``log2(1 + c/(d p + 1)) - log2(1 + e/(f p + 1))``: the destination term is
convex in the jamming power p, so it is minorized by its tangent at the
local point ``p_u_k``, giving the concave per-slot objective

    A_k[n] * p + B_k[n] - log2(1 + e_n / (f_n p + 1))

The block update solves this separable concave program by dual
decomposition: for each candidate multiplier nu on the average-power
constraint, the per-slot Lagrangian maximizer is the larger root of a
quadratic (clamped to ``[0, p_u_peak]``); nu itself comes from bisection.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .channel import EULER_GAMMA, LN2, uav_gain
from .model import Scenario, Trajectory
from .source_power import _BISECT_STEPS


@dataclass(frozen=True)
class P5Coefficients:
    """Per-slot constants (c, d, e, f) plus tangent data (a_lin, b_lin).

    ``a_lin`` is the (non-positive) slope of the destination-term tangent at
    the local point, ``b_lin`` its intercept.
    """

    c: np.ndarray
    d: np.ndarray
    e: np.ndarray
    f: np.ndarray
    a_lin: np.ndarray
    b_lin: np.ndarray

    def __post_init__(self):
        arrays = {}
        shape = None
        for name in ("c", "d", "e", "f", "a_lin", "b_lin"):
            arr = np.asarray(getattr(self, name), dtype=float)
            if arr.ndim != 1 or (shape is not None and arr.shape != shape):
                raise ValueError(f"{name}: inconsistent coefficient shape {arr.shape}")
            shape = arr.shape
            if not np.all(np.isfinite(arr)):
                raise ValueError(f"{name}: coefficients must be finite")
            arr.setflags(write=False)
            arrays[name] = arr
        if np.any(arrays["c"] < 0.0) or np.any(arrays["e"] < 0.0):
            raise ValueError("c, e must be non-negative")
        if np.any(arrays["d"] <= 0.0) or np.any(arrays["f"] <= 0.0):
            raise ValueError("d, f must be positive")
        if np.any(arrays["a_lin"] > 0.0):
            raise ValueError("a_lin must be non-positive")
        for name, arr in arrays.items():
            object.__setattr__(self, name, arr)


def p5_coefficients(s: Scenario, t: Trajectory, p_s: np.ndarray,
                    p_u_k: np.ndarray) -> P5Coefficients:
    """Subproblem constants and tangent taken at the local point ``p_u_k``."""
    p_s = np.asarray(p_s, dtype=float)
    p_u_k = np.asarray(p_u_k, dtype=float)
    c = np.exp(-EULER_GAMMA) * s.gamma0 * s.d_sd ** (-s.pathloss_exp) * p_s
    e = s.gamma0 * s.d_se ** (-s.pathloss_exp) * p_s
    d = uav_gain(s, t.q, s.w_d)
    f = uav_gain(s, t.q, s.w_e)
    den = d * p_u_k + 1.0
    a_lin = -c * d / (LN2 * den * (den + c))
    # Tangent intercept: the line a_lin * p + b_lin touches the exact
    # destination term at p_u_k and sits below it everywhere else.
    b_lin = np.log1p(c / den) / LN2 - a_lin * p_u_k
    return P5Coefficients(c=c, d=d, e=e, f=f, a_lin=a_lin, b_lin=b_lin)


def p4_objective(coef: P5Coefficients, p_u: np.ndarray) -> float:
    """Exact block objective sum_n log2(1+c/(dp+1)) - log2(1+e/(fp+1))."""
    p_u = np.asarray(p_u, dtype=float)
    dest = np.log1p(coef.c / (coef.d * p_u + 1.0))
    eve = np.log1p(coef.e / (coef.f * p_u + 1.0))
    return float(np.sum(dest - eve) / LN2)


def p5_surrogate(coef: P5Coefficients, p_u: np.ndarray) -> float:
    """Convexified objective sum_n a_lin p + b_lin - log2(1+e/(fp+1))."""
    p_u = np.asarray(p_u, dtype=float)
    eve = np.log1p(coef.e / (coef.f * p_u + 1.0)) / LN2
    return float(np.sum(coef.a_lin * p_u + coef.b_lin - eve))


def _p5_point(coef: P5Coefficients, nu: float, peak: float) -> np.ndarray:
    """Per-slot Lagrangian maximizer at multiplier nu, clamped to the box.

    Stationarity reads a_lin - nu + e f / (ln2 (f p + 1)(f p + e + 1)) = 0;
    substituting t = f p gives t^2 + (e + 2) t + (e + 1) - R = 0 with
    R = e f / (ln2 (nu - a_lin)), whose larger root is the maximizer of the
    concave per-slot function.
    """
    p = np.zeros_like(coef.e)
    active = coef.e > 0.0
    if not np.any(active):
        return p
    e = coef.e[active]
    f = coef.f[active]
    slack = nu - coef.a_lin[active]   # >= 0 since a_lin <= 0, nu >= 0
    with np.errstate(divide="ignore", over="ignore", invalid="ignore"):
        r = e * f / (LN2 * slack)
        # larger quadratic root, conjugate form to dodge cancellation
        t = 2.0 * (r - e - 1.0) / (np.sqrt(e * e + 4.0 * r) + e + 2.0)
    t = np.where(np.isfinite(r), t, np.inf)   # slack == 0: ascent never stops
    p[active] = np.clip(t / f, 0.0, peak)
    return p


def solve_p5(s: Scenario, coef: P5Coefficients):
    """Maximize the convexified block objective under the power budgets.

    Returns ``(p_u, nu)``.  When the unconstrained (nu = 0) solution already
    meets the average budget it is returned as-is; otherwise bisection
    drives mean(p_u) onto p_u_avg, making the dual gap nu * (budget -
    sum(p_u)) negligible.
    """
    if coef.e.shape[0] != s.n_slots:
        raise ValueError(f"coefficients cover {coef.e.shape[0]} slots, expected {s.n_slots}")
    peak = s.p_u_peak
    budget = s.n_slots * s.p_u_avg

    p0 = _p5_point(coef, 0.0, peak)
    if p0.sum() <= budget * (1.0 + 1e-12):
        return p0, 0.0

    lo, hi = 0.0, 1.0
    while _p5_point(coef, hi, peak).sum() > budget:
        lo = hi
        hi *= 2.0
        if hi > 1e300:
            raise RuntimeError("jammer-power multiplier bracket failed to close")
    for _ in range(_BISECT_STEPS):
        mid = 0.5 * (lo + hi)
        if mid <= lo or mid >= hi:
            break
        if _p5_point(coef, mid, peak).sum() > budget:
            lo = mid
        else:
            hi = mid
    return _p5_point(coef, hi, peak), hi
