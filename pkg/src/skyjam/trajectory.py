"""Trajectory design: one convexified (SCA) block update.

At fixed powers the exact per-slot contribution, written with the squared
jammer-terminal distances ``l = ||q - w_d||^2 + H^2`` and
``m = ||q - w_e||^2 + H^2``, is

    log2(1 + c l / (l + gamma0 p_u)) - log2(1 + e m / (m + gamma0 p_u)).

Both terms are concave increasing in their slack.  The update convexifies
the problem at the local trajectory ``q_k`` by (i) replacing the
eavesdropper term with its tangent in ``m`` (slope ``c_lin``, anchor value
``f_anchor``) and (ii) replacing ``-||q - w_d||^2`` inside ``l`` with its
affine tangent ``g_affine``.  Substituting the active slack expressions
``l = H^2 - g_affine(q)`` and ``m = ||q - w_e||^2 + H^2`` leaves a concave
program over the waypoints alone.

It is solved by projected gradient ascent with backtracking, parametrized
by the per-slot displacement vectors rather than the waypoints: in step
space the mobility constraints become independent radius-L balls plus one
2-D closure equation sum(v) = qf - q0, so the Euclidean projection reduces
to clipping against a shifted ball family with the shift found by a 2-D
damped Newton iteration.  Unlike alternating-projection schemes this stays
exact and fast when the step chain is taut (max-speed segments), which is
precisely how the benchmark paths start out.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass

import numpy as np

from .channel import EULER_GAMMA, LN2
from .model import PowerSchedule, Scenario, Trajectory, check_trajectory

logger = logging.getLogger(__name__)

# Positivity guard for the substituted destination slack: line-search steps
# pushing any l below H^2/100 are rejected (the affine model has left its
# trust region by then).
_L_GUARD_FRACTION = 0.01

_PGD_MAX_ITERS = 800
_PGD_STALL_WINDOW = 10
_PGD_STALL_RTOL = 1e-9
_KKT_TOL = 1e-6
_ARMIJO_SIGMA = 1e-4
_LINE_SEARCH_SHRINKS = 50
_NEWTON_MAX_ITERS = 100


@dataclass(frozen=True)
class P7Coefficients:
    """Per-slot constants of the convexified trajectory subproblem.

    ``c``/``e``: effective destination/eavesdropper SNR numerators,
    ``gamma_pu``: gamma0 * p_u[n],
    ``c_lin``/``f_anchor``: tangent slope and value of the eavesdropper term
    at the local slack ``m_k = ||q_k - w_e||^2 + H^2``,
    ``g_const``/``g_coef``: affine tangent of -||q - w_d||^2 at ``q_k``,
    stored so that g_affine(q) = g_const + g_coef . q.
    """

    c: np.ndarray
    e: np.ndarray
    gamma_pu: np.ndarray
    c_lin: np.ndarray
    f_anchor: np.ndarray
    g_const: np.ndarray
    g_coef: np.ndarray

    def __post_init__(self):
        n = None
        for name in ("c", "e", "gamma_pu", "c_lin", "f_anchor", "g_const"):
            arr = np.asarray(getattr(self, name), dtype=float)
            if arr.ndim != 1 or (n is not None and arr.shape[0] != n):
                raise ValueError(f"{name}: inconsistent shape {arr.shape}")
            n = arr.shape[0]
            if not np.all(np.isfinite(arr)):
                raise ValueError(f"{name}: must be finite")
            arr.setflags(write=False)
            object.__setattr__(self, name, arr)
        g_coef = np.asarray(self.g_coef, dtype=float)
        if g_coef.shape != (n, 2):
            raise ValueError(f"g_coef: expected shape ({n}, 2), got {g_coef.shape}")
        g_coef.setflags(write=False)
        object.__setattr__(self, "g_coef", g_coef)
        if np.any(self.c < 0.0) or np.any(self.e < 0.0):
            raise ValueError("c, e must be non-negative")
        if np.any(self.gamma_pu < 0.0):
            raise ValueError("gamma_pu must be non-negative")
        if np.any(self.c_lin < 0.0):
            raise ValueError("c_lin must be non-negative")


def p7_coefficients(s: Scenario, q_k: Trajectory, p: PowerSchedule) -> P7Coefficients:
    """Constants and tangents of the trajectory subproblem at ``q_k``.

    The local eavesdropper slack uses the same +H^2 convention as the slack
    variable it bounds, which keeps the tangent a true global over-estimator.
    """
    c = np.exp(-EULER_GAMMA) * s.gamma0 * s.d_sd ** (-s.pathloss_exp) * p.p_s
    e = s.gamma0 * s.d_se ** (-s.pathloss_exp) * p.p_s
    gamma_pu = s.gamma0 * p.p_u
    m_k = np.sum((q_k.q - s.w_e) ** 2, axis=1) + s.altitude_h ** 2
    c_lin = e * gamma_pu / (LN2 * (m_k + gamma_pu) * ((e + 1.0) * m_k + gamma_pu))
    f_anchor = np.log1p(e * m_k / (m_k + gamma_pu)) / LN2
    g_const = np.sum(q_k.q ** 2, axis=1) - float(np.dot(s.w_d, s.w_d))
    g_coef = -2.0 * (q_k.q - s.w_d)
    return P7Coefficients(c=c, e=e, gamma_pu=gamma_pu, c_lin=c_lin,
                          f_anchor=f_anchor, g_const=g_const, g_coef=g_coef)


def g_affine(coef: P7Coefficients, q: np.ndarray) -> np.ndarray:
    """Tangent over-estimator of -||q - w_d||^2, per slot."""
    return coef.g_const + np.sum(coef.g_coef * q, axis=-1)


def p6_objective(s: Scenario, coef: P7Coefficients, t: Trajectory) -> float:
    """Exact block objective at ``t`` (slacks tight), summed over slots."""
    l = np.sum((t.q - s.w_d) ** 2, axis=1) + s.altitude_h ** 2
    m = np.sum((t.q - s.w_e) ** 2, axis=1) + s.altitude_h ** 2
    dest = np.log1p(coef.c * l / (l + coef.gamma_pu))
    eve = np.log1p(coef.e * m / (m + coef.gamma_pu))
    return float(np.sum(dest - eve) / LN2)


def p7_surrogate(s: Scenario, coef: P7Coefficients, q: np.ndarray) -> float:
    """Convexified objective with slacks substituted by their active values.

    Differs from the exact block objective by the iteration constant
    sum(c_lin * m_k - f_anchor) plus the tangent gaps, and coincides with it
    at the anchor trajectory.
    """
    l_hat = s.altitude_h ** 2 - g_affine(coef, q)
    dest = np.log1p(coef.c * l_hat / (l_hat + coef.gamma_pu)) / LN2
    m = np.sum((q - s.w_e) ** 2, axis=1) + s.altitude_h ** 2
    return float(np.sum(dest - coef.c_lin * m))


def _surrogate_gradient(s: Scenario, coef: P7Coefficients, q: np.ndarray) -> np.ndarray:
    l_hat = s.altitude_h ** 2 - g_affine(coef, q)
    slope = coef.c * coef.gamma_pu / (
        LN2 * (l_hat + coef.gamma_pu) * ((coef.c + 1.0) * l_hat + coef.gamma_pu)
    )
    return -slope[:, None] * coef.g_coef - 2.0 * coef.c_lin[:, None] * (q - s.w_e)


def project_steps(w: np.ndarray, closure: np.ndarray, l_max: float):
    """Euclidean projection of step vectors onto the mobility set.

    Solves min ||v - w||^2 subject to ||v_j|| <= l_max and sum(v) = closure.
    By duality v_j = clip(w_j + theta) with theta a 2-vector chosen so the
    closure equation holds.  The residual F(theta) = sum(clip(w + theta)) -
    closure is the gradient of a coercive convex potential (a sum of ball
    Moreau envelopes minus a linear term), so theta is found by a damped
    Newton iteration with Armijo backtracking on that potential; descent
    steps keep it globally convergent even when every point is clipped and
    the Jacobian goes singular along the shared radial direction.

    Returns ``(v, converged)``.  Requires ||closure|| <= n * l_max; the taut
    boundary case returns the unique feasible point directly.
    """
    n = w.shape[0]
    closure_norm = float(np.linalg.norm(closure))
    cap = n * l_max
    if closure_norm > cap * (1.0 + 1e-9):
        raise ValueError("closure not reachable: ||sum|| exceeds n * l_max")
    if closure_norm >= cap * (1.0 - 1e-12):
        return np.tile(closure / n, (n, 1)), True

    tol = 1e-11 * max(1.0, l_max)
    theta = np.zeros(2)

    def state(shift):
        y = w + shift
        r = np.sqrt(np.sum(y * y, axis=1))
        over = r > l_max
        v = y.copy()
        if np.any(over):
            v[over] *= (l_max / r[over])[:, None]
        return y, r, over, v, v.sum(axis=0) - closure

    def potential_delta(y, r, over, step, r_new, over_new):
        # h(y + step) - h(y) per point, with h the ball Moreau envelope
        # (h = r^2/2 inside, l_max r - l_max^2/2 outside), written per
        # endpoint-status pair so large equal terms never cancel; this keeps
        # the Armijo test meaningful down to machine precision.
        cross = np.sum(y * step[None, :], axis=1)
        ss = float(np.dot(step, step))
        inside_both = 2.0 * cross + ss
        delta = np.where(
            ~over & ~over_new,
            0.5 * inside_both,
            np.where(
                over & over_new,
                l_max * inside_both / (r + r_new),
                np.where(
                    ~over & over_new,
                    l_max * (r_new - l_max) + 0.5 * (l_max - r) * (l_max + r),
                    0.5 * (r_new - l_max) * (r_new + l_max) + l_max * (l_max - r),
                ),
            ),
        )
        return float(delta.sum()) - float(np.dot(closure, step))

    y, r, over, v, f = state(theta)
    fnorm = float(np.linalg.norm(f))
    for _ in range(_NEWTON_MAX_ITERS):
        if fnorm <= tol:
            return v, True
        # Jacobian of F: identity inside the ball, tangential shrink outside.
        inside = ~over
        jac = np.count_nonzero(inside) * np.eye(2)
        if np.any(over):
            scale = l_max / r[over]
            u = y[over] / r[over][:, None]
            outer = np.einsum("ji,jk->ik", u * scale[:, None], u)
            jac += np.diag([scale.sum(), scale.sum()]) - outer
        damp = 1e-12 + 1e-8 * fnorm
        try:
            step = np.linalg.solve(jac + damp * np.eye(2), -f)
        except np.linalg.LinAlgError:
            step = -f / max(1.0, float(np.trace(jac)))
        # F is the gradient of the convex coercive potential sum h - closure
        # . theta, and the damped Newton step is a descent direction for it,
        # so Armijo backtracking is globally convergent: small enough steps
        # always pass, while far overshoots (where the Jacobian is singular
        # along the shared radial direction) blow the potential up and are
        # rejected.
        for _ in range(80):
            slope = float(np.dot(f, step))
            y_new, r_new, over_new, v_new, f_new = state(theta + step)
            if potential_delta(y, r, over, step, r_new, over_new) <= 1e-4 * slope:
                break
            step *= 0.5
        else:
            return v, False
        theta = theta + step
        y, r, over, v, f = y_new, r_new, over_new, v_new, f_new
        fnorm = float(np.linalg.norm(f))
    return v, fnorm <= tol


def _steps_to_waypoints(q0: np.ndarray, qf: np.ndarray, v: np.ndarray) -> np.ndarray:
    q = q0[None, :] + np.cumsum(v, axis=0)
    q[-1] = qf   # closure holds to projection tolerance; pin exactly
    return q


def solve_p7(s: Scenario, coef: P7Coefficients, q_k: Trajectory,
             max_iters: int = _PGD_MAX_ITERS) -> Trajectory:
    """One trajectory block update: maximize the convexified objective.

    ``q_k`` must be feasible; the output is feasible and never decreases the
    exact block objective (the incumbent starts at ``q_k`` and only
    improving feasible steps are accepted, and the convexified objective
    under-estimates the exact one away from the anchor).
    """
    verdict = check_trajectory(s, q_k)
    if not verdict.feasible:
        worst = verdict.worst
        raise ValueError(
            f"local trajectory infeasible: {worst.constraint}[{worst.index}] "
            f"exceeds by {worst.magnitude:.3e}"
        )
    if coef.c.shape[0] != s.n_slots:
        raise ValueError(f"coefficients cover {coef.c.shape[0]} slots, expected {s.n_slots}")
    n = s.n_slots
    if n == 1:
        return Trajectory(np.array([s.qf]))   # the only feasible waypoint

    closure = s.qf - s.q0
    guard = _L_GUARD_FRACTION * s.altitude_h ** 2
    guard_hit = False

    # start from the local point's steps, absorbing its final-point slack
    v = np.diff(np.vstack([s.q0[None, :], q_k.q]), axis=0)
    v += (closure - v.sum(axis=0)) / n
    q = _steps_to_waypoints(s.q0, s.qf, v)
    fx = p7_surrogate(s, coef, q)

    def step_gradient(q_now: np.ndarray) -> np.ndarray:
        g_q = _surrogate_gradient(s, coef, q_now)
        # waypoint k depends on steps 1..k, so step j collects the suffix sum
        return np.cumsum(g_q[::-1], axis=0)[::-1]

    grad = step_gradient(q)
    gmax = float(np.max(np.abs(grad)))
    if gmax == 0.0:
        return Trajectory(q)
    trial = s.l_max / gmax
    history = [fx]

    for _ in range(max_iters):
        accepted = False
        for _ in range(_LINE_SEARCH_SHRINKS):
            v_new, ok = project_steps(v + trial * grad, closure, s.l_max)
            if not ok:
                trial *= 0.5
                continue
            q_new = _steps_to_waypoints(s.q0, s.qf, v_new)
            l_hat = s.altitude_h ** 2 - g_affine(coef, q_new)
            if np.any(l_hat < guard):
                guard_hit = True
                trial *= 0.5
                continue
            fy = p7_surrogate(s, coef, q_new)
            inner = float(np.sum(grad * (v_new - v)))
            if fy - fx >= _ARMIJO_SIGMA * max(inner, 0.0) and fy >= fx:
                accepted = True
                break
            trial *= 0.5
        if not accepted:
            break
        delta_v = v_new - v
        v, q, fx = v_new, q_new, fy
        new_grad = step_gradient(q)
        delta_g = new_grad - grad
        grad = new_grad
        # Barzilai-Borwein step length, sign flipped for ascent
        denom = float(np.sum(delta_v * delta_g))
        if denom < 0.0:
            trial = -float(np.sum(delta_v * delta_v)) / denom
        else:
            trial *= 2.0
        history.append(fx)
        if len(history) > _PGD_STALL_WINDOW:
            gain = history[-1] - history[-1 - _PGD_STALL_WINDOW]
            if gain < _PGD_STALL_RTOL * max(1.0, abs(history[-1])):
                break

    residual_point, ok = project_steps(v + grad, closure, s.l_max)
    if ok:
        residual = float(np.max(np.abs(residual_point - v)))
        if residual > _KKT_TOL:
            logger.debug("trajectory update stopped with projected residual %.3e",
                         residual)
    if guard_hit:
        logger.debug("trajectory line search clipped by the slack positivity guard")
    return Trajectory(q)
