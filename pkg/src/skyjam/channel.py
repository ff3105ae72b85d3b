"""Channel gains and per-slot secrecy-rate bounds.

The air-to-ground jammer links are line-of-sight free-space:
``h_i[n] = gamma0 / (||q[n] - w_i||^2 + H^2)`` (already normalized by the
noise power).  Ground links fade: the instantaneous gain is
``gamma0 * d^(-phi) * xi`` with ``xi ~ Exp(1)``, so the legitimate rate
averaged over fading admits the per-slot lower bound

    rate_lb_dest = log2(1 + exp(-EULER_GAMMA) * gamma0 * d_sd^(-phi) * p_s
                        / (h_d * p_u + 1))

(Jensen on E[ln xi] = -EULER_GAMMA) while the eavesdropper rate has the
concavity upper bound of the same shape without the exp(-EULER_GAMMA)
factor.  All functions broadcast over leading axes.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .model import Scenario

EULER_GAMMA = float(np.euler_gamma)
LN2 = float(np.log(2.0))


def uav_gain(s: Scenario, q_n: np.ndarray, w: np.ndarray) -> np.ndarray:
    """Noise-normalized jammer-to-ground gain gamma0 / (||q - w||^2 + H^2).

    ``q_n`` has shape (..., 2); the result drops the coordinate axis.
    Maximized directly above ``w`` where it equals gamma0 / H^2.
    """
    q_n = np.asarray(q_n, dtype=float)
    dist_sq = np.sum((q_n - np.asarray(w, dtype=float)) ** 2, axis=-1)
    return s.gamma0 / (dist_sq + s.altitude_h ** 2)


def _ground_gain(s: Scenario, dist: float) -> float:
    # Mean noise-normalized ground-link gain gamma0 * d^(-phi).
    return s.gamma0 * dist ** (-s.pathloss_exp)


@dataclass(frozen=True)
class SlotGains:
    """All channel gains relevant to one slot (jammer at ``q_n``)."""

    h_d_norm: float   # jammer -> destination, noise-normalized
    h_e_norm: float   # jammer -> eavesdropper
    g_d_mean: float   # mean source -> destination gain
    g_e_mean: float   # mean source -> eavesdropper gain


def slot_gains(s: Scenario, q_n) -> SlotGains:
    return SlotGains(
        h_d_norm=float(uav_gain(s, q_n, s.w_d)),
        h_e_norm=float(uav_gain(s, q_n, s.w_e)),
        g_d_mean=_ground_gain(s, s.d_sd),
        g_e_mean=_ground_gain(s, s.d_se),
    )


def rate_lb_dest(s: Scenario, q_n, p_s_n, p_u_n) -> np.ndarray:
    """Fading-averaged destination rate lower bound, bits/s/Hz.

    Non-negative, concave and non-decreasing in ``p_s_n``, non-increasing in
    ``p_u_n``.  Zero when ``p_s_n`` is zero.
    """
    interference = uav_gain(s, q_n, s.w_d) * np.asarray(p_u_n, dtype=float) + 1.0
    snr = np.exp(-EULER_GAMMA) * _ground_gain(s, s.d_sd) * np.asarray(p_s_n, dtype=float)
    return np.log1p(snr / interference) / LN2


def rate_ub_eve(s: Scenario, q_n, p_s_n, p_u_n) -> np.ndarray:
    """Fading-averaged eavesdropper rate upper bound, bits/s/Hz."""
    interference = uav_gain(s, q_n, s.w_e) * np.asarray(p_u_n, dtype=float) + 1.0
    snr = _ground_gain(s, s.d_se) * np.asarray(p_s_n, dtype=float)
    return np.log1p(snr / interference) / LN2


def expected_ln_exponential(lam: float) -> float:
    """E[ln X] for X ~ Exp(lam): equals -ln(lam) - EULER_GAMMA."""
    lam = float(lam)
    if not lam > 0.0:
        raise ValueError(f"rate parameter must be positive, got {lam}")
    return -np.log(lam) - EULER_GAMMA
