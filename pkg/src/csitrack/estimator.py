"""Adaptive Kalman filter with per-packet MAP estimation of the phase errors.

Each packet is processed in three stages: predict the channel under the
AR(1) model, fit the phase slope/offset pair by minimizing the negative
log-likelihood over the prior supports, then apply the Kalman update with
the measurement matrix evaluated at the fitted pair.

A structural identity keeps everything cheap: the diagonal slope matrix E
and the scalar offset factor are unitary, so the NLL weight

    gamma_i = (B P_i B^H + noise_var * I)^{-1} = E G_i E^H,
    G_i = (C P_i C^H + noise_var * I)^{-1}

with G_i independent of both phase parameters.  The 2-D MAP problem then
collapses to a 1-D search over the slope (the offset has a closed form),
and G_i is applied through an L x L solve (Woodbury) instead of a Q x Q
inverse.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import _backend
from .model import (
    FilterState,
    Observation,
    PhaseDistortion,
    PilotSet,
    _as_per_tap,
    wrap_angle,
)

__all__ = [
    "EstimatorConfig",
    "MapSolution",
    "init_filter",
    "predict",
    "nll",
    "closed_form_offset",
    "estimate_distortion",
    "update",
    "step",
    "oracle_step",
    "profile_coefficients",
    "slope_interval_count",
]


@dataclass(frozen=True)
class EstimatorConfig:
    """Statistics and solver settings the filter is allowed to know."""

    alpha: float
    process_noise_vars: object  # scalar, (N,) or (N, L); see model._as_per_tap
    noise_var: float
    slope_support: tuple = (-0.2, 0.2)
    offset_support: tuple = (-np.pi, np.pi)
    newton_max_iters: int = 50
    newton_tol: float = 1e-9
    n_intervals: int | None = None
    # Open design switch: apply the NLL weight with only the diagonal of the
    # predicted covariance (the update always uses the full matrix).
    gamma_diag_covariance: bool = False

    def __post_init__(self):
        if self.noise_var <= 0:
            raise ValueError("noise_var must be positive")
        if self.newton_tol <= 0:
            raise ValueError("newton_tol must be positive")
        if self.newton_max_iters < 1:
            raise ValueError("newton_max_iters must be >= 1")
        if not 0.0 < self.alpha <= 1.0:
            raise ValueError("alpha must lie in (0, 1]")
        if self.n_intervals is not None and self.n_intervals < 1:
            raise ValueError("n_intervals must be a positive integer")


@dataclass(frozen=True)
class MapSolution:
    """Result of one per-packet phase-distortion fit."""

    distortion: PhaseDistortion
    nll_value: float
    interval_index: int
    iterations_used: int
    degenerate: bool = False


def slope_interval_count(cfg: EstimatorConfig, pilots: PilotSet) -> int:
    """Quarter-period partition of the slope support.

    The fastest NLL oscillation in the slope has angular frequency
    max|q_m|, so intervals of width <= pi / (2 max|q|) keep the objective
    locally well-behaved.
    """
    if cfg.n_intervals is not None:
        return int(cfg.n_intervals)
    lo, hi = cfg.slope_support
    width = max(hi - lo, 0.0)
    return max(1, math.ceil(width * pilots.max_abs_index * 2.0 / np.pi))


def init_filter(cfg: EstimatorConfig, pilots: PilotSet, n_channels: int) -> FilterState:
    """All-zero channel estimate with identity error covariances."""
    L = pilots.channel_length
    est = np.zeros((L, n_channels), dtype=complex)
    covs = np.broadcast_to(np.eye(L, dtype=complex), (n_channels, L, L)).copy()
    return FilterState(estimate=est, covariances=covs, phase=None, packet_index=-1)


def predict(state: FilterState, cfg: EstimatorConfig) -> FilterState:
    """AR(1) prediction: scale the estimate, inflate the covariances."""
    L, N = state.estimate.shape
    noise = _as_per_tap(cfg.process_noise_vars, N, L)
    covs = cfg.alpha ** 2 * state.covariances
    covs[:, np.arange(L), np.arange(L)] += noise
    return FilterState(
        estimate=cfg.alpha * state.estimate,
        covariances=covs,
        phase=state.phase,
        packet_index=state.packet_index,
    )


def _check_shapes(obs: Observation, predicted: FilterState, pilots: PilotSet):
    if obs.n_pilots != pilots.n_pilots:
        raise ValueError(
            f"observation has {obs.n_pilots} pilot rows, pilot set defines "
            f"{pilots.n_pilots}"
        )
    if predicted.n_taps != pilots.channel_length:
        raise ValueError("filter state tap count does not match the pilot set")
    if obs.n_channels != predicted.n_channels:
        raise ValueError("observation and filter state disagree on channel count")


def _weights(covs: np.ndarray, pilots: PilotSet, noise_var: float,
             diag_only: bool) -> np.ndarray:
    """Per-channel M_i = (noise_var I + P_i C^H C)^{-1} P_i (Woodbury core)."""
    P = covs
    if diag_only:
        L = P.shape[-1]
        P = np.zeros_like(covs)
        P[:, np.arange(L), np.arange(L)] = covs[:, np.arange(L), np.arange(L)]
    L = P.shape[-1]
    A = noise_var * np.eye(L, dtype=complex)[None, :, :] + P @ pilots.gram
    return np.linalg.solve(A, P)


def _quad_forms(v: np.ndarray, M: np.ndarray, pilots: PilotSet,
                noise_var: float) -> float:
    """sum_i v_i^H G_i v_i computed through the L x L weights."""
    cv = pilots.dft.conj().T @ v
    Mcv = np.einsum("nlk,kn->ln", M, cv)
    total = np.vdot(v, v).real - np.einsum("ln,ln->", cv.conj(), Mcv).real
    return float(total / noise_var)


def nll(obs: Observation, predicted: FilterState, d: PhaseDistortion,
        pilots: PilotSet, cfg: EstimatorConfig) -> float:
    """Negative log-likelihood of the observation at a candidate distortion."""
    _check_shapes(obs, predicted, pilots)
    M = _weights(predicted.covariances, pilots, cfg.noise_var,
                 cfg.gamma_diag_covariance)
    q = pilots.indices.astype(float)
    u = np.exp(-1j * d.slope * q)[:, None] * obs.csi
    v = u - np.exp(1j * d.offset) * (pilots.dft @ predicted.estimate)
    return _quad_forms(v, M, pilots, cfg.noise_var)


def closed_form_offset(obs: Observation, predicted: FilterState, slope: float,
                       pilots: PilotSet, cfg: EstimatorConfig):
    """Exact NLL minimizer over the offset at a fixed slope.

    Returns ``(offset, degenerate)``; the offset is canonicalized to
    (-pi, pi] and ``degenerate`` marks an all-zero prediction, for which any
    offset fits equally well and 0 is reported.
    """
    _check_shapes(obs, predicted, pilots)
    M = _weights(predicted.covariances, pilots, cfg.noise_var,
                 cfg.gamma_diag_covariance)
    q = pilots.indices.astype(float)
    z = pilots.dft @ predicted.estimate
    cz = pilots.dft.conj().T @ z
    Mz = np.einsum("nlk,kn->ln", M, cz)
    w = (z - pilots.dft @ Mz) / cfg.noise_var
    u = np.exp(-1j * slope * q)[:, None] * obs.csi
    c = np.vdot(u, w)
    scale = np.linalg.norm(u) * np.linalg.norm(w)
    if abs(c) <= 1e-14 * (scale + 1.0):
        return 0.0, True
    return wrap_angle(-np.angle(c)), False


def profile_coefficients(obs: Observation, predicted: FilterState,
                         pilots: PilotSet, cfg: EstimatorConfig):
    """Coefficients of the slope-profile objective for one packet.

    Returns ``(s0, s_re, s_im, q, t_re, t_im, b)`` such that the NLL at
    (slope x, offset w) equals  a(x) + b - 2 Re(exp(jw) c(x))  with
    a(x) = s0 + 2 sum_d Re(s_d exp(jxd)) and c(x) = sum_m t_m exp(j x q_m).
    """
    _check_shapes(obs, predicted, pilots)
    M = _weights(predicted.covariances, pilots, cfg.noise_var,
                 cfg.gamma_diag_covariance)
    C = pilots.dft
    noise_var = cfg.noise_var
    h = obs.csi

    z = C @ predicted.estimate
    cz = C.conj().T @ z
    Mz = np.einsum("nlk,kn->ln", M, cz)
    w = (z - C @ Mz) / noise_var
    b = (np.vdot(z, z).real - np.einsum("ln,ln->", cz.conj(), Mz).real) / noise_var
    t = np.einsum("qn,qn->q", h.conj(), w)

    # D = sum_i diag(conj h_i) G_i diag(h_i), reduced over index differences.
    F = h.conj().T[:, :, None] * C[None, :, :]
    FM = F @ M
    S1 = np.einsum("nql,npl->qp", FM, F.conj())
    D = (np.diag((np.abs(h) ** 2).sum(axis=1)).astype(complex) - S1) / noise_var

    q_int = pilots.indices
    span = int(q_int.max() - q_int.min())
    delta = (q_int[:, None] - q_int[None, :] + span).ravel()
    flat = D.ravel()
    s_all = (np.bincount(delta, weights=flat.real, minlength=2 * span + 1)
             + 1j * np.bincount(delta, weights=flat.imag, minlength=2 * span + 1))
    s0 = float(s_all[span].real)
    if span > 0:
        s_pos = 0.5 * (s_all[span + 1:] + s_all[span - 1::-1].conj())
    else:
        s_pos = np.zeros(0, dtype=complex)

    return (
        s0,
        np.ascontiguousarray(s_pos.real),
        np.ascontiguousarray(s_pos.imag),
        np.ascontiguousarray(q_int.astype(float)),
        np.ascontiguousarray(t.real),
        np.ascontiguousarray(t.imag),
        float(b),
    )


def estimate_distortion(obs: Observation, predicted: FilterState,
                        pilots: PilotSet, cfg: EstimatorConfig) -> MapSolution:
    """MAP fit of the phase pair over the prior supports for one packet."""
    s0, s_re, s_im, q, t_re, t_im, b = profile_coefficients(obs, predicted, pilots, cfg)
    slope_lo, slope_hi = cfg.slope_support
    off_lo, off_hi = cfg.offset_support
    slope, offset, value, interval, iters = _backend.minimize_profile(
        s0, s_re, s_im, q, t_re, t_im, b,
        float(slope_lo), float(slope_hi), float(off_lo), float(off_hi),
        slope_interval_count(cfg, pilots), int(cfg.newton_max_iters),
        float(cfg.newton_tol),
    )
    c = complex(np.sum((t_re + 1j * t_im) * np.exp(1j * slope * q)))
    degenerate = abs(c) <= 1e-14 * (math.sqrt(max(s0, 0.0) * max(b, 0.0)) + 1.0)
    if -1e-9 < value < 0.0:
        value = 0.0
    d = PhaseDistortion(slope, offset, cfg.slope_support, cfg.offset_support)
    return MapSolution(distortion=d, nll_value=float(value),
                       interval_index=int(interval), iterations_used=int(iters),
                       degenerate=bool(degenerate))


def update(obs: Observation, predicted: FilterState, sol: MapSolution,
           pilots: PilotSet, cfg: EstimatorConfig) -> FilterState:
    """Kalman measurement update at the fitted phase pair.

    Implemented in derotated form: the unitary phase factors cancel inside
    the gain, so the innovation is applied to the phase-corrected
    observation with the plain DFT as measurement matrix.
    """
    _check_shapes(obs, predicted, pilots)
    d = sol.distortion
    C = pilots.dft
    gram = pilots.gram
    noise_var = cfg.noise_var
    P = predicted.covariances
    M = _weights(P, pilots, noise_var, diag_only=False)

    q = pilots.indices.astype(float)
    u = np.exp(-1j * (d.offset + d.slope * q))[:, None] * obs.csi
    r = u - C @ predicted.estimate
    cr = C.conj().T @ r
    Mcr = np.einsum("nlk,kn->ln", M, cr)
    v = (cr - gram @ Mcr) / noise_var  # per channel: C^H G_i r_i
    est = predicted.estimate + np.einsum("nlk,kn->ln", P, v)

    K = (gram[None, :, :] - gram @ M @ gram) / noise_var  # C^H G_i C
    covs = P - P @ K @ P
    covs = 0.5 * (covs + covs.conj().transpose(0, 2, 1))
    return FilterState(estimate=est, covariances=covs, phase=d,
                       packet_index=obs.packet_index)


def _check_consecutive(obs: Observation, state: FilterState):
    if state.packet_index >= 0 and obs.packet_index != state.packet_index + 1:
        raise ValueError(
            f"packet indices must be consecutive: state at {state.packet_index}, "
            f"observation at {obs.packet_index}"
        )


def step(obs: Observation, state: FilterState, cfg: EstimatorConfig,
         pilots: PilotSet):
    """One filter cycle: predict, fit the phase pair, update.

    Returns ``(new_state, solution)``.
    """
    _check_consecutive(obs, state)
    predicted = predict(state, cfg)
    sol = estimate_distortion(obs, predicted, pilots, cfg)
    return update(obs, predicted, sol, pilots, cfg), sol


def oracle_step(obs: Observation, state: FilterState, cfg: EstimatorConfig,
                pilots: PilotSet, true_distortion: PhaseDistortion) -> FilterState:
    """Filter cycle with the true phase pair supplied (MAP stage bypassed)."""
    _check_consecutive(obs, state)
    predicted = predict(state, cfg)
    sol = MapSolution(distortion=true_distortion, nll_value=0.0,
                      interval_index=-1, iterations_used=0)
    return update(obs, predicted, sol, pilots, cfg)
