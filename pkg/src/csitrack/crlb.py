"""Cramér–Rao lower bounds for the phase pair and for the channel estimate.

Two flavours: a closed-form bound on the per-packet phase-distortion
estimate (Fisher information under a perfectly predicted channel), and a
recursive filtering/prediction bound on the channel state that coincides
with the Kalman covariance recursion run at the true statistics.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .model import PilotSet, _as_per_tap

__all__ = [
    "PhaseCrlbInput",
    "CrlbTrace",
    "UnidentifiableConfiguration",
    "fisher_matrix",
    "crlb_phase",
    "crlb_filter_trace",
]


class UnidentifiableConfiguration(ValueError):
    """The Fisher information is singular for this pilot/channel setup."""


@dataclass(frozen=True)
class PhaseCrlbInput:
    """Pilot geometry, per-channel covariances and the noise level."""

    pilots: PilotSet
    channel_covs: np.ndarray  # (N, L, L) Hermitian PSD
    noise_var: float

    def __post_init__(self):
        covs = np.asarray(self.channel_covs, dtype=complex)
        if covs.ndim == 2:
            covs = covs[None, :, :]
        L = self.pilots.channel_length
        if covs.ndim != 3 or covs.shape[1:] != (L, L):
            raise ValueError(f"channel_covs must have shape (N, {L}, {L})")
        herm = np.max(np.abs(covs - covs.conj().transpose(0, 2, 1)))
        if herm > 1e-10:
            raise ValueError(f"channel covariances not Hermitian (deviation {herm:.3e})")
        if self.noise_var <= 0:
            raise ValueError("noise_var must be positive")
        object.__setattr__(self, "channel_covs", covs)


def fisher_matrix(inp: PhaseCrlbInput) -> np.ndarray:
    """2x2 Fisher information of (slope, offset) under perfect prediction.

    Entries are (2/noise_var) * sum_i Tr(C^H Q^p C Sigma_i) with p = 2, 1, 0
    for the slope, mixed and offset terms (Q the pilot-index diagonal).
    """
    C = inp.pilots.dft
    q = inp.pilots.indices.astype(float)
    core2 = C.conj().T @ (q[:, None] ** 2 * C)
    core1 = C.conj().T @ (q[:, None] * C)
    core0 = inp.pilots.gram
    # Tr(A Sigma) summed over channels.
    t2 = np.einsum("lk,nkl->", core2, inp.channel_covs).real
    t1 = np.einsum("lk,nkl->", core1, inp.channel_covs).real
    t0 = np.einsum("lk,nkl->", core0, inp.channel_covs).real
    return (2.0 / inp.noise_var) * np.array([[t2, t1], [t1, t0]])


def crlb_phase(inp: PhaseCrlbInput) -> float:
    """Trace of the inverse Fisher matrix; the bound on MSE(slope, offset)."""
    fim = fisher_matrix(inp)
    eigs = np.linalg.eigvalsh(fim)
    if eigs[0] <= 1e-12 * max(1.0, eigs[-1]):
        raise UnidentifiableConfiguration(
            "Fisher information is singular; the phase pair is not jointly "
            "identifiable for this pilot/channel configuration"
        )
    return float(np.trace(np.linalg.inv(fim)))


@dataclass(frozen=True)
class CrlbTrace:
    """Per-packet recursive bounds on the channel estimation error."""

    filtering: tuple        # k -> (N, L, L) array J_{k|k}
    prediction: tuple       # k -> (N, L, L) array J_{k+1|k}
    scalar_bound_per_packet: np.ndarray  # k -> sum_i Tr J_{k|k}


def crlb_filter_trace(pilots: PilotSet, alpha: float, process_noise_vars,
                      noise_var: float, true_distortions, n_packets: int,
                      n_channels: int | None = None) -> CrlbTrace:
    """Riccati-style recursion for the filtering and one-step prediction bounds.

    The measurement matrix is evaluated at the true phase pair of each
    packet, starting from an identity prior.
    """
    if len(true_distortions) < n_packets:
        raise ValueError("need one true distortion per packet")
    L = pilots.channel_length
    Q = pilots.n_pilots
    if n_channels is None:
        pv = np.asarray(process_noise_vars, dtype=float)
        n_channels = pv.shape[0] if pv.ndim >= 1 else 1
    noise = _as_per_tap(process_noise_vars, n_channels, L)
    C = pilots.dft
    qidx = pilots.indices.astype(float)
    eyeQ = np.eye(Q, dtype=complex)

    J_pred = np.broadcast_to(np.eye(L, dtype=complex), (n_channels, L, L)).copy()
    filtering, prediction, scalars = [], [], []
    for k in range(n_packets):
        d = true_distortions[k]
        B = np.exp(1j * (d.offset + d.slope * qidx))[:, None] * C
        BH = B.conj().T
        J_filt = np.empty_like(J_pred)
        for i in range(n_channels):
            S = B @ J_pred[i] @ BH + noise_var * eyeQ
            gain = np.linalg.solve(S, B @ J_pred[i])
            J = J_pred[i] - J_pred[i] @ BH @ gain
            J_filt[i] = 0.5 * (J + J.conj().T)
        filtering.append(J_filt)
        scalars.append(float(np.trace(J_filt, axis1=1, axis2=2).sum().real))
        J_pred = alpha ** 2 * J_filt
        J_pred[:, np.arange(L), np.arange(L)] += noise
        prediction.append(J_pred.copy())
    return CrlbTrace(
        filtering=tuple(filtering),
        prediction=tuple(prediction),
        scalar_bound_per_packet=np.array(scalars),
    )
