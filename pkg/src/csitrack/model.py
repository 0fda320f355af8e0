"""Domain types and model equations shared by the simulator, estimator and
bound computations.

The observation model is

    X_k = exp(j*offset_k) * E(slope_k) * C * H_k + W_k

where ``C`` is the pilot-row DFT matrix, ``E`` the diagonal phase-slope
matrix and ``H_k`` the time-domain MIMO channel, which evolves as an AR(1)
process ``H_k = alpha * H_{k-1} + V_k``.
"""

from __future__ import annotations

from dataclasses import dataclass, replace
from functools import cached_property

import numpy as np

__all__ = [
    "PilotSet",
    "PhaseDistortion",
    "ChannelState",
    "Observation",
    "FilterState",
    "DEFAULT_ALPHA",
    "default_pilot_set",
    "default_tap_profile",
    "stationary_process_noise",
    "snr_db_to_noise_var",
    "wrap_angle",
    "draw_complex_gaussian",
    "dft_matrix",
    "apply_distortion",
    "ar1_step",
    "observe",
]

# Channel coherence: correlation halves after 10^3 packets.
DEFAULT_ALPHA = 0.5 ** 1e-3


def wrap_angle(x):
    """Wrap angles to the canonical interval (-pi, pi]."""
    w = np.mod(np.asarray(x, dtype=float) + np.pi, 2.0 * np.pi)
    w = np.where(w <= 0.0, w + 2.0 * np.pi, w) - np.pi
    if np.ndim(x) == 0:
        return float(w)
    return w


def snr_db_to_noise_var(snr_db: float) -> float:
    """Per-subcarrier noise variance for unit total channel power."""
    return 10.0 ** (-snr_db / 10.0)


def draw_complex_gaussian(rng: np.random.Generator, shape, var=1.0):
    """Circularly-symmetric CN(0, var): Re and Im each have variance var/2."""
    scale = np.sqrt(np.asarray(var, dtype=float) / 2.0)
    return scale * (rng.standard_normal(shape) + 1j * rng.standard_normal(shape))


@dataclass(frozen=True)
class PilotSet:
    """Pilot geometry: DFT size, observed subcarrier indices and channel length.

    ``pilot_indices`` may be signed (symmetric around DC); they enter the DFT
    matrix and the slope model as-is, which is equivalent to reduction mod
    ``dft_size``.
    """

    dft_size: int
    pilot_indices: tuple
    channel_length: int
    # Scalar toy cases (Q=1, L=1) used in closed-form checks are allowed to
    # bypass the joint-identifiability constraint L <= Q - 2.
    require_identifiable: bool = True

    def __post_init__(self):
        object.__setattr__(self, "pilot_indices", tuple(int(q) for q in self.pilot_indices))
        if self.dft_size < 1:
            raise ValueError("dft_size must be a positive integer")
        if self.channel_length < 1:
            raise ValueError("channel_length must be a positive integer")
        q = self.pilot_indices
        if len(q) == 0:
            raise ValueError("at least one pilot index is required")
        if len(set(q)) != len(q):
            raise ValueError("pilot indices must be pairwise distinct")
        if len(q) > self.dft_size:
            raise ValueError("number of pilots Q cannot exceed the DFT size")
        if self.require_identifiable and self.channel_length > len(q) - 2:
            raise ValueError(
                f"channel_length L={self.channel_length} must satisfy L <= Q-2 "
                f"(Q={len(q)}) for joint channel/phase identifiability"
            )

    @property
    def n_pilots(self) -> int:
        return len(self.pilot_indices)

    @cached_property
    def indices(self) -> np.ndarray:
        return np.array(self.pilot_indices, dtype=np.int64)

    @cached_property
    def max_abs_index(self) -> int:
        return int(np.max(np.abs(self.indices)))

    @cached_property
    def max_adjacent_gap(self) -> int:
        q = np.sort(self.indices)
        if q.size == 1:
            return 1
        return int(np.max(np.diff(q)))

    @cached_property
    def dft(self) -> np.ndarray:
        q = self.indices[:, None].astype(float)
        taps = np.arange(self.channel_length, dtype=float)[None, :]
        mat = np.exp(-2j * np.pi * q * taps / self.dft_size)
        mat.setflags(write=False)
        return mat

    @cached_property
    def gram(self) -> np.ndarray:
        g = self.dft.conj().T @ self.dft
        g.setflags(write=False)
        return g


def default_pilot_set(channel_length: int = 8) -> PilotSet:
    """114 pilots on a 128-point grid: {-58..-2} and {+2..+58}, DC excluded."""
    idx = [q for q in range(-58, 59) if abs(q) >= 2]
    return PilotSet(dft_size=128, pilot_indices=tuple(idx), channel_length=channel_length)


def default_tap_profile(n_channels: int, channel_length: int) -> np.ndarray:
    """Exponential power delay profile per channel, normalized to unit power."""
    p = np.exp(-0.5 * np.arange(channel_length, dtype=float))
    p /= p.sum()
    return np.tile(p, (n_channels, 1))


@dataclass(frozen=True)
class PhaseDistortion:
    """Per-packet phase errors: slope (rad per subcarrier index) and offset (rad)."""

    slope: float
    offset: float
    slope_support: tuple = (-0.2, 0.2)
    offset_support: tuple = (-np.pi, np.pi)

    def __post_init__(self):
        object.__setattr__(self, "slope", float(self.slope))
        object.__setattr__(self, "offset", wrap_angle(float(self.offset)))
        object.__setattr__(self, "slope_support", tuple(map(float, self.slope_support)))
        object.__setattr__(self, "offset_support", tuple(map(float, self.offset_support)))
        lo, hi = self.slope_support
        if not lo <= self.slope <= hi:
            raise ValueError(f"slope {self.slope} outside its support [{lo}, {hi}]")
        olo, ohi = self.offset_support
        # The canonical representative may sit one turn away from a narrow
        # support; accept any 2*pi-equivalent inside it.
        if not (olo - 1e-12 <= self.offset <= ohi + 1e-12 or
                olo - 1e-12 <= self.offset + 2 * np.pi <= ohi + 1e-12 or
                olo - 1e-12 <= self.offset - 2 * np.pi <= ohi + 1e-12):
            raise ValueError(f"offset {self.offset} outside its support [{olo}, {ohi}]")

    def negated(self) -> "PhaseDistortion":
        sl, sh = self.slope_support
        return PhaseDistortion(-self.slope, -self.offset, (-sh, -sl), self.offset_support)


def _as_per_tap(noise_vars, n_channels: int, channel_length: int) -> np.ndarray:
    """Normalize process-noise input to an (N, L) per-tap variance array.

    Accepts a scalar, an (N,) per-channel vector (variance sigma_v^2 * I_L)
    or a full (N, L) array.
    """
    v = np.asarray(noise_vars, dtype=float)
    if v.ndim == 0:
        v = np.full((n_channels, channel_length), float(v))
    elif v.ndim == 1:
        if v.shape[0] != n_channels:
            raise ValueError("per-channel noise vector length must equal N")
        v = np.repeat(v[:, None], channel_length, axis=1)
    elif v.shape != (n_channels, channel_length):
        raise ValueError("process noise must be scalar, (N,) or (N, L)")
    if np.any(v < 0):
        raise ValueError("process noise variances must be nonnegative")
    return v


@dataclass(frozen=True)
class ChannelState:
    """Time-domain MIMO channel (L x N) with its AR(1) statistics."""

    taps: np.ndarray
    alpha: float
    process_noise_vars: np.ndarray
    tap_power_profile: np.ndarray

    def __post_init__(self):
        taps = np.asarray(self.taps, dtype=complex)
        if taps.ndim != 2:
            raise ValueError("taps must be an L x N matrix")
        L, N = taps.shape
        profile = np.asarray(self.tap_power_profile, dtype=float)
        if profile.shape != (N, L):
            raise ValueError(f"tap_power_profile must have shape (N, L)=({N}, {L})")
        if np.any(profile < 0):
            raise ValueError("tap powers must be nonnegative")
        sums = profile.sum(axis=1)
        if np.any(np.abs(sums - 1.0) > 1e-12):
            raise ValueError("each channel's tap powers must sum to 1 (within 1e-12)")
        if not 0.0 < self.alpha <= 1.0:
            raise ValueError("alpha must lie in (0, 1]")
        object.__setattr__(self, "taps", taps)
        object.__setattr__(self, "tap_power_profile", profile)
        object.__setattr__(
            self, "process_noise_vars", _as_per_tap(self.process_noise_vars, N, L)
        )

    @property
    def n_taps(self) -> int:
        return self.taps.shape[0]

    @property
    def n_channels(self) -> int:
        return self.taps.shape[1]


def stationary_process_noise(alpha: float, tap_power_profile: np.ndarray) -> np.ndarray:
    """Per-tap AR(1) process-noise variances that keep tap powers stationary."""
    return (1.0 - alpha ** 2) * np.asarray(tap_power_profile, dtype=float)


@dataclass(frozen=True)
class Observation:
    """Observed Q x N CSI matrix for one packet."""

    csi: np.ndarray
    noise_var: float
    packet_index: int = 0

    def __post_init__(self):
        csi = np.asarray(self.csi, dtype=complex)
        if csi.ndim != 2:
            raise ValueError("csi must be a Q x N matrix")
        if self.noise_var <= 0:
            raise ValueError("noise_var must be positive")
        if self.packet_index < 0:
            raise ValueError("packet_index must be nonnegative")
        object.__setattr__(self, "csi", csi)

    @property
    def n_pilots(self) -> int:
        return self.csi.shape[0]

    @property
    def n_channels(self) -> int:
        return self.csi.shape[1]


@dataclass(frozen=True)
class FilterState:
    """Channel estimate with per-channel L x L error covariances.

    ``packet_index`` is -1 for the freshly initialized state and equals the
    index of the last absorbed observation afterwards.
    """

    estimate: np.ndarray
    covariances: np.ndarray
    phase: PhaseDistortion | None = None
    packet_index: int = -1

    def __post_init__(self):
        est = np.asarray(self.estimate, dtype=complex)
        cov = np.asarray(self.covariances, dtype=complex)
        if est.ndim != 2:
            raise ValueError("estimate must be an L x N matrix")
        L, N = est.shape
        if cov.shape != (N, L, L):
            raise ValueError(f"covariances must have shape (N, L, L)=({N}, {L}, {L})")
        object.__setattr__(self, "estimate", est)
        object.__setattr__(self, "covariances", cov)

    @property
    def n_taps(self) -> int:
        return self.estimate.shape[0]

    @property
    def n_channels(self) -> int:
        return self.estimate.shape[1]

    def validate(self, herm_tol: float = 1e-10, eig_tol: float = -1e-10):
        """Check the Hermitian-PSD covariance invariants; raise on violation."""
        for i, p in enumerate(self.covariances):
            herm_err = np.max(np.abs(p - p.conj().T))
            if herm_err > herm_tol:
                raise ValueError(f"covariance {i} not Hermitian (deviation {herm_err:.3e})")
            eigmin = float(np.min(np.linalg.eigvalsh(0.5 * (p + p.conj().T))))
            if eigmin < eig_tol:
                raise ValueError(f"covariance {i} not PSD (min eigenvalue {eigmin:.3e})")
        return self


def dft_matrix(pilots: PilotSet) -> np.ndarray:
    """Q x L DFT matrix with entry (m, l) = exp(-2j*pi*q_m*l / M)."""
    return pilots.dft.copy()


def apply_distortion(clean_freq_csi: np.ndarray, d: PhaseDistortion,
                     pilots: PilotSet) -> np.ndarray:
    """Rotate row m of a Q x N frequency-domain CSI matrix by offset + slope*q_m."""
    x = np.asarray(clean_freq_csi, dtype=complex)
    if x.shape[0] != pilots.n_pilots:
        raise ValueError(
            f"CSI has {x.shape[0]} rows but the pilot set defines {pilots.n_pilots}"
        )
    phase = d.offset + d.slope * pilots.indices.astype(float)
    return np.exp(1j * phase)[:, None] * x


def ar1_step(state: ChannelState, noise_draw: np.ndarray | None = None) -> ChannelState:
    """One AR(1) transition: taps become alpha*taps + noise_draw."""
    if noise_draw is None:
        new_taps = state.alpha * state.taps
    else:
        noise = np.asarray(noise_draw, dtype=complex)
        if noise.shape != state.taps.shape:
            raise ValueError(
                f"noise draw shape {noise.shape} does not match taps {state.taps.shape}"
            )
        new_taps = state.alpha * state.taps + noise
    return replace(state, taps=new_taps)


def observe(state: ChannelState, d: PhaseDistortion, noise_var: float,
            pilots: PilotSet, noise_draw: np.ndarray | None = None,
            packet_index: int = 0) -> Observation:
    """Form the distorted, noisy frequency-domain observation of a channel."""
    if noise_var < 0:
        raise ValueError("noise_var must be nonnegative")
    if state.n_taps != pilots.channel_length:
        raise ValueError(
            f"channel has {state.n_taps} taps but the pilot set defines "
            f"{pilots.channel_length}"
        )
    clean = pilots.dft @ state.taps
    csi = apply_distortion(clean, d, pilots)
    if noise_draw is not None:
        noise = np.asarray(noise_draw, dtype=complex)
        if noise.shape != csi.shape:
            raise ValueError(
                f"noise draw shape {noise.shape} does not match csi {csi.shape}"
            )
        csi = csi + noise
    # Observation demands a positive variance (the zero-noise case is for
    # deterministic tests); keep it representable.
    return Observation(csi=csi, noise_var=max(noise_var, np.finfo(float).tiny),
                       packet_index=packet_index)
