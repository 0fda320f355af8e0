"""Monte Carlo trace generation: ground-truth channels, phase distortions and
noisy observations, fully determined by a single seed.

One root seed spawns labeled sub-streams (initial channel, process noise,
distortion, observation noise) so that ablations can hold one randomness
source fixed while varying another.
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace

import numpy as np

from .model import (
    ChannelState,
    Observation,
    PhaseDistortion,
    PilotSet,
    DEFAULT_ALPHA,
    ar1_step,
    default_pilot_set,
    default_tap_profile,
    draw_complex_gaussian,
    observe,
    snr_db_to_noise_var,
    stationary_process_noise,
)

__all__ = [
    "SimConfig",
    "SimTrace",
    "draw_initial_channel",
    "draw_distortion",
    "simulate",
    "subset_trace",
    "derive_seed",
]


@dataclass(frozen=True)
class SimConfig:
    """Scenario description for one Monte Carlo trace."""

    seed: int
    pilots: PilotSet = field(default_factory=default_pilot_set)
    n_tx: int = 3
    n_rx: int = 3
    alpha: float = DEFAULT_ALPHA
    snr_db: float = 20.0
    n_packets: int = 100
    slope_support: tuple = (-0.2, 0.2)
    offset_support: tuple = (-np.pi, np.pi)
    tap_power_profile: np.ndarray | None = None

    def __post_init__(self):
        if self.n_packets < 1:
            raise ValueError("n_packets must be >= 1")
        if self.n_tx < 1 or self.n_rx < 1:
            raise ValueError("antenna counts must be >= 1")
        lo, hi = self.slope_support
        if lo > hi:
            raise ValueError("slope_support must be a nonempty interval")
        # Slopes steeper than pi over the largest pilot gap alias across
        # neighbouring observed subcarriers and are not identifiable.
        bound = np.pi / self.pilots.max_adjacent_gap
        if lo < -bound - 1e-12 or hi > bound + 1e-12:
            raise ValueError(
                f"slope_support [{lo}, {hi}] exceeds the aliasing bound "
                f"+-{bound:.6f} for this pilot layout"
            )
        olo, ohi = self.offset_support
        if olo > ohi:
            raise ValueError("offset_support must be a nonempty interval")
        profile = self.tap_power_profile
        if profile is None:
            profile = default_tap_profile(self.n_channels, self.pilots.channel_length)
        else:
            profile = np.asarray(profile, dtype=float)
        object.__setattr__(self, "tap_power_profile", profile)

    @property
    def n_channels(self) -> int:
        return self.n_tx * self.n_rx

    @property
    def noise_var(self) -> float:
        return snr_db_to_noise_var(self.snr_db)

    @property
    def process_noise_vars(self) -> np.ndarray:
        return stationary_process_noise(self.alpha, self.tap_power_profile)


@dataclass(frozen=True)
class SimTrace:
    """Aligned per-packet sequences of truth and observations."""

    true_channels: tuple
    true_distortions: tuple
    observations: tuple

    def __post_init__(self):
        n = len(self.true_channels)
        if not (len(self.true_distortions) == len(self.observations) == n):
            raise ValueError("trace sequences must have identical lengths")

    @property
    def n_packets(self) -> int:
        return len(self.observations)


def derive_seed(root_seed: int, *key: int) -> int:
    """Stable per-work-item seed, independent of scheduling order."""
    ss = np.random.SeedSequence(entropy=int(root_seed), spawn_key=tuple(int(k) for k in key))
    return int(ss.generate_state(1, dtype=np.uint64)[0])


def draw_initial_channel(cfg: SimConfig, rng: np.random.Generator) -> ChannelState:
    """Tap (l, i) ~ CN(0, profile[i, l]); expected per-channel power is one."""
    var = cfg.tap_power_profile.T  # (L, N)
    taps = draw_complex_gaussian(rng, var.shape, var)
    return ChannelState(
        taps=taps,
        alpha=cfg.alpha,
        process_noise_vars=cfg.process_noise_vars,
        tap_power_profile=cfg.tap_power_profile,
    )


def draw_distortion(cfg: SimConfig, rng: np.random.Generator) -> PhaseDistortion:
    """Independent uniform slope/offset draw on the configured supports."""
    slope = rng.uniform(*cfg.slope_support)
    offset = rng.uniform(*cfg.offset_support)
    return PhaseDistortion(slope, offset, cfg.slope_support, cfg.offset_support)


def simulate(cfg: SimConfig) -> SimTrace:
    """Generate one deterministic trace of ``cfg.n_packets`` observed packets."""
    root = np.random.SeedSequence(int(cfg.seed))
    rng_channel, rng_process, rng_distortion, rng_noise = (
        np.random.default_rng(s) for s in root.spawn(4)
    )

    proc_var = cfg.process_noise_vars.T  # (L, N)
    state = draw_initial_channel(cfg, rng_channel)

    channels, distortions, observations = [], [], []
    for k in range(cfg.n_packets):
        if k > 0:
            noise = draw_complex_gaussian(rng_process, state.taps.shape, proc_var)
            state = ar1_step(state, noise)
        d = draw_distortion(cfg, rng_distortion)
        w = draw_complex_gaussian(rng_noise, (cfg.pilots.n_pilots, cfg.n_channels),
                                  cfg.noise_var)
        obs = observe(state, d, cfg.noise_var, cfg.pilots, noise_draw=w, packet_index=k)
        channels.append(state)
        distortions.append(d)
        observations.append(obs)
    return SimTrace(tuple(channels), tuple(distortions), tuple(observations))


def subset_trace(trace: SimTrace, n_tx: int, n_rx: int,
                 full_n_tx: int, full_n_rx: int) -> SimTrace:
    """Restrict a trace to the first n_tx x n_rx antennas.

    Channel columns are ordered tx-major (i = tx * n_rx + rx), so subsetting
    keeps the shared randomness of the full trace for paired comparisons.
    """
    if n_tx > full_n_tx or n_rx > full_n_rx:
        raise ValueError("subset setup does not fit inside the generated trace")
    cols = [tx * full_n_rx + rx for tx in range(n_tx) for rx in range(n_rx)]
    if n_tx == full_n_tx and n_rx == full_n_rx:
        return trace

    channels = []
    observations = []
    for state, obs in zip(trace.true_channels, trace.observations):
        channels.append(
            ChannelState(
                taps=state.taps[:, cols],
                alpha=state.alpha,
                process_noise_vars=state.process_noise_vars[cols],
                tap_power_profile=state.tap_power_profile[cols],
            )
        )
        observations.append(
            Observation(csi=obs.csi[:, cols], noise_var=obs.noise_var,
                        packet_index=obs.packet_index)
        )
    return SimTrace(tuple(channels), tuple(trace.true_distortions), tuple(observations))
