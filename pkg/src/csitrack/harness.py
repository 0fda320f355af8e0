"""Experiment orchestration: Monte Carlo runs, CSI-recording ingestion and
processing, metric tables and fixture generation.

Monte Carlo trials are independent work items; each trial simulates one
full-size trace and evaluates every antenna subset and method on it, so
setup comparisons share channel randomness.  Results are merged in trial
order, which makes the output independent of the worker-pool size.
"""

from __future__ import annotations

import csv
import json
import logging
import math
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field, replace, asdict

import numpy as np

from .baseline import linreg_sanitize
from .crlb import PhaseCrlbInput, crlb_filter_trace, crlb_phase
from .estimator import EstimatorConfig, MapSolution, init_filter, oracle_step, step
from .model import (
    Observation,
    PhaseDistortion,
    PilotSet,
    default_pilot_set,
    draw_complex_gaussian,
    snr_db_to_noise_var,
    stationary_process_noise,
    wrap_angle,
)
from .simulate import SimConfig, SimTrace, derive_seed, simulate, subset_trace

logger = logging.getLogger(__name__)

__all__ = [
    "ExperimentSpec",
    "MetricRow",
    "MetricTable",
    "CsiParseError",
    "run_experiment",
    "write_experiment_outputs",
    "ingest_csi",
    "export_observations_csv",
    "ProcessedPacket",
    "process_recording",
    "write_processing_csv",
    "make_rotating_fixture",
    "make_static_fixture",
]

VALID_METHODS = ("kalman_map", "linreg", "oracle_kf")

CSV_HEADER = ["packet", "tx", "rx", "pilot_index", "re", "im"]


class CsiParseError(Exception):
    """Malformed or inconsistent CSI recording; carries the offending line."""

    def __init__(self, message: str, line: int | None = None):
        self.line = line
        super().__init__(f"line {line}: {message}" if line is not None else message)


# ---------------------------------------------------------------------------
# Experiment specification and metric table
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class ExperimentSpec:
    """Full description of one Monte Carlo experiment."""

    sim: SimConfig
    estimator: EstimatorConfig | None = None  # template; statistics filled per cell
    n_trials: int = 200
    snr_sweep_db: tuple = (10.0, 20.0, 30.0)
    antenna_setups: tuple = ((3, 3), (2, 2), (1, 3))
    methods: tuple = ("kalman_map", "linreg", "oracle_kf")
    output_dir: str = "results"
    parallelism: int | None = None  # None -> auto

    def __post_init__(self):
        if self.n_trials < 1:
            raise ValueError("n_trials must be >= 1")
        object.__setattr__(self, "snr_sweep_db", tuple(float(s) for s in self.snr_sweep_db))
        setups = tuple((int(a), int(b)) for a, b in self.antenna_setups)
        object.__setattr__(self, "antenna_setups", setups)
        for n_tx, n_rx in setups:
            if n_tx * n_rx < 1:
                raise ValueError("every antenna setup needs at least one channel")
            if n_tx > self.sim.n_tx or n_rx > self.sim.n_rx:
                raise ValueError(
                    f"setup {n_tx}x{n_rx} does not fit in the generated "
                    f"{self.sim.n_tx}x{self.sim.n_rx} trace"
                )
        methods = tuple(self.methods)
        for m in methods:
            if m not in VALID_METHODS:
                raise ValueError(f"unknown method {m!r}; choose from {VALID_METHODS}")
        object.__setattr__(self, "methods", methods)

    def resolved_parallelism(self) -> int:
        if self.parallelism and self.parallelism > 0:
            return int(self.parallelism)
        return max(1, min(os.cpu_count() or 1, 8))


@dataclass(frozen=True)
class MetricRow:
    method: str
    snr_db: float
    setup: str
    packet_index: int
    mse_channel: float
    mse_omega: float
    crlb_channel: float
    crlb_omega: float
    n_trials: int
    mse_channel_se: float
    mse_omega_se: float
    cum_mse_omega: float
    boundary_frac: float


@dataclass
class MetricTable:
    rows: list = field(default_factory=list)

    def select(self, **criteria) -> list:
        out = []
        for row in self.rows:
            if all(getattr(row, k) == v for k, v in criteria.items()):
                out.append(row)
        return out

    def get(self, **criteria) -> MetricRow:
        rows = self.select(**criteria)
        if len(rows) != 1:
            raise KeyError(f"{len(rows)} rows match {criteria}")
        return rows[0]

    def to_csv(self, path):
        fields = [f for f in MetricRow.__dataclass_fields__]
        with open(path, "w", newline="") as fh:
            writer = csv.writer(fh, lineterminator="\n")
            writer.writerow(fields)
            for row in self.rows:
                writer.writerow([_fmt(getattr(row, f)) for f in fields])


def _fmt(v):
    if isinstance(v, float):
        if math.isnan(v):
            return ""
        return repr(v)
    return v


def setup_name(setup) -> str:
    return f"{setup[0]}x{setup[1]}"


# ---------------------------------------------------------------------------
# Monte Carlo runner
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class _TrialTask:
    sim: SimConfig
    setups: tuple
    methods: tuple
    est_cfgs: tuple


def _estimator_cfg_for(spec: ExperimentSpec, snr_db: float, setup) -> EstimatorConfig:
    """Estimator statistics for one cell: true values of the simulated system."""
    sim = spec.sim
    cols = [tx * sim.n_rx + rx for tx in range(setup[0]) for rx in range(setup[1])]
    profile = np.asarray(sim.tap_power_profile)[cols]
    template = spec.estimator
    kwargs = dict(
        alpha=sim.alpha,
        process_noise_vars=stationary_process_noise(sim.alpha, profile),
        noise_var=snr_db_to_noise_var(snr_db),
        slope_support=sim.slope_support,
        offset_support=sim.offset_support,
    )
    if template is not None:
        kwargs.update(
            newton_max_iters=template.newton_max_iters,
            newton_tol=template.newton_tol,
            n_intervals=template.n_intervals,
            gamma_diag_covariance=template.gamma_diag_covariance,
        )
    return EstimatorConfig(**kwargs)


def _run_method(method: str, trace: SimTrace, cfg: EstimatorConfig,
                pilots: PilotSet):
    """Per-packet squared errors of one method on one trace.

    Returns (err_channel, err_omega, boundary_hit) arrays of length n_packets;
    undefined metrics are NaN.
    """
    n_packets = trace.n_packets
    err_h = np.full(n_packets, np.nan)
    err_w = np.full(n_packets, np.nan)
    boundary = np.zeros(n_packets)
    slope_lo, slope_hi = cfg.slope_support

    if method == "linreg":
        for k, obs in enumerate(trace.observations):
            res = linreg_sanitize(obs, pilots)
            d = trace.true_distortions[k]
            err_w[k] = ((res.slope - d.slope) ** 2
                        + wrap_angle(res.intercept - d.offset) ** 2)
        return err_h, err_w, boundary

    n_channels = trace.observations[0].n_channels
    state = init_filter(cfg, pilots, n_channels)
    for k, obs in enumerate(trace.observations):
        d = trace.true_distortions[k]
        if method == "kalman_map":
            state, sol = step(obs, state, cfg, pilots)
            ds = sol.distortion
            err_w[k] = ((ds.slope - d.slope) ** 2
                        + wrap_angle(ds.offset - d.offset) ** 2)
            boundary[k] = float(ds.slope <= slope_lo + 1e-9
                                or ds.slope >= slope_hi - 1e-9)
        elif method == "oracle_kf":
            state = oracle_step(obs, state, cfg, pilots, d)
        else:
            raise ValueError(f"unknown method {method!r}")
        diff = state.estimate - trace.true_channels[k].taps
        err_h[k] = float(np.vdot(diff, diff).real)
    return err_h, err_w, boundary


def _run_trial(task: _TrialTask) -> dict:
    trace = simulate(task.sim)
    out = {}
    for setup, cfg in zip(task.setups, task.est_cfgs):
        sub = subset_trace(trace, setup[0], setup[1], task.sim.n_tx, task.sim.n_rx)
        for method in task.methods:
            out[(setup, method)] = _run_method(method, sub, cfg, task.sim.pilots)
    return out


def run_experiment(spec: ExperimentSpec) -> MetricTable:
    """Average per-packet squared errors over trials for every cell.

    Deterministic given the spec: per-trial seeds derive from the root seed
    and results are reduced in trial order regardless of parallelism.
    """
    sim = spec.sim
    pilots = sim.pilots
    n_packets = sim.n_packets
    workers = spec.resolved_parallelism()

    table = MetricTable()
    for si, snr_db in enumerate(spec.snr_sweep_db):
        est_cfgs = tuple(_estimator_cfg_for(spec, snr_db, s) for s in spec.antenna_setups)
        tasks = [
            _TrialTask(
                sim=replace(sim, snr_db=snr_db, seed=derive_seed(sim.seed, si, trial)),
                setups=spec.antenna_setups,
                methods=spec.methods,
                est_cfgs=est_cfgs,
            )
            for trial in range(spec.n_trials)
        ]

        acc = {
            key: [np.zeros(n_packets), np.zeros(n_packets),  # sum, sumsq err_h
                  np.zeros(n_packets), np.zeros(n_packets),  # sum, sumsq err_w
                  np.zeros(n_packets)]                       # boundary hits
            for key in ((s, m) for s in spec.antenna_setups for m in spec.methods)
        }
        if workers > 1 and spec.n_trials > 1:
            with ProcessPoolExecutor(max_workers=workers) as pool:
                results = pool.map(_run_trial, tasks, chunksize=max(1, len(tasks) // (4 * workers)))
                for res in results:
                    _accumulate(acc, res)
        else:
            for task in tasks:
                _accumulate(acc, _run_trial(task))

        # Bound columns: data-independent, evaluated at the true statistics
        # of the first trial's distortion sequence.
        ref_distortions = simulate(
            replace(sim, snr_db=snr_db, seed=derive_seed(sim.seed, si, 0))
        ).true_distortions
        noise_var = snr_db_to_noise_var(snr_db)
        for setup, cfg in zip(spec.antenna_setups, est_cfgs):
            cols = [tx * sim.n_rx + rx for tx in range(setup[0]) for rx in range(setup[1])]
            profile = np.asarray(sim.tap_power_profile)[cols]
            bound_trace = crlb_filter_trace(
                pilots, sim.alpha, cfg.process_noise_vars, noise_var,
                ref_distortions, n_packets, n_channels=len(cols),
            ).scalar_bound_per_packet
            covs = np.zeros((len(cols), pilots.channel_length, pilots.channel_length),
                            dtype=complex)
            covs[:, np.arange(pilots.channel_length), np.arange(pilots.channel_length)] = profile
            bound_omega = crlb_phase(PhaseCrlbInput(pilots, covs, noise_var))

            for method in spec.methods:
                sum_h, sq_h, sum_w, sq_w, nb = acc[(setup, method)]
                n = spec.n_trials
                mse_h = sum_h / n
                mse_w = sum_w / n
                se_h = _stderr(sum_h, sq_h, n)
                se_w = _stderr(sum_w, sq_w, n)
                cum_w = np.cumsum(mse_w) / np.arange(1, n_packets + 1)
                for k in range(n_packets):
                    table.rows.append(MetricRow(
                        method=method,
                        snr_db=snr_db,
                        setup=setup_name(setup),
                        packet_index=k,
                        mse_channel=float(mse_h[k]),
                        mse_omega=float(mse_w[k]),
                        crlb_channel=float(bound_trace[k]),
                        crlb_omega=float(bound_omega),
                        n_trials=n,
                        mse_channel_se=float(se_h[k]),
                        mse_omega_se=float(se_w[k]),
                        cum_mse_omega=float(cum_w[k]),
                        boundary_frac=float(nb[k] / n),
                    ))
    return table


def _accumulate(acc, res):
    for key, (err_h, err_w, boundary) in res.items():
        sum_h, sq_h, sum_w, sq_w, nb = acc[key]
        sum_h += err_h
        sq_h += err_h ** 2
        sum_w += err_w
        sq_w += err_w ** 2
        nb += boundary


def _stderr(total, total_sq, n):
    if n < 2:
        return np.full_like(np.asarray(total, dtype=float), np.nan)
    mean = total / n
    var = np.maximum(total_sq - n * mean ** 2, 0.0) / (n - 1)
    return np.sqrt(var / n)


def spec_to_manifest(spec: ExperimentSpec) -> dict:
    d = asdict(spec)
    d["sim"]["tap_power_profile"] = np.asarray(spec.sim.tap_power_profile).tolist()
    d["sim"]["pilots"] = {
        "dft_size": spec.sim.pilots.dft_size,
        "pilot_indices": list(spec.sim.pilots.pilot_indices),
        "channel_length": spec.sim.pilots.channel_length,
    }
    if spec.estimator is not None:
        pv = d["estimator"]["process_noise_vars"]
        if isinstance(pv, np.ndarray):
            d["estimator"]["process_noise_vars"] = pv.tolist()
    return d


def write_experiment_outputs(spec: ExperimentSpec, table: MetricTable,
                             out_dir: str | None = None) -> dict:
    """Write metrics.csv, the per-figure views and the run manifest."""
    out_dir = out_dir or spec.output_dir
    os.makedirs(out_dir, exist_ok=True)
    paths = {"metrics": os.path.join(out_dir, "metrics.csv")}
    table.to_csv(paths["metrics"])

    views = {
        "fig1a": [r for r in table.rows
                  if r.setup == "3x3" and r.snr_db == 20.0
                  and r.method in ("kalman_map", "oracle_kf")],
        "fig1b": [r for r in table.rows
                  if r.setup == "3x3" and r.packet_index in (9, 99)
                  and r.method in ("kalman_map", "linreg")],
        "fig1c": [r for r in table.rows
                  if r.snr_db == 20.0 and r.packet_index in (9, 99)
                  and r.method == "kalman_map"],
    }
    for name, rows in views.items():
        path = os.path.join(out_dir, f"{name}.csv")
        MetricTable(rows).to_csv(path)
        paths[name] = path

    manifest = os.path.join(out_dir, "manifest.json")
    with open(manifest, "w") as fh:
        json.dump(spec_to_manifest(spec), fh, indent=2, default=str)
    paths["manifest"] = manifest
    return paths


# ---------------------------------------------------------------------------
# Recording ingestion and export
# ---------------------------------------------------------------------------

def export_observations_csv(observations, pilots: PilotSet, n_tx: int, n_rx: int,
                            path):
    """Textual dump of observations: packet, tx, rx, pilot_index, re, im."""
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(CSV_HEADER)
        for obs in observations:
            for tx in range(n_tx):
                for rx in range(n_rx):
                    col = tx * n_rx + rx
                    for m, q in enumerate(pilots.pilot_indices):
                        v = obs.csi[m, col]
                        writer.writerow([obs.packet_index, tx, rx, q,
                                         repr(float(v.real)), repr(float(v.imag))])


def ingest_csi(path, pilots: PilotSet, format_id: str = "csv",
               noise_var: float = 1.0) -> list:
    """Parse a CSI recording into per-packet observations.

    Packets with missing subcarriers are rejected with a logged reason;
    malformed rows, unknown pilot indices, inconsistent antenna grids and
    non-monotone packet indices raise :class:`CsiParseError`.
    """
    if format_id not in ("csv", "csv-v1"):
        raise ValueError(f"unknown recording format {format_id!r}")
    pilot_pos = {q: m for m, q in enumerate(pilots.pilot_indices)}

    entries = []  # (line, packet, tx, rx, q, value)
    with open(path, newline="") as fh:
        reader = csv.reader(fh)
        try:
            header = next(reader)
        except StopIteration:
            raise CsiParseError("empty file: missing header row", line=1)
        if [h.strip() for h in header] != CSV_HEADER:
            raise CsiParseError(f"expected header {','.join(CSV_HEADER)}", line=1)
        last_packet = None
        for lineno, row in enumerate(reader, start=2):
            if not row:
                continue
            if len(row) != 6:
                raise CsiParseError(f"expected 6 fields, got {len(row)}", line=lineno)
            try:
                packet = int(row[0])
                tx = int(row[1])
                rx = int(row[2])
                q = int(row[3])
                value = complex(float(row[4]), float(row[5]))
            except ValueError as exc:
                raise CsiParseError(f"malformed row ({exc})", line=lineno)
            if packet < 0 or tx < 0 or rx < 0:
                raise CsiParseError("negative packet or antenna index", line=lineno)
            if q not in pilot_pos:
                raise CsiParseError(f"pilot index {q} not in the configured set",
                                    line=lineno)
            if last_packet is not None and packet < last_packet:
                raise CsiParseError(
                    f"non-monotone packet index {packet} after {last_packet}",
                    line=lineno)
            last_packet = packet
            entries.append((lineno, packet, tx, rx, q, value))

    if not entries:
        logger.warning("%s: no data rows; returning an empty sequence", path)
        return []

    n_tx = max(e[2] for e in entries) + 1
    n_rx = max(e[3] for e in entries) + 1
    n_channels = n_tx * n_rx
    Q = pilots.n_pilots

    observations = []
    packet_ids = []
    for e in entries:
        if not packet_ids or e[1] != packet_ids[-1]:
            packet_ids.append(e[1])
    by_packet = {p: [] for p in packet_ids}
    for e in entries:
        by_packet[e[1]].append(e)

    for packet in packet_ids:
        group = by_packet[packet]
        first_line = group[0][0]
        pairs = {(tx, rx) for _, _, tx, rx, _, _ in group}
        expected_pairs = {(tx, rx) for tx in range(n_tx) for rx in range(n_rx)}
        if pairs != expected_pairs:
            raise CsiParseError(
                f"packet {packet} covers antenna pairs {sorted(pairs)} but the "
                f"recording implies a {n_tx}x{n_rx} grid", line=first_line)
        csi = np.zeros((Q, n_channels), dtype=complex)
        seen = np.zeros((Q, n_channels), dtype=bool)
        duplicate = False
        for line, _, tx, rx, q, value in group:
            m = pilot_pos[q]
            col = tx * n_rx + rx
            if seen[m, col]:
                raise CsiParseError(
                    f"duplicate entry for packet {packet}, tx {tx}, rx {rx}, "
                    f"pilot {q}", line=line)
            seen[m, col] = True
            csi[m, col] = value
        if not seen.all():
            missing = int(Q * n_channels - seen.sum())
            logger.warning(
                "packet %d rejected: %d missing subcarrier entries", packet, missing)
            continue
        observations.append(Observation(csi=csi, noise_var=noise_var,
                                        packet_index=packet))
    return observations


# ---------------------------------------------------------------------------
# Recording processing
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class ProcessedPacket:
    packet_index: int       # index as recorded in the source
    slope: float
    offset: float
    recovered: np.ndarray   # Q x N, C @ updated channel estimate
    raw: np.ndarray         # Q x N, observation as ingested


def process_recording(source, estimator_cfg: EstimatorConfig, pilots: PilotSet,
                      noise_var: float | None = None) -> list:
    """Run the filter over a recording and emit plot-ready per-packet records.

    ``source`` is a path to a recording CSV or a sequence of observations.
    Gaps in the recorded packet numbering are tolerated: the filter treats
    the surviving packets as consecutive (the original index is reported).
    """
    if isinstance(source, (str, os.PathLike)):
        observations = ingest_csi(source, pilots,
                                  noise_var=noise_var or estimator_cfg.noise_var)
    else:
        observations = list(source)
    if not observations:
        return []

    n_channels = observations[0].n_channels
    state = init_filter(estimator_cfg, pilots, n_channels)
    records = []
    for j, obs in enumerate(observations):
        if obs.packet_index != j:
            obs = Observation(csi=obs.csi, noise_var=obs.noise_var, packet_index=j)
        state, sol = step(obs, state, estimator_cfg, pilots)
        records.append(ProcessedPacket(
            packet_index=observations[j].packet_index,
            slope=sol.distortion.slope,
            offset=sol.distortion.offset,
            recovered=pilots.dft @ state.estimate,
            raw=observations[j].csi,
        ))
    return records


def write_processing_csv(records, pilots: PilotSet, n_tx: int, n_rx: int, path):
    header = ["packet", "tx", "rx", "pilot_index", "slope_hat", "offset_hat",
              "recovered_mag", "recovered_phase", "raw_mag", "raw_phase"]
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(header)
        for rec in records:
            for tx in range(n_tx):
                for rx in range(n_rx):
                    col = tx * n_rx + rx
                    for m, q in enumerate(pilots.pilot_indices):
                        rv = rec.recovered[m, col]
                        ov = rec.raw[m, col]
                        writer.writerow([
                            rec.packet_index, tx, rx, q,
                            repr(rec.slope), repr(rec.offset),
                            repr(float(np.abs(rv))), repr(float(np.angle(rv))),
                            repr(float(np.abs(ov))), repr(float(np.angle(ov))),
                        ])


# ---------------------------------------------------------------------------
# Synthetic recording fixtures
# ---------------------------------------------------------------------------

_STATIC_TAP_AMPLITUDES = (1.2, 0.35, 0.25, 0.15, 0.10, 0.07, 0.05, 0.05)


def _fixture_channel(pilots: PilotSet, n_channels: int) -> np.ndarray:
    """Deterministic static multipath occupying every tap (L x N)."""
    L = pilots.channel_length
    amps = np.array(_STATIC_TAP_AMPLITUDES[:L])
    if amps.size < L:
        amps = np.concatenate([amps, np.full(L - amps.size, 0.05)])
    taps = amps * np.exp(0.4j * np.arange(L))
    return np.repeat(taps[:, None], n_channels, axis=1)


def make_rotating_fixture(path=None, pilots: PilotSet | None = None,
                          n_packets: int = 192, period: int = 32,
                          snr_db: float = 40.0, seed: int = 7,
                          n_tx: int = 3, n_rx: int = 3,
                          rot_amplitude: float = 0.45,
                          slope_range: float = 0.2):
    """Synthetic stand-in for the rotating-reflector measurement.

    A static multipath channel plus one tap whose gain rotates with the
    given period, observed through fresh random phase distortions and
    noise each packet.  Returns ``(observations, meta)`` and optionally
    writes the recording CSV.
    """
    pilots = pilots or default_pilot_set()
    rng = np.random.default_rng(seed)
    n_channels = n_tx * n_rx
    noise_var = snr_db_to_noise_var(snr_db)
    static = _fixture_channel(pilots, n_channels)
    chan_phase = 2.0 * np.pi * np.arange(n_channels) / max(n_channels, 1)

    observations = []
    for k in range(n_packets):
        taps = static.copy()
        theta = 2.0 * np.pi * k / period + chan_phase
        taps[1, :] += rot_amplitude * np.exp(1j * theta)
        clean = pilots.dft @ taps
        d = PhaseDistortion(
            rng.uniform(-slope_range, slope_range),
            rng.uniform(-np.pi, np.pi),
            (-slope_range, slope_range),
        )
        q = pilots.indices.astype(float)
        csi = (np.exp(1j * (d.offset + d.slope * q))[:, None] * clean
               + draw_complex_gaussian(rng, clean.shape, noise_var))
        observations.append(Observation(csi=csi, noise_var=noise_var, packet_index=k))

    meta = {
        "n_packets": n_packets,
        "period": period,
        "snr_db": snr_db,
        "noise_var": noise_var,
        "n_tx": n_tx,
        "n_rx": n_rx,
        "test_tx": 0,
        "test_rx": 0,
        "test_pilot_index": 2,
        "estimator": {"alpha": 1.0, "process_noise_vars": 0.01,
                      "noise_var": noise_var},
    }
    if path is not None:
        export_observations_csv(observations, pilots, n_tx, n_rx, path)
        meta["path"] = str(path)
    return observations, meta


def make_static_fixture(path=None, pilots: PilotSet | None = None,
                        n_packets: int = 60, snr_db: float = 30.0,
                        seed: int = 11, n_tx: int = 3, n_rx: int = 3):
    """Zero-distortion recording of a static channel (null-case fixture)."""
    pilots = pilots or default_pilot_set()
    rng = np.random.default_rng(seed)
    n_channels = n_tx * n_rx
    noise_var = snr_db_to_noise_var(snr_db)
    taps = _fixture_channel(pilots, n_channels)
    clean = pilots.dft @ taps

    observations = []
    for k in range(n_packets):
        csi = clean + draw_complex_gaussian(rng, clean.shape, noise_var)
        observations.append(Observation(csi=csi, noise_var=noise_var, packet_index=k))
    meta = {
        "n_packets": n_packets,
        "snr_db": snr_db,
        "noise_var": noise_var,
        "n_tx": n_tx,
        "n_rx": n_rx,
        "estimator": {"alpha": 1.0, "process_noise_vars": 1e-4,
                      "noise_var": noise_var},
    }
    if path is not None:
        export_observations_csv(observations, pilots, n_tx, n_rx, path)
        meta["path"] = str(path)
    return observations, meta
