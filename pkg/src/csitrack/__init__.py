"""Recovery of MIMO WiFi channel state information from phase-distorted,
noisy observations.

The filter tracks the time-domain channel with a Kalman recursion and fits
the per-packet phase slope/offset errors by MAP estimation; closed-form and
recursive Cramér–Rao bounds plus a Monte Carlo harness validate estimator
quality against the linear-regression baseline.
"""

from ._backend import BACKEND, available_backends
from .baseline import RegressionResult, linreg_sanitize
from .crlb import (
    CrlbTrace,
    PhaseCrlbInput,
    UnidentifiableConfiguration,
    crlb_filter_trace,
    crlb_phase,
    fisher_matrix,
)
from .estimator import (
    EstimatorConfig,
    MapSolution,
    closed_form_offset,
    estimate_distortion,
    init_filter,
    nll,
    oracle_step,
    predict,
    step,
    update,
)
from .harness import (
    CsiParseError,
    ExperimentSpec,
    MetricRow,
    MetricTable,
    ingest_csi,
    make_rotating_fixture,
    make_static_fixture,
    process_recording,
    run_experiment,
    write_experiment_outputs,
)
from .model import (
    ChannelState,
    DEFAULT_ALPHA,
    FilterState,
    Observation,
    PhaseDistortion,
    PilotSet,
    apply_distortion,
    ar1_step,
    default_pilot_set,
    default_tap_profile,
    dft_matrix,
    observe,
    snr_db_to_noise_var,
    stationary_process_noise,
    wrap_angle,
)
from .simulate import SimConfig, SimTrace, draw_distortion, draw_initial_channel, simulate, subset_trace

__version__ = "0.1.0"
