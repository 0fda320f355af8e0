"""Command-line front end.

Subcommands: ``simulate`` (dump a synthetic trace), ``run`` (Monte Carlo
experiment), ``crlb`` (bound tables), ``process`` (filter a recording) and
``export-fixture`` (write golden synthetic recordings).

Exit codes: 0 success, 1 usage error, 2 data/parse error, 3 numeric failure.
"""

from __future__ import annotations

import argparse
import json
import logging
import sys

import numpy as np

from .crlb import PhaseCrlbInput, UnidentifiableConfiguration, crlb_filter_trace, crlb_phase
from .estimator import EstimatorConfig
from .harness import (
    CsiParseError,
    ExperimentSpec,
    export_observations_csv,
    make_rotating_fixture,
    make_static_fixture,
    process_recording,
    run_experiment,
    write_experiment_outputs,
    write_processing_csv,
)
from .model import DEFAULT_ALPHA, PilotSet, default_pilot_set, snr_db_to_noise_var, \
    stationary_process_noise, default_tap_profile
from .simulate import SimConfig, simulate

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_DATA = 2
EXIT_NUMERIC = 3


class _Parser(argparse.ArgumentParser):
    # argparse exits with 2 on usage errors; the CLI contract wants 1.
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _parse_setups(text: str):
    setups = []
    for part in text.split(","):
        part = part.strip().lower()
        if not part:
            continue
        try:
            a, b = part.split("x")
            setups.append((int(a), int(b)))
        except ValueError:
            raise ValueError(f"bad antenna setup {part!r}; expected like '3x3'")
    if not setups:
        raise ValueError("no antenna setups given")
    return tuple(setups)


def _parse_floats(text: str):
    return tuple(float(x) for x in text.split(",") if x.strip())


def _pilots_from_dict(d: dict) -> PilotSet:
    return PilotSet(dft_size=int(d["dft_size"]),
                    pilot_indices=tuple(int(q) for q in d["pilot_indices"]),
                    channel_length=int(d["channel_length"]))


def _sim_from_dict(d: dict, seed_override) -> SimConfig:
    kwargs = dict(d)
    pilots = kwargs.pop("pilots", None)
    profile = kwargs.pop("tap_power_profile", None)
    if seed_override is not None:
        kwargs["seed"] = int(seed_override)
    if "seed" not in kwargs or kwargs["seed"] is None:
        raise ValueError("a seed is required (use --seed; no wall-clock seeding)")
    kwargs["slope_support"] = tuple(kwargs.get("slope_support", (-0.2, 0.2)))
    kwargs["offset_support"] = tuple(kwargs.get("offset_support", (-np.pi, np.pi)))
    return SimConfig(
        pilots=_pilots_from_dict(pilots) if pilots else default_pilot_set(),
        tap_power_profile=np.asarray(profile) if profile is not None else None,
        **kwargs,
    )


def _spec_from_args(args) -> ExperimentSpec:
    raw = {}
    if args.spec:
        with open(args.spec) as fh:
            raw = json.load(fh)

    sim_raw = dict(raw.get("sim", {}))
    for name in ("n_packets", "snr_db", "alpha"):
        v = getattr(args, name, None)
        if v is not None:
            sim_raw[name] = v
    sim = _sim_from_dict(sim_raw, args.seed)

    est = None
    if raw.get("estimator"):
        est = EstimatorConfig(**raw["estimator"])

    kwargs = dict(
        sim=sim,
        estimator=est,
        n_trials=raw.get("n_trials", 200),
        snr_sweep_db=tuple(raw.get("snr_sweep_db", (10.0, 20.0, 30.0))),
        antenna_setups=tuple(tuple(s) if not isinstance(s, str) else s
                             for s in raw.get("antenna_setups", ((3, 3), (2, 2), (1, 3)))),
        methods=tuple(raw.get("methods", ("kalman_map", "linreg", "oracle_kf"))),
        output_dir=raw.get("output_dir", "results"),
        parallelism=raw.get("parallelism"),
    )
    if any(isinstance(s, str) for s in kwargs["antenna_setups"]):
        kwargs["antenna_setups"] = _parse_setups(
            ",".join(s if isinstance(s, str) else f"{s[0]}x{s[1]}"
                     for s in kwargs["antenna_setups"]))
    if args.n_trials is not None:
        kwargs["n_trials"] = args.n_trials
    if args.snr_sweep_db is not None:
        kwargs["snr_sweep_db"] = _parse_floats(args.snr_sweep_db)
    if args.antenna_setups is not None:
        kwargs["antenna_setups"] = _parse_setups(args.antenna_setups)
    if args.methods is not None:
        kwargs["methods"] = tuple(m.strip() for m in args.methods.split(",") if m.strip())
    if args.output_dir is not None:
        kwargs["output_dir"] = args.output_dir
    if args.parallelism is not None:
        kwargs["parallelism"] = args.parallelism
    return ExperimentSpec(**kwargs)


def _estimator_from_args(args, n_channels: int, pilots: PilotSet) -> EstimatorConfig:
    noise_var = snr_db_to_noise_var(args.snr_db)
    if args.process_noise_var is not None:
        proc = float(args.process_noise_var)
    else:
        profile = default_tap_profile(n_channels, pilots.channel_length)
        proc = stationary_process_noise(args.alpha, profile)
    return EstimatorConfig(alpha=args.alpha, process_noise_vars=proc,
                           noise_var=noise_var,
                           slope_support=(-args.slope_range, args.slope_range))


def _cmd_simulate(args) -> int:
    cfg = SimConfig(seed=args.seed, n_tx=args.n_tx, n_rx=args.n_rx,
                    alpha=args.alpha, snr_db=args.snr_db,
                    n_packets=args.n_packets)
    trace = simulate(cfg)
    export_observations_csv(trace.observations, cfg.pilots, cfg.n_tx, cfg.n_rx,
                            args.out)
    print(f"wrote {cfg.n_packets} packets to {args.out}")
    return EXIT_OK


def _cmd_run(args) -> int:
    spec = _spec_from_args(args)
    table = run_experiment(spec)
    paths = write_experiment_outputs(spec, table, args.output_dir)
    for name, path in paths.items():
        print(f"{name}: {path}")
    return EXIT_OK


def _cmd_crlb(args) -> int:
    pilots = default_pilot_set()
    setups = _parse_setups(args.setup)
    n_tx, n_rx = setups[0]
    n_channels = n_tx * n_rx
    noise_var = snr_db_to_noise_var(args.snr_db)
    profile = default_tap_profile(n_channels, pilots.channel_length)
    covs = np.zeros((n_channels, pilots.channel_length, pilots.channel_length),
                    dtype=complex)
    covs[:, np.arange(pilots.channel_length), np.arange(pilots.channel_length)] = profile
    phase_bound = crlb_phase(PhaseCrlbInput(pilots, covs, noise_var))

    cfg = SimConfig(seed=args.seed, n_tx=n_tx, n_rx=n_rx, alpha=args.alpha,
                    snr_db=args.snr_db, n_packets=args.n_packets)
    distortions = simulate(cfg).true_distortions
    bound = crlb_filter_trace(pilots, args.alpha,
                              stationary_process_noise(args.alpha, profile),
                              noise_var, distortions, args.n_packets,
                              n_channels=n_channels).scalar_bound_per_packet

    out = open(args.out, "w") if args.out else sys.stdout
    try:
        out.write(f"# crlb_omega,{phase_bound!r}\n")
        out.write("packet_index,crlb_channel\n")
        for k, v in enumerate(bound):
            out.write(f"{k},{v!r}\n")
    finally:
        if args.out:
            out.close()
            print(f"wrote {args.out}")
    return EXIT_OK


def _cmd_process(args) -> int:
    pilots = default_pilot_set()
    records = process_recording(args.input,
                                _estimator_from_args(args, args.n_tx * args.n_rx,
                                                     pilots),
                                pilots,
                                noise_var=snr_db_to_noise_var(args.snr_db))
    if not records:
        print("no packets survived ingestion", file=sys.stderr)
    write_processing_csv(records, pilots, args.n_tx, args.n_rx, args.out)
    print(f"processed {len(records)} packets -> {args.out}")
    return EXIT_OK


def _cmd_export_fixture(args) -> int:
    if args.kind == "rotating":
        _, meta = make_rotating_fixture(path=args.out, n_packets=args.n_packets,
                                        period=args.period, snr_db=args.snr_db,
                                        seed=args.seed)
    else:
        _, meta = make_static_fixture(path=args.out, n_packets=args.n_packets,
                                      snr_db=args.snr_db, seed=args.seed)
    meta_path = args.out + ".meta.json"
    with open(meta_path, "w") as fh:
        json.dump(meta, fh, indent=2)
    print(f"wrote {args.out} and {meta_path}")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="csitrack",
                     description="MIMO CSI phase sanitization and evaluation")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("simulate", help="dump a synthetic observation trace")
    p.add_argument("--seed", type=int, required=True)
    p.add_argument("--out", required=True)
    p.add_argument("--n-packets", type=int, default=100)
    p.add_argument("--snr-db", type=float, default=20.0)
    p.add_argument("--n-tx", type=int, default=3)
    p.add_argument("--n-rx", type=int, default=3)
    p.add_argument("--alpha", type=float, default=DEFAULT_ALPHA)
    p.set_defaults(func=_cmd_simulate)

    p = sub.add_parser("run", help="run a Monte Carlo experiment")
    p.add_argument("--spec", help="JSON file with ExperimentSpec fields")
    p.add_argument("--seed", type=int, help="root seed (mandatory unless the "
                                            "spec file provides one)")
    p.add_argument("--n-trials", type=int)
    p.add_argument("--snr-sweep-db", help="comma-separated, e.g. 10,20,30")
    p.add_argument("--antenna-setups", help="comma-separated, e.g. 3x3,2x2,1x3")
    p.add_argument("--methods", help="comma-separated subset of "
                                     "kalman_map,linreg,oracle_kf")
    p.add_argument("--output-dir")
    p.add_argument("--parallelism", type=int)
    p.add_argument("--n-packets", type=int)
    p.add_argument("--snr-db", type=float)
    p.add_argument("--alpha", type=float)
    p.set_defaults(func=_cmd_run)

    p = sub.add_parser("crlb", help="print bound tables for a configuration")
    p.add_argument("--snr-db", type=float, default=20.0)
    p.add_argument("--setup", default="3x3")
    p.add_argument("--n-packets", type=int, default=100)
    p.add_argument("--alpha", type=float, default=DEFAULT_ALPHA)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out")
    p.set_defaults(func=_cmd_crlb)

    p = sub.add_parser("process", help="ingest and filter a CSI recording")
    p.add_argument("--input", required=True)
    p.add_argument("--out", required=True)
    p.add_argument("--snr-db", type=float, default=30.0)
    p.add_argument("--alpha", type=float, default=DEFAULT_ALPHA)
    p.add_argument("--process-noise-var", type=float)
    p.add_argument("--slope-range", type=float, default=0.2)
    p.add_argument("--n-tx", type=int, default=3)
    p.add_argument("--n-rx", type=int, default=3)
    p.set_defaults(func=_cmd_process)

    p = sub.add_parser("export-fixture", help="write a golden synthetic recording")
    p.add_argument("--kind", choices=("rotating", "static"), default="rotating")
    p.add_argument("--out", required=True)
    p.add_argument("--seed", type=int, default=7)
    p.add_argument("--n-packets", type=int, default=192)
    p.add_argument("--period", type=int, default=32)
    p.add_argument("--snr-db", type=float, default=40.0)
    p.set_defaults(func=_cmd_export_fixture)

    return parser


def main(argv=None) -> int:
    logging.basicConfig(level=logging.INFO, format="%(levelname)s %(message)s")
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except CsiParseError as exc:
        print(f"csitrack: data error: {exc}", file=sys.stderr)
        return EXIT_DATA
    except (UnidentifiableConfiguration, np.linalg.LinAlgError,
            FloatingPointError) as exc:
        print(f"csitrack: numeric failure: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    except (ValueError, OSError) as exc:
        print(f"csitrack: error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
