"""Command-line interface: simulate, fit, summarize.

Exit codes: 0 success, 2 configuration/validation error, 3 data error,
4 I/O error. Flags mirror the sampler configuration with the reference
protocol as defaults, so a bare `fit` reproduces it. Seeds come from flags
only; there is no hidden environment behavior.
"""

from __future__ import annotations

import argparse
import sys
from concurrent.futures import ProcessPoolExecutor

import numpy as np

from .data import load_csv, standardize
from .exceptions import (
    ConfigError,
    DomainError,
    DyncorrError,
    EmptyResultError,
    InvalidDataError,
    SchemaMismatchError,
)
from .model import ModelParams, simulate
from .distributions import RngStream
from .output import (
    config_to_dict,
    make_provenance,
    read_traces,
    summary_to_dict,
    write_hist_csv,
    write_json,
    write_matrix_csv,
    write_percentiles_csv,
    write_traces,
)
from .posterior import off_diagonal_pairs, summarize_record
from .sampler import ChainRecord, ChainState, SamplerConfig, run_chain

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_DATA = 3
EXIT_IO = 4


def build_parser():
    parser = argparse.ArgumentParser(
        prog="dyncorr",
        description="Dynamic correlation estimation via latent Wishart-process MCMC.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    sim = sub.add_parser("simulate", help="simulate a synthetic session")
    sim.add_argument("--nu", type=float, default=5.0, help="degrees of freedom (> m)")
    sim.add_argument("--d", type=float, default=0.8, help="persistence exponent in [-1, 1]")
    sim.add_argument("--m", type=int, default=2, help="number of channels")
    sim.add_argument("--K", type=int, default=150, help="number of time points")
    sim.add_argument("--seed", type=int, default=0)
    sim.add_argument("--out", required=True, help="output prefix")

    fit = sub.add_parser("fit", help="estimate correlation dynamics from a CSV session")
    fit.add_argument("input", help="CSV file, K rows by m columns, optional header")
    fit.add_argument("--out", required=True, help="output prefix")
    _add_sampler_flags(fit)
    fit.add_argument("--no-standardize", action="store_true",
                     help="skip columnwise standardization")
    fit.add_argument("--no-traces", action="store_true",
                     help="skip writing trace CSVs")
    fit.add_argument("--chains", type=int, default=1,
                     help="run N independently seeded chains concurrently")

    summ = sub.add_parser("summarize", help="re-summarize stored traces")
    summ.add_argument("traces", help="trace prefix written by fit")
    summ.add_argument("--out", required=True, help="output prefix")
    summ.add_argument("--burn-in-states", type=int, default=None)
    summ.add_argument("--burn-in-params", type=int, default=None)
    summ.add_argument("--thin-states", type=int, default=None)
    summ.add_argument("--thin-params", type=int, default=None)

    return parser


def _add_sampler_flags(cmd):
    cmd.add_argument("--iters", type=int, default=10000, help="total MCMC sweeps")
    cmd.add_argument("--alpha-nu", type=float, default=None,
                     help="prior shape for nu - m (default m + 2)")
    cmd.add_argument("--beta-nu", type=float, default=1.0, help="prior rate for nu - m")
    cmd.add_argument("--nu-var", type=float, default=0.1, help="nu proposal variance")
    cmd.add_argument("--a-f", type=float, default=5.0, help="d proposal clamp threshold")
    cmd.add_argument("--nu-init", type=float, default=None,
                     help="initial nu (default m + (alpha_nu - 1)/beta_nu)")
    cmd.add_argument("--d-init", type=float, default=0.5, help="initial d")
    cmd.add_argument("--burn-in-states", type=int, default=1000)
    cmd.add_argument("--burn-in-params", type=int, default=4000)
    cmd.add_argument("--thin-states", type=int, default=100)
    cmd.add_argument("--thin-params", type=int, default=200)
    cmd.add_argument("--seed", type=int, default=0)


def cmd_simulate(args):
    params = ModelParams(nu=args.nu, d=args.d, m=args.m)
    if args.K < 1:
        raise ConfigError(f"K must be >= 1, got {args.K}")
    rng = RngStream(args.seed)
    traj = simulate(rng, params, args.K)

    prov = make_provenance("simulate", args.seed, nu=args.nu, d=args.d,
                           m=args.m, K=args.K)
    names = [f"ch{i + 1}" for i in range(args.m)]
    write_matrix_csv(f"{args.out}_observations.csv", traj.y_seq, names, provenance=prov)

    pairs = off_diagonal_pairs(args.m)
    true_corr = np.array(
        [[traj.omega_seq[k, i, j] for (i, j) in pairs] for k in range(args.K)]
    )
    truth = {
        "config": {"nu": args.nu, "d": args.d, "m": args.m, "K": args.K,
                   "seed": args.seed},
        "pairs": [list(p) for p in pairs],
        "true_corr": true_corr,
        "provenance": prov,
    }
    write_json(f"{args.out}_truth.json", truth)
    print(f"wrote {args.out}_observations.csv and {args.out}_truth.json")
    return EXIT_OK


def _chain_seed(base_seed, chain_index):
    """Stable 63-bit per-chain seed derived from (base seed, chain index)."""
    state = np.random.SeedSequence([base_seed, chain_index]).generate_state(1, np.uint64)
    return int(state[0] % (2**63))


def _run_chain_job(job):
    y, config = job
    return run_chain(y, config)


def cmd_fit(args):
    matrix, header = load_csv(args.input)
    K, m = matrix.shape
    if m >= K:
        print(f"warning: session has only K={K} time points for m={m} channels",
              file=sys.stderr)
    if args.no_standardize:
        if not np.all(np.isfinite(matrix)):
            raise InvalidDataError("input contains non-finite values")
        y = matrix
    else:
        y = standardize(matrix, channel_names=header).values

    def config_for(seed):
        return SamplerConfig(
            K=K, m=m, n_iters=args.iters, alpha_nu=args.alpha_nu,
            beta_nu=args.beta_nu, nu_var=args.nu_var, a_f=args.a_f,
            nu_init=args.nu_init, d_init=args.d_init,
            burn_in_states=args.burn_in_states, burn_in_params=args.burn_in_params,
            thin_states=args.thin_states, thin_params=args.thin_params, seed=seed,
        )

    if args.chains < 1:
        raise ConfigError(f"--chains must be >= 1, got {args.chains}")
    if args.chains == 1:
        jobs = [(y, config_for(args.seed))]
        records = [_run_chain_job(jobs[0])]
        prefixes = [args.out]
    else:
        jobs = [(y, config_for(_chain_seed(args.seed, c))) for c in range(args.chains)]
        with ProcessPoolExecutor() as pool:
            records = list(pool.map(_run_chain_job, jobs))
        prefixes = [f"{args.out}_chain{c}" for c in range(args.chains)]

    for c, (record, prefix) in enumerate(zip(records, prefixes)):
        prov = make_provenance(
            "fit", record.config.seed, input=args.input,
            standardize=not args.no_standardize,
            base_seed=args.seed, chain=c, chains=args.chains,
        )
        summary = summarize_record(record)
        doc = summary_to_dict(summary, config_to_dict(record.config), prov)
        write_json(f"{prefix}_summary.json", doc)
        write_percentiles_csv(f"{prefix}_percentiles.csv", summary, provenance=prov)
        write_hist_csv(f"{prefix}_nu_hist.csv", summary.nu_hist, provenance=prov)
        write_hist_csv(f"{prefix}_d_hist.csv", summary.d_hist, provenance=prov)
        if not args.no_traces:
            write_traces(prefix, record, prov)
        print(f"wrote {prefix}_summary.json")
    return EXIT_OK


def cmd_summarize(args):
    config_doc, acceptance_doc, nu_trace, d_trace, sweeps, states = read_traces(
        args.traces
    )
    try:
        config = SamplerConfig(**config_doc)
    except (TypeError, ConfigError) as exc:
        raise SchemaMismatchError(f"stored config is invalid: {exc}") from exc
    record = ChainRecord(
        config=config,
        nu_trace=nu_trace,
        d_trace=d_trace,
        state_sweep_indices=sweeps,
        q_inv_states=states,
        accept_q=np.asarray(acceptance_doc["accept_q"], dtype=np.int64),
        accept_nu=int(acceptance_doc["accept_nu"]),
        accept_d=int(acceptance_doc["accept_d"]),
        proposals_q=np.asarray(acceptance_doc["proposals_q"], dtype=np.int64),
        proposals_nu=int(acceptance_doc["proposals_nu"]),
        proposals_d=int(acceptance_doc["proposals_d"]),
        final_state=ChainState(
            q_inv_seq=states[-1] if len(states) else np.empty((0, 0, 0)),
            nu=float(nu_trace[-1]),
            d=float(d_trace[-1]),
            sweep_index=len(nu_trace),
        ),
    )
    summary = summarize_record(
        record,
        burn_in_states=args.burn_in_states,
        thin_states=args.thin_states,
        burn_in_params=args.burn_in_params,
        thin_params=args.thin_params,
    )
    prov = make_provenance(
        "summarize", config.seed, traces=args.traces,
        burn_in_states=config.burn_in_states if args.burn_in_states is None else args.burn_in_states,
        thin_states=config.thin_states if args.thin_states is None else args.thin_states,
        burn_in_params=config.burn_in_params if args.burn_in_params is None else args.burn_in_params,
        thin_params=config.thin_params if args.thin_params is None else args.thin_params,
    )
    doc = summary_to_dict(summary, config_to_dict(config), prov)
    write_json(f"{args.out}_summary.json", doc)
    write_percentiles_csv(f"{args.out}_percentiles.csv", summary, provenance=prov)
    write_hist_csv(f"{args.out}_nu_hist.csv", summary.nu_hist, provenance=prov)
    write_hist_csv(f"{args.out}_d_hist.csv", summary.d_hist, provenance=prov)
    print(f"wrote {args.out}_summary.json")
    return EXIT_OK


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    handlers = {"simulate": cmd_simulate, "fit": cmd_fit, "summarize": cmd_summarize}
    try:
        return handlers[args.command](args)
    except (ConfigError, DomainError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except (InvalidDataError, EmptyResultError, SchemaMismatchError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_DATA
    except DyncorrError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_DATA
    except OSError as exc:
        print(f"I/O error: {exc}", file=sys.stderr)
        return EXIT_IO


if __name__ == "__main__":
    sys.exit(main())
