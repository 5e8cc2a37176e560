"""Post-processing of chain records into reportable statistics.

Burn-in removal and thinning, percentile trajectories of the off-diagonal
correlations, empirical histograms for nu and d, and per-block acceptance
rates. Percentiles use linear interpolation between closest order statistics
(the q-th percentile of n sorted values sits at fractional 0-based rank
q/100 * (n - 1); numpy's default rule).
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

import numpy as np

from .exceptions import EmptyResultError
from .linalg import spd_inverse, to_correlation

DEFAULT_PROBS = (2.5, 50.0, 97.5)
DEFAULT_BINS = 20


def thin_and_burn(trace, burn_in, thin):
    """Keep indices burn_in, burn_in + thin, burn_in + 2*thin, ... (0-based).

    Raises EmptyResultError if nothing survives.
    """
    if thin < 1:
        raise ValueError(f"thinning interval must be >= 1, got {thin}")
    if burn_in < 0:
        raise ValueError(f"burn-in must be >= 0, got {burn_in}")
    trace = np.asarray(trace)
    if burn_in >= len(trace):
        raise EmptyResultError(
            f"burn-in {burn_in} leaves no samples from a trace of length {len(trace)}"
        )
    return trace[burn_in::thin]


def off_diagonal_pairs(m):
    """Index pairs (i, j), i < j, in row-major order."""
    return [(i, j) for i in range(m) for j in range(i + 1, m)]


def correlations_from_states(q_inv_samples):
    """Convert latent precision samples (n, K, m, m) to off-diagonal correlations.

    Returns (pairs, corr) with corr of shape (n, K, n_pairs).
    """
    q_inv_samples = np.asarray(q_inv_samples)
    n, K, m, _ = q_inv_samples.shape
    pairs = off_diagonal_pairs(m)
    corr = np.empty((n, K, len(pairs)))
    for s in range(n):
        for k in range(K):
            omega = to_correlation(spd_inverse(q_inv_samples[s, k]))
            for p, (i, j) in enumerate(pairs):
                corr[s, k, p] = omega[i, j]
    return pairs, corr


def correlation_percentiles(q_inv_samples, probs=DEFAULT_PROBS):
    """Pointwise percentile trajectories of posterior correlations.

    Parameters
    ----------
    q_inv_samples : ndarray, shape (n, K, m, m)
        Retained latent samples (each (m, m) slice SPD).
    probs : sequence of float
        Percentile levels in (0, 100).

    Returns
    -------
    pairs : list of (i, j)
        Off-diagonal index pairs.
    values : ndarray, shape (len(probs), K, len(pairs))
    """
    probs = np.asarray(probs, dtype=np.float64)
    if np.any(probs <= 0) or np.any(probs >= 100):
        raise ValueError("percentile levels must lie strictly inside (0, 100)")
    q_inv_samples = np.asarray(q_inv_samples)
    if q_inv_samples.shape[0] == 0:
        raise EmptyResultError("no latent samples to summarize")
    pairs, corr = correlations_from_states(q_inv_samples)
    values = np.percentile(corr, probs, axis=0, method="linear")
    return pairs, values


@dataclass(frozen=True)
class Histogram:
    """Equal-width binned density: sum(density * width) == 1."""

    edges: np.ndarray  # (n_bins + 1,)
    densities: np.ndarray  # (n_bins,)
    n_samples: int
    n_clipped: int


def empirical_hist(samples, n_bins, support):
    """Empirical density on equal-width bins over `support` = (lo, hi).

    Samples outside the support are clipped to the edge bins and counted in
    `n_clipped`. Densities are count / (N * width).
    """
    samples = np.asarray(samples, dtype=np.float64)
    if samples.size == 0:
        raise EmptyResultError("no samples to histogram")
    lo, hi = support
    if not lo < hi:
        raise ValueError(f"support must satisfy lo < hi, got ({lo}, {hi})")
    if n_bins < 1:
        raise ValueError(f"n_bins must be >= 1, got {n_bins}")
    n_clipped = int(np.sum((samples < lo) | (samples > hi)))
    clipped = np.clip(samples, lo, hi)
    densities, edges = np.histogram(clipped, bins=n_bins, range=(lo, hi), density=True)
    return Histogram(
        edges=edges,
        densities=densities,
        n_samples=int(samples.size),
        n_clipped=n_clipped,
    )


def acceptance_report(record):
    """Per-block acceptance rates of a ChainRecord, each in [0, 1]."""
    if np.any(record.proposals_q == 0):
        raise ValueError("empty proposal counts for latent blocks")
    rates_q = record.accept_q / record.proposals_q
    return {
        "q": rates_q,
        "q_mean": float(np.mean(rates_q)),
        "nu": record.accept_nu / record.proposals_nu if record.proposals_nu else None,
        "d": record.accept_d / record.proposals_d if record.proposals_d else None,
    }


@dataclass(frozen=True)
class PosteriorSummary:
    """Percentile trajectories, parameter samples/histograms, diagnostics."""

    probs: tuple
    pairs: list
    corr_percentiles: np.ndarray  # (len(probs), K, n_pairs)
    nu_samples: np.ndarray
    d_samples: np.ndarray
    nu_hist: Histogram
    d_hist: Histogram
    acceptance: dict
    sample_counts: dict


def _param_support(samples, fallback_halfwidth=0.5):
    lo, hi = float(np.min(samples)), float(np.max(samples))
    if lo == hi:
        pad = max(fallback_halfwidth, abs(lo) * 0.01)
        return lo - pad, hi + pad
    return lo, hi


def select_states_by_schedule(record, burn_in, thin):
    """Recorded latent states whose sweep indices fit a burn-in/thin schedule.

    Selection is by stored sweep index, so re-summarizing is exact whenever
    the requested schedule is compatible with what was recorded.
    """
    idx = record.state_sweep_indices
    mask = (idx >= burn_in) & ((idx - burn_in) % thin == 0)
    if not np.any(mask):
        raise EmptyResultError("no recorded latent states match the schedule")
    return record.q_inv_states[mask]


def summarize_record(
    record,
    probs=DEFAULT_PROBS,
    n_bins=DEFAULT_BINS,
    burn_in_states=None,
    thin_states=None,
    burn_in_params=None,
    thin_params=None,
):
    """Reduce a ChainRecord to a PosteriorSummary.

    Schedules default to the record's own config; overrides re-select from
    the stored traces/states.
    """
    cfg = record.config
    burn_in_states = cfg.burn_in_states if burn_in_states is None else burn_in_states
    thin_states = cfg.thin_states if thin_states is None else thin_states
    burn_in_params = cfg.burn_in_params if burn_in_params is None else burn_in_params
    thin_params = cfg.thin_params if thin_params is None else thin_params

    nu_samples = thin_and_burn(record.nu_trace, burn_in_params, thin_params)
    d_samples = thin_and_burn(record.d_trace, burn_in_params, thin_params)
    states = select_states_by_schedule(record, burn_in_states, thin_states)
    pairs, values = correlation_percentiles(states, probs)

    nu_hist = empirical_hist(nu_samples, n_bins, _param_support(nu_samples))
    d_hist = empirical_hist(d_samples, n_bins, (-1.0, 1.0))

    return PosteriorSummary(
        probs=tuple(float(p) for p in probs),
        pairs=pairs,
        corr_percentiles=values,
        nu_samples=np.array(nu_samples, copy=True),
        d_samples=np.array(d_samples, copy=True),
        nu_hist=nu_hist,
        d_hist=d_hist,
        acceptance=acceptance_report(record),
        sample_counts={"states": int(states.shape[0]), "params": int(len(nu_samples))},
    )
