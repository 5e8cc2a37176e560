"""Metropolis-within-Gibbs sampler for the latent precision chain and (nu, d).

One sweep updates Q_1^-1 ... Q_K^-1 in ascending order (each interior update
conditions on the freshly updated left neighbor and the previous-sweep right
neighbor), then nu, then d (with the just-updated nu). Every block is a
Metropolis-Hastings step; the Q proposals are independence proposals whose
parameters do not involve the current value, so forward and backward proposal
densities use the same Wishart parameters.

All conditional targets are computed by composing log densities from
:mod:`dyncorr.distributions` (except the d target, whose closed form *is* the
sum of transition terms). Numerical failure inside a proposal or target
evaluation counts as a rejection; the chain never aborts mid-run.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace
from typing import NamedTuple, Optional

import numpy as np

from .distributions import (
    NEG_INF,
    RngStream,
    beta_prop_param,
    logpdf_mvn_zero,
    logpdf_prior_nu,
    logpdf_scaled_beta,
    logpdf_shifted_gamma,
    logpdf_wishart,
    sample_scaled_beta,
    sample_shifted_gamma,
    sample_wishart,
    shifted_gamma_params,
)
from .exceptions import ConfigError, DomainError, InvalidDataError, NotPositiveDefinite
from .linalg import diag_sqrt, frac_power, log_det, spd_inverse, to_correlation

_RECOVERABLE = (NotPositiveDefinite, DomainError)


@dataclass(frozen=True)
class SamplerConfig:
    """Hyperparameters, proposal constants, and schedule for one chain.

    Defaults reproduce the reference protocol: alpha_nu = m + 2, beta_nu = 1,
    nu_init = m + (alpha_nu - 1)/beta_nu, d_init = 0.5, nu_var = 0.1, a_f = 5,
    10000 sweeps, burn-in 1000/4000 and thinning 100/200 for latent states and
    parameters respectively. `None` for alpha_nu or nu_init resolves to those
    m-dependent defaults.
    """

    K: int
    m: int
    n_iters: int = 10000
    alpha_nu: Optional[float] = None
    beta_nu: float = 1.0
    nu_var: float = 0.1
    a_f: float = 5.0
    nu_init: Optional[float] = None
    d_init: float = 0.5
    burn_in_states: int = 1000
    burn_in_params: int = 4000
    thin_states: int = 100
    thin_params: int = 200
    seed: int = 0

    def __post_init__(self):
        if self.K < 1:
            raise ConfigError(f"K must be >= 1, got {self.K}")
        if self.m < 1:
            raise ConfigError(f"m must be >= 1, got {self.m}")
        if self.alpha_nu is None:
            object.__setattr__(self, "alpha_nu", float(self.m + 2))
        if self.nu_init is None:
            object.__setattr__(
                self, "nu_init", self.m + (self.alpha_nu - 1.0) / self.beta_nu
            )
        if self.n_iters < 1:
            raise ConfigError(f"n_iters must be >= 1, got {self.n_iters}")
        if not (0 <= self.burn_in_states < self.n_iters):
            raise ConfigError(
                f"burn_in_states {self.burn_in_states} outside [0, n_iters)"
            )
        if not (0 <= self.burn_in_params < self.n_iters):
            raise ConfigError(
                f"burn_in_params {self.burn_in_params} outside [0, n_iters)"
            )
        if self.thin_states < 1 or self.thin_params < 1:
            raise ConfigError("thinning intervals must be >= 1")
        if self.alpha_nu <= 0 or self.beta_nu <= 0:
            raise ConfigError("prior hyperparameters must be positive")
        if self.nu_var <= 0:
            raise ConfigError(f"nu_var must be positive, got {self.nu_var}")
        if self.a_f <= 1:
            raise ConfigError(f"a_f must exceed 1, got {self.a_f}")
        if not self.nu_init > self.m:
            raise ConfigError(f"nu_init must exceed m={self.m}, got {self.nu_init}")
        if not -1.0 <= self.d_init <= 1.0:
            raise ConfigError(f"d_init must lie in [-1, 1], got {self.d_init}")


@dataclass(frozen=True)
class ChainState:
    """One Gibbs-sweep snapshot: latent chain plus current (nu, d)."""

    q_inv_seq: np.ndarray  # (K, m, m)
    nu: float
    d: float
    sweep_index: int = 0


class WishartProposal(NamedTuple):
    """A Wishart independence proposal: drawn value plus its parameters.

    `value` and `log_q_fwd` are the proposed matrix and its log density;
    (df, scale) let the caller evaluate the reverse density at the old point
    with `log_q_at`, since the parameters do not depend on the current value.
    """

    value: np.ndarray
    log_q_fwd: float
    df: float
    scale: np.ndarray

    def log_q_at(self, X):
        return logpdf_wishart(X, self.df, self.scale)


class BlockAccepts(NamedTuple):
    """Per-block accept flags for one sweep (None = block not updated)."""

    q: np.ndarray  # (K,) bool
    nu: Optional[bool]
    d: Optional[bool]


@dataclass(frozen=True)
class ProposalOutcome:
    """Instrumentation record for one MH decision (test diagnostics)."""

    block: str  # "q", "nu" or "d"
    k: Optional[int]
    sweep: int
    star: object
    old: object
    log_g_star: float
    log_g_old: float
    log_q_fwd: float
    log_q_bwd: float
    u: float
    accepted: bool
    context: dict = field(repr=False, default_factory=dict)


@dataclass(frozen=True)
class ChainRecord:
    """Everything a chain run produces: traces, recorded states, counters."""

    config: SamplerConfig
    nu_trace: np.ndarray  # (n_iters,)
    d_trace: np.ndarray  # (n_iters,)
    state_sweep_indices: np.ndarray  # (n_rec,) 0-based trace indices
    q_inv_states: np.ndarray  # (n_rec, K, m, m)
    accept_q: np.ndarray  # (K,) accepted counts
    accept_nu: int
    accept_d: int
    proposals_q: np.ndarray  # (K,)
    proposals_nu: int
    proposals_d: int
    final_state: ChainState


def log_g_Qk(q_k_inv, q_km1_inv, q_kp1_inv, y_k, nu, d, include_likelihood=True):
    """Log conditional target for an interior latent state Q_k^-1.

    Sum of the observation likelihood N(y_k; 0, Omega_k), the transition into
    Q_{k+1}^-1 (Wishart with scale Q_k^{-d}/nu), and the transition from
    Q_{k-1}^-1 (Wishart with scale Q_{k-1}^{-d}/nu). Equal, up to an additive
    constant in Q_k^-1, to the log of the closed-form conditional.

    `include_likelihood=False` drops the observation term (validation hook).
    """
    s_k = frac_power(q_km1_inv, d)  # S_k = Q_{k-1}^{-d}
    total = logpdf_wishart(q_k_inv, nu, s_k / nu)
    s_kp1 = frac_power(q_k_inv, d)  # S_{k+1} = Q_k^{-d}
    total += logpdf_wishart(q_kp1_inv, nu, s_kp1 / nu)
    if include_likelihood:
        omega = to_correlation(spd_inverse(q_k_inv))
        total += logpdf_mvn_zero(y_k, omega)
    return total


def log_g_QK(q_K_inv, q_Km1_inv, y_K, nu, d, include_likelihood=True):
    """Log conditional target for the terminal latent state Q_K^-1."""
    s_K = frac_power(q_Km1_inv, d)  # S_K = Q_{K-1}^{-d}
    total = logpdf_wishart(q_K_inv, nu, s_K / nu)
    if include_likelihood:
        omega = to_correlation(spd_inverse(q_K_inv))
        total += logpdf_mvn_zero(y_K, omega)
    return total


def log_g_nu(nu, q_inv_seq, d, alpha_nu, beta_nu):
    """Log conditional target for nu: prior plus all K transition densities.

    Returns -inf for nu at or below the dimension m (out of support).
    """
    q_inv_seq = np.asarray(q_inv_seq)
    m = q_inv_seq.shape[-1]
    if not nu > m:
        return NEG_INF
    total = logpdf_prior_nu(nu, alpha_nu, beta_nu, m)
    prev_inv = np.eye(m)
    for q_k_inv in q_inv_seq:
        s_k = frac_power(prev_inv, d)
        total += logpdf_wishart(q_k_inv, nu, s_k / nu)
        prev_inv = q_k_inv
    return total


def log_g_d(d, q_inv_seq, nu):
    """Log conditional target for d (flat prior adds only a constant).

    sum_k [ -(d*nu/2) ln|Q_{k-1}^-1| - (nu/2) Tr(Q_{k-1}^d Q_k^-1) ]
    with Q_0 = I; -inf outside [-1, 1].
    """
    if not -1.0 <= d <= 1.0:
        return NEG_INF
    q_inv_seq = np.asarray(q_inv_seq)
    m = q_inv_seq.shape[-1]
    total = 0.0
    prev_inv = np.eye(m)
    for q_k_inv in q_inv_seq:
        # Q_{k-1}^d = (Q_{k-1}^-1)^{-d}; Tr(AB) = sum(A * B) for symmetric A, B
        total += -(d * nu / 2.0) * log_det(prev_inv)
        total += -(nu / 2.0) * float(np.sum(frac_power(prev_inv, -d) * q_k_inv))
        prev_inv = q_k_inv
    return total


def qk_proposal_scale(q_km1_inv, q_kp1_inv, y_k, nu, d):
    """Scale matrix of the interior proposal: (nu S_k^-1 + Qt y y' Qt)^-1.

    Qt is the average of the diagonal square roots of the non-inverted
    neighbor states Q_{k-1} and Q_{k+1}.
    """
    q_km1 = spd_inverse(q_km1_inv)
    q_kp1 = spd_inverse(q_kp1_inv)
    q_tilde = (diag_sqrt(q_km1) + diag_sqrt(q_kp1)) / 2.0
    s_k_inv = frac_power(q_km1_inv, -d)  # S_k^-1 = Q_{k-1}^d
    v = q_tilde @ np.asarray(y_k, dtype=np.float64)
    return spd_inverse(nu * s_k_inv + np.outer(v, v))


def propose_Qk(rng, q_km1_inv, q_kp1_inv, y_k, nu, d):
    """Draw an interior proposal from W_m(nu + 1, qk_proposal_scale(...))."""
    scale = qk_proposal_scale(q_km1_inv, q_kp1_inv, y_k, nu, d)
    value = sample_wishart(rng, nu + 1.0, scale)
    return WishartProposal(
        value=value,
        log_q_fwd=logpdf_wishart(value, nu + 1.0, scale),
        df=nu + 1.0,
        scale=scale,
    )


def propose_QK(rng, q_Km1_inv, nu, d):
    """Draw the terminal proposal from W_m(nu + 1, S_K/nu), S_K = Q_{K-1}^{-d}."""
    scale = frac_power(q_Km1_inv, d) / nu
    value = sample_wishart(rng, nu + 1.0, scale)
    return WishartProposal(
        value=value,
        log_q_fwd=logpdf_wishart(value, nu + 1.0, scale),
        df=nu + 1.0,
        scale=scale,
    )


def _mh_decision(log_g_star, log_g_old, log_q_fwd, log_q_bwd, u):
    """Accept iff u < min(1, exp(log ratio)); -inf handled explicitly."""
    if math.isnan(log_g_star) or log_g_star == NEG_INF:
        return False
    num = log_g_star + log_q_bwd
    den = log_g_old + log_q_fwd
    if num == NEG_INF:
        return False
    if den == NEG_INF:
        return True
    log_ratio = num - den
    if math.isnan(log_ratio):
        return False
    if log_ratio >= 0.0:
        return True
    if u <= 0.0:
        return True
    return math.log(u) < log_ratio


def mh_accept(rng, log_g_star, log_g_old, log_q_fwd, log_q_bwd):
    """One Metropolis-Hastings accept/reject decision.

    Accepts with probability min(1, exp(log_g_star - log_g_old
    + log_q_bwd - log_q_fwd)); a -inf target at the proposal always rejects.
    """
    u = rng.generator.random()
    return _mh_decision(log_g_star, log_g_old, log_q_fwd, log_q_bwd, u)


def gibbs_sweep(
    rng,
    state,
    y_seq,
    config,
    *,
    include_likelihood=True,
    update_nu=True,
    update_d=True,
    monitor=None,
):
    """One full Gibbs sweep: all K latent blocks, then nu, then d.

    Returns (next_state, BlockAccepts). A numerical failure inside any
    proposal or target evaluation rejects that block and moves on.
    `monitor`, if given, is a list collecting a ProposalOutcome per decision.
    """
    K, m = config.K, config.m
    q = np.array(state.q_inv_seq, copy=True)
    nu, d = state.nu, state.d
    sweep = state.sweep_index + 1
    accept_q = np.zeros(K, dtype=bool)
    eye = np.eye(m)

    for k in range(K):
        left = q[k - 1] if k > 0 else eye
        y_k = y_seq[k]
        old = q[k]
        try:
            if k < K - 1:
                right = q[k + 1]
                prop = propose_Qk(rng, left, right, y_k, nu, d)
                log_q_bwd = prop.log_q_at(old)
                lg_star = log_g_Qk(
                    prop.value, left, right, y_k, nu, d,
                    include_likelihood=include_likelihood,
                )
                lg_old = log_g_Qk(
                    old, left, right, y_k, nu, d,
                    include_likelihood=include_likelihood,
                )
            else:
                prop = propose_QK(rng, left, nu, d)
                log_q_bwd = prop.log_q_at(old)
                lg_star = log_g_QK(
                    prop.value, left, y_k, nu, d,
                    include_likelihood=include_likelihood,
                )
                lg_old = log_g_QK(
                    old, left, y_k, nu, d,
                    include_likelihood=include_likelihood,
                )
        except _RECOVERABLE:
            continue  # counts as a rejection
        u = rng.generator.random()
        ok = _mh_decision(lg_star, lg_old, prop.log_q_fwd, log_q_bwd, u)
        if monitor is not None:
            context = {
                "q_km1_inv": left.copy(),
                "q_kp1_inv": q[k + 1].copy() if k < K - 1 else None,
                "y_k": np.array(y_k, copy=True),
                "nu": nu,
                "d": d,
                "df": prop.df,
                "scale": prop.scale.copy(),
                "include_likelihood": include_likelihood,
            }
            monitor.append(ProposalOutcome(
                block="q", k=k, sweep=sweep, star=prop.value.copy(), old=old.copy(),
                log_g_star=lg_star, log_g_old=lg_old, log_q_fwd=prop.log_q_fwd,
                log_q_bwd=log_q_bwd, u=u, accepted=ok, context=context,
            ))
        if ok:
            q[k] = prop.value
            accept_q[k] = True

    nu_accept = None
    if update_nu:
        nu_accept = False
        try:
            fwd = shifted_gamma_params(nu, config.nu_var, m)
            nu_star = sample_shifted_gamma(rng, fwd)
            bwd = shifted_gamma_params(nu_star, config.nu_var, m)
            log_q_fwd = logpdf_shifted_gamma(nu_star, fwd)
            log_q_bwd = logpdf_shifted_gamma(nu, bwd)
            lg_star = log_g_nu(nu_star, q, d, config.alpha_nu, config.beta_nu)
            lg_old = log_g_nu(nu, q, d, config.alpha_nu, config.beta_nu)
        except _RECOVERABLE:
            nu_star = None
        if nu_star is not None:
            u = rng.generator.random()
            nu_accept = _mh_decision(lg_star, lg_old, log_q_fwd, log_q_bwd, u)
            if monitor is not None:
                context = {
                    "q_inv_seq": q.copy(),
                    "d": d,
                    "alpha_nu": config.alpha_nu,
                    "beta_nu": config.beta_nu,
                    "nu_var": config.nu_var,
                }
                monitor.append(ProposalOutcome(
                    block="nu", k=None, sweep=sweep, star=nu_star, old=nu,
                    log_g_star=lg_star, log_g_old=lg_old, log_q_fwd=log_q_fwd,
                    log_q_bwd=log_q_bwd, u=u, accepted=nu_accept, context=context,
                ))
            if nu_accept:
                nu = nu_star

    d_accept = None
    if update_d:
        d_accept = False
        try:
            fwd = beta_prop_param(d, config.a_f)
            d_star = sample_scaled_beta(rng, fwd)
            bwd = beta_prop_param(d_star, config.a_f)
            log_q_fwd = logpdf_scaled_beta(d_star, fwd)
            log_q_bwd = logpdf_scaled_beta(d, bwd)
            lg_star = log_g_d(d_star, q, nu)
            lg_old = log_g_d(d, q, nu)
        except _RECOVERABLE:
            d_star = None
        if d_star is not None:
            u = rng.generator.random()
            d_accept = _mh_decision(lg_star, lg_old, log_q_fwd, log_q_bwd, u)
            if monitor is not None:
                context = {"q_inv_seq": q.copy(), "nu": nu, "a_f": config.a_f}
                monitor.append(ProposalOutcome(
                    block="d", k=None, sweep=sweep, star=d_star, old=d,
                    log_g_star=lg_star, log_g_old=lg_old, log_q_fwd=log_q_fwd,
                    log_q_bwd=log_q_bwd, u=u, accepted=d_accept, context=context,
                ))
            if d_accept:
                d = d_star

    next_state = ChainState(q_inv_seq=q, nu=nu, d=d, sweep_index=sweep)
    return next_state, BlockAccepts(q=accept_q, nu=nu_accept, d=d_accept)


def initial_state(config):
    """The prescribed starting point: identity chain, nu_init, d_init."""
    q0 = np.broadcast_to(np.eye(config.m), (config.K, config.m, config.m))
    return ChainState(
        q_inv_seq=np.array(q0, copy=True),
        nu=float(config.nu_init),
        d=float(config.d_init),
        sweep_index=0,
    )


def run_chain(
    y_seq,
    config,
    *,
    rng=None,
    include_likelihood=True,
    update_nu=True,
    update_d=True,
    record_all_states=False,
    monitor=None,
):
    """Run the full MCMC chain on observations y_seq of shape (K, m).

    Latent states are recorded every `thin_states` sweeps after
    `burn_in_states` (or every sweep with `record_all_states`); nu and d
    traces are kept for all sweeps. Returns a ChainRecord.
    """
    y_seq = np.asarray(y_seq, dtype=np.float64)
    if y_seq.ndim != 2:
        raise InvalidDataError(f"observations must be 2-d, got shape {y_seq.shape}")
    if y_seq.shape != (config.K, config.m):
        raise InvalidDataError(
            f"observations shape {y_seq.shape} does not match config "
            f"(K={config.K}, m={config.m})"
        )
    if not np.all(np.isfinite(y_seq)):
        raise InvalidDataError("observations contain non-finite values")
    if rng is None:
        rng = RngStream(config.seed)

    K, m = config.K, config.m
    state = initial_state(config)
    nu_trace = np.empty(config.n_iters)
    d_trace = np.empty(config.n_iters)
    accept_q = np.zeros(K, dtype=np.int64)
    accept_nu = 0
    accept_d = 0
    proposals_nu = 0
    proposals_d = 0
    rec_indices = []
    rec_states = []

    for i in range(config.n_iters):
        state, accepts = gibbs_sweep(
            rng, state, y_seq, config,
            include_likelihood=include_likelihood,
            update_nu=update_nu,
            update_d=update_d,
            monitor=monitor,
        )
        accept_q += accepts.q
        if accepts.nu is not None:
            proposals_nu += 1
            accept_nu += int(accepts.nu)
        if accepts.d is not None:
            proposals_d += 1
            accept_d += int(accepts.d)
        nu_trace[i] = state.nu
        d_trace[i] = state.d
        if record_all_states or (
            i >= config.burn_in_states
            and (i - config.burn_in_states) % config.thin_states == 0
        ):
            rec_indices.append(i)
            rec_states.append(np.array(state.q_inv_seq, copy=True))

    return ChainRecord(
        config=config,
        nu_trace=nu_trace,
        d_trace=d_trace,
        state_sweep_indices=np.array(rec_indices, dtype=np.int64),
        q_inv_states=np.array(rec_states) if rec_states else np.empty((0, K, m, m)),
        accept_q=accept_q,
        accept_nu=accept_nu,
        accept_d=accept_d,
        proposals_q=np.full(K, config.n_iters, dtype=np.int64),
        proposals_nu=proposals_nu,
        proposals_d=proposals_d,
        final_state=state,
    )
