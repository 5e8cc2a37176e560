"""Scikit-learn style estimator facade over the MCMC sampler."""

from __future__ import annotations

import numpy as np
from sklearn.base import BaseEstimator
from sklearn.utils.validation import check_array, check_is_fitted

from .data import standardize
from .posterior import summarize_record
from .sampler import SamplerConfig, run_chain


class DynamicCorrelationMCMC(BaseEstimator):
    """Posterior estimation of time-varying correlations from a multivariate
    time series, via a latent Wishart-process volatility model sampled with
    Metropolis-within-Gibbs MCMC.

    `fit(X)` treats the rows of X as a (K, m) time-ordered session, runs one
    MCMC chain and summarizes it. The estimator is fit-shaped: results live
    in fitted attributes rather than a `predict` method.

    Parameters
    ----------
    n_iters : int
        Total MCMC sweeps.
    alpha_nu, beta_nu : float
        Prior hyperparameters for the Gamma prior on nu - m. `alpha_nu=None`
        resolves to m + 2 at fit time.
    nu_var : float
        Variance of the mode-matched shifted-Gamma proposal for nu.
    a_f : float
        Clamp threshold for the scaled-Beta proposal on d.
    nu_init, d_init : float
        Chain initialization. `nu_init=None` resolves to
        m + (alpha_nu - 1) / beta_nu.
    burn_in_states, burn_in_params : int
        Sweeps discarded before retaining latent states / parameters.
    thin_states, thin_params : int
        Keep-every-n intervals after burn-in.
    with_standardize : bool
        Standardize columns (zero mean, unit sample std) before sampling.
    percentile_probs : tuple of float
        Percentile levels reported for the correlation trajectories.
    hist_bins : int
        Bin count for the nu and d histograms.
    random_state : int or None
        Seed for the chain; None draws fresh OS entropy.

    Attributes
    ----------
    record_ : ChainRecord
        Raw traces, recorded states, and acceptance counters.
    summary_ : PosteriorSummary
        Percentile trajectories, parameter samples, histograms, diagnostics.
    corr_percentiles_ : ndarray, shape (n_probs, K, n_pairs)
    pairs_ : list of (i, j) channel index pairs.
    nu_samples_, d_samples_ : ndarray
        Retained posterior samples of the model parameters.
    acceptance_ : dict
        Per-block acceptance rates.
    n_features_in_ : int
        Number of channels m.
    """

    def __init__(
        self,
        n_iters=10000,
        alpha_nu=None,
        beta_nu=1.0,
        nu_var=0.1,
        a_f=5.0,
        nu_init=None,
        d_init=0.5,
        burn_in_states=1000,
        burn_in_params=4000,
        thin_states=100,
        thin_params=200,
        with_standardize=True,
        percentile_probs=(2.5, 50.0, 97.5),
        hist_bins=20,
        random_state=None,
    ):
        self.n_iters = n_iters
        self.alpha_nu = alpha_nu
        self.beta_nu = beta_nu
        self.nu_var = nu_var
        self.a_f = a_f
        self.nu_init = nu_init
        self.d_init = d_init
        self.burn_in_states = burn_in_states
        self.burn_in_params = burn_in_params
        self.thin_states = thin_states
        self.thin_params = thin_params
        self.with_standardize = with_standardize
        self.percentile_probs = percentile_probs
        self.hist_bins = hist_bins
        self.random_state = random_state

    def _config(self, K, m):
        if self.random_state is None:
            seed = int(np.random.SeedSequence().entropy % (2**63))
        else:
            seed = int(self.random_state)
        return SamplerConfig(
            K=K,
            m=m,
            n_iters=self.n_iters,
            alpha_nu=self.alpha_nu,
            beta_nu=self.beta_nu,
            nu_var=self.nu_var,
            a_f=self.a_f,
            nu_init=self.nu_init,
            d_init=self.d_init,
            burn_in_states=self.burn_in_states,
            burn_in_params=self.burn_in_params,
            thin_states=self.thin_states,
            thin_params=self.thin_params,
            seed=seed,
        )

    def fit(self, X, y=None):
        """Run the chain on a (K, m) session and summarize the posterior.

        Returns self.
        """
        X = check_array(X, dtype=np.float64, ensure_min_samples=2, ensure_min_features=1)
        if self.with_standardize:
            X = standardize(X).values
        K, m = X.shape
        config = self._config(K, m)
        self.config_ = config
        self.record_ = run_chain(X, config)
        self.summary_ = summarize_record(
            self.record_, probs=self.percentile_probs, n_bins=self.hist_bins
        )
        self.corr_percentiles_ = self.summary_.corr_percentiles
        self.pairs_ = self.summary_.pairs
        self.nu_samples_ = self.summary_.nu_samples
        self.d_samples_ = self.summary_.d_samples
        self.acceptance_ = self.summary_.acceptance
        self.n_features_in_ = m
        return self

    def correlation_band(self, pair=0):
        """(lower, median, upper) trajectories for one channel pair.

        Uses the first, middle and last configured percentile levels.
        """
        check_is_fitted(self, "summary_")
        values = self.corr_percentiles_[:, :, pair]
        return values[0], values[len(self.summary_.probs) // 2], values[-1]
