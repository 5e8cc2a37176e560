"""Generative state-space model for dynamic correlations.

Observations y_k ~ N_m(0, Omega_k) where the correlation matrix Omega_k is
the unit-diagonal rescaling of a latent SPD matrix Q_k whose inverse evolves
as a Wishart autoregression:

    Q_k^-1 = (1/nu) * Q_{k-1}^{-d/2} E_k Q_{k-1}^{-d/2},   E_k ~ W_m(nu, I).

Equivalently Q_k^-1 ~ W_m(nu, Q_{k-1}^{-d} / nu). The chain starts at
Q_0 = I. Channel variances are fixed at one (inputs are standardized), so
the observation covariance is Omega_k itself.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .distributions import sample_mvn_zero, sample_wishart
from .exceptions import ConfigError
from .linalg import ensure_spd, frac_power, spd_inverse, to_correlation


@dataclass(frozen=True)
class ModelParams:
    """Scalar parameters of the latent dynamics.

    nu : Wishart degrees of freedom, must exceed the dimension m.
    d : persistence exponent in [-1, 1].
    m : observation dimension.
    """

    nu: float
    d: float
    m: int

    def __post_init__(self):
        if self.m < 1:
            raise ConfigError(f"dimension must be >= 1, got {self.m}")
        if not self.nu > self.m:
            raise ConfigError(f"nu must exceed m={self.m}, got {self.nu}")
        if not -1.0 <= self.d <= 1.0:
            raise ConfigError(f"d must lie in [-1, 1], got {self.d}")


@dataclass(frozen=True)
class Trajectory:
    """One simulated path: latent precision chain, correlations, observations."""

    q_inv_seq: np.ndarray  # (K, m, m), each SPD
    omega_seq: np.ndarray  # (K, m, m), unit diagonal
    y_seq: np.ndarray  # (K, m)
    params: ModelParams = field(repr=False)

    @property
    def K(self):
        return self.y_seq.shape[0]

    @property
    def m(self):
        return self.y_seq.shape[1]


def step_latent(rng, q_prev_inv, params):
    """One latent transition: draw Q_k^-1 given Q_{k-1}^-1.

    Returns (1/nu) * A E A with A = (Q_{k-1}^-1)^{d/2} and E ~ W_m(nu, I).
    The conditional mean is Q_{k-1}^{-d}.
    """
    A = frac_power(q_prev_inv, params.d / 2.0)
    E = sample_wishart(rng, params.nu, np.eye(params.m))
    return (A @ E @ A) / params.nu


def simulate(rng, params, K):
    """Simulate a trajectory of length K from Q_0 = I.

    Parameters
    ----------
    rng : RngStream
    params : ModelParams
    K : int
        Number of time steps, >= 1.

    Returns
    -------
    Trajectory
    """
    if K < 1:
        raise ConfigError(f"K must be >= 1, got {K}")
    m = params.m
    q_inv_seq = np.empty((K, m, m))
    omega_seq = np.empty((K, m, m))
    y_seq = np.empty((K, m))
    q_inv = np.eye(m)
    for k in range(K):
        q_inv = step_latent(rng, q_inv, params)
        ensure_spd(q_inv, name=f"Q_{k + 1}^-1")
        omega = to_correlation(spd_inverse(q_inv))
        q_inv_seq[k] = q_inv
        omega_seq[k] = omega
        y_seq[k] = sample_mvn_zero(rng, omega)
    return Trajectory(q_inv_seq=q_inv_seq, omega_seq=omega_seq, y_seq=y_seq, params=params)
