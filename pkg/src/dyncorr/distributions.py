"""Seedable sampling and log-densities for the model and sampler.

Scalar primitives (normal, gamma, chi-square, beta, uniform) come from
``numpy.random.Generator`` with the PCG64 bit generator, so streams are
deterministic per seed and cheap to spawn. Matrix-variate sampling (Wishart
via the Bartlett decomposition) and the proposal parameterizations are
implemented here. Densities are computed and consumed in log domain; -inf is
a first-class value meaning out-of-support.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .exceptions import DomainError, NotPositiveDefinite
from .linalg import cholesky, mv_log_gamma

LOG_TWO_PI = math.log(2.0 * math.pi)
NEG_INF = float("-inf")


class RngStream:
    """Deterministic, spawnable random stream (PCG64).

    Identical seeds produce identical sample streams within one build.
    ``spawn`` yields independent child streams for concurrent chains.
    """

    def __init__(self, seed=None, _seed_seq=None):
        if _seed_seq is not None:
            self._seed_seq = _seed_seq
        else:
            self._seed_seq = np.random.SeedSequence(seed)
        self.seed = seed
        self.generator = np.random.Generator(np.random.PCG64(self._seed_seq))

    def spawn(self, n):
        """Return n independent child streams."""
        return [RngStream(seed=self.seed, _seed_seq=ss) for ss in self._seed_seq.spawn(n)]

    def __repr__(self):
        return f"RngStream(seed={self.seed!r})"


def sample_std_normal_vec(rng, m):
    """Vector of m i.i.d. standard normal draws."""
    if m < 1:
        raise DomainError(f"dimension must be >= 1, got {m}")
    return rng.generator.standard_normal(m)


def sample_mvn_zero(rng, sigma):
    """Draw from N_m(0, sigma) as L @ z with L = cholesky(sigma)."""
    L = cholesky(sigma)
    return L @ rng.generator.standard_normal(L.shape[0])


def logpdf_mvn_zero(y, sigma):
    """Log density of N_m(0, sigma) at y, via the Cholesky factor."""
    sigma = np.asarray(sigma, dtype=np.float64)
    if sigma.shape == (2, 2):
        a, b, c = sigma[0, 0], sigma[0, 1], sigma[1, 1]
        det = a * c - b * b
        if a <= 0.0 or det <= 0.0:
            raise NotPositiveDefinite("2x2 covariance is not positive-definite")
        y0, y1 = y[0], y[1]
        quad = (c * y0 * y0 - 2.0 * b * y0 * y1 + a * y1 * y1) / det
        return -LOG_TWO_PI - 0.5 * math.log(det) - 0.5 * quad
    L = cholesky(sigma)
    m = L.shape[0]
    z = np.linalg.solve(L, np.asarray(y, dtype=np.float64))
    quad = float(z @ z)
    half_logdet = float(np.sum(np.log(np.diag(L))))
    return -0.5 * m * LOG_TWO_PI - half_logdet - 0.5 * quad


def sample_wishart(rng, nu, S):
    """Draw from the Wishart W_m(nu, S) via the Bartlett decomposition.

    X = (L A)(L A).T where L = cholesky(S), A is lower-triangular with
    A_ii = sqrt(chi-square(nu - i)) (0-based i) and standard normal
    subdiagonals. E[X] = nu * S.

    Parameters
    ----------
    rng : RngStream
    nu : float
        Degrees of freedom, must exceed m - 1.
    S : ndarray, shape (m, m)
        SPD scale matrix.
    """
    S = np.asarray(S, dtype=np.float64)
    m = S.shape[0]
    if nu <= m - 1:
        raise DomainError(f"degrees of freedom {nu} <= m - 1 = {m - 1}")
    L = cholesky(S)
    gen = rng.generator
    if m == 2:
        a00 = math.sqrt(gen.chisquare(nu))
        a11 = math.sqrt(gen.chisquare(nu - 1.0))
        a10 = gen.standard_normal()
        b00 = L[0, 0] * a00
        b10 = L[1, 0] * a00 + L[1, 1] * a10
        b11 = L[1, 1] * a11
        off = b00 * b10
        return np.array([[b00 * b00, off], [off, b10 * b10 + b11 * b11]])
    A = np.zeros((m, m))
    for i in range(m):
        A[i, i] = math.sqrt(gen.chisquare(nu - i))
        for j in range(i):
            A[i, j] = gen.standard_normal()
    B = L @ A
    return B @ B.T


def logpdf_wishart(X, nu, S):
    """Log Wishart density: the exponentiated value integrates to one.

    -(nu*m/2) ln 2 - ln Gamma_m(nu/2) - (nu/2) ln|S|
    + ((nu - m - 1)/2) ln|X| - (1/2) Tr(S^-1 X).
    """
    X = np.asarray(X, dtype=np.float64)
    S = np.asarray(S, dtype=np.float64)
    m = X.shape[0]
    if nu <= m - 1:
        raise DomainError(f"degrees of freedom {nu} <= m - 1 = {m - 1}")
    if m == 2:
        sa, sb, sc = S[0, 0], S[0, 1], S[1, 1]
        det_s = sa * sc - sb * sb
        if sa <= 0.0 or det_s <= 0.0:
            raise NotPositiveDefinite("2x2 scale is not positive-definite")
        xa, xb, xc = X[0, 0], X[0, 1], X[1, 1]
        det_x = xa * xc - xb * xb
        if xa <= 0.0 or det_x <= 0.0:
            raise NotPositiveDefinite("2x2 argument is not positive-definite")
        tr = (sc * xa - 2.0 * sb * xb + sa * xc) / det_s
        half = nu / 2.0
        return (
            -nu * math.log(2.0)
            - (0.5 * math.log(math.pi) + math.lgamma(half) + math.lgamma(half - 0.5))
            - half * math.log(det_s)
            + 0.5 * (nu - 3.0) * math.log(det_x)
            - 0.5 * tr
        )
    Ls = cholesky(S)
    Lx = cholesky(X)
    log_det_S = 2.0 * float(np.sum(np.log(np.diag(Ls))))
    log_det_X = 2.0 * float(np.sum(np.log(np.diag(Lx))))
    # Tr(S^-1 X) = ||Ls^-1 Lx||_F^2
    W = np.linalg.solve(Ls, Lx)
    tr = float(np.sum(W * W))
    return (
        -0.5 * nu * m * math.log(2.0)
        - mv_log_gamma(m, nu / 2.0)
        - 0.5 * nu * log_det_S
        + 0.5 * (nu - m - 1) * log_det_X
        - 0.5 * tr
    )


@dataclass(frozen=True)
class ShiftedGammaParams:
    """Gamma(alpha_p, rate beta_p) shifted right by `shift` (= m)."""

    alpha_p: float
    beta_p: float
    shift: float


def shifted_gamma_params(nu_M, nu_var, m):
    """Mode/variance-matched shifted-Gamma proposal parameters.

    Solves for (alpha_p, beta_p) so that the Gamma shifted by m has its mode
    at nu_M and variance nu_var:

        beta_p = ((nu_M - m) + sqrt((nu_M - m)^2 + 4 nu_var)) / (2 nu_var)
        alpha_p = 1 + (nu_M - m) beta_p
    """
    if nu_M <= m:
        raise DomainError(f"mode {nu_M} must exceed the shift {m}")
    if nu_var <= 0:
        raise DomainError(f"variance must be positive, got {nu_var}")
    gap = nu_M - m
    beta_p = (gap + math.sqrt(gap * gap + 4.0 * nu_var)) / (2.0 * nu_var)
    alpha_p = 1.0 + gap * beta_p
    return ShiftedGammaParams(alpha_p=alpha_p, beta_p=beta_p, shift=float(m))


def sample_shifted_gamma(rng, params):
    """Draw nu* = shift + Gamma(alpha_p, rate beta_p); always > shift."""
    return params.shift + rng.generator.gamma(params.alpha_p, 1.0 / params.beta_p)


def logpdf_shifted_gamma(nu, params):
    """Log density of the shifted Gamma at nu; -inf for nu <= shift."""
    t = nu - params.shift
    if t <= 0.0:
        return NEG_INF
    a, b = params.alpha_p, params.beta_p
    return a * math.log(b) - math.lgamma(a) + (a - 1.0) * math.log(t) - b * t


@dataclass(frozen=True)
class ScaledBetaParams:
    """Beta(a_p, 1/a_p) on (0, 1), mapped to (-1, 1) by d = 2x - 1."""

    a_p: float
    b_p: float


def beta_prop_param(d_A, a_f):
    """Mean-matched scaled-Beta proposal parameter with clamping.

    a_p = clamp(sqrt(mu / (1 - mu)), 1/a_f, a_f) with mu = (1 + d_A)/2 and
    b_p = 1/a_p. Unclamped, the induced distribution on d has mean d_A.
    """
    if not -1.0 <= d_A <= 1.0:
        raise DomainError(f"mean {d_A} outside [-1, 1]")
    if a_f <= 1.0:
        raise DomainError(f"clamp threshold must exceed 1, got {a_f}")
    mu = (1.0 + d_A) / 2.0
    if mu <= 0.0:
        a_p = 1.0 / a_f
    elif mu >= 1.0:
        a_p = a_f
    else:
        a_p = min(max(math.sqrt(mu / (1.0 - mu)), 1.0 / a_f), a_f)
    return ScaledBetaParams(a_p=a_p, b_p=1.0 / a_p)


def sample_scaled_beta(rng, params):
    """Draw d* = 2x - 1 with x ~ Beta(a_p, b_p); lies in (-1, 1)."""
    return 2.0 * rng.generator.beta(params.a_p, params.b_p) - 1.0


def logpdf_scaled_beta(d, params):
    """Log density of the scaled Beta at d; -inf outside (-1, 1).

    The 1/2 factor is the Jacobian of x = (d + 1)/2.
    """
    if not -1.0 < d < 1.0:
        return NEG_INF
    x = (d + 1.0) / 2.0
    a, b = params.a_p, params.b_p
    log_beta_fn = math.lgamma(a) + math.lgamma(b) - math.lgamma(a + b)
    return (a - 1.0) * math.log(x) + (b - 1.0) * math.log1p(-x) - log_beta_fn - math.log(2.0)


def logpdf_prior_nu(nu, alpha_nu, beta_nu, m):
    """Log prior for the degrees of freedom: Gamma(alpha_nu, beta_nu) on nu - m.

    Standard Gamma normalizer; the constant cancels in every MH ratio.
    """
    if alpha_nu <= 0 or beta_nu <= 0:
        raise DomainError("prior hyperparameters must be positive")
    t = nu - m
    if t <= 0.0:
        return NEG_INF
    return (
        alpha_nu * math.log(beta_nu)
        - math.lgamma(alpha_nu)
        + (alpha_nu - 1.0) * math.log(t)
        - beta_nu * t
    )


def logpdf_prior_d(d):
    """Log prior for the persistence exponent: uniform 1/2 on [-1, 1]."""
    if -1.0 <= d <= 1.0:
        return -math.log(2.0)
    return NEG_INF
