"""Dense symmetric positive-definite (SPD) matrix kernels.

Matrices are plain ``numpy.ndarray`` of shape (m, m), float64. Validation is
done at library boundaries with :func:`ensure_spd`; the kernels themselves
assume well-formed input and raise :class:`NotPositiveDefinite` when the
numbers say otherwise. All functions are pure; m = 2 takes closed-form paths
since that is the dimension the estimator runs at in practice.
"""

from __future__ import annotations

import math

import numpy as np

from .exceptions import DomainError, NotPositiveDefinite

# Relative tolerance for the symmetry invariant of SPD inputs.
SYMMETRY_RTOL = 1e-12
# Eigenvalues below EIG_FLOOR_REL * max eigenvalue count as numerically
# non-positive. Degeneracy must surface as an error (the sampler turns it
# into a rejected proposal), never as silent clamping.
EIG_FLOOR_REL = 1e-12


def symmetrize(M):
    """Return the symmetric part (M + M.T) / 2."""
    M = np.asarray(M, dtype=np.float64)
    return (M + M.T) / 2.0


def is_symmetric(M, rtol=SYMMETRY_RTOL):
    """Check |M_ij - M_ji| <= rtol * max(1, |M_ij|) entrywise."""
    M = np.asarray(M, dtype=np.float64)
    if M.ndim != 2 or M.shape[0] != M.shape[1]:
        return False
    diff = np.abs(M - M.T)
    bound = rtol * np.maximum(1.0, np.abs(M))
    return bool(np.all(diff <= bound))


def ensure_spd(M, name="matrix"):
    """Validate and return an SPD matrix (symmetrized copy).

    Parameters
    ----------
    M : array_like, shape (m, m)
        Candidate matrix. Must be square, symmetric within tolerance, and
        positive-definite (Cholesky must succeed).
    name : str
        Label used in error messages.

    Returns
    -------
    ndarray
        float64 copy, exactly symmetric.

    Raises
    ------
    NotPositiveDefinite
        If the matrix is not square/symmetric or has a non-positive pivot.
    """
    M = np.asarray(M, dtype=np.float64)
    if M.ndim != 2 or M.shape[0] != M.shape[1]:
        raise NotPositiveDefinite(f"{name} must be square, got shape {M.shape}")
    if not np.all(np.isfinite(M)):
        raise NotPositiveDefinite(f"{name} has non-finite entries")
    if not is_symmetric(M):
        raise NotPositiveDefinite(f"{name} is not symmetric within tolerance")
    M = symmetrize(M)
    cholesky(M)  # raises NotPositiveDefinite on failure
    return M


def cholesky(M):
    """Lower-triangular L with L @ L.T = M.

    Raises NotPositiveDefinite if a pivot is not strictly positive.
    """
    M = np.asarray(M, dtype=np.float64)
    if M.shape == (2, 2):
        a = M[0, 0]
        if a <= 0.0:
            raise NotPositiveDefinite("2x2 pivot 0 is not positive")
        l00 = math.sqrt(a)
        l10 = M[1, 0] / l00
        rest = M[1, 1] - l10 * l10
        if rest <= 0.0:
            raise NotPositiveDefinite("2x2 pivot 1 is not positive")
        return np.array([[l00, 0.0], [l10, math.sqrt(rest)]])
    try:
        return np.linalg.cholesky(M)
    except np.linalg.LinAlgError as exc:
        raise NotPositiveDefinite(str(exc)) from exc


def log_det(M):
    """ln|M| for SPD M, via 2 * sum(log(diag(cholesky(M))))."""
    M = np.asarray(M, dtype=np.float64)
    if M.shape == (2, 2):
        a, b, c = M[0, 0], M[0, 1], M[1, 1]
        det = a * c - b * b
        if a <= 0.0 or det <= 0.0:
            raise NotPositiveDefinite("2x2 matrix is not positive-definite")
        return math.log(det)
    L = cholesky(M)
    return 2.0 * float(np.sum(np.log(np.diag(L))))


def spd_inverse(M):
    """Inverse of an SPD matrix (symmetric by construction)."""
    M = np.asarray(M, dtype=np.float64)
    if M.shape == (2, 2):
        a, b, c = M[0, 0], M[0, 1], M[1, 1]
        det = a * c - b * b
        if det <= 0.0 or a <= 0.0:
            raise NotPositiveDefinite("2x2 matrix is not positive-definite")
        return np.array([[c, -b], [-b, a]]) / det
    L = cholesky(M)
    Linv = np.linalg.inv(L)
    return symmetrize(Linv.T @ Linv)




def frac_power(M, p):
    """Fractional power M**p of an SPD matrix via eigendecomposition.

    Returns V diag(w**p) V.T from M = V diag(w) V.T. Eigenvalues at or below
    EIG_FLOOR_REL times the largest eigenvalue raise NotPositiveDefinite.
    """
    M = np.asarray(M, dtype=np.float64)
    if M.shape == (2, 2):
        a, b, c = M[0, 0], M[0, 1], M[1, 1]
        mid = 0.5 * (a + c)
        disc = math.hypot(0.5 * (a - c), b)
        lo, hi = mid - disc, mid + disc
        if hi <= 0.0 or lo <= EIG_FLOOR_REL * hi:
            raise NotPositiveDefinite(
                "eigenvalue at or below the positive-definite floor"
            )
        if disc <= abs(mid) * 1e-15:
            f = mid ** p
            return np.array([[f, 0.0], [0.0, f]])
        if b == 0.0:
            return np.array([[a ** p, 0.0], [0.0, c ** p]])
        flo, fhi = lo ** p, hi ** p
        # eigenvector for hi, picking the cancellation-free row
        if a >= c:
            x, z = hi - c, b
        else:
            x, z = b, hi - a
        n = math.hypot(x, z)
        x, z = x / n, z / n
        off = (fhi - flo) * x * z
        return np.array(
            [[fhi * x * x + flo * z * z, off], [off, fhi * z * z + flo * x * x]]
        )
    w, V = np.linalg.eigh(M)
    w_max = w[-1]
    if w_max <= 0.0 or w[0] <= EIG_FLOOR_REL * w_max:
        raise NotPositiveDefinite("eigenvalue at or below the positive-definite floor")
    wp = w ** p
    return symmetrize((V * wp) @ V.T)


def to_correlation(Q):
    """Rescale SPD Q to unit diagonal: Omega_ij = Q_ij / sqrt(Q_ii * Q_jj)."""
    Q = np.asarray(Q, dtype=np.float64)
    if Q.shape == (2, 2):
        a, c = Q[0, 0], Q[1, 1]
        if a <= 0.0 or c <= 0.0:
            raise NotPositiveDefinite("diagonal entry is not positive")
        r = Q[0, 1] / math.sqrt(a * c)
        return np.array([[1.0, r], [r, 1.0]])
    dg = np.diag(Q)
    if np.any(dg <= 0.0):
        raise NotPositiveDefinite("diagonal entry is not positive")
    s = 1.0 / np.sqrt(dg)
    omega = Q * np.outer(s, s)
    np.fill_diagonal(omega, 1.0)
    return omega


def diag_sqrt(Q):
    """Diagonal matrix of square roots of diag(Q); off-diagonals ignored."""
    Q = np.asarray(Q, dtype=np.float64)
    if Q.shape == (2, 2):
        a, c = Q[0, 0], Q[1, 1]
        if a <= 0.0 or c <= 0.0:
            raise DomainError("diagonal entry is not positive")
        return np.array([[math.sqrt(a), 0.0], [0.0, math.sqrt(c)]])
    dg = np.diag(Q)
    if np.any(dg <= 0.0):
        raise DomainError("diagonal entry is not positive")
    return np.diag(np.sqrt(dg))


def mv_log_gamma(m, x):
    """Log multivariate gamma: (m(m-1)/4) ln pi + sum_i ln Gamma(x - (i-1)/2).

    Requires x > (m - 1)/2 so that every Gamma argument is positive.
    """
    if m < 1:
        raise DomainError(f"dimension must be >= 1, got {m}")
    if x <= (m - 1) / 2.0:
        raise DomainError(f"argument {x} <= (m-1)/2 = {(m - 1) / 2.0}")
    total = (m * (m - 1) / 4.0) * math.log(math.pi)
    for i in range(m):
        total += math.lgamma(x - i / 2.0)
    return total
