"""Truncated Fock-space primitives.

Everything lives in the span of the number states |0>, ..., |d-1>.  Matrices
are dense complex ``numpy`` arrays; amplitudes with large |z| or large
levels are assembled in log space so that d up to ~512 stays finite.
"""

import math

import numpy as np
from scipy.special import gammainc, gammaln

from .errors import InvalidInput

# above this |z|^2 the direct power series would overflow for large n
_LOG_SPACE_THRESHOLD = 50.0
_RESCALE = 1e150


def _check_d(d):
    if int(d) != d or d < 1:
        raise InvalidInput(f"truncation d must be a positive integer, got {d!r}")
    return int(d)


def coherent_vector(z, d):
    """Fock amplitudes ``exp(-|z|^2/2) z^n / sqrt(n!)`` for n < d."""
    d = _check_d(d)
    z = complex(z)
    n = np.arange(d)
    r2 = abs(z) ** 2
    if r2 == 0.0:
        out = np.zeros(d, dtype=complex)
        out[0] = 1.0
        return out
    if r2 <= _LOG_SPACE_THRESHOLD:
        mag = np.exp(-r2 / 2) * np.cumprod(np.r_[1.0, abs(z) / np.sqrt(n[1:])])
    else:
        mag = np.exp(-r2 / 2 + n * math.log(abs(z)) - 0.5 * gammaln(n + 1))
    return mag * np.exp(1j * n * np.angle(z))


def coherent_tail(z, d):
    """Photon-number mass of |z> lying at or above level d.

    Equals ``exp(-|z|^2) sum_{n>=d} |z|^{2n}/n!``, evaluated as the
    regularized lower incomplete gamma P(d, |z|^2) so that no cancellation
    against 1 occurs.
    """
    d = _check_d(d)
    r2 = abs(complex(z)) ** 2
    if r2 == 0.0:
        return 0.0
    return float(gammainc(d, r2))


def number_operator(d):
    d = _check_d(d)
    return np.diag(np.arange(d)).astype(complex)


def lowering_operator(d):
    """Matrix of a with <n|a|n+1> = sqrt(n+1)."""
    d = _check_d(d)
    return np.diag(np.sqrt(np.arange(1, d)), k=1).astype(complex)


def raising_operator(d):
    return lowering_operator(d).conj().T


def quadrature_Q(d):
    a = lowering_operator(d)
    return (a + a.conj().T) / math.sqrt(2)


def quadrature_P(d):
    a = lowering_operator(d)
    return 1j * (a.conj().T - a) / math.sqrt(2)


def rotation(theta, d):
    """Diagonal phase shifter R(theta) = exp(i theta N)."""
    d = _check_d(d)
    return np.diag(np.exp(1j * theta * np.arange(d)))


def _log_laguerre(degree, alpha, x):
    """Return (sign, log|L|) of the generalized Laguerre polynomial.

    Uses the three-term recurrence with periodic rescaling; ``x`` may be an
    array.
    """
    x = np.asarray(x, dtype=float)
    prev = np.ones_like(x)
    logscale = np.zeros_like(x)
    if degree == 0:
        return np.ones_like(x), np.zeros_like(x)
    cur = 1.0 + alpha - x
    for k in range(1, degree):
        nxt = ((2 * k + 1 + alpha - x) * cur - (k + alpha) * prev) / (k + 1)
        prev, cur = cur, nxt
        big = np.maximum(np.abs(cur), np.abs(prev))
        hit = big > _RESCALE
        if np.any(hit):
            cur = np.where(hit, cur / big, cur)
            prev = np.where(hit, prev / big, prev)
            logscale = logscale + np.where(hit, np.log(np.where(hit, big, 1.0)), 0.0)
    with np.errstate(divide="ignore"):
        return np.sign(cur), logscale + np.log(np.abs(cur))


def displacement_matrix_element(m, n, r):
    """<m|D(r)|n> for real r >= 0, where D(r) = exp(r(a* - a)).

    Closed form in associated Laguerre polynomials; ``r`` may be an array.
    """
    if m < 0 or n < 0:
        raise InvalidInput("Fock levels must be non-negative")
    r = np.asarray(r, dtype=float)
    if np.any(r < 0):
        raise InvalidInput("displacement radius must be non-negative")
    scalar = r.ndim == 0
    r = np.atleast_1d(r)
    lo, hi = min(m, n), max(m, n)
    sign, log_l = _log_laguerre(lo, hi - lo, r * r)
    out = np.zeros_like(r)
    pos = r > 0
    rp = r[pos]
    log_pref = 0.5 * (gammaln(lo + 1) - gammaln(hi + 1)) + (hi - lo) * np.log(rp) - rp * rp / 2
    out[pos] = sign[pos] * np.exp(log_pref + log_l[pos])
    if m == n:
        out[~pos] = 1.0
    if m < n and (n - m) % 2:
        out = -out
    return out[0] if scalar else out


def displacement_block(r, rows, cols):
    """Array ``B[i, j, k] = <i|D(r_k)|j>`` for i < rows, j < cols."""
    r = np.atleast_1d(np.asarray(r, dtype=float))
    out = np.empty((rows, cols, r.size))
    for i in range(rows):
        for j in range(cols):
            out[i, j] = displacement_matrix_element(i, j, r)
    return out


def suggested_truncation(z):
    """ceil(|z|^2 + 10|z| + 20): keeps the Poisson tail below 1e-10."""
    a = abs(complex(z))
    return int(math.ceil(a * a + 10 * a + 20))
