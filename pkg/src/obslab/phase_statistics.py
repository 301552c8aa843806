"""Coherent-state phase distributions and canonical-phase diagnostics."""

from dataclasses import dataclass

import numpy as np

from .errors import GridTooCoarse, ImaginaryResidue, TailTooLarge
from .fock_core import coherent_tail, coherent_vector, suggested_truncation
from .phase_observable import TWO_PI, canonical, validate

DEFAULT_GRID = 4096
MIN_VARIANCE_GRID = 512
IMAG_TOL = 1e-12
TAIL_TOL = 1e-10


@dataclass(frozen=True, eq=False)
class PhaseDensity:
    z: complex
    d: int
    theta: np.ndarray
    values: np.ndarray
    tail_bound: float

    def mass(self):
        """(1/2pi) times the periodic trapezoid integral of the density."""
        return float(np.mean(self.values))


@dataclass(frozen=True)
class UncertaintyReport:
    z: complex
    d: int
    phase_deviation: float
    number_deviation: float

    @property
    def product(self):
        return self.phase_deviation * self.number_deviation


def theta_grid(n=DEFAULT_GRID):
    return TWO_PI * np.arange(n) / n


def density(C, z, theta):
    """g(theta) with <z|E(X)|z> = (1/2pi) * integral over X of g.

    ``theta`` may be a scalar or an array.  The density is the quadratic
    form of ``C`` in the vector ``R(-theta)|z>``.
    """
    C = validate(C).C
    d = C.shape[0]
    v = coherent_vector(z, d)
    th = np.atleast_1d(np.asarray(theta, dtype=float))
    W = v[None, :] * np.exp(-1j * np.outer(th, np.arange(d)))
    g = np.einsum("km,km->k", W.conj(), W @ C.T)
    resid = float(np.max(np.abs(g.imag)))
    if resid > IMAG_TOL:
        raise ImaginaryResidue(f"density has imaginary part {resid:.3e}")
    g = g.real
    return g[0] if np.ndim(theta) == 0 else g


def phase_density(C, z, grid=DEFAULT_GRID):
    C = validate(C)
    if grid <= 2 * C.d:
        raise GridTooCoarse(f"grid of {grid} points does not exceed 2d = {2 * C.d}")
    th = theta_grid(grid)
    return PhaseDensity(complex(z), C.d, th, density(C, z, th), coherent_tail(z, C.d))


def peak_dominance(C, z):
    """Densities of ``C`` and of the canonical phase at arg z.

    Returns ``(g, g_can, dominated)`` with ``dominated = g <= g_can + 1e-10``.
    """
    C = validate(C)
    at = float(np.angle(z))
    g = density(C, z, at)
    g_can = density(canonical(C.d), z, at)
    return g, g_can, bool(g <= g_can + 1e-10)


def min_circular_deviation(values, theta=None):
    """Smallest standard deviation over all 2pi windows starting on the grid.

    ``values`` are density samples on a uniform periodic grid starting at 0.
    """
    g = np.asarray(values, dtype=float)
    n = g.size
    if n < MIN_VARIANCE_GRID:
        raise GridTooCoarse(f"need at least {MIN_VARIANCE_GRID} grid points, got {n}")
    h = TWO_PI / n
    w = g / g.sum()
    # window starting at grid index j: angles j*h + i*h, i = 0..n-1
    offs = h * np.arange(n)
    best = np.inf
    for j in range(n):
        wj = np.roll(w, -j)
        mu = wj @ offs
        var = wj @ (offs - mu) ** 2
        if var < best:
            best = var
    return float(np.sqrt(best))


def number_deviation(z, d=None):
    """Standard deviation of N in the truncated, renormalized coherent state."""
    d = suggested_truncation(z) if d is None else d
    tail = coherent_tail(z, d)
    if tail > TAIL_TOL:
        raise TailTooLarge(f"photon-number tail {tail:.3e} at d={d}")
    p = np.abs(coherent_vector(z, d)) ** 2
    p /= p.sum()
    n = np.arange(d)
    mean = p @ n
    return float(np.sqrt(max(p @ (n - mean) ** 2, 0.0)))


def uncertainty_product(z, d=None, grid=DEFAULT_GRID):
    """Canonical-phase deviation times number deviation for |z>."""
    d = suggested_truncation(z) if d is None else d
    dn = number_deviation(z, d)
    dens = phase_density(canonical(d), z, grid)
    return UncertaintyReport(complex(z), d, min_circular_deviation(dens.values), dn)


def fwhm(values):
    """Full width at half maximum of a periodic density sampled on [0, 2pi).

    Crossings are located by linear interpolation; a density that never
    falls to half its peak (including a flat one) has width 2pi.
    """
    g = np.asarray(values, dtype=float)
    n = g.size
    h = TWO_PI / n
    k = int(np.argmax(g))
    half = g[k] / 2
    g = np.roll(g, n // 2 - k)
    c = n // 2
    below = np.flatnonzero(g < half)
    if below.size == 0:
        return TWO_PI
    right = below[below > c]
    left = below[below < c]
    if right.size == 0 or left.size == 0:
        return TWO_PI
    i, j = right[0], left[-1]
    x_right = (i - 1) + (g[i - 1] - half) / (g[i - 1] - g[i])
    x_left = j + (half - g[j]) / (g[j + 1] - g[j])
    return float(min((x_right - x_left) * h, TWO_PI))


def delta_limit_widths(amplitudes, d=None, grid=DEFAULT_GRID):
    """FWHM of the canonical phase density for each amplitude |z|."""
    widths = []
    for a in amplitudes:
        dd = suggested_truncation(a) if d is None else d
        widths.append(fwhm(phase_density(canonical(dd), a, grid).values))
    return widths
