"""Fuzzy rotated quadratures on a uniform momentum grid.

In the rotated momentum representation a covariant quadrature F_theta is
fixed by a unit-diagonal PSD kernel K(p, p') = <eta_p|eta_p'>, with

    F_theta(X)(p, p') = K(p, p') (1/2pi) int_X exp(i(p - p')x) dx.

Here p runs over a finite uniform grid, so K is an n x n matrix and every
phase-matrix tool (validation, factorization, extremality) applies to it
with grid points in place of Fock levels.
"""

from dataclasses import dataclass, field
import math

import numpy as np

from .errors import BadInterval, InvalidInput
from .extremality import certify
from .fock_core import quadrature_P, quadrature_Q, rotation
from .phase_observable import (
    TWO_PI,
    arc_integrals,
    rank_one_canonical_form,
    validate,
)

GRID_TOL = 1e-14
TOEPLITZ_TOL = 1e-12


@dataclass(frozen=True)
class MomentumGrid:
    p0: float
    h: float
    n: int

    def __post_init__(self):
        if self.n < 2 or not self.h > 0:
            raise InvalidInput("grid needs n >= 2 points and positive spacing")

    @property
    def points(self):
        return self.p0 + self.h * np.arange(self.n)

    @classmethod
    def centered(cls, n, h=1.0):
        return cls(-(n - 1) * h / 2, h, n)

    @classmethod
    def from_points(cls, points):
        p = np.asarray(points, dtype=float)
        if p.size < 2:
            raise InvalidInput("grid needs at least two points")
        steps = np.diff(p)
        if np.max(np.abs(steps - steps[0])) > GRID_TOL * max(1.0, np.max(np.abs(p))):
            raise InvalidInput("grid spacing is not uniform")
        return cls(float(p[0]), float(steps[0]), int(p.size))


@dataclass(frozen=True, eq=False)
class QuadratureKernel:
    grid: MomentumGrid
    K: np.ndarray
    theta: float = 0.0

    def __post_init__(self):
        pm = validate(self.K)
        if pm.d != self.grid.n:
            raise InvalidInput(f"kernel size {pm.d} does not match grid size {self.grid.n}")
        object.__setattr__(self, "K", pm.C)

    @property
    def differences(self):
        p = self.grid.points
        return p[:, None] - p[None, :]


@dataclass(frozen=True)
class ProbabilityMeasureSpec:
    """Closed-form noise distribution: point mass, Gaussian or uniform."""

    family: str
    params: dict = field(default_factory=dict)

    def __post_init__(self):
        object.__setattr__(self, "params", {k: float(v) for k, v in self.params.items()})
        fam, prm = self.family, self.params
        if fam == "point":
            prm.setdefault("at", 0.0)
        elif fam == "gaussian":
            prm.setdefault("mean", 0.0)
            prm.setdefault("sigma", 1.0)
            if not prm["sigma"] > 0:
                raise InvalidInput("Gaussian sigma must be positive")
        elif fam == "uniform":
            prm.setdefault("a", -1.0)
            prm.setdefault("b", 1.0)
            if not prm["b"] > prm["a"]:
                raise InvalidInput("uniform needs a < b")
        else:
            raise InvalidInput(f"unknown distribution family {fam!r}")

    def characteristic(self, t):
        """E[exp(i t Y)] for Y distributed by this measure."""
        t = np.asarray(t, dtype=float)
        prm = self.params
        if self.family == "point":
            return np.exp(1j * t * prm["at"])
        if self.family == "gaussian":
            return np.exp(1j * t * prm["mean"] - 0.5 * (prm["sigma"] * t) ** 2)
        a, b = prm["a"], prm["b"]
        # mean of exp(ity) over [a, b) is arc_integrals rescaled by 2pi/(b-a)
        return arc_integrals(t, a, b) * (TWO_PI / (b - a))


def sharp_kernel(grid, theta=0.0, phases=None):
    """All-ones kernel, or exp(i(alpha_i - alpha_j)) when ``phases`` given."""
    if phases is None:
        return QuadratureKernel(grid, np.ones((grid.n, grid.n), dtype=complex), theta)
    u = np.exp(1j * np.asarray(phases, dtype=float))
    K = np.outer(u, u.conj())
    np.fill_diagonal(K, 1.0)
    return QuadratureKernel(grid, K, theta)


def convolution_kernel(rho, grid, theta=0.0):
    """Kernel of the smeared quadrature F(X) = int rho(X - x) dPi_Q(x).

    Substituting the sharp kernel gives K(p, p') = rho_hat(p' - p).
    """
    p = grid.points
    K = rho.characteristic(p[None, :] - p[:, None])
    K = (K + K.conj().T) / 2
    np.fill_diagonal(K, 1.0)
    lam_min = float(np.linalg.eigvalsh(K)[0])
    if lam_min < -1e-10:
        raise InvalidInput(f"characteristic-function kernel is not PSD ({lam_min:.3e})")
    return QuadratureKernel(grid, K, theta)


def _check_interval(a, b):
    if not (np.isfinite(a) and np.isfinite(b)) or b < a:
        raise BadInterval(f"[{a}, {b}) is not a finite interval")


def interval_kernel(kernel, a, b):
    """Kernel of F_theta([a, b)): K times the closed-form x-integral."""
    _check_interval(a, b)
    return kernel.K * arc_integrals(kernel.differences, a, b)


def covariance_check(kernel, a, b, q):
    """Max entry gap between exp(iqP) F(X) exp(-iqP) and F(X + q).

    P acts by multiplication with p, so conjugation multiplies entry (i, j)
    by exp(i(p_i - p_j)q).
    """
    lhs = np.exp(1j * kernel.differences * q) * interval_kernel(kernel, a, b)
    rhs = interval_kernel(kernel, a + q, b + q)
    return float(np.max(np.abs(lhs - rhs)))


def invariance_check(kernel, tol=TOEPLITZ_TOL):
    """Whether the kernel commutes with momentum shifts, i.e. is Toeplitz."""
    K = kernel.K
    return bool(np.max(np.abs(K[1:, 1:] - K[:-1, :-1]), initial=0.0) <= tol)


def quadrature_extremality(kernel, tol=1e-9):
    """Extremality certificate with grid points standing in for all p."""
    return certify(kernel.K, tol)


def recover_phases(kernel, tol=1e-9):
    """Phases alpha (alpha_0 = 0) of a rank-1 kernel K = exp(i(alpha_i - alpha_j))."""
    alpha, _ = rank_one_canonical_form(kernel.K, tol)
    return alpha


def effect_matrix(kernel, a, b):
    """Discretized effect h * F([a, b)) on the grid.

    On a grid of spacing h the x-integrals of one period 2pi/h add up to the
    identity, so for intervals no longer than that the result lies between
    0 and I.  Projections (eigenvalues 0 or 1 only) would signal a spectral
    measure.
    """
    _check_interval(a, b)
    if b - a > TWO_PI / kernel.grid.h * (1 + 1e-12):
        raise BadInterval("interval longer than the grid's period 2pi/h")
    return kernel.grid.h * interval_kernel(kernel, a, b)


def effect_spectrum(kernel, a, b):
    return np.linalg.eigvalsh(effect_matrix(kernel, a, b))


def rotate_frame(theta, d):
    """Truncated rotated quadratures (Q_theta, P_theta).

    Raises ArithmeticError if P_theta and Q_{theta + pi/2} disagree beyond
    1e-13.
    """
    R = rotation(theta, d)
    Q_theta = R @ quadrature_Q(d) @ R.conj().T
    P_theta = R @ quadrature_P(d) @ R.conj().T
    R90 = rotation(theta + math.pi / 2, d)
    Q_shift = R90 @ quadrature_Q(d) @ R90.conj().T
    gap = float(np.max(np.abs(P_theta - Q_shift)))
    if gap > 1e-13:
        raise ArithmeticError(f"P_theta differs from Q_(theta+pi/2) by {gap:.3e}")
    return Q_theta, P_theta


def fourier_plancherel(d):
    """R(pi/2), the truncated Fourier-Plancherel operator."""
    return rotation(math.pi / 2, d)
