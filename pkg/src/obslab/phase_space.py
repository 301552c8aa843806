"""Phase matrices of phase-space phase observables E_T.

E_T(X) = (1/pi) int_X int_0^inf D(r e^{it}) T D(r e^{it})^* r dr dt with T
diagonal.  Since D(r e^{it}) = R(t) D(r) R(t)^* and R commutes with T, the
angular integral is exactly the covariant Fourier factor, leaving

    c[m, n] = 2 int_0^inf <m|D(r) T D(r)^*|n> r dr,

which is evaluated by Gauss-Legendre quadrature on [0, R].
"""

from dataclasses import dataclass
import math

import numpy as np
from scipy.special import gammaln

from .errors import BadState, QuadratureNotConverged
from .extremality import certify
from .fock_core import displacement_block
from .phase_observable import PhaseMatrix, kolmogorov_decompose, validate

DIAGONAL_TOL = 1e-6


@dataclass(frozen=True)
class DiagonalState:
    weights: tuple

    def __post_init__(self):
        w = np.asarray(self.weights, dtype=float)
        if w.ndim != 1 or w.size == 0 or not np.all(np.isfinite(w)):
            raise BadState("weights must be a non-empty list of finite numbers")
        if np.any(w < 0):
            raise BadState(f"negative weight {w.min():g}")
        if abs(math.fsum(w) - 1.0) > 1e-12:
            raise BadState(f"weights sum to {math.fsum(w)!r}, not 1")
        object.__setattr__(self, "weights", tuple(float(x) for x in w))

    @property
    def k(self):
        return len(self.weights)


def vacuum():
    return DiagonalState((1.0,))


def quadrature_rule(d, k, cutoff=None, nodes=None):
    """Gauss-Legendre nodes/weights on [0, R]; defaults scale with d + k."""
    if cutoff is None:
        cutoff = math.sqrt(2 * (d + k)) + 6
    if nodes is None:
        nodes = 4 * (d + k)
    x, w = np.polynomial.legendre.leggauss(nodes)
    return cutoff * (x + 1) / 2, cutoff * w / 2


def et_phase_matrix(T, d, cutoff=None, nodes=None):
    """Phase matrix of E_T truncated to d levels.

    Raises QuadratureNotConverged if the raw diagonal misses 1 by more than
    1e-6; otherwise the diagonal is renormalized to exactly 1.
    """
    if not isinstance(T, DiagonalState):
        T = DiagonalState(tuple(T))
    r, w = quadrature_rule(d, T.k, cutoff, nodes)
    B = displacement_block(r, d, T.k)  # B[m, j, node] = <m|D(r)|j>
    lam = np.asarray(T.weights)
    # D(r) is real for real r, so <m|D T D^*|n> = sum_j lam_j B[m,j] B[n,j]
    C = 2 * np.einsum("mjq,njq,j,q->mn", B, B, lam, w * r)
    diag = np.diag(C).copy()
    err = float(np.max(np.abs(diag - 1.0)))
    if err > DIAGONAL_TOL:
        raise QuadratureNotConverged(
            f"diagonal off by {err:.3e}; raise the cutoff or node count"
        )
    s = 1 / np.sqrt(diag)
    C = s[:, None] * C * s[None, :]
    C = (C + C.T) / 2
    np.fill_diagonal(C, 1.0)
    return validate(C.astype(complex))


def vacuum_closed_form(d):
    """c[m, n] = Gamma((m + n)/2 + 1) / sqrt(m! n!) for T = |0><0|."""
    m = np.arange(d)
    M, N = np.meshgrid(m, m, indexing="ij")
    return np.exp(gammaln((M + N) / 2 + 1) - 0.5 * (gammaln(M + 1) + gammaln(N + 1)))


def et_analysis(T, d, tol=1e-9):
    """(rank, certificate) for the truncated E_T."""
    C = et_phase_matrix(T, d)
    fam = kolmogorov_decompose(C, tol)
    return fam.r, certify(C, tol, fam)
