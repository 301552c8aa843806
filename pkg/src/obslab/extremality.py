"""Extreme-point test for truncated covariant observables.

An observable with minimal factorization (eta_n) in C^r is extreme exactly
when the only r x r matrix A with <eta_n|A eta_n> = 0 for every n is A = 0.
That is a rank condition on the linear map A -> (<eta_n|A eta_n>)_n.  When
it fails, a Hermitian kernel element A gives the explicit mixture
C = (C_+ + C_-)/2 with (C_+-)[m, n] = <eta_m|(I +- eps A) eta_n>.

All verdicts are statements about the truncated model only.
"""

from dataclasses import dataclass

import numpy as np

from .errors import EpsilonTooLarge, WitnessInvalid
from .phase_observable import (
    RANK_TOL,
    KolmogorovFamily,
    PhaseMatrix,
    _numerical_rank,
    kolmogorov_decompose,
    validate,
)

WITNESS_TOL = 1e-10


@dataclass(frozen=True, eq=False)
class ExtremalityCertificate:
    extreme: bool
    constraint_rank: int
    r: int
    d: int
    witness: np.ndarray = None
    split: tuple = None
    epsilon: float = None

    @property
    def verdict(self):
        return "extreme" if self.extreme else "not_extreme"

    @property
    def r_squared(self):
        return self.r * self.r


def build_constraint_matrix(fam):
    """``M[n, i*r + j] = conj(eta_n[i]) * eta_n[j]``.

    With row-major ``vec``, ``M @ A.ravel()`` lists the quadratic forms
    ``<eta_n|A eta_n>``.
    """
    eta = fam.vectors
    d = eta.shape[1]
    return np.einsum("in,jn->nij", eta.conj(), eta).reshape(d, -1)


def _constraint_svd(fam):
    M = build_constraint_matrix(fam)
    # full_matrices so the null space is available when d < r^2
    _, s, vh = np.linalg.svd(M, full_matrices=True)
    return s, vh


def _constraint_rank(fam, s, tol):
    # with d < r^2 the verdict follows from counting, so a cluster near the
    # cut cannot change it
    strict = fam.d >= fam.r**2
    return _numerical_rank(s, tol, "constraint singular values", strict)


def is_extreme(fam, tol=RANK_TOL):
    """``(extreme, constraint_rank)`` for a Kolmogorov family."""
    s, _ = _constraint_svd(fam)
    crank = _constraint_rank(fam, s, tol)
    return crank == fam.r**2, crank


def find_witness(fam, tol=RANK_TOL):
    """Unit-norm Hermitian A annihilated by every eta_n, or None if extreme."""
    s, vh = _constraint_svd(fam)
    r = fam.r
    crank = _constraint_rank(fam, s, tol)
    if crank == r * r:
        return None
    # rows of vh past the rank span the null space; the last one belongs to
    # the smallest singular value
    B = vh[-1].conj().reshape(r, r)
    A = (B + B.conj().T) / 2
    if np.linalg.norm(A) < 1e-8 * np.linalg.norm(B):
        A = 1j * (B - B.conj().T) / 2
    A = (A + A.conj().T) / 2
    return A / np.linalg.norm(A, 2)


def _forms(fam, A):
    eta = fam.vectors
    return np.einsum("in,ij,jn->n", eta.conj(), A, eta)


def convex_split(C, fam, A, epsilon=None):
    """Two distinct phase matrices whose average is ``C``.

    ``epsilon`` defaults to ``1 / (2 ||A||)``.
    """
    C = validate(C).C
    A = np.asarray(A, dtype=complex)
    r = fam.r
    if A.shape != (r, r):
        raise WitnessInvalid(f"witness shape {A.shape} does not match rank {r}")
    if np.max(np.abs(A - A.conj().T), initial=0.0) > 1e-12:
        raise WitnessInvalid("witness is not Hermitian")
    norm = np.linalg.norm(A, 2) if A.size else 0.0
    if norm == 0.0:
        raise WitnessInvalid("witness is zero")
    residue = float(np.max(np.abs(_forms(fam, A))))
    if residue > WITNESS_TOL * max(1.0, norm):
        raise WitnessInvalid(f"witness quadratic forms do not vanish ({residue:.3e})")
    if epsilon is None:
        epsilon = 1.0 / (2.0 * norm)
    if epsilon <= 0:
        raise EpsilonTooLarge("epsilon must be positive")
    lam = np.linalg.eigvalsh(A)
    if 1.0 - epsilon * max(abs(lam[0]), abs(lam[-1])) < -1e-12:
        raise EpsilonTooLarge(f"I - {epsilon:g} A is not positive semidefinite")
    eta = fam.vectors
    shift = eta.conj().T @ (epsilon * A) @ eta
    shift = (shift + shift.conj().T) / 2
    if np.max(np.abs(shift)) < 1e-12:
        raise WitnessInvalid("witness does not change the phase matrix")
    plus, minus = C + shift, C - shift
    np.fill_diagonal(plus, 1.0)
    np.fill_diagonal(minus, 1.0)
    return validate(plus), validate(minus), epsilon


def certify(C, tol=RANK_TOL, fam=None):
    """Full certificate: verdict, ranks, and witness and split if not extreme."""
    pm = validate(C)
    if fam is None:
        fam = kolmogorov_decompose(pm, tol)
    extreme, crank = is_extreme(fam, tol)
    if extreme:
        return ExtremalityCertificate(True, crank, fam.r, fam.d)
    A = find_witness(fam, tol)
    plus, minus, eps = convex_split(pm, fam, A)
    return ExtremalityCertificate(False, crank, fam.r, fam.d, A, (plus, minus), eps)


def dense_null_space_dim(fam, tol=1e-9):
    """Independent count of r x r matrices with all eta-forms zero.

    Builds the real-linear system on Hermitian A directly from a basis of
    Hermitian matrices and counts its null space with ``scipy.linalg``.
    """
    from scipy.linalg import null_space

    r = fam.r
    basis = []
    for i in range(r):
        for j in range(r):
            E = np.zeros((r, r), dtype=complex)
            if i == j:
                E[i, i] = 1
            elif i < j:
                E[i, j] = E[j, i] = 1
            else:
                E[j, i], E[i, j] = 1j, -1j
            basis.append(E)
    cols = [_forms(fam, E).real for E in basis]
    L = np.array(cols).T
    return null_space(L, rcond=tol).shape[1]
