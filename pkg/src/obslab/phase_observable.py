"""Phase matrices, their minimal Kolmogorov factorization and interval effects.

A covariant phase observable on a truncated Fock space is fixed by a
Hermitian positive semidefinite matrix ``C`` with unit diagonal.  The effect
of an arc ``[a, b)`` is ``C`` multiplied entrywise by the Fourier integrals
of the arc.
"""

from dataclasses import dataclass, field

import numpy as np

from .errors import BadInterval, DegenerateTolerance, NotRankOne, PhaseMatrixError

TWO_PI = 2 * np.pi

HERMITIAN_TOL = 1e-12
PSD_TOL = 1e-10
DIAG_TOL = 1e-12
RANK_TOL = 1e-9
# kept/dropped spectra closer than this factor make the rank ambiguous
DEGENERACY_FACTOR = 10.0


@dataclass(frozen=True)
class Violation:
    kind: str
    magnitude: float
    index: int = None

    def __str__(self):
        where = "" if self.index is None else f" at index {self.index}"
        return f"{self.kind}{where}: {self.magnitude:.3e}"

    def as_dict(self):
        out = {"kind": self.kind, "magnitude": self.magnitude}
        if self.index is not None:
            out["index"] = self.index
        return out


@dataclass(frozen=True, eq=False)
class PhaseMatrix:
    """Validated phase matrix; build it with :func:`validate`."""

    C: np.ndarray

    @property
    def d(self):
        return self.C.shape[0]


@dataclass(frozen=True, eq=False)
class KolmogorovFamily:
    """Unit vectors eta_n stored as the columns of an ``r x d`` array.

    ``<eta_m|eta_n> = vectors[:, m].conj() @ vectors[:, n]``.
    """

    vectors: np.ndarray
    tol: float = RANK_TOL
    eigenvalues: np.ndarray = field(default=None, repr=False)

    @property
    def r(self):
        return self.vectors.shape[0]

    @property
    def d(self):
        return self.vectors.shape[1]

    def gram(self):
        return self.vectors.conj().T @ self.vectors


def find_violations(C, tol=None):
    """Every phase-matrix invariant ``C`` breaks, as a list of Violation.

    ``tol`` overrides the Hermitian/diagonal tolerance (default 1e-12); the
    PSD floor stays at -1e-10.
    """
    C = np.asarray(C)
    if C.ndim != 2 or C.shape[0] != C.shape[1] or C.shape[0] == 0:
        return [Violation("NotSquare", float(max(C.shape) if C.ndim else 0))]
    if not np.all(np.isfinite(C)):
        return [Violation("NonFinite", float("nan"))]
    htol = HERMITIAN_TOL if tol is None else tol
    found = []
    herm = float(np.max(np.abs(C - C.conj().T)))
    if herm > htol:
        found.append(Violation("NotHermitian", herm))
    diag_err = np.abs(np.diag(C) - 1.0)
    for i in np.flatnonzero(diag_err > htol):
        found.append(Violation("BadDiagonal", float(diag_err[i]), int(i)))
    lam_min = float(np.linalg.eigvalsh((C + C.conj().T) / 2)[0])
    if lam_min < -PSD_TOL:
        found.append(Violation("NotPSD", lam_min))
    return found


def validate(C, tol=None):
    """Return a :class:`PhaseMatrix` or raise :class:`PhaseMatrixError`."""
    if isinstance(C, PhaseMatrix):
        return C
    C = np.array(C, dtype=complex)
    found = find_violations(C, tol)
    if found:
        raise PhaseMatrixError(found)
    return PhaseMatrix(C)


def canonical(d):
    """The all-ones phase matrix of the canonical phase."""
    return PhaseMatrix(np.ones((d, d), dtype=complex))


def _as_matrix(C):
    return C.C if isinstance(C, PhaseMatrix) else np.asarray(C, dtype=complex)


def _numerical_rank(values, tol, what, strict=True):
    """Count ``values`` above ``tol * max``.

    Raises DegenerateTolerance when the smallest kept and largest dropped
    values are closer than DEGENERACY_FACTOR, i.e. the cut sits inside a
    cluster.  ``values`` are non-negative magnitudes.
    """
    top = float(np.max(values)) if values.size else 0.0
    if top <= 0:
        return 0
    rel = values / top
    kept, dropped = rel[rel > tol], rel[rel <= tol]
    if strict and dropped.size and dropped.max() > 0:
        gap = kept.min() / dropped.max()
        if gap < DEGENERACY_FACTOR:
            raise DegenerateTolerance(
                f"{what} straddling the rank threshold {tol:g} differ by only "
                f"a factor {gap:.3g} ({kept.min():.3e} vs {dropped.max():.3e})"
            )
    return int(kept.size)


def rank_is_stable(C, tol=RANK_TOL, factor=DEGENERACY_FACTOR):
    """True when the numerical rank is the same at ``tol`` and ``tol*factor``."""
    C = _as_matrix(C)
    lam = np.clip(np.linalg.eigvalsh((C + C.conj().T) / 2), 0, None)
    rel = lam / lam.max()
    return int(np.sum(rel > tol)) == int(np.sum(rel > tol * factor))


def kolmogorov_decompose(C, tol=RANK_TOL):
    """Minimal factorization ``C[m, n] = <eta_m|eta_n>`` by eigendecomposition."""
    C = _as_matrix(validate(C))
    lam, V = np.linalg.eigh((C + C.conj().T) / 2)
    lam, V = lam[::-1], V[:, ::-1]
    r = _numerical_rank(np.clip(lam, 0, None), tol, "eigenvalues")
    vectors = np.sqrt(lam[:r])[:, None] * V[:, :r].conj().T
    return KolmogorovFamily(vectors, tol, lam)


def rank(C, tol=RANK_TOL):
    return kolmogorov_decompose(C, tol).r


def arc_integrals(k, a, b):
    """(1/2pi) * integral over [a, b) of exp(i k theta), elementwise in k."""
    k = np.asarray(k, dtype=float)
    out = np.empty(k.shape, dtype=complex)
    zero = k == 0
    out[zero] = (b - a) / TWO_PI
    kk = k[~zero]
    # e^{ik(a+b)/2} sin(k(b-a)/2) / (pi k), no cancellation for small k(b-a)
    out[~zero] = np.exp(0.5j * kk * (a + b)) * np.sin(0.5 * kk * (b - a)) / (np.pi * kk)
    return out


def _split_arc(a, b):
    """Reduce [a, b) to at most two arcs inside [0, 2pi)."""
    if not (np.isfinite(a) and np.isfinite(b)) or b < a or b - a > TWO_PI + 1e-12:
        raise BadInterval(f"[{a}, {b}) is not an arc of length at most 2*pi")
    if b - a >= TWO_PI:
        return [(0.0, TWO_PI)]
    a0 = a % TWO_PI
    b0 = a0 + (b - a)
    if b0 <= TWO_PI:
        return [(a0, b0)]
    return [(a0, TWO_PI), (0.0, b0 - TWO_PI)]


def interval_operator(C, a, b):
    """Matrix of E([a, b)); arcs running past 2pi wrap around."""
    C = _as_matrix(C)
    d = C.shape[0]
    idx = np.arange(d)
    k = idx[:, None] - idx[None, :]
    weights = sum(arc_integrals(k, lo, hi) for lo, hi in _split_arc(a, b))
    return C * weights


def rank_one_canonical_form(C, tol=RANK_TOL):
    """Phases alpha with C[m, n] = exp(i(alpha_m - alpha_n)), alpha_0 = 0.

    Returns ``(alpha, U)`` where ``U = diag(exp(i alpha))`` so that
    ``C = U @ ones @ U^*``.
    """
    fam = kolmogorov_decompose(C, tol)
    if fam.r != 1:
        raise NotRankOne(f"phase matrix has rank {fam.r}")
    # C[m, n] = conj(eta_m) eta_n, so alpha_n = -arg(eta_n) up to a constant
    eta = fam.vectors[0]
    alpha = np.mod(np.angle(eta[0]) - np.angle(eta), TWO_PI)
    alpha[0] = 0.0
    return alpha, np.diag(np.exp(1j * alpha))


def random_phase_matrix(d, r=None, rng=None):
    """Gram matrix of ``d`` random unit vectors in C^r (default r = d)."""
    rng = np.random.default_rng(rng)
    r = d if r is None else r
    v = rng.normal(size=(r, d)) + 1j * rng.normal(size=(r, d))
    v /= np.linalg.norm(v, axis=0)
    G = v.conj().T @ v
    G = (G + G.conj().T) / 2
    np.fill_diagonal(G, 1.0)
    return PhaseMatrix(G)
