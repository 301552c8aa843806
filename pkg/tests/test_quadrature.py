import math

import numpy as np
import pytest

from obslab.errors import BadInterval, InvalidInput
from obslab.extremality import dense_null_space_dim
from obslab.phase_observable import kolmogorov_decompose, validate
from obslab.quadrature import (
    MomentumGrid,
    ProbabilityMeasureSpec,
    QuadratureKernel,
    convolution_kernel,
    covariance_check,
    effect_spectrum,
    fourier_plancherel,
    interval_kernel,
    invariance_check,
    quadrature_extremality,
    recover_phases,
    rotate_frame,
    sharp_kernel,
)
from obslab.fock_core import quadrature_Q

GAUSS = ProbabilityMeasureSpec("gaussian", {"sigma": 1.0})


def sinc_oracle(t):
    return np.where(t == 0, 1.0, np.sin(t) / np.where(t == 0, 1.0, t))


class TestGrid:
    def test_centered(self):
        np.testing.assert_allclose(MomentumGrid.centered(4, 0.5).points, [-0.75, -0.25, 0.25, 0.75])

    def test_from_points(self):
        assert MomentumGrid.from_points([0, 0.5, 1.0]).h == 0.5
        with pytest.raises(InvalidInput):
            MomentumGrid.from_points([0, 0.5, 1.1])
        with pytest.raises(InvalidInput):
            MomentumGrid(0, 1, 1)


class TestKernels:
    def test_sharp(self):
        k = sharp_kernel(MomentumGrid.centered(4))
        np.testing.assert_array_equal(k.K, np.ones((4, 4)))
        assert kolmogorov_decompose(k.K).r == 1
        assert quadrature_extremality(k).extreme

    def test_sharp_with_phases(self, rng):
        alpha = rng.uniform(0, 2 * np.pi, 10)
        k = sharp_kernel(MomentumGrid.centered(10), phases=alpha)
        cert = quadrature_extremality(k)
        assert cert.extreme and cert.r == 1

    def test_point_mass_is_sharp(self):
        g = MomentumGrid.centered(6, 0.7)
        k = convolution_kernel(ProbabilityMeasureSpec("point"), g)
        np.testing.assert_allclose(k.K, 1, atol=1e-15)

    def test_shifted_point_mass_shifts_effects(self):
        g = MomentumGrid.centered(6, 0.7)
        k = convolution_kernel(ProbabilityMeasureSpec("point", {"at": 0.7}), g)
        # F(X) = Pi_Q(X - 0.7)
        np.testing.assert_allclose(interval_kernel(k, 0, 1),
                                   interval_kernel(sharp_kernel(g), -0.7, 0.3), atol=1e-15)

    def test_gaussian(self):
        g = MomentumGrid.centered(8, 0.6)
        k = convolution_kernel(GAUSS, g)
        p = g.points
        np.testing.assert_allclose(k.K, np.exp(-np.subtract.outer(p, p) ** 2 / 2), atol=1e-15)

    def test_uniform(self):
        g = MomentumGrid.centered(9, 0.8)
        k = convolution_kernel(ProbabilityMeasureSpec("uniform", {"a": -1, "b": 1}), g)
        np.testing.assert_allclose(k.K, sinc_oracle(np.subtract.outer(g.points, g.points)), atol=1e-15)

    @pytest.mark.parametrize("spec", [
        ProbabilityMeasureSpec("gaussian", {"sigma": 0.3, "mean": 1.2}),
        ProbabilityMeasureSpec("gaussian", {"sigma": 2.0}),
        ProbabilityMeasureSpec("uniform", {"a": -0.5, "b": 2.0}),
        ProbabilityMeasureSpec("point", {"at": -3.0}),
    ])
    @pytest.mark.parametrize("n,h", [(16, 0.5), (64, 0.2), (128, 0.1)])
    def test_bochner_psd(self, spec, n, h):
        k = convolution_kernel(spec, MomentumGrid.centered(n, h))
        assert np.linalg.eigvalsh(k.K)[0] >= -1e-10

    def test_bad_family(self):
        with pytest.raises(InvalidInput):
            ProbabilityMeasureSpec("cauchy")

    def test_kernel_rejects_size_mismatch(self):
        with pytest.raises(InvalidInput):
            QuadratureKernel(MomentumGrid.centered(3), np.eye(4))


class TestIntervalKernel:
    def test_closed_form(self):
        g = MomentumGrid.centered(5, 0.9)
        k = sharp_kernel(g)
        L = 3.0
        dp = np.subtract.outer(g.points, g.points)
        F = interval_kernel(k, -L, L)
        expected = np.where(dp == 0, 2 * L / (2 * np.pi),
                            np.sin(L * dp) / (np.pi * np.where(dp == 0, 1, dp)))
        np.testing.assert_allclose(F, expected, atol=1e-15)

    def test_empty(self):
        k = convolution_kernel(GAUSS, MomentumGrid.centered(4))
        np.testing.assert_array_equal(interval_kernel(k, 0, 0), 0)

    def test_additive(self):
        k = convolution_kernel(GAUSS, MomentumGrid.centered(6, 0.4))
        np.testing.assert_allclose(interval_kernel(k, -1, 0.5) + interval_kernel(k, 0.5, 2),
                                   interval_kernel(k, -1, 2), atol=1e-14)

    def test_bad_interval(self):
        with pytest.raises(BadInterval):
            interval_kernel(sharp_kernel(MomentumGrid.centered(3)), 1, 0)


class TestCovarianceInvariance:
    def test_zero_shift(self):
        k = convolution_kernel(GAUSS, MomentumGrid.centered(8))
        assert covariance_check(k, -2, 1, 0.0) == 0

    @pytest.mark.parametrize("kernel,a,b,q", [
        (sharp_kernel(MomentumGrid.centered(8)), 0, 1, 0.7),
        (convolution_kernel(GAUSS, MomentumGrid.centered(8)), -2, 1, -1.3),
    ])
    def test_shift(self, kernel, a, b, q):
        assert covariance_check(kernel, a, b, q) < 1e-13

    def test_toeplitz_positive(self):
        for spec in [GAUSS, ProbabilityMeasureSpec("uniform"), ProbabilityMeasureSpec("point", {"at": 2})]:
            assert invariance_check(convolution_kernel(spec, MomentumGrid.centered(7, 0.3)))
        assert invariance_check(sharp_kernel(MomentumGrid.centered(5)))

    def test_toeplitz_negative(self):
        v = np.array([[1, 1, 1, 0], [0, 1, 3, 1]], dtype=complex)
        v /= np.linalg.norm(v, axis=0)
        K = v.conj().T @ v
        np.fill_diagonal(K, 1)
        k = QuadratureKernel(MomentumGrid.centered(4), K)
        assert K[0, 1] != pytest.approx(K[1, 2])
        assert not invariance_check(k)

    def test_random_phases_break_invariance(self, rng):
        k = sharp_kernel(MomentumGrid.centered(6), phases=rng.uniform(0, 6, 6))
        assert not invariance_check(k)


class TestExtremality:
    def test_gaussian_not_extreme(self):
        k = convolution_kernel(GAUSS, MomentumGrid.centered(8))
        cert = quadrature_extremality(k)
        assert cert.r == 8 and cert.verdict == "not_extreme"
        plus, minus = cert.split
        assert np.max(np.abs((plus.C + minus.C) / 2 - k.K)) < 1e-12

    def test_alternating_rank_two(self, rng):
        u, w = rng.normal(size=(2, 2)) + 1j * rng.normal(size=(2, 2))
        v = np.stack([u if i % 2 == 0 else w for i in range(9)], axis=1)
        v /= np.linalg.norm(v, axis=0)
        K = v.conj().T @ v
        np.fill_diagonal(K, 1)
        cert = quadrature_extremality(QuadratureKernel(MomentumGrid.centered(9), K))
        fam = kolmogorov_decompose(K)
        assert cert.r == 2
        assert cert.extreme == (cert.constraint_rank == 4)
        assert cert.extreme == (dense_null_space_dim(fam) == 0)
        assert not cert.extreme

    def test_generic_rank_two_extreme(self, rng):
        v = rng.normal(size=(2, 9)) + 1j * rng.normal(size=(2, 9))
        v /= np.linalg.norm(v, axis=0)
        K = v.conj().T @ v
        np.fill_diagonal(K, 1)
        cert = quadrature_extremality(QuadratureKernel(MomentumGrid.centered(9), K))
        assert cert.extreme and cert.constraint_rank == 4

    def test_phase_recovery(self, rng):
        alpha = rng.uniform(0, 2 * np.pi, 12)
        got = recover_phases(sharp_kernel(MomentumGrid.centered(12), phases=alpha))
        gap = np.angle(np.exp(1j * ((got - alpha) - (got[0] - alpha[0]))))
        assert np.max(np.abs(gap)) < 1e-9


class TestSpectralDichotomy:
    def test_fuzzy_effects_strictly_inside_unit_interval(self):
        # needs a positive definite kernel; the Gaussian one is
        g = MomentumGrid.centered(32, 0.5)
        k = convolution_kernel(GAUSS, g)
        assert np.linalg.eigvalsh(k.K)[0] > 0
        lam = effect_spectrum(k, 0.0, math.pi / g.h)
        assert lam.min() > 1e-6 and lam.max() < 1 - 1e-6

    def test_low_rank_fuzzy_effects_not_projective(self):
        g = MomentumGrid.centered(32, 0.5)
        lam = effect_spectrum(convolution_kernel(ProbabilityMeasureSpec("uniform"), g), 0.0, math.pi / g.h)
        assert lam.min() > -1e-12 and lam.max() < 1 + 1e-12
        assert np.count_nonzero((lam > 0.01) & (lam < 0.99)) > 8

    def test_sharp_effects_nearly_projective(self):
        g = MomentumGrid.centered(32, 0.5)
        lam = effect_spectrum(sharp_kernel(g), 0.0, math.pi / g.h)
        assert lam.min() > -1e-12 and lam.max() < 1 + 1e-12
        fuzzy = effect_spectrum(convolution_kernel(GAUSS, g), 0.0, math.pi / g.h)
        in_between = lambda x: np.count_nonzero((x > 0.01) & (x < 0.99))
        assert in_between(lam) <= 8 < in_between(fuzzy)

    def test_interval_longer_than_period(self):
        with pytest.raises(BadInterval):
            effect_spectrum(sharp_kernel(MomentumGrid.centered(4, 1.0)), 0, 7)


class TestRotatedFrame:
    @pytest.mark.parametrize("theta", np.linspace(0, 2 * np.pi, 8, endpoint=False))
    def test_p_is_rotated_q(self, theta):
        Q_t, P_t = rotate_frame(theta, 10)
        np.testing.assert_allclose(Q_t, Q_t.conj().T, atol=1e-15)
        np.testing.assert_allclose(P_t, P_t.conj().T, atol=1e-15)
        Q_next, _ = rotate_frame(theta + np.pi / 2, 10)
        assert np.max(np.abs(P_t - Q_next)) < 1e-13

    def test_theta_zero_and_pi(self):
        Q0, _ = rotate_frame(0.0, 6)
        np.testing.assert_allclose(Q0, quadrature_Q(6), atol=1e-15)
        Qpi, _ = rotate_frame(np.pi, 6)
        np.testing.assert_allclose(Qpi, -quadrature_Q(6), atol=1e-15)

    def test_fourier_plancherel_is_quarter_turn(self):
        F = fourier_plancherel(5)
        np.testing.assert_allclose(np.diag(F), [1, 1j, -1, -1j, 1], atol=1e-15)
