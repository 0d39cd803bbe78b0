import numpy as np
import pytest

from tasnsc.gp import (
    GPFitError,
    Kernel,
    MotionPattern,
    fit,
    kernel_matrix,
    pattern_log_likelihood,
    posterior,
)

TIGHT = Kernel(length_x=2.0, length_y=2.0, signal_sd=1.0, noise_sd=1e-6)


def grid_points(lo=0.0, hi=4.0, n=5):
    g = np.linspace(lo, hi, n)
    X, Y = np.meshgrid(g, g)
    return np.column_stack((X.ravel(), Y.ravel()))


class TestKernel:
    def test_positive_params_enforced(self):
        with pytest.raises(ValueError):
            Kernel(length_x=0.0)
        with pytest.raises(ValueError):
            Kernel(noise_sd=-0.1)

    def test_diagonal_is_signal_variance(self):
        k = Kernel(signal_sd=1.7)
        pts = np.array([[0.0, 0.0], [3.0, -1.0]])
        K = kernel_matrix(k, pts, pts)
        assert np.allclose(np.diag(K), 1.7**2)

    def test_anisotropic_lengths(self):
        k = Kernel(length_x=1.0, length_y=10.0, signal_sd=1.0)
        a = np.array([[0.0, 0.0]])
        same_x = kernel_matrix(k, a, np.array([[0.0, 1.0]]))[0, 0]
        same_y = kernel_matrix(k, a, np.array([[1.0, 0.0]]))[0, 0]
        assert same_x > same_y  # a 1 m offset costs much less along the long axis

    def test_dict_round_trip(self):
        k = Kernel(1.5, 2.5, 0.8, 0.3)
        assert Kernel.from_dict(k.to_dict()) == k


class TestFit:
    def test_single_point_interpolation(self):
        model = fit([[0.0, 0.0]], [1.0], TIGHT)
        mean, _ = posterior(model, (0.0, 0.0))
        assert mean == pytest.approx(1.0, abs=1e-4)

    def test_zero_targets_zero_mean(self):
        rng = np.random.default_rng(0)
        model = fit(rng.uniform(-5, 5, (20, 2)), np.zeros(20), Kernel())
        mean, _ = posterior(model, rng.uniform(-5, 5, (10, 2)))
        assert np.allclose(mean, 0.0)

    def test_antisymmetric_targets_cancel_at_origin(self):
        model = fit([[1.0, 0.0], [-1.0, 0.0]], [1.0, -1.0], Kernel())
        mean, _ = posterior(model, (0.0, 0.0))
        assert mean == pytest.approx(0.0, abs=1e-12)

    def test_non_spd_raises(self):
        with pytest.raises(GPFitError):
            fit([[0.0, 0.0]] * 5, [1.0] * 5, Kernel(noise_sd=1e-12))

    def test_empty_rejected(self):
        with pytest.raises(GPFitError):
            fit(np.empty((0, 2)), np.empty(0), Kernel())


class TestPosterior:
    def test_prior_reversion_far_away(self):
        k = Kernel(length_x=1.0, length_y=1.0, signal_sd=0.9, noise_sd=0.1)
        model = fit([[0.0, 0.0]], [2.0], k)
        mean, var = posterior(model, (15.0, 15.0))
        assert abs(mean) < 1e-6
        assert var == pytest.approx(0.9**2, abs=1e-6)

    def test_mean_at_training_inputs(self):
        rng = np.random.default_rng(1)
        pts = rng.uniform(-3, 3, (15, 2))
        targets = np.sin(pts[:, 0]) + 0.3 * pts[:, 1]
        model = fit(pts, targets, TIGHT)
        mean, _ = posterior(model, pts)
        assert np.max(np.abs(mean - targets)) < 1e-3

    def test_linear_field_interpolation(self):
        pts = grid_points()
        model = fit(pts, 0.5 * pts[:, 0], Kernel(noise_sd=0.01))
        rng = np.random.default_rng(0)
        q = rng.uniform(0.5, 3.5, (20, 2))
        mean, _ = posterior(model, q)
        true = 0.5 * q[:, 0]
        rms = np.sqrt(np.mean((mean - true) ** 2)) / np.sqrt(np.mean(true**2))
        assert rms < 0.05

    def test_variance_nonnegative_everywhere(self):
        rng = np.random.default_rng(2)
        pts = rng.uniform(-2, 2, (40, 2))
        model = fit(pts, rng.normal(size=40), Kernel(noise_sd=0.05))
        _, var = posterior(model, rng.uniform(-6, 6, (500, 2)))
        assert np.all(var >= 0.0)

    def test_raw_variance_never_far_negative(self):
        # Oracle-side check of the clamp margin on a well-conditioned fit.
        rng = np.random.default_rng(3)
        pts = rng.uniform(-2, 2, (30, 2))
        k = Kernel(noise_sd=0.1)
        model = fit(pts, rng.normal(size=30), k)
        q = rng.uniform(-3, 3, (200, 2))
        gram = kernel_matrix(k, pts, pts) + k.noise_sd**2 * np.eye(len(pts))
        k_star = kernel_matrix(k, pts, q)
        raw = k.signal_sd**2 - np.sum(k_star * np.linalg.solve(gram, k_star), axis=0)
        assert raw.min() > -1e-10


def make_pattern(flow, prior=1.0, kernel=None, n=25):
    kernel = kernel or Kernel(noise_sd=0.05)
    pts = grid_points(-2.0, 2.0, int(np.sqrt(n)))
    vx, vy = flow(pts)
    return MotionPattern(
        atoms=(0, 1),
        gp_x=fit(pts, vx, kernel),
        gp_y=fit(pts, vy, kernel),
        prior_weight=prior,
    )


class TestPatternLogLikelihood:
    def test_matching_flow_beats_orthogonal(self):
        east = make_pattern(lambda p: (np.full(len(p), 1.2), np.zeros(len(p))), prior=0.5)
        north = make_pattern(lambda p: (np.zeros(len(p)), np.full(len(p), 1.2)), prior=0.5)
        obs = np.array([[x, 0.0, 1.2, 0.0] for x in np.linspace(-1, 1, 5)])
        assert pattern_log_likelihood(east, obs) > pattern_log_likelihood(north, obs)

    def test_empty_observation_is_log_prior(self):
        pat = make_pattern(lambda p: (np.ones(len(p)), np.zeros(len(p))), prior=0.25)
        assert pattern_log_likelihood(pat, np.empty((0, 4))) == pytest.approx(np.log(0.25))

    def test_prior_only_difference(self):
        heavy = make_pattern(lambda p: (np.ones(len(p)), np.zeros(len(p))), prior=0.8)
        light = MotionPattern(atoms=heavy.atoms, gp_x=heavy.gp_x, gp_y=heavy.gp_y, prior_weight=0.2)
        obs = np.array([[0.0, 0.0, 1.0, 0.0], [0.5, 0.5, 1.0, 0.1]])
        diff = pattern_log_likelihood(heavy, obs) - pattern_log_likelihood(light, obs)
        assert diff == pytest.approx(np.log(4.0), rel=1e-12)

    def test_monotone_in_velocity_deviation(self):
        pat = make_pattern(lambda p: (np.ones(len(p)), np.zeros(len(p))))
        lls = []
        for dev in (0.0, 0.3, 0.6, 1.2, 2.4):
            obs = np.array([[0.0, 0.0, 1.0 + dev, 0.0]])
            lls.append(pattern_log_likelihood(pat, obs))
        assert all(a > b for a, b in zip(lls, lls[1:]))

    def test_prior_weight_validated(self):
        pat = make_pattern(lambda p: (np.ones(len(p)), np.zeros(len(p))))
        with pytest.raises(ValueError):
            MotionPattern(atoms=(0, 0), gp_x=pat.gp_x, gp_y=pat.gp_y, prior_weight=0.0)
