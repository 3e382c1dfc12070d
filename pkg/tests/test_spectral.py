import math

import numpy as np
import pytest

from volterra_radii import (
    AnalysisConfig,
    BoundaryZeroError,
    DomainError,
    InsufficientDataError,
    SingularError,
    circle_min_singular,
    decay_fit,
    resolvent_sequence,
    transfer_resolvent,
    ue_verdict,
    winding_number_det,
)
from volterra_radii.spectral import pencil_grid

from .conftest import random_stable_kernel

FAST = AnalysisConfig(grid_size=256, n_max=64, section=32)


class TestResolventSequence:
    def test_worked_kernel_values(self, worked_kernel):
        xs = resolvent_sequence(worked_kernel, 50)
        assert xs[0, 0, 0] == 1.0
        expect = np.array([-((-0.5) ** (j - 1)) for j in range(1, 51)])
        assert np.max(np.abs(xs[1:, 0, 0] - expect)) < 1e-12

    def test_growing_kernel_finite_support(self, growing_kernel):
        xs = resolvent_sequence(growing_kernel, 20)
        assert xs[1, 0, 0] == -2.0
        assert np.all(xs[2:] == 0.0)

    def test_zero_kernel(self, zero_kernel):
        xs = resolvent_sequence(zero_kernel, 5)
        assert xs[0, 0, 0] == 1.0
        assert np.all(xs[1:] == 0.0)

    def test_matches_power_series_inverse(self):
        # multiplying back the truncated series reproduces the identity
        rng = np.random.default_rng(7)
        for _ in range(20):
            k = random_stable_kernel(rng)
            d = k.dim_in
            n = 40
            xs = resolvent_sequence(k, n)
            zeta = 0.5 * np.exp(1j * rng.uniform(0, 2 * math.pi))
            series = sum(zeta**j * xs[j] for j in range(n + 1))
            pencil = pencil_grid(k, np.array([zeta]))[0]
            assert np.linalg.norm(pencil @ series - np.eye(d), 2) < 1e-6


class TestTransferResolvent:
    def test_worked_kernel_closed_form(self, worked_kernel):
        # (2 - zeta)/(2 + zeta) at 0.5 and -1
        assert transfer_resolvent(worked_kernel, 0.5)[0, 0] == pytest.approx(0.6)
        assert transfer_resolvent(worked_kernel, -1.0)[0, 0] == pytest.approx(3.0)

    def test_zero_kernel_identity(self, zero_kernel):
        assert transfer_resolvent(zero_kernel, 0.7j)[0, 0] == pytest.approx(1.0)

    def test_outside_disc(self, worked_kernel):
        with pytest.raises(DomainError):
            transfer_resolvent(worked_kernel, 2.0)

    def test_singular_pencil(self, worked_kernel):
        perturbed = worked_kernel.plus_memoryless(np.array([[-1.0 / 3.0]]))
        with pytest.raises(SingularError):
            transfer_resolvent(perturbed, -1.0)


class TestCircleMinSingular:
    def test_worked_kernel(self, worked_kernel):
        sigma, zeta = circle_min_singular(worked_kernel)
        assert sigma == pytest.approx(1.0 / 3.0, abs=1e-9)
        assert abs(zeta - (-1.0)) < 1e-6

    def test_zero_kernel_tie_break(self, zero_kernel):
        sigma, zeta = circle_min_singular(zero_kernel)
        assert sigma == pytest.approx(1.0)
        assert zeta == pytest.approx(1.0)

    def test_perturbed_touches_zero(self, worked_kernel):
        perturbed = worked_kernel.plus_memoryless(np.array([[-1.0 / 3.0]]))
        sigma, zeta = circle_min_singular(perturbed)
        assert sigma < 1e-7
        assert abs(zeta - (-1.0)) < 1e-6

    def test_requires_radius_above_one(self, growing_kernel):
        with pytest.raises(DomainError):
            circle_min_singular(growing_kernel)


class TestWindingNumber:
    def test_worked_kernel(self, worked_kernel):
        assert winding_number_det(worked_kernel) == 0

    def test_zero_kernel(self, zero_kernel):
        assert winding_number_det(zero_kernel) == 0

    def test_boundary_zero_detected(self, worked_kernel):
        bumped = worked_kernel.plus_memoryless(np.array([[-1.0 / 3.0]]))
        with pytest.raises(BoundaryZeroError):
            winding_number_det(bumped)

    def test_scaled_circle_counts_boundary_root(self, worked_kernel):
        # det*(2 - zeta) is a quadratic with roots -1 and 6; the circle just
        # outside the boundary zero must count exactly one of them
        bumped = worked_kernel.plus_memoryless(np.array([[-1.0 / 3.0]]))
        roots = np.roots([-1.0 / 3.0, 5.0 / 3.0, 2.0])
        inside = int(np.sum(np.abs(roots) < 1.0 + 1e-6))
        assert inside == 1
        assert winding_number_det(bumped, radius=1.0 + 1e-6) == inside
        assert winding_number_det(bumped, radius=1.0 - 1e-3) == 0


class TestUEVerdict:
    def test_worked_kernel_stable(self, worked_kernel):
        v = ue_verdict(worked_kernel)
        assert v.ue_resolvent_sense
        assert v.fading_space_applicable
        assert v.winding_number == 0
        assert v.witness_zeta is None
        assert v.decay is not None and v.decay.nu == pytest.approx(math.log(2), abs=1e-9)

    def test_growing_kernel_empirical(self, growing_kernel):
        v = ue_verdict(growing_kernel)
        assert v.ue_resolvent_sense
        assert not v.fading_space_applicable
        assert v.convergence_radius == pytest.approx(0.5)
        assert v.winding_number is None
        assert v.decay is not None and v.decay.capped
        assert "not defined" in v.text

    def test_perturbed_marginal(self, worked_kernel):
        perturbed = worked_kernel.plus_memoryless(np.array([[-1.0 / 3.0]]))
        v = ue_verdict(perturbed)
        assert not v.ue_resolvent_sense
        assert v.marginal
        assert abs(v.witness_zeta - (-1.0)) < 1e-6

    def test_strictly_unstable_witness_inside(self, worked_kernel):
        perturbed = worked_kernel.plus_memoryless(np.array([[-0.5]]))
        v = ue_verdict(perturbed)
        assert not v.ue_resolvent_sense
        assert v.winding_number == 1
        assert abs(v.witness_zeta) <= 1.0 + 1e-12
        # oracle: det numerator is a*z^2 - (1+2a)*z - 2 with a = 1/2
        roots = np.roots([0.5, -2.0, -2.0])
        inner = roots[np.abs(roots) < 1.0][0]
        assert abs(v.witness_zeta - inner) < 1e-6

    def test_verdict_consistency_decay_window(self):
        rng = np.random.default_rng(11)
        for _ in range(25):
            k = random_stable_kernel(rng)
            v = ue_verdict(k, FAST)
            assert v.ue_resolvent_sense
            xs = resolvent_sequence(k, FAST.n_max, FAST)
            fit = decay_fit(xs, (k.dim_in + 1, FAST.n_max), FAST)
            assert fit.nu > 0


class TestDecayFit:
    def test_worked_resolvent_rate(self, worked_kernel):
        xs = resolvent_sequence(worked_kernel, 40)
        fit = decay_fit(xs, (5, 40))
        assert fit.nu == pytest.approx(math.log(2), abs=1e-6)
        assert fit.C * math.exp(-fit.nu * 10) >= abs(xs[10, 0, 0]) * (1 - 1e-12)

    def test_exact_geometric(self):
        xs = np.array([[[math.exp(-0.3 * n)]] for n in range(30)], dtype=complex)
        fit = decay_fit(xs, (0, 29))
        assert fit.nu == pytest.approx(0.3, abs=1e-12)
        assert fit.C == pytest.approx(1.0, rel=1e-9)

    def test_finite_support_capped(self, growing_kernel):
        xs = resolvent_sequence(growing_kernel, 40)
        fit = decay_fit(xs, (20, 40))
        assert fit.capped and fit.nu == 50.0

    def test_insufficient(self):
        xs = np.array([[[1.0]], [[0.5]]], dtype=complex)
        with pytest.raises(InsufficientDataError):
            decay_fit(xs, (0, 1))

    def test_envelope_bounds_window(self):
        rng = np.random.default_rng(13)
        for _ in range(25):
            k = random_stable_kernel(rng)
            xs = resolvent_sequence(k, 48)
            try:
                fit = decay_fit(xs, (8, 48))
            except InsufficientDataError:
                continue
            for n in range(8, 49):
                nrm = np.linalg.norm(xs[n], 2)
                assert nrm <= fit.C * math.exp(-fit.nu * n) * (1 + 1e-9) + 1e-300
