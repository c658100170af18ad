import math

import numpy as np
import pytest

import gamow2d as g
from gamow2d import OptimizerConfig
from gamow2d.errors import DomainError, PreconditionError
from gamow2d.shapes import StarShape, random_star_shape


class TestProjectVolume:
    def test_unit_disk_unchanged(self, unit_disk):
        assert g.project_volume(unit_disk, math.pi) == unit_disk

    def test_double_disk_projects_to_unit(self):
        s = g.project_volume(g.disk(2.0), math.pi)
        assert s.r0 == pytest.approx(1.0, rel=1e-14)

    def test_mode_ratios_preserved(self, perturbed):
        target = 2.3
        s = g.project_volume(perturbed, target)
        assert g.area(s) == pytest.approx(target, rel=1e-12)
        assert s.modes == perturbed.modes

    def test_positive_target_required(self, unit_disk):
        with pytest.raises(DomainError):
            g.project_volume(unit_disk, 0.0)


class TestMinimizeSingle:
    def test_pure_isoperimetric_descent(self, k_half, fast_cfg, rng):
        start = random_star_shape(rng, 4, 0.12)
        tr = g.minimize_single(k_half, 0.0, start, fast_cfg)
        assert tr.final_asymmetry.asymmetry < 5e-3

    def test_small_epsilon_returns_to_disk(self, k_half, fast_cfg, rng):
        start = StarShape(center=(0, 0), r0=1.0, modes=((2, 0.1, 0.0),))
        tr = g.minimize_single(k_half, 1e-3, g.project_volume(start, math.pi),
                               fast_cfg)
        assert tr.final_asymmetry.asymmetry < 1e-2

    def test_accepted_energies_nonincreasing(self, k_half, fast_cfg, rng):
        start = random_star_shape(rng, 4, 0.12)
        tr = g.minimize_single(k_half, 1e-3, start, fast_cfg)
        assert all(a >= b for a, b in zip(tr.energies, tr.energies[1:]))
        assert tr.energies[-1] <= tr.energies[0]

    def test_volume_conserved(self, k_half, fast_cfg, rng):
        start = random_star_shape(rng, 4, 0.1)
        tr = g.minimize_single(k_half, 1e-3, start, fast_cfg)
        assert g.area(tr.final_shape) == pytest.approx(math.pi, abs=1e-10)

    def test_component_mass_respected(self, k_half, fast_cfg):
        mass = 0.6 * math.pi
        start = StarShape(center=(0, 0), r0=1.0, modes=((2, 0.05, 0.0),))
        tr = g.minimize_single(k_half, 1e-3, start, fast_cfg, target_area=mass)
        assert g.area(tr.final_shape) == pytest.approx(mass, abs=1e-10)

    def test_deterministic_given_seed(self, k_half, fast_cfg, rng):
        start = random_star_shape(rng, 4, 0.1)
        tr1 = g.minimize_single(k_half, 1e-3, start, fast_cfg)
        tr2 = g.minimize_single(k_half, 1e-3, start, fast_cfg)
        assert tr1.energies == tr2.energies
        assert tr1.final_shape == tr2.final_shape


class TestOptimizerConfig:
    def test_validation(self):
        with pytest.raises(DomainError):
            OptimizerConfig(n_modes=0)
        with pytest.raises(DomainError):
            OptimizerConfig(step_shrink=1.5)
        with pytest.raises(DomainError):
            OptimizerConfig(tol_energy=0.0)


class TestMinimizeGeneralized:
    def test_small_epsilon_keeps_single_component(self, k_half, fast_cfg):
        clist, tr = g.minimize_generalized(k_half, 1e-3, 2, fast_cfg)
        assert len(clist.components) == 1
        assert tr.final_asymmetry.asymmetry < 2e-2

    def test_constant_kernel_never_splits(self, k_const, fast_cfg):
        # interaction is area-only, so splitting pays the extra perimeter
        # without any repulsion relief
        clist, tr = g.minimize_generalized(k_const, 0.5, 2, fast_cfg)
        assert len(clist.components) == 1

    def test_large_epsilon_prefers_two_components(self, k_half, fast_cfg):
        clist, tr = g.minimize_generalized(k_half, 1.0, 2, fast_cfg)
        assert len(clist.components) == 2

    def test_component_areas_sum_to_pi(self, k_half, fast_cfg):
        clist, _ = g.minimize_generalized(k_half, 1.0, 2, fast_cfg)
        total = sum(g.area(c) for c in clist.components)
        assert total == pytest.approx(math.pi, abs=1e-9)

    def test_invalid_h_max(self, k_half, fast_cfg):
        with pytest.raises(PreconditionError):
            g.minimize_generalized(k_half, 1e-3, 0, fast_cfg)


class TestEpsilonSweep:
    def test_single_row_degenerate(self, k_half, fast_cfg):
        res = g.epsilon_sweep(k_half, [0.0], fast_cfg, h_max=2)
        assert len(res.rows) == 1
        row = res.rows[0]
        assert row.n_components_chosen == 1
        assert row.asymmetry < 5e-3
        assert res.threshold_grid is None

    def test_rows_sorted_and_split_bounded(self, k_half, fast_cfg):
        res = g.epsilon_sweep(k_half, [0.3, 0.7], fast_cfg, h_max=2)
        eps = [r.epsilon for r in res.rows]
        assert eps == sorted(eps)
        for r in res.rows:
            assert math.isfinite(r.best_single_energy)

    def test_unsorted_rejected(self, k_half, fast_cfg):
        with pytest.raises(PreconditionError):
            g.epsilon_sweep(k_half, [0.7, 0.3], fast_cfg)

    def test_asymmetry_shrinks_toward_zero_epsilon(self, k_half, fast_cfg):
        res = g.epsilon_sweep(k_half, [1e-3, 0.05, 0.3], fast_cfg, h_max=1)
        asyms = [r.asymmetry for r in res.rows]
        assert asyms[0] <= asyms[-1] + 0.01

    def test_threshold_brackets_two_ball_crossing(self, k_half):
        cfg = OptimizerConfig(n_modes=6, max_iters=40, n_theta=64, n_radial=6,
                              seed=3, tol_step=2e-4)
        res = g.epsilon_sweep(k_half, [0.35, 0.45, 0.55, 0.65], cfg, h_max=2)
        r_ball = g.disk_self_interaction(k_half)
        eps_star = 2 * math.pi * (math.sqrt(2) - 1) / ((1 - 2**-0.75) * r_ball)
        assert res.threshold_interpolated is not None
        assert abs(res.threshold_interpolated - eps_star) / eps_star < 0.1


class TestBallMinimality:
    def test_small_sample_passes(self, k_half):
        cfg = OptimizerConfig(n_modes=4, max_iters=30, n_theta=48, n_radial=5,
                              tol_step=5e-4, seed=11)
        rep = g.ball_minimality_test(k_half, 1e-3, 5, cfg)
        assert rep.passed
        assert rep.extremal_ratio > 0  # every start costs more than the ball

    def test_epsilon_beyond_threshold_fails_energy_check(self, k_half):
        # Within the star-shaped competitor class the ball survives well past
        # the two-ball fission crossing (measured break-even eps ~ 3.4-6 for
        # amplitude-0.12 starts); eps = 4 reliably produces ball-energy
        # witnesses while staying deterministic under the fixed seed.
        cfg = OptimizerConfig(n_modes=8, max_iters=8, n_theta=48, n_radial=5,
                              tol_step=5e-4, seed=11)
        rep = g.ball_minimality_test(k_half, 4.0, 8, cfg)
        assert not rep.passed
        assert any(w.get("check") == "ball_energy" for w in rep.witnesses)
        assert rep.extremal_ratio < 0

    def test_hypothesis_failures_reported(self, k_ind):
        cfg = OptimizerConfig(n_modes=4, max_iters=5, seed=1)
        rep = g.ball_minimality_test(k_ind, 1e-3, 2, cfg)
        assert not rep.passed
        assert any("hypothesis" in w for w in rep.witnesses)
