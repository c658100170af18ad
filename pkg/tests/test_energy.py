import math

import numpy as np
import pytest
from scipy.integrate import quad

import gamow2d as g
from gamow2d import ComponentList, RasterSet, StarShape
from gamow2d.energy import disk_self_interaction, star_quadrature
from gamow2d.errors import DomainError, PreconditionError
from gamow2d.shapes import raster_area, translate

# Monte-Carlo reference for the standard perturbed fixture (modes
# (2, 0.1, 0), (3, 0, 0.05), area pi) with the r^(-1/2) kernel: 1.21e8
# uniform pair samples, seed 12345, standard error 1.07e-3.
MC_PERTURBED_RIESZ = 11.805742
MC_PERTURBED_SE = 1.07e-3


def square_self_interaction(k, half_side: float = 1.0, tol: float = 1e-10):
    """Self-interaction of the centred square via its set covariance,
    reduced to polar coordinates; independent oracle for the cube bound."""
    ell = 2 * half_side

    def inner(phi):
        reach = ell / max(math.cos(phi), math.sin(phi))
        val, _ = quad(
            lambda r: float(k.profile(r)) * r
            * (ell - r * math.cos(phi)) * (ell - r * math.sin(phi)),
            0.0, reach, points=[0.0], limit=200, epsrel=tol,
        )
        return val

    total, _ = quad(inner, 0.0, math.pi / 2, limit=200, epsrel=tol)
    return 4.0 * total


def mc_disk_riesz(alpha: float, n_pairs: int, seed: int = 99) -> tuple:
    """4-D Monte Carlo for the unit disk: exact uniform disk sampling."""
    rng = np.random.default_rng(seed)
    total, done = 0.0, 0
    sq_total = 0.0
    chunk = 4_000_000
    while done < n_pairs:
        n = min(chunk, n_pairs - done)
        r = np.sqrt(rng.uniform(size=(n, 2)))
        t = rng.uniform(0, 2 * math.pi, size=(n, 2))
        dx = r[:, 0] * np.cos(t[:, 0]) - r[:, 1] * np.cos(t[:, 1])
        dy = r[:, 0] * np.sin(t[:, 0]) - r[:, 1] * np.sin(t[:, 1])
        d = np.hypot(dx, dy)
        d = d[d > 0]
        v = d**alpha
        total += float(v.sum())
        sq_total += float((v * v).sum())
        done += n
    mean = total / done
    var = sq_total / done - mean * mean
    scale = math.pi**2
    return scale * mean, scale * math.sqrt(var / done)


class TestRieszInteraction:
    def test_constant_kernel_is_area_product(self, k_const, unit_disk):
        assert g.riesz_interaction(k_const, unit_disk, unit_disk) == pytest.approx(
            math.pi**2, rel=1e-9
        )

    def test_disjoint_supports_vanish(self, k_ind):
        m = np.ones((4, 4), dtype=bool)
        f = RasterSet(origin=(0.0, 0.0), pitch=0.25, mask=m)
        h = RasterSet(origin=(3.0, 0.0), pitch=0.25, mask=m)
        assert g.riesz_interaction(k_ind, f, h) == 0.0

    def test_disk_against_monte_carlo_oracle(self, k_half, unit_disk):
        mc, se = mc_disk_riesz(-0.5, 40_000_000)
        val = g.riesz_interaction(k_half, unit_disk, unit_disk)
        assert abs(val - mc) < max(1e-3 * val, 5 * se)
        # and against the covariance reduction
        assert val == pytest.approx(disk_self_interaction(k_half), rel=1e-9)

    def test_perturbed_shape_against_frozen_monte_carlo(self, k_half, perturbed):
        val = g.riesz_interaction(k_half, perturbed, perturbed, 64, 6)
        assert abs(val - MC_PERTURBED_RIESZ) < max(
            1e-3 * val, 4 * MC_PERTURBED_SE
        )
        val_hi = g.riesz_interaction(k_half, perturbed, perturbed, 128, 10)
        assert abs(val_hi - MC_PERTURBED_RIESZ) < max(
            1e-3 * val_hi, 4 * MC_PERTURBED_SE
        )

    def test_symmetry_star_pair(self, k_half, perturbed, unit_disk):
        moved = translate(unit_disk, (2.5, 0.3))
        ab = g.riesz_interaction(k_half, perturbed, moved)
        ba = g.riesz_interaction(k_half, moved, perturbed)
        assert ab == pytest.approx(ba, rel=1e-12)

    def test_symmetry_raster_pair(self, k_half, rng):
        from gamow2d.kernels import random_blob_pair_source

        f, h = random_blob_pair_source(pitch=1 / 16)(rng)
        assert g.riesz_interaction(k_half, f, h) == pytest.approx(
            g.riesz_interaction(k_half, h, f), rel=1e-12
        )

    def test_monotone_in_raster_containment(self, k_half, unit_disk):
        big = g.rasterize(unit_disk, 1 / 24)
        small_mask = big.mask.copy()
        idx = np.argwhere(small_mask)
        small_mask[tuple(idx[: len(idx) // 3].T)] = False
        small = RasterSet(origin=big.origin, pitch=big.pitch, mask=small_mask)
        probe = g.rasterize(g.disk(0.4, center=(0.8, 0.0)), 1 / 24)
        assert g.riesz_interaction(k_half, small, probe) <= g.riesz_interaction(
            k_half, big, probe
        ) * (1 + 1e-12)

    def test_non_admissible_rejected(self, unit_disk):
        with pytest.raises(PreconditionError):
            g.riesz_interaction(g.power_kernel(-2.5), unit_disk, unit_disk)


class TestGamowEnergy:
    def test_perimeter_only_at_zero_epsilon(self, k_half, unit_disk):
        e = g.gamow_energy(k_half, 0.0, unit_disk)
        assert e.total == pytest.approx(2 * math.pi, rel=1e-12)

    def test_constant_kernel_unit_epsilon(self, k_const, unit_disk):
        e = g.gamow_energy(k_const, 1.0, unit_disk)
        assert e.total == pytest.approx(2 * math.pi + math.pi**2, rel=1e-9)

    def test_ball_energy_identity(self, k_half, unit_disk):
        eps = 0.37
        e = g.gamow_energy(k_half, eps, unit_disk)
        assert e.total == pytest.approx(
            2 * math.pi + eps * disk_self_interaction(k_half), rel=1e-9
        )

    def test_total_identity_is_exact(self, k_half, perturbed):
        e = g.gamow_energy(k_half, 0.123, perturbed)
        assert e.total == e.perimeter + e.epsilon * e.riesz

    def test_negative_epsilon_rejected(self, k_half, unit_disk):
        with pytest.raises(DomainError):
            g.gamow_energy(k_half, -0.1, unit_disk)


class TestGeneralizedEnergy:
    def test_single_component_equals_gamow(self, k_half, perturbed):
        single = g.gamow_energy(k_half, 0.2, perturbed)
        gen = g.generalized_energy(k_half, 0.2, ComponentList((perturbed,)))
        assert gen.total == pytest.approx(single.total, rel=1e-12)
        assert gen.per_component is not None and len(gen.per_component) == 1

    def test_two_unit_disks_constant_kernel(self, k_const, unit_disk):
        gen = g.generalized_energy(
            k_const, 1.0, ComponentList((unit_disk, g.disk()))
        )
        assert gen.total == pytest.approx(2 * (2 * math.pi + math.pi**2),
                                          rel=1e-9)

    def test_component_sums_match_breakdown(self, k_half, unit_disk, perturbed):
        gen = g.generalized_energy(k_half, 0.5,
                                   ComponentList((unit_disk, perturbed)))
        assert gen.perimeter == pytest.approx(
            sum(p for p, _ in gen.per_component), rel=1e-14
        )
        assert gen.riesz == pytest.approx(
            sum(r for _, r in gen.per_component), rel=1e-14
        )

    def test_split_gap_vanishes_with_separation(self, k_gauss, unit_disk):
        eps = 1.0
        gaps = []
        for d in (4.0, 8.0, 16.0):
            moved = translate(g.disk(), (d, 0.0))
            cross = g.riesz_interaction(k_gauss, unit_disk, moved)
            gaps.append(2 * eps * cross)
        assert gaps[0] > gaps[1] > gaps[2]
        assert gaps[2] < 1e-10

    def test_empty_component_list_rejected(self):
        with pytest.raises(DomainError):
            ComponentList(())


class TestScalingResidual:
    def test_identity_at_unit_scale(self, k_half, unit_disk):
        assert g.scaling_residual(k_half, unit_disk, 1.0) == pytest.approx(
            0.0, abs=1e-9
        )

    @pytest.mark.parametrize("alpha", [-0.5, -0.25, 0.0])
    @pytest.mark.parametrize("m", [0.5, 2.0, 3.0])
    def test_small_residual_on_disk(self, alpha, m):
        k = g.power_kernel(alpha)
        s = g.disk()
        res = g.scaling_residual(k, s, m)
        scaled_total = g.gamow_energy(k, 1.0, g.scale(s, m)).total
        assert res < 1e-3 * scaled_total

    def test_small_residual_on_perturbed(self, k_half, perturbed):
        res = g.scaling_residual(k_half, perturbed, 2.0)
        scaled_total = g.gamow_energy(k_half, 1.0, g.scale(perturbed, 2.0)).total
        assert res < 1e-3 * scaled_total

    def test_non_power_kernel_rejected(self, k_gauss, unit_disk):
        with pytest.raises(PreconditionError):
            g.scaling_residual(k_gauss, unit_disk, 2.0)


class TestRescalingBound:
    @pytest.mark.parametrize("lam", [1.1, 1.5, 2.0])
    def test_energy_grows_slower_than_fourth_power(self, k_half, perturbed, lam):
        eps = 0.3
        base = g.gamow_energy(k_half, eps, perturbed).total
        scaled = g.gamow_energy(k_half, eps, g.scale(perturbed, lam)).total
        assert scaled <= lam**4 * base * (1 + 1e-9)


class TestSmallBallBound:
    @pytest.mark.parametrize("alpha", [-0.5, 0.0])
    def test_disk_bounded_by_square(self, alpha):
        k = g.power_kernel(alpha)
        r_q1 = square_self_interaction(k, 1.0)
        if alpha == 0.0:
            assert r_q1 == pytest.approx(16.0, rel=1e-9)
        for r in (1.0, 0.5, 0.25, 0.125):
            lhs = disk_self_interaction(k, r)
            assert lhs <= 4.0 * r_q1 * r * r * (1 + 1e-9)


def dumbbell_raster(pitch: float = 1 / 40) -> RasterSet:
    """Two 1x1 squares joined by a 0.05-thick strip of length 4."""
    nx, ny = int(round(6 / pitch)), int(round(1 / pitch))
    mask = np.zeros((nx, ny), dtype=bool)

    def fill(x0, x1, y0, y1):
        mask[int(round(x0 / pitch)):int(round(x1 / pitch)),
             int(round(y0 / pitch)):int(round(y1 / pitch))] = True

    fill(0.0, 1.0, 0.0, 1.0)
    fill(5.0, 6.0, 0.0, 1.0)
    fill(1.0, 5.0, 0.475, 0.525)
    return RasterSet(origin=(0.0, 0.0), pitch=pitch, mask=mask)


class TestCutAndPaste:
    def test_dumbbell_cut_satisfies_guarantee(self, k_half):
        r = dumbbell_raster()
        result = g.cut_and_paste(k_half, 1e-3, r, a=1.1, b=4.9, m_bar=0.5)
        assert result.found
        assert result.removed_area > 0.1
        assert result.energy_change <= -result.guaranteed_decrease + 1e-9
        assert raster_area(result.raster) == pytest.approx(
            raster_area(r) - result.removed_area, rel=1e-12
        )

    def test_solid_disk_has_no_cut(self, k_half, unit_disk):
        r = g.rasterize(unit_disk, 1 / 64)
        result = g.cut_and_paste(k_half, 1e-3, r, a=-0.5, b=0.5, m_bar=3.2)
        assert not result.found
        assert result.energy_change == 0.0
        assert result.raster is r

    def test_empty_band_is_identity(self, k_half):
        mask = np.zeros((40, 10), dtype=bool)
        mask[:5, :] = True
        mask[-5:, :] = True
        r = RasterSet(origin=(-2.0, 0.0), pitch=0.1, mask=mask)
        result = g.cut_and_paste(k_half, 1e-3, r, a=-1.0, b=1.0, m_bar=1.0)
        assert result.found
        assert result.removed_area == 0.0
        assert result.energy_change == 0.0

    def test_band_budget_enforced(self, k_half, unit_disk):
        r = g.rasterize(unit_disk, 1 / 32)
        with pytest.raises(PreconditionError):
            g.cut_and_paste(k_half, 1e-3, r, a=-0.5, b=0.5, m_bar=1e-3)

    def test_degenerate_band_rejected(self, k_half, unit_disk):
        r = g.rasterize(unit_disk, 1 / 32)
        with pytest.raises(PreconditionError):
            g.cut_and_paste(k_half, 1e-3, r, a=0.5, b=0.4, m_bar=1.0)


class TestQuadratureInternals:
    def test_node_weights_integrate_area(self, perturbed):
        pts, w = star_quadrature(perturbed, 96, 8)
        assert w.sum() == pytest.approx(g.area(perturbed), rel=1e-10)

    def test_riesz_homogeneity_matches_power_law(self, k_half, perturbed):
        lam = 2.0
        base = g.riesz_interaction(k_half, perturbed, perturbed, 64, 6)
        scaled_shape = g.scale(perturbed, lam)
        scaled = g.riesz_interaction(k_half, scaled_shape, scaled_shape, 64, 6)
        assert scaled == pytest.approx(lam**3.5 * base, rel=1e-9)
