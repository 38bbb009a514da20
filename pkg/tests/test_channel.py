"""Channel model: Lambertian orders, gains, capable sets, blockage sampling."""

import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from lightcell import (
    PhysParams,
    Scenario,
    capable_ap_set,
    concentrator_gain,
    gain_table,
    grid_ap_positions,
    lambertian_order,
    los_gain,
    nlos_gain,
    random_user_positions,
    sample_slot_channel,
)
from conftest import small_scenario, table_phys, uniform_qos


class TestLambertianOrder:
    def test_sixty_degrees_is_one(self):
        assert lambertian_order(math.radians(60.0)) == pytest.approx(1.0, rel=1e-14)

    def test_seventy_degrees(self):
        # -ln 2 / ln cos 70 deg, evaluated independently
        expect = -math.log(2.0) / math.log(math.cos(math.radians(70.0)))
        got = lambertian_order(math.radians(70.0))
        assert got == pytest.approx(expect, rel=1e-14)
        assert got == pytest.approx(0.6460587703487341, rel=1e-12)

    def test_narrow_beam_limit(self):
        # order blows up as the semi-angle closes
        values = [lambertian_order(a) for a in (0.3, 0.1, 0.03, 0.01)]
        assert all(a < b for a, b in zip(values, values[1:]))
        assert values[-1] > 1e4

    def test_domain_errors(self):
        for bad in (0.0, 2.0, math.pi):
            with pytest.raises(ValueError):
                lambertian_order(bad)


class TestConcentrator:
    def test_outside_fov_is_zero(self):
        assert concentrator_gain(math.radians(60.0), 1.5, math.radians(50.0)) == 0.0

    def test_ninety_degree_fov(self):
        assert concentrator_gain(0.0, 1.5, math.radians(90.0)) == pytest.approx(2.25, rel=1e-14)

    def test_interior_value(self):
        expect = 2.25 / math.sin(math.radians(50.0)) ** 2
        got = concentrator_gain(math.radians(30.0), 1.5, math.radians(50.0))
        assert got == pytest.approx(expect, rel=1e-14)
        assert got == pytest.approx(3.8341984298441565, rel=1e-12)

    def test_boundary_included(self):
        fov = math.radians(50.0)
        assert concentrator_gain(fov, 1.5, fov) > 0.0


class TestLosGain:
    def test_outside_fov_cone_is_zero(self, phys):
        # horizontal offset far beyond the acceptance cone of a 50 deg half FoV
        assert los_gain([0.0, 0.0, 2.5], [5.0, 0.0, 0.5], phys) == 0.0

    def test_overhead_closed_form(self, phys):
        # both angles zero: eta*(L+1)*delta*varpi*T*g(0) / (2*pi*d^2)
        d = 2.0
        la = -math.log(2.0) / math.log(math.cos(math.radians(70.0)))
        g0 = 1.5**2 / math.sin(math.radians(50.0)) ** 2
        expect = 0.44 * (la + 1.0) * 1e-4 * 0.54 * 1.0 * g0 / (2.0 * math.pi * d * d)
        got = los_gain([3.0, 3.0, 2.5], [3.0, 3.0, 0.5], phys)
        assert got == pytest.approx(expect, rel=1e-13)
        assert got == pytest.approx(5.966594159846616e-06, rel=1e-12)

    def test_monotone_in_horizontal_offset(self, phys):
        offsets = np.linspace(0.0, 2.2, 12)
        gains = [los_gain([0.0, 0.0, 2.5], [x, 0.0, 0.5], phys) for x in offsets]
        assert all(a > b for a, b in zip(gains, gains[1:]))

    def test_receiver_above_source_gets_nothing(self, phys):
        assert los_gain([1.0, 1.0, 0.5], [1.0, 1.0, 2.0], phys) == 0.0


class TestPhysParamsValidation:
    def test_positive_fields_named(self):
        with pytest.raises(ValueError, match="bandwidth_hz"):
            table_phys(bandwidth_hz=0.0)
        with pytest.raises(ValueError, match="noise_psd"):
            table_phys(noise_psd_a2_per_hz=-1.0)

    def test_ranges(self):
        with pytest.raises(ValueError, match="modulation_index"):
            table_phys(modulation_index=1.5)
        with pytest.raises(ValueError, match="reflectance"):
            table_phys(reflectance=1.2)
        with pytest.raises(ValueError, match="semi_angle"):
            table_phys(semi_angle_rad=math.pi / 2)
        with pytest.raises(ValueError, match="fov_half"):
            table_phys(fov_half_rad=math.pi / 2 + 0.1)

    def test_derived_quantities(self, phys):
        assert phys.peak_amplitude == pytest.approx(0.14, rel=1e-14)
        assert phys.noise_var == pytest.approx(2e-15, rel=1e-14)


class TestNlosGain:
    ROOM = (8.0, 8.0, 2.5)

    def test_zero_reflectance_kills_everything(self):
        p = table_phys(reflectance=0.0)
        assert nlos_gain([4.0, 4.0, 2.5], [1.0, 4.0, 0.5], p, (0.2, 0.25), self.ROOM) == 0.0

    def test_near_wall_link_is_positive(self, phys):
        g = nlos_gain([4.0, 4.0, 2.5], [0.8, 4.0, 0.5], phys, (0.1, 0.05), self.ROOM)
        assert g > 0.0

    def test_grid_convergence_under_refinement(self, phys):
        args = ([4.0, 4.0, 2.5], [0.8, 4.0, 0.5], phys)
        coarse = nlos_gain(*args, (0.1, 0.05), self.ROOM)
        fine = nlos_gain(*args, (0.05, 0.025), self.ROOM)
        assert fine > 0
        assert abs(coarse - fine) / fine < 0.02

    def test_far_smaller_than_los_for_centered_user(self, phys):
        ap, user = [4.0, 4.0, 2.5], [4.0, 4.0, 0.5]
        los = los_gain(ap, user, phys)
        nlos = nlos_gain(ap, user, phys, (0.1, 0.05), self.ROOM)
        assert nlos < los

    def test_wide_fov_sees_reflections_everywhere(self):
        # with the receiver cone opened to 90 deg the centered user gets light
        p = table_phys(fov_half_rad=math.radians(89.9))
        g = nlos_gain([4.0, 4.0, 2.5], [4.0, 4.0, 0.5], p, (0.2, 0.25), self.ROOM)
        assert g > 0.0


class TestCapableSets:
    def test_epsilon_zero_gives_every_positive_path(self):
        scn = small_scenario([[1.0, 1.0]])
        table = gain_table(scn)
        total = table.total[:, 0]
        got = capable_ap_set(0, scn, 0.0)
        assert set(got) == set(np.flatnonzero(total > 0))

    def test_epsilon_above_max_empty(self):
        scn = small_scenario([[1.0, 1.0]])
        top = gain_table(scn).total[:, 0].max()
        assert capable_ap_set(0, scn, top * 1.01).size == 0

    def test_negative_epsilon_rejected(self):
        scn = small_scenario([[1.0, 1.0]])
        with pytest.raises(ValueError):
            capable_ap_set(0, scn, -1e-9)

    @given(st.floats(min_value=0, max_value=1e-5), st.floats(min_value=0, max_value=1e-5))
    @settings(max_examples=40, deadline=None)
    def test_superlevel_nesting(self, e1, e2):
        scn = small_scenario([[2.0, 3.0]])
        lo, hi = sorted((e1, e2))
        assert set(capable_ap_set(0, scn, hi)) <= set(capable_ap_set(0, scn, lo))


class TestDeterminism:
    def test_gain_table_recomputation_is_bit_identical(self):
        a = gain_table(small_scenario([[1.5, 2.0], [6.0, 6.0]]))
        b = gain_table(small_scenario([[1.5, 2.0], [6.0, 6.0]]))
        assert np.array_equal(a.los, b.los)
        assert np.array_equal(a.nlos, b.nlos)
        assert np.all(a.los >= 0) and np.all(a.nlos >= 0)

    def test_sampling_reproducible(self):
        scn = small_scenario([[1.0, 1.0], [6.0, 2.0]], beta=0.5)
        rng1 = np.random.default_rng(42)
        rng2 = np.random.default_rng(42)
        c1 = sample_slot_channel(scn, 0, rng1)
        c2 = sample_slot_channel(scn, 0, rng2)
        assert np.array_equal(c1.xi, c2.xi)
        assert np.array_equal(c1.gains, c2.gains)


class TestBlockage:
    def test_beta_one_always_includes_los(self):
        scn = small_scenario([[1.0, 1.0]], beta=1.0)
        table = gain_table(scn)
        chan = sample_slot_channel(scn, 0, np.random.default_rng(0))
        assert np.array_equal(chan.gains[:, 0], table.los[:, 0] + table.nlos[:, 0])

    def test_beta_zero_is_nlos_only(self):
        scn = small_scenario([[1.0, 1.0]], beta=0.0)
        table = gain_table(scn)
        chan = sample_slot_channel(scn, 0, np.random.default_rng(0))
        assert not chan.xi[0]
        assert np.array_equal(chan.gains[:, 0], table.nlos[:, 0])

    def test_empirical_blockage_frequency(self):
        beta = 0.7
        scn = small_scenario([[1.0, 1.0], [4.0, 4.0]], beta=beta)
        rng = np.random.default_rng(11)
        n = 10_000
        hits = sum(sample_slot_channel(scn, t, rng).xi[0] for t in range(n))
        sigma = math.sqrt(n * beta * (1 - beta))
        assert abs(hits - n * beta) < 3 * sigma

    def test_channel_state_accessors(self):
        scn = small_scenario([[1.0, 1.0], [6.0, 6.0]], beta=1.0)
        omegas = [np.array([0, 2]), np.array([1])]
        chan = sample_slot_channel(scn, 3, np.random.default_rng(1), omegas)
        assert np.array_equal(chan.h(0), chan.gains[[0, 2], 0])
        assert np.array_equal(chan.h_e(0, 1), chan.gains[[0, 2], 1])
        assert chan.h(1).shape == (1,)
        assert chan.slot == 3


class TestLayouts:
    def test_grid_positions(self):
        pts = grid_ap_positions((16.0, 16.0, 2.5), 8, 8)
        assert pts.shape == (64, 3)
        assert np.all(pts[:, 2] == 2.5)
        xs = np.unique(pts[:, 0])
        assert np.allclose(xs, np.arange(1.0, 16.0, 2.0))

    def test_random_users_reproducible_and_inside(self):
        a = random_user_positions((16.0, 16.0, 2.5), 10, 0.5, layout_seed=5)
        b = random_user_positions((16.0, 16.0, 2.5), 10, 0.5, layout_seed=5)
        c = random_user_positions((16.0, 16.0, 2.5), 10, 0.5, layout_seed=6)
        assert np.array_equal(a, b)
        assert not np.array_equal(a, c)
        assert np.all(a[:, :2] >= 0) and np.all(a[:, :2] <= 16.0)
        assert np.all(a[:, 2] == 0.5)


class TestScenarioValidation:
    def test_positions_must_be_inside_room(self, phys):
        with pytest.raises(ValueError, match="user_positions"):
            Scenario(
                room_dims=(4.0, 4.0, 2.5),
                ap_positions=np.array([[2.0, 2.0, 2.5]]),
                user_positions=np.array([[5.0, 1.0, 0.5]]),
                phys=phys,
                qos=uniform_qos(1),
            )

    def test_qos_length_must_match_users(self, phys):
        with pytest.raises(ValueError, match="qos"):
            Scenario(
                room_dims=(4.0, 4.0, 2.5),
                ap_positions=np.array([[2.0, 2.0, 2.5]]),
                user_positions=np.array([[1.0, 1.0, 0.5]]),
                phys=phys,
                qos=uniform_qos(3),
            )

    def test_beta_range(self, phys):
        with pytest.raises(ValueError, match="beta"):
            Scenario(
                room_dims=(4.0, 4.0, 2.5),
                ap_positions=np.array([[2.0, 2.0, 2.5]]),
                user_positions=np.array([[1.0, 1.0, 0.5]]),
                phys=phys,
                qos=uniform_qos(1),
                beta=1.5,
            )
