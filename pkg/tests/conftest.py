"""Shared builders for test scenarios."""

import math

import numpy as np
import pytest

from lightcell import PhysParams, Scenario, QoSProfile


def table_phys(**overrides) -> PhysParams:
    """Default physical constants used across the tests (20 MHz, 0.14 A peak)."""
    kwargs = dict(
        bandwidth_hz=2.0e7,
        leds_per_ap=400,
        i_dc_amps=0.7,
        modulation_index=0.2,
        conversion_w_per_a=0.44,
        responsivity_a_per_w=0.54,
        amplifier_gain_v_per_a=1.0,
        pd_area_m2=1.0e-4,
        refractive_index=1.5,
        semi_angle_rad=math.radians(70.0),
        fov_half_rad=math.radians(50.0),
        reflectance=0.8,
        noise_psd_a2_per_hz=1.0e-22,
    )
    kwargs.update(overrides)
    return PhysParams(**kwargs)


def uniform_qos(n: int, theta: float = 0.3, eb: float = 0.03) -> list[QoSProfile]:
    return [QoSProfile(theta=theta, eb=eb) for _ in range(n)]


def small_scenario(
    user_xy,
    room=(8.0, 8.0, 2.5),
    ap_grid=(2, 2),
    beta: float = 1.0,
    phys: PhysParams | None = None,
    qos: list[QoSProfile] | None = None,
) -> Scenario:
    """Compact deployment with users at explicit (x, y) receiving-plane spots."""
    from lightcell import grid_ap_positions

    user_xy = np.atleast_2d(np.asarray(user_xy, dtype=float))
    users = np.column_stack([user_xy, np.full(user_xy.shape[0], 0.5)])
    return Scenario(
        room_dims=room,
        ap_positions=grid_ap_positions(room, *ap_grid),
        user_positions=users,
        phys=phys or table_phys(),
        qos=qos or uniform_qos(user_xy.shape[0]),
        wall_grid=(0.2, 0.25),  # coarse but plenty for tests
        beta=beta,
    )


@pytest.fixture(scope="session")
def phys():
    return table_phys()
