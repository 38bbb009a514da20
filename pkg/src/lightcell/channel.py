"""Indoor visible-light channel model.

Deterministic Lambertian line-of-sight (LoS) gains, first-reflection
non-LoS (NLoS) gains summed over wall patches, capable-AP sets, and per-slot
stochastic channel states under Bernoulli LoS blockage.

Geometry conventions: LEDs are ceiling-mounted facing straight down,
detectors face straight up. All angles are radians internally. The composite
link gain chains LED conversion (W/A), geometric loss, photodiode
responsivity (A/W) and transimpedance gain (V/A):

    h_los = eta*(L+1)*delta*varpi*T / (2*pi*d^2) * g(psi_in)
            * cos(psi_ir)^L * cos(psi_in)

with L the Lambertian order of the LED and g the optical concentrator gain,
zero outside the receiver field-of-view half-angle. A wall patch adds

    dh = eta*(L+1)*delta*varpi*T*rho / (2*pi*d1^2*d2^2)
         * cos(psi_ir)^L * cos(w1) * cos(w2) * g(psi_in) * cos(psi_in) * dA

where d1 is the AP-to-patch hop, d2 the patch-to-receiver hop, and w1, w2
the angles of the two hops against the patch normal. Patches with either
hop behind a surface, or arriving below the receiver's horizon, or outside
the field of view, contribute zero.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .effective_rate import QoSProfile


def lambertian_order(semi_angle_rad: float) -> float:
    """Lambertian emission order L = -ln(2)/ln(cos(semi_angle))."""
    c = math.cos(semi_angle_rad)
    if not (0.0 < c < 1.0):
        raise ValueError(
            f"semi_angle must lie strictly between 0 and pi/2 radians, got {semi_angle_rad}"
        )
    return -math.log(2.0) / math.log(c)


def concentrator_gain(psi_in, refractive_index: float, fov_half_rad: float):
    """Optical concentrator gain: a^2/sin^2(fov_half) inside the FoV, else 0."""
    g = refractive_index**2 / math.sin(fov_half_rad) ** 2
    return np.where(np.asarray(psi_in) <= fov_half_rad, g, 0.0)[()]


@dataclass(frozen=True)
class PhysParams:
    """Physical-layer constants of the network (SI units)."""

    bandwidth_hz: float
    leds_per_ap: int
    i_dc_amps: float
    modulation_index: float
    conversion_w_per_a: float  # LED current-to-light efficiency eta
    responsivity_a_per_w: float  # photodiode responsivity varpi
    amplifier_gain_v_per_a: float  # transimpedance gain T
    pd_area_m2: float  # detector physical area delta
    refractive_index: float  # concentrator index a
    semi_angle_rad: float  # LED half-power semi-angle
    fov_half_rad: float  # receiver field-of-view half-angle
    reflectance: float  # wall reflectance rho
    noise_psd_a2_per_hz: float  # noise power spectral density N0

    def __post_init__(self) -> None:
        positive = (
            "bandwidth_hz",
            "leds_per_ap",
            "i_dc_amps",
            "conversion_w_per_a",
            "responsivity_a_per_w",
            "amplifier_gain_v_per_a",
            "pd_area_m2",
            "refractive_index",
            "semi_angle_rad",
            "fov_half_rad",
            "noise_psd_a2_per_hz",
        )
        for name in positive:
            if not getattr(self, name) > 0:
                raise ValueError(f"phys.{name} must be > 0, got {getattr(self, name)}")
        if not 0.0 <= self.modulation_index <= 1.0:
            raise ValueError(
                f"phys.modulation_index must be in [0, 1], got {self.modulation_index}"
            )
        if not 0.0 <= self.reflectance <= 1.0:
            raise ValueError(f"phys.reflectance must be in [0, 1], got {self.reflectance}")
        if not self.semi_angle_rad < math.pi / 2:
            raise ValueError(
                f"phys.semi_angle_rad must be below pi/2, got {self.semi_angle_rad}"
            )
        if not self.fov_half_rad <= math.pi / 2:
            raise ValueError(
                f"phys.fov_half_rad must be at most pi/2, got {self.fov_half_rad}"
            )

    @property
    def peak_amplitude(self) -> float:
        """Peak signal current A = modulation_index * I_DC."""
        return self.modulation_index * self.i_dc_amps

    @property
    def noise_var(self) -> float:
        """Receiver noise variance sigma^2 = N0 * B."""
        return self.noise_psd_a2_per_hz * self.bandwidth_hz

    @property
    def lambertian(self) -> float:
        return lambertian_order(self.semi_angle_rad)


@dataclass
class Scenario:
    """Static deployment: room, AP grid, user layout, physics, QoS targets."""

    room_dims: tuple[float, float, float]
    ap_positions: np.ndarray  # (K_a, 3)
    user_positions: np.ndarray  # (K_u, 3)
    phys: PhysParams
    qos: list[QoSProfile]
    wall_grid: tuple[float, float] = (0.1, 0.05)  # patch (along-wall, vertical) dims
    beta: float = 1.0  # per-slot probability that a user's LoS is unblocked
    _gains: "GainTable | None" = field(default=None, repr=False, compare=False)

    def __post_init__(self) -> None:
        self.ap_positions = np.atleast_2d(np.asarray(self.ap_positions, dtype=float))
        self.user_positions = np.atleast_2d(np.asarray(self.user_positions, dtype=float))
        x, y, z = self.room_dims
        if not (x > 0 and y > 0 and z > 0):
            raise ValueError(f"room dims must be positive, got {self.room_dims}")
        if self.ap_positions.shape[0] < 1 or self.ap_positions.shape[1] != 3:
            raise ValueError("ap_positions must be a non-empty (K_a, 3) array")
        if self.user_positions.shape[0] < 1 or self.user_positions.shape[1] != 3:
            raise ValueError("user_positions must be a non-empty (K_u, 3) array")
        for name, pts in (("ap_positions", self.ap_positions), ("user_positions", self.user_positions)):
            lo_ok = np.all(pts >= 0.0)
            hi_ok = np.all(pts <= np.array([x, y, z]))
            if not (lo_ok and hi_ok):
                raise ValueError(f"{name} must lie inside the room {self.room_dims}")
        if not (self.wall_grid[0] > 0 and self.wall_grid[1] > 0):
            raise ValueError(f"wall_grid patch dims must be > 0, got {self.wall_grid}")
        if not 0.0 <= self.beta <= 1.0:
            raise ValueError(f"beta must be in [0, 1], got {self.beta}")
        if len(self.qos) != self.user_positions.shape[0]:
            raise ValueError(
                f"qos list length {len(self.qos)} != number of users {self.user_positions.shape[0]}"
            )

    @property
    def n_aps(self) -> int:
        return self.ap_positions.shape[0]

    @property
    def n_users(self) -> int:
        return self.user_positions.shape[0]


@dataclass(frozen=True)
class GainTable:
    """Deterministic per-link gains, precomputed once per scenario."""

    los: np.ndarray  # (K_a, K_u)
    nlos: np.ndarray  # (K_a, K_u)

    @property
    def total(self) -> np.ndarray:
        return self.los + self.nlos


def _los_gain_matrix(aps: np.ndarray, users: np.ndarray, phys: PhysParams) -> np.ndarray:
    """LoS gain for every (AP, user) pair; zero outside FoV or for non-descending links."""
    la = phys.lambertian
    const = (
        phys.conversion_w_per_a
        * (la + 1.0)
        * phys.pd_area_m2
        * phys.responsivity_a_per_w
        * phys.amplifier_gain_v_per_a
        / (2.0 * math.pi)
    )
    diff = users[None, :, :] - aps[:, None, :]  # (K_a, K_u, 3)
    d2 = np.sum(diff * diff, axis=2)
    d = np.sqrt(d2)
    dz = aps[:, None, 2] - users[None, :, 2]
    with np.errstate(invalid="ignore", divide="ignore"):
        cos_ang = dz / d  # irradiance == incidence for vertical normals
    valid = (d > 0) & (cos_ang > 0) & (cos_ang >= math.cos(phys.fov_half_rad))
    g = phys.refractive_index**2 / math.sin(phys.fov_half_rad) ** 2
    cos_ang = np.where(valid, cos_ang, 1.0)  # keep power() off invalid values
    gain = const * g * np.power(cos_ang, la) * cos_ang / np.where(valid, d2, 1.0)
    return np.where(valid, gain, 0.0)


def _wall_patches(
    room_dims: tuple[float, float, float], wall_grid: tuple[float, float]
) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Patch centers, inward normals and areas covering the four walls exactly."""
    rx, ry, rz = room_dims
    du, dv = wall_grid
    centers, normals, areas = [], [], []
    # (wall length, fixed coordinate axis, fixed value, inward normal)
    walls = (
        (rx, 1, 0.0, (0.0, 1.0, 0.0)),  # y = 0
        (rx, 1, ry, (0.0, -1.0, 0.0)),  # y = ry
        (ry, 0, 0.0, (1.0, 0.0, 0.0)),  # x = 0
        (ry, 0, rx, (-1.0, 0.0, 0.0)),  # x = rx
    )
    for length, fixed_axis, fixed_val, normal in walls:
        nu = max(1, round(length / du))
        nv = max(1, round(rz / dv))
        u = (np.arange(nu) + 0.5) * (length / nu)
        v = (np.arange(nv) + 0.5) * (rz / nv)
        uu, vv = np.meshgrid(u, v, indexing="ij")
        pts = np.empty((nu * nv, 3))
        pts[:, 1 - fixed_axis] = uu.ravel()
        pts[:, fixed_axis] = fixed_val
        pts[:, 2] = vv.ravel()
        centers.append(pts)
        normals.append(np.tile(normal, (nu * nv, 1)))
        areas.append(np.full(nu * nv, (length / nu) * (rz / nv)))
    return np.vstack(centers), np.vstack(normals), np.concatenate(areas)


def _ap_patch_factor(
    aps: np.ndarray, centers: np.ndarray, normals: np.ndarray, phys: PhysParams
) -> np.ndarray:
    """AP-side hop kernel cos(psi_ir)^L * cos(w1) / d1^2, per (AP, patch)."""
    la = phys.lambertian
    diff = centers[None, :, :] - aps[:, None, :]  # (K_a, P, 3)
    d2 = np.sum(diff * diff, axis=2)
    d = np.sqrt(d2)
    cos_ir = (aps[:, None, 2] - centers[None, :, 2]) / d
    cos_w1 = -np.einsum("apk,pk->ap", diff, normals) / d
    valid = (d > 0) & (cos_ir > 0) & (cos_w1 > 0)
    cos_ir = np.where(valid, cos_ir, 1.0)
    out = np.power(cos_ir, la) * np.where(valid, cos_w1, 0.0) / np.where(valid, d2, 1.0)
    return np.where(valid, out, 0.0)


def _patch_user_factor(
    centers: np.ndarray,
    normals: np.ndarray,
    areas: np.ndarray,
    users: np.ndarray,
    phys: PhysParams,
) -> np.ndarray:
    """User-side hop kernel cos(w2) * g * cos(psi_in) * dA / d2^2, per (patch, user)."""
    diff = users[None, :, :] - centers[:, None, :]  # (P, K_u, 3)
    d2 = np.sum(diff * diff, axis=2)
    d = np.sqrt(d2)
    cos_w2 = np.einsum("puk,pk->pu", diff, normals) / d
    cos_in = (centers[:, None, 2] - users[None, :, 2]) / d
    valid = (d > 0) & (cos_w2 > 0) & (cos_in > 0) & (cos_in >= math.cos(phys.fov_half_rad))
    g = phys.refractive_index**2 / math.sin(phys.fov_half_rad) ** 2
    out = np.where(valid, cos_w2, 0.0) * g * np.where(valid, cos_in, 0.0) / np.where(valid, d2, 1.0)
    return np.where(valid, out, 0.0) * areas[:, None]


def _nlos_const(phys: PhysParams) -> float:
    la = phys.lambertian
    return (
        phys.conversion_w_per_a
        * (la + 1.0)
        * phys.pd_area_m2
        * phys.responsivity_a_per_w
        * phys.amplifier_gain_v_per_a
        * phys.reflectance
        / (2.0 * math.pi)
    )


def _nlos_gain_matrix(
    aps: np.ndarray,
    users: np.ndarray,
    phys: PhysParams,
    wall_grid: tuple[float, float],
    room_dims: tuple[float, float, float],
) -> np.ndarray:
    """First-reflection gain summed over all wall patches, per (AP, user)."""
    if phys.reflectance == 0.0:
        return np.zeros((aps.shape[0], users.shape[0]))
    centers, normals, areas = _wall_patches(room_dims, wall_grid)
    t1 = _ap_patch_factor(aps, centers, normals, phys)
    t2 = _patch_user_factor(centers, normals, areas, users, phys)
    return _nlos_const(phys) * (t1 @ t2)


def los_gain(ap_pos, user_pos, phys: PhysParams) -> float:
    """LoS gain of a single AP-to-user link."""
    m = _los_gain_matrix(
        np.asarray(ap_pos, dtype=float)[None, :], np.asarray(user_pos, dtype=float)[None, :], phys
    )
    return float(m[0, 0])


def nlos_gain(
    ap_pos,
    user_pos,
    phys: PhysParams,
    wall_grid: tuple[float, float],
    room_dims: tuple[float, float, float],
) -> float:
    """First-reflection gain of a single AP-to-user link."""
    m = _nlos_gain_matrix(
        np.asarray(ap_pos, dtype=float)[None, :],
        np.asarray(user_pos, dtype=float)[None, :],
        phys,
        wall_grid,
        room_dims,
    )
    return float(m[0, 0])


def gain_table(scenario: Scenario) -> GainTable:
    """Deterministic gains for all (AP, user) pairs, cached on the scenario."""
    if scenario._gains is None:
        los = _los_gain_matrix(scenario.ap_positions, scenario.user_positions, scenario.phys)
        nlos = _nlos_gain_matrix(
            scenario.ap_positions,
            scenario.user_positions,
            scenario.phys,
            scenario.wall_grid,
            scenario.room_dims,
        )
        scenario._gains = GainTable(los=los, nlos=nlos)
    return scenario._gains


def capable_ap_set(user: int, scenario: Scenario, epsilon: float) -> np.ndarray:
    """Indices of APs whose unblocked total gain to the user exceeds epsilon."""
    if epsilon < 0:
        raise ValueError(f"epsilon must be >= 0, got {epsilon}")
    table = gain_table(scenario)
    total = table.los[:, user] + table.nlos[:, user]
    return np.flatnonzero(total > epsilon)


@dataclass
class ChannelState:
    """Realized channel of one slot: blockage draws plus gain columns.

    gains[:, j] = xi_j * los[:, j] + nlos[:, j]. The legitimate vector of
    user j is its own column restricted to its capable set; the wiretap
    vector toward eavesdropper k restricts column k (with k's blockage) to
    user j's capable set.
    """

    slot: int
    xi: np.ndarray  # (K_u,) bool, True = LoS unblocked
    gains: np.ndarray  # (K_a, K_u)
    omega: list[np.ndarray]  # per-user capable AP index arrays
    phys: PhysParams

    @property
    def n_users(self) -> int:
        return self.gains.shape[1]

    def h(self, j: int) -> np.ndarray:
        return self.gains[self.omega[j], j]

    def h_e(self, j: int, k: int) -> np.ndarray:
        return self.gains[self.omega[j], k]


def sample_slot_channel(
    scenario: Scenario,
    slot: int,
    rng: np.random.Generator,
    omega: list[np.ndarray] | None = None,
) -> ChannelState:
    """Draw one independent Bernoulli blockage per user and realize the slot's gains."""
    table = gain_table(scenario)
    xi = rng.random(scenario.n_users) < scenario.beta
    gains = table.nlos + xi[None, :] * table.los
    if omega is None:
        omega = [np.arange(scenario.n_aps)] * scenario.n_users
    return ChannelState(slot=slot, xi=xi, gains=gains, omega=omega, phys=scenario.phys)


def grid_ap_positions(room_dims: tuple[float, float, float], nx: int, ny: int) -> np.ndarray:
    """Uniform nx-by-ny ceiling grid of AP positions (cell centers)."""
    rx, ry, rz = room_dims
    xs = (np.arange(nx) + 0.5) * (rx / nx)
    ys = (np.arange(ny) + 0.5) * (ry / ny)
    xx, yy = np.meshgrid(xs, ys, indexing="ij")
    pts = np.column_stack([xx.ravel(), yy.ravel(), np.full(nx * ny, rz)])
    return pts


def random_user_positions(
    room_dims: tuple[float, float, float], count: int, height: float, layout_seed: int
) -> np.ndarray:
    """Uniform-random user positions on the receiving plane, reproducible by seed."""
    rng = np.random.default_rng(np.random.SeedSequence([int(layout_seed), 0x5EED]))
    rx, ry, _ = room_dims
    xy = rng.random((count, 2)) * np.array([rx, ry])
    return np.column_stack([xy, np.full(count, height)])
