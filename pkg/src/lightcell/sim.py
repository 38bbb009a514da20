"""Slot-by-slot simulation engine and config handling.

Per slot: sample blockage, optimize each user's cell (or compute baseline
weights), pick an independent set of the interference graph, realize
worst-eavesdropper secrecy rates, update virtual queues and running ESR
accumulators, log. Queues at slot t+1 depend only on slot <= t
quantities; everything is deterministic given the run seed.

Algorithms:
    dpp    queue-aware: per-user swarm optimization of (w, alpha), then
           greedy minimum-weight independent set over the drift-plus-
           penalty weights
    mr     max-rate greedy scheduling, no jamming (alpha = 1, all-ones w)
    pf     proportional-fair greedy scheduling, no jamming
    mr-an  max-rate scheduling with fixed-split jamming (alpha = 0.7)
    pf-an  proportional-fair scheduling with fixed-split jamming

CSV outputs: slots.csv has one row per user per slot with columns
(t, user, scheduled, alpha, rate_nats, rate_bps, dpp_weight, F,
esr_running_bps); summary.csv has one row per user for single runs and
one row per (value, rep) for sweeps.
"""

from __future__ import annotations

import copy
import csv
import math
from dataclasses import dataclass

import numpy as np

from .channel import (
    Scenario,
    PhysParams,
    grid_ap_positions,
    random_user_positions,
    sample_slot_channel,
    capable_ap_set,
)
from .effective_rate import EsrAccumulator, QoSProfile
from .lyapunov import VirtualQueueState
from .pso import PsoConfig, solve_intra_cell
from .scheduler import (
    InterferenceGraph,
    build_ig,
    epsilon_threshold,
    greedy_max_weight_is,
    greedy_min_weight_is,
    mr_weights,
    PfState,
)
from .secrecy import (
    min_rate_batch,
    nullspace_basis,
    rate_to_bits_per_second,
)

ALGORITHMS = ("dpp", "mr", "pf", "mr-an", "pf-an")


class ConfigError(ValueError):
    """Invalid or missing configuration entry; message names the key."""


@dataclass
class SlotRecord:
    """Everything logged for one slot (per-user arrays)."""

    slot: int
    scheduled: frozenset[int]
    alpha: np.ndarray
    rate_nats: np.ndarray
    rate_bps: np.ndarray
    dpp_weight: np.ndarray
    f: np.ndarray  # backlog after this slot's update
    esr_running_bps: np.ndarray


@dataclass
class RunSummary:
    """Per-user long-run metrics of one simulation run."""

    algo: str
    seed: int
    horizon: int
    epsilon: float
    theta_per_bps: np.ndarray
    eb_bps: np.ndarray
    esr_bps: np.ndarray
    mean_rate_bps: np.ndarray
    sched_frac: np.ndarray
    norm_backlog: np.ndarray

    @property
    def n_users(self) -> int:
        return self.esr_bps.size

    @property
    def mean_esr_bps(self) -> float:
        return float(np.mean(self.esr_bps))

    @property
    def max_norm_backlog(self) -> float:
        return float(np.max(self.norm_backlog))


@dataclass
class RunResult:
    records: list[SlotRecord]
    summary: RunSummary
    f_history: np.ndarray  # (T, K_u), row t = F(t+1)
    rate_history_nats: np.ndarray  # (T, K_u)
    graph: InterferenceGraph


def _slot_rng(seed: int, slot: int, stream: int, user: int | None = None) -> np.random.Generator:
    key = [int(seed), int(slot), int(stream)]
    if user is not None:
        key.append(int(user))
    return np.random.default_rng(np.random.SeedSequence(key))


def _realize_fixed(channel, j: int, alpha: float) -> tuple[float, float]:
    """Rate of user j under an all-ones precoder and a fixed power split.

    Single-AP cells have no jamming directions, so their split is forced
    to 1. Returns (rate in nats/use, the split actually used).
    """
    omega = channel.omega[j]
    if omega.size == 0:
        return 0.0, 0.0
    h = channel.h(j)
    if not np.any(h):
        return 0.0, 0.0
    n = h.size
    used_alpha = alpha if n >= 2 else 1.0
    gamma = nullspace_basis(h) if n >= 2 else np.zeros((1, 0))
    he_cols = np.column_stack(
        [channel.h_e(j, k) for k in range(channel.n_users) if k != j]
    )
    rate = float(
        min_rate_batch(
            np.ones((1, n)), np.array([used_alpha]), h, he_cols, gamma,
            channel.phys.peak_amplitude, channel.phys.noise_var,
        )[0]
    )
    return rate, used_alpha


def run(
    scenario: Scenario,
    algorithm: str = "dpp",
    horizon: int = 150,
    seed: int = 1,
    pso_config: PsoConfig | None = None,
    epsilon: float | None = None,
    an_alpha: float = 0.7,
    pf_t_f: float = 100.0,
) -> RunResult:
    """Simulate one algorithm for `horizon` slots; deterministic given seed."""
    if algorithm not in ALGORITHMS:
        raise ValueError(f"unknown algorithm {algorithm!r}, expected one of {ALGORITHMS}")
    if horizon < 1:
        raise ValueError(f"horizon must be >= 1, got {horizon}")
    k_users = scenario.n_users
    if k_users < 2:
        raise ValueError("need >= 2 users: secrecy rates are defined against other users")
    if pso_config is None:
        pso_config = PsoConfig()

    qos = scenario.qos
    bandwidth = scenario.phys.bandwidth_hz
    eps = epsilon_threshold(scenario) if epsilon is None else float(epsilon)
    omegas = [capable_ap_set(j, scenario, eps) for j in range(k_users)]
    graph = build_ig(omegas)
    queues = VirtualQueueState.zeros(k_users)
    accumulators = [EsrAccumulator(q.theta) for q in qos]
    pf_state = PfState.fresh(k_users, t_f=pf_t_f) if algorithm in ("pf", "pf-an") else None

    records: list[SlotRecord] = []
    f_history = np.empty((horizon, k_users))
    rate_history = np.empty((horizon, k_users))
    sched_counts = np.zeros(k_users)

    for t in range(horizon):
        chan = sample_slot_channel(scenario, t, _slot_rng(seed, t, 0), omegas)
        rates = np.zeros(k_users)
        alphas = np.zeros(k_users)
        if algorithm == "dpp":
            weights = np.empty(k_users)
            sols = []
            for j in range(k_users):
                sol = solve_intra_cell(j, chan, queues, qos, pso_config, _slot_rng(seed, t, 1, j))
                sols.append(sol)
                weights[j] = sol.dpp_value
            eligible = {j for j in range(k_users) if sols[j].schedulable}
            sched = greedy_min_weight_is(graph, weights, eligible=eligible)
            for j in sched:
                rates[j] = sols[j].rate_nats
                alphas[j] = sols[j].params.alpha
        else:
            ref_rates = mr_weights(chan)
            if algorithm in ("pf", "pf-an"):
                weights = pf_state.priorities(ref_rates)
            else:
                weights = ref_rates
            sched = greedy_max_weight_is(graph, weights)
            if pf_state is not None:
                pf_state.update(ref_rates, sched)
            fixed = an_alpha if algorithm.endswith("-an") else 1.0
            for j in sched:
                rates[j], alphas[j] = _realize_fixed(chan, j, fixed)

        queues.advance(rates, qos)
        esr_bps = np.empty(k_users)
        for j in range(k_users):
            accumulators[j].add(rates[j])
            esr_bps[j] = rate_to_bits_per_second(accumulators[j].value(), bandwidth)
        sched_counts[list(sched)] += 1
        f_history[t] = queues.f
        rate_history[t] = rates
        records.append(
            SlotRecord(
                slot=t,
                scheduled=frozenset(sched),
                alpha=alphas,
                rate_nats=rates.copy(),
                rate_bps=rates * bandwidth / math.log(2.0),
                dpp_weight=np.asarray(weights, dtype=float).copy(),
                f=queues.f.copy(),
                esr_running_bps=esr_bps,
            )
        )

    summary = RunSummary(
        algo=algorithm,
        seed=seed,
        horizon=horizon,
        epsilon=eps,
        theta_per_bps=np.array([q.theta * math.log(2.0) / bandwidth for q in qos]),
        eb_bps=np.array([q.eb * bandwidth / math.log(2.0) for q in qos]),
        esr_bps=records[-1].esr_running_bps.copy(),
        mean_rate_bps=rate_history.mean(axis=0) * bandwidth / math.log(2.0),
        sched_frac=sched_counts / horizon,
        norm_backlog=f_history[-1] / horizon,
    )
    return RunResult(
        records=records,
        summary=summary,
        f_history=f_history,
        rate_history_nats=rate_history,
        graph=graph,
    )


# ---------------------------------------------------------------------------
# configuration


def reference_config() -> dict:
    """Default deployment: 16x16x2.5 m room, 8x8 AP grid, 10 users."""
    return {
        "room": {"x": 16.0, "y": 16.0, "z": 2.5},
        "aps": {"grid": [8, 8]},
        "users": {"count": 10, "height": 0.5, "layout_seed": 1},
        "phys": {
            "bandwidth_hz": 2.0e7,
            "leds_per_ap": 400,
            "i_dc_amps": 0.7,
            "modulation_index": 0.2,
            "conversion_w_per_a": 0.44,
            "responsivity_a_per_w": 0.54,
            "amplifier_gain_v_per_a": 1.0,
            "pd_area_m2": 1.0e-4,
            "refractive_index": 1.5,
            "semi_angle_deg": 70.0,
            "fov_deg": 100.0,
            "reflectance": 0.8,
            "noise_psd_a2_per_hz": 1.0e-22,
        },
        "channel": {"beta": 0.7, "wall_patch_m": [0.1, 0.05]},
        "qos": {
            "theta_per_bps": {"min": 1.0e-10, "max": 1.0e-7, "spread": "log"},
            "eb_bps": {"min": 1.0e5, "max": 1.0e6, "spread": "linear"},
        },
        "epsilon": {"quantile": 0.9, "grid_step_m": 0.5},
        "pso": {"swarm_size": 40, "max_iters": 100, "stall_threshold": 5, "c1": 1.0, "c2": 1.0},
        "run": {"algo": "dpp", "slots": 150, "seed": 1, "out": "runs", "an_alpha": 0.7, "pf_window": 100.0},
    }


def _need(cfg: dict, section: str, key: str):
    block = cfg.get(section)
    if not isinstance(block, dict) or key not in block:
        raise ConfigError(f"missing config key: {section}.{key}")
    return block[key]


def _spread_values(block: dict, key_prefix: str, count: int) -> np.ndarray:
    lo = block.get("min")
    hi = block.get("max", lo)
    mode = block.get("spread", "log")
    if lo is None:
        raise ConfigError(f"missing config key: qos.{key_prefix}.min")
    lo = float(lo)
    hi = float(hi)
    if count == 1:
        return np.array([lo])
    if mode == "log":
        if lo <= 0 or hi <= 0:
            raise ConfigError(f"qos.{key_prefix}: log spread needs positive min/max")
        return lo * (hi / lo) ** (np.arange(count) / (count - 1))
    if mode == "linear":
        return lo + (hi - lo) * np.arange(count) / (count - 1)
    raise ConfigError(f"qos.{key_prefix}.spread must be 'log' or 'linear', got {mode!r}")


def build_scenario(cfg: dict) -> Scenario:
    """Construct a Scenario from a plain config dict (angles in degrees)."""
    room = (
        float(_need(cfg, "room", "x")),
        float(_need(cfg, "room", "y")),
        float(_need(cfg, "room", "z")),
    )
    aps_cfg = cfg.get("aps") or {}
    if "positions" in aps_cfg:
        ap_pos = np.asarray(aps_cfg["positions"], dtype=float)
    elif "grid" in aps_cfg:
        nx, ny = (int(v) for v in aps_cfg["grid"])
        if nx < 1 or ny < 1:
            raise ConfigError(f"aps.grid entries must be >= 1, got {aps_cfg['grid']}")
        ap_pos = grid_ap_positions(room, nx, ny)
    else:
        raise ConfigError("missing config key: aps.grid (or aps.positions)")

    users_cfg = cfg.get("users") or {}
    if "positions" in users_cfg:
        user_pos = np.asarray(users_cfg["positions"], dtype=float)
    else:
        count = users_cfg.get("count")
        if count is None:
            raise ConfigError("missing config key: users.count (or users.positions)")
        count = int(count)
        if count < 1:
            raise ConfigError(f"users.count must be >= 1, got {count}")
        height = float(users_cfg.get("height", 0.5))
        layout_seed = int(users_cfg.get("layout_seed", 1))
        user_pos = random_user_positions(room, count, height, layout_seed)

    phys_cfg = cfg.get("phys") or {}
    semi_deg = float(_need(cfg, "phys", "semi_angle_deg"))
    fov_deg = float(_need(cfg, "phys", "fov_deg"))
    if not 0.0 < semi_deg < 90.0:
        raise ConfigError(f"phys.semi_angle_deg must be in (0, 90), got {semi_deg}")
    if not 0.0 < fov_deg <= 180.0:
        raise ConfigError(f"phys.fov_deg must be in (0, 180], got {fov_deg}")
    scalar_keys = (
        "bandwidth_hz",
        "leds_per_ap",
        "i_dc_amps",
        "modulation_index",
        "conversion_w_per_a",
        "responsivity_a_per_w",
        "amplifier_gain_v_per_a",
        "pd_area_m2",
        "refractive_index",
        "reflectance",
        "noise_psd_a2_per_hz",
    )
    kwargs = {}
    for key in scalar_keys:
        if key not in phys_cfg:
            raise ConfigError(f"missing config key: phys.{key}")
        kwargs[key] = float(phys_cfg[key]) if key != "leds_per_ap" else int(phys_cfg[key])
    try:
        phys = PhysParams(
            semi_angle_rad=math.radians(semi_deg),
            # config carries the full opening angle; the model wants its half
            fov_half_rad=math.radians(fov_deg) / 2.0,
            **kwargs,
        )
    except ValueError as exc:
        raise ConfigError(str(exc)) from exc

    chan_cfg = cfg.get("channel") or {}
    beta = float(chan_cfg.get("beta", 1.0))
    if not 0.0 <= beta <= 1.0:
        raise ConfigError(f"channel.beta must be in [0, 1], got {beta}")
    patch = chan_cfg.get("wall_patch_m", [0.1, 0.05])
    wall_grid = (float(patch[0]), float(patch[1]))

    qos_cfg = cfg.get("qos") or {}
    n = user_pos.shape[0]
    theta_block = qos_cfg.get("theta_per_bps")
    eb_block = qos_cfg.get("eb_bps")
    if not isinstance(theta_block, dict):
        raise ConfigError("missing config key: qos.theta_per_bps")
    if not isinstance(eb_block, dict):
        raise ConfigError("missing config key: qos.eb_bps")
    theta_bps = _spread_values(theta_block, "theta_per_bps", n)
    eb_bps = _spread_values(eb_block, "eb_bps", n)
    try:
        qos = [
            QoSProfile.from_bps(float(tb), float(eb), phys.bandwidth_hz)
            for tb, eb in zip(theta_bps, eb_bps)
        ]
    except ValueError as exc:
        raise ConfigError(f"qos: {exc}") from exc

    try:
        return Scenario(
            room_dims=room,
            ap_positions=ap_pos,
            user_positions=user_pos,
            phys=phys,
            qos=qos,
            wall_grid=wall_grid,
            beta=beta,
        )
    except ValueError as exc:
        raise ConfigError(str(exc)) from exc


def pso_config_from(cfg: dict) -> PsoConfig:
    block = cfg.get("pso") or {}
    try:
        return PsoConfig(
            swarm_size=int(block.get("swarm_size", 40)),
            max_iters=int(block.get("max_iters", 100)),
            stall_threshold=int(block.get("stall_threshold", 5)),
            c1=float(block.get("c1", 1.0)),
            c2=float(block.get("c2", 1.0)),
        )
    except ValueError as exc:
        raise ConfigError(f"pso: {exc}") from exc


def epsilon_from(cfg: dict, scenario: Scenario) -> float:
    block = cfg.get("epsilon") or {}
    if "value" in block:
        value = float(block["value"])
        if value < 0:
            raise ConfigError(f"epsilon.value must be >= 0, got {value}")
        return value
    return epsilon_threshold(
        scenario,
        grid_step=float(block.get("grid_step_m", 0.5)),
        quantile=float(block.get("quantile", 0.9)),
    )


# ---------------------------------------------------------------------------
# sweeps

SWEEP_AXES = ("theta", "fov", "user_count", "beta", "b_e", "alpha_fixed")


def apply_axis(cfg: dict, axis: str, value: float) -> dict:
    """Return a deep-copied config with one sweep axis applied."""
    out = copy.deepcopy(cfg)
    if axis == "theta":
        out.setdefault("qos", {})["theta_per_bps"] = {
            "min": float(value), "max": float(value), "spread": "linear",
        }
    elif axis == "fov":
        out.setdefault("phys", {})["fov_deg"] = float(value)
    elif axis == "user_count":
        if float(value) != int(value):
            raise ConfigError(f"sweep user_count values must be integers, got {value}")
        out.setdefault("users", {})["count"] = int(value)
        out["users"].pop("positions", None)
    elif axis == "beta":
        out.setdefault("channel", {})["beta"] = float(value)
    elif axis == "b_e":
        out.setdefault("qos", {})["eb_bps"] = {
            "min": float(value), "max": float(value), "spread": "linear",
        }
    elif axis == "alpha_fixed":
        if not 0.0 <= float(value) <= 1.0:
            raise ConfigError(f"sweep alpha_fixed values must be in [0, 1], got {value}")
        out.setdefault("run", {})["an_alpha"] = float(value)
    else:
        raise ConfigError(f"unknown sweep axis {axis!r}, expected one of {SWEEP_AXES}")
    return out


@dataclass
class SweepRow:
    """User-averaged outcome of one (axis value, repetition) run."""

    algo: str
    axis: str
    value: float
    rep: int
    seed: int
    horizon: int
    n_users: int
    mean_esr_bps: float
    mean_rate_bps: float
    mean_sched_frac: float
    max_norm_backlog: float
    mean_norm_backlog: float


def sweep(
    base_cfg: dict,
    axis: str,
    values,
    reps: int = 1,
    algorithm: str | None = None,
    horizon: int | None = None,
    seed: int | None = None,
) -> list[SweepRow]:
    """One run per (value, rep); reps shift both the layout and run seeds."""
    if reps < 1:
        raise ConfigError(f"reps must be >= 1, got {reps}")
    run_block = base_cfg.get("run") or {}
    algo = algorithm or run_block.get("algo", "dpp")
    slots = int(horizon or run_block.get("slots", 150))
    base_seed = int(seed if seed is not None else run_block.get("seed", 1))
    if algo == "dpp" and axis == "alpha_fixed":
        raise ConfigError("sweep alpha_fixed requires a fixed-split algorithm (mr-an or pf-an)")
    rows = []
    for value in values:
        cfg = apply_axis(base_cfg, axis, value)
        for rep in range(reps):
            users_block = cfg.setdefault("users", {})
            if "positions" not in users_block:
                users_block["layout_seed"] = int(users_block.get("layout_seed", 1)) + rep
            scenario = build_scenario(cfg)
            result = run(
                scenario,
                algorithm=algo,
                horizon=slots,
                seed=base_seed + rep,
                pso_config=pso_config_from(cfg),
                epsilon=epsilon_from(cfg, scenario),
                an_alpha=float(cfg.get("run", {}).get("an_alpha", 0.7)),
                pf_t_f=float(cfg.get("run", {}).get("pf_window", 100.0)),
            )
            s = result.summary
            rows.append(
                SweepRow(
                    algo=algo,
                    axis=axis,
                    value=float(value),
                    rep=rep,
                    seed=base_seed + rep,
                    horizon=slots,
                    n_users=s.n_users,
                    mean_esr_bps=s.mean_esr_bps,
                    mean_rate_bps=float(np.mean(s.mean_rate_bps)),
                    mean_sched_frac=float(np.mean(s.sched_frac)),
                    max_norm_backlog=s.max_norm_backlog,
                    mean_norm_backlog=float(np.mean(s.norm_backlog)),
                )
            )
    return rows


# ---------------------------------------------------------------------------
# CSV output


def _fmt(x) -> str:
    if isinstance(x, (bool, np.bool_)):
        return "1" if x else "0"
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    return repr(float(x))


SLOTS_COLUMNS = (
    "t", "user", "scheduled", "alpha", "rate_nats", "rate_bps",
    "dpp_weight", "F", "esr_running_bps",
)

RUN_SUMMARY_COLUMNS = (
    "algo", "seed", "horizon", "user", "theta_per_bps", "eb_bps",
    "esr_bps", "mean_rate_bps", "sched_frac", "norm_backlog",
)

SWEEP_SUMMARY_COLUMNS = (
    "algo", "axis", "value", "rep", "seed", "horizon", "n_users",
    "mean_esr_bps", "mean_rate_bps", "mean_sched_frac",
    "max_norm_backlog", "mean_norm_backlog",
)


def write_slots_csv(path, result: RunResult) -> None:
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(SLOTS_COLUMNS)
        for rec in result.records:
            for j in range(rec.alpha.size):
                writer.writerow(
                    [
                        rec.slot,
                        j,
                        _fmt(j in rec.scheduled),
                        _fmt(rec.alpha[j]),
                        _fmt(rec.rate_nats[j]),
                        _fmt(rec.rate_bps[j]),
                        _fmt(rec.dpp_weight[j]),
                        _fmt(rec.f[j]),
                        _fmt(rec.esr_running_bps[j]),
                    ]
                )


def write_run_summary_csv(path, summary: RunSummary) -> None:
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(RUN_SUMMARY_COLUMNS)
        for j in range(summary.n_users):
            writer.writerow(
                [
                    summary.algo,
                    summary.seed,
                    summary.horizon,
                    j,
                    _fmt(summary.theta_per_bps[j]),
                    _fmt(summary.eb_bps[j]),
                    _fmt(summary.esr_bps[j]),
                    _fmt(summary.mean_rate_bps[j]),
                    _fmt(summary.sched_frac[j]),
                    _fmt(summary.norm_backlog[j]),
                ]
            )


def write_sweep_summary_csv(path, rows: list[SweepRow]) -> None:
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(SWEEP_SUMMARY_COLUMNS)
        for r in rows:
            writer.writerow(
                [
                    r.algo, r.axis, _fmt(r.value), r.rep, r.seed, r.horizon, r.n_users,
                    _fmt(r.mean_esr_bps), _fmt(r.mean_rate_bps), _fmt(r.mean_sched_frac),
                    _fmt(r.max_norm_backlog), _fmt(r.mean_norm_backlog),
                ]
            )
