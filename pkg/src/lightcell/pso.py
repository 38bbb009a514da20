"""Particle swarm minimizer with stall perturbation, plus the per-cell solver.

The swarm update is the classic two-attractor rule with a linearly
decaying inertia weight:

    V <- zeta(n) V + c1 r1 (pbest - P) + c2 r2 (gbest - P)
    P <- clamp(P + V),     zeta(n) = 0.9 - 0.5 n / n_max

r1, r2 drawn fresh per particle per coordinate each iteration. When the
global best position has not moved for `stall_threshold` consecutive
iterations, one coordinate m of gbest sitting at value 1 (a saturated
precoder entry) is nudged multiplicatively to (1 - 0.1 r3) * gbest[m]; the
nudge is kept only if it strictly improves the fitness.

`solve_intra_cell` wraps the minimizer around one user's slot objective:
position = [w, alpha], fitness = drift-plus-penalty weight of the user's
worst-eavesdropper secrecy rate.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .channel import ChannelState
from .effective_rate import QoSProfile
from .lyapunov import VirtualQueueState, dpp_user_term
from .secrecy import SecureCellParams, min_rate_batch, mrt_vector, nullspace_basis

_SATURATION_TOL = 1e-6


@dataclass(frozen=True)
class PsoConfig:
    """Swarm hyperparameters."""

    swarm_size: int = 40
    max_iters: int = 100
    stall_threshold: int = 5
    c1: float = 1.0
    c2: float = 1.0
    seed: int | None = None

    def __post_init__(self) -> None:
        if self.swarm_size < 2:
            raise ValueError(f"pso.swarm_size must be >= 2, got {self.swarm_size}")
        if self.max_iters < 1:
            raise ValueError(f"pso.max_iters must be >= 1, got {self.max_iters}")
        if self.stall_threshold < 1:
            raise ValueError(f"pso.stall_threshold must be >= 1, got {self.stall_threshold}")


@dataclass
class PsoResult:
    position: np.ndarray
    value: float
    trace: np.ndarray  # gbest fitness after init and after each iteration


def pso_minimize(
    fitness,
    lo: np.ndarray,
    hi: np.ndarray,
    config: PsoConfig,
    rng: np.random.Generator | None = None,
    seed_positions=(),
    perturb_coords: np.ndarray | None = None,
) -> PsoResult:
    """Minimize a vectorized fitness over the box [lo, hi].

    `fitness` maps an (S, dims) position block to (S,) values; non-finite
    values are treated as +inf. `seed_positions` are injected verbatim
    (clamped) as the first particles. `perturb_coords` restricts the stall
    nudge to the given coordinate indices (default: all coordinates).
    """
    lo = np.asarray(lo, dtype=float)
    hi = np.asarray(hi, dtype=float)
    dims = lo.size
    if hi.shape != lo.shape or np.any(hi <= lo):
        raise ValueError("bounds must satisfy lo < hi elementwise")
    if rng is None:
        rng = np.random.default_rng(config.seed)
    if perturb_coords is None:
        perturb_coords = np.arange(dims)
    perturb_coords = np.asarray(perturb_coords, dtype=int)
    s = config.swarm_size
    width = hi - lo

    pos = lo + rng.random((s, dims)) * width
    for i, seed_pos in enumerate(seed_positions):
        if i >= s:
            break
        pos[i] = np.clip(np.asarray(seed_pos, dtype=float), lo, hi)
    vel = rng.uniform(-width, width, size=(s, dims))

    def safe_fitness(block: np.ndarray) -> np.ndarray:
        vals = np.asarray(fitness(block), dtype=float)
        return np.where(np.isfinite(vals), vals, np.inf)

    pbest = pos.copy()
    pbest_val = safe_fitness(pos)
    g_idx = int(np.argmin(pbest_val))
    gbest = pbest[g_idx].copy()
    gbest_val = float(pbest_val[g_idx])
    trace = [gbest_val]
    stall = 0

    for n in range(1, config.max_iters + 1):
        zeta = 0.9 - 0.5 * n / config.max_iters
        r1 = rng.random((s, dims))
        r2 = rng.random((s, dims))
        vel = zeta * vel + config.c1 * r1 * (pbest - pos) + config.c2 * r2 * (gbest - pos)
        pos = np.clip(pos + vel, lo, hi)
        vals = safe_fitness(pos)
        improved = vals < pbest_val
        pbest[improved] = pos[improved]
        pbest_val[improved] = vals[improved]
        prev_gbest = gbest
        c_idx = int(np.argmin(pbest_val))
        if pbest_val[c_idx] < gbest_val:
            gbest = pbest[c_idx].copy()
            gbest_val = float(pbest_val[c_idx])
        stall = stall + 1 if np.array_equal(gbest, prev_gbest) else 0
        if stall >= config.stall_threshold:
            saturated = perturb_coords[
                np.abs(gbest[perturb_coords] - 1.0) < _SATURATION_TOL
            ]
            pool = saturated if saturated.size else perturb_coords
            m = int(pool[rng.integers(pool.size)])
            cand = gbest.copy()
            cand[m] *= 1.0 - 0.1 * rng.random()
            cand = np.clip(cand, lo, hi)
            cand_val = float(safe_fitness(cand[None, :])[0])
            if cand_val < gbest_val:
                gbest, gbest_val = cand, cand_val
            stall = 0
        trace.append(gbest_val)

    return PsoResult(position=gbest, value=gbest_val, trace=np.asarray(trace))


@dataclass
class IntraCellSolution:
    """Best transmit parameters found for one user in one slot."""

    params: SecureCellParams | None
    dpp_value: float
    rate_nats: float
    schedulable: bool = True


def _unschedulable_value(f: float, qos: QoSProfile) -> float:
    return float(f * (1.0 - np.exp(-qos.eb * qos.theta)))


def solve_intra_cell(
    j: int,
    channel: ChannelState,
    queues: VirtualQueueState,
    qos: list[QoSProfile],
    config: PsoConfig,
    rng: np.random.Generator,
) -> IntraCellSolution:
    """Optimize (w, alpha) of user j's cell against its slot objective.

    Users with an empty capable set, or with an all-zero channel vector
    (every capable AP blocked and no reflections), are reported
    unschedulable and keep the constant no-service objective value.
    """
    f = float(queues.f[j])
    profile = qos[j]
    omega = channel.omega[j]
    if omega.size == 0:
        return IntraCellSolution(None, _unschedulable_value(f, profile), 0.0, schedulable=False)
    h = channel.h(j)
    if not np.any(h):
        return IntraCellSolution(None, _unschedulable_value(f, profile), 0.0, schedulable=False)

    n = h.size
    phys = channel.phys
    he_cols = np.column_stack([channel.h_e(j, k) for k in range(channel.n_users) if k != j])
    gamma = nullspace_basis(h) if n >= 2 else np.zeros((1, 0))
    mrt = mrt_vector(h)

    if n == 1:
        # single-AP cell: no jamming directions, spend all power on signal
        def fitness(block: np.ndarray) -> np.ndarray:
            w = block
            alphas = np.ones(block.shape[0])
            rates = min_rate_batch(w, alphas, h, he_cols, gamma, phys.peak_amplitude, phys.noise_var)
            return dpp_user_term(f, rates, profile.theta, profile.eb)

        result = pso_minimize(
            fitness,
            lo=np.array([-1.0]),
            hi=np.array([1.0]),
            config=config,
            rng=rng,
            seed_positions=[np.array([1.0]), mrt],
            perturb_coords=np.array([0]),
        )
        w_best = result.position
        alpha_best = 1.0
    else:
        def fitness(block: np.ndarray) -> np.ndarray:
            w = block[:, :n]
            alphas = block[:, n]
            rates = min_rate_batch(w, alphas, h, he_cols, gamma, phys.peak_amplitude, phys.noise_var)
            return dpp_user_term(f, rates, profile.theta, profile.eb)

        ones = np.ones(n)
        result = pso_minimize(
            fitness,
            lo=np.concatenate([np.full(n, -1.0), [0.0]]),
            hi=np.concatenate([np.full(n, 1.0), [1.0]]),
            config=config,
            rng=rng,
            seed_positions=[
                np.concatenate([ones, [0.7]]),
                np.concatenate([mrt, [0.7]]),
                np.concatenate([ones, [1.0]]),
            ],
            perturb_coords=np.arange(n),
        )
        w_best = result.position[:n]
        alpha_best = float(result.position[n])

    params = SecureCellParams(alpha=alpha_best, w=w_best, gamma_hat=gamma)
    rate = float(
        min_rate_batch(
            w_best[None, :], np.array([alpha_best]), h, he_cols, gamma,
            phys.peak_amplitude, phys.noise_var,
        )[0]
    )
    return IntraCellSolution(params=params, dpp_value=result.value, rate_nats=rate)
