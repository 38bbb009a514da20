"""Virtual queues and drift-plus-penalty weights.

Each user carries a dimensionless virtual backlog F tracking how far its
running effective-rate constraint is from being met:

    F(t+1) = max{ F(t) + e^(-theta*R(t)) - e^(-B_e*theta), 0 }

with R the realized secrecy rate (nats/use) and B_e the effective-bandwidth
target in the same unit. The per-slot scheduling weight of a user is

    dpp_user_term = -R + F * (e^(-theta*R) - e^(-B_e*theta))

which is strictly decreasing in R for F >= 0, so minimizing it never
prefers a lower rate. Telescoping the queue recursion gives the running
bound (1/t) * sum_tau(e^(-theta*R(tau)) - e^(-B_e*theta)) <= F(t)/t, which
drives the stability check.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .channel import ChannelState
from .effective_rate import QoSProfile
from .secrecy import SecureCellParams, achievable_secrecy_rate


def queue_update(f, rate_nats, theta, eb):
    """One-slot backlog recursion; accepts scalars or aligned arrays."""
    return np.maximum(np.asarray(f) + np.exp(-np.asarray(theta) * rate_nats) - np.exp(-np.asarray(eb) * theta), 0.0)[()]


def dpp_user_term(f, rate_nats, theta, eb):
    """Per-user drift-plus-penalty weight; lower is better."""
    return (-np.asarray(rate_nats) + f * (np.exp(-np.asarray(theta) * rate_nats) - np.exp(-np.asarray(eb) * theta)))[()]


@dataclass
class VirtualQueueState:
    """Backlogs of all users at the start of a slot."""

    f: np.ndarray
    slot: int = 0

    def __post_init__(self) -> None:
        self.f = np.asarray(self.f, dtype=float)
        if np.any(self.f < 0):
            raise ValueError("virtual backlogs must be nonnegative")

    @classmethod
    def zeros(cls, n_users: int) -> "VirtualQueueState":
        return cls(f=np.zeros(n_users), slot=0)

    def advance(self, rates_nats: np.ndarray, qos: list[QoSProfile]) -> None:
        """Apply the queue recursion for one slot's realized rates, in place."""
        theta = np.array([q.theta for q in qos])
        eb = np.array([q.eb for q in qos])
        self.f = queue_update(self.f, np.asarray(rates_nats, dtype=float), theta, eb)
        self.slot += 1


def dpp_total(
    scheduled: set[int],
    params: dict[int, SecureCellParams],
    channel: ChannelState,
    queues: VirtualQueueState,
    qos: list[QoSProfile],
    edges=(),
) -> float:
    """Slot objective: sum of per-user terms under a feasible schedule.

    Unscheduled users contribute their constant term F*(1 - e^(-B_e*theta)).
    Raises if any interfering pair (an edge) is scheduled together.
    """
    for j, k in edges:
        if j in scheduled and k in scheduled:
            raise ValueError(f"infeasible schedule: interfering users {j} and {k} both scheduled")
    total = 0.0
    for j in range(channel.n_users):
        if j in scheduled:
            rate = achievable_secrecy_rate(j, params[j], True, channel)
        else:
            rate = 0.0
        total += float(dpp_user_term(queues.f[j], rate, qos[j].theta, qos[j].eb))
    return total


@dataclass(frozen=True)
class StabilityReport:
    """Normalized backlogs and late-horizon growth slopes, one entry per user."""

    normalized_backlog: np.ndarray  # F(T)/T
    slope: np.ndarray  # least-squares dF/dt over the last half of the horizon

    @property
    def max_normalized_backlog(self) -> float:
        return float(np.max(self.normalized_backlog))


def stability_check(f_history: np.ndarray, horizon: int | None = None) -> StabilityReport:
    """Summarize queue growth from a (T, K_u) backlog trace (row t = F(t+1))."""
    f_history = np.atleast_2d(np.asarray(f_history, dtype=float))
    t_total = horizon if horizon is not None else f_history.shape[0]
    if t_total < 100:
        raise ValueError(f"stability check needs a horizon >= 100 slots, got {t_total}")
    f_history = f_history[:t_total]
    half = t_total // 2
    times = np.arange(half, t_total, dtype=float) + 1.0
    tail = f_history[half:]
    design = np.column_stack([times, np.ones_like(times)])
    coef, *_ = np.linalg.lstsq(design, tail, rcond=None)
    return StabilityReport(normalized_backlog=f_history[-1] / t_total, slope=coef[0])
