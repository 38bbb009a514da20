"""Interference graph, greedy independent-set scheduling, and baselines.

Two users interfere when their capable-AP sets intersect; scheduling a
slot means picking an independent set of the interference graph, so every
scheduled cell owns its APs exclusively. The drift-plus-penalty scheduler
extracts minimum-weight vertices (weights are per-user slot objectives,
lower is better); the max-rate and proportional-fair baselines extract
maximum-weight vertices (rate or rate-over-throughput priorities). Both
directions delete the chosen vertex's closed neighborhood and repeat, so
the result is always maximal.

The capability threshold epsilon is calibrated on a receiving-plane grid:
it is the largest gain level that at least a target fraction (default
90%) of plane positions reach with their summed reflected-path gains.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .channel import (
    ChannelState,
    Scenario,
    _ap_patch_factor,
    _nlos_const,
    _patch_user_factor,
    _wall_patches,
)

_TWO_PI_E = 2.0 * math.pi * math.e


def epsilon_threshold(
    scenario: Scenario,
    grid_step: float = 0.5,
    quantile: float = 0.9,
    plane_height: float = 0.5,
) -> float:
    """Largest gain v reached by >= quantile of receiving-plane positions.

    Per position, the reflected-path (NLoS) gains from all APs are summed;
    the returned threshold is the exact order statistic of those sums, so
    capable sets built from it stay nonempty for at least the target
    fraction of the plane.
    """
    if not 0.0 < quantile < 1.0:
        raise ValueError(f"quantile must be in (0, 1), got {quantile}")
    rx, ry, _ = scenario.room_dims
    nx = max(1, round(rx / grid_step))
    ny = max(1, round(ry / grid_step))
    if nx * ny < 100:
        raise ValueError(
            f"receiving-plane grid too coarse: {nx * ny} positions, need >= 100"
        )
    xs = (np.arange(nx) + 0.5) * (rx / nx)
    ys = (np.arange(ny) + 0.5) * (ry / ny)
    xx, yy = np.meshgrid(xs, ys, indexing="ij")
    grid = np.column_stack([xx.ravel(), yy.ravel(), np.full(nx * ny, plane_height)])

    phys = scenario.phys
    if phys.reflectance == 0.0:
        return 0.0
    centers, normals, areas = _wall_patches(scenario.room_dims, scenario.wall_grid)
    t1 = _ap_patch_factor(scenario.ap_positions, centers, normals, phys)
    t1_sum = t1.sum(axis=0)  # total AP-side illumination per patch
    const = _nlos_const(phys)
    sums = np.empty(grid.shape[0])
    chunk = 128  # keeps the (patches x positions) block small
    for start in range(0, grid.shape[0], chunk):
        block = grid[start : start + chunk]
        t2 = _patch_user_factor(centers, normals, areas, block, phys)
        sums[start : start + len(block)] = const * (t1_sum @ t2)
    order = np.sort(sums)
    idx = min(int(math.floor(order.size * (1.0 - quantile))), order.size - 1)
    return float(order[idx])


@dataclass(frozen=True)
class InterferenceGraph:
    """Conflict graph over users; only users with nonempty capable sets appear."""

    n_users: int
    vertices: tuple[int, ...]
    edges: frozenset[tuple[int, int]]  # (j, k) with j < k
    neighbors: dict[int, frozenset[int]]


def build_ig(omegas: list[np.ndarray]) -> InterferenceGraph:
    """Edge (j, k) iff the capable-AP sets of j and k intersect."""
    n = len(omegas)
    sets = [frozenset(int(i) for i in om) for om in omegas]
    vertices = tuple(j for j in range(n) if sets[j])
    edges = set()
    nbrs: dict[int, set[int]] = {j: set() for j in vertices}
    for a in range(len(vertices)):
        j = vertices[a]
        for b in range(a + 1, len(vertices)):
            k = vertices[b]
            if sets[j] & sets[k]:
                edges.add((j, k))
                nbrs[j].add(k)
                nbrs[k].add(j)
    return InterferenceGraph(
        n_users=n,
        vertices=vertices,
        edges=frozenset(edges),
        neighbors={j: frozenset(s) for j, s in nbrs.items()},
    )


@dataclass(frozen=True)
class Schedule:
    """One slot's AP-to-user assignment."""

    scheduled: frozenset[int]
    pi: np.ndarray  # (K_a, K_u) binary

    @classmethod
    def from_set(
        cls, scheduled, omegas: list[np.ndarray], n_aps: int
    ) -> "Schedule":
        n_users = len(omegas)
        pi = np.zeros((n_aps, n_users), dtype=np.int8)
        for j in scheduled:
            pi[omegas[j], j] = 1
        return cls(scheduled=frozenset(int(j) for j in scheduled), pi=pi)


def _greedy_is(graph: InterferenceGraph, key, eligible) -> set[int]:
    remaining = set(graph.vertices)
    if eligible is not None:
        remaining &= set(eligible)
    chosen: set[int] = set()
    while remaining:
        v = min(remaining, key=key)
        chosen.add(v)
        remaining.discard(v)
        remaining -= graph.neighbors[v]
    return chosen


def greedy_min_weight_is(graph: InterferenceGraph, weights, eligible=None) -> set[int]:
    """Repeated extract-min + closed-neighborhood deletion; ties to lowest index.

    `eligible` optionally restricts the candidate vertices (users whose
    cell cannot carry a signal this slot are left out); the result is
    maximal within the eligible set.
    """
    return _greedy_is(graph, lambda u: (weights[u], u), eligible)


def greedy_max_weight_is(graph: InterferenceGraph, weights, eligible=None) -> set[int]:
    """Same deletion scheme with extract-max; ties to lowest index."""
    return _greedy_is(graph, lambda u: (-weights[u], u), eligible)


def mr_rate(h: np.ndarray, A: float, sigma2: float) -> float:
    """Jamming-free reference rate 0.5*ln(1 + 4 h.h A^2 / (2 pi e s2)), nats/use."""
    h = np.asarray(h, dtype=float)
    return 0.5 * math.log(1.0 + 4.0 * float(h @ h) * A * A / (_TWO_PI_E * sigma2))


def mr_weights(channel: ChannelState) -> np.ndarray:
    """Per-user reference rates over their capable sets (0 for isolated users)."""
    A = channel.phys.peak_amplitude
    sigma2 = channel.phys.noise_var
    out = np.zeros(channel.n_users)
    for j in range(channel.n_users):
        if channel.omega[j].size:
            out[j] = mr_rate(channel.h(j), A, sigma2)
    return out


def pf_priority_update(c: float, r: float, scheduled: bool, t_f: float) -> float:
    """Throughput-memory recursion: decay, plus the last rate if served."""
    if t_f < 1:
        raise ValueError(f"t_f must be >= 1, got {t_f}")
    keep = (1.0 - 1.0 / t_f) * c
    return keep + r / t_f if scheduled else keep


@dataclass
class PfState:
    """Smoothed throughput per user for proportional-fair priorities."""

    c: np.ndarray
    t_f: float = 100.0
    started: bool = False

    @classmethod
    def fresh(cls, n_users: int, t_f: float = 100.0) -> "PfState":
        return cls(c=np.zeros(n_users), t_f=t_f)

    def priorities(self, rates: np.ndarray) -> np.ndarray:
        if not self.started:  # first slot: seed memory with the current rates
            self.c = np.asarray(rates, dtype=float).copy()
            self.started = True
        return np.asarray(rates) / np.maximum(self.c, 1e-300)

    def update(self, rates: np.ndarray, scheduled) -> None:
        mask = np.zeros_like(self.c, dtype=bool)
        mask[list(scheduled)] = True
        keep = (1.0 - 1.0 / self.t_f) * self.c
        self.c = np.where(mask, keep + np.asarray(rates) / self.t_f, keep)


def baseline_schedule(graph: InterferenceGraph, weights) -> set[int]:
    """Max-weight greedy selection used by the rate and fairness baselines."""
    return greedy_max_weight_is(graph, weights)
