"""Artificial-noise beamforming and the achievable secrecy-rate lower bound.

A scheduled user's cell splits its peak amplitude A between a useful
signal (fraction alpha, precoded by w over the cell's APs) and jamming
emitted in the nullspace of the user's own channel vector, so the jamming
is invisible to the intended user but degrades every potential internal
eavesdropper. The per-eavesdropper lower bound combines four log terms

    R >= [ 1/2 ln(4 (w.h)^2 a^2 A^2 + 2 pi e s2) - 1/2 ln(2 pi e s2)
           - 1/2 ln((2 pi e / 3) ((w.he)^2 a^2 A^2 + J (Aa)^2 + 3 s2))
           + 1/2 ln(4 J (Aa)^2 + 2 pi e s2) ]+

with a = alpha, s2 the noise variance, Aa = (1 - alpha) A / (n - 1) the
per-direction jamming amplitude over an n-AP cell, and
J = sum_l (G_l . he)^2 the jamming leakage through the nullspace basis
columns G_l. Natural logarithms; rates are nats per channel use. The
clamp at zero applies per eavesdropper, and the user's achievable rate is
the minimum over all other users acting as eavesdroppers.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .channel import ChannelState

LN2 = math.log(2.0)
_TWO_PI_E = 2.0 * math.pi * math.e


def nullspace_basis(h: np.ndarray) -> np.ndarray:
    """Deterministic basis of the nullspace of a nonzero vector h.

    Returns an (n, n-1) matrix whose columns are linearly independent,
    orthogonal to h, L1-normalized, with the first nonzero entry of each
    column positive. Built from a Householder reflector, so the result is
    a pure function of h (no SVD sign indeterminacy).
    """
    h = np.asarray(h, dtype=float)
    if h.ndim != 1 or h.size < 2:
        raise ValueError(f"nullspace requires a 1-D vector of length >= 2, got shape {h.shape}")
    norm = np.linalg.norm(h)
    if norm == 0.0:
        raise ValueError("nullspace undefined for the zero vector")
    n = h.size
    sign0 = 1.0 if h[0] >= 0 else -1.0
    v = h.astype(float).copy()
    v[0] += sign0 * norm
    q = np.eye(n) - (2.0 / (v @ v)) * np.outer(v, v)
    basis = q[:, 1:]  # columns 1..n-1 of the reflector are orthogonal to h
    l1 = np.sum(np.abs(basis), axis=0)
    basis = basis / l1
    # sign off the first entry that is nonzero beyond rounding noise
    lead_idx = np.argmax(np.abs(basis) > 1e-12, axis=0)
    lead = basis[lead_idx, np.arange(n - 1)]
    return basis * np.where(lead < 0, -1.0, 1.0)


@dataclass(frozen=True)
class SecureCellParams:
    """Per-cell transmit parameters: power split alpha, precoder w, AN basis."""

    alpha: float
    w: np.ndarray
    gamma_hat: np.ndarray = field(default=None)  # type: ignore[assignment]

    def __post_init__(self) -> None:
        object.__setattr__(self, "w", np.atleast_1d(np.asarray(self.w, dtype=float)))
        n = self.w.size
        if self.gamma_hat is None:
            object.__setattr__(self, "gamma_hat", np.zeros((n, 0)))  # no jamming directions
        else:
            object.__setattr__(self, "gamma_hat", np.asarray(self.gamma_hat, dtype=float))
        if not 0.0 <= self.alpha <= 1.0 + 1e-12:
            raise ValueError(f"alpha must be in [0, 1], got {self.alpha}")
        if np.max(np.abs(self.w)) > 1.0 + 1e-9:
            raise ValueError("precoder w must satisfy max|w_i| <= 1")
        expect = (n, n - 1) if n >= 2 else (n, 0)
        if self.gamma_hat.size and self.gamma_hat.shape != expect:
            raise ValueError(
                f"gamma_hat shape {self.gamma_hat.shape} does not match cell size {n}"
            )

    @classmethod
    def for_channel(cls, h: np.ndarray, alpha: float, w: np.ndarray) -> "SecureCellParams":
        """Build params with the AN basis derived from the user's channel h."""
        h = np.atleast_1d(np.asarray(h, dtype=float))
        gh = nullspace_basis(h) if h.size >= 2 else np.zeros((1, 0))
        return cls(alpha=alpha, w=w, gamma_hat=gh)


def mrt_vector(h: np.ndarray) -> np.ndarray:
    """Maximum-ratio precoder under the sup-norm budget: h / max|h_i|."""
    h = np.atleast_1d(np.asarray(h, dtype=float))
    peak = np.max(np.abs(h))
    if peak == 0.0:
        return np.ones_like(h)
    return h / peak


def _jamming_leakage(gamma_hat: np.ndarray, h_e: np.ndarray) -> float:
    """J = sum over basis columns of (column . h_e)^2."""
    if gamma_hat.size == 0:
        return 0.0
    proj = gamma_hat.T @ h_e
    return float(proj @ proj)


def pairwise_secrecy_rate_lb(
    params: SecureCellParams, h: np.ndarray, h_e: np.ndarray, A: float, sigma2: float
) -> float:
    """Secrecy-rate lower bound against one eavesdropper, nats/use, >= 0."""
    if not (A > 0 and sigma2 > 0):
        raise ValueError(f"A and sigma2 must be positive, got A={A}, sigma2={sigma2}")
    h = np.atleast_1d(np.asarray(h, dtype=float))
    h_e = np.atleast_1d(np.asarray(h_e, dtype=float))
    alpha = params.alpha
    w = params.w
    n = w.size
    au2 = (alpha * A) ** 2
    if n >= 2:
        aa2 = ((1.0 - alpha) * A / (n - 1)) ** 2
    else:
        aa2 = 0.0  # single-AP cell: no jamming directions
    c0 = _TWO_PI_E * sigma2
    wh = float(w @ h)
    whe = float(w @ h_e)
    j_leak = _jamming_leakage(params.gamma_hat, h_e)
    t1 = 0.5 * math.log(4.0 * wh * wh * au2 + c0)
    t2 = 0.5 * math.log(c0)
    t3 = 0.5 * math.log((_TWO_PI_E / 3.0) * (whe * whe * au2 + j_leak * aa2 + 3.0 * sigma2))
    t4 = 0.5 * math.log(4.0 * j_leak * aa2 + c0)
    return max(t1 - t2 - t3 + t4, 0.0)


def min_rate_batch(
    W: np.ndarray,
    alphas: np.ndarray,
    h: np.ndarray,
    he_cols: np.ndarray,
    gamma_hat: np.ndarray,
    A: float,
    sigma2: float,
) -> np.ndarray:
    """Vectorized worst-eavesdropper rate for S candidate (w, alpha) pairs.

    W is (S, n), alphas (S,), he_cols (n, E) stacks eavesdropper channel
    vectors as columns. Returns (S,) of min-over-eavesdroppers clamped
    bounds, matching pairwise_secrecy_rate_lb column by column.
    """
    W = np.atleast_2d(np.asarray(W, dtype=float))
    alphas = np.asarray(alphas, dtype=float)
    h = np.asarray(h, dtype=float)
    he_cols = np.asarray(he_cols, dtype=float)
    if he_cols.ndim == 1:
        he_cols = he_cols[:, None]
    n = W.shape[1]
    au2 = (alphas * A) ** 2  # (S,)
    if n >= 2:
        aa2 = ((1.0 - alphas) * A / (n - 1)) ** 2
    else:
        aa2 = np.zeros_like(alphas)
    c0 = _TWO_PI_E * sigma2
    wh = W @ h  # (S,)
    whe = W @ he_cols  # (S, E)
    if gamma_hat.size:
        j_leak = np.sum((gamma_hat.T @ he_cols) ** 2, axis=0)  # (E,)
    else:
        j_leak = np.zeros(he_cols.shape[1])
    t1 = 0.5 * np.log(4.0 * wh**2 * au2 + c0)  # (S,)
    t3 = 0.5 * np.log(
        (_TWO_PI_E / 3.0) * (whe**2 * au2[:, None] + j_leak[None, :] * aa2[:, None] + 3.0 * sigma2)
    )
    t4 = 0.5 * np.log(4.0 * j_leak[None, :] * aa2[:, None] + c0)
    rates = np.maximum(t1[:, None] - 0.5 * math.log(c0) - t3 + t4, 0.0)
    return np.min(rates, axis=1)


def achievable_secrecy_rate(
    j: int, params: SecureCellParams, schedule_flag: bool, channel: ChannelState
) -> float:
    """Worst-case rate of user j over all other users as eavesdroppers.

    Zero when the user is unscheduled. Every other user counts as a
    potential eavesdropper whether scheduled or not.
    """
    if not schedule_flag:
        return 0.0
    n_users = channel.n_users
    if n_users < 2:
        raise ValueError("secrecy rate needs >= 2 users (no eavesdropper set otherwise)")
    h = channel.h(j)
    A = channel.phys.peak_amplitude
    sigma2 = channel.phys.noise_var
    return min(
        pairwise_secrecy_rate_lb(params, h, channel.h_e(j, k), A, sigma2)
        for k in range(n_users)
        if k != j
    )


def rate_to_bits_per_second(r_nats: float, bandwidth_hz: float) -> float:
    """Convert nats per channel use to bits/s over the given bandwidth."""
    return r_nats * bandwidth_hz / LN2
