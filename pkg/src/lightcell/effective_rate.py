"""Effective secrecy rate (ESR) under statistical delay constraints.

The ESR of a stationary rate process R is

    esr(theta) = -(1/theta) * ln E[exp(-theta * R)],

where theta > 0 is the QoS exponent: the decay rate of the delay-violation
probability. theta -> 0 recovers the ergodic (mean) rate; large theta
penalizes rate variability. The running form replaces the expectation with
the time average over the slots seen so far.

Internal rate unit is nats per channel use. Configured values arrive in
bits/s against a channel of bandwidth B_a; conversions keep the products
theta*R and theta*B_e invariant:

    theta_int = theta_per_bps * B_a / ln 2      [1/nats]
    eb_int    = eb_bps * ln 2 / B_a             [nats/use]
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

LN2 = math.log(2.0)


def theta_from_bps(theta_per_bps: float, bandwidth_hz: float) -> float:
    """Convert a QoS exponent quoted against bits/s rates to 1/nats."""
    return theta_per_bps * bandwidth_hz / LN2


def eb_from_bps(eb_bps: float, bandwidth_hz: float) -> float:
    """Convert an effective bandwidth in bits/s to nats per channel use."""
    return eb_bps * LN2 / bandwidth_hz


@dataclass(frozen=True)
class QoSProfile:
    """Per-user QoS target: exponent theta [1/nats], effective bandwidth eb [nats/use]."""

    theta: float
    eb: float

    def __post_init__(self) -> None:
        if not self.theta > 0:
            raise ValueError(f"qos.theta must be > 0, got {self.theta}")
        if self.eb < 0:
            raise ValueError(f"qos.eb must be >= 0, got {self.eb}")

    @classmethod
    def from_bps(cls, theta_per_bps: float, eb_bps: float, bandwidth_hz: float) -> "QoSProfile":
        return cls(
            theta=theta_from_bps(theta_per_bps, bandwidth_hz),
            eb=eb_from_bps(eb_bps, bandwidth_hz),
        )


def esr_expectation(rate_samples, theta: float) -> float:
    """ESR of a sample set: -(1/theta) * ln mean(exp(-theta*R)).

    Uses a max-shifted log-mean-exp; exp(-theta*R) underflows for theta*R
    beyond ~700, which the shift absorbs.
    """
    if theta <= 0:
        raise ValueError(f"theta must be > 0, got {theta}")
    x = -theta * np.asarray(rate_samples, dtype=float)
    if x.size == 0:
        raise ValueError("esr_expectation needs at least one rate sample")
    m = float(np.max(x))
    lse = m + math.log(float(np.mean(np.exp(x - m))))
    return -lse / theta + 0.0  # adding 0 maps -0.0 onto 0.0


def esr_running(rate_history, theta: float, t: int | None = None) -> float:
    """ESR over the first t slots of a history (all slots if t is None)."""
    x = np.asarray(rate_history, dtype=float)
    if t is not None:
        if t < 1:
            raise ValueError(f"t must be >= 1, got {t}")
        x = x[:t]
    return esr_expectation(x, theta)


class EsrAccumulator:
    """Incremental running-ESR via an accumulated sum of exp(-theta*R).

    Neumaier-compensated summation keeps the incremental value within 1e-12
    relative of batch recomputation. Intended for exponents where
    exp(-theta*R) stays a normal float (theta*R below ~700, which covers the
    simulator's operating range); use esr_expectation for extreme exponents.
    """

    def __init__(self, theta: float) -> None:
        if theta <= 0:
            raise ValueError(f"theta must be > 0, got {theta}")
        self.theta = theta
        self._sum = 0.0
        self._comp = 0.0
        self.count = 0

    def add(self, rate: float) -> None:
        term = math.exp(-self.theta * rate)
        t = self._sum + term
        if abs(self._sum) >= abs(term):
            self._comp += (self._sum - t) + term
        else:
            self._comp += (term - t) + self._sum
        self._sum = t
        self.count += 1

    def value(self) -> float:
        if self.count == 0:
            raise ValueError("no samples accumulated")
        total = self._sum + self._comp
        return -math.log(total / self.count) / self.theta + 0.0
