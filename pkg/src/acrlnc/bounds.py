"""Closed-form delay and throughput bounds for the adaptive coded protocol.

All evaluators are pure functions of the channel/window parameters.
Delay bounds condition on the feedback state (none / NACK / ACK) and
combine with a weight for the feedback-free fraction of the run.  The
throughput bounds charge the sender a Bhattacharyya distance between
the success-count distributions under the stale rate estimate and the
worst-case drifted rate one feedback delay later.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .channels import stationary

# Reported in place of an infinite Bhattacharyya distance so reports
# stay finite; always paired with a saturation flag.
DISTANCE_SATURATED = 1e9


def prob_eow(eps_max: float, overlap: int) -> float:
    """Probability the coding window is at its overlap cap boundary."""
    _check_unit("eps_max", eps_max, allow_one=True)
    if overlap < 1:
        raise ValueError("overlap must be >= 1")
    return (1.0 - eps_max) ** overlap

def prob_retrans(eps: float, eps_max: float, overlap: int) -> float:
    """Binomial partial sum for the criterion holding over two windows."""
    _check_unit("eps", eps, allow_one=False)
    _check_unit("eps_max", eps_max, allow_one=True)
    if overlap < 1:
        raise ValueError("overlap must be >= 1")
    limit = math.floor(overlap * eps_max)
    total = 0.0
    for i in range(1, limit + 1):
        total += math.comb(overlap, i) * eps ** i * (1.0 - eps) ** (overlap - i)
    return total


@dataclass
class BoundParams:
    eps: float
    overlap: int
    rtt: int
    eps_max: float | None = None
    th: float = 0.0
    lam: float = 0.0
    p_e_target: float = 1e-3

    def __post_init__(self):
        if self.eps_max is None:
            self.eps_max = self.eps
        if self.rtt < 2:
            raise ValueError("rtt must be >= 2")
        if not 0.0 <= self.eps <= self.eps_max:
            raise ValueError("need 0 <= eps <= eps_max")
        if self.eps_max >= 1.0:
            raise ValueError("eps_max must be < 1")
        if not 0.0 <= self.lam <= 1.0:
            raise ValueError("lambda weight must be in [0,1]")
        if self.overlap < self.k:
            raise ValueError("overlap must be >= k")

    @property
    def k(self) -> int:
        return self.rtt - 1

    @property
    def m_e(self) -> float:
        """Effective DoF requirement of a capped window."""
        return self.overlap * self.eps


@dataclass
class MeanDelayBound:
    no_feedback: float
    nack: float
    ack: float
    combined: float


def mean_delay_bound(params: BoundParams) -> MeanDelayBound:
    """Feedback-state-conditioned mean in-order delay bounds."""
    p = params
    scale = 1.0 / (1.0 - p.eps_max)
    p_eow = prob_eow(p.eps_max, p.overlap)
    p_ret = prob_retrans(p.eps, p.eps_max, p.overlap)
    eow_term = p_eow * (p.m_e + p.k)

    no_fb = scale * (eow_term + (1.0 - p_eow) * p.rtt)
    nack = p.eps_max * scale * (
        p_ret * ((1.0 - p_eow) * p.rtt + eow_term)
        + (1.0 - p_ret) * (p.rtt + eow_term)
    )
    ack = (1.0 - p.eps_max) * (
        eow_term + p_ret * p.rtt + (1.0 - p_ret) * p.rtt
    )
    combined = p.lam * no_fb + (1.0 - p.lam) * (nack + ack)
    return MeanDelayBound(no_fb, nack, ack, combined)


def max_delay_bound(overlap: int, eps_max: float, p_e_target: float) -> float:
    """Delay a window can accumulate before its residual risk drops to
    the target error probability."""
    if not 0.0 < eps_max < 1.0:
        raise ValueError(f"eps_max must be in (0,1), got {eps_max}")
    if not 0.0 < p_e_target < 1.0:
        raise ValueError(f"p_e_target must be in (0,1), got {p_e_target}")
    return overlap * eps_max + math.log(p_e_target) / math.log(eps_max) + overlap


def bc_binomial(r_lo: float, r_hi: float, rtt: int,
                full_support: bool = False) -> float:
    """Bhattacharyya coefficient of two Binomial(rtt, .) success counts.

    The default sums outcomes 0..rtt-1, dropping the all-success term,
    which makes BC < 1 even for identical rates; full_support=True keeps
    every outcome so identical distributions give exactly 1.
    """
    if rtt < 2:
        raise ValueError("rtt must be >= 2")
    for name, r in (("r_lo", r_lo), ("r_hi", r_hi)):
        if not 0.0 <= r <= 1.0:
            raise ValueError(f"{name} must be in [0,1], got {r}")
    a = math.sqrt(r_lo * r_hi)
    b = math.sqrt((1.0 - r_lo) * (1.0 - r_hi))
    upper = rtt if full_support else rtt - 1
    total = 0.0
    for i in range(upper + 1):
        total += math.comb(rtt, i) * a ** i * b ** (rtt - i)
    return total


def bhattacharyya_distance(r_lo: float, r_hi: float, rtt: int,
                           full_support: bool = False) -> tuple[float, bool]:
    """(-ln BC, saturated).  Disjoint supports give the finite sentinel
    DISTANCE_SATURATED with the flag set instead of an infinity."""
    bc = bc_binomial(r_lo, r_hi, rtt, full_support=full_support)
    if bc <= 0.0:
        return DISTANCE_SATURATED, True
    return -math.log(bc), False


def rate_deviation(variance: float, rtt: int) -> float:
    """Worst-case growth of the rate estimate across one feedback delay.

    The success-count variance over rtt slots is spread over twice the
    feedback delay; this is the deviation scale that reproduces the
    documented capacity fractions of both channel families.
    """
    return math.sqrt(variance) / (2.0 * rtt)


def throughput_bound_bec(eps: float, rtt: int,
                         full_support: bool = True) -> float:
    """Upper bound on normalized throughput over a memoryless channel."""
    _check_unit("eps", eps, allow_one=False)
    if rtt < 2:
        raise ValueError("rtt must be >= 2")
    r_prev = 1.0 - eps
    variance = rtt * r_prev * (1.0 - r_prev)
    r_now = min(1.0, r_prev + rate_deviation(variance, rtt))
    dist, _ = bhattacharyya_distance(r_now, r_prev, rtt, full_support=full_support)
    return r_prev - dist


def throughput_bound_ge(q: float, s: float, rtt: int,
                        full_support: bool = True) -> float:
    """Upper bound on normalized throughput over the bursty channel.

    Uses the memoryless Bhattacharyya distance as an upper surrogate for
    the positively correlated success counts of the two-state chain.
    """
    if rtt < 2:
        raise ValueError("rtt must be >= 2")
    _, pi_b = stationary(q, s)
    r_prev = 1.0 - pi_b
    variance = rtt * (pi_b - pi_b * pi_b)
    r_now = min(1.0, r_prev + rate_deviation(variance, rtt))
    dist, _ = bhattacharyya_distance(r_now, r_prev, rtt, full_support=full_support)
    return r_prev - dist


def _check_unit(name: str, value: float, allow_one: bool) -> None:
    hi_ok = value <= 1.0 if allow_one else value < 1.0
    if not (0.0 <= value and hi_ok):
        hi = "1]" if allow_one else "1)"
        raise ValueError(f"{name} must be in [0,{hi}, got {value}")
