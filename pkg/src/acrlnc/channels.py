"""Per-slot erasure sources: memoryless BEC, two-state Gilbert-Elliott,
and deterministic file-trace replay, plus the closed-form channel
statistics the analytical bounds build on.
"""

from __future__ import annotations

import math
import random

TRACE_HEADER = "#ac-rlnc-trace v1"


class TraceExhaustedError(RuntimeError):
    """Raised when a trace is shorter than the run that replays it."""


class TraceFormatError(ValueError):
    pass


class BecChannel:
    """i.i.d. erasures with probability eps per slot."""

    def __init__(self, eps: float):
        if not 0.0 <= eps < 1.0:
            raise ValueError(f"eps must be in [0,1), got {eps}")
        self.eps = eps

    def step(self, rng: random.Random) -> bool:
        return rng.random() < self.eps

    def expected_transmissions(self) -> float:
        return 1.0 / (1.0 - self.eps)


class GeChannel:
    """Gilbert-Elliott erasure channel.

    States are good (no erasure) and bad (certain erasure).  q is the
    good-to-bad transition probability, s the bad-to-good one, so the
    mean erasure burst is 1/s.  The initial state is drawn from the
    stationary distribution on the first step.
    """

    GOOD = 0
    BAD = 1

    def __init__(self, q: float, s: float):
        if not 0.0 < q < 1.0:
            raise ValueError(f"q must be in (0,1), got {q}")
        if not 0.0 < s <= 1.0:
            raise ValueError(f"s must be in (0,1], got {s}")
        self.q = q
        self.s = s
        self.state: int | None = None

    @classmethod
    def from_average_erasure(cls, eps: float, s: float) -> "GeChannel":
        """Build the chain whose stationary erasure rate is eps."""
        if not 0.0 < eps < 1.0:
            raise ValueError(f"eps must be in (0,1), got {eps}")
        return cls(q=eps * s / (1.0 - eps), s=s)

    def stationary(self) -> tuple[float, float]:
        pi_g = self.s / (self.q + self.s)
        return pi_g, 1.0 - pi_g

    @property
    def average_erasure(self) -> float:
        return self.stationary()[1]

    def step(self, rng: random.Random) -> bool:
        if self.state is None:
            pi_g, _ = self.stationary()
            self.state = self.GOOD if rng.random() < pi_g else self.BAD
        erased = self.state == self.BAD
        if self.state == self.GOOD:
            if rng.random() < self.q:
                self.state = self.BAD
        elif rng.random() < self.s:
            self.state = self.GOOD
        return erased

    def expected_transmissions(self) -> float:
        # Singular as written at s=1 even though the series limit exists;
        # kept as a domain error rather than silently substituting it.
        if not 0.0 < self.s < 1.0:
            raise ValueError(f"closed form requires s in (0,1), got {self.s}")
        eps = self.average_erasure
        return 1.0 + eps * ((1.0 / (1.0 - self.s)) * (1.0 / self.s - self.s) - 1.0)


class TraceChannel:
    """Replays a recorded outcome sequence, True meaning erased."""

    def __init__(self, outcomes: list[bool]):
        self.outcomes = outcomes
        self.cursor = 0

    def step(self, rng: random.Random | None = None) -> bool:
        if self.cursor >= len(self.outcomes):
            raise TraceExhaustedError(
                f"trace has only {len(self.outcomes)} slots"
            )
        erased = self.outcomes[self.cursor]
        self.cursor += 1
        return erased

    def expected_transmissions(self) -> float:
        eps = sum(self.outcomes) / len(self.outcomes)
        if eps >= 1.0:
            raise ValueError("trace erases every slot")
        return 1.0 / (1.0 - eps)


Channel = BecChannel | GeChannel | TraceChannel


def stationary(q: float, s: float) -> tuple[float, float]:
    """(pi_G, pi_B) of the two-state chain."""
    if q + s <= 0:
        raise ValueError("q + s must be positive")
    pi_g = s / (q + s)
    return pi_g, 1.0 - pi_g


def expected_transmissions_bec(eps: float) -> float:
    if not 0.0 <= eps < 1.0:
        raise ValueError(f"eps must be in [0,1), got {eps}")
    return 1.0 / (1.0 - eps)


def expected_transmissions_ge(eps: float, s: float) -> float:
    """Mean forward transmissions per delivery when bursts average 1/s."""
    if not 0.0 < s < 1.0:
        raise ValueError(f"s must be in (0,1), got {s}")
    if not 0.0 <= eps < 1.0:
        raise ValueError(f"eps must be in [0,1), got {eps}")
    return 1.0 + eps * ((1.0 / (1.0 - s)) * (1.0 / s - s) - 1.0)


def parse_trace(text: str) -> list[bool]:
    lines = text.splitlines()
    if not lines or lines[0].strip() != TRACE_HEADER:
        raise TraceFormatError(f"missing '{TRACE_HEADER}' header line")
    outcomes: list[bool] = []
    for lineno, line in enumerate(lines[1:], start=2):
        for ch in line:
            if ch in "01":
                outcomes.append(ch == "1")
            elif not ch.isspace():
                raise TraceFormatError(f"line {lineno}: invalid character {ch!r}")
    return outcomes


def load_trace(path: str) -> list[bool]:
    with open(path, "r", encoding="ascii") as fh:
        return parse_trace(fh.read())


def format_trace(outcomes: list[bool], width: int = 64) -> str:
    bits = "".join("1" if o else "0" for o in outcomes)
    body = "\n".join(bits[i:i + width] for i in range(0, len(bits), width))
    return TRACE_HEADER + "\n" + body + "\n"


def save_trace(path: str, outcomes: list[bool]) -> None:
    with open(path, "w", encoding="ascii") as fh:
        fh.write(format_trace(outcomes))


def binomial_3sigma(p: float, n: int) -> float:
    """Half-width used by the empirical-rate checks."""
    return 3.0 * math.sqrt(p * (1.0 - p) / n)
