"""Adaptive causal RLNC sender and receiver.

The sender decides one transmission per slot from delayed per-slot
ACK/NACK feedback.  It tracks the channel rate r = 1 - p_e and the
DoF rate d = m_d / a_d over the live coding window, inserts a-priori
FEC bursts at the end of every k-new-packet window, inserts
feedback-triggered FEC whenever the retransmission criterion
r - d > th fails, and caps the number of overlapping undecoded
packets at an overlap limit, falling back to terminal repeats until
the window fully closes.
"""

from __future__ import annotations

import math
import random
from collections import deque
from dataclasses import dataclass, field
from enum import Enum
from typing import NamedTuple

from .decoder import Decoder
from .gf256 import encode, random_coefficients


class PacketKind(str, Enum):
    NEW_INFO = "new_info"
    FEC = "fec"
    FB_FEC = "fb_fec"
    TERMINAL_REPEAT = "terminal_repeat"


class FeedbackMessage(NamedTuple):
    slot: int
    ack: bool


@dataclass(slots=True)
class InformationPacket:
    index: int
    payload: bytes


@dataclass(slots=True)
class CodedPacket:
    slot: int
    window_start: int
    coefficients: list[int]
    payload: bytes | None
    kind: PacketKind

    @property
    def width(self) -> int:
        return len(self.coefficients)

    @property
    def window_end(self) -> int:
        return self.window_start + self.width - 1


class ThresholdMode(Enum):
    FIXED = "fixed"
    ADAPTIVE = "adaptive"


@dataclass
class ProtocolConfig:
    rtt: int
    packet_count: int
    payload_len: int = 8
    overlap_cap: int | None = None  # defaults to 2k
    threshold_mode: ThresholdMode = ThresholdMode.FIXED
    th: float = 0.0
    m_override: int | None = None

    def __post_init__(self):
        if self.rtt < 2:
            raise ValueError("rtt must be >= 2 slots")
        if self.overlap_cap is None:
            self.overlap_cap = 2 * self.k
        if self.overlap_cap < self.k:
            raise ValueError("overlap cap must be >= k = rtt - 1")

    @property
    def k(self) -> int:
        return self.rtt - 1


@dataclass(slots=True)
class SlotRecord:
    """Optional per-slot trace of the sender's observable state.

    m_d / a_d are recomputed at transmission time over slots up to and
    including this one, so they can be re-derived from the log alone.
    The crit_* fields freeze the values the retransmission criterion
    actually compared when this slot opened a decision.
    """
    slot: int
    kind: PacketKind
    window_start: int
    window_end: int
    added: int | None
    feedback: FeedbackMessage | None
    p_e: float
    r: float
    m_d: int
    a_d: int
    th: float
    w_min: int          # live window start after this slot's feedback
    w_end: int          # live window end (may exceed the packet's span)
    criterion: bool | None = None
    crit_m_d: int | None = None
    crit_a_d: int | None = None


def fec_count(p_e: float, k: int) -> int:
    """Per-window a-priori FEC repeats: p_e * k rounded half away from zero.

    p_e = 1 is allowed because the live estimate can sit there while every
    acknowledged slot so far was erased.
    """
    if not 0.0 <= p_e <= 1.0:
        raise ValueError(f"p_e must be in [0,1], got {p_e}")
    if k < 1:
        raise ValueError("k must be >= 1")
    return math.floor(p_e * k + 0.5)


def retransmission_criterion(r: float, d: float, th: float) -> bool:
    """True when the channel rate exceeds the DoF rate by more than th."""
    return r - d > th


class AcrlncSender:
    """Per-slot transmit decisions over a sliding coding window.

    The live window is the contiguous index range [w_min, w_end]; w_min
    advances when ACKed combinations prove a prefix decodable at the
    receiver (tracked by a payload-free shadow decoder fed only with
    acknowledged rows).
    """

    def __init__(self, cfg: ProtocolConfig, payloads: list[bytes],
                 rng: random.Random, record_log: bool = False):
        if len(payloads) != cfg.packet_count:
            raise ValueError("payload list does not match packet_count")
        self.cfg = cfg
        self.payloads = payloads
        self.rng = rng
        self.t = 0
        self.e = 0
        self.acked: set[int] = set()
        self.nacked: set[int] = set()
        self.fec_slots: set[int] = set()
        self.fb_fec_slots: set[int] = set()
        self.terminal_slots: set[int] = set()
        self.slot_content: dict[int, tuple[int, int]] = {}
        self._content_order: deque[int] = deque()
        self._await_feedback: dict[int, tuple[int, list[int]]] = {}
        self.w_min = 1
        self.w_end = 0  # window empty while w_end < w_min
        self.next_new = 1
        self.new_since_fec = 0
        self.terminal_mode = False
        self.shadow = Decoder(with_payloads=False)
        self._queue: deque[CodedPacket] = deque()
        self._queue_kinds: deque[tuple[PacketKind, int | None]] = deque()
        self._next_slot_to_assign = 1
        self.log: list[SlotRecord] | None = [] if record_log else None
        self._last_feedback: FeedbackMessage | None = None
        self._criterion_eval: tuple | None = None

    # -- rate and DoF tracking -------------------------------------------

    def estimate_rate(self) -> tuple[float, float, float]:
        """(p_e, r, sd) over the acknowledged interval [1, t - RTT]."""
        seen = self.t - self.cfg.rtt
        if seen <= 0:
            return 0.0, 1.0, 0.0
        p_e = self.e / seen
        return p_e, 1.0 - p_e, math.sqrt(p_e * (1.0 - p_e))

    def compute_md(self, up_to: int | None = None) -> int:
        """NACKed new-information slots still overlapping the window."""
        if self.w_end < self.w_min:
            return 0
        lo, hi = self.w_min, self.w_end
        count = 0
        for s in self.nacked:
            if s in self.fec_slots or s in self.fb_fec_slots or s in self.terminal_slots:
                continue
            if up_to is not None and s > up_to:
                continue
            c = self.slot_content.get(s)
            if c is not None and c[1] >= lo and c[0] <= hi:
                count += 1
        return count

    def compute_ad(self, up_to: int | None = None) -> int:
        """FEC-type slots (a-priori, feedback, terminal) overlapping the window.

        With no filter this includes slots already scheduled for the next
        few transmissions: a burst decision charges all its repeats to the
        DoF ledger at once.
        """
        if self.w_end < self.w_min:
            return 0
        lo, hi = self.w_min, self.w_end
        count = 0
        for group in (self.fec_slots, self.fb_fec_slots, self.terminal_slots):
            for s in group:
                if up_to is not None and s > up_to:
                    continue
                c = self.slot_content.get(s)
                if c is not None and c[1] >= lo and c[0] <= hi:
                    count += 1
        return count

    def current_threshold(self) -> float:
        if self.cfg.threshold_mode is ThresholdMode.ADAPTIVE:
            return self.estimate_rate()[2]
        return self.cfg.th

    def _fec_repeats(self) -> int:
        if self.cfg.m_override is not None:
            return self.cfg.m_override
        return fec_count(self.estimate_rate()[0], self.cfg.k)

    # -- per-slot state machine ------------------------------------------

    def on_slot(self, feedback: FeedbackMessage | None) -> CodedPacket:
        """Advance one slot: fold in feedback, decide, emit one packet."""
        self.t += 1
        self._last_feedback = feedback
        if feedback is not None:
            self._process_feedback(feedback)
        if not self._queue:
            self._next_slot_to_assign = self.t
            self._decide()
        packet = self._queue.popleft()
        kind, added = self._queue_kinds.popleft()
        if self.log is not None:
            self._log_slot(packet, kind, added)
        return packet

    def _process_feedback(self, fb: FeedbackMessage) -> None:
        pending = self._await_feedback.pop(fb.slot, None)
        if fb.ack:
            self.acked.add(fb.slot)
            if pending is not None:
                start, coeffs = pending
                self.shadow.absorb(start, coeffs, slot=self.t)
                new_min = self.shadow.delivered_prefix + 1
                if new_min > self.w_min:
                    self.w_min = new_min
                    self._prune_bookkeeping()
                    if self.w_end < self.w_min:
                        # window fully closed: next generation starts fresh
                        self.terminal_mode = False
                        self.new_since_fec = 0
        else:
            self.nacked.add(fb.slot)
            self.e += 1

    def _prune_bookkeeping(self) -> None:
        order = self._content_order
        while order and self.slot_content[order[0]][1] < self.w_min:
            s = order.popleft()
            del self.slot_content[s]
            self.acked.discard(s)
            self.nacked.discard(s)
            self.fec_slots.discard(s)
            self.fb_fec_slots.discard(s)
            self.terminal_slots.discard(s)

    def _decide(self) -> None:
        if self.terminal_mode:
            if self.w_end >= self.w_min:
                self._enqueue_repeat(PacketKind.TERMINAL_REPEAT)
                return
            self.terminal_mode = False

        fb = self._last_feedback
        m = self._fec_repeats()
        at_ew = self.new_since_fec >= self.cfg.k
        window_open = self.w_end >= self.w_min
        self._criterion_eval = None

        if fb is None:
            if at_ew and m > 0 and window_open:
                self._enqueue_burst(m)
            else:
                self._enqueue_add_new()
        elif fb.ack:
            if at_ew and m > 0 and window_open:
                self._enqueue_burst(m)
            if self._criterion_holds(strict=False):
                self._enqueue_add_new()
            else:
                self._enqueue_repeat(PacketKind.FB_FEC)
        else:
            if self._criterion_holds(strict=True):
                if at_ew and m > 0 and window_open:
                    self._enqueue_burst(m)
                else:
                    self._enqueue_add_new()
            else:
                self._enqueue_repeat(PacketKind.FB_FEC)
                if at_ew and m > 0 and self.w_end >= self.w_min:
                    self._enqueue_burst(m)

    def _criterion_holds(self, strict: bool) -> bool:
        _, r, _ = self.estimate_rate()
        m_d = self.compute_md()
        a_d = self.compute_ad()
        d = m_d / max(a_d, 1)
        th = self.current_threshold()
        self._criterion_eval = (self.t, r, m_d, a_d, d, th)
        if strict:
            return r - d > th
        return not (r - d < th)

    # -- transmission builders -------------------------------------------

    def _enqueue_add_new(self) -> None:
        if self.next_new > self.cfg.packet_count:
            # stream exhausted: keep feeding DoFs until the window closes
            if self.w_end >= self.w_min:
                self._enqueue_repeat(PacketKind.TERMINAL_REPEAT)
                return
            raise RuntimeError("no packets left to send and window closed")
        idx = self.next_new
        self.next_new += 1
        if self.w_end < self.w_min:
            self.w_min = idx
        self.w_end = idx
        self.new_since_fec += 1
        self._enqueue_packet(PacketKind.NEW_INFO, added=idx)
        if self.w_end - self.w_min + 1 >= self.cfg.overlap_cap:
            self.terminal_mode = True

    def _enqueue_burst(self, m: int) -> None:
        for _ in range(m):
            self._enqueue_packet(PacketKind.FEC)
        self.new_since_fec = 0

    def _enqueue_repeat(self, kind: PacketKind) -> None:
        if self.w_end < self.w_min:
            # nothing left to repeat; the decision degenerates to a new packet
            self._enqueue_add_new()
            return
        self._enqueue_packet(kind)

    def _enqueue_packet(self, kind: PacketKind, added: int | None = None) -> None:
        lo, hi = self.w_min, self.w_end
        assert hi >= lo, "cannot encode an empty window"
        slot = self._next_slot_to_assign
        self._next_slot_to_assign += 1
        coeffs = random_coefficients(hi - lo + 1, self.rng)
        payload = encode(self.payloads[lo - 1:hi], coeffs)
        packet = CodedPacket(slot, lo, coeffs, payload, kind)
        self.slot_content[slot] = (lo, hi)
        self._content_order.append(slot)
        self._await_feedback[slot] = (lo, coeffs)
        if kind is PacketKind.FEC:
            self.fec_slots.add(slot)
        elif kind is PacketKind.FB_FEC:
            self.fb_fec_slots.add(slot)
        elif kind is PacketKind.TERMINAL_REPEAT:
            self.terminal_slots.add(slot)
        self._queue.append(packet)
        self._queue_kinds.append((kind, added))

    def _log_slot(self, packet: CodedPacket, kind: PacketKind,
                  added: int | None) -> None:
        p_e, r, _ = self.estimate_rate()
        ce = self._criterion_eval
        crit = crit_md = crit_ad = None
        if ce is not None and ce[0] == self.t:
            _, r_c, crit_md, crit_ad, d_c, th_c = ce
            crit = r_c - d_c > th_c
        self.log.append(SlotRecord(
            slot=self.t, kind=kind,
            window_start=packet.window_start, window_end=packet.window_end,
            added=added, feedback=self._last_feedback,
            p_e=p_e, r=r,
            m_d=self.compute_md(up_to=self.t),
            a_d=self.compute_ad(up_to=self.t),
            th=self.current_threshold(),
            w_min=self.w_min, w_end=self.w_end,
            criterion=crit, crit_m_d=crit_md, crit_a_d=crit_ad,
        ))


class AcrlncReceiver:
    """Absorbs surviving coded packets and releases the in-order prefix."""

    def __init__(self, packet_count: int, with_payloads: bool = True):
        self.packet_count = packet_count
        self.decoder = Decoder(with_payloads=with_payloads)

    @property
    def delivered_prefix(self) -> int:
        return self.decoder.delivered_prefix

    @property
    def decode_slots(self) -> dict[int, int]:
        return self.decoder.decode_slots

    def on_slot(self, slot: int, packet: CodedPacket | None) -> FeedbackMessage:
        if packet is not None:
            self.decoder.absorb(packet.window_start, packet.coefficients,
                                packet.payload, slot=slot)
        return FeedbackMessage(slot=slot, ack=packet is not None)

    def payload_of(self, index: int) -> bytes:
        return self.decoder.payload_of(index)
