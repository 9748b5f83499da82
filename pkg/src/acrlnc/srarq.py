"""Selective-repeat ARQ baseline with per-slot feedback after one RTT.

Uncoded transmission: each slot carries exactly one information packet
(or nothing when the send window is exhausted).  NACKed packets are
retransmitted with priority, FIFO among themselves.  The send window of
RTT packets ahead of the oldest unacknowledged index is the classic
bandwidth-delay sizing: it keeps the pipe exactly full on a clean
channel and stalls behind unrepaired erasures.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass

from .protocol import FeedbackMessage


@dataclass(slots=True)
class UncodedPacket:
    slot: int
    index: int
    payload: bytes


class SrArqSender:
    def __init__(self, rtt: int, packet_count: int, payloads: list[bytes],
                 window: int | None = None):
        self.rtt = rtt
        self.packet_count = packet_count
        self.payloads = payloads
        self.window = rtt if window is None else window
        self.t = 0
        self.next_new = 1
        self.base = 1  # oldest index not yet acknowledged
        self.acked: set[int] = set()
        self.retransmit_queue: deque[int] = deque()
        self._queued: set[int] = set()
        self._sent_in_slot: dict[int, int] = {}

    def on_slot(self, feedback: FeedbackMessage | None) -> UncodedPacket | None:
        """Returns the slot's transmission, or None when the window stalls."""
        self.t += 1
        if feedback is not None:
            self._process_feedback(feedback)
        idx = self._pick_index()
        if idx is None:
            return None
        self._sent_in_slot[self.t] = idx
        return UncodedPacket(self.t, idx, self.payloads[idx - 1])

    def _process_feedback(self, fb: FeedbackMessage) -> None:
        idx = self._sent_in_slot.pop(fb.slot, None)
        if idx is None:
            return  # idle slot
        if fb.ack:
            self.acked.add(idx)
            while self.base in self.acked:
                self.acked.discard(self.base)
                self.base += 1
        elif idx not in self._queued and idx >= self.base:
            self.retransmit_queue.append(idx)
            self._queued.add(idx)

    def _pick_index(self) -> int | None:
        if self.retransmit_queue:
            idx = self.retransmit_queue.popleft()
            self._queued.discard(idx)
            return idx
        if self.next_new <= self.packet_count and \
                self.next_new < self.base + self.window:
            idx = self.next_new
            self.next_new += 1
            return idx
        return None


class SrArqReceiver:
    """Buffers out-of-order arrivals and releases the in-order prefix."""

    def __init__(self, packet_count: int):
        self.packet_count = packet_count
        self.received: dict[int, bytes] = {}
        self.delivered_prefix = 0
        self.decode_slots: dict[int, int] = {}

    def on_slot(self, slot: int, packet: UncodedPacket | None) -> FeedbackMessage:
        if packet is not None:
            if packet.index not in self.received:
                self.received[packet.index] = packet.payload
            nxt = self.delivered_prefix + 1
            while nxt in self.received:
                self.decode_slots[nxt] = slot
                self.delivered_prefix = nxt
                nxt += 1
        return FeedbackMessage(slot=slot, ack=packet is not None)

    def payload_of(self, index: int) -> bytes:
        if index > self.delivered_prefix:
            raise KeyError(f"packet {index} not delivered yet")
        return self.received[index]
