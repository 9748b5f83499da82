"""Delivery bookkeeping: per-packet in-order delay and normalized throughput.

A packet's delay runs from its first appearance in any transmitted
packet to its in-order decode at the receiver; the default clock also
waits for the acknowledgment of the delivering slot to reach the
sender (one RTT later).  Equal-size packets make normalized throughput
the delivered-packet count over the slots the run used.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum


class DelayClock(str, Enum):
    ACK_INCLUSIVE = "ack"
    RECEIVER_SIDE = "receiver"


@dataclass(slots=True)
class DeliveryRecord:
    index: int
    first_tx_slot: int
    inorder_slot: int
    ack_slot: int


def in_order_delay(record: DeliveryRecord,
                   clock: DelayClock = DelayClock.ACK_INCLUSIVE) -> int:
    if clock is DelayClock.ACK_INCLUSIVE:
        return record.ack_slot - record.first_tx_slot
    return record.inorder_slot - record.first_tx_slot


@dataclass
class MetricsReport:
    protocol: str
    packet_count: int
    delivered: int
    slots: int
    complete: bool
    throughput: float
    d_mean: float
    d_max: int
    clock: DelayClock
    records: list[DeliveryRecord] = field(default_factory=list)

    def as_dict(self, with_records: bool = False) -> dict:
        out = {
            "protocol": self.protocol,
            "packet_count": self.packet_count,
            "delivered": self.delivered,
            "slots": self.slots,
            "complete": self.complete,
            "throughput": self.throughput,
            "d_mean": self.d_mean,
            "d_max": self.d_max,
            "delay_clock": self.clock.value,
        }
        if with_records:
            out["packets"] = [
                {
                    "index": r.index,
                    "first_tx_slot": r.first_tx_slot,
                    "inorder_slot": r.inorder_slot,
                    "ack_slot": r.ack_slot,
                    "delay": in_order_delay(r, self.clock),
                }
                for r in self.records
            ]
        return out


def summarize(protocol: str, records: list[DeliveryRecord], slots: int,
              packet_count: int,
              clock: DelayClock = DelayClock.ACK_INCLUSIVE) -> MetricsReport:
    """Fold per-packet records into a report; short runs come back flagged."""
    delivered = len(records)
    complete = delivered == packet_count
    if slots <= 0:
        raise ValueError("slots must be positive")
    if records:
        delays = [in_order_delay(r, clock) for r in records]
        d_mean = sum(delays) / len(delays)
        d_max = max(delays)
    else:
        d_mean = 0.0
        d_max = 0
    return MetricsReport(
        protocol=protocol,
        packet_count=packet_count,
        delivered=delivered,
        slots=slots,
        complete=complete,
        throughput=delivered / slots,
        d_mean=d_mean,
        d_max=d_max,
        clock=clock,
        records=records,
    )
