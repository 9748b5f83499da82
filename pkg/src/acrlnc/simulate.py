"""Slotted simulation driver: sender -> erasure channel -> receiver,
with ACK/NACK feedback looped back one RTT later.

One forward packet per slot in both protocols.  A run ends when the
receiver has released every information packet in order (or the slot
horizon is hit, which flags the report as incomplete rather than
truncating silently).  Runs are fully deterministic in (config, seed):
payloads, coding coefficients, and channel draws come from three
independent seeded streams, so the same seed presents the same channel
realization to both protocols.
"""

from __future__ import annotations

import random
from dataclasses import dataclass, replace

from .channels import (
    BecChannel,
    Channel,
    GeChannel,
    TraceChannel,
    load_trace,
)
from .metrics import DelayClock, DeliveryRecord, MetricsReport, summarize
from .protocol import (
    AcrlncReceiver,
    AcrlncSender,
    FeedbackMessage,
    PacketKind,
    ProtocolConfig,
    SlotRecord,
    ThresholdMode,
)
from .srarq import SrArqReceiver, SrArqSender

DEFAULT_HORIZON_FACTOR = 400  # slots per packet before giving up


@dataclass
class RunConfig:
    protocol: str = "acrlnc"            # acrlnc | srarq
    channel: str = "bec"                # bec | ge | trace
    eps: float = 0.1
    q: float | None = None              # GE direct parameterization
    s: float | None = None
    trace_path: str | None = None
    rtt: int = 4
    overlap_factor: float = 2.0
    th: float = 0.0
    th_adaptive: bool = False
    packets: int = 1000
    payload_len: int = 8
    horizon: int | None = None
    seed: int = 0
    delay_clock: str = "ack"            # ack | receiver
    m_override: int | None = None

    def overlap_cap(self) -> int:
        k = self.rtt - 1
        return max(k, int(round(self.overlap_factor * k)))

    def build_channel(self, trace: list[bool] | None = None) -> Channel:
        if self.channel == "bec":
            return BecChannel(self.eps)
        if self.channel == "ge":
            if self.s is None:
                raise ValueError("GE channel needs s")
            if self.q is not None:
                return GeChannel(self.q, self.s)
            return GeChannel.from_average_erasure(self.eps, self.s)
        if self.channel == "trace":
            if trace is None:
                if self.trace_path is None:
                    raise ValueError("trace channel needs trace_path")
                trace = load_trace(self.trace_path)
            return TraceChannel(trace)
        raise ValueError(f"unknown channel {self.channel!r}")


@dataclass
class RunResult:
    report: MetricsReport
    erasures: list[bool]
    action_log: list[SlotRecord] | None
    payload_ok: bool | None


def _rngs(seed: int) -> tuple[random.Random, random.Random, random.Random]:
    return (
        random.Random(f"{seed}:channel"),
        random.Random(f"{seed}:coding"),
        random.Random(f"{seed}:payload"),
    )


def make_payloads(count: int, length: int, rng: random.Random) -> list[bytes]:
    return [rng.randbytes(length) for _ in range(count)]


def run(cfg: RunConfig, trace: list[bool] | None = None,
        record_log: bool = False, check_payloads: bool = False) -> RunResult:
    channel_rng, coding_rng, payload_rng = _rngs(cfg.seed)
    channel = cfg.build_channel(trace)
    payloads = make_payloads(cfg.packets, cfg.payload_len, payload_rng)
    clock = DelayClock.ACK_INCLUSIVE if cfg.delay_clock == "ack" \
        else DelayClock.RECEIVER_SIDE

    if cfg.protocol == "acrlnc":
        pcfg = ProtocolConfig(
            rtt=cfg.rtt,
            packet_count=cfg.packets,
            payload_len=cfg.payload_len,
            overlap_cap=cfg.overlap_cap(),
            threshold_mode=ThresholdMode.ADAPTIVE if cfg.th_adaptive
            else ThresholdMode.FIXED,
            th=cfg.th,
            m_override=cfg.m_override,
        )
        sender = AcrlncSender(pcfg, payloads, coding_rng, record_log=record_log)
        receiver = AcrlncReceiver(cfg.packets, with_payloads=check_payloads)
    elif cfg.protocol == "srarq":
        sender = SrArqSender(cfg.rtt, cfg.packets, payloads)
        receiver = SrArqReceiver(cfg.packets)
    else:
        raise ValueError(f"unknown protocol {cfg.protocol!r}")

    horizon = cfg.horizon
    if horizon == 0:
        horizon = None
    max_auto = DEFAULT_HORIZON_FACTOR * cfg.packets

    first_tx: dict[int, int] = {}
    max_seen = 0
    pending_feedback: dict[int, FeedbackMessage] = {}
    erasures: list[bool] = []
    t = 0

    while receiver.delivered_prefix < cfg.packets:
        t += 1
        if horizon is not None and t > horizon:
            t -= 1
            break
        if horizon is None and t > max_auto:
            raise RuntimeError(
                f"run exceeded {max_auto} slots; pass an explicit horizon"
            )
        fb = pending_feedback.pop(t, None)
        packet = sender.on_slot(fb)
        if packet is not None:
            if cfg.protocol == "acrlnc":
                hi = packet.window_end
                while max_seen < hi:
                    max_seen += 1
                    first_tx[max_seen] = t
            elif packet.index not in first_tx:
                first_tx[packet.index] = t
            erased = channel.step(channel_rng)
        else:
            erased = channel.step(channel_rng)  # slot passes, pipe idle
        erasures.append(erased)
        arrived = packet if (packet is not None and not erased) else None
        pending_feedback[t + cfg.rtt] = receiver.on_slot(t, arrived)

    records = [
        DeliveryRecord(
            index=i,
            first_tx_slot=first_tx[i],
            inorder_slot=receiver.decode_slots[i],
            ack_slot=receiver.decode_slots[i] + cfg.rtt,
        )
        for i in range(1, receiver.delivered_prefix + 1)
    ]
    report = summarize(cfg.protocol, records, t, cfg.packets, clock)

    payload_ok = None
    if check_payloads:
        payload_ok = all(
            receiver.payload_of(i) == payloads[i - 1]
            for i in range(1, receiver.delivered_prefix + 1)
        )
    action_log = sender.log if cfg.protocol == "acrlnc" else None
    return RunResult(report, erasures, action_log, payload_ok)


def replay(path: str, cfg: RunConfig) -> RunResult:
    trace = load_trace(path)
    return run(replace(cfg, channel="trace", trace_path=path), trace=trace)


# -- appendix walkthrough -------------------------------------------------

GOLDEN_ERASED_SLOTS = (3, 4)
GOLDEN_ACTIONS: list[tuple[PacketKind, int | None]] = [
    (PacketKind.NEW_INFO, 1),
    (PacketKind.NEW_INFO, 2),
    (PacketKind.NEW_INFO, 3),
    (PacketKind.FEC, None),
    (PacketKind.NEW_INFO, 4),
    (PacketKind.NEW_INFO, 5),
    (PacketKind.FB_FEC, None),
    (PacketKind.FB_FEC, None),
    (PacketKind.NEW_INFO, 6),
    (PacketKind.FEC, None),
    (PacketKind.NEW_INFO, 7),
    (PacketKind.NEW_INFO, 8),
]
# (slot, p_e as a fraction, m_d, a_d, criterion outcome) for the slots
# whose printed evaluations the walkthrough fixes.
GOLDEN_CRITERIA = [
    (7, (1, 3), 1, 1, False),
    (9, (2, 5), 1, 3, True),
]
GOLDEN_WMIN_ADVANCES = {5: 2, 6: 3, 11: 6}


def golden_config(seed: int = 0) -> RunConfig:
    return RunConfig(
        protocol="acrlnc",
        channel="trace",
        rtt=4,
        overlap_factor=2.0,
        th=0.0,
        packets=8,
        payload_len=4,
        m_override=1,
        seed=seed,
    )


def golden_trace(slots: int = 40) -> list[bool]:
    # sized past the 12 walkthrough slots so the tail can drain
    return [(s in GOLDEN_ERASED_SLOTS) for s in range(1, slots + 1)]


def run_golden(seed: int = 0) -> tuple[bool, list[str], RunResult]:
    """Replay the walkthrough scenario; returns (ok, findings, result)."""
    cfg = golden_config(seed)
    result = run(cfg, trace=golden_trace(), record_log=True,
                 check_payloads=True)
    log = result.action_log or []
    problems: list[str] = []

    for i, (kind, added) in enumerate(GOLDEN_ACTIONS):
        if i >= len(log):
            problems.append(f"slot {i + 1}: run ended early")
            continue
        rec = log[i]
        if rec.kind is not kind or rec.added != added:
            problems.append(
                f"slot {rec.slot}: expected {kind.value}"
                f"{'' if added is None else f' p{added}'},"
                f" got {rec.kind.value}"
                f"{'' if rec.added is None else f' p{rec.added}'}"
            )

    for slot, (e_num, e_den), m_d, a_d, holds in GOLDEN_CRITERIA:
        rec = log[slot - 1]
        expected_pe = e_num / e_den
        if abs(rec.p_e - expected_pe) > 1e-12:
            problems.append(f"slot {slot}: p_e {rec.p_e} != {e_num}/{e_den}")
        if rec.crit_m_d != m_d or rec.crit_a_d != a_d:
            problems.append(
                f"slot {slot}: DoF ledger {rec.crit_m_d}/{rec.crit_a_d}"
                f" != {m_d}/{a_d}"
            )
        if rec.criterion is not holds:
            problems.append(f"slot {slot}: criterion {rec.criterion} != {holds}")

    for slot, w_min in GOLDEN_WMIN_ADVANCES.items():
        rec = log[slot - 1]
        if rec.w_min != w_min:
            problems.append(
                f"slot {slot}: live window starts at {rec.w_min}, not {w_min}"
            )

    if not result.report.complete:
        problems.append("walkthrough run did not deliver all packets")
    if result.payload_ok is False:
        problems.append("delivered payloads differ from the source stream")
    return not problems, problems, result
