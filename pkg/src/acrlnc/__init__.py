"""Adaptive causal RLNC protocol laboratory."""

from .bounds import (
    BoundParams,
    MeanDelayBound,
    bc_binomial,
    bhattacharyya_distance,
    max_delay_bound,
    mean_delay_bound,
    prob_eow,
    prob_retrans,
    throughput_bound_bec,
    throughput_bound_ge,
)
from .channels import BecChannel, GeChannel, TraceChannel
from .decoder import Decoder
from .metrics import DelayClock, DeliveryRecord, MetricsReport, summarize
from .protocol import (
    AcrlncReceiver,
    AcrlncSender,
    CodedPacket,
    FeedbackMessage,
    PacketKind,
    ProtocolConfig,
    ThresholdMode,
    fec_count,
    retransmission_criterion,
)
from .simulate import RunConfig, RunResult, replay, run, run_golden
from .srarq import SrArqReceiver, SrArqSender
from .sweep import SweepConfig, bounds_rows, sweep

__version__ = "0.1.0"
