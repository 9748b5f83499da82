"""Shared test utilities."""

from acrlnc.protocol import PacketKind
from acrlnc.simulate import RunResult


def ledger_mirror_check(result: RunResult) -> None:
    """Recompute m_d / a_d from the observable slot log and feedback
    stream alone, and demand equality with the sender's values at every
    transmitted slot."""
    content: dict[int, tuple[int, int]] = {}
    kind_of: dict[int, PacketKind] = {}
    nacked: set[int] = set()
    for rec in result.action_log:
        content[rec.slot] = (rec.window_start, rec.window_end)
        kind_of[rec.slot] = rec.kind
        if rec.feedback is not None and not rec.feedback.ack:
            nacked.add(rec.feedback.slot)
        lo, hi = rec.w_min, rec.w_end
        if hi < lo:
            assert (rec.m_d, rec.a_d) == (0, 0)
            continue
        md = sum(
            1 for s in nacked
            if kind_of[s] is PacketKind.NEW_INFO
            and content[s][1] >= lo and content[s][0] <= hi
        )
        ad = sum(
            1 for s, k in kind_of.items()
            if k in (PacketKind.FEC, PacketKind.FB_FEC,
                     PacketKind.TERMINAL_REPEAT)
            and content[s][1] >= lo and content[s][0] <= hi
        )
        assert md == rec.m_d, rec
        assert ad == rec.a_d, rec
