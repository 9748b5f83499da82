"""Incremental Gaussian-elimination decoder over GF(2^8).

Rows are kept in reduced row-echelon form so that after every absorbed
packet we can tell exactly which information packets just became
decodable, and release them in index order.  The same class doubles as
the sender's shadow decoder (payload-free) for tracking which packets
the receiver has provably seen.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .gf256 import MUL_TABLE, gf_inv


@dataclass(slots=True)
class DecodeOutcome:
    innovative: bool
    newly_in_order: list[int] = field(default_factory=list)


class Decoder:
    """Rank/prefix tracker for random linear combinations.

    Columns are absolute 1-based information-packet indices.  Rows are
    normalized (pivot coefficient 1) and fully reduced: each pivot column
    appears in no other row, so a packet is decoded exactly when its
    pivot row has singleton support.
    """

    def __init__(self, with_payloads: bool = True):
        self.with_payloads = with_payloads
        self.rank = 0
        self.delivered_prefix = 0
        self.decode_slots: dict[int, int] = {}
        # pivot column -> (coefficient dict col->val, payload bytearray | None)
        self._rows: dict[int, tuple[dict[int, int], bytearray | None]] = {}
        # non-pivot column -> set of pivot columns whose row references it
        self._refs: dict[int, set[int]] = {}

    def absorb(self, start: int, coefficients, payload: bytes | None = None,
               slot: int = 0) -> DecodeOutcome:
        """Add one coded packet; report innovation and in-order releases."""
        vec = {start + i: c for i, c in enumerate(coefficients) if c}
        pay = bytearray(payload) if (self.with_payloads and payload is not None) else None
        mul = MUL_TABLE

        # Forward reduction against existing pivots.
        for col in sorted(vec):
            coef = vec.get(col)
            if not coef:
                continue
            row = self._rows.get(col)
            if row is None:
                continue
            rvec, rpay = row
            base = coef << 8
            for c2, v2 in rvec.items():
                nv = vec.get(c2, 0) ^ mul[base | v2]
                if nv:
                    vec[c2] = nv
                else:
                    vec.pop(c2, None)
            if pay is not None and rpay is not None:
                for j in range(len(pay)):
                    pay[j] ^= mul[base | rpay[j]]

        if not vec:
            return DecodeOutcome(innovative=False)

        # Normalize on the lowest remaining column.
        pivot = min(vec)
        inv = gf_inv(vec[pivot])
        if inv != 1:
            base = inv << 8
            vec = {c: mul[base | v] for c, v in vec.items()}
            if pay is not None:
                for j in range(len(pay)):
                    pay[j] = mul[base | pay[j]]

        # Back-substitute into rows that reference the new pivot column.
        for owner in self._refs.pop(pivot, ()):  # pragma: no branch
            ovec, opay = self._rows[owner]
            factor = ovec.pop(pivot)
            base = factor << 8
            for c2, v2 in vec.items():
                if c2 == pivot:
                    continue
                nv = ovec.get(c2, 0) ^ mul[base | v2]
                if nv:
                    if c2 not in ovec:
                        self._refs.setdefault(c2, set()).add(owner)
                    ovec[c2] = nv
                else:
                    ovec.pop(c2, None)
                    self._refs[c2].discard(owner)
            if opay is not None and pay is not None:
                for j in range(len(opay)):
                    opay[j] ^= mul[base | pay[j]]

        self._rows[pivot] = (vec, pay)
        for c2 in vec:
            if c2 != pivot:
                self._refs.setdefault(c2, set()).add(pivot)
        self.rank += 1

        released: list[int] = []
        nxt = self.delivered_prefix + 1
        while True:
            row = self._rows.get(nxt)
            if row is None or len(row[0]) != 1:
                break
            released.append(nxt)
            self.decode_slots[nxt] = slot
            self.delivered_prefix = nxt
            nxt += 1
        return DecodeOutcome(innovative=True, newly_in_order=released)

    def payload_of(self, index: int) -> bytes:
        """Decoded payload of an in-order-released packet."""
        if index > self.delivered_prefix:
            raise KeyError(f"packet {index} not decoded yet")
        row = self._rows[index]
        if row[1] is None:
            raise ValueError("decoder was built without payload tracking")
        return bytes(row[1])

    def is_seen(self, index: int) -> bool:
        return index <= self.delivered_prefix
