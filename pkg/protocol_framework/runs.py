"""
Transcript of a two-party protocol run with bit-exact accounting
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Any

from core_math.errors import ValidationError

ALICE = "alice"
BOB = "bob"


def index_bits(size: int) -> int:
    """Bits needed to name one of `size` items: ceil(log2 size), 0 when size == 1"""
    if size < 1:
        raise ValidationError("index message needs a non-empty alphabet")
    return math.ceil(math.log2(size)) if size > 1 else 0


@dataclass
class ProtocolRun:
    """
    Messages exchanged during one run

    `bits_sent` always equals len(transcript): index messages are written out
    as their fixed-width binary encoding rather than modeled as a deep tree.
    """

    protocol: str
    transcript: list = field(default_factory=list)
    senders: list = field(default_factory=list)
    output: Any = None
    details: dict = field(default_factory=dict)

    @property
    def bits_sent(self) -> int:
        return len(self.transcript)

    def send_bit(self, speaker: str, bit: int) -> None:
        if speaker not in (ALICE, BOB):
            raise ValidationError(f"unknown speaker {speaker!r}")
        self.transcript.append(int(bit) & 1)
        self.senders.append(speaker)

    def send_bits(self, speaker: str, bits) -> None:
        for bit in bits:
            self.send_bit(speaker, bit)

    def send_index(self, speaker: str, index: int, size: int) -> None:
        """Charge ceil(log2 size) bits for naming `index` in [0, size)"""
        if not 0 <= index < size:
            raise ValidationError(f"index {index} outside [0, {size})")
        width = index_bits(size)
        self.send_bits(speaker, [(index >> i) & 1 for i in range(width)])

    def send_string(self, speaker: str, value: int, width: int) -> None:
        """Send an integer-encoded bit string of `width` bits, bit 0 first"""
        self.send_bits(speaker, [(value >> i) & 1 for i in range(width)])

    def bits_from(self, speaker: str) -> int:
        return sum(1 for s in self.senders if s == speaker)

    def to_record(self) -> dict:
        return {
            "protocol": self.protocol,
            "bits_sent": self.bits_sent,
            "bits_alice": self.bits_from(ALICE),
            "bits_bob": self.bits_from(BOB),
            "output": self.output,
        }
