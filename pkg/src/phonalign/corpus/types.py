"""Core corpus types: phone inventories, timed phone segments, alignments.

All times are seconds, stored as 64-bit floats. Sample-indexed corpus
formats are converted at parse time.
"""

from dataclasses import dataclass, field

# Slack for floating-point comparisons between segment edges (seconds).
TIME_EPS = 1e-9


class PhoneInventory:
    """Ordered set of phone symbols with a stable symbol<->id bijection.

    Order is insertion order; duplicates are rejected.
    """

    def __init__(self, symbols):
        self._symbols = []
        self._index = {}
        for sym in symbols:
            if not isinstance(sym, str) or not sym:
                raise ValueError(f"phone symbol must be a non-empty string, got {sym!r}")
            if sym in self._index:
                raise ValueError(f"duplicate phone symbol: {sym!r}")
            self._index[sym] = len(self._symbols)
            self._symbols.append(sym)

    @property
    def symbols(self):
        return tuple(self._symbols)

    def id(self, symbol):
        try:
            return self._index[symbol]
        except KeyError:
            raise ValueError(f"phone symbol not in inventory: {symbol!r}") from None

    def symbol(self, phone_id):
        if not 0 <= phone_id < len(self._symbols):
            raise ValueError(f"phone id out of range: {phone_id}")
        return self._symbols[phone_id]

    def __len__(self):
        return len(self._symbols)

    def __contains__(self, symbol):
        return symbol in self._index

    def __iter__(self):
        return iter(self._symbols)

    def __eq__(self, other):
        return isinstance(other, PhoneInventory) and self._symbols == other._symbols

    def __repr__(self):
        return f"PhoneInventory({self._symbols!r})"


@dataclass(frozen=True)
class PhoneSegment:
    """One timed phone interval. `confidence` is absent for parsed references."""

    label: str
    start: float
    end: float
    confidence: float | None = None

    def __post_init__(self):
        if not self.label:
            raise ValueError("empty segment label")
        if self.start < 0:
            raise ValueError(f"negative start time: {self.start}")
        if not self.end > self.start:
            raise ValueError(f"segment end {self.end} not after start {self.start}")
        if self.confidence is not None and not 0.0 <= self.confidence <= 1.0:
            raise ValueError(f"confidence outside [0, 1]: {self.confidence}")

    @property
    def duration(self):
        return self.end - self.start


@dataclass
class Alignment:
    """Ordered, non-overlapping timed phone intervals for one utterance.

    Gaps between segments are allowed. When `duration` is present every
    segment must end at or before it.
    """

    utterance_id: str
    segments: list = field(default_factory=list)
    duration: float | None = None

    def __post_init__(self):
        self.validate()

    def validate(self):
        prev = None
        for seg in self.segments:
            if prev is not None:
                if seg.start < prev.start:
                    raise ValueError(
                        f"{self.utterance_id!r}: segments not sorted by start "
                        f"({seg.start} after {prev.start})"
                    )
                if seg.start < prev.end - TIME_EPS:
                    raise ValueError(
                        f"{self.utterance_id!r}: overlapping segments "
                        f"{prev.label}[{prev.start}, {prev.end}) and "
                        f"{seg.label}[{seg.start}, {seg.end})"
                    )
            prev = seg
        if self.duration is not None and self.segments:
            last_end = max(s.end for s in self.segments)
            if last_end > self.duration + TIME_EPS:
                raise ValueError(
                    f"{self.utterance_id!r}: segment end {last_end} exceeds "
                    f"duration {self.duration}"
                )

    def labels(self):
        return [s.label for s in self.segments]

    def __len__(self):
        return len(self.segments)
