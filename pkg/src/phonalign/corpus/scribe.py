"""SCRIBE per-phone label file parsing.

The corpus ships several annotation layers; this parser targets per-phone
label files laid out as whitespace-separated `<start_sample> <end_sample>
<SAMPA symbol>` lines (the layout of the fixture set under tests/). SCRIBE
audio is 20 kHz, so that is the default sample rate. SAMPA stress marks
(leading `"` or `%`) are stripped before the symbol lookup.
"""

from ..errors import ParseError
from .sampa import arpabet_inventory, sampa_to_arpabet
from .types import Alignment, PhoneSegment

SCRIBE_SAMPLE_RATE = 20000

_STRESS_MARKS = '"%'


def parse_scribe_labels(text, sample_rate=SCRIBE_SAMPLE_RATE, inventory=None, utterance_id=""):
    """Parse a SCRIBE label file into an ARPABET Alignment.

    Returns (alignment, dropped) where `dropped` lists the SAMPA symbols
    (one entry per occurrence, in file order) that could not be mapped into
    `inventory` and were filtered out, mirroring how unmappable symbols are
    handled upstream of evaluation.
    """
    if sample_rate <= 0:
        raise ValueError(f"sample_rate must be positive, got {sample_rate}")
    if inventory is None:
        inventory = arpabet_inventory()
    segments = []
    dropped = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line:
            continue
        parts = line.split()
        if len(parts) != 3:
            raise ParseError(f"expected 3 fields, got {len(parts)}, line {lineno}")
        try:
            start_sample = int(parts[0])
            end_sample = int(parts[1])
        except ValueError:
            raise ParseError(f"non-integer sample index, line {lineno}") from None
        if start_sample < 0:
            raise ParseError(f"negative sample index, line {lineno}")
        if end_sample <= start_sample:
            raise ParseError(f"end before start, line {lineno}")
        symbol = parts[2].lstrip(_STRESS_MARKS)
        if not symbol:
            raise ParseError(f"empty phone symbol, line {lineno}")
        arpabet = sampa_to_arpabet(symbol)
        if arpabet is None or arpabet not in inventory:
            dropped.append(parts[2])
            continue
        segments.append(
            PhoneSegment(arpabet, start_sample / sample_rate, end_sample / sample_rate)
        )
    return Alignment(utterance_id, segments), dropped
