"""TIMIT .PHN annotation parsing and the optional 61->39 label folding."""

import csv
from importlib import resources

from ..errors import ParseError
from .types import Alignment, PhoneSegment, TIME_EPS

TIMIT_SAMPLE_RATE = 16000


def parse_timit_phn(text, sample_rate=TIMIT_SAMPLE_RATE, utterance_id=""):
    """Parse .PHN text (`<start_sample> <end_sample> <label>` lines).

    Sample indices are converted to seconds at `sample_rate`. Line order is
    preserved; the resulting Alignment must satisfy its invariants.
    """
    if sample_rate <= 0:
        raise ValueError(f"sample_rate must be positive, got {sample_rate}")
    segments = []
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
        segments.append(
            PhoneSegment(parts[2], start_sample / sample_rate, end_sample / sample_rate)
        )
    return Alignment(utterance_id, segments)


def load_timit_phn(path, sample_rate=TIMIT_SAMPLE_RATE, utterance_id=None):
    from pathlib import Path

    p = Path(path)
    if utterance_id is None:
        utterance_id = p.stem
    return parse_timit_phn(p.read_text(), sample_rate, utterance_id)


def load_timit_folding():
    """61->39 folding table. Values are the folded label, or None for labels
    that are deleted outright (the glottal stop `q`). OFF by default in the
    pipeline; see the README before turning it on.
    """
    table = {}
    ref = resources.files("phonalign.corpus") / "data" / "timit_61_39.csv"
    with ref.open("r", encoding="utf-8") as f:
        for row in csv.reader(_skip_comments(f)):
            if not row:
                continue
            src, dst = row[0].strip(), row[1].strip()
            table[src] = dst if dst else None
    return table


def fold_alignment(alignment, folding=None, merge_adjacent=True):
    """Relabel an alignment through a folding table.

    Labels folded to None are dropped (leaving a gap). With `merge_adjacent`,
    same-label segments that share an edge after folding are merged into one.
    """
    if folding is None:
        folding = load_timit_folding()
    segments = []
    for seg in alignment.segments:
        if seg.label not in folding:
            raise ValueError(f"label not in folding table: {seg.label!r}")
        label = folding[seg.label]
        if label is None:
            continue
        prev = segments[-1] if segments else None
        if (
            merge_adjacent
            and prev is not None
            and prev.label == label
            and abs(seg.start - prev.end) <= TIME_EPS
        ):
            segments[-1] = PhoneSegment(label, prev.start, seg.end, prev.confidence)
        else:
            segments.append(PhoneSegment(label, seg.start, seg.end, seg.confidence))
    return Alignment(alignment.utterance_id, segments, alignment.duration)


def _skip_comments(lines):
    for line in lines:
        if line.strip() and not line.lstrip().startswith("#"):
            yield line
