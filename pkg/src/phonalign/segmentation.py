"""Posteriorgram decoding into timed phone segments.

Five steps: argmax-decode each frame, group consecutive identical labels,
drop groups whose mean max-posterior falls below a confidence threshold,
merge surviving neighbors that share a label (bridging the removed gaps),
then convert frame indices to times using the posteriorgram's stride and
offset.
"""

from dataclasses import dataclass

import numpy as np

from .corpus.types import Alignment, PhoneSegment


@dataclass
class FrameGroup:
    """A maximal run of frames decoded to one phone id.

    first/last are inclusive frame indices; confidence is the mean of the
    per-frame max posteriors over the run.
    """

    phone_id: int
    first: int
    last: int
    confidence: float

    def __post_init__(self):
        if self.first > self.last:
            raise ValueError(f"first {self.first} > last {self.last}")
        if not 0.0 <= self.confidence <= 1.0:
            raise ValueError(f"confidence {self.confidence} outside [0, 1]")

    @property
    def n_frames(self):
        return self.last - self.first + 1


def decode_frames(pg):
    """Per-frame argmax over a Posteriorgram.

    Returns (ids, probs): int64 phone ids and float64 max posteriors, one
    per frame. Ties go to the lower phone id (argmax keeps the first max).
    """
    if pg.frames == 0:
        return np.empty(0, dtype=np.int64), np.empty(0, dtype=np.float64)
    ids = np.argmax(pg.probs, axis=1).astype(np.int64)
    probs = pg.probs[np.arange(pg.frames), ids]
    return ids, probs


def group_frames(decoded):
    """Collapse decoded frames into maximal same-id runs.

    decoded is the (ids, probs) pair from decode_frames.
    """
    ids, probs = decoded
    groups = []
    start = 0
    for i in range(1, len(ids) + 1):
        if i == len(ids) or ids[i] != ids[start]:
            conf = float(np.mean(probs[start:i]))
            groups.append(
                FrameGroup(int(ids[start]), start, i - 1, min(1.0, max(0.0, conf)))
            )
            start = i
    return groups


def segment(pg, threshold=0.5, utterance_id=None):
    """Convert a Posteriorgram into an Alignment.

    Groups with confidence < threshold are removed; surviving neighbors
    with the same phone id merge into one segment spanning from the first
    group's start to the last group's end (absorbing the removed gap), with
    a frame-count-weighted mean confidence. Segment times are
    offset + first*stride and offset + (last+1)*stride.
    """
    if not 0.0 <= threshold <= 1.0:
        raise ValueError(f"threshold must be in [0, 1], got {threshold}")
    if utterance_id is None:
        utterance_id = pg.utterance_id
    duration = pg.offset + pg.frames * pg.stride

    groups = group_frames(decode_frames(pg))
    survivors = [g for g in groups if g.confidence >= threshold]

    # Each item: [phone_id, first, last, conf_sum, n_surviving_frames].
    # Weighting counts only surviving frames, not the bridged gap.
    merged = []
    for g in survivors:
        if merged and merged[-1][0] == g.phone_id:
            m = merged[-1]
            m[2] = g.last
            m[3] += g.confidence * g.n_frames
            m[4] += g.n_frames
        else:
            merged.append(
                [g.phone_id, g.first, g.last, g.confidence * g.n_frames, g.n_frames]
            )

    segments = [
        PhoneSegment(
            label=pg.inventory.symbol(pid),
            start=pg.offset + first * pg.stride,
            end=pg.offset + (last + 1) * pg.stride,
            confidence=min(1.0, max(0.0, conf_sum / n)),
        )
        for pid, first, last, conf_sum, n in merged
    ]
    alignment = Alignment(utterance_id, segments, duration=duration)
    alignment.validate()
    return alignment
