"""Turn timed phone segments into per-frame training labels.

Each frame is assigned the label of the segment it overlaps most; ties go to
the earlier segment. Frames that overlap no segment are left out of the
dataset. Class balancing subsamples per phone id with a seeded generator so
the selection is reproducible.
"""

import logging
from dataclasses import dataclass

import numpy as np

from .corpus.types import PhoneInventory

log = logging.getLogger(__name__)


@dataclass
class LabeledFrameDataset:
    """Frame vectors X (N x D) with integer phone ids y (N,).

    provenance, when tracked, is one (utterance_id, frame_index) pair per
    row, so any training row can be traced back to its source frame.
    """

    X: np.ndarray
    y: np.ndarray
    inventory: PhoneInventory
    provenance: list | None = None

    def __post_init__(self):
        self.X = np.asarray(self.X)
        self.y = np.asarray(self.y, dtype=np.int64)
        if self.X.ndim != 2:
            raise ValueError(f"X must be rank 2, got {self.X.ndim}")
        if self.y.shape != (self.X.shape[0],):
            raise ValueError(
                f"y shape {self.y.shape} does not match X rows {self.X.shape[0]}"
            )
        if self.y.size and (self.y.min() < 0 or self.y.max() >= len(self.inventory)):
            raise ValueError("y contains ids outside the inventory")
        if self.provenance is not None and len(self.provenance) != self.X.shape[0]:
            raise ValueError(
                f"provenance length {len(self.provenance)} does not match "
                f"X rows {self.X.shape[0]}"
            )

    def __len__(self):
        return self.X.shape[0]

    def class_counts(self):
        """Counts per phone id, length == len(inventory)."""
        return np.bincount(self.y, minlength=len(self.inventory))


def label_frames(embedding, alignment, inventory=None):
    """Label each frame of an EmbeddingMatrix from a reference Alignment.

    A frame [t, t+stride) takes the label of the segment with the largest
    temporal overlap. Exact ties (within 1e-9 * stride, which absorbs float
    noise at segment joins) resolve to the earlier segment. Frames with no
    overlap at all are dropped.

    Returns a LabeledFrameDataset with provenance filled in. If inventory is
    None, one is built from the sorted unique labels of the alignment.
    Labels missing from a supplied inventory raise an error naming them.
    """
    alignment.validate()
    if inventory is None:
        inventory = PhoneInventory(sorted({s.label for s in alignment.segments}))
    segments = alignment.segments
    stride = embedding.stride
    tie_eps = 1e-9 * stride

    rows = []
    ids = []
    j = 0
    for i in range(embedding.frames):
        fs, fe = embedding.frame_span(i)
        while j < len(segments) and segments[j].end <= fs:
            j += 1
        best_overlap = 0.0
        best_label = None
        k = j
        while k < len(segments) and segments[k].start < fe:
            seg = segments[k]
            overlap = min(fe, seg.end) - max(fs, seg.start)
            if overlap > best_overlap + tie_eps:
                best_overlap = overlap
                best_label = seg.label
            k += 1
        if best_label is not None:
            rows.append(i)
            ids.append(inventory.id(best_label))

    X = (
        np.ascontiguousarray(embedding.data[rows])
        if rows
        else np.empty((0, embedding.dim), dtype=embedding.data.dtype)
    )
    provenance = [(embedding.utterance_id, i) for i in rows]
    return LabeledFrameDataset(X, np.asarray(ids, dtype=np.int64), inventory, provenance)


def merge_datasets(datasets):
    """Concatenate LabeledFrameDatasets sharing one inventory."""
    datasets = list(datasets)
    if not datasets:
        raise ValueError("no datasets to merge")
    inventory = datasets[0].inventory
    for d in datasets[1:]:
        if d.inventory != inventory:
            raise ValueError("datasets use different inventories")
    X = np.vstack([d.X for d in datasets])
    y = np.concatenate([d.y for d in datasets])
    provenance = None
    if all(d.provenance is not None for d in datasets):
        provenance = [p for d in datasets for p in d.provenance]
    return LabeledFrameDataset(X, y, inventory, provenance)


def balance(dataset, per_class="min", seed=0):
    """Subsample so every present class contributes exactly the same count.

    per_class "min" uses the smallest present-class count as the target; a
    numeric target must not exceed any present class count (deficient
    classes raise an error listing them, rather than being oversampled).
    Classes with zero rows stay absent from the output and are logged.
    Selection is without replacement via np.random.default_rng(seed); within
    each class the kept rows stay in their original order, and classes are
    emitted in ascending id order.
    """
    if len(dataset) == 0:
        raise ValueError("cannot balance an empty dataset")
    counts = dataset.class_counts()
    present = np.flatnonzero(counts)
    absent = [
        dataset.inventory.symbol(c) for c in range(len(counts)) if counts[c] == 0
    ]
    if absent:
        log.info("classes with no frames, absent from balanced set: %s",
                 ", ".join(absent))
    if per_class == "min":
        target = int(counts[present].min())
    else:
        target = int(per_class)
        if target < 1:
            raise ValueError(f"per_class must be >= 1, got {per_class}")
        deficient = [
            dataset.inventory.symbol(c) for c in present if counts[c] < target
        ]
        if deficient:
            raise ValueError(
                f"per_class={target} exceeds the available frames for: "
                + ", ".join(deficient)
            )

    rng = np.random.default_rng(seed)
    kept = []
    for c in present:
        idx = np.flatnonzero(dataset.y == c)
        if idx.size > target:
            idx = np.sort(rng.choice(idx, size=target, replace=False))
        kept.append(idx)
    order = np.concatenate(kept)
    provenance = None
    if dataset.provenance is not None:
        provenance = [dataset.provenance[i] for i in order]
    return LabeledFrameDataset(
        np.ascontiguousarray(dataset.X[order]),
        dataset.y[order],
        dataset.inventory,
        provenance,
    )
