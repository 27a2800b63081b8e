"""Desk-scale synthetic corpus generator for end-to-end tests and demos.

Class centroids sit on a sphere of radius `separation`; frames are the
centroid plus unit-variance spherical Gaussian noise. Labels change in
piecewise-constant runs with geometric lengths (minimum 3 frames), so the
reference boundaries land exactly on the frame grid. Everything is driven by
one seeded generator, making corpora bit-identical for a fixed seed.
"""

from pathlib import Path

import numpy as np

from .corpus.jsonio import write_alignment_json
from .corpus.types import Alignment, PhoneSegment
from .embeddings import Manifest, ManifestEntry, write_manifest, write_matrix

MIN_RUN_FRAMES = 3
# Geometric tail with mean 8 on top of the 2-frame floor: mean run ~10 frames.
_RUN_P = 1.0 / 8.0


def _label_runs(rng, n_frames, n_classes):
    """Runs as (class_id, n_frames) covering n_frames; adjacent ids differ."""
    if n_classes == 1:
        return [(0, n_frames)]
    runs = []
    used = 0
    prev = -1
    while used < n_frames:
        if prev < 0:
            cid = int(rng.integers(n_classes))
        else:
            # Draw from the other classes: skew around prev.
            cid = int(rng.integers(n_classes - 1))
            if cid >= prev:
                cid += 1
        length = MIN_RUN_FRAMES - 1 + int(rng.geometric(_RUN_P))
        if n_frames - used - length < MIN_RUN_FRAMES:
            length = n_frames - used  # absorb the remainder into this run
        runs.append((cid, length))
        used += length
        prev = cid
    return runs


def generate_corpus(
    out_dir,
    classes=10,
    dim=64,
    utterances=50,
    frames=200,
    separation=20.0,
    seed=0,
    stride=0.02,
):
    """Write embeddings/, refs/, and manifest.json under out_dir.

    Returns the Manifest. Reference alignments are JSON files; labels are
    zero-padded class symbols (p00, p01, ...).
    """
    if separation <= 0:
        raise ValueError(f"separation must be positive, got {separation}")
    if classes < 1 or dim < 1 or utterances < 1 or frames < 1:
        raise ValueError("classes, dim, utterances, and frames must be >= 1")
    out_dir = Path(out_dir)
    (out_dir / "embeddings").mkdir(parents=True, exist_ok=True)
    (out_dir / "refs").mkdir(parents=True, exist_ok=True)

    rng = np.random.default_rng(seed)
    centroids = rng.normal(size=(classes, dim))
    norms = np.linalg.norm(centroids, axis=1, keepdims=True)
    norms[norms < 1e-12] = 1.0
    centroids = centroids / norms * separation

    width = max(2, len(str(classes - 1)))
    symbols = [f"p{c:0{width}d}" for c in range(classes)]

    entries = []
    for u in range(utterances):
        utt_id = f"utt{u:04d}"
        runs = _label_runs(rng, frames, classes)

        X = np.empty((frames, dim), dtype=np.float32)
        segments = []
        pos = 0
        for cid, length in runs:
            noise = rng.normal(size=(length, dim))
            X[pos : pos + length] = (centroids[cid] + noise).astype(np.float32)
            segments.append(
                PhoneSegment(
                    label=symbols[cid],
                    start=pos * stride,
                    end=(pos + length) * stride,
                )
            )
            pos += length

        emb_rel = f"embeddings/{utt_id}.npy"
        ref_rel = f"refs/{utt_id}.json"
        write_matrix(X, out_dir / emb_rel)
        alignment = Alignment(utt_id, segments, duration=frames * stride)
        alignment.validate()
        write_alignment_json(alignment, out_dir / ref_rel)
        entries.append(
            ManifestEntry(
                utterance_id=utt_id,
                embedding_path=emb_rel,
                frames=frames,
                dim=dim,
                stride=stride,
                offset=0.0,
                alignment_path=ref_rel,
            )
        )

    manifest = Manifest(entries, base_dir=out_dir)
    write_manifest(manifest, out_dir / "manifest.json")
    return manifest
