"""End-to-end glue: train a PCA+KNN model from a manifest, persist it as a
directory, and align embedding corpora with it.

A model directory holds pca.json/pca_mean.npy/pca_components.npy,
knn.json/knn_X.npy/knn_y.npy, and config.json. Training also emits
report.json with the class histogram before/after balancing, the chosen
component count, and the retained variance.
"""

import json
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .corpus import load_alignment
from .corpus.types import PhoneInventory
from .embeddings import load_embedding, validate_manifest
from .knn import KnnClassifier, fit_knn, load_knn, predict_posteriorgram, save_knn
from .labeling import LabeledFrameDataset, balance, label_frames, merge_datasets
from .pca import fit_pca, load_pca, save_pca, transform
from .segmentation import segment

CONFIG_VERSION = 1
REPORT_VERSION = 1


@dataclass
class PipelineConfig:
    variance_target: float | None = 0.95
    knn_k: int = 10
    threshold: float = 0.5
    per_class: object = "min"
    seed: int = 0
    stride: float | None = None
    tolerance: float = 0.02

    def __post_init__(self):
        if self.variance_target == "none":
            self.variance_target = None
        if self.variance_target is not None and not 0 < self.variance_target <= 1:
            raise ValueError(f"variance target {self.variance_target} outside (0, 1]")
        if self.knn_k < 1:
            raise ValueError(f"k must be >= 1, got {self.knn_k}")
        if not 0 <= self.threshold <= 1:
            raise ValueError(f"threshold {self.threshold} outside [0, 1]")
        if self.per_class != "min" and int(self.per_class) < 1:
            raise ValueError("per_class must be 'min' or a positive int")
        if self.stride is not None and self.stride <= 0:
            raise ValueError(f"stride override must be positive, got {self.stride}")
        if self.tolerance < 0:
            raise ValueError(f"tolerance must be non-negative, got {self.tolerance}")

    def to_dict(self):
        return {
            "version": CONFIG_VERSION,
            "variance_target": self.variance_target,
            "knn_k": self.knn_k,
            "threshold": self.threshold,
            "per_class": self.per_class,
            "seed": self.seed,
            "stride": self.stride,
            "tolerance": self.tolerance,
        }

    @classmethod
    def from_dict(cls, d):
        if d.get("version") != CONFIG_VERSION:
            raise ValueError(f"unsupported config version {d.get('version')!r}")
        return cls(
            variance_target=d["variance_target"],
            knn_k=d["knn_k"],
            threshold=d["threshold"],
            per_class=d["per_class"],
            seed=d["seed"],
            stride=d.get("stride"),
            tolerance=d.get("tolerance", 0.02),
        )


@dataclass
class TrainedModel:
    pca: object
    knn: KnnClassifier
    config: PipelineConfig

    @property
    def inventory(self):
        return self.knn.inventory


def _load_reference(manifest, entry):
    if entry.alignment_path is None:
        raise ValueError(f"{entry.utterance_id}: manifest entry has no alignment_path")
    path = manifest.resolve(entry.alignment_path)
    if not path.is_file():
        raise FileNotFoundError(f"{entry.utterance_id}: missing alignment {path}")
    alignment = load_alignment(path)
    return alignment


def _entry_embedding(manifest, entry, stride_override):
    emb = load_embedding(manifest, entry.utterance_id)
    if stride_override is not None:
        emb.stride = stride_override
    return emb


def train_model(manifest, config=None, references=None):
    """Train PCA + balanced KNN from a manifest of labeled embeddings.

    references: optional dict utterance_id -> Alignment; when absent, each
    manifest entry's alignment_path is loaded. Returns (TrainedModel,
    report dict). Errors carry the offending utterance id.
    """
    config = config or PipelineConfig()
    problems = validate_manifest(manifest)
    if problems:
        raise ValueError("manifest invalid: " + "; ".join(problems))
    if not manifest.entries:
        raise ValueError("manifest has no entries")

    refs = {}
    for entry in manifest.entries:
        if references is not None and entry.utterance_id in references:
            refs[entry.utterance_id] = references[entry.utterance_id]
        else:
            refs[entry.utterance_id] = _load_reference(manifest, entry)

    symbols = sorted({s.label for a in refs.values() for s in a.segments})
    if not symbols:
        raise ValueError("reference alignments contain no segments")
    inventory = PhoneInventory(symbols)

    datasets = []
    for entry in manifest.entries:
        emb = _entry_embedding(manifest, entry, config.stride)
        try:
            datasets.append(label_frames(emb, refs[entry.utterance_id], inventory))
        except Exception as exc:
            raise type(exc)(f"{entry.utterance_id}: {exc}") from exc
    full = merge_datasets(datasets)
    if len(full) == 0:
        raise ValueError("no frames overlap any reference segment")
    counts_before = full.class_counts()

    balanced = balance(full, per_class=config.per_class, seed=config.seed)
    counts_after = balanced.class_counts()

    pca_model = fit_pca(balanced.X, config.variance_target)
    reduced = transform(pca_model, balanced.X)
    knn_model = fit_knn(
        LabeledFrameDataset(reduced, balanced.y, inventory, balanced.provenance),
        k=config.knn_k,
    )

    self_pg = predict_posteriorgram(knn_model, reduced)
    self_pred = np.argmax(self_pg.probs, axis=1)
    self_consistency = float(np.mean(self_pred == balanced.y))

    report = {
        "version": REPORT_VERSION,
        "n_utterances": len(manifest.entries),
        "n_frames_labeled": int(len(full)),
        "n_frames_trained": int(len(balanced)),
        "class_counts_before": {
            inventory.symbol(c): int(n) for c, n in enumerate(counts_before)
        },
        "class_counts_after": {
            inventory.symbol(c): int(n) for c, n in enumerate(counts_after)
        },
        "pca": {
            "input_dim": pca_model.input_dim,
            "n_components": pca_model.n_components,
            "variance_target": pca_model.variance_target,
            "explained_variance_retained": float(pca_model.explained_ratio.sum()),
        },
        "knn": {"k": knn_model.k, "n_train": knn_model.n_train},
        "train_self_consistency": self_consistency,
        "config": config.to_dict(),
    }
    return TrainedModel(pca_model, knn_model, config), report


def save_model(model, model_dir, report=None):
    model_dir = Path(model_dir)
    model_dir.mkdir(parents=True, exist_ok=True)
    save_pca(model.pca, model_dir, seed=model.config.seed)
    save_knn(model.knn, model_dir)
    (model_dir / "config.json").write_text(
        json.dumps(model.config.to_dict(), indent=2) + "\n"
    )
    if report is not None:
        (model_dir / "report.json").write_text(json.dumps(report, indent=2) + "\n")


def load_model(model_dir):
    model_dir = Path(model_dir)
    config = PipelineConfig.from_dict(
        json.loads((model_dir / "config.json").read_text())
    )
    pca_model = load_pca(model_dir)
    knn_model = load_knn(model_dir)
    if knn_model.dim != pca_model.n_components:
        raise ValueError(
            f"{model_dir}: KNN dim {knn_model.dim} does not match "
            f"PCA components {pca_model.n_components}"
        )
    return TrainedModel(pca_model, knn_model, config)


def align_embedding(model, embedding, threshold=None):
    """Align one EmbeddingMatrix; returns an Alignment."""
    if embedding.dim != model.pca.input_dim:
        raise ValueError(
            f"{embedding.utterance_id}: model expects input dim "
            f"{model.pca.input_dim}, embeddings have dim {embedding.dim}"
        )
    if threshold is None:
        threshold = model.config.threshold
    reduced = transform(model.pca, embedding.data)
    pg = predict_posteriorgram(
        model.knn,
        reduced,
        stride=embedding.stride,
        offset=embedding.offset,
        utterance_id=embedding.utterance_id,
    )
    return segment(pg, threshold=threshold)


def align_corpus(model, manifest, threshold=None, jobs=1):
    """Align every manifest entry. Returns Alignments ordered by
    utterance_id regardless of worker scheduling.
    """
    problems = validate_manifest(manifest)
    if problems:
        raise ValueError("manifest invalid: " + "; ".join(problems))
    entries = sorted(manifest.entries, key=lambda e: e.utterance_id)

    def one(entry):
        emb = _entry_embedding(manifest, entry, model.config.stride)
        return align_embedding(model, emb, threshold=threshold)

    if jobs <= 1 or len(entries) <= 1:
        return [one(e) for e in entries]
    with ThreadPoolExecutor(max_workers=jobs) as pool:
        return list(pool.map(one, entries))
