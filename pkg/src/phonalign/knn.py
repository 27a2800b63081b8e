"""Balanced KNN frame classifier producing vote-fraction posteriorgrams.

Distances are squared Euclidean, voting is uniform over the k nearest
training rows, and the posterior for a class is its vote count divided by k.
Distance ties break toward the lower training index (stable sort), so
predictions are fully deterministic given the training order.
"""

import json
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .corpus.types import PhoneInventory

ROW_SUM_TOL = 1e-6
MODEL_VERSION = 1
# Cap on block_rows * n_train * dim so the pairwise difference tensor stays
# cache-friendly instead of spilling to hundreds of MB.
_BLOCK_BUDGET = 4_000_000


@dataclass
class KnnClassifier:
    """Lazy learner: stores the reduced training matrix verbatim."""

    train_X: np.ndarray
    train_y: np.ndarray
    k: int
    inventory: PhoneInventory

    def __post_init__(self):
        self.train_X = np.ascontiguousarray(self.train_X, dtype=np.float64)
        self.train_y = np.asarray(self.train_y, dtype=np.int64)
        if self.train_X.ndim != 2:
            raise ValueError(f"train_X must be rank 2, got {self.train_X.ndim}")
        if self.train_y.shape != (self.train_X.shape[0],):
            raise ValueError("train_y length must match train_X rows")
        if not 1 <= self.k <= self.train_X.shape[0]:
            raise ValueError(
                f"k must be in [1, {self.train_X.shape[0]}], got {self.k}"
            )
        if not np.all(np.isfinite(self.train_X)):
            raise ValueError("train_X contains non-finite values")
        if self.train_y.size and (
            self.train_y.min() < 0 or self.train_y.max() >= len(self.inventory)
        ):
            raise ValueError("train_y contains ids outside the inventory")

    @property
    def dim(self):
        return self.train_X.shape[1]

    @property
    def n_train(self):
        return self.train_X.shape[0]


@dataclass
class Posteriorgram:
    """T x P class posteriors per frame; rows sum to 1."""

    probs: np.ndarray
    inventory: PhoneInventory
    stride: float = 0.02
    offset: float = 0.0
    utterance_id: str = ""

    def __post_init__(self):
        self.probs = np.asarray(self.probs, dtype=np.float64)
        if self.probs.ndim != 2:
            raise ValueError(f"probs must be rank 2, got {self.probs.ndim}")
        if self.probs.shape[1] != len(self.inventory):
            raise ValueError(
                f"{self.probs.shape[1]} columns for {len(self.inventory)} classes"
            )
        if self.stride <= 0:
            raise ValueError(f"stride must be positive, got {self.stride}")
        if self.probs.size:
            if self.probs.min() < 0 or self.probs.max() > 1:
                raise ValueError("posteriors must lie in [0, 1]")
            sums = self.probs.sum(axis=1)
            worst = np.abs(sums - 1.0).max()
            if worst > ROW_SUM_TOL:
                raise ValueError(f"rows must sum to 1 (off by {worst:.3g})")

    @property
    def frames(self):
        return self.probs.shape[0]


def fit_knn(dataset, k=10):
    """Build a KnnClassifier from a LabeledFrameDataset. k defaults to 10."""
    if len(dataset) < k:
        raise ValueError(f"k={k} exceeds {len(dataset)} training frames")
    return KnnClassifier(dataset.X, dataset.y, k, dataset.inventory)


def predict_posteriorgram(classifier, Q, stride=0.02, offset=0.0, utterance_id=""):
    """Classify query frames Q (T x dim) into a Posteriorgram.

    Runs a blocked brute-force scan over all training rows. Neighbor
    selection partitions each distance row at the k-th smallest value, then
    stable-sorts only the candidates at or below it, so equal distances
    resolve toward the lower training index, exactly as a full stable sort
    would.
    """
    Q = np.ascontiguousarray(Q, dtype=np.float64)
    if Q.ndim != 2 or Q.shape[1] != classifier.dim:
        raise ValueError(f"expected shape (T, {classifier.dim}), got {Q.shape}")
    train = classifier.train_X
    k = classifier.k
    n_classes = len(classifier.inventory)
    m, dim = train.shape
    block = max(1, _BLOCK_BUDGET // max(m * dim, 1))

    out = np.zeros((Q.shape[0], n_classes), dtype=np.float64)
    for lo in range(0, Q.shape[0], block):
        q = Q[lo : lo + block]
        d = ((q[:, None, :] - train[None, :, :]) ** 2).sum(axis=2)
        kth = np.partition(d, k - 1, axis=1)[:, k - 1]
        for r in range(d.shape[0]):
            cand = np.flatnonzero(d[r] <= kth[r])
            if cand.size > k:
                cand = cand[np.argsort(d[r, cand], kind="stable")[:k]]
            out[lo + r] = np.bincount(classifier.train_y[cand], minlength=n_classes)
    out /= k
    return Posteriorgram(
        out, classifier.inventory, stride=stride, offset=offset, utterance_id=utterance_id
    )


def save_knn(classifier, model_dir):
    """Write knn.json + knn_X.npy + knn_y.npy into model_dir."""
    model_dir = Path(model_dir)
    model_dir.mkdir(parents=True, exist_ok=True)
    meta = {
        "version": MODEL_VERSION,
        "k": classifier.k,
        "n_train": classifier.n_train,
        "dim": classifier.dim,
        "inventory": list(classifier.inventory.symbols),
    }
    (model_dir / "knn.json").write_text(json.dumps(meta, indent=2) + "\n")
    np.save(model_dir / "knn_X.npy", classifier.train_X)
    np.save(model_dir / "knn_y.npy", classifier.train_y)


def load_knn(model_dir):
    model_dir = Path(model_dir)
    meta = json.loads((model_dir / "knn.json").read_text())
    if meta.get("version") != MODEL_VERSION:
        raise ValueError(f"unsupported model version {meta.get('version')!r}")
    X = np.load(model_dir / "knn_X.npy")
    y = np.load(model_dir / "knn_y.npy")
    if X.shape != (meta["n_train"], meta["dim"]):
        raise ValueError(
            f"{model_dir}: knn.json says {(meta['n_train'], meta['dim'])}, "
            f"array is {X.shape}"
        )
    return KnnClassifier(X, y, meta["k"], PhoneInventory(meta["inventory"]))
