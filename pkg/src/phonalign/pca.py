"""PCA dimensionality reduction fit to a variance-retention target.

The number of components is the smallest K whose cumulative explained
variance ratio reaches the target. A target of None (spelled "none" on the
command line) keeps the original axes: the mean is still subtracted but the
components are the identity, so transform(X) == X - mean.

Component signs are fixed so each component's largest-magnitude entry is
non-negative, making fits reproducible across runs and platforms.
"""

import json
from dataclasses import dataclass
from pathlib import Path

import numpy as np

ORTHONORMALITY_TOL = 1e-6
MODEL_VERSION = 1


@dataclass
class PcaModel:
    mean: np.ndarray
    components: np.ndarray
    explained_ratio: np.ndarray
    variance_target: float | None

    def __post_init__(self):
        self.mean = np.asarray(self.mean, dtype=np.float64)
        self.components = np.asarray(self.components, dtype=np.float64)
        self.explained_ratio = np.asarray(self.explained_ratio, dtype=np.float64)
        if self.mean.ndim != 1:
            raise ValueError(f"mean must be rank 1, got {self.mean.ndim}")
        if self.components.ndim != 2:
            raise ValueError(f"components must be rank 2, got {self.components.ndim}")
        if self.components.shape[1] != self.mean.shape[0]:
            raise ValueError(
                f"components dim {self.components.shape[1]} does not match "
                f"mean dim {self.mean.shape[0]}"
            )
        if self.explained_ratio.shape != (self.components.shape[0],):
            raise ValueError("explained_ratio length must equal n_components")
        gram = self.components @ self.components.T
        err = np.abs(gram - np.eye(self.n_components)).max() if self.n_components else 0.0
        if err > ORTHONORMALITY_TOL:
            raise ValueError(f"components not orthonormal (max deviation {err:.3g})")

    @property
    def input_dim(self):
        return self.mean.shape[0]

    @property
    def n_components(self):
        return self.components.shape[0]


def _fix_signs(components):
    # Largest-|entry| coordinate of each component made non-negative.
    idx = np.argmax(np.abs(components), axis=1)
    signs = np.sign(components[np.arange(components.shape[0]), idx])
    signs[signs == 0] = 1.0
    return components * signs[:, None]


def fit_pca(X, variance_target=0.95):
    """Fit a PcaModel on rows of X (N x D, N >= 2).

    variance_target: float in (0, 1], or None/"none" for the identity
    passthrough. Raises ValueError when the centered data has zero variance
    (the ratios would be undefined).
    """
    X = np.asarray(X, dtype=np.float64)
    if X.ndim != 2:
        raise ValueError(f"X must be rank 2, got {X.ndim}")
    n, d = X.shape
    if n < 2:
        raise ValueError(f"need at least 2 samples to fit, got {n}")
    if not np.all(np.isfinite(X)):
        raise ValueError("X contains non-finite values")
    if variance_target == "none":
        variance_target = None
    if variance_target is not None:
        variance_target = float(variance_target)
        if not 0.0 < variance_target <= 1.0:
            raise ValueError(f"variance target must be in (0, 1], got {variance_target}")

    mean = X.mean(axis=0)
    Xc = X - mean
    scale = np.abs(X).max()
    if np.abs(Xc).max() <= max(scale, 1.0) * 1e-13:
        raise ValueError("degenerate data: zero total variance")

    if variance_target is None:
        components = np.eye(d)
        total = np.sum(Xc * Xc)
        ratio = np.sum(Xc * Xc, axis=0) / total
        return PcaModel(mean, components, ratio, None)

    _, s, vt = np.linalg.svd(Xc, full_matrices=False)
    var = s * s
    ratio = var / var.sum()
    cumulative = np.cumsum(ratio)
    k = int(np.searchsorted(cumulative, variance_target - 1e-12) + 1)
    k = min(k, len(ratio))
    components = _fix_signs(vt[:k])
    return PcaModel(mean, components, ratio[:k], variance_target)


def transform(model, X):
    """Project rows of X (N x D) to the component space (N x K, float64)."""
    X = np.asarray(X, dtype=np.float64)
    if X.ndim != 2 or X.shape[1] != model.input_dim:
        raise ValueError(
            f"expected shape (N, {model.input_dim}), got {X.shape}"
        )
    return (X - model.mean) @ model.components.T


def inverse_transform(model, Z):
    """Map component-space rows back to the original space."""
    Z = np.asarray(Z, dtype=np.float64)
    if Z.ndim != 2 or Z.shape[1] != model.n_components:
        raise ValueError(
            f"expected shape (N, {model.n_components}), got {Z.shape}"
        )
    return Z @ model.components + model.mean


def save_pca(model, model_dir, seed=None):
    """Write pca.json + pca_mean.npy + pca_components.npy into model_dir.

    seed is the training seed recorded for reproducibility (the fit itself
    is deterministic; the seed governs upstream sampling).
    """
    model_dir = Path(model_dir)
    model_dir.mkdir(parents=True, exist_ok=True)
    meta = {
        "version": MODEL_VERSION,
        "input_dim": model.input_dim,
        "n_components": model.n_components,
        "variance_target": model.variance_target,
        "explained_ratio": [float(r) for r in model.explained_ratio],
        "seed": seed,
    }
    (model_dir / "pca.json").write_text(json.dumps(meta, indent=2) + "\n")
    np.save(model_dir / "pca_mean.npy", model.mean)
    np.save(model_dir / "pca_components.npy", model.components)


def load_pca(model_dir):
    model_dir = Path(model_dir)
    meta = json.loads((model_dir / "pca.json").read_text())
    if meta.get("version") != MODEL_VERSION:
        raise ValueError(f"unsupported model version {meta.get('version')!r}")
    mean = np.load(model_dir / "pca_mean.npy")
    components = np.load(model_dir / "pca_components.npy")
    model = PcaModel(
        mean, components, np.asarray(meta["explained_ratio"]), meta["variance_target"]
    )
    if model.input_dim != meta["input_dim"] or model.n_components != meta["n_components"]:
        raise ValueError(
            f"{model_dir}: pca.json disagrees with array shapes "
            f"({meta['input_dim']}x{meta['n_components']} vs "
            f"{model.input_dim}x{model.n_components})"
        )
    return model
