"""On-disk contract for frame embeddings: NPY v1.0 matrices plus a manifest.

Matrix files are NPY format version 1.0, little-endian float32, C-order,
rank 2 (frames x dim). The manifest is JSON (see data/manifest.schema.json);
stride and offset live in the manifest, never in the array file. Paths in a
manifest are resolved relative to the manifest's directory.
"""

import json
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np
from numpy.lib import format as npy_format

from .errors import FormatError

MANIFEST_VERSION = 1
DEFAULT_STRIDE = 0.02


@dataclass
class EmbeddingMatrix:
    """Per-utterance frame embeddings with timing metadata.

    Frame i spans [offset + i*stride, offset + (i+1)*stride).
    """

    utterance_id: str
    data: np.ndarray
    stride: float = DEFAULT_STRIDE
    offset: float = 0.0

    def __post_init__(self):
        if self.data.ndim != 2:
            raise ValueError(f"expected rank 2, got {self.data.ndim}")
        if self.data.dtype != np.float32:
            raise ValueError(f"expected float32, got {self.data.dtype}")
        if self.data.shape[1] < 1:
            raise ValueError("embedding dim must be >= 1")
        if self.stride <= 0:
            raise ValueError(f"stride must be positive, got {self.stride}")
        if self.data.size and not np.all(np.isfinite(self.data)):
            raise ValueError(f"{self.utterance_id!r}: non-finite embedding values")

    @property
    def frames(self):
        return self.data.shape[0]

    @property
    def dim(self):
        return self.data.shape[1]

    def frame_span(self, i):
        return (self.offset + i * self.stride, self.offset + (i + 1) * self.stride)


@dataclass
class ManifestEntry:
    utterance_id: str
    embedding_path: str
    frames: int
    dim: int
    stride: float = DEFAULT_STRIDE
    offset: float = 0.0
    audio_path: str | None = None
    alignment_path: str | None = None


@dataclass
class Manifest:
    entries: list = field(default_factory=list)
    base_dir: Path | None = None

    def resolve(self, path):
        p = Path(path)
        if not p.is_absolute() and self.base_dir is not None:
            p = self.base_dir / p
        return p

    def entry(self, utterance_id):
        for e in self.entries:
            if e.utterance_id == utterance_id:
                return e
        raise KeyError(utterance_id)

    def __len__(self):
        return len(self.entries)


def read_npy_header(path):
    """Read just the NPY header. Returns (shape, dtype_descr, fortran_order).

    Only format version 1.0 is accepted.
    """
    with open(path, "rb") as f:
        try:
            version = npy_format.read_magic(f)
        except ValueError as exc:
            raise FormatError(f"{path}: not an NPY file ({exc})") from exc
        if version != (1, 0):
            raise FormatError(f"{path}: unsupported NPY version {version[0]}.{version[1]}")
        try:
            shape, fortran_order, dtype = npy_format.read_array_header_1_0(f)
        except ValueError as exc:
            raise FormatError(f"{path}: malformed NPY header ({exc})") from exc
    return shape, dtype.str, fortran_order


def read_matrix(path):
    """Read a T x D float32 matrix from an NPY v1.0 file.

    Violations of the contract (version, dtype, rank, byte order, truncated
    payload) raise FormatError naming the problem.
    """
    shape, descr, fortran_order = read_npy_header(path)
    if len(shape) != 2:
        raise FormatError(f"{path}: expected rank 2, got {len(shape)}")
    if descr not in ("<f4", "|f4"):
        raise FormatError(f"{path}: expected little-endian float32 ('<f4'), got {descr!r}")
    if fortran_order:
        raise FormatError(f"{path}: expected C-order data, got Fortran order")
    with open(path, "rb") as f:
        npy_format.read_magic(f)
        npy_format.read_array_header_1_0(f)
        data = np.fromfile(f, dtype=np.dtype("<f4"), count=-1)
    expected = shape[0] * shape[1]
    if data.size < expected:
        raise FormatError(
            f"{path}: truncated file: header says {shape}, found {data.size} values"
        )
    if data.size > expected:
        raise FormatError(
            f"{path}: trailing bytes after {shape} payload"
        )
    return data.reshape(shape)


def write_matrix(matrix, path):
    """Write a T x D float32 matrix as NPY v1.0. Round-trips bit-exactly."""
    arr = np.asarray(matrix)
    if arr.ndim != 2:
        raise ValueError(f"expected rank 2, got {arr.ndim}")
    if arr.dtype != np.float32:
        raise ValueError(f"expected float32, got {arr.dtype}")
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "wb") as f:
        npy_format.write_array(f, np.ascontiguousarray(arr), version=(1, 0))


def _entry_to_dict(e):
    d = {
        "utterance_id": e.utterance_id,
        "embedding_path": e.embedding_path,
        "frames": e.frames,
        "dim": e.dim,
        "stride": e.stride,
        "offset": e.offset,
    }
    if e.audio_path is not None:
        d["audio_path"] = e.audio_path
    if e.alignment_path is not None:
        d["alignment_path"] = e.alignment_path
    return d


def write_manifest(manifest, path):
    path = Path(path)
    payload = {
        "version": MANIFEST_VERSION,
        "entries": [_entry_to_dict(e) for e in manifest.entries],
    }
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(json.dumps(payload, indent=2) + "\n")


def read_manifest(path):
    path = Path(path)
    try:
        payload = json.loads(path.read_text())
    except json.JSONDecodeError as exc:
        raise FormatError(f"{path}: invalid JSON: {exc}") from exc
    if payload.get("version") != MANIFEST_VERSION:
        raise FormatError(
            f"{path}: unsupported manifest version {payload.get('version')!r}"
        )
    entries = []
    for i, d in enumerate(payload.get("entries", [])):
        try:
            entries.append(
                ManifestEntry(
                    utterance_id=d["utterance_id"],
                    embedding_path=d["embedding_path"],
                    frames=int(d["frames"]),
                    dim=int(d["dim"]),
                    stride=float(d.get("stride", DEFAULT_STRIDE)),
                    offset=float(d.get("offset", 0.0)),
                    audio_path=d.get("audio_path"),
                    alignment_path=d.get("alignment_path"),
                )
            )
        except (KeyError, TypeError, ValueError) as exc:
            raise FormatError(f"{path}: bad manifest entry {i}: {exc}") from exc
    return Manifest(entries, base_dir=path.parent)


def validate_manifest(manifest):
    """Check manifest invariants. Returns a list of violation strings
    (empty = valid) instead of failing on the first problem.
    """
    violations = []
    seen = set()
    dims = {}
    for e in manifest.entries:
        if e.utterance_id in seen:
            violations.append(f"duplicate utterance_id {e.utterance_id!r}")
        seen.add(e.utterance_id)
        dims.setdefault(e.dim, []).append(e.utterance_id)
        if e.stride <= 0:
            violations.append(f"{e.utterance_id}: non-positive stride {e.stride}")
        if e.frames < 0:
            violations.append(f"{e.utterance_id}: negative frame count {e.frames}")
    if len(dims) > 1:
        detail = ", ".join(f"dim {d} ({ids[0]}, ...)" for d, ids in sorted(dims.items()))
        violations.append(f"dim mismatch across entries: {detail}")
    for e in manifest.entries:
        path = manifest.resolve(e.embedding_path)
        if not path.is_file():
            violations.append(f"{e.utterance_id}: missing embedding file {path}")
            continue
        try:
            shape, descr, fortran_order = read_npy_header(path)
        except FormatError as exc:
            violations.append(f"{e.utterance_id}: {exc}")
            continue
        if len(shape) != 2 or descr not in ("<f4", "|f4") or fortran_order:
            violations.append(
                f"{e.utterance_id}: bad array format (shape {shape}, dtype {descr})"
            )
            continue
        if shape != (e.frames, e.dim):
            violations.append(
                f"{e.utterance_id}: manifest says {(e.frames, e.dim)}, "
                f"file header says {shape}"
            )
    return violations


def load_embedding(manifest, utterance_id):
    """Load one utterance's EmbeddingMatrix; stride/offset come from the
    manifest entry, shape is cross-checked against it.
    """
    entry = manifest.entry(utterance_id)
    data = read_matrix(manifest.resolve(entry.embedding_path))
    if data.shape != (entry.frames, entry.dim):
        raise FormatError(
            f"{utterance_id}: manifest says {(entry.frames, entry.dim)}, "
            f"file has {data.shape}"
        )
    return EmbeddingMatrix(utterance_id, data, stride=entry.stride, offset=entry.offset)
