"""Text-independent phone-to-audio alignment.

Pipeline: self-supervised frame embeddings -> PCA -> balanced KNN frame
classifier -> posterior-threshold segmentation -> timed phone segments,
plus boundary-level evaluation (precision/recall/F1/R-value) and parsers
for common corpus annotation formats.
"""

from .corpus import (
    Alignment,
    PhoneInventory,
    PhoneSegment,
    arpabet_inventory,
    fold_alignment,
    load_alignment,
    load_timit_folding,
    parse_scribe_labels,
    parse_timit_phn,
    read_alignment_json,
    read_textgrid,
    sampa_to_arpabet,
    write_alignment_json,
    write_textgrid,
)
from .embeddings import (
    EmbeddingMatrix,
    Manifest,
    ManifestEntry,
    load_embedding,
    read_manifest,
    read_matrix,
    validate_manifest,
    write_manifest,
    write_matrix,
)
from .errors import FormatError, ParseError
from .knn import KnnClassifier, Posteriorgram, fit_knn, predict_posteriorgram
from .labeling import LabeledFrameDataset, balance, label_frames, merge_datasets
from .metrics import (
    BoundaryEvalResult,
    evaluate_corpus,
    evaluate_pair,
    extract_boundaries,
    match_boundaries,
    pair_alignments,
    r_value,
)
from .pca import PcaModel, fit_pca, inverse_transform, transform
from .pipeline import (
    PipelineConfig,
    TrainedModel,
    align_corpus,
    align_embedding,
    load_model,
    save_model,
    train_model,
)
from .segmentation import FrameGroup, decode_frames, group_frames, segment
from .synth import generate_corpus

__version__ = "0.1.0"

__all__ = [
    "Alignment",
    "BoundaryEvalResult",
    "EmbeddingMatrix",
    "FormatError",
    "FrameGroup",
    "KnnClassifier",
    "LabeledFrameDataset",
    "Manifest",
    "ManifestEntry",
    "ParseError",
    "PcaModel",
    "PhoneInventory",
    "PhoneSegment",
    "PipelineConfig",
    "Posteriorgram",
    "TrainedModel",
    "align_corpus",
    "align_embedding",
    "arpabet_inventory",
    "balance",
    "decode_frames",
    "evaluate_corpus",
    "evaluate_pair",
    "extract_boundaries",
    "fit_knn",
    "fit_pca",
    "fold_alignment",
    "generate_corpus",
    "group_frames",
    "inverse_transform",
    "label_frames",
    "load_alignment",
    "load_embedding",
    "load_model",
    "load_timit_folding",
    "match_boundaries",
    "merge_datasets",
    "pair_alignments",
    "parse_scribe_labels",
    "parse_timit_phn",
    "predict_posteriorgram",
    "r_value",
    "read_alignment_json",
    "read_manifest",
    "read_matrix",
    "read_textgrid",
    "sampa_to_arpabet",
    "save_model",
    "segment",
    "train_model",
    "transform",
    "validate_manifest",
    "write_alignment_json",
    "write_manifest",
    "write_matrix",
    "write_textgrid",
]
