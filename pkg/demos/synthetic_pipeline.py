"""
End-to-end alignment on a synthetic corpus
==========================================

Generates a toy corpus of Gaussian-cluster embeddings with known phone
boundaries, trains the PCA + KNN frame classifier on it, aligns the same
utterances, and scores the hypothesis boundaries against the references.
"""

import tempfile
from pathlib import Path

from phonalign.corpus import load_alignment
from phonalign.metrics import evaluate_corpus, pair_alignments
from phonalign.pipeline import PipelineConfig, align_corpus, train_model
from phonalign.embeddings import read_manifest
from phonalign.synth import generate_corpus

work = Path(tempfile.mkdtemp(prefix="phonalign_demo_"))
print("working in", work)

# 10 phone classes in 64 dimensions, well separated
generate_corpus(work, classes=10, dim=64, utterances=20, frames=200,
                separation=20.0, seed=7)
manifest = read_manifest(work / "manifest.json")

config = PipelineConfig(variance_target=0.95, knn_k=10, seed=7)
model, report = train_model(manifest, config)
print("trained on", report["n_frames_trained"], "frames,",
      report["pca"]["n_components"], "PCA dims,",
      f"self-consistency {report['train_self_consistency']:.3f}")

hypotheses = align_corpus(model, manifest)

references = []
for entry in manifest.entries:
    references.append(load_alignment(manifest.resolve(entry.alignment_path)))

result = evaluate_corpus(pair_alignments(references, hypotheses), tolerance=0.02)
print(f"precision {result.precision:.4f}")
print(f"recall    {result.recall:.4f}")
print(f"F1        {result.f1:.4f}")
print(f"R-value   {result.r_value:.4f}")

# the same pipeline is available from the shell:
#   phonalign synth --out corpus --classes 10 --dim 64 --seed 7
#   phonalign train --manifest corpus/manifest.json --out model --seed 7
#   phonalign align --model model --manifest corpus/manifest.json --out hyp
#   phonalign eval --ref corpus/refs --hyp hyp
