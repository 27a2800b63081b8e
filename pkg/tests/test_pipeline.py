import json

import numpy as np
import pytest

from phonalign.corpus import load_alignment
from phonalign.embeddings import EmbeddingMatrix, load_embedding
from phonalign.metrics import evaluate_corpus, pair_alignments
from phonalign.pipeline import (
    PipelineConfig,
    align_corpus,
    align_embedding,
    load_model,
    save_model,
    train_model,
)
from phonalign.synth import generate_corpus


@pytest.fixture(scope="module")
def corpus(tmp_path_factory):
    root = tmp_path_factory.mktemp("corpus")
    manifest = generate_corpus(
        root, classes=5, dim=12, utterances=8, frames=80, separation=20.0, seed=17
    )
    return root, manifest


@pytest.fixture(scope="module")
def trained(corpus):
    _, manifest = corpus
    return train_model(manifest, PipelineConfig(seed=17))


class TestTrain:
    def test_report_shape(self, trained):
        model, report = trained
        assert report["version"] == 1
        assert report["n_utterances"] == 8
        assert report["n_frames_labeled"] == 8 * 80
        assert set(report["class_counts_before"]) == set(model.inventory.symbols)
        assert report["knn"]["k"] == 10
        assert report["pca"]["input_dim"] == 12
        assert 1 <= report["pca"]["n_components"] <= 12
        assert report["pca"]["explained_variance_retained"] >= 0.95
        assert report["config"]["seed"] == 17

    def test_balancing_uniform_histogram(self, trained):
        _, report = trained
        after = list(report["class_counts_after"].values())
        assert len(set(after)) == 1
        assert sum(after) == report["n_frames_trained"]
        before = report["class_counts_before"]
        assert after[0] == min(before.values())

    def test_separable_data_self_consistent(self, trained):
        _, report = trained
        assert report["train_self_consistency"] >= 0.99

    def test_inventory_is_sorted_symbols(self, trained):
        model, _ = trained
        assert list(model.inventory.symbols) == sorted(model.inventory.symbols)

    def test_empty_manifest(self, corpus):
        from phonalign.embeddings import Manifest

        with pytest.raises(ValueError, match="no entries"):
            train_model(Manifest([], base_dir=None))

    def test_missing_alignment_names_utterance(self, tmp_path):
        manifest = generate_corpus(tmp_path, classes=2, dim=4, utterances=2,
                                   frames=40, seed=0)
        manifest.entries[1].alignment_path = "refs/gone.json"
        with pytest.raises(FileNotFoundError, match="utt0001"):
            train_model(manifest)

    def test_invalid_manifest_rejected(self, tmp_path):
        manifest = generate_corpus(tmp_path, classes=2, dim=4, utterances=2,
                                   frames=40, seed=0)
        (tmp_path / "embeddings" / "utt0000.npy").write_bytes(b"junk")
        with pytest.raises(ValueError, match="manifest invalid"):
            train_model(manifest)

    def test_explicit_references_override_paths(self, tmp_path):
        manifest = generate_corpus(tmp_path, classes=2, dim=4, utterances=2,
                                   frames=40, seed=1)
        refs = {
            e.utterance_id: load_alignment(tmp_path / e.alignment_path)
            for e in manifest.entries
        }
        for e in manifest.entries:
            e.alignment_path = None
        model, report = train_model(manifest, references=refs)
        assert report["n_frames_labeled"] == 80
        assert len(model.inventory) == 2

    def test_variance_none_keeps_all_dims(self, tmp_path):
        manifest = generate_corpus(tmp_path, classes=2, dim=6, utterances=2,
                                   frames=40, seed=2)
        model, report = train_model(
            manifest, PipelineConfig(variance_target=None)
        )
        assert model.pca.n_components == 6
        assert report["pca"]["variance_target"] is None

    def test_per_class_cap(self, tmp_path):
        manifest = generate_corpus(tmp_path, classes=2, dim=4, utterances=2,
                                   frames=60, seed=3)
        model, report = train_model(manifest, PipelineConfig(per_class=5))
        assert report["n_frames_trained"] == 10
        assert model.knn.n_train == 10


class TestAlign:
    def test_roundtrip_through_disk_is_identical(self, corpus, trained, tmp_path):
        root, manifest = corpus
        model, report = trained
        save_model(model, tmp_path / "model", report=report)
        back = load_model(tmp_path / "model")
        a1 = align_corpus(model, manifest)
        a2 = align_corpus(back, manifest)
        assert len(a1) == len(a2) == 8
        for x, y in zip(a1, a2):
            assert x.utterance_id == y.utterance_id
            assert x.segments == y.segments

    def test_parallel_matches_serial(self, corpus, trained):
        _, manifest = corpus
        model, _ = trained
        serial = align_corpus(model, manifest, jobs=1)
        parallel = align_corpus(model, manifest, jobs=3)
        for x, y in zip(serial, parallel):
            assert x.utterance_id == y.utterance_id
            assert x.segments == y.segments

    def test_outputs_sorted_by_utterance_id(self, corpus, trained):
        _, manifest = corpus
        model, _ = trained
        manifest.entries.reverse()
        try:
            ids = [a.utterance_id for a in align_corpus(model, manifest)]
        finally:
            manifest.entries.reverse()
        assert ids == sorted(ids)

    def test_near_perfect_boundaries_on_separable_data(self, corpus, trained):
        root, manifest = corpus
        model, _ = trained
        hyps = align_corpus(model, manifest)
        refs = [load_alignment(root / e.alignment_path) for e in manifest.entries]
        res = evaluate_corpus(pair_alignments(refs, hyps), tolerance=0.02)
        assert res.f1 >= 0.99
        assert res.r_value >= 0.95

    def test_threshold_override(self, corpus, trained):
        _, manifest = corpus
        model, _ = trained
        emb = load_embedding(manifest, "utt0000")
        strict = align_embedding(model, emb, threshold=1.0)
        default = align_embedding(model, emb)
        total = lambda a: sum(s.end - s.start for s in a.segments)
        assert total(strict) <= total(default)

    def test_dim_mismatch_cites_both_dims(self, trained):
        model, _ = trained
        emb = EmbeddingMatrix("odd", np.zeros((10, 7), dtype=np.float32))
        with pytest.raises(ValueError, match="model expects input dim 12, "
                                             "embeddings have dim 7"):
            align_embedding(model, emb)

    def test_stride_override_rescales_times(self, tmp_path):
        manifest = generate_corpus(tmp_path, classes=2, dim=4, utterances=2,
                                   frames=60, seed=4, stride=0.02)
        model, _ = train_model(manifest, PipelineConfig(stride=0.01, seed=4))
        hyps = align_corpus(model, manifest)
        for a in hyps:
            assert a.duration == pytest.approx(60 * 0.01)


class TestConfig:
    def test_roundtrip(self):
        cfg = PipelineConfig(variance_target=0.9, knn_k=5, threshold=0.4,
                             per_class=12, seed=3, stride=0.01, tolerance=0.03)
        back = PipelineConfig.from_dict(json.loads(json.dumps(cfg.to_dict())))
        assert back == cfg

    def test_none_spelling_normalized(self):
        assert PipelineConfig(variance_target="none").variance_target is None

    def test_unknown_version_rejected(self):
        d = PipelineConfig().to_dict()
        d["version"] = 99
        with pytest.raises(ValueError, match="unsupported config version 99"):
            PipelineConfig.from_dict(d)

    @pytest.mark.parametrize("kwargs", [
        {"variance_target": 1.5},
        {"knn_k": 0},
        {"threshold": 2.0},
        {"per_class": 0},
        {"stride": -0.01},
        {"tolerance": -1.0},
    ])
    def test_validation(self, kwargs):
        with pytest.raises(ValueError):
            PipelineConfig(**kwargs)


class TestLoadModel:
    def test_dim_consistency_enforced(self, trained, tmp_path):
        model, _ = trained
        save_model(model, tmp_path)
        k = model.pca.n_components
        np.save(tmp_path / "pca_components.npy", np.eye(12)[: k - 1])
        meta = json.loads((tmp_path / "pca.json").read_text())
        meta["n_components"] = k - 1
        meta["explained_ratio"] = meta["explained_ratio"][: k - 1]
        (tmp_path / "pca.json").write_text(json.dumps(meta))
        with pytest.raises(ValueError, match="does not match"):
            load_model(tmp_path)

    def test_report_written_next_to_model(self, trained, tmp_path):
        model, report = trained
        save_model(model, tmp_path, report=report)
        on_disk = json.loads((tmp_path / "report.json").read_text())
        assert on_disk["n_utterances"] == 8
        assert (tmp_path / "config.json").is_file()
