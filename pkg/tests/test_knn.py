import numpy as np
import pytest

from phonalign.corpus.types import PhoneInventory
from phonalign.knn import (
    KnnClassifier,
    Posteriorgram,
    fit_knn,
    load_knn,
    predict_posteriorgram,
    save_knn,
)
from phonalign.labeling import LabeledFrameDataset


def _inventory(n):
    return PhoneInventory([f"c{i}" for i in range(n)])


def naive_posteriors(train_X, train_y, k, n_classes, Q):
    """Reference implementation: full distance list per query, stable sort
    by (distance, training index), uniform votes over the first k."""
    out = np.zeros((len(Q), n_classes), dtype=np.float64)
    for t, q in enumerate(np.asarray(Q, dtype=np.float64)):
        d = [float(np.sum((np.asarray(train_X[i], dtype=np.float64) - q) ** 2))
             for i in range(len(train_X))]
        order = sorted(range(len(train_X)), key=lambda i: (d[i], i))
        for i in order[:k]:
            out[t, train_y[i]] += 1.0
    return out / k


class TestOracleEquivalence:
    def test_random_instances_bitwise(self):
        rng = np.random.default_rng(2024)
        for trial in range(60):
            m = int(np.exp(rng.uniform(np.log(1), np.log(400))))
            k = int(rng.integers(1, m + 1))
            dim = int(rng.integers(1, 17))
            n_classes = int(rng.integers(1, 9))
            t = int(rng.integers(1, 8))
            train_X = rng.standard_normal((m, dim)) * rng.uniform(0.5, 4.0)
            train_y = rng.integers(0, n_classes, size=m)
            Q = rng.standard_normal((t, dim)) * rng.uniform(0.5, 4.0)

            clf = KnnClassifier(train_X, train_y, k, _inventory(n_classes))
            got = predict_posteriorgram(clf, Q).probs
            want = naive_posteriors(train_X, train_y, k, n_classes, Q)
            assert np.array_equal(got, want), f"trial {trial}"

    def test_quantized_ties_bitwise(self):
        # coordinates on a coarse grid force many exactly-equal distances
        rng = np.random.default_rng(99)
        for trial in range(20):
            m = int(rng.integers(5, 60))
            k = int(rng.integers(1, m + 1))
            dim = int(rng.integers(1, 4))
            n_classes = int(rng.integers(2, 5))
            train_X = rng.integers(0, 3, size=(m, dim)) * 0.5
            train_y = rng.integers(0, n_classes, size=m)
            Q = rng.integers(0, 3, size=(6, dim)) * 0.5

            clf = KnnClassifier(train_X, train_y, k, _inventory(n_classes))
            got = predict_posteriorgram(clf, Q).probs
            want = naive_posteriors(train_X, train_y, k, n_classes, Q)
            assert np.array_equal(got, want), f"trial {trial}"

    def test_blocked_path_matches_oracle(self):
        # enough rows times dim to span several processing blocks
        rng = np.random.default_rng(5)
        m, dim, t = 1500, 40, 120
        train_X = rng.standard_normal((m, dim))
        train_y = rng.integers(0, 6, size=m)
        Q = rng.standard_normal((t, dim))
        clf = KnnClassifier(train_X, train_y, 10, _inventory(6))
        got = predict_posteriorgram(clf, Q).probs
        want = naive_posteriors(train_X, train_y, 10, 6, Q)
        assert np.array_equal(got, want)


class TestHandCases:
    def test_single_class_posterior_is_one(self):
        rng = np.random.default_rng(1)
        clf = KnnClassifier(rng.standard_normal((8, 3)), np.zeros(8, dtype=int),
                            4, _inventory(1))
        pg = predict_posteriorgram(clf, rng.standard_normal((5, 3)))
        assert np.all(pg.probs == 1.0)

    def test_query_equal_to_training_row(self):
        train = np.array([[0.0, 0.0], [10.0, 0.0], [0.0, 10.0]])
        clf = KnnClassifier(train, [0, 1, 2], 1, _inventory(3))
        pg = predict_posteriorgram(clf, np.array([[10.0, 0.0]]))
        assert pg.probs[0].tolist() == [0.0, 1.0, 0.0]

    def test_exact_tie_prefers_lower_training_index(self):
        train = np.array([[0.0], [2.0]])
        clf = KnnClassifier(train, [0, 1], 1, _inventory(2))
        pg = predict_posteriorgram(clf, np.array([[1.0]]))  # both at distance 1
        assert pg.probs[0].tolist() == [1.0, 0.0]

    def test_duplicate_training_rows_count_separately(self):
        train = np.array([[0.0], [0.0], [5.0]])
        clf = KnnClassifier(train, [0, 1, 1], 2, _inventory(2))
        pg = predict_posteriorgram(clf, np.array([[0.1]]))
        assert pg.probs[0].tolist() == [0.5, 0.5]

    def test_vote_fractions_are_multiples_of_one_over_k(self):
        rng = np.random.default_rng(2)
        clf = KnnClassifier(rng.standard_normal((30, 4)),
                            rng.integers(0, 3, size=30), 7, _inventory(3))
        pg = predict_posteriorgram(clf, rng.standard_normal((9, 4)))
        votes = pg.probs * 7
        assert np.array_equal(votes, np.round(votes))
        assert np.allclose(pg.probs.sum(axis=1), 1.0)

    def test_permutation_invariance_without_ties(self):
        rng = np.random.default_rng(3)
        train_X = rng.standard_normal((40, 5))
        train_y = rng.integers(0, 4, size=40)
        Q = rng.standard_normal((6, 5))
        perm = rng.permutation(40)
        a = predict_posteriorgram(
            KnnClassifier(train_X, train_y, 5, _inventory(4)), Q).probs
        b = predict_posteriorgram(
            KnnClassifier(train_X[perm], train_y[perm], 5, _inventory(4)), Q).probs
        assert np.array_equal(a, b)

    def test_empty_query(self):
        rng = np.random.default_rng(4)
        clf = KnnClassifier(rng.standard_normal((5, 2)), [0] * 5, 2, _inventory(1))
        pg = predict_posteriorgram(clf, np.empty((0, 2)))
        assert pg.frames == 0

    def test_timing_metadata_passed_through(self):
        clf = KnnClassifier(np.zeros((2, 1)) + [[0.0], [1.0]], [0, 1], 1, _inventory(2))
        pg = predict_posteriorgram(clf, np.array([[0.0]]), stride=0.01,
                                   offset=0.5, utterance_id="u9")
        assert (pg.stride, pg.offset, pg.utterance_id) == (0.01, 0.5, "u9")


class TestValidation:
    def test_k_bounds(self):
        with pytest.raises(ValueError, match=r"k must be in \[1, 3\]"):
            KnnClassifier(np.zeros((3, 2)), [0, 0, 0], 4, _inventory(1))
        with pytest.raises(ValueError, match="k must be in"):
            KnnClassifier(np.zeros((3, 2)), [0, 0, 0], 0, _inventory(1))

    def test_fit_knn_k_exceeds_dataset(self):
        ds = LabeledFrameDataset(np.zeros((4, 2)), [0] * 4, _inventory(1))
        with pytest.raises(ValueError, match="k=10 exceeds 4 training frames"):
            fit_knn(ds, k=10)

    def test_fit_knn_defaults(self):
        rng = np.random.default_rng(6)
        ds = LabeledFrameDataset(rng.standard_normal((25, 3)),
                                 rng.integers(0, 2, size=25), _inventory(2))
        clf = fit_knn(ds)
        assert clf.k == 10 and clf.n_train == 25 and clf.dim == 3

    def test_label_length_mismatch(self):
        with pytest.raises(ValueError, match="train_y length"):
            KnnClassifier(np.zeros((3, 2)), [0, 0], 1, _inventory(1))

    def test_non_finite_training_data(self):
        X = np.zeros((3, 2))
        X[1, 0] = np.nan
        with pytest.raises(ValueError, match="non-finite"):
            KnnClassifier(X, [0, 0, 0], 1, _inventory(1))

    def test_query_dim_mismatch(self):
        clf = KnnClassifier(np.zeros((3, 2)), [0, 0, 0], 1, _inventory(1))
        with pytest.raises(ValueError, match=r"expected shape \(T, 2\)"):
            predict_posteriorgram(clf, np.zeros((2, 5)))

    def test_posteriorgram_row_sum_checked(self):
        with pytest.raises(ValueError, match="sum to 1"):
            Posteriorgram(np.array([[0.5, 0.1]]), _inventory(2))

    def test_posteriorgram_range_checked(self):
        with pytest.raises(ValueError, match=r"\[0, 1\]"):
            Posteriorgram(np.array([[1.5, -0.5]]), _inventory(2))

    def test_posteriorgram_class_count_checked(self):
        with pytest.raises(ValueError, match="columns for"):
            Posteriorgram(np.array([[0.5, 0.5]]), _inventory(3))


class TestSaveLoad:
    def test_roundtrip_predictions_identical(self, tmp_path):
        rng = np.random.default_rng(7)
        clf = KnnClassifier(rng.standard_normal((30, 4)),
                            rng.integers(0, 3, size=30), 5, _inventory(3))
        save_knn(clf, tmp_path)
        back = load_knn(tmp_path)
        assert back.k == 5
        assert np.array_equal(back.train_X, clf.train_X)
        assert np.array_equal(back.train_y, clf.train_y)
        assert back.inventory == clf.inventory
        Q = rng.standard_normal((8, 4))
        assert np.array_equal(
            predict_posteriorgram(back, Q).probs,
            predict_posteriorgram(clf, Q).probs,
        )

    def test_unknown_version_rejected(self, tmp_path):
        import json

        clf = KnnClassifier(np.zeros((2, 1)) + [[0.0], [1.0]], [0, 1], 1, _inventory(2))
        save_knn(clf, tmp_path)
        meta = json.loads((tmp_path / "knn.json").read_text())
        meta["version"] = 9
        (tmp_path / "knn.json").write_text(json.dumps(meta))
        with pytest.raises(ValueError, match="unsupported model version 9"):
            load_knn(tmp_path)

    def test_shape_disagreement_rejected(self, tmp_path):
        clf = KnnClassifier(np.zeros((2, 1)) + [[0.0], [1.0]], [0, 1], 1, _inventory(2))
        save_knn(clf, tmp_path)
        np.save(tmp_path / "knn_X.npy", np.zeros((5, 1)))
        with pytest.raises(ValueError, match="knn.json says"):
            load_knn(tmp_path)
