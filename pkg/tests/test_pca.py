import numpy as np
import pytest

from phonalign.pca import (
    PcaModel,
    fit_pca,
    inverse_transform,
    load_pca,
    save_pca,
    transform,
)


def _spectrum_oracle(X):
    """Independent eigenvalue route: eigendecomposition of the scatter
    matrix, descending, as explained-variance ratios."""
    Xc = X - X.mean(axis=0)
    evals = np.linalg.eigvalsh(Xc.T @ Xc)[::-1]
    evals = np.clip(evals, 0.0, None)
    return evals / evals.sum()


class TestFitProperties:
    def test_random_matrices(self):
        rng = np.random.default_rng(1234)
        targets = [0.9, 0.95, 0.99, 1.0]
        for trial in range(30):
            n = int(rng.integers(20, 500))
            d = int(rng.integers(4, 129))
            X = rng.standard_normal((n, d)) * rng.uniform(0.1, 10.0)
            target = targets[trial % len(targets)]
            model = fit_pca(X, variance_target=target)

            # orthonormal rows
            gram = model.components @ model.components.T
            assert np.abs(gram - np.eye(model.n_components)).max() <= 1e-6

            # spectrum agrees with the eigendecomposition route
            oracle = _spectrum_oracle(X)
            k = model.n_components
            np.testing.assert_allclose(
                model.explained_ratio, oracle[:k], rtol=0, atol=1e-5
            )

            # K is the smallest count reaching the target
            cum = np.cumsum(oracle)
            assert cum[k - 1] >= target - 1e-9
            if k > 1:
                assert cum[k - 2] < target + 1e-9

            # projection never grows total variance
            Z = transform(model, X)
            Xc = X - X.mean(axis=0)
            assert np.sum(Z * Z) <= np.sum(Xc * Xc) * (1 + 1e-9)

            # sign convention: largest-|entry| coordinate is non-negative
            for row in model.components:
                assert row[np.argmax(np.abs(row))] >= 0

    def test_full_variance_reconstructs(self):
        rng = np.random.default_rng(7)
        X = rng.standard_normal((200, 16)) * 3.0
        model = fit_pca(X, variance_target=1.0)
        assert model.n_components == 16
        back = inverse_transform(model, transform(model, X))
        scale = np.abs(X).max()
        assert np.abs(back - X).max() <= 1e-4 * scale

    def test_rank_deficient_data_reconstructs_with_fewer_components(self):
        rng = np.random.default_rng(8)
        basis = rng.standard_normal((3, 10))
        X = rng.standard_normal((100, 3)) @ basis
        model = fit_pca(X, variance_target=1.0)
        assert model.n_components <= 4  # rank 3 plus float slack
        back = inverse_transform(model, transform(model, X))
        assert np.abs(back - X).max() <= 1e-6 * np.abs(X).max()


class TestHandCases:
    def test_rank_one_line(self):
        t = np.linspace(-2.0, 2.0, 50)[:, None]
        X = t * np.array([[1.0, 1.0]])
        model = fit_pca(X, variance_target=0.9)
        assert model.n_components == 1
        np.testing.assert_allclose(
            model.components[0], [np.sqrt(0.5), np.sqrt(0.5)], atol=1e-12
        )
        assert model.explained_ratio[0] == pytest.approx(1.0, abs=1e-12)

    def test_sign_convention_flips_negative_leaders(self):
        t = np.linspace(-1.0, 1.0, 30)[:, None]
        # dominant direction (-3, 1); the fitted component must be (3, -1)/|.|
        X = t * np.array([[-3.0, 1.0]])
        model = fit_pca(X, variance_target=0.9)
        lead = model.components[0]
        assert lead[np.argmax(np.abs(lead))] > 0
        np.testing.assert_allclose(np.abs(lead), np.array([3.0, 1.0]) / np.sqrt(10), atol=1e-12)

    def test_none_is_identity_after_centering(self):
        rng = np.random.default_rng(9)
        X = rng.standard_normal((40, 6)) + 5.0
        model = fit_pca(X, variance_target=None)
        assert model.n_components == 6
        assert model.variance_target is None
        assert np.array_equal(model.components, np.eye(6))
        assert np.array_equal(transform(model, X), X - model.mean)
        assert model.explained_ratio.sum() == pytest.approx(1.0, abs=1e-12)

    def test_none_string_alias(self):
        rng = np.random.default_rng(10)
        X = rng.standard_normal((10, 3))
        assert fit_pca(X, variance_target="none").variance_target is None

    def test_training_mean_maps_to_origin(self):
        rng = np.random.default_rng(11)
        X = rng.standard_normal((25, 4)) + 100.0
        model = fit_pca(X, variance_target=1.0)
        z = transform(model, model.mean[None, :])
        assert np.all(z == 0.0)

    def test_low_target_keeps_one_component(self):
        rng = np.random.default_rng(12)
        X = rng.standard_normal((100, 8))
        model = fit_pca(X, variance_target=1e-9)
        assert model.n_components == 1


class TestFitErrors:
    def test_degenerate_data(self):
        X = np.full((10, 4), 3.25)
        with pytest.raises(ValueError, match="degenerate data"):
            fit_pca(X)

    def test_too_few_samples(self):
        with pytest.raises(ValueError, match="at least 2 samples"):
            fit_pca(np.zeros((1, 4)))

    def test_non_finite(self):
        X = np.zeros((5, 3))
        X[2, 1] = np.inf
        with pytest.raises(ValueError, match="non-finite"):
            fit_pca(X)

    @pytest.mark.parametrize("target", [0.0, -0.5, 1.2])
    def test_target_out_of_range(self, target):
        rng = np.random.default_rng(0)
        with pytest.raises(ValueError, match="variance target"):
            fit_pca(rng.standard_normal((10, 3)), variance_target=target)

    def test_transform_dim_mismatch(self):
        rng = np.random.default_rng(0)
        model = fit_pca(rng.standard_normal((10, 3)))
        with pytest.raises(ValueError, match="expected shape"):
            transform(model, np.zeros((4, 7)))

    def test_components_must_be_orthonormal(self):
        with pytest.raises(ValueError, match="orthonormal"):
            PcaModel(
                mean=np.zeros(2),
                components=np.array([[1.0, 1.0], [0.0, 1.0]]),
                explained_ratio=np.array([0.6, 0.4]),
                variance_target=1.0,
            )


class TestSaveLoad:
    def test_roundtrip_is_element_identical(self, tmp_path):
        rng = np.random.default_rng(21)
        X = rng.standard_normal((60, 12))
        model = fit_pca(X, variance_target=0.95)
        save_pca(model, tmp_path, seed=42)
        back = load_pca(tmp_path)
        assert np.array_equal(back.mean, model.mean)
        assert np.array_equal(back.components, model.components)
        np.testing.assert_allclose(
            back.explained_ratio, model.explained_ratio, rtol=0, atol=0
        )
        assert back.variance_target == model.variance_target
        assert np.array_equal(transform(back, X), transform(model, X))

    def test_seed_recorded(self, tmp_path):
        import json

        rng = np.random.default_rng(22)
        save_pca(fit_pca(rng.standard_normal((10, 3))), tmp_path, seed=7)
        meta = json.loads((tmp_path / "pca.json").read_text())
        assert meta["seed"] == 7 and meta["version"] == 1

    def test_unknown_version_rejected(self, tmp_path):
        import json

        rng = np.random.default_rng(23)
        save_pca(fit_pca(rng.standard_normal((10, 3))), tmp_path)
        meta = json.loads((tmp_path / "pca.json").read_text())
        meta["version"] = 2
        (tmp_path / "pca.json").write_text(json.dumps(meta))
        with pytest.raises(ValueError, match="unsupported model version 2"):
            load_pca(tmp_path)

    def test_shape_disagreement_rejected(self, tmp_path):
        import json

        rng = np.random.default_rng(24)
        save_pca(fit_pca(rng.standard_normal((10, 4))), tmp_path)
        k = json.loads((tmp_path / "pca.json").read_text())["n_components"]
        # arrays internally consistent but wider than pca.json says
        np.save(tmp_path / "pca_mean.npy", np.zeros(9))
        np.save(tmp_path / "pca_components.npy", np.eye(9)[:k])
        with pytest.raises(ValueError, match="disagrees"):
            load_pca(tmp_path)
