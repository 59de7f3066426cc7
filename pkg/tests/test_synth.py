import numpy as np
import pytest

from tabrebal.errors import (
    EmptyTableError,
    SingleClassTableError,
    UnknownConditionValueError,
)
from tabrebal.resampling import required_upsample_count
from tabrebal.synth import (
    ArgnConfig,
    GenerationRequest,
    fit_discretizer,
    generate,
    hybrid_upsample,
    load_argn,
    save_argn,
    train,
)
from tabrebal.synth.argn import head_distribution, loss_and_grads, _init_params
from tabrebal.table import ColumnKind, Schema, from_columns


def cat_schema(*features, numeric=()):
    names = tuple(features) + tuple(numeric) + ("label",)
    kinds = (
        tuple(ColumnKind.CATEGORICAL for _ in features)
        + tuple(ColumnKind.NUMERIC for _ in numeric)
        + (ColumnKind.CATEGORICAL,)
    )
    return Schema(names=names, kinds=kinds, target="label", positive_label="yes")


NUM_SCHEMA = Schema(
    names=("x", "label"),
    kinds=(ColumnKind.NUMERIC, ColumnKind.CATEGORICAL),
    target="label",
    positive_label="yes",
)


def numeric_table(x, y):
    return from_columns(
        NUM_SCHEMA,
        {"x": np.asarray(x, dtype=float), "label": np.asarray(y, dtype=int)},
        {"label": ("no", "yes")},
    )


class TestDiscretizer:
    def test_few_distinct_values_get_singleton_bins(self):
        t = numeric_table([1.0, 2.0, 3.0, 2.0], [0, 1, 0, 1])
        disc = fit_discretizer(t, max_bins=32)
        bins = disc.numeric["x"]
        assert bins.mode == "distinct"
        assert bins.n_bins == 3
        codes = bins.encode(np.array([1.0, 2.0, 3.0]))
        assert codes.tolist() == [0, 1, 2]
        rng = np.random.default_rng(0)
        assert bins.decode(codes, rng).tolist() == [1.0, 2.0, 3.0]

    def test_uniform_sample_quantile_edges(self):
        rng = np.random.default_rng(5)
        x = rng.random(10_000)
        t = numeric_table(x, (np.arange(10_000) % 2).astype(int))
        disc = fit_discretizer(t, max_bins=10)
        bins = disc.numeric["x"]
        assert bins.mode == "quantile"
        interior = bins.edges[1:-1]
        assert interior.size == 9
        assert np.all(np.abs(interior - np.arange(0.1, 1.0, 0.1)) < 0.02)

    def test_constant_column_single_bin(self):
        t = numeric_table([4.0] * 6, [0, 1] * 3)
        bins = fit_discretizer(t).numeric["x"]
        assert bins.n_bins == 1
        assert bins.encode(np.array([4.0, 4.0])).tolist() == [0, 0]

    def test_encode_decode_same_bin(self):
        rng = np.random.default_rng(1)
        x = rng.normal(size=500)
        t = numeric_table(x, (np.arange(500) % 2).astype(int))
        bins = fit_discretizer(t, max_bins=8).numeric["x"]
        codes = bins.encode(x)
        decoded = bins.decode(codes, np.random.default_rng(2))
        assert np.array_equal(bins.encode(decoded), codes)
        assert decoded.min() >= x.min() and decoded.max() <= x.max()

    def test_edges_strictly_increasing(self):
        # heavy point mass forces duplicate quantiles that must collapse
        x = np.r_[np.zeros(900), np.linspace(1, 10, 100)]
        t = numeric_table(x, (np.arange(1000) % 2).astype(int))
        bins = fit_discretizer(t, max_bins=16).numeric["x"]
        assert np.all(np.diff(bins.edges) > 0)

    def test_empty_table(self):
        t = numeric_table([], [])
        with pytest.raises(EmptyTableError):
            fit_discretizer(t)

    def test_bad_max_bins(self):
        t = numeric_table([1.0, 2.0], [0, 1])
        with pytest.raises(ValueError):
            fit_discretizer(t, max_bins=1)


class TestGradients:
    def test_analytic_matches_central_differences(self):
        vocab = (4, 4, 4)
        d, h = 3, 5
        rng = np.random.default_rng(3)
        params = _init_params(vocab, d, h, rng)
        codes = rng.integers(0, 4, size=(6, 3)).astype(np.int32)
        _, grads = loss_and_grads(params, codes, vocab, d)
        eps = 1e-5
        for key, w in params.items():
            flat = w.ravel()
            num = np.zeros_like(flat)
            for i in range(flat.size):
                orig = flat[i]
                flat[i] = orig + eps
                lp, _ = loss_and_grads(params, codes, vocab, d)
                flat[i] = orig - eps
                lm, _ = loss_and_grads(params, codes, vocab, d)
                flat[i] = orig
                num[i] = (lp - lm) / (2 * eps)
            a = grads[key].ravel()
            rel = np.linalg.norm(a - num) / (
                np.linalg.norm(a) + np.linalg.norm(num) + 1e-12
            )
            assert rel <= 1e-4, f"gradient mismatch for {key}: {rel}"

    def test_head_outputs_are_distributions(self):
        vocab = (3, 5, 4)
        rng = np.random.default_rng(7)
        params = _init_params(vocab, 4, 6, rng)
        codes = rng.integers(0, 3, size=(50, 3)).astype(np.int32)
        for t in range(3):
            probs = head_distribution(params, codes[:, :t], t, 4)
            assert probs.shape == (50, vocab[t])
            assert probs.min() >= 0.0
            assert np.all(np.abs(probs.sum(axis=1) - 1.0) <= 1e-9)


def dependency_table(n=1000, seed=0):
    """B is a deterministic function of A; label independent of both."""
    rng = np.random.default_rng(seed)
    a = rng.integers(0, 4, size=n)
    b = (a * 2 + 1) % 5
    label = (np.arange(n) % 2).astype(int)
    schema = cat_schema("a", "b")
    return from_columns(
        schema,
        {"a": a, "b": b, "label": label},
        {
            "a": ("a0", "a1", "a2", "a3"),
            "b": ("b0", "b1", "b2", "b3", "b4"),
            "label": ("no", "yes"),
        },
    )


class TestTrain:
    def test_loss_non_increasing_overall(self):
        t = dependency_table()
        disc = fit_discretizer(t)
        model = train(t, disc, ArgnConfig(epochs=30, seed=1))
        assert model.epoch_losses[-1] <= model.epoch_losses[0] + 1e-6

    def test_deterministic(self):
        t = dependency_table()
        disc = fit_discretizer(t)
        cfg = ArgnConfig(epochs=10, seed=5)
        m1 = train(t, disc, cfg)
        m2 = train(t, disc, cfg)
        assert m1.epoch_losses == m2.epoch_losses
        for k in m1.params:
            assert np.array_equal(m1.params[k], m2.params[k])

    def test_single_class_rejected(self):
        t = numeric_table([1.0, 2.0, 3.0], [0, 0, 0])
        with pytest.raises(SingleClassTableError):
            train(t, fit_discretizer(t), ArgnConfig(epochs=1))

    def test_too_few_rows(self):
        t = numeric_table([1.0], [1])
        with pytest.raises(SingleClassTableError):
            train(t, fit_discretizer(t), ArgnConfig(epochs=1))

    def test_learns_deterministic_dependency(self):
        t = dependency_table()
        disc = fit_discretizer(t)
        model = train(t, disc, ArgnConfig(epochs=80, seed=2))
        out = generate(
            model,
            GenerationRequest(
                n_samples=2000,
                condition_column="label",
                condition_value="yes",
                seed=3,
            ),
        )
        a = out.column("a")
        b = out.column("b")
        ok = np.mean(b == (a * 2 + 1) % 5)
        assert ok >= 0.95

    def test_independent_marginals_tv(self):
        rng = np.random.default_rng(9)
        n = 2000
        schema = cat_schema("c1", "c2", numeric=("x",))
        c1 = rng.choice(3, size=n, p=[0.5, 0.3, 0.2])
        c2 = rng.choice(3, size=n, p=[0.7, 0.2, 0.1])
        x = rng.random(n)
        label = rng.integers(0, 2, size=n)
        t = from_columns(
            schema,
            {"c1": c1, "c2": c2, "x": x, "label": label},
            {
                "c1": ("u", "v", "w"),
                "c2": ("p", "q", "r"),
                "label": ("no", "yes"),
            },
        )
        disc = fit_discretizer(t, max_bins=8)
        model = train(t, disc, ArgnConfig(epochs=60, seed=4))
        out = generate(
            model,
            GenerationRequest(
                n_samples=10_000,
                condition_column="label",
                condition_value="yes",
                seed=5,
            ),
        )
        for col, k in (("c1", 3), ("c2", 3)):
            p = np.bincount(t.column(col), minlength=k) / n
            q = np.bincount(out.column(col), minlength=k) / out.n_rows
            assert 0.5 * np.abs(p - q).sum() <= 0.05
        # numeric marginal compared on discretizer codes
        bins = disc.numeric["x"]
        p = np.bincount(bins.encode(t.column("x")), minlength=bins.n_bins) / n
        q = (
            np.bincount(bins.encode(out.column("x")), minlength=bins.n_bins)
            / out.n_rows
        )
        assert 0.5 * np.abs(p - q).sum() <= 0.05


class TestGenerate:
    def trained(self, epochs=15):
        t = dependency_table()
        return t, train(t, fit_discretizer(t), ArgnConfig(epochs=epochs, seed=6))

    def test_conditioning_is_exact(self):
        _, model = self.trained()
        out = generate(
            model,
            GenerationRequest(
                n_samples=500, condition_column="label", condition_value="yes", seed=1
            ),
        )
        assert out.n_rows == 500
        assert np.all(out.y == 1)

    def test_zero_samples(self):
        t, model = self.trained(epochs=2)
        out = generate(
            model,
            GenerationRequest(
                n_samples=0, condition_column="label", condition_value="yes", seed=1
            ),
        )
        assert out.n_rows == 0
        assert out.schema == t.schema

    def test_codes_valid_and_numerics_in_range(self):
        rng = np.random.default_rng(2)
        x = rng.normal(size=400)
        t = numeric_table(x, rng.integers(0, 2, size=400))
        model = train(t, fit_discretizer(t, max_bins=8), ArgnConfig(epochs=10, seed=7))
        out = generate(
            model,
            GenerationRequest(
                n_samples=1000, condition_column="label", condition_value="yes", seed=8
            ),
        )
        gx = out.column("x")
        assert gx.min() >= x.min() and gx.max() <= x.max()

    def test_deterministic(self):
        _, model = self.trained(epochs=5)
        req = GenerationRequest(
            n_samples=50, condition_column="label", condition_value="yes", seed=11
        )
        assert generate(model, req) == generate(model, req)

    def test_unknown_condition_value(self):
        _, model = self.trained(epochs=2)
        with pytest.raises(UnknownConditionValueError):
            generate(
                model,
                GenerationRequest(
                    n_samples=5,
                    condition_column="label",
                    condition_value="maybe",
                    seed=0,
                ),
            )

    def test_condition_column_must_be_first(self):
        _, model = self.trained(epochs=2)
        with pytest.raises(ValueError):
            generate(
                model,
                GenerationRequest(
                    n_samples=5, condition_column="a", condition_value="a0", seed=0
                ),
            )

    def test_bad_temperature(self):
        with pytest.raises(ValueError):
            GenerationRequest(
                n_samples=1,
                condition_column="label",
                condition_value="yes",
                temperature=0.0,
            )


class TestHybridUpsample:
    def unbalanced(self, n_maj=300, n_min=6, seed=0):
        rng = np.random.default_rng(seed)
        n = n_maj + n_min
        y = np.r_[np.ones(n_min, dtype=int), np.zeros(n_maj, dtype=int)]
        x = np.where(y == 1, rng.normal(2.0, 0.3, n), rng.normal(0.0, 1.0, n))
        return numeric_table(x, y)

    def test_balanced_input_is_fixed_point(self):
        t = numeric_table([1.0, 2.0, 3.0, 4.0], [0, 1, 0, 1])
        assert hybrid_upsample(t, ArgnConfig(epochs=1)) == t

    def test_balances_and_keeps_originals(self):
        t = self.unbalanced()
        out = hybrid_upsample(t, ArgnConfig(epochs=8, seed=3))
        assert out.positive_count == out.negative_count
        assert out.n_rows == 600
        assert out.filter_rows(np.arange(t.n_rows)) == t

    def test_balance_arithmetic_at_scale(self):
        t = self.unbalanced(n_maj=19797, n_min=19, seed=1)
        assert required_upsample_count(t) == 19778
        out = hybrid_upsample(t, ArgnConfig(epochs=1, batch_size=4096, seed=2))
        assert out.n_rows == 39594
        assert out.positive_count == 19797

    def test_single_class_rejected(self):
        t = numeric_table([1.0, 2.0], [0, 0])
        with pytest.raises(SingleClassTableError):
            hybrid_upsample(t, ArgnConfig(epochs=1))

    def test_generation_widens_category_support(self):
        # minority rows only ever show 3 of the 8 education values; the
        # trained sampler should populate more than those 3
        rng = np.random.default_rng(12)
        n_maj, n_min = 600, 12
        schema = cat_schema("edu")
        maj_edu = rng.integers(0, 8, size=n_maj)
        min_edu = rng.choice([0, 1, 2], size=n_min)
        t = from_columns(
            schema,
            {
                "edu": np.r_[min_edu, maj_edu],
                "label": np.r_[np.ones(n_min, int), np.zeros(n_maj, int)],
            },
            {
                "edu": tuple(f"e{i}" for i in range(8)),
                "label": ("no", "yes"),
            },
        )
        out = hybrid_upsample(t, ArgnConfig(epochs=25, seed=9))
        new_edu = out.column("edu")[t.n_rows :]
        assert len(set(new_edu.tolist())) > 3


class TestPersistence:
    def test_round_trip(self, tmp_path):
        t = dependency_table(n=400)
        model = train(t, fit_discretizer(t), ArgnConfig(epochs=5, seed=13))
        path = str(tmp_path / "argn.npz")
        save_argn(model, path)
        loaded = load_argn(path)
        req = GenerationRequest(
            n_samples=64, condition_column="label", condition_value="yes", seed=14
        )
        assert generate(loaded, req) == generate(model, req)
        assert loaded.column_order == model.column_order
        assert loaded.vocab_sizes == model.vocab_sizes
        assert loaded.epoch_losses == pytest.approx(model.epoch_losses)
