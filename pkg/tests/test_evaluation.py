import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from tsalign import (
    AlignedTuple,
    Alignment,
    ConfigError,
    GroundTruth,
    SeriesTable,
    StructuralError,
    generate_synthetic,
    inject_mcar,
    score,
)
from tsalign.consistency import ConsistencyReport


def make_alignment(tuples, total_weight=0.0, delta=0.0):
    report = ConsistencyReport(np.zeros(0), np.zeros(0), delta, np.zeros((0, 0)), (), True)
    return Alignment(tuple(sorted(tuples)), total_weight, report, "test")


class TestScore:
    def test_perfect_alignment(self):
        table, truth = generate_synthetic(6, 3, 0.5, seed=0)
        alignment = make_alignment([AlignedTuple((i, i, i)) for i in range(6)])
        report = score(alignment, truth)
        assert report.precision == 1.0
        assert report.recall == 1.0
        assert report.f1 == 1.0
        assert report.aligned_tuple_count == 6

    def test_empty_alignment_scores_zero(self):
        _, truth = generate_synthetic(4, 2, 0.5, seed=1)
        report = score(make_alignment([]), truth)
        assert (report.precision, report.recall, report.f1) == (0.0, 0.0, 0.0)

    def test_half_right(self):
        # truth has 4 pairs; recover 2 of them plus 2 wrong ones
        _, truth = generate_synthetic(4, 2, 0.5, seed=2)
        alignment = make_alignment([
            AlignedTuple((0, 0)), AlignedTuple((1, 1)),   # correct
            AlignedTuple((2, 3)), AlignedTuple((3, 2)),   # wrong
        ])
        report = score(alignment, truth)
        assert report.precision == pytest.approx(0.5)
        assert report.recall == pytest.approx(0.5)
        assert report.f1 == pytest.approx(0.5)

    def test_tuple_order_irrelevant(self):
        _, truth = generate_synthetic(5, 2, 0.5, seed=3)
        tuples = [AlignedTuple((i, i)) for i in range(5)]
        a = score(make_alignment(tuples), truth)
        b = score(make_alignment(list(reversed(tuples))), truth)
        assert (a.precision, a.recall, a.f1) == (b.precision, b.recall, b.f1)

    def test_mismatched_table_rejected(self):
        _, truth = generate_synthetic(4, 2, 0.5, seed=4)
        with pytest.raises(StructuralError):
            score(make_alignment([AlignedTuple((0, 0, 0))]), truth)
        with pytest.raises(StructuralError):
            score(make_alignment([AlignedTuple((0, 9))]), truth)

    def test_f1_recomputation_identity(self):
        _, truth = generate_synthetic(6, 2, 0.5, seed=5)
        alignment = make_alignment([AlignedTuple((0, 0)), AlignedTuple((1, 2)),
                                    AlignedTuple((3, 3))])
        r = score(alignment, truth)
        assert 0 <= r.precision <= 1 and 0 <= r.recall <= 1 and 0 <= r.f1 <= 1
        if r.precision + r.recall > 0:
            assert r.f1 == pytest.approx(
                2 * r.precision * r.recall / (r.precision + r.recall))


class TestInjectMcar:
    def test_rate_zero_is_identity(self):
        table, _ = generate_synthetic(20, 3, 1.0, seed=6)
        out = inject_mcar(table, 0.0, seed=1)
        assert np.array_equal(out.values, table.values, equal_nan=True)
        assert np.array_equal(out.timestamps, table.timestamps, equal_nan=True)

    def test_rate_one_masks_all_targeted(self):
        table, _ = generate_synthetic(10, 2, 1.0, seed=7)
        out = inject_mcar(table, 1.0, seed=1, target="values")
        assert np.all(np.isnan(out.values))
        assert not np.any(np.isnan(out.timestamps))

    def test_binomial_concentration(self):
        table, _ = generate_synthetic(2500, 4, 1.0, seed=8)  # 10000 value cells
        out = inject_mcar(table, 0.2, seed=3, target="values")
        frac = np.isnan(out.values).mean()
        assert 0.18 <= frac <= 0.22

    def test_same_seed_same_mask(self):
        table, _ = generate_synthetic(50, 3, 1.0, seed=9)
        a = inject_mcar(table, 0.4, seed=5, target="both")
        b = inject_mcar(table, 0.4, seed=5, target="both")
        assert np.array_equal(a.values, b.values, equal_nan=True)
        assert np.array_equal(a.timestamps, b.timestamps, equal_nan=True)

    def test_original_untouched(self):
        table, _ = generate_synthetic(30, 2, 1.0, seed=10)
        before = table.values.copy()
        inject_mcar(table, 0.9, seed=2)
        assert np.array_equal(table.values, before, equal_nan=True)

    def test_rejects_bad_rate_and_target(self):
        table, _ = generate_synthetic(5, 2, 1.0, seed=11)
        with pytest.raises(ConfigError):
            inject_mcar(table, 1.5, seed=0)
        with pytest.raises(ConfigError):
            inject_mcar(table, 0.5, seed=0, target="rows")

    @settings(max_examples=25, deadline=None)
    @given(st.floats(0.05, 0.95), st.integers(0, 10_000))
    def test_expected_present_fraction(self, rate, seed):
        table, _ = generate_synthetic(40, 3, 1.0, seed=12)
        out = inject_mcar(table, rate, seed=seed)
        frac = 1.0 - np.isnan(out.values).mean()
        assert abs(frac - (1.0 - rate)) < 0.35  # loose: 120 cells


class TestGenerateSynthetic:
    def test_zero_jitter_keeps_rows_simultaneous(self):
        table, _ = generate_synthetic(10, 3, 0.0, seed=13)
        from tsalign import determine_theta
        assert determine_theta(table) == 0.0

    def test_seeded_regeneration_identical(self):
        a, _ = generate_synthetic(30, 4, 2.0, seed=14)
        b, _ = generate_synthetic(30, 4, 2.0, seed=14)
        assert np.array_equal(a.timestamps, b.timestamps)
        assert np.array_equal(a.values, b.values)

    def test_jitter_recovered_by_theta_tuning(self):
        from tsalign import determine_theta
        jitter = 1.5
        table, _ = generate_synthetic(5000, 4, jitter, seed=15)
        theta = determine_theta(table, percentile=95)
        offsets = table.timestamps - 10.0 * np.arange(5000)[None, :]
        diffs = []
        for a in range(4):
            for b in range(a + 1, 4):
                diffs.extend(np.abs(offsets[a] - offsets[b]))
        empirical = np.quantile(diffs, 0.95, method="inverted_cdf")
        assert theta == pytest.approx(empirical)
        assert theta <= 2 * jitter

    def test_large_jitter_warns_but_stays_monotone(self):
        with pytest.warns(UserWarning):
            table, _ = generate_synthetic(50, 2, 6.0, seed=16, tick=10.0)
        for k in range(2):
            assert np.all(np.diff(table.timestamps[k]) > 0)

    def test_truth_covers_every_cell_once(self):
        table, truth = generate_synthetic(12, 3, 1.0, seed=17)
        seen = [cell for group in truth.groups for cell in group]
        assert len(seen) == len(set(seen)) == table.m * table.n

    @pytest.mark.parametrize("model", ["ar1", "sine", "walk"])
    def test_value_models(self, model):
        table, _ = generate_synthetic(25, 3, 1.0, value_model=model, seed=18)
        assert np.all(np.isfinite(table.values))

    def test_rejects_unknown_model_and_tiny_sizes(self):
        with pytest.raises(ConfigError):
            generate_synthetic(10, 2, 1.0, value_model="brown", seed=0)
        with pytest.raises(ConfigError):
            generate_synthetic(1, 2, 1.0, seed=0)
