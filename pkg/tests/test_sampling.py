"""Tests for row sampling and the KS-guided sample-size ladder."""
from __future__ import annotations

import numpy as np
import pytest

import tunescope.sampling as sampling
from tunescope.dataset import ParameterSchema, dataset_from_codes
from tunescope.sampling import (
    DEFAULT_LADDER,
    FULL_DATA_THRESHOLD,
    SampleReason,
    choose_sample_size,
    draw_sample,
    sample_diagnostics,
)
from tunescope.stats import ks_two_sample


def make_dataset(n: int, seed: int = 0):
    rng = np.random.default_rng(seed)
    codes = {"p": (np.arange(n) % 2).astype(np.int16)}
    target = rng.normal(50.0, 10.0, size=n)
    return dataset_from_codes((ParameterSchema("p", ("a", "b")),), codes, target, "t")


class TestDrawSample:
    @pytest.mark.parametrize("fraction", [0.0, -0.5, 1.5])
    def test_fraction_out_of_range_rejected(self, fraction):
        ds = make_dataset(100)
        with pytest.raises(ValueError, match=r"\(0, 1\]"):
            draw_sample(ds, fraction, seed=0)

    def test_fraction_one_selects_all_rows(self):
        ds = make_dataset(50)
        mask = draw_sample(ds, 1.0, seed=3)
        assert mask.dtype == bool
        assert mask.all()

    @pytest.mark.parametrize(
        "n, fraction, expected",
        [
            (101, 0.05, 5),   # round(5.05)
            (10, 0.25, 2),    # round(2.5) rounds half to even
            (14, 0.25, 4),    # round(3.5) rounds half to even
            (100, 0.5, 50),
        ],
    )
    def test_sample_size_is_rounded_fraction(self, n, fraction, expected):
        ds = make_dataset(n)
        mask = draw_sample(ds, fraction, seed=0)
        assert int(np.count_nonzero(mask)) == expected

    def test_deterministic_per_seed(self):
        ds = make_dataset(500)
        a = draw_sample(ds, 0.2, seed=7)
        b = draw_sample(ds, 0.2, seed=7)
        c = draw_sample(ds, 0.2, seed=8)
        assert np.array_equal(a, b)
        assert not np.array_equal(a, c)

    def test_mask_is_readonly(self):
        ds = make_dataset(100)
        mask = draw_sample(ds, 0.3, seed=0)
        with pytest.raises(ValueError):
            mask[0] = True

    def test_mask_shape_matches_dataset(self):
        ds = make_dataset(123)
        assert draw_sample(ds, 0.1, seed=0).shape == (123,)


class TestChooseSampleSize:
    def test_small_dataset_uses_full_data_without_ks(self, monkeypatch):
        ds = make_dataset(FULL_DATA_THRESHOLD - 1)
        calls = []
        real = sampling.ks_two_sample

        def spy(*args, **kwargs):
            calls.append(1)
            return real(*args, **kwargs)

        monkeypatch.setattr(sampling, "ks_two_sample", spy)
        plan = choose_sample_size(ds, seed=5)
        assert plan.reason is SampleReason.FULL_SMALL_DATASET
        assert plan.fraction == 1.0
        assert plan.ks is None
        assert plan.row_subset.all()
        assert plan.sampled_rows == ds.row_count
        assert calls == []

    def test_threshold_zero_takes_first_ladder_step(self):
        ds = make_dataset(FULL_DATA_THRESHOLD)
        plan = choose_sample_size(ds, threshold=0.0, seed=2)
        assert plan.reason is SampleReason.THRESHOLD_MET
        assert plan.fraction == DEFAULT_LADDER[0]
        assert plan.ks is not None

    def test_unreachable_threshold_exhausts_ladder(self):
        ds = make_dataset(FULL_DATA_THRESHOLD)
        plan = choose_sample_size(ds, threshold=1.1, seed=2)
        assert plan.reason is SampleReason.LADDER_EXHAUSTED
        assert plan.fraction == 1.0
        assert plan.row_subset.all()
        # Justified by comparing the full data against itself.
        assert plan.ks.statistic == 0.0
        assert plan.ks.p_value == 1.0

    def test_chosen_subset_matches_fresh_draw(self):
        ds = make_dataset(FULL_DATA_THRESHOLD + 500)
        plan = choose_sample_size(ds, seed=11)
        if plan.reason is SampleReason.THRESHOLD_MET:
            assert np.array_equal(plan.row_subset, draw_sample(ds, plan.fraction, 11))
            redo = ks_two_sample(ds.target[plan.row_subset], ds.target)
            assert redo.statistic == plan.ks.statistic
            assert redo.p_value == plan.ks.p_value
            assert plan.ks.p_value >= 0.5

    def test_on_unimodal_data_a_small_fraction_wins(self):
        # A well-behaved unimodal target should pass at an early rung.
        ds = make_dataset(40_000, seed=4)
        plan = choose_sample_size(ds, seed=0)
        assert plan.reason is SampleReason.THRESHOLD_MET
        assert plan.fraction in DEFAULT_LADDER
        assert plan.sampled_rows == round(plan.fraction * ds.row_count)

    def test_fraction_is_monotone_in_threshold(self):
        ds = make_dataset(FULL_DATA_THRESHOLD, seed=9)
        thresholds = [0.0, 0.25, 0.5, 0.9, 1.05]
        fractions = [choose_sample_size(ds, threshold=t, seed=3).fraction for t in thresholds]
        assert fractions == sorted(fractions)

    def test_single_step_full_ladder(self):
        ds = make_dataset(FULL_DATA_THRESHOLD)
        plan = choose_sample_size(ds, ladder=(1.0,), seed=0)
        assert plan.reason is SampleReason.THRESHOLD_MET
        assert plan.fraction == 1.0
        assert plan.ks.p_value == 1.0

    @pytest.mark.parametrize(
        "ladder, message",
        [
            ((), "must not be empty"),
            ((0.5, 0.2), "strictly increasing"),
            ((0.5, 0.5), "strictly increasing"),
            ((0.0, 0.5), r"\(0, 1\]"),
            ((0.5, 1.2), r"\(0, 1\]"),
        ],
    )
    def test_bad_ladders_rejected(self, ladder, message):
        ds = make_dataset(100)
        with pytest.raises(ValueError, match=message):
            choose_sample_size(ds, ladder=ladder)


class TestSampleDiagnostics:
    def test_one_entry_per_ladder_step_in_order(self):
        ds = make_dataset(FULL_DATA_THRESHOLD, seed=1)
        ladder = (0.1, 0.3, 0.5)
        diag = sample_diagnostics(ds, ladder=ladder, seed=6)
        assert [fraction for fraction, _ in diag] == list(ladder)

    def test_entries_match_independent_recomputation(self):
        ds = make_dataset(FULL_DATA_THRESHOLD, seed=1)
        for fraction, ks in sample_diagnostics(ds, ladder=(0.05, 0.2), seed=6):
            mask = draw_sample(ds, fraction, 6)
            redo = ks_two_sample(ds.target[mask], ds.target)
            assert ks.statistic == redo.statistic
            assert ks.p_value == redo.p_value

    def test_agrees_with_choose_sample_size(self):
        # The diagnostics table and the chooser draw identical samples, so
        # the chosen rung is exactly the first diagnostic row at/above 0.5.
        ds = make_dataset(30_000, seed=2)
        diag = sample_diagnostics(ds, seed=0)
        plan = choose_sample_size(ds, seed=0)
        passing = [f for f, ks in diag if ks.p_value >= 0.5]
        if passing:
            assert plan.fraction == passing[0]
            assert plan.reason is SampleReason.THRESHOLD_MET
        else:
            assert plan.reason is SampleReason.LADDER_EXHAUSTED

    def test_bad_ladder_rejected(self):
        ds = make_dataset(100)
        with pytest.raises(ValueError):
            sample_diagnostics(ds, ladder=())
