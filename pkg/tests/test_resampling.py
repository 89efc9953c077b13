import numpy as np
import pytest

from cadre.datasets import Dataset
from cadre.resampling import (
    EmptyReplicate,
    ReplicateIndex,
    ResamplePlan,
    bootstrap_indices,
    jackknife_indices,
    materialize,
    plan_replicates,
)
from cadre.rng import substream


class TestBootstrapIndices:
    def test_single_row_always_selected(self):
        idx = bootstrap_indices(1, substream(0, "t"))
        assert list(idx) == [0]

    def test_length_and_range(self):
        idx = bootstrap_indices(500, substream(1, "t"))
        assert len(idx) == 500
        assert idx.min() >= 0 and idx.max() < 500

    def test_deterministic_for_fixed_stream(self):
        a = bootstrap_indices(100, substream(2, "t"))
        b = bootstrap_indices(100, substream(2, "t"))
        assert np.array_equal(a, b)

    def test_distinct_fraction_near_one_minus_inv_e(self):
        fractions = [len(set(bootstrap_indices(10_000, substream(s, "t")))) / 10_000
                     for s in range(20)]
        assert 0.612 <= np.mean(fractions) <= 0.652


class TestJackknifeIndices:
    def test_full_fraction_is_identity(self):
        idx = jackknife_indices(10, 1.0, substream(3, "t"))
        assert list(idx) == list(range(10))

    def test_ninety_percent_of_thousand_keeps_nine_hundred(self):
        idx = jackknife_indices(1000, 0.9, substream(4, "t"))
        assert len(idx) == 900
        assert len(set(idx)) == 900

    def test_rows_sorted_ascending(self):
        idx = jackknife_indices(50, 0.5, substream(5, "t"))
        assert list(idx) == sorted(idx)

    def test_size_rounds_half_up(self):
        assert len(jackknife_indices(10, 0.85, substream(0, "t"))) == 9  # 8.5 -> 9
        assert len(jackknife_indices(10, 0.84, substream(0, "t"))) == 8

    def test_zero_size_rejected(self):
        with pytest.raises(EmptyReplicate):
            jackknife_indices(10, 0.01, substream(6, "t"))

    def test_each_row_excluded_at_the_deletion_rate(self):
        n, reps = 10, 10_000
        excluded = np.zeros(n)
        for s in range(reps):
            kept = set(jackknife_indices(n, 0.9, substream(s, "x")))
            for i in range(n):
                if i not in kept:
                    excluded[i] += 1
        rates = excluded / reps
        assert np.all(np.abs(rates - 0.1) < 0.01)


class TestPlanAndMaterialize:
    def _data(self):
        values = np.arange(10.0).reshape(5, 2)
        return Dataset(values, ("a", "b"), "continuous")

    def test_plan_produces_m_replicates_deterministically(self):
        plan = ResamplePlan("bootstrap", replicates=7, seed=9)
        first = plan_replicates(plan, 50)
        second = plan_replicates(plan, 50)
        assert len(first) == 7
        for x, y in zip(first, second):
            assert x.replicate_id == y.replicate_id
            assert np.array_equal(x.rows, y.rows)

    def test_replicates_differ_from_each_other(self):
        plan = ResamplePlan("bootstrap", replicates=5, seed=9)
        rows = [tuple(r.rows) for r in plan_replicates(plan, 100)]
        assert len(set(rows)) == 5

    def test_replicate_order_does_not_change_content(self):
        plan = ResamplePlan("jackknife", replicates=6, seed=1)
        full = plan_replicates(plan, 40)
        assert [r.replicate_id for r in full] == list(range(6))

    def test_materialize_identity(self):
        d = self._data()
        out = materialize(d, ReplicateIndex(0, np.arange(5)))
        assert np.array_equal(out.values, d.values)

    def test_materialize_repeats(self):
        d = self._data()
        out = materialize(d, ReplicateIndex(0, np.array([0, 0])))
        assert np.array_equal(out.values, [[0, 1], [0, 1]])

    def test_materialize_keeps_requested_order(self):
        d = self._data()
        out = materialize(d, ReplicateIndex(0, np.array([4, 1, 1])))
        assert np.array_equal(out.values[:, 0], [8, 2, 2])

    def test_materialize_rejects_out_of_range(self):
        with pytest.raises(Exception):
            materialize(self._data(), ReplicateIndex(0, np.array([9])))

    def test_invalid_plan_rejected(self):
        with pytest.raises(ValueError):
            ResamplePlan("bootstrap", replicates=0)
        with pytest.raises(ValueError):
            ResamplePlan("jackknife", jackknife_fraction=1.5)
        with pytest.raises(ValueError):
            ResamplePlan("subsample")
