import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from cadre.ensemble import forecast_table, tally_votes
from cadre.evaluation import (
    ForecastOutcomeSet,
    brier_score,
    calibration_curve,
    murphy_decomposition,
    outcomes_from_truth,
    write_calibration_csv,
)
from cadre.graphs import Dag, Pdag, dag_to_cpdag

from oracles import calibration_oracle, murphy_oracle


def _records(forecasts, outcomes):
    return ForecastOutcomeSet(np.asarray(forecasts, dtype=np.float64),
                              np.asarray(outcomes, dtype=np.float64))


forecast_sets = st.lists(
    st.tuples(st.integers(0, 20).map(lambda k: k / 20),
              st.integers(0, 1)),
    min_size=1, max_size=80,
).map(lambda rows: _records([f for f, _ in rows], [o for _, o in rows]))


class TestOutcomesFromTruth:
    def test_true_relation_entries_get_outcome_one(self):
        truth = Pdag.from_edges(2, undirected={(0, 1)}, labels=("A", "B"))
        table = forecast_table(tally_votes(
            [truth] * 4 + [Pdag.from_edges(2, directed={(0, 1)}, labels=("A", "B"))]))
        records = outcomes_from_truth(table, truth)
        # Entry order per pair follows the relation enum; undirected is last.
        assert records.forecasts[3] == 0.8
        assert records.outcomes[3] == 1.0
        assert records.forecasts[1] == 0.2
        assert records.outcomes[1] == 0.0

    def test_three_node_truth_yields_twelve_records_three_positive(self):
        truth = Dag.from_edges(3, {(0, 2), (1, 2)})
        table = forecast_table(tally_votes([dag_to_cpdag(truth)]))
        records = outcomes_from_truth(table, truth)
        assert records.n == 12
        assert records.outcomes.sum() == 3

    def test_positive_only_drops_absent_cells(self):
        truth = Dag.from_edges(3, {(0, 2), (1, 2)})
        table = forecast_table(tally_votes([dag_to_cpdag(truth)]))
        records = outcomes_from_truth(table, truth, positive_only=True)
        assert records.n == 9

    def test_dag_mode_penalizes_undirected_estimates_of_reversible_edges(self):
        truth = Dag.from_edges(2, {(0, 1)})
        table = forecast_table(tally_votes([dag_to_cpdag(truth)]))  # undirected
        cpdag_mode = outcomes_from_truth(table, truth, compare="cpdag")
        dag_mode = outcomes_from_truth(table, truth, compare="dag")
        assert brier_score(cpdag_mode) == 0.0
        assert brier_score(dag_mode) > 0.0


class TestBrierScore:
    def test_perfect_forecasts_score_zero(self):
        assert brier_score(_records([1, 0, 1], [1, 0, 1])) == 0.0

    def test_constant_half_with_half_positives(self):
        assert brier_score(_records([0.5] * 4, [1, 1, 0, 0])) == 0.25

    def test_maximally_wrong_scores_one(self):
        assert brier_score(_records([1, 1], [0, 0])) == 1.0


class TestMurphyDecomposition:
    def test_perfect_forecasts_have_zero_reliability(self):
        d = murphy_decomposition(_records([1, 0, 1, 0], [1, 0, 1, 0]))
        assert d.reliability == 0.0

    def test_single_group_correction_is_closed_form(self):
        d = murphy_decomposition(_records([0.5] * 4, [1, 1, 0, 0]))
        assert d.reliability == 0.0
        assert d.reliability_corrected == pytest.approx(-1 / 12, abs=1e-15)

    def test_two_group_fixture_matches_direct_summation(self):
        f = [0.2] * 4 + [0.9] * 4
        o = [0, 0, 1, 0, 1, 1, 1, 0]
        d = murphy_decomposition(_records(f, o))
        want = murphy_oracle(f, o)
        for key, val in want.items():
            assert getattr(d, key) == pytest.approx(val, abs=1e-12)

    def test_singleton_group_contributes_zero_correction(self):
        d = murphy_decomposition(_records([0.3], [1]))
        assert d.reliability_corrected == d.reliability

    @given(forecast_sets)
    @settings(max_examples=300, deadline=None)
    def test_identity_and_correction_bound(self, records):
        d = murphy_decomposition(records)
        assert d.brier == pytest.approx(
            d.reliability - d.resolution + d.uncertainty, abs=1e-12)
        assert d.reliability_corrected <= d.reliability + 1e-15
        assert d.reliability >= 0.0
        assert 0.0 <= d.uncertainty <= 0.25

    @given(forecast_sets, st.randoms())
    @settings(max_examples=60, deadline=None)
    def test_permutation_invariance(self, records, rnd):
        order = list(range(records.n))
        rnd.shuffle(order)
        shuffled = _records(records.forecasts[order], records.outcomes[order])
        a = murphy_decomposition(records)
        b = murphy_decomposition(shuffled)
        assert a.brier == pytest.approx(b.brier, abs=1e-15)
        assert a.reliability == pytest.approx(b.reliability, abs=1e-12)

    def test_merging_groups_with_equal_frequency_keeps_reliability(self):
        # Two groups, both with observed frequency 1/2; reliability depends
        # on each group's own (f_k - 1/2)^2, so replacing both forecasts by
        # one shared value with the same pooled frequency keeps the
        # reliability formula's value computable by hand.
        separate = murphy_decomposition(
            _records([0.4, 0.4, 0.6, 0.6], [0, 1, 0, 1]))
        merged = murphy_decomposition(
            _records([0.5, 0.5, 0.5, 0.5], [0, 1, 0, 1]))
        assert separate.reliability == pytest.approx(0.01, abs=1e-15)
        assert merged.reliability == 0.0
        assert separate.resolution == merged.resolution == 0.0


class TestCalibrationCurve:
    def test_indicator_forecasts_fill_terminal_bins(self):
        records = _records([0, 0, 1, 1, 1], [0, 0, 1, 1, 1])
        curve = calibration_curve(records, 10)
        assert curve.count[0] == 2 and curve.count[9] == 3
        assert curve.count[1:9].sum() == 0
        assert curve.mean_forecast[0] == curve.observed_frequency[0] == 0.0
        assert curve.mean_forecast[9] == curve.observed_frequency[9] == 1.0

    def test_constant_forecast_lands_in_single_bin(self):
        records = _records([0.55] * 8, [1, 0, 1, 0, 1, 0, 1, 0])
        curve = calibration_curve(records, 10)
        assert curve.count[5] == 8
        assert curve.count.sum() == 8

    def test_matches_direct_binning_oracle(self):
        rng = np.random.default_rng(0)
        f = np.round(rng.random(200), 3)
        o = (rng.random(200) < f).astype(float)
        curve = calibration_curve(_records(f, o), 7)
        want = calibration_oracle(f, o, 7)
        for k in range(7):
            mf, of, count = want[k]
            assert curve.count[k] == count
            if count:
                assert curve.mean_forecast[k] == pytest.approx(mf, abs=1e-12)
                assert curve.observed_frequency[k] == pytest.approx(of, abs=1e-12)
            else:
                assert np.isnan(curve.mean_forecast[k])

    def test_csv_empty_bins_have_blank_means(self):
        curve = calibration_curve(_records([0.05], [1]), 4)
        lines = write_calibration_csv(curve).strip().splitlines()
        assert lines[0] == "bin_low,bin_high,mean_forecast,observed_frequency,count"
        assert lines[2].endswith(",,,0")


class TestForecastOutcomeSet:
    def test_rejects_out_of_range_forecasts(self):
        with pytest.raises(ValueError):
            _records([1.2], [1])

    def test_rejects_non_binary_outcomes(self):
        with pytest.raises(ValueError):
            _records([0.5], [0.5])

    def test_rejects_empty(self):
        with pytest.raises(ValueError):
            _records([], [])

    def test_concatenate_pools_records(self):
        a = _records([0.1, 0.9], [0, 1])
        b = _records([0.5], [1])
        pooled = ForecastOutcomeSet.concatenate([a, b])
        assert pooled.n == 3
