"""Rate summaries, age bins, breakdowns, rankings, crash-type comparisons."""

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from crashboard import analytics
from crashboard.analytics import (
    RateSummary,
    age_group_of,
    breakdown,
    rate_summary,
    road_category,
    road_table,
    top_crash_types,
    tribe_rankings,
)
from crashboard.filters import QueryFilter
from crashboard.records import SeverityGroup
from crashboard.synth import simple_spec

from conftest import (
    TRIBE_TABLE,
    build_synth_snapshot,
    crash,
    person,
    snapshot_from,
    square_boundary,
)
from oracles import breakdown_oracle, crash_type_oracle, rankings_oracle, rate_oracle


class TestRateSummary:
    def test_tribal_grand_total_rates(self):
        # printed Wisconsin 2017-2021 tribal totals
        rates = RateSummary(total=3396, kab=465, ka=108)
        assert rates.kab_rate == pytest.approx(13.7, abs=0.05)
        assert rates.ka_rate == pytest.approx(3.2, abs=0.05)

    def test_lco_rates_two_decimals(self):
        rates = RateSummary(total=202, kab=42, ka=18)
        assert rates.kab_rate == pytest.approx(20.79, abs=0.005)
        assert rates.ka_rate == pytest.approx(8.91, abs=0.005)

    def test_empty_subset_rates_undefined(self):
        rates = rate_summary([])
        assert rates.total == 0
        assert rates.kab_rate is None and rates.ka_rate is None

    def test_invariant_enforced(self):
        with pytest.raises(ValueError):
            RateSummary(total=5, kab=2, ka=3)
        with pytest.raises(ValueError):
            RateSummary(total=1, kab=2, ka=0)

    def test_counts_match_oracle_on_synthetic_snapshot(self):
        snapshot = build_synth_snapshot(simple_spec(seed=101, n_crashes=500))
        rates = rate_summary(snapshot.records)
        assert (rates.total, rates.kab, rates.ka) == rate_oracle(snapshot.records)

    def test_rate_identity(self):
        rates = RateSummary(total=7, kab=3, ka=1)
        assert abs(rates.kab_rate - 100 * 3 / 7) < 1e-12
        assert abs(rates.ka_rate - 100 * 1 / 7) < 1e-12


class TestAgeGroups:
    @pytest.mark.parametrize(
        "age,label",
        [(24, "15–24"), (0, "≤4"), (65, "65–74"), (4, "≤4"), (5, "5–14"),
         (44, "25–44"), (45, "45–64"), (64, "45–64"), (74, "65–74"),
         (75, "≥75"), (120, "≥75"), (None, "unknown")],
    )
    def test_bin_labels(self, age, label):
        assert age_group_of(age) == label

    def test_bins_partition_all_ages(self):
        labels = analytics.age_bin_labels()
        for age in range(0, 121):
            label = age_group_of(age)
            assert label in labels
        # every bin non-empty and boundaries do not overlap
        seen = [age_group_of(a) for a in range(0, 121)]
        for label in labels:
            assert label in seen

    def test_out_of_range_age_raises(self):
        with pytest.raises(ValueError):
            age_group_of(121)


class TestRoadCategory:
    @pytest.mark.parametrize(
        "road,area,expected",
        [
            ("STH", "rural", ("rural", "highway")),
            ("USH", "rural", ("rural", "highway")),
            ("IH", "urban", ("urban", "highway")),
            ("CTH", "urban", ("urban", "non_highway")),
            ("local", "rural", ("rural", "non_highway")),
            ("other", "urban", ("urban", "unknown")),
            ("unknown", "unknown", ("unknown", "unknown")),
        ],
    )
    def test_mapping(self, road, area, expected):
        assert road_category(crash("r1", road=road, area=area)) == expected


class TestBreakdown:
    def one_crash_snapshot(self):
        records = [crash("s1", persons=[person(injury="O", sex="female")])]
        return snapshot_from(records, [square_boundary("T1", "Tribe One", 0, 0)])

    def test_sex_single_female_driver(self):
        result = breakdown(self.one_crash_snapshot(), "sex")
        by_label = {row.label: row for row in result.rows}
        assert by_label["Female"].rates.total == 1
        assert by_label["Female"].share == pytest.approx(100.0)
        assert by_label["Male"].rates.total == 0

    def test_primary_person_prefers_driver(self):
        records = [
            crash(
                "p1",
                persons=[
                    person(injury="O", sex="male", role="passenger", age=10),
                    person(injury="O", sex="female", role="driver", age=40),
                ],
            )
        ]
        snapshot = snapshot_from(records, [])
        sex_rows = {r.label: r.rates.total for r in breakdown(snapshot, "sex").rows}
        assert sex_rows == {"Female": 1, "Male": 0, "Unknown": 0}
        age_rows = {r.label: r.rates.total for r in breakdown(snapshot, "age_group").rows}
        assert age_rows["25–44"] == 1 and age_rows["5–14"] == 0

    def test_any_attribution_counts_both(self):
        records = [
            crash(
                "p1",
                persons=[
                    person(injury="O", sex="male", role="driver"),
                    person(injury="O", sex="female", role="driver"),
                ],
            )
        ]
        snapshot = snapshot_from(records, [])
        rows = {r.label: r.rates.total for r in breakdown(snapshot, "sex", attribution="any").rows}
        assert rows["Female"] == 1 and rows["Male"] == 1

    def test_empty_scope(self):
        snapshot = snapshot_from([], [])
        result = breakdown(snapshot, "sex")
        assert result.grand_total.total == 0
        assert all(row.rates.kab_rate is None for row in result.rows)
        assert all(row.share is None for row in result.rows)

    @pytest.mark.parametrize("dimension", ["sex", "age_group", "road_category"])
    def test_partition_dimensions_sum_to_scope_total(self, dimension):
        snapshot = build_synth_snapshot(simple_spec(seed=77, n_crashes=400))
        for scope in ("statewide", "tribal"):
            result = breakdown(snapshot, dimension, scope=scope)
            assert sum(row.rates.total for row in result.rows) == result.grand_total.total

    @pytest.mark.parametrize("dimension", ["sex", "age_group", "key_factor", "road_category"])
    @pytest.mark.parametrize("scope", ["statewide", "tribal"])
    def test_matches_oracle_recount(self, dimension, scope):
        snapshot = build_synth_snapshot(simple_spec(seed=42, n_crashes=1000))
        subset = analytics.resolve_scope(snapshot, scope)
        expected = breakdown_oracle(subset, dimension)
        result = breakdown(snapshot, dimension, scope=scope)
        for row in result.rows:
            want_total, want_kab, want_ka = rate_oracle(expected.get(row.label, []))
            assert (row.rates.total, row.rates.kab, row.rates.ka) == (
                want_total, want_kab, want_ka,
            ), f"{scope}/{dimension}/{row.label}"

    def test_scope_consistency(self):
        snapshot = build_synth_snapshot(simple_spec(seed=5, n_crashes=300))
        tribal = breakdown(snapshot, "sex", scope="tribal")
        assert tribal.grand_total.total == snapshot.tribal_count
        statewide = breakdown(snapshot, "sex", scope="statewide")
        assert statewide.grand_total.total == snapshot.record_count

    def test_filter_monotonicity(self):
        snapshot = build_synth_snapshot(simple_spec(seed=9, n_crashes=400))
        base = breakdown(snapshot, "key_factor")
        filtered = breakdown(
            snapshot, "key_factor", filters=QueryFilter(severity_group=SeverityGroup.KAB)
        )
        for row_base, row_filtered in zip(base.rows, filtered.rows):
            assert row_filtered.rates.total <= row_base.rates.total
            assert row_filtered.rates.kab <= row_base.rates.kab
            assert row_filtered.rates.ka <= row_base.rates.ka


class TestRoadTable:
    def test_marginals_add_up(self):
        snapshot = build_synth_snapshot(simple_spec(seed=31, n_crashes=600))
        rows = dict(road_table(snapshot, scope="statewide"))
        total = rows["Total Crashes"].total
        known = rows["Highway"].total + rows["Non-highway"].total
        unknown = rows.get("Unknown road class")
        assert known + (unknown.total if unknown else 0) == total


class TestTribeRankings:
    def test_tribe_table_reproduced(self, tribe_table_snapshot):
        ranking = tribe_rankings(tribe_table_snapshot)
        assert len(ranking.rows) == 11
        by_name = {row.name: row for row in ranking.rows}
        for name, total, kab, kab_rate, ka, ka_rate, kab_rank, ka_rank in TRIBE_TABLE:
            row = by_name[name]
            assert row.rates.total == total
            assert (row.kab_rank, row.ka_rank) == (kab_rank, ka_rank), name
            assert row.rates.kab_rate == pytest.approx(kab_rate, abs=0.005)
            assert row.rates.ka_rate == pytest.approx(ka_rate, abs=0.005)

    def test_rows_listed_in_kab_rank_order(self, tribe_table_snapshot):
        ranking = tribe_rankings(tribe_table_snapshot)
        assert [row.kab_rank for row in ranking.rows] == list(range(1, 12))
        assert ranking.rows[0].name == "Menominee Indian Tribe"

    def test_single_tribe(self):
        records = [crash("x1", severity_persons=("B",), tribal_code="T1")]
        snapshot = snapshot_from(records, [square_boundary("T1", "Tribe One", 0, 0)])
        ranking = tribe_rankings(snapshot)
        assert len(ranking.rows) == 1
        assert (ranking.rows[0].kab_rank, ranking.rows[0].ka_rank) == (1, 1)

    def test_identical_rates_larger_total_ranks_first(self):
        # both rates tie exactly; 20-crash tribe outranks the 10-crash tribe
        records = []
        for tribe_id, total in (("SMALL", 10), ("BIG", 20)):
            for j in range(total):
                codes = ("A",) if j < total // 10 else (("B",) if j < total // 5 else ("O",))
                records.append(crash(f"{tribe_id}-{j}", severity_persons=codes, tribal_code=tribe_id))
        snapshot = snapshot_from(
            records,
            [square_boundary("SMALL", "Alpha", 0, 0), square_boundary("BIG", "Beta", 3, 0)],
        )
        ranking = tribe_rankings(snapshot)
        rows = {row.tribe_id: row for row in ranking.rows}
        assert rows["BIG"].rates.kab_rate == rows["SMALL"].rates.kab_rate
        assert rows["BIG"].rates.ka_rate == rows["SMALL"].rates.ka_rate
        assert rows["BIG"].kab_rank == 1 and rows["SMALL"].kab_rank == 2
        assert rows["BIG"].ka_rank == 1 and rows["SMALL"].ka_rank == 2

    def test_empty(self):
        snapshot = snapshot_from([], [])
        assert tribe_rankings(snapshot).rows == ()

    def test_rank_bijection_and_order_invariance(self):
        snapshot = build_synth_snapshot(simple_spec(seed=13, n_crashes=800, tribal_fraction=0.5))
        ranking = tribe_rankings(snapshot)
        n = len(ranking.rows)
        assert sorted(row.kab_rank for row in ranking.rows) == list(range(1, n + 1))
        assert sorted(row.ka_rank for row in ranking.rows) == list(range(1, n + 1))
        # reversing record order leaves the ranking unchanged
        reversed_snapshot = snapshot_from(
            list(reversed(snapshot.records)), list(snapshot.boundaries)
        )
        assert tribe_rankings(reversed_snapshot).to_dict() == ranking.to_dict()

    def test_matches_oracle(self):
        snapshot = build_synth_snapshot(simple_spec(seed=21, n_crashes=900, tribal_fraction=0.6))
        records_by_tribe = {
            tid: list(snapshot.records_for_tribe(tid)) for tid in snapshot.tribe_ids()
        }
        expected = rankings_oracle(snapshot, records_by_tribe)
        ranking = tribe_rankings(snapshot)
        assert {row.tribe_id: (row.kab_rank, row.ka_rank) for row in ranking.rows} == expected


class TestTopCrashTypes:
    def ditch_snapshot(self):
        """Tribal: 10% Ditch; statewide overall: 5% Ditch."""
        records = []
        for i in range(20):  # tribal crashes: 2 Ditch, 18 Tree
            label = "Ditch" if i < 2 else "Tree"
            records.append(crash(f"t{i}", crash_type=label, tribal_code="T1"))
        for i in range(60):  # non-tribal: 2 Ditch, 58 Angle
            label = "Ditch" if i < 2 else "Angle"
            records.append(crash(f"s{i}", crash_type=label))
        return snapshot_from(records, [square_boundary("T1", "Tribe One", 0, 0)])

    def test_tribal_excess_pattern(self):
        result = top_crash_types(self.ditch_snapshot(), n=10, weight="total")
        ditch = next(row for row in result.rows if row.crash_type == "Ditch")
        assert ditch.tribal_percent == pytest.approx(10.0)
        assert ditch.statewide_percent == pytest.approx(5.0)

    def test_fewer_types_than_n(self):
        result = top_crash_types(self.ditch_snapshot(), n=3)
        assert len(result.rows) == 2  # tribal crashes carry only Ditch and Tree

    def test_sorted_descending(self):
        result = top_crash_types(self.ditch_snapshot(), n=5)
        percents = [row.tribal_percent for row in result.rows]
        assert percents == sorted(percents, reverse=True)

    def test_case_insensitive_label_matching(self):
        records = [
            crash("t1", crash_type="ditch", tribal_code="T1"),
            crash("t2", crash_type="Ditch ", tribal_code="T1"),
            crash("s1", crash_type="DITCH"),
        ]
        snapshot = snapshot_from(records, [square_boundary("T1", "Tribe One", 0, 0)])
        result = top_crash_types(snapshot, n=5)
        assert len(result.rows) == 1
        assert result.rows[0].tribal_percent == pytest.approx(100.0)

    @pytest.mark.parametrize("weight", ["total", "kab"])
    def test_matches_oracle(self, weight):
        snapshot = build_synth_snapshot(simple_spec(seed=3, n_crashes=1200, tribal_fraction=0.4))
        expected = crash_type_oracle(
            list(snapshot.tribal_records()), list(snapshot.records), weight
        )
        result = top_crash_types(snapshot, n=100, weight=weight)
        assert len(result.rows) == len(expected)
        for row in result.rows:
            want = expected[row.crash_type.strip().lower()]
            assert row.tribal_percent == pytest.approx(want[0], rel=1e-9)
            assert row.statewide_percent == pytest.approx(want[1], rel=1e-9)


@given(st.integers(min_value=0, max_value=200), st.integers(min_value=0, max_value=200))
@settings(max_examples=30, deadline=None)
def test_rate_summary_identity_property(kab_extra, ka):
    kab = ka + kab_extra
    total = kab + 50
    rates = RateSummary(total=total, kab=kab, ka=ka)
    assert abs(rates.kab_rate - 100.0 * kab / total) < 1e-9
    assert abs(rates.ka_rate - 100.0 * ka / total) < 1e-9
