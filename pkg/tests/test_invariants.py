import random

import pytest

from zerosum import (
    Budget,
    InvalidInputError,
    Sequence,
    check_property_d,
    compute,
    compute_davenport,
    compute_dk,
    compute_eta,
    compute_s,
    detect_arithmetic_tail,
    formula_oracle,
    has_nonempty_zero_sum,
    has_short_zero_sum,
    has_zero_sum_of_length,
    make_group,
    max_disjoint_zero_sums,
    property_d_known,
)


def test_property_d_known_set():
    assert property_d_known(1)
    assert all(property_d_known(m) for m in (2, 3, 5, 7, 6, 8, 9, 10, 210))
    assert not property_d_known(11)
    assert not property_d_known(22)


def test_formula_oracle_rank_two():
    assert formula_oracle(make_group([]), "d") == 1
    assert formula_oracle(make_group([7]), "eta") == 7
    assert formula_oracle(make_group([7]), "s") == 13
    assert formula_oracle(make_group([7]), "dk", 3) == 21
    assert formula_oracle(make_group([2, 4]), "d") == 5
    assert formula_oracle(make_group([2, 4]), "eta") == 6
    assert formula_oracle(make_group([2, 4]), "s") == 9
    assert formula_oracle(make_group([3, 6]), "eta") == 10
    assert formula_oracle(make_group([2, 4]), "d0") == 1
    assert formula_oracle(make_group([2, 4]), "kd") == 1


def test_formula_oracle_rank_three_family():
    assert formula_oracle(make_group([2, 4, 4]), "eta") == 14
    assert formula_oracle(make_group([2, 2, 4]), "s") == 11
    assert formula_oracle(make_group([2, 2, 2]), "dk", 2) == 7
    assert formula_oracle(make_group([2, 2, 2]), "s") == 9
    assert formula_oracle(make_group([2, 2, 8]), "d") == 10
    assert formula_oracle(make_group([2, 6, 12]), "s") == 4 * 3 + 4 * 6 - 1
    assert formula_oracle(make_group([2, 2, 6]), "eta") == 10
    assert formula_oracle(make_group([2, 4, 4]), "d0") == 5
    assert formula_oracle(make_group([2, 4, 4]), "kd") == 2
    assert formula_oracle(make_group([2, 2, 4]), "d0") == 2
    assert formula_oracle(make_group([2, 2, 4]), "kd") == 1
    # s for n >= 2 requires Property D of m; m = 11 is unknown
    assert formula_oracle(make_group([2, 22, 44]), "s") is None
    assert formula_oracle(make_group([2, 22, 44]), "eta") == 4 * 11 + 2 * 11 * 2


def test_formula_oracle_outside_families():
    assert formula_oracle(make_group([3, 3, 3]), "d") is None
    assert formula_oracle(make_group([2, 2, 2, 2]), "eta") is None
    assert formula_oracle(make_group([4, 4, 8]), "s") is None


def test_formula_oracle_bad_kind():
    with pytest.raises(InvalidInputError):
        formula_oracle(make_group([5]), "dk")
    with pytest.raises(InvalidInputError):
        formula_oracle(make_group([5]), "nope")


@pytest.mark.parametrize("factors,expect", [
    ([], 1), ([5], 5), ([2, 2, 2], 4), ([2, 4], 5), ([3, 3], 5), ([2, 2, 4], 6),
])
def test_davenport_small(factors, expect):
    res = compute_davenport(make_group(factors))
    assert res.value == expect
    assert res.status == "complete"
    assert len(res.witness) == expect - 1
    assert not has_nonempty_zero_sum(res.witness)


@pytest.mark.parametrize("factors,expect", [
    ([], 1), ([6], 6), ([2, 2, 2], 8), ([2, 4], 6), ([2, 2, 4], 8),
])
def test_eta_small(factors, expect):
    res = compute_eta(make_group(factors))
    assert res.value == expect
    assert not has_short_zero_sum(res.witness)


@pytest.mark.parametrize("factors,expect", [
    ([], 1), ([5], 9), ([3, 3], 9), ([2, 2, 2], 9),
])
def test_s_small(factors, expect):
    group = make_group(factors)
    res = compute_s(group)
    assert res.value == expect
    assert not has_zero_sum_of_length(res.witness, group.exponent)


def test_dk_small():
    g = make_group([2, 2, 2])
    for k, expect in [(1, 4), (2, 7), (3, 9), (4, 11)]:
        res = compute_dk(g, k)
        assert res.value == expect
        assert max_disjoint_zero_sums(res.witness, k) == k - 1
    for n in (2, 3, 4):
        for k in (1, 2, 3):
            assert compute_dk(make_group([n]), k).value == k * n
    with pytest.raises(InvalidInputError):
        compute_dk(g, 0)


def test_dk_monotone_in_k():
    # strictly monotone, each step at most D(G); the step equals exp(G)
    # once the arithmetic tail starts (it can exceed exp before that:
    # D_2(C_2^3) = 7 = D_1 + 3)
    for factors in ([4], [5], [2, 2], [2, 4], [2, 2, 2]):
        group = make_group(factors)
        d = compute_davenport(group).value
        values = [compute_dk(group, k).value for k in range(1, 5)]
        for a, b in zip(values, values[1:]):
            assert a < b <= a + d, (factors, values)
        tail = detect_arithmetic_tail(group, 4)
        for k in range(tail.kd, 4):
            assert values[k] - values[k - 1] == group.exponent


def test_d1_equals_davenport(small_groups):
    for group in small_groups[:8]:
        assert compute_dk(group, 1).value == compute_davenport(group).value


def test_trivial_group_conventions():
    t = make_group([])
    assert compute_davenport(t).value == 1
    assert compute_eta(t).value == 1
    assert compute_s(t).value == 1
    for k in (1, 2, 3):
        assert compute_dk(t, k).value == k


def test_witness_local_maximality():
    # every one-element extension of a maximal witness gains the property
    group = make_group([3, 3])
    res = compute_davenport(group)
    for g in range(group.order):
        extended = res.witness * Sequence.from_indices(group, [g])
        assert has_nonempty_zero_sum(extended)
    res = compute_eta(group)
    for g in range(group.order):
        extended = res.witness * Sequence.from_indices(group, [g])
        assert has_short_zero_sum(extended)


def test_search_matches_oracle_spot(small_groups):
    rng = random.Random(20)
    for group in small_groups[:8]:
        assert compute_davenport(group).value == formula_oracle(group, "d")


def test_orbit_pruning_does_not_change_values():
    for factors in ([2, 4], [3, 3], [2, 2, 2]):
        g = make_group(factors)
        assert compute_eta(g, orbit_pruning=False).value == \
            compute_eta(g, orbit_pruning=True).value
        assert compute_s(g, orbit_pruning=False).value == \
            compute_s(g, orbit_pruning=True).value


def test_budget_gives_partial_lower_bound():
    g = make_group([2, 4, 4])
    res = compute_davenport(g, Budget(max_nodes=2000))
    assert res.status == "partial"
    assert res.checkpoint is not None
    assert res.value <= 8
    assert not has_nonempty_zero_sum(res.witness)


def test_resume_reaches_identical_result():
    g = make_group([3, 9])
    full = compute_davenport(g)
    partial = compute_davenport(g, Budget(max_nodes=5000))
    assert partial.status == "partial"
    rounds = 0
    while partial.status == "partial":
        partial = compute_davenport(g, Budget(max_nodes=50000),
                                    resume=partial.checkpoint)
        rounds += 1
        assert rounds < 50
    assert partial.value == full.value
    assert partial.witness == full.witness
    assert partial.stats.nodes == full.stats.nodes


def test_detect_arithmetic_tail():
    report = detect_arithmetic_tail(make_group([2, 2, 2]), 4)
    assert (report.d0, report.kd) == (3, 2)
    assert report.status == "provisional"
    assert report.dk_values == [4, 7, 9, 11]

    report = detect_arithmetic_tail(make_group([6]), 3)
    assert (report.d0, report.kd) == (0, 1)

    report = detect_arithmetic_tail(make_group([3, 3]), 3)
    assert (report.d0, report.kd) == (2, 1)

    # horizon too short to certify stabilization + 2
    report = detect_arithmetic_tail(make_group([2, 2, 2]), 2)
    assert report.status == "inconclusive"
    assert report.d0 is None


def test_property_d_small():
    assert check_property_d(1).holds
    r2 = check_property_d(2)
    assert r2.holds and r2.extremal_count == 1
    r3 = check_property_d(3)
    assert r3.holds and r3.counterexample is None
    assert r3.extremal_count > 0


def test_property_d_budget():
    report = check_property_d(3, Budget(max_nodes=50))
    assert report.status == "inconclusive"


def test_compute_dispatch():
    g = make_group([4])
    assert compute(g, "d").value == 4
    assert compute(g, "dk", k=2).value == 8
    with pytest.raises(InvalidInputError):
        compute(g, "dk")
    with pytest.raises(InvalidInputError):
        compute(g, "bogus")


def test_result_json_shape():
    res = compute_eta(make_group([2, 4]))
    payload = res.to_json()
    assert payload["group"] == [2, 4]
    assert payload["kind"] == "eta"
    assert payload["value"] == 6
    assert payload["status"] == "complete"
    assert set(payload["stats"]) == {"nodes", "seconds"}
    assert payload["witness"]["group"] == [2, 4]
