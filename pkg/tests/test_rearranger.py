import json

import pytest
from hypothesis import given, settings, strategies as st

from zetasections.rearranger import (AvoidanceReport, auto_search, candidate_intervals,
                                     paper_rearrangement, reverse_interval_rearrangement,
                                     run_avoidance_experiment, verdict)
from zetasections.sections import Rearrangement


def R_table(n):
    """The classical reordering written out case by case."""
    if n <= 13:
        return n
    if n < 28:
        return 41 - n
    if n <= 85:
        return n
    if n < 171:
        return 256 - n
    return n


def Rt_table(n):
    if n <= 30:
        return n
    if n < 54:
        return 84 - n
    if n <= 177:
        return n
    if n < 327:
        return 504 - n
    return n


def test_fixed_rearrangements_match_case_tables():
    R, Rt = paper_rearrangement("R_classical"), paper_rearrangement("R_accelerated")
    assert all(R(n) == R_table(n) for n in range(1, 400))
    assert all(Rt(n) == Rt_table(n) for n in range(0, 400))
    with pytest.raises(ValueError):
        paper_rearrangement("R_other")


def test_reverse_interval():
    R = reverse_interval_rearrangement([(3, 6), (10, 11)])
    assert [R(n) for n in range(1, 13)] == [1, 2, 6, 5, 4, 3, 7, 8, 9, 11, 10, 12]
    assert reverse_interval_rearrangement([]) == Rearrangement.identity()
    with pytest.raises(ValueError):
        reverse_interval_rearrangement([(3, 8), (8, 10)])
    with pytest.raises(ValueError):
        reverse_interval_rearrangement([(3, 4)], mode="scramble")


def test_half_swap():
    R = reverse_interval_rearrangement([(1, 5)], mode="half_swap")
    assert R.order(1, 5) == [3, 4, 5, 1, 2]


@settings(max_examples=40, deadline=None)
@given(st.lists(st.integers(0, 300), min_size=2, max_size=10, unique=True),
       st.sampled_from(["reverse", "half_swap"]))
def test_rearrangements_are_bijections(points, mode):
    pts = sorted(points)
    R = reverse_interval_rearrangement(list(zip(pts[::2], pts[1::2])), mode)
    lo, hi = R.domain
    assert sorted(R.order(lo, hi)) == list(range(lo, hi + 1))


@pytest.mark.parametrize("b,r,expect", [
    ([1, 2], [], "avoided"), ([1, 2, 3, 4], [1, 2], "reduced"),
    ([1, 2], [3, 4], "unchanged"), ([], [], "unchanged"), ([1, 2], [1, 2, 3, 4], "worsened")])
def test_verdict(b, r, expect):
    assert verdict(b, r) == expect


def test_report_json_roundtrip():
    R = paper_rearrangement("R_accelerated")
    rep = AvoidanceReport((725, 726), "accelerated", 10, [], [], R)
    data = json.loads(rep.to_json())
    assert data["verdict"] == "unchanged"
    assert Rearrangement.from_json(json.dumps(data["rearrangement"])) == R
    assert len(rep.key) == 12


def test_candidate_windows_cover_the_events(traj_88):
    cands = candidate_intervals(traj_88, 30)
    assert cands[0] == (8, 23)
    assert all(1 <= a < b <= 30 for a, b in cands)
    assert len(cands) <= 6


def test_experiment_with_fixed_R_accelerated(traj_725, traj_725_rearranged):
    rep = run_avoidance_experiment((725, 726), "accelerated", 566,
                                   paper_rearrangement("R_accelerated"), baseline=traj_725)
    assert rep.verdict == "avoided"
    assert rep.finals_agree is True
    assert rep.rearranged_events == traj_725_rearranged.events == []


def test_auto_search_avoids_the_88_collision():
    rep = auto_search((24, 25), "accelerated", 30)
    assert rep.verdict == "avoided"
    assert rep.finals_agree is True
    assert rep.tried >= 1


def test_auto_search_without_events_returns_identity():
    rep = auto_search((40, 41), "accelerated", 10)
    assert rep.tried == 0 and rep.verdict == "unchanged"
    assert rep.rearrangement.pieces == ()
