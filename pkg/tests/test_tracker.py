import json

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from conftest import tracked
from zetasections.atlas import fl_zero
from zetasections.sections import Section, SectionSpec
from zetasections.special import DomainError
from zetasections.tracker import (BoundaryZeroError, OffLineSpanError, PairTrajectory,
                                  TrackerConfig, TrackingLoss, classify_step,
                                  collision_intervals, count_zeros_region, homotopy_eval,
                                  homotopy_section, locate_online_zeros, phase_point,
                                  refine_zero, track_pair)


# --------------------------------------------------------------- homotopy

@pytest.mark.parametrize("family", ["classical", "accelerated", "dh"])
def test_homotopy_endpoints(family):
    N = 6
    s = np.array([0.3 + 40j, 0.8 + 77j])
    a = homotopy_eval(SectionSpec(family, N), 0.0, s)
    b = homotopy_eval(SectionSpec(family, N), 1.0, s)
    assert np.allclose(a, Section.from_spec(SectionSpec(family, N))(s), rtol=1e-14, atol=0)
    assert np.allclose(b, Section.from_spec(SectionSpec(family, N + 1))(s), rtol=1e-13, atol=0)


def test_homotopy_is_linear_in_tau():
    spec = SectionSpec("accelerated", 9)
    s = 0.6 + 88j
    f0, f1 = homotopy_eval(spec, 0, s), homotopy_eval(spec, 1, s)
    assert homotopy_eval(spec, 0.3, s) == pytest.approx(0.7 * f0 + 0.3 * f1, abs=1e-14)
    with pytest.raises(DomainError):
        homotopy_section(spec, 1.5)


# --------------------------------------------------------------- locate / refine

def test_locate_online_zeros_of_zeta1():
    zs = locate_online_zeros(Section("classical", np.ones(1)), 10, 100)
    assert len(zs) == 29
    ts = [z.t for z in zs]
    assert all(b > a for a, b in zip(ts, ts[1:]))
    assert all(z.on_line and z.residual <= 1e-12 for z in zs)
    with pytest.raises(DomainError):
        locate_online_zeros(Section("classical", np.ones(1)), 5, 20)


def test_collision_at_88():
    n8 = locate_online_zeros(SectionSpec("accelerated", 8), 86, 90)
    n9 = locate_online_zeros(SectionSpec("accelerated", 9), 86, 90)
    assert len(n8) == 2 and len(n9) == 0


def test_refine_offline_zero_n9():
    z = refine_zero(SectionSpec("accelerated", 9), 0.7 + 88.1j)
    assert not z.on_line
    assert abs(z.location.s - (0.7499 + 88.1229j)) <= 1e-3
    # the mirror image is a zero as well
    mirror = refine_zero(SectionSpec("accelerated", 9), 0.25 + 88.12j)
    assert abs(mirror.location.s - (1 - z.location.s.conjugate())) <= 1e-10


def test_refine_online_zero():
    t = fl_zero(40)
    z = refine_zero(Section("classical", np.ones(1)), complex(0.5, t))
    assert z.on_line and abs(z.sigma - 0.5) <= 1e-12


# --------------------------------------------------------------- counting

@pytest.mark.parametrize("N", [8, 9, 22, 23])
def test_box_count_around_88(N):
    assert count_zeros_region(SectionSpec("accelerated", N), (0.0, 1.0, 86.0, 90.0)) == 2


def test_count_additivity():
    spec = SectionSpec("accelerated", 9)
    whole = count_zeros_region(spec, (-1.0, 2.0, 80.0, 96.0))
    parts = sum(count_zeros_region(spec, (-1.0, 2.0, a, a + 4.0)) for a in (80.0, 84.0, 88.0, 92.0))
    assert whole == parts
    left = count_zeros_region(spec, (-1.0, 0.5 - 1e-3, 80.0, 96.0))
    right = count_zeros_region(spec, (0.5 - 1e-3, 2.0, 80.0, 96.0))
    assert left + right == whole


def test_count_matches_plain_function():
    # z^3 - z in a box around the origin holds three roots
    assert count_zeros_region(lambda z: z ** 3 - z, (-2.0, 2.0, -0.5, 0.7)) == 3


def test_count_boundary_zero():
    t = fl_zero(30)
    z1 = Section("classical", np.ones(1))
    t0 = locate_online_zeros(z1, t - 1, t + 1)[0].t
    with pytest.raises(BoundaryZeroError):
        count_zeros_region(z1, (0.0, 1.0, t0, t0 + 1.0))
    with pytest.raises(DomainError):
        count_zeros_region(z1, (1.0, 0.0, 20.0, 21.0))


# --------------------------------------------------------------- collision intervals

def test_collision_intervals_at_1100():
    boundary, ivs = collision_intervals(1100.0)
    assert (1, 87, 175) in ivs
    assert all(hi - lo + 1 >= 3 for _, lo, hi in ivs)
    assert boundary == ivs[-1][2]


def test_collision_interval_scale():
    b1, _ = collision_intervals(400.0, family="classical")
    b2, _ = collision_intervals(400.0, family="accelerated")
    assert b2 >= b1


def test_phase_point_is_gram_point():
    from zetasections.atlas import gram_point
    assert phase_point("classical", 126) == pytest.approx(gram_point(126), abs=1e-9)


# --------------------------------------------------------------- trajectories

def test_collision_at_88_tracked(traj_88):
    kinds = [(e.kind, e.N) for e in traj_88.events]
    assert kinds == [("departure", 8), ("return", 22)]
    dep, ret = traj_88.events
    assert 0 < dep.t_param < 1 and 0 < ret.t_param < 1
    s9 = traj_88.at(9)
    assert not s9.lo.on_line
    assert abs(s9.hi.location.s - (0.74 + 88.12j)) <= 0.02
    assert abs(s9.lo.location.s - (0.25 + 88.12j)) <= 0.02


def test_trajectory_invariants(traj_88):
    for smp in traj_88.samples:
        if smp.lo.on_line and smp.hi.on_line:
            assert smp.lo.t < smp.hi.t
        else:
            # off-line members form a pair mirrored in the line
            assert abs(smp.lo.location.s - (1 - smp.hi.location.s.conjugate())) <= 1e-9
    Ns = [smp.N for smp in traj_88.samples if smp.t_param == 0.0]
    assert Ns == list(range(0, 31))


def test_events_alternate(traj_725):
    kinds = [e.kind for e in traj_725.events]
    assert kinds == ["departure", "return"] * (len(kinds) // 2)
    assert len(kinds) >= 2


def test_classify_step(traj_88):
    assert classify_step(traj_88, 3) in ("attracting", "repelling", "neutral")
    assert classify_step(traj_88, 7) == "attracting"
    with pytest.raises(OffLineSpanError):
        classify_step(traj_88, 9)


def test_csv_and_json_format(traj_88):
    text = traj_88.to_csv("unit")
    lines = text.splitlines()
    assert lines[0] == "# unit"
    assert lines[1] == ",".join(PairTrajectory.CSV_COLUMNS)
    first = lines[2].split(",")
    assert first[:4] == ["24", "25", "accelerated", "0"]
    assert float(first[6]) == traj_88.samples[0].lo.t
    data = json.loads(traj_88.events_json())
    assert data["pair"] == [24, 25]
    assert [e["kind"] for e in data["events"]] == ["departure", "return"]


def test_deterministic():
    a = track_pair((24, 25), "accelerated", 12)
    b = track_pair((24, 25), "accelerated", 12)
    assert a.to_csv() == b.to_csv()


def test_start_and_resume(traj_88):
    late = track_pair((24, 25), "accelerated", 30, N_start=10)
    assert late.samples[0].N == 10
    assert late.final() == traj_88.final()
    resumed = track_pair((24, 25), "accelerated", 30, resume=traj_88.checkpoints[15])
    assert resumed.final() == traj_88.final()


def test_stop_callback():
    traj = track_pair((24, 25), "accelerated", 30, stop=lambda tr: len(tr.events) >= 1)
    assert traj.status == "aborted" and len(traj.events) == 1


def test_tracking_loss_partial_and_raise():
    cfg = TrackerConfig(tau_step=0.5, min_tau_step=0.5, motion=1e-9)
    traj = track_pair((24, 25), "accelerated", 30, config=cfg, on_loss="partial")
    assert traj.status == "partial" and traj.message
    with pytest.raises(TrackingLoss) as info:
        track_pair((24, 25), "accelerated", 30, config=cfg)
    assert info.value.trajectory is not None


def test_verify_counts_mode():
    traj = track_pair((24, 25), "accelerated", 12, config=TrackerConfig(verify_counts=True))
    assert traj.status == "complete"


@settings(max_examples=8, deadline=None)
@given(st.integers(30, 300))
def test_small_n_tracks_cleanly(n):
    traj = track_pair((n, n + 1), "accelerated", 6, on_loss="partial")
    assert traj.status == "complete"
    first = traj.samples[0]
    assert first.lo.t < first.hi.t
    assert abs(first.lo.t - fl_zero(n)) <= 0.5


def test_tracked_cache_is_shared():
    assert tracked((24, 25), "accelerated", 30) is tracked((24, 25), "accelerated", 30)
