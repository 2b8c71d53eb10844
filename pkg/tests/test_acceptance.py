"""Acceptance criteria 1-10, one PASS/FAIL line each.

Run alone with ``pytest tests/test_acceptance.py -v -s`` or as part of the
full suite; the verdict lines are printed even when output is captured.
"""
import math

import mpmath
import numpy as np
import pytest

from conftest import tracked
from zetasections.atlas import (fl_residual, fl_zero, gram_law_check, interlace_check,
                                zeta1_zero, zeta_zeros_between)
from zetasections.dh import dh_xi_section
from zetasections.rearranger import auto_search
from zetasections.sections import Section, SectionSpec
from zetasections.special import chi, lambert_w
from zetasections.tracker import (BoundaryZeroError, count_zeros_region, homotopy_section,
                                  locate_online_zeros, refine_zero, track_pair)


@pytest.fixture
def verdict(capsys):
    def emit(k, ok, detail):
        with capsys.disabled():
            print(f"\nCRITERION {k}: {'PASS' if ok else 'FAIL'}: {detail}")
        assert ok, detail
    return emit


# --------------------------------------------------------------- 1

def test_criterion_1_special_functions(verdict):
    rng = np.random.default_rng(1)
    s = rng.uniform(0.01, 0.99, 1000) + 1j * rng.uniform(1.0, 1500.0, 1000)
    refl = max(abs(chi(complex(v)) * chi(1 - complex(v)) - 1) for v in s)
    t = rng.uniform(1.0, 1500.0, 1000)
    unit = max(abs(abs(chi(complex(0.5, v))) - 1) for v in t)
    x0 = np.concatenate([-rng.uniform(0, 1 / math.e, 500), 10 ** rng.uniform(-8, 12, 500)])
    w0 = lambert_w(0, x0)
    xm = -rng.uniform(1e-300, 1 / math.e, 1000)
    wm = lambert_w(-1, xm)
    lam = max(np.max(np.abs(w0 * np.exp(w0) - x0) / (1 + np.abs(x0))),
              np.max(np.abs(wm * np.exp(wm) - xm) / (1 + np.abs(xm))))
    ok = refl <= 1e-9 and unit <= 1e-9 and lam <= 1e-12
    verdict(1, ok, f"reflection {refl:.2e}, |chi| on line {unit:.2e}, Lambert inverse {lam:.2e}")


# --------------------------------------------------------------- 2

def test_criterion_2_atlas(verdict):
    res = max(abs(fl_residual(n, fl_zero(n))) for n in range(1, 2001))
    dev = max(abs(zeta1_zero(n) - fl_zero(n)) for n in range(50, 2001))
    rep = interlace_check((5, 500))
    ok = res <= 1e-9 and dev <= 0.05 and rep.ok
    verdict(2, ok, f"FL residual {res:.2e} (n<=2000), zeta_1 deviation {dev:.2e} "
                   f"(50<=n<=2000), interlacing violations: {0 if rep.ok else rep.first_violation}")


# --------------------------------------------------------------- 3

def test_criterion_3_gram_law(verdict):
    fails = [n for n in range(0, 127) if not gram_law_check(n).holds]
    ok = fails == [126]
    verdict(3, ok, f"Gram's law failures in 0..126: {fails}")


# --------------------------------------------------------------- 4

def test_criterion_4_collision_at_88(verdict, traj_88):
    on8 = locate_online_zeros(SectionSpec("accelerated", 8), 86, 90)
    on9 = locate_online_zeros(SectionSpec("accelerated", 9), 86, 90)
    on23 = locate_online_zeros(SectionSpec("accelerated", 23), 86, 90)
    box9 = count_zeros_region(SectionSpec("accelerated", 9), (0.0, 1.0, 86.0, 90.0))
    z_r = refine_zero(SectionSpec("accelerated", 9), 0.74 + 88.12j)
    z_l = refine_zero(SectionSpec("accelerated", 9), 0.25 + 88.12j)
    d = max(abs(z_r.location.s - (0.74 + 88.12j)), abs(z_l.location.s - (0.25 + 88.12j)))
    evs = [(e.kind, e.N) for e in traj_88.events]
    ok = (len(on8) == 2 and len(on9) == 0 and box9 == 2 and d <= 0.02 and len(on23) == 2
          and evs == [("departure", 8), ("return", 22)])
    verdict(4, ok, f"on-line N=8/9/23: {len(on8)}/{len(on9)}/{len(on23)}, box count N=9: {box9}, "
                   f"off-line zeros {z_r.location.s:.5f}, {z_l.location.s:.5f} "
                   f"(max distance {d:.3f}), events {evs}")


# --------------------------------------------------------------- 5

def test_criterion_5_pair_132(verdict):
    lines, ok = [], True
    for fam in ("classical", "accelerated"):
        traj = tracked((132, 133), fam, 150)
        f = traj.final()
        zs = zeta_zeros_between(f.lo.t - 1, f.hi.t + 1)
        err = max(min(abs(z - f.lo.t) for z in zs), min(abs(z - f.hi.t) for z in zs))
        ok &= not traj.events and err <= 1e-4
        lines.append(f"{fam}: {len(traj.events)} events, final error {err:.2e}")
    verdict(5, ok, "; ".join(lines))


# --------------------------------------------------------------- 6

def test_criterion_6_pair_725(verdict, traj_725, traj_725_rearranged):
    kinds = [e.kind for e in traj_725.events]
    cycles = sum(1 for a, b in zip(kinds, kinds[1:]) if (a, b) == ("departure", "return"))
    a, b = traj_725.final(), traj_725_rearranged.final()
    gap = max(abs(a.lo.location.s - b.lo.location.s), abs(a.hi.location.s - b.hi.location.s))
    ok = cycles >= 1 and not traj_725_rearranged.events and gap <= 1e-10
    verdict(6, ok, f"identity order: {cycles} departure/return cycles "
                   f"{[(e.kind, e.N) for e in traj_725.events]}; rearranged: "
                   f"{len(traj_725_rearranged.events)} events; final gap {gap:.1e}")


# --------------------------------------------------------------- 7

def _segment_distance(w):
    """Distance from w to the real segment [0, 1].

    F_N + τ r vanishes for some τ in [0, 1] exactly when w = -F_N/r lies on it.
    """
    return np.abs(w - np.clip(w.real, 0.0, 1.0))


def test_criterion_7_count_conservation(verdict):
    rng = np.random.default_rng(7)
    accepted, rejected, nonzero, mismatches, additive = 0, 0, 0, [], True
    while accepted < 50:
        fam = ("classical", "accelerated")[accepted % 2]
        N = int(rng.integers(1, 120))
        t0 = float(rng.uniform(20, 600))
        s0 = float(rng.uniform(-0.5, 0.5))
        box = (s0, s0 + 1.0, t0, t0 + 1.0)
        spec = SectionSpec(fam, N)
        F0, F1 = homotopy_section(spec, 0.0), homotopy_section(spec, 1.0)
        corners = [complex(s0, t0), complex(s0 + 1, t0), complex(s0 + 1, t0 + 1), complex(s0, t0 + 1)]
        pts = np.concatenate([a + (b - a) * np.linspace(0, 1, 512, endpoint=False)
                              for a, b in zip(corners, corners[1:] + corners[:1])])
        f0 = F0(pts)
        d = F1(pts) - f0
        w = -f0 / d
        if np.min(_segment_distance(w) / (1 + np.abs(w))) < 0.02:
            rejected += 1
            continue
        try:
            n0, n1 = count_zeros_region(F0, box), count_zeros_region(F1, box)
            tm, sm = t0 + float(rng.uniform(0.3, 0.7)), s0 + float(rng.uniform(0.3, 0.7))
            halves = (count_zeros_region(F0, (s0, s0 + 1, t0, tm))
                      + count_zeros_region(F0, (s0, s0 + 1, tm, t0 + 1)))
            sides = (count_zeros_region(F0, (s0, sm, t0, t0 + 1))
                     + count_zeros_region(F0, (sm, s0 + 1, t0, t0 + 1)))
        except BoundaryZeroError:
            rejected += 1
            continue
        accepted += 1
        nonzero += n0 > 0
        if n0 != n1:
            mismatches.append((fam, N, box, n0, n1))
        additive &= halves == n0 and sides == n0
    ok = not mismatches and additive
    verdict(7, ok, f"{accepted} boxes, {nonzero} holding zeros ({rejected} rejected near a "
                   f"boundary zero), "
                   f"count mismatches {mismatches}, additivity {'exact' if additive else 'broken'}")


# --------------------------------------------------------------- 8

def test_criterion_8_accelerated_accuracy(verdict):
    mpmath.mp.dps = 30
    parts, ok = [], True
    for t in (100, 500, 1200):
        s = complex(0.5, t)
        ref = complex(mpmath.zeta(mpmath.mpc(0.5, t)))
        e0 = abs(Section.from_spec(SectionSpec("accelerated", t // 2))(s) - ref)
        e1 = abs(Section.from_spec(SectionSpec("accelerated", t // 2 + 50))(s) - ref)
        good = e1 <= 1e-6 and e1 * 10 <= e0
        ok &= good
        parts.append(f"t={t}: {e0:.2e} -> {e1:.2e}{'' if good else ' (ratio below 10)'}")
    verdict(8, ok, "; ".join(parts))


# --------------------------------------------------------------- 9

def test_criterion_9_dh_control(verdict, traj_dh_44):
    rng = np.random.default_rng(9)
    sym = 0.0
    for _ in range(200):
        s = complex(rng.uniform(0.05, 0.95), rng.uniform(5, 200))
        N = int(rng.integers(0, 101))
        a, b = dh_xi_section(N, s), dh_xi_section(N, 1 - s)
        sym = max(sym, abs(a - b) / abs(a))
    evs = [(e.kind, e.N) for e in traj_dh_44.events]
    rep = auto_search((44, 45), "dh", 200)
    ok = sym <= 1e-9 and evs == [("departure", 12)]
    verdict(9, ok, f"symmetry {sym:.1e}; pair 44/45 events {evs}; auto_search verdict "
                   f"'{rep.verdict}' after {rep.tried} tries (evidence only)")


# --------------------------------------------------------------- 10

def test_criterion_10_determinism(verdict, traj_88, traj_725, traj_725_rearranged):
    from zetasections.rearranger import paper_rearrangement
    runs = [
        (traj_88, track_pair((24, 25), "accelerated", 30)),
        (tracked((132, 133), "classical", 150), track_pair((132, 133), "classical", 150)),
        (tracked((132, 133), "accelerated", 150), track_pair((132, 133), "accelerated", 150)),
        (traj_725, track_pair((725, 726), "accelerated", 566)),
        (traj_725_rearranged, track_pair((725, 726), "accelerated", 566,
                                         rearrangement=paper_rearrangement("R_accelerated"))),
    ]
    same = [a.to_csv().encode() == b.to_csv().encode() for a, b in runs]
    verdict(10, all(same), f"{sum(same)}/{len(same)} repeated trajectory CSVs byte-identical")
