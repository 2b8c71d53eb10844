"""Reordering the summation to steer zeros away from collisions."""
from __future__ import annotations

import hashlib
import itertools
import json
import logging
from dataclasses import dataclass, field

from .sections import Piece, Rearrangement, base_index
from .tracker import (PairTrajectory, TrackerConfig, TrackingLoss, collision_intervals,
                      track_pair)

log = logging.getLogger(__name__)

# (domain, [(lo, hi, c), ...]) with n -> c - n on lo..hi
_BUILTIN = {
    "R_classical": ((1, 170), [(14, 27, 41), (86, 170, 256)]),
    "R_accelerated": ((0, 326), [(31, 53, 84), (178, 326, 504)]),
}


def paper_rearrangement(which: str) -> Rearrangement:
    """The fixed reorderings R (classical) and R̃ (accelerated) for pair 725/726."""
    try:
        domain, pieces = _BUILTIN[which]
    except KeyError:
        raise ValueError(f"unknown rearrangement {which!r}; choose from {sorted(_BUILTIN)}")
    return Rearrangement(domain, tuple(Piece(lo, hi, "reflect", c) for lo, hi, c in pieces))


def reverse_interval_rearrangement(intervals, mode: str = "reverse") -> Rearrangement:
    """Identity off the intervals; inside each, n -> lo + hi - n.

    mode="half_swap" instead moves the second half of each interval in front
    of the first, keeping the order inside each half.
    """
    ivs = sorted((int(a), int(b)) for a, b in intervals)
    if not ivs:
        return Rearrangement.identity()
    for (a0, b0), (a1, b1) in zip(ivs, ivs[1:]):
        if a1 <= b0:
            raise ValueError(f"intervals ({a0},{b0}) and ({a1},{b1}) overlap")
    for a, b in ivs:
        if a > b:
            raise ValueError(f"empty interval ({a},{b})")
    domain = (ivs[0][0], ivs[-1][1])
    if mode == "reverse":
        return Rearrangement(domain, tuple(Piece(a, b, "reflect", a + b) for a, b in ivs if a < b))
    if mode == "half_swap":
        table = {}
        for a, b in ivs:
            n = b - a + 1
            first = n // 2
            order = list(range(a + first, b + 1)) + list(range(a, a + first))
            table.update({a + i: v for i, v in enumerate(order)})
        return Rearrangement.from_table(table, domain)
    raise ValueError(f"unknown mode {mode!r}")


def verdict(baseline_events, rearranged_events) -> str:
    nb, nr = len(baseline_events), len(rearranged_events)
    if nr == 0 and nb > 0:
        return "avoided"
    if nr < nb:
        return "reduced"
    if nr == nb:
        return "unchanged"
    return "worsened"


@dataclass
class AvoidanceReport:
    pair: tuple
    family: str
    N_max: int
    baseline_events: list
    rearranged_events: list
    rearrangement: Rearrangement
    verdict: str = ""
    final_baseline: tuple = ()
    final_rearranged: tuple = ()
    finals_agree: bool | None = None
    status: str = "complete"
    tried: int = 1
    notes: list = field(default_factory=list)

    def __post_init__(self):
        if not self.verdict:
            self.verdict = verdict(self.baseline_events, self.rearranged_events)

    @property
    def key(self) -> str:
        return hashlib.sha1(self.rearrangement.key().encode()).hexdigest()[:12]

    def to_dict(self) -> dict:
        return {"pair": list(self.pair), "family": self.family, "N_max": self.N_max,
                "verdict": self.verdict, "status": self.status, "tried": self.tried,
                "rearrangement_key": self.key,
                "rearrangement": self.rearrangement.to_dict(),
                "baseline_events": [e.to_dict() for e in self.baseline_events],
                "rearranged_events": [e.to_dict() for e in self.rearranged_events],
                "final_baseline": list(self.final_baseline),
                "final_rearranged": list(self.final_rearranged),
                "finals_agree": self.finals_agree, "notes": list(self.notes)}

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2)


def _final(traj: PairTrajectory) -> tuple:
    f = traj.final()
    return (f.lo.sigma, f.lo.t, f.hi.sigma, f.hi.t)


def _is_full_range(R: Rearrangement, family: str, N_max: int) -> bool:
    start = base_index(family)
    return sorted(R.order(start, N_max)) == list(range(start, N_max + 1))


def _track(pair, family, N_max, R, config, **kw):
    try:
        return track_pair(pair, family, N_max, rearrangement=R, config=config, **kw), "complete"
    except TrackingLoss as exc:
        log.warning("tracking loss for %s: %s", pair, exc)
        return exc.trajectory, "partial"


def _compare(pair, family, N_max, R, base: PairTrajectory, other: PairTrajectory,
             events, status, tried=1) -> AvoidanceReport:
    fb, fr = _final(base), _final(other)
    agree = None
    if _is_full_range(R, family, N_max) and status == "complete" and other.final().N == N_max:
        agree = max(abs(x - y) for x, y in zip(fb, fr)) <= 1e-10
    return AvoidanceReport(tuple(pair), family, N_max, list(base.events), events, R,
                           final_baseline=fb, final_rearranged=fr, finals_agree=agree,
                           status=status, tried=tried)


def run_avoidance_experiment(pair, family: str, N_max: int, rearrangement: Rearrangement,
                             config: TrackerConfig = TrackerConfig(),
                             baseline: PairTrajectory | None = None) -> AvoidanceReport:
    """Track the pair in natural order and under the rearrangement, then compare.

    For a rearrangement that permutes [first index, N_max] onto itself the two
    final sections coincide, so the final ordinates must agree to 1e-10.
    """
    status = "complete"
    if baseline is None:
        baseline, status = _track(pair, family, N_max, None, config)
    other, st = _track(pair, family, N_max, rearrangement, config)
    status = "partial" if "partial" in (status, st) else "complete"
    return _compare(pair, family, N_max, rearrangement, baseline, other, list(other.events), status)


def candidate_intervals(traj: PairTrajectory, N_max: int, max_candidates: int = 6,
                        derived_only: bool = False):
    """Reversal windows suggested by the baseline events.

    Each departure/return cycle contributes its own span and the union of the
    predicted collision intervals that meet it.  The remaining slots are
    filled with single predicted intervals, longest first.
    """
    fam = traj.family
    first = base_index(fam) + 1
    f = traj.final()
    t = 0.5 * (f.lo.t + f.hi.t)
    _, ivs = collision_intervals(t, min_len=3, family=fam)
    evs = traj.events
    derived = []
    for i in range(0, len(evs), 2):
        lo = max(evs[i].N, first)
        hi = min(evs[i + 1].N + 1 if i + 1 < len(evs) else N_max, N_max)
        derived.append((lo, hi))
        meet = [(a, b) for _, a, b in ivs if a <= hi and b >= lo]
        if meet:
            derived.append((max(min(a for a, _ in meet), first), min(max(b for _, b in meet), N_max)))
    single = [] if derived_only else sorted(((max(a, first), min(b, N_max)) for _, a, b in ivs),
                                            key=lambda c: (-(c[1] - c[0]), c))
    out = []
    for c in derived + single:
        if c[1] > c[0] and c not in out:
            out.append(c)
    return out[:max_candidates]


def auto_search(pair, family: str, N_max: int, config: TrackerConfig = TrackerConfig(),
                max_candidates: int = 6, mode: str = "reverse") -> AvoidanceReport:
    """Try reversals over subsets of candidate windows; first avoiding one wins.

    At most 2**max_candidates subsets are tried.  Runs resume from the
    baseline state just before the first reversed index and stop as soon as
    they have at least as many events as the best run so far.
    """
    baseline, status = _track(pair, family, N_max, None, config)
    identity = Rearrangement.identity((base_index(family), base_index(family)))
    if not baseline.events or status != "complete":
        rep = _compare(pair, family, N_max, identity, baseline, baseline,
                       list(baseline.events), status, tried=0)
        if status != "complete":
            rep.notes.append("baseline tracking lost; search skipped")
        return rep

    cands = candidate_intervals(baseline, N_max, max_candidates)
    subsets = []
    for r in range(1, len(cands) + 1):
        for sub in itertools.combinations(cands, r):
            ivs = sorted(sub)
            if all(b0 < a1 for (_, b0), (a1, _) in zip(ivs, ivs[1:])):
                subsets.append(tuple(ivs))
    # event-derived windows first, then fewest padding windows, then shortest
    derived = set(candidate_intervals(baseline, N_max, max_candidates, derived_only=True))
    subsets.sort(key=lambda s: (-sum(c in derived for c in s), sum(c not in derived for c in s),
                                sum(b - a for a, b in s), s))

    best = None
    tried = 0
    for sub in subsets:
        R = reverse_interval_rearrangement(sub, mode)
        first = sub[0][0]
        N_resume = first - 1
        carried = [e for e in baseline.events if e.N < N_resume]
        limit = len(baseline.events) if best is None else len(best.rearranged_events)

        def stop(tr, carried=carried, limit=limit):
            return len(carried) + len(tr.events) >= limit

        tried += 1
        if len(carried) >= limit:
            continue
        traj, st = _track(pair, family, N_max, R, config,
                          resume=baseline.checkpoints[N_resume], stop=stop)
        if traj.status == "aborted" or st != "complete":
            continue
        rep = _compare(pair, family, N_max, R, baseline, traj, carried + list(traj.events),
                       st, tried)
        if best is None or len(rep.rearranged_events) < len(best.rearranged_events):
            best = rep
        if rep.verdict == "avoided":
            return rep
    if best is None:
        best = _compare(pair, family, N_max, identity, baseline, baseline,
                        list(baseline.events), "complete", tried)
    best.tried = tried
    best.notes.append("search exhausted without an avoiding rearrangement")
    return best
