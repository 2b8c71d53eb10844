"""Zero continuation through the homotopy F_N + τ·(next term), τ ∈ [0, 1].

A consecutive pair (a, b) of zeros on the critical line is followed through
the rotated real function Z_τ(t) = e^{iφ(t)} F_τ(1/2+it).  Besides the two
zeros, three critical points of Z_τ are tracked:

    E_L  between the left outer neighbour and a,
    E_M  between a and b,
    E_R  between b and the right outer neighbour.

A critical point is "right-signed" when it is a maximum with positive value
or a minimum with negative value.  While all three are right-signed, a sits
in (E_L, E_M) and b in (E_M, E_R), so both are found by bracketed root
finding.  When E_M turns wrong-signed the pair has left the line as a
symmetric pair ρ, 1 - conj(ρ) (a departure); when it turns back they return.
Sign flips of E_L or E_R are collisions with an outer neighbour and are
recorded separately.  The extremal value is convex in τ (a pointwise max of
affine functions), which makes flips easy to bracket and bisect.
"""
from __future__ import annotations

import csv
import io
import json
import math
from dataclasses import dataclass, field, replace
from typing import Callable

import numpy as np
from scipy.optimize import brentq

from .sections import (Rearrangement, Section, SectionSpec, base_index,
                       family_phase, family_phase_prime, fluctuation_intervals, mean_spacing,
                       term_coefficients)
from .special import ComplexPoint, ConvergenceError, DomainError, Tolerance, lambert_w


class TrackingLoss(RuntimeError):
    """The tracked structure could not be followed; carries the partial result."""

    def __init__(self, message: str, trajectory: "PairTrajectory | None" = None):
        super().__init__(message)
        self.trajectory = trajectory


class BoundaryZeroError(RuntimeError):
    """A zero lies on (or numerically at) the boundary of a counting box."""


class OffLineSpanError(ValueError):
    """A per-step classification was requested where a member is off the line."""


@dataclass(frozen=True)
class TrackerConfig:
    tau_step: float = 0.125
    min_tau_step: float = 1.0 / 4096
    motion: float = 0.25            # max motion per τ step, in local spacings
    grid_per_spacing: int = 256
    margin: float = 1.5             # window beyond E_L and E_R, in spacings
    online_eps: float = 1e-6
    collision_eps_factor: float = 0.05
    xtol: float = 1e-13
    newton_tol: float = 1e-12
    newton_max_iter: int = 60
    verify_counts: bool = False


@dataclass(frozen=True)
class ZeroRecord:
    location: ComplexPoint
    on_line: bool
    residual: float
    newton_iters: int = 0

    @property
    def t(self) -> float:
        return self.location.t

    @property
    def sigma(self) -> float:
        return self.location.sigma


@dataclass(frozen=True)
class CollisionEvent:
    N: int
    t_param: float
    location: ComplexPoint
    kind: str                # "departure" | "return"
    side: str = "pair"       # "pair" | "left" | "right"

    def to_dict(self) -> dict:
        return {"N": self.N, "t_param": self.t_param, "sigma": self.location.sigma,
                "t": self.location.t, "kind": self.kind, "side": self.side}


@dataclass(frozen=True)
class Sample:
    N: int
    t_param: float
    lo: ZeroRecord
    hi: ZeroRecord
    event: str = ""


@dataclass(frozen=True)
class _Sep:
    x: float
    kind: int        # +1 maximum, -1 minimum
    value: float
    slope: float     # d value / dτ

    @property
    def right(self) -> bool:
        return self.kind * self.value > 0


@dataclass(frozen=True)
class TrackerState:
    """Everything needed to resume a pair at (N, τ = 0)."""

    N: int
    seps: tuple
    offline: tuple       # (ρ_L, ρ_M, ρ_R), None where on the line
    a: ZeroRecord
    b: ZeroRecord


@dataclass
class PairTrajectory:
    pair: tuple
    family: str
    samples: list = field(default_factory=list)
    events: list = field(default_factory=list)
    outer_events: list = field(default_factory=list)
    rearrangement: Rearrangement | None = None
    status: str = "complete"
    message: str = ""
    forced_steps: int = 0
    checkpoints: dict = field(default_factory=dict, repr=False)

    def final(self) -> Sample:
        return self.samples[-1]

    def at(self, N: int, t_param: float = 0.0) -> Sample:
        for smp in self.samples:
            if smp.N == N and smp.t_param == t_param:
                return smp
        raise KeyError((N, t_param))

    CSV_COLUMNS = ("pair_lo", "pair_hi", "family", "N", "t_param", "sigma_lo", "t_lo",
                   "sigma_hi", "t_hi", "on_line", "event")

    def to_csv(self, comment: str | None = None) -> str:
        buf = io.StringIO()
        if comment:
            buf.write(f"# {comment}\n")
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(self.CSV_COLUMNS)
        for smp in self.samples:
            w.writerow([self.pair[0], self.pair[1], self.family, smp.N, _fmt(smp.t_param),
                        _fmt(smp.lo.sigma), _fmt(smp.lo.t), _fmt(smp.hi.sigma), _fmt(smp.hi.t),
                        int(smp.lo.on_line and smp.hi.on_line), smp.event])
        return buf.getvalue()

    def events_dict(self) -> dict:
        return {"pair": list(self.pair), "family": self.family, "status": self.status,
                "events": [e.to_dict() for e in self.events],
                "outer_events": [e.to_dict() for e in self.outer_events]}

    def events_json(self) -> str:
        return json.dumps(self.events_dict(), indent=2)


def _fmt(v: float) -> str:
    return repr(float(v))


# ------------------------------------------------------------------ homotopy

def family_scale(family: str) -> float:
    """Factor relating term index to the cut-off of the underlying Dirichlet sum.

    Accelerated terms place their weight transition at m ≈ N/2, hence 2; the
    Davenport-Heilbronn family also has conductor 5, hence 10.
    """
    return {"classical": 1.0, "accelerated": 2.0, "dh": 10.0}[family]


def _term_vector(family: str, n: int, M: int) -> np.ndarray:
    v = np.zeros(M)
    m0, vals = term_coefficients(family, n)
    v[m0 - 1:m0 - 1 + len(vals)] = vals
    return v


def _term_extent(family: str, n: int) -> int:
    return n if family == "classical" else n + 1


def _homotopy_vectors(spec: SectionSpec, M: int | None = None):
    terms = spec.term_indices()
    nxt = spec.next_term()
    need = max([_term_extent(spec.family, n) for n in terms + [nxt]])
    M = max(M or 0, need)
    c = np.zeros(M)
    for n in terms:
        m0, vals = term_coefficients(spec.family, n)
        c[m0 - 1:m0 - 1 + len(vals)] += vals
    return c, _term_vector(spec.family, nxt, M)


def homotopy_section(spec: SectionSpec, t_param: float) -> Section:
    """F_N + τ·(term at position N+1) as a Section."""
    if not 0.0 <= t_param <= 1.0:
        raise DomainError("t_param must lie in [0, 1]")
    c, r = _homotopy_vectors(spec)
    return Section(spec.family, c + t_param * r)


def homotopy_eval(spec: SectionSpec, t_param: float, s):
    """(1-τ) F_N(s) + τ F_{N+1}(s), computed as F_N(s) + τ·(next term)(s)."""
    return homotopy_section(spec, t_param)(s)


def _as_section(target) -> Section:
    if isinstance(target, Section):
        return target
    if isinstance(target, SectionSpec):
        return Section.from_spec(target)
    if isinstance(target, tuple) and len(target) == 2 and isinstance(target[0], SectionSpec):
        return homotopy_section(*target)
    raise TypeError(f"cannot evaluate {type(target).__name__}")


# ------------------------------------------------------------ zero location

def locate_online_zeros(target, t_lo: float, t_hi: float, grid_factor: float = 1 / 64,
                        xtol: float = 1e-12) -> list[ZeroRecord]:
    """Sign changes of the rotated function, bisected to xtol, sorted by t.

    The grid step is grid_factor times the local mean spacing.
    """
    if not t_hi > t_lo >= 10:
        raise DomainError("need t_hi > t_lo >= 10")
    sec = _as_section(target)
    h = grid_factor * mean_spacing(sec.family, t_hi)
    x = np.linspace(t_lo, t_hi, max(2, int(math.ceil((t_hi - t_lo) / h)) + 1))
    z = sec.rotated(x)
    out = []
    for i in np.nonzero(np.signbit(z[:-1]) != np.signbit(z[1:]))[0]:
        if z[i] == 0.0:
            root, its = x[i], 0
        else:
            root, res = brentq(sec.rotated, x[i], x[i + 1], xtol=xtol, full_output=True)
            its = res.iterations
        out.append(ZeroRecord(ComplexPoint(0.5, float(root)), True,
                              abs(sec.rotated(float(root))), its))
    return out


def _newton(sec: Section, s0: complex, tol: float, max_iter: int):
    s = complex(s0)
    f = sec(s)
    if f == 0:
        return s, 0, 0.0
    for it in range(1, max_iter + 1):
        step = f / sec.derivative(s)
        s -= step
        f = sec(s)
        if abs(step) <= tol * max(1.0, abs(s)) or f == 0:
            return s, it, abs(f)
    raise ConvergenceError(f"Newton did not converge from {s0}")


def refine_zero(target, guess, tol: Tolerance = Tolerance(abs_eps=1e-12, max_iter=60),
                online_eps: float = 1e-6) -> ZeroRecord:
    """Newton iteration on the analytic derivative of a section or homotopy."""
    sec = _as_section(target)
    s0 = ComplexPoint.of(guess).s
    if abs(sec(s0)) <= tol.abs_eps:
        return ZeroRecord(ComplexPoint.of(s0), abs(s0.real - 0.5) <= online_eps, abs(sec(s0)), 0)
    s, its, res = _newton(sec, s0, 1e-15, tol.max_iter)
    if res > max(tol.abs_eps, 1e-9 * (1 + abs(sec.dirichlet(s)))):
        raise ConvergenceError(f"residual {res:.3g} above tolerance at {s}")
    return ZeroRecord(ComplexPoint.of(s), abs(s.real - 0.5) <= online_eps, res, its)


# ------------------------------------------------------------ argument principle

def count_zeros_region(target, box, samples_per_unit: int = 64, max_depth: int = 40,
                       zero_rtol: float = 1e-10) -> int:
    """Number of zeros in box = (σ0, σ1, t0, t1) by boundary phase winding.

    Phase increments between samples are kept below π/2 by subdivision.
    """
    if callable(target) and not isinstance(target, (Section, SectionSpec, tuple)):
        f = target
    else:
        f = _as_section(target)
    s0, s1, t0, t1 = box
    if not (s0 < s1 and t0 < t1):
        raise DomainError("degenerate box")
    corners = [complex(s0, t0), complex(s1, t0), complex(s1, t1), complex(s0, t1)]
    total = 0.0
    for a, b in zip(corners, corners[1:] + corners[:1]):
        total += _edge_phase(f, a, b, samples_per_unit, max_depth, zero_rtol)
    wind = total / (2 * math.pi)
    k = round(wind)
    if abs(wind - k) > 0.25:
        raise ConvergenceError(f"winding number {wind:.3f} is not near an integer")
    return int(k)


def _edge_phase(f, a: complex, b: complex, per_unit: int, max_depth: int, zero_rtol: float):
    n = max(16, int(math.ceil(abs(b - a) * per_unit)))
    u = np.linspace(0.0, 1.0, n + 1)
    pts = a + (b - a) * u
    vals = np.asarray(f(pts), dtype=complex)
    scale = float(np.median(np.abs(vals)))
    floor = zero_rtol * scale
    if np.any(np.abs(vals) <= floor):
        raise BoundaryZeroError(f"zero on the boundary near {pts[np.argmin(np.abs(vals))]}")
    total = 0.0
    for i in range(n):
        total += _segment_phase(f, pts[i], pts[i + 1], vals[i], vals[i + 1], max_depth, floor)
    return total


def _segment_phase(f, za, zb, fa, fb, depth, floor):
    stack = [(za, zb, fa, fb, depth)]
    total = 0.0
    while stack:
        za, zb, fa, fb, d = stack.pop()
        dphi = float(np.angle(fb / fa))
        if abs(dphi) < 0.5 * math.pi:
            total += dphi
            continue
        if d == 0:
            raise ConvergenceError("phase step stays above π/2 after max subdivision")
        zm = 0.5 * (za + zb)
        fm = complex(f(zm))
        if abs(fm) <= floor:
            raise BoundaryZeroError(f"zero on the boundary near {zm}")
        stack.append((zm, zb, fm, fb, d - 1))
        stack.append((za, zm, fa, fm, d - 1))
    return total


# ------------------------------------------------------------ collision regions

def collision_intervals(t: float, min_len: int = 3, family: str = "classical",
                        scale: float | None = None):
    """Fluctuation intervals long enough to host a collision.

    Returns (chaotic_boundary, [(M, N_lo, N_hi), ...]).  The chaotic region is
    N <= chaotic_boundary, the upper end of the last interval (largest M) that
    still contains min_len integers.
    """
    if scale is None:
        scale = family_scale(family)
    M_max = max(1, int(scale * t / (2 * math.pi)))
    intervals = [iv for iv in fluctuation_intervals(t, M_max, scale)
                 if iv[2] - iv[1] + 1 >= min_len]
    boundary = intervals[-1][2] if intervals else 0
    return boundary, intervals


# ------------------------------------------------------------------ the tracker

def phase_point(family: str, k: int) -> float:
    """Ordinate where the family phase equals πk (Gram points for ζ)."""
    from .atlas import solve_phase
    if family == "dh":
        x = k - 0.125
        seed = 2 * math.pi * x / lambert_w(0, 5 * x / math.e)
    else:
        a = 8 * k + 1
        seed = a * math.pi / (4 * lambert_w(0, a / (8 * math.e)))
    return solve_phase(math.pi * k, seed, lambda t: family_phase(family, t),
                       lambda t: family_phase_prime(family, t))


def _phase_offset(family: str, n: int) -> int:
    # zero n of the base section sits at phase π(j + 1/2)
    return n - 1 if family == "dh" else n - 2


class _Window:
    """Dense grid of the rotated basis functions over [lo, hi]."""

    def __init__(self, family: str, lo: float, hi: float, h: float, M: int):
        n = int(math.ceil((hi - lo) / h)) + 1
        self.x = lo + h * np.arange(n)
        self.h = h
        self.lo, self.hi = float(self.x[0]), float(self.x[-1])
        logm = np.log(np.arange(1, M + 1, dtype=float))
        w = np.exp(-0.5 * logm)
        ph = np.asarray(family_phase(family, self.x))
        dph = np.asarray(family_phase_prime(family, self.x))
        arg = ph[:, None] - np.outer(self.x, logm)
        self.K = np.cos(arg) * w
        self.Kp = -np.sin(arg) * (dph[:, None] - logm) * w

    def load(self, c: np.ndarray, r: np.ndarray) -> None:
        both = np.stack([c, r], axis=1)
        self.z0, self.zr = (self.K @ both).T
        self.d0, self.dr = (self.Kp @ both).T

    def critical_points(self, tau: float):
        """(x, kind, value, slope) of all grid-resolved critical points of Z_τ."""
        d = self.d0 + tau * self.dr
        neg = np.signbit(d)
        idx = np.nonzero(neg[:-1] != neg[1:])[0]
        if idx.size == 0:
            return idx, idx, idx, idx
        d0, d1 = d[idx], d[idx + 1]
        u = d0 / (d0 - d1)
        kind = np.where(neg[idx + 1], 1, -1)
        z = self.z0 + tau * self.zr
        value = _hermite(z[idx], z[idx + 1], d0, d1, self.h, u)
        slope = _hermite(self.zr[idx], self.zr[idx + 1], self.dr[idx], self.dr[idx + 1], self.h, u)
        return self.x[idx] + u * self.h, kind, value, slope

    def sign_changes(self, tau: float, a: float, b: float):
        z = self.z0 + tau * self.zr
        i0 = max(0, int(np.searchsorted(self.x, a)))
        i1 = min(len(self.x), int(np.searchsorted(self.x, b)))
        seg = z[i0:i1]
        neg = np.signbit(seg)
        idx = np.nonzero(neg[:-1] != neg[1:])[0] + i0
        return [(float(self.x[i]), float(self.x[i + 1])) for i in idx]


def _hermite(f0, f1, d0, d1, h, u):
    u2, u3 = u * u, u * u * u
    return ((2 * u3 - 3 * u2 + 1) * f0 + (u3 - 2 * u2 + u) * h * d0
            + (-2 * u3 + 3 * u2) * f1 + (u3 - u2) * h * d1)


class _Rotated:
    """Fast scalar evaluation of Z_τ for one coefficient vector."""

    def __init__(self, family: str, c: np.ndarray):
        self.family = family
        self.logm = np.log(np.arange(1, len(c) + 1, dtype=float))
        self.w = c * np.exp(-0.5 * self.logm)

    def __call__(self, t: float) -> float:
        return float(np.cos(family_phase(self.family, t) - t * self.logm) @ self.w)


_PATTERNS = {
    (True, True, True): ("line", "line"),
    (True, False, True): ("pair", "pair"),
    (False, True, True): ("left", "line"),
    (True, True, False): ("line", "right"),
    (False, True, False): ("left", "right"),
}


class _StepRejected(Exception):
    pass


class _PairTracker:
    def __init__(self, pair, family, N_max, rearrangement, config: TrackerConfig,
                 N_record: int, resume: TrackerState | None, stop):
        n_lo, n_hi = pair
        if n_hi != n_lo + 1:
            raise ValueError("pair must be two consecutive labels (n, n+1)")
        self.pair = (int(n_lo), int(n_hi))
        self.family = family
        self.R = rearrangement
        self.cfg = config
        self.base = base_index(family)
        self.N_max = N_max
        self.N_record = N_record
        self.stop = stop
        if N_max < self.base:
            raise ValueError("N_max below the first term index")
        positions = range(self.base, N_max + 2)
        self.M = max(_term_extent(family, self._term(p)) for p in positions)
        self.traj = PairTrajectory(self.pair, family, rearrangement=rearrangement)
        self.resume = resume

    def _term(self, p: int) -> int:
        return p if self.R is None else self.R(p)

    # -------------------------------------------------------- set-up
    def _initial_state(self) -> TrackerState:
        j = _phase_offset(self.family, self.pair[0])
        if j < 0:
            raise ValueError(f"pair {self.pair} too low for the {self.family} family")
        xs = [phase_point(self.family, j + i) for i in range(3)]
        if xs[0] < 10:
            raise ValueError(f"pair {self.pair} sits below t = 10")
        c0 = term_coefficients(self.family, self.base)[1][0]
        seps = []
        for i, x in enumerate(xs):
            kind = 1 if (j + i) % 2 == 0 else -1
            seps.append(_Sep(x, kind, kind * abs(c0), 0.0))
        self.c = _term_vector(self.family, self.base, self.M)
        self.r = np.zeros(self.M)
        a = self._online(xs[0], xs[1], None, 0.0)
        b = self._online(xs[1], xs[2], None, 0.0)
        return TrackerState(self.base, tuple(seps), (None, None, None), a, b)

    def _prefix(self, N: int) -> np.ndarray:
        c = np.zeros(self.M)
        for p in range(self.base, N + 1):
            n = self._term(p)
            m0, vals = term_coefficients(self.family, n)
            c[m0 - 1:m0 - 1 + len(vals)] += vals
        return c

    def _spacing(self, x: float) -> float:
        return mean_spacing(self.family, x)

    def _build_window(self, seps) -> None:
        sp = self._spacing(seps[1].x)
        lo = seps[0].x - self.cfg.margin * sp
        hi = seps[2].x + self.cfg.margin * sp
        self.win = _Window(self.family, max(lo, 5.0), hi, sp / self.cfg.grid_per_spacing, self.M)
        self.win.load(self.c, self.r)
        self.sp = sp

    def _needs_recenter(self, seps) -> bool:
        room = 0.5 * self.cfg.margin * self.sp
        width = seps[2].x - seps[0].x + 2 * self.cfg.margin * self.sp
        return (seps[0].x - self.win.lo < room or self.win.hi - seps[2].x < room
                or (self.win.hi - self.win.lo) > 1.5 * width)

    # -------------------------------------------------------- members
    def _zf(self, tau: float) -> _Rotated:
        return _Rotated(self.family, self.c + tau * self.r)

    def _online(self, lo: float, hi: float, prev_t: float | None, tau: float) -> ZeroRecord:
        zf = self._zf(tau)
        cells = self.win.sign_changes(tau, lo, hi) if hasattr(self, "win") else []
        if cells:
            ref = prev_t if prev_t is not None else 0.5 * (lo + hi)
            a, b = min(cells, key=lambda cell: abs(0.5 * (cell[0] + cell[1]) - ref))
            if zf(a) * zf(b) > 0:
                a, b = lo, hi
        else:
            a, b = lo, hi
        fa, fb = zf(a), zf(b)
        if fa == 0.0:
            return ZeroRecord(ComplexPoint(0.5, a), True, 0.0, 0)
        if fa * fb > 0:
            raise _StepRejected("no sign change in member bracket")
        root, res = brentq(zf, a, b, xtol=self.cfg.xtol, full_output=True)
        return ZeroRecord(ComplexPoint(0.5, float(root)), True, abs(zf(root)), res.iterations)

    def _offline(self, sep: _Sep, prev: complex | None, tau: float):
        sec = Section(self.family, self.c + tau * self.r)
        zf = self._zf(tau)
        if prev is None:
            h = 1e-3 * self.sp
            curv = (zf(sep.x + h) - 2 * zf(sep.x) + zf(sep.x - h)) / (h * h)
            delta = math.sqrt(max(2 * abs(sep.value) / max(abs(curv), 1e-300), 0.0))
            prev = complex(0.5 + delta, sep.x)
        try:
            s, its, res = _newton(sec, prev, self.cfg.newton_tol, self.cfg.newton_max_iter)
        except (ConvergenceError, ZeroDivisionError, FloatingPointError):
            raise _StepRejected("off-line Newton failed")
        if s.real < 0.5:
            s = complex(1.0 - s.real, s.imag)
        if abs(s - prev) > self.cfg.motion * self.sp:
            raise _StepRejected("off-line zero jumped")
        return s, its, res

    def _members(self, tau, seps, prev: TrackerState | None, offline_prev):
        pattern = tuple(sp.right for sp in seps)
        if pattern not in _PATTERNS:
            raise TrackingLoss(f"inconsistent separator signs {pattern}")
        ka, kb = _PATTERNS[pattern]
        offline = [None, None, None]
        recs = {}
        for slot, which, span, sep_i in (("a", ka, (0, 1), 0), ("b", kb, (1, 2), 2)):
            prev_rec = getattr(prev, slot) if prev is not None else None
            if which == "line":
                prev_t = prev_rec.t if prev_rec is not None and prev_rec.on_line else None
                recs[slot] = self._online(seps[span[0]].x, seps[span[1]].x, prev_t, tau)
                continue
            i = 1 if which == "pair" else sep_i
            if offline[i] is None:
                offline[i] = self._offline(seps[i], offline_prev[i], tau)
            s, its, res = offline[i]
            if which == "pair" and slot == "a":
                loc = ComplexPoint(1.0 - s.real, s.imag)
            else:
                loc = ComplexPoint(s.real, s.imag)
            recs[slot] = ZeroRecord(loc, False, res, its)
        rhos = tuple(None if o is None else o[0] for o in offline)
        return recs["a"], recs["b"], rhos

    # -------------------------------------------------------- separators
    def _seps_at(self, tau, old, limit):
        xs, kinds, vals, slopes = self.win.critical_points(tau)
        out = []
        for sep in old:
            mask = kinds == sep.kind
            if not np.any(mask):
                return None
            cand = np.nonzero(mask)[0]
            i = cand[np.argmin(np.abs(xs[cand] - sep.x))]
            if abs(xs[i] - sep.x) > limit:
                return None
            out.append(_Sep(float(xs[i]), sep.kind, float(vals[i]), float(slopes[i])))
        if not (out[0].x < out[1].x < out[2].x):
            return None
        return tuple(out)

    def _flip_time(self, i, sep0: _Sep, tau0, tau1):
        lo, hi, x = tau0, tau1, sep0.x
        start = sep0.right
        for _ in range(60):
            mid = 0.5 * (lo + hi)
            xs, kinds, vals, _ = self.win.critical_points(mid)
            cand = np.nonzero(kinds == sep0.kind)[0]
            if cand.size == 0:
                raise TrackingLoss("critical point vanished during event bisection")
            k = cand[np.argmin(np.abs(xs[cand] - x))]
            right = sep0.kind * vals[k] > 0
            if right == start:
                lo, x = mid, float(xs[k])
            else:
                hi = mid
            if hi - lo <= 1e-13:
                break
        return 0.5 * (lo + hi), x

    @staticmethod
    def _may_dip(s0: _Sep, s1: _Sep, tau0, tau1) -> bool:
        # f = kind·value is convex in τ; bound its minimum by the two tangents
        f0, f1 = s0.kind * s0.value, s1.kind * s1.value
        g0, g1 = s0.kind * s0.slope, s1.kind * s1.slope
        if f0 <= 0 or f1 <= 0 or g0 >= 0 or g1 <= 0:
            return False
        tx = (f1 - f0 + g0 * tau0 - g1 * tau1) / (g0 - g1)
        return f0 + g0 * (tx - tau0) < 0

    # -------------------------------------------------------- main loop
    def run(self) -> PairTrajectory:
        traj = self.traj
        if self.resume is None:
            state = self._initial_state()
            N0 = self.base
        else:
            state = self.resume
            N0 = state.N
            self.c = self._prefix(N0)
        offline = state.offline
        for N in range(N0, self.N_max + 1):
            if N > N0:
                self.c = self.c + self.r
            if N == self.N_max:
                self.r = np.zeros(self.M)
            else:
                self.r = _term_vector(self.family, self._term(N + 1), self.M)
            if N == N0 or self._needs_recenter(state.seps):
                self._build_window(state.seps)
            else:
                self.win.load(self.c, self.r)
            state = replace(state, N=N)
            traj.checkpoints[N] = state
            pending = getattr(self, "_pending", "")
            self._pending = ""
            if N >= self.N_record:
                traj.samples.append(Sample(N, 0.0, state.a, state.b, pending))
            if self.cfg.verify_counts:
                self._verify(state, 0.0)
            if N == self.N_max:
                break
            state, offline = self._advance(N, state, offline)
            if traj.status == "aborted":
                break
        return traj

    def _advance(self, N, state, offline):
        cfg = self.cfg
        tau, h = 0.0, cfg.tau_step
        while tau < 1.0:
            tau1 = min(1.0, tau + h)
            try:
                new_state, new_off, events = self._step(N, state, offline, tau, tau1,
                                                        force=h <= cfg.min_tau_step)
            except _StepRejected as exc:
                if h <= cfg.min_tau_step:
                    raise TrackingLoss(f"step rejected at N={N}, τ={tau}: {exc}")
                h *= 0.5
                continue
            label = ";".join(f"{e.kind}" if e.side == "pair" else f"{e.kind}_{e.side}"
                             for e in events)
            for e in events:
                (self.traj.events if e.side == "pair" else self.traj.outer_events).append(e)
            state, offline, tau = new_state, new_off, tau1
            if tau1 < 1.0:
                if N >= self.N_record:
                    self.traj.samples.append(Sample(N, tau1, state.a, state.b, label))
            else:
                self._pending = label
            if events and self.stop is not None and self.stop(self.traj):
                self.traj.status = "aborted"
                return state, offline
            if self._needs_recenter(state.seps):
                self._build_window(state.seps)
            h = min(cfg.tau_step, 2 * h)
        return state, offline

    def _step(self, N, state, offline, tau0, tau1, force):
        limit = self.cfg.motion * self.sp
        seps1 = self._seps_at(tau1, state.seps, limit if not force else 2 * limit)
        if seps1 is None:
            raise _StepRejected("critical point lost")
        if not force:
            for s0, s1 in zip(state.seps, seps1):
                if self._may_dip(s0, s1, tau0, tau1):
                    raise _StepRejected("possible double flip")
        events = []
        for i, (s0, s1) in enumerate(zip(state.seps, seps1)):
            if s0.right != s1.right:
                tstar, x = self._flip_time(i, s0, tau0, tau1)
                kind = "departure" if s0.right else "return"
                side = ("left", "pair", "right")[i]
                events.append(CollisionEvent(N, tstar, ComplexPoint(0.5, x), kind, side))
        events.sort(key=lambda e: e.t_param)
        a, b, rhos = self._members(tau1, seps1, state, offline)
        if not force:
            for old, new in ((state.a, a), (state.b, b)):
                if old.on_line and new.on_line and abs(new.t - old.t) > limit:
                    raise _StepRejected("member moved too far")
        else:
            self.traj.forced_steps += 1
        return TrackerState(N, seps1, rhos, a, b), rhos, events

    def _verify(self, state, tau):
        pattern = tuple(sp.right for sp in state.seps)
        if pattern not in ((True, True, True), (True, False, True)):
            return
        sec = Section(self.family, self.c + tau * self.r)
        box = (-0.5, 1.5, state.seps[0].x, state.seps[2].x)
        n = count_zeros_region(sec, box)
        if n != 2:
            raise TrackingLoss(f"{n} zeros between the outer separators at N={state.N}")


def track_pair(pair, family: str, N_max: int, rearrangement: Rearrangement | None = None,
               N_start: int | None = None, config: TrackerConfig = TrackerConfig(),
               resume: TrackerState | None = None,
               stop: Callable[[PairTrajectory], bool] | None = None,
               on_loss: str = "raise") -> PairTrajectory:
    """Follow the consecutive zeros (n, n+1) from the first section up to N_max.

    Labels follow the atlas: for ζ families label n starts at fl_zero(n); for
    the DH family at dh_zero(n).  Samples are recorded for N >= N_start.
    With on_loss="partial" a tracking loss returns the partial trajectory
    with status "partial" instead of raising.
    """
    start = base_index(family) if N_start is None else N_start
    tracker = _PairTracker(pair, family, N_max, rearrangement, config, start, resume, stop)
    try:
        return tracker.run()
    except TrackingLoss as exc:
        tracker.traj.status = "partial"
        tracker.traj.message = str(exc)
        if on_loss == "partial":
            return tracker.traj
        exc.trajectory = tracker.traj
        raise


def classify_step(traj: PairTrajectory, N: int, tol: float = 1e-12) -> str:
    """Attracting if the pair gap shrinks from N to N+1, repelling if it grows."""
    s0, s1 = traj.at(N), traj.at(N + 1)
    for smp in (s0, s1):
        if not (smp.lo.on_line and smp.hi.on_line):
            raise OffLineSpanError(f"pair is off the line at N={smp.N}")
    g0 = abs(s0.hi.t - s0.lo.t)
    g1 = abs(s1.hi.t - s1.lo.t)
    if abs(g1 - g0) <= tol:
        return "neutral"
    return "repelling" if g1 > g0 else "attracting"
