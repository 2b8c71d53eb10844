"""Closed-form zero predictions and Gram-point bookkeeping.

Index conventions.  fl_zero(n) sits (asymptotically) where θ(t) = π(n - 3/2),
so with Gram points θ(g_n) = πn the ladders interleave as
fl_zero(n) < g_{n-1} < fl_zero(n+1).  The labels also line up with the
usual numbering of the zeros of ζ: fl_zero(n) is close to the n-th zero.
"""
from __future__ import annotations

import csv
import io
import math
import warnings
from dataclasses import dataclass, asdict
from typing import Iterable, Sequence

import numpy as np
from scipy.optimize import brentq

from .sections import Section
from .special import (ConvergenceError, DomainError, hardy_z, lambert_w, rs_theta,
                      rs_theta_prime)


@dataclass(frozen=True)
class AtlasZero:
    family: str
    k: int
    index: int
    t_predicted: float
    t_refined: float = float("nan")
    residual: float = float("nan")


def fl_zero(n: int) -> float:
    """t^0_n = (8n-11)π / (4 W_0((8n-11)/(8e))), the zeros of 1 + χ."""
    if n < 1:
        raise DomainError("fl_zero needs n >= 1")
    a = 8 * n - 11
    return a * math.pi / (4 * lambert_w(0, a / (8 * math.e)))


def fl_residual(n: int, t: float) -> float:
    """(t/2π) ln(t/2πe) - (n - 11/8); zero exactly at fl_zero(n)."""
    x = t / (2 * math.pi)
    return x * math.log(x / math.e) - (n - 11 / 8)


def bk_branch(k: int, m: int) -> int:
    """Lambert branch used for the m-th zero of B_k: -1 for m <= k², else 0."""
    return -1 if m <= k * k else 0


def bk_zero(k: int, m: int) -> float:
    """Zeros of B_k on the line: W_{-1} for m <= k², W_0 (index m - 2k²) after."""
    if k < 1 or m < 1:
        raise DomainError("bk_zero needs k >= 1 and m >= 1")
    k2 = k * k
    if m <= k2:
        a = 5 - 8 * m
        x = a / (8 * k2 * math.e)
        if not (-1 / math.e <= x < 0):
            raise DomainError(f"W_-1 argument {x} outside [-1/e, 0)")
        return a * math.pi / (4 * lambert_w(-1, x))
    a = 8 * (m - 2 * k2) - 3
    x = a / (8 * k2 * math.e)
    if x < -1 / math.e:
        raise DomainError(f"W_0 argument {x} below -1/e")
    if a == 0:
        raise DomainError("degenerate index: numerator and W_0 both vanish")
    return a * math.pi / (4 * lambert_w(0, x))


def bk_zero_alt_window(k: int, N: float) -> tuple[float, float]:
    """The j-range [(N/π) ln(N/(πk²e)) + 11/8, that + (1/π) ln(N/(πk²))]."""
    L = math.log(N / (math.pi * k * k))
    lo = (N / math.pi) * (L - 1) + 11 / 8
    return lo, lo + L / math.pi


def bk_zero_alt(k: int, N: float, j: int) -> float:
    """T~_j^k = (8N + 8πj - 11π) / (4(ln N - ln πk²)), verbatim.

    Diagnostic model only.  N here plays the role of t/2.
    """
    if N <= math.pi * k * k:
        raise DomainError("bk_zero_alt needs N > πk²")
    lo, hi = bk_zero_alt_window(k, N)
    if not (lo <= j <= hi):
        warnings.warn(f"j = {j} outside the window [{lo:.3f}, {hi:.3f}]", RuntimeWarning)
    return (8 * N + 8 * math.pi * j - 11 * math.pi) / (4 * (math.log(N) - math.log(math.pi * k * k)))


def spacing(N: float, k: int = 1) -> float:
    """|2π / (ln N - ln πk²)|, the gap between consecutive zeros of B_k."""
    d = math.log(N) - math.log(math.pi * k * k)
    if N < 1 or k < 1 or d == 0:
        raise DomainError("spacing is singular or undefined here")
    return abs(2 * math.pi / d)


def gram_seed(n: int) -> float:
    """(8n+1)π / (4 W_0((8n+1)/(8e)))."""
    a = 8 * n + 1
    return a * math.pi / (4 * lambert_w(0, a / (8 * math.e)))


def solve_phase(target: float, seed: float, phase=rs_theta, phase_prime=rs_theta_prime,
                tol: float = 1e-12, max_iter: int = 50) -> float:
    """Newton solve of phase(t) = target from seed."""
    t = seed
    for _ in range(max_iter):
        step = (phase(t) - target) / phase_prime(t)
        t -= step
        if abs(step) <= tol * max(1.0, abs(t)):
            return t
    raise ConvergenceError(f"phase inversion did not converge for target {target}")


def gram_point(n: int) -> float:
    """g_n with θ(g_n) = πn, refined from the Lambert seed."""
    if n < 0:
        raise DomainError("gram_point needs n >= 0")
    return solve_phase(math.pi * n, gram_seed(n))


@dataclass(frozen=True)
class GramLawResult:
    n: int
    g: float
    value: float
    holds: bool


def gram_law_check(n: int) -> GramLawResult:
    """Sign of (-1)^n Z(g_n) with Z the Hardy function of ζ itself."""
    g = gram_point(n)
    v = (-1) ** n * hardy_z(g)
    return GramLawResult(n, g, float(v), bool(v > 0))


_ZETA1 = Section("classical", np.ones(1))


def zeta1_zero(n: int) -> float:
    """Zero of ζ_1 on the line near fl_zero(n), refined by bisection."""
    t0 = fl_zero(n)
    h = 0.5 * math.pi / rs_theta_prime(max(t0, 7.0))
    a, b = max(t0 - h, 6.5), t0 + h
    fa, fb = _ZETA1.rotated(a), _ZETA1.rotated(b)
    if fa * fb > 0:
        raise ConvergenceError(f"no sign change of ζ_1 around fl_zero({n})")
    return brentq(_ZETA1.rotated, a, b, xtol=1e-13, rtol=1e-15)


@dataclass
class InterlaceReport:
    ok: bool
    first_violation: int | None
    checked: int


def interlace_check(n_range: tuple[int, int], zeros: Sequence[float] | None = None,
                    grams: Sequence[float] | None = None) -> InterlaceReport:
    """Strict alternation z_a < g_{a-1} < z_{a+1} < ... < z_b < g_{b-1}.

    ``zeros`` and ``grams`` may be supplied (same length, aligned as above);
    otherwise ζ_1 zeros and refined Gram points are computed.  A violation is
    reported by its position in the merged sequence.
    """
    a, b = n_range
    if zeros is None:
        zeros = [zeta1_zero(n) for n in range(a, b + 1)]
    if grams is None:
        grams = [gram_point(n - 1) for n in range(a, b + 1)]
    merged = [v for pair in zip(zeros, grams) for v in pair]
    for i in range(len(merged) - 1):
        if not merged[i] < merged[i + 1]:
            return InterlaceReport(False, i, len(merged))
    return InterlaceReport(True, None, len(merged))


def zeta_zeros_between(t_lo: float, t_hi: float, per_spacing: int = 16) -> list[float]:
    """Zeros of ζ on the line in (t_lo, t_hi) from sign changes of Z(t)."""
    if not t_hi > t_lo > 0:
        raise DomainError("need t_hi > t_lo > 0")
    h = math.pi / rs_theta_prime(max(t_hi, 7.0)) / per_spacing
    x = np.linspace(t_lo, t_hi, int(math.ceil((t_hi - t_lo) / h)) + 1)
    z = np.array([hardy_z(v) for v in x])
    out = []
    for i in np.nonzero(np.signbit(z[:-1]) != np.signbit(z[1:]))[0]:
        out.append(brentq(hardy_z, x[i], x[i + 1], xtol=1e-12))
    return out


def align_indices(predicted: Sequence[float], found: Sequence[float]) -> dict[int, int]:
    """Map each predicted position to the index of the nearest found one."""
    found = np.asarray(found, dtype=float)
    if found.size == 0:
        return {}
    return {i: int(np.argmin(np.abs(found - p))) for i, p in enumerate(predicted)}


def ladder(kind: str, indices: Iterable[int], k: int = 1) -> list[AtlasZero]:
    """Predicted and refined ladder entries.

    kind: "fl" (zeros of ζ_1), "bk" (zeros of B_k), "gram", or "dh".
    """
    rows = []
    for n in indices:
        if kind == "fl":
            t = fl_zero(n)
            r = zeta1_zero(n)
            rows.append(AtlasZero(kind, 1, n, t, r, fl_residual(n, t)))
        elif kind == "bk":
            t = bk_zero(k, n)
            r = _refine_bk(k, t)
            rows.append(AtlasZero(kind, k, n, t, r, abs(t - r)))
        elif kind == "gram":
            g = gram_point(n)
            rows.append(AtlasZero(kind, 0, n, gram_seed(n), g, rs_theta(g) - math.pi * n))
        elif kind == "dh":
            from .dh import dh_zero
            from .sections import family_phase, family_phase_prime
            t = dh_zero(n)
            r = solve_phase(math.pi * (n - 0.5), t, lambda x: family_phase("dh", x),
                            lambda x: family_phase_prime("dh", x))
            rows.append(AtlasZero(kind, 0, n, t, r, abs(t - r)))
        else:
            raise ValueError(f"unknown ladder kind {kind!r}")
    return rows


def _refine_bk(k: int, t: float) -> float:
    # On the line B_k rotates to k^{-1/2} cos(θ(t) - t ln k); snap to its zero.
    lk = math.log(k)
    target = math.pi * (round((rs_theta(t) - t * lk) / math.pi - 0.5) + 0.5)
    return solve_phase(target, t, lambda x: rs_theta(x) - x * lk,
                       lambda x: rs_theta_prime(x) - lk)


LADDER_COLUMNS = ("family", "k", "index", "t_predicted", "t_refined", "residual")


def ladder_csv(rows: Iterable[AtlasZero], header_comment: str | None = None) -> str:
    buf = io.StringIO()
    if header_comment:
        buf.write(f"# {header_comment}\n")
    w = csv.DictWriter(buf, fieldnames=LADDER_COLUMNS, lineterminator="\n")
    w.writeheader()
    for r in rows:
        d = asdict(r)
        w.writerow({c: (f"{d[c]:.12g}" if isinstance(d[c], float) else d[c]) for c in LADDER_COLUMNS})
    return buf.getvalue()
