"""Sections of the approximate functional equation.

Every family handled here has the shape

    F(s) = 1/2 [A(s) + R(s) A(1-s)],    A(s) = sum_m c_m m^{-s},

with real coefficients c_m.  R = χ for the zeta families and the ratio of
gamma completions for the Davenport-Heilbronn family.  A section is thus
fully described by its coefficient vector, which is what the tracker
manipulates; the per-term functions below are kept for direct use.
"""
from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from functools import lru_cache
from pathlib import Path

import numpy as np

from .special import (LN2, DomainError, as_complex, chi_log_derivative, digamma,
                      log_chi, log_gamma, rs_theta, rs_theta_prime)

FAMILIES = ("classical", "accelerated", "dh")
LN_PI_OVER_5 = math.log(math.pi / 5)


def base_index(family: str) -> int:
    """First term index: B_1 for classical, B~_0 for the accelerated families."""
    _check_family(family)
    return 1 if family == "classical" else 0


def _check_family(family: str) -> None:
    if family not in FAMILIES:
        raise ValueError(f"unknown family {family!r}; expected one of {FAMILIES}")


# ---------------------------------------------------------------- rearrangements

@dataclass(frozen=True)
class Piece:
    lo: int
    hi: int
    kind: str = "identity"
    c: int | None = None

    def __post_init__(self):
        if self.lo > self.hi:
            raise ValueError(f"empty piece [{self.lo}, {self.hi}]")
        if self.kind not in ("identity", "reflect"):
            raise ValueError(f"unknown piece kind {self.kind!r}")
        if self.kind == "reflect" and self.c is None:
            raise ValueError("reflect piece needs a constant c")

    def apply(self, n: int) -> int:
        return n if self.kind == "identity" else self.c - n


@dataclass(frozen=True)
class Rearrangement:
    """Piecewise permutation of term indices, identity outside ``domain``.

    Each piece is the identity or a reflection n -> c - n on an integer
    interval.  The induced map on the domain is checked to be a bijection.
    """

    domain: tuple[int, int]
    pieces: tuple[Piece, ...] = ()
    _table: dict = field(default=None, repr=False, compare=False)

    def __post_init__(self):
        lo, hi = self.domain
        if lo > hi:
            raise ValueError("empty domain")
        pieces = tuple(sorted(self.pieces, key=lambda p: p.lo))
        object.__setattr__(self, "pieces", pieces)
        for a, b in zip(pieces, pieces[1:]):
            if b.lo <= a.hi:
                raise ValueError(f"pieces overlap at {b.lo}")
        if pieces and (pieces[0].lo < lo or pieces[-1].hi > hi):
            raise ValueError("piece outside the domain")
        table = {}
        for p in pieces:
            for n in range(p.lo, p.hi + 1):
                table[n] = p.apply(n)
        images = sorted(table.get(n, n) for n in range(lo, hi + 1))
        if images != list(range(lo, hi + 1)):
            raise ValueError("rearrangement is not a bijection on its domain")
        object.__setattr__(self, "_table", table)

    def __call__(self, n: int) -> int:
        return self._table.get(n, n)

    def order(self, start: int, stop: int) -> list[int]:
        """Term indices at positions start..stop inclusive."""
        return [self(p) for p in range(start, stop + 1)]

    @property
    def is_identity(self) -> bool:
        return all(k == v for k, v in self._table.items())

    @classmethod
    def identity(cls, domain=(0, 0)) -> "Rearrangement":
        return cls(tuple(domain))

    @classmethod
    def from_table(cls, mapping, domain=None) -> "Rearrangement":
        """Build from an explicit map (dict or sequence of images).

        Each moved index becomes a one-point reflection with c = n + R(n).
        """
        if not isinstance(mapping, dict):
            items = list(mapping)
            start = 0 if domain is None else domain[0]
            mapping = {start + i: v for i, v in enumerate(items)}
        keys = sorted(mapping)
        if domain is None:
            domain = (keys[0], keys[-1])
        pieces = [Piece(n, n, "reflect", n + mapping[n]) for n in keys if mapping[n] != n]
        return cls(tuple(domain), tuple(pieces))

    def to_dict(self) -> dict:
        return {"domain": list(self.domain),
                "pieces": [{"from": p.lo, "to": p.hi, "kind": p.kind,
                            **({"c": p.c} if p.kind == "reflect" else {})}
                           for p in self.pieces]}

    @classmethod
    def from_dict(cls, data: dict) -> "Rearrangement":
        pieces = tuple(Piece(int(p["from"]), int(p["to"]), p.get("kind", "identity"),
                             None if p.get("c") is None else int(p["c"]))
                       for p in data.get("pieces", []))
        return cls(tuple(int(v) for v in data["domain"]), pieces)

    def to_json(self, path=None) -> str:
        text = json.dumps(self.to_dict(), indent=2)
        if path is not None:
            Path(path).write_text(text + "\n")
        return text

    @classmethod
    def from_json(cls, source) -> "Rearrangement":
        """Load from a JSON string or a file path."""
        text = str(source)
        if not text.lstrip().startswith("{"):
            text = Path(source).read_text()
        return cls.from_dict(json.loads(text))

    def key(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True)


@dataclass(frozen=True)
class SectionSpec:
    family: str
    n_terms: int
    rearrangement: Rearrangement | None = None

    def __post_init__(self):
        _check_family(self.family)
        if self.n_terms < base_index(self.family):
            raise ValueError(f"{self.family} sections need n_terms >= {base_index(self.family)}")

    def term_indices(self) -> list[int]:
        """Terms that make up the section, in summation order."""
        start = base_index(self.family)
        if self.rearrangement is None:
            return list(range(start, self.n_terms + 1))
        return self.rearrangement.order(start, self.n_terms)

    def next_term(self) -> int:
        """Term added when stepping from N to N+1."""
        n = self.n_terms + 1
        return n if self.rearrangement is None else self.rearrangement(n)


# ------------------------------------------------------------ coefficient engine

@lru_cache(maxsize=4096)
def _binomial_row_cached(n: int) -> np.ndarray:
    if n == 0:
        return np.array([0.5])
    k = np.arange(n, dtype=float)
    logs = np.concatenate(([0.0], np.cumsum(np.log((n - k) / (k + 1.0)))))
    row = np.exp(logs - (n + 1) * LN2)
    row.setflags(write=False)
    return row


def binomial_row(n: int) -> np.ndarray:
    """C(n,k)/2^{n+1} for k = 0..n, via the log of w_{k+1} = w_k (n-k)/(k+1)."""
    if n < 0:
        raise ValueError("n must be non-negative")
    return _binomial_row_cached(int(n))


def term_coefficients(family: str, n: int) -> tuple[int, np.ndarray]:
    """Coefficients contributed by term n as (first m, values for m, m+1, ...)."""
    if family == "classical":
        if n < 1:
            raise ValueError("classical terms start at n = 1")
        return n, np.ones(1)
    if n < 0:
        raise ValueError("accelerated terms start at n = 0")
    row = binomial_row(n)
    if family == "accelerated":
        return 1, row
    if family == "dh":
        from .dh import dh_coefficients
        return 1, row * dh_coefficients(n + 1)
    _check_family(family)


def add_term(c: np.ndarray, family: str, n: int, scale: float = 1.0) -> np.ndarray:
    """Return c plus ``scale`` times term n, growing the array if needed."""
    m0, vals = term_coefficients(family, n)
    need = m0 - 1 + len(vals)
    if need > len(c):
        c = np.concatenate((c, np.zeros(need - len(c))))
    c[m0 - 1:need] += scale * vals
    return c


def coefficients(spec: SectionSpec) -> np.ndarray:
    """c_1..c_M of the section, summed in SectionSpec term order."""
    c = np.zeros(0)
    for n in spec.term_indices():
        c = add_term(c, spec.family, n)
    return c


def term_vector(family: str, n: int) -> np.ndarray:
    return add_term(np.zeros(0), family, n)


# ------------------------------------------------------------ functional factor

def family_log_factor(family: str, s):
    """log R(s) with F(s) = R(s) F(1-s)."""
    if family == "dh":
        return log_completion_dh(1 - as_complex(s)) - log_completion_dh(s)
    return log_chi(s)


def family_log_factor_derivative(family: str, s):
    if family == "dh":
        s = as_complex(s)
        return LN_PI_OVER_5 - 0.5 * digamma(0.5 * (2 - s)) - 0.5 * digamma(0.5 * (1 + s))
    return chi_log_derivative(s)


def log_completion_dh(s):
    """log G(s) with G(s) = (π/5)^{-s/2} Γ((1+s)/2)."""
    s = as_complex(s)
    return -0.5 * s * LN_PI_OVER_5 + log_gamma(0.5 * (1 + s))


def family_phase(family: str, t):
    """φ(t) such that e^{iφ(t)} F(1/2+it) is real."""
    if family == "dh":
        if isinstance(t, (float, int)):
            return -0.5 * t * LN_PI_OVER_5 + log_gamma(complex(0.75, 0.5 * t)).imag
        t_arr = np.asarray(t, dtype=float)
        out = -0.5 * t_arr * LN_PI_OVER_5 + np.imag(log_gamma(0.75 + 0.5j * t_arr))
        return float(out) if np.ndim(out) == 0 else out
    return rs_theta(t)


def family_phase_prime(family: str, t):
    if family == "dh":
        if isinstance(t, (float, int)):
            return -0.5 * LN_PI_OVER_5 + 0.5 * digamma(complex(0.75, 0.5 * t)).real
        t_arr = np.asarray(t, dtype=float)
        out = -0.5 * LN_PI_OVER_5 + 0.5 * np.real(digamma(0.75 + 0.5j * t_arr))
        return float(out) if np.ndim(out) == 0 else out
    return rs_theta_prime(t)


def mean_spacing(family: str, t: float) -> float:
    """Local mean gap π/φ'(t) between consecutive zeros on the line."""
    return math.pi / family_phase_prime(family, t)


@lru_cache(maxsize=8)
def _logs(M: int) -> np.ndarray:
    out = np.log(np.arange(1, M + 1, dtype=float))
    out.setflags(write=False)
    return out


@dataclass
class Section:
    """A finite Dirichlet polynomial c together with its family's factor R."""

    family: str
    c: np.ndarray

    def __post_init__(self):
        _check_family(self.family)
        self.c = np.asarray(self.c, dtype=float)

    @classmethod
    def from_spec(cls, spec: SectionSpec) -> "Section":
        return cls(spec.family, coefficients(spec))

    @property
    def logm(self) -> np.ndarray:
        return _logs(len(self.c))

    def dirichlet(self, s):
        """A(s) = sum c_m m^{-s}."""
        s = as_complex(s)
        arr = np.atleast_1d(s)
        out = np.exp(-np.outer(arr, self.logm)) @ self.c
        return complex(out[0]) if np.ndim(s) == 0 else out.reshape(np.shape(s))

    def dirichlet_prime(self, s):
        s = as_complex(s)
        arr = np.atleast_1d(s)
        out = -(np.exp(-np.outer(arr, self.logm)) @ (self.c * self.logm))
        return complex(out[0]) if np.ndim(s) == 0 else out.reshape(np.shape(s))

    def __call__(self, s):
        s = as_complex(s)
        R = np.exp(family_log_factor(self.family, s))
        return 0.5 * (self.dirichlet(s) + R * self.dirichlet(1 - s))

    def derivative(self, s):
        s = as_complex(s)
        R = np.exp(family_log_factor(self.family, s))
        dR = family_log_factor_derivative(self.family, s)
        a1 = self.dirichlet(1 - s)
        return 0.5 * (self.dirichlet_prime(s) + R * (dR * a1 - self.dirichlet_prime(1 - s)))

    def rotated(self, t):
        """Z(t) = e^{iφ} F(1/2+it) = sum c_m m^{-1/2} cos(φ(t) - t ln m)."""
        t_arr = np.atleast_1d(np.asarray(t, dtype=float))
        ph = np.atleast_1d(family_phase(self.family, t_arr))
        w = self.c * np.exp(-0.5 * self.logm)
        out = np.cos(ph[:, None] - np.outer(t_arr, self.logm)) @ w
        return float(out[0]) if np.ndim(t) == 0 else out

    def rotated_prime(self, t):
        t_arr = np.atleast_1d(np.asarray(t, dtype=float))
        ph = np.atleast_1d(family_phase(self.family, t_arr))
        dph = np.atleast_1d(family_phase_prime(self.family, t_arr))
        w = self.c * np.exp(-0.5 * self.logm)
        arg = ph[:, None] - np.outer(t_arr, self.logm)
        out = -(np.sin(arg) * (dph[:, None] - self.logm)) @ w
        return float(out[0]) if np.ndim(t) == 0 else out


# ------------------------------------------------------------ per-term functions

def b_term(n: int, s):
    """B_n(s) = 1/2 [n^{-s} + χ(s) n^{s-1}]."""
    if n < 1:
        raise ValueError("b_term needs n >= 1")
    s = as_complex(s)
    ln = math.log(n)
    return 0.5 * (np.exp(-s * ln) + np.exp(log_chi(s) + (s - 1) * ln))


def accel_a_term(n: int, s):
    """A~(s,n) = 2^{-(n+1)} sum_k C(n,k) (k+1)^{-s}, summed in ascending k."""
    s = as_complex(s)
    row = binomial_row(n)
    return Section("accelerated", row).dirichlet(s)


def accel_b_term(n: int, s):
    """B~_n(s) = 1/2 [A~(s,n) + χ(s) A~(1-s,n)]."""
    return Section("accelerated", binomial_row(n))(s)


def weight(k: int, N: int) -> float:
    """ã(k,N) = sum_{n=k}^N C(n,k)/2^{n+1}, the coefficient of (k+1)^{-s} in ζ~_N.

    The sum equals P(Bin(N+1, 1/2) >= k+1).  For k below the median the
    complementary tail is summed instead, so the result never rounds past 1.
    """
    if k < 0 or k > N:
        raise IndexError(f"weight needs 0 <= k <= N, got k={k}, N={N}")
    if 2 * k < N + 1:
        # 1 - sum_{j<=k} C(N+1, j)/2^{N+1}
        return 1.0 - 2.0 * math.fsum(binomial_row(N + 1)[:k + 1])
    # w_n = C(n,k)/2^{n+1}, w_{n+1} = w_n (n+1)/(2(n+1-k))
    w = math.ldexp(1.0, -(k + 1))
    total = w
    for n in range(k, N):
        w *= (n + 1) / (2.0 * (n + 1 - k))
        total += w
    return total


def section_eval(spec: SectionSpec, s):
    """Evaluate the section described by spec at s."""
    return Section.from_spec(spec)(s)


def partial_sum(family: str, N: int, s):
    """Raw sums S_N = sum_{n<=N} n^{-s} or S~_N = sum_{n=0}^N A~(s,n)."""
    s = as_complex(s)
    if family == "classical_raw":
        if N < 1:
            raise ValueError("classical_raw needs N >= 1")
        return Section("classical", np.ones(N)).dirichlet(s)
    if family == "accelerated_raw":
        if N < 0:
            raise ValueError("accelerated_raw needs N >= 0")
        c = coefficients(SectionSpec("accelerated", N))
        return Section("accelerated", c).dirichlet(s)
    raise ValueError(f"unknown raw family {family!r}")


def partial_sum_sequence(family: str, N: int, s: complex) -> np.ndarray:
    """All raw sums for 1..N (classical) or 0..N (accelerated) at one point."""
    s = complex(s)
    if family == "classical_raw":
        return np.cumsum(np.exp(-s * np.log(np.arange(1, N + 1))))
    if family == "accelerated_raw":
        powers = np.exp(-s * np.log(np.arange(1, N + 2)))
        return np.cumsum([binomial_row(n) @ powers[:n + 1] for n in range(N + 1)])
    raise ValueError(f"unknown raw family {family!r}")


def fluctuation_intervals(t: float, M_max: int, scale: float = 1.0):
    """[scale·t/(2(M+1)π)] <= N <= [scale·t/(2Mπ)] for M = 1..M_max, nonempty only.

    scale is 1 for the classical sections; see collision_intervals for the
    other families.
    """
    if t <= 2 * math.pi:
        raise DomainError("fluctuation intervals need t > 2π")
    if M_max < 1:
        raise ValueError("M_max must be >= 1")
    x = scale * t / (2 * math.pi)
    out = []
    for M in range(1, M_max + 1):
        lo, hi = math.floor(x / (M + 1)), math.floor(x / M)
        if lo <= hi:
            out.append((M, lo, hi))
    return out

