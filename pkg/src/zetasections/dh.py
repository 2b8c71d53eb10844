"""Davenport-Heilbronn control family.

D(s) = (1-iκ)/2 L(s,χ) + (1+iκ)/2 L(s,χ̄) with χ the character mod 5 that
sends 2 to i.  Its Dirichlet coefficients are Re[(1-iκ)χ(m)], which are
real and 5-periodic: (1, κ, -κ, -1, 0).  The completed function
ξ(s) = (π/5)^{-s/2} Γ((1+s)/2) D(s) satisfies ξ(s) = ξ(1-s).
"""
from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field

import numpy as np

from .sections import Section, SectionSpec, binomial_row, log_completion_dh
from .special import as_complex, lambert_w

log = logging.getLogger(__name__)

KAPPA = (math.sqrt(10 - 2 * math.sqrt(5)) - 2) / (math.sqrt(5) - 1)
CHARACTER_TABLE = (1, 1j, -1j, -1, 0)


@dataclass(frozen=True)
class DHConfig:
    kappa: float = KAPPA
    character_table: tuple = CHARACTER_TABLE

    def __post_init__(self):
        t = self.character_table
        if len(t) != 5 or t[0] != 1 or t[4] != 0:
            raise ValueError("character table must be 5-periodic with χ(1)=1, χ(5)=0")
        for a in range(1, 5):
            for b in range(1, 5):
                if abs(t[(a * b) % 5 - 1] - t[a - 1] * t[b - 1]) > 1e-15:
                    raise ValueError("character table is not multiplicative")

    def character(self, k: int) -> complex:
        return self.character_table[(k - 1) % 5]

    def coefficient(self, m: int) -> float:
        """Re[(1-iκ)χ(m)], the m-th Dirichlet coefficient of D."""
        val = 0.5 * ((1 - 1j * self.kappa) * self.character(m)
                     + (1 + 1j * self.kappa) * np.conj(self.character(m)))
        return float(val.real)


_DEFAULT = DHConfig()
_PERIOD = np.array([_DEFAULT.coefficient(m) for m in range(1, 6)])


def dh_coefficients(M: int, config: DHConfig = _DEFAULT) -> np.ndarray:
    """a_1..a_M."""
    period = _PERIOD if config is _DEFAULT else np.array([config.coefficient(m) for m in range(1, 6)])
    return np.resize(period, M)


def dh_a_term(n: int, s, config: DHConfig = _DEFAULT):
    """A~_DH(n,s) = 2^{-(n+1)} sum_k C(n,k) a_{k+1} (k+1)^{-s}."""
    s = as_complex(s)
    return Section("dh", binomial_row(n) * dh_coefficients(n + 1, config)).dirichlet(s)


def dh_xi_section(N: int, s):
    """ξ~_N(s) = G(s) F_N(s), symmetric under s -> 1-s."""
    s = as_complex(s)
    F = Section.from_spec(SectionSpec("dh", N))(s)
    return np.exp(log_completion_dh(s)) * F


def dh_xi_reference(s, terms: int = 200_000):
    """Completed ξ(s) from the direct Dirichlet series; for Re s > 1 only."""
    s = complex(as_complex(s))
    if s.real <= 1:
        raise ValueError("direct series needs Re s > 1")
    m = np.arange(1, terms + 1, dtype=float)
    D = np.sum(dh_coefficients(terms) * np.exp(-s * np.log(m)))
    return complex(np.exp(log_completion_dh(s)) * D)


def dh_zero(n: int) -> float:
    """2π(n - 5/8)/W_0(5(n - 5/8)/e), the n-th zero of ξ~_0 on the line."""
    x = n - 0.625
    return 2 * math.pi * x / lambert_w(0, 5 * x / math.e)


@dataclass
class RealnessReport:
    ok: bool
    worst: float
    samples: int
    failures: list = field(default_factory=list)


def realness_check(N: int, t_values, rtol: float = 1e-9) -> RealnessReport:
    """Check that ξ~_N is real on the line.

    |ξ~_N| decays like e^{-πt/4}, so the test is applied to ξ~_N/|G| =
    e^{iφ(t)} F_N(1/2+it): its imaginary part must stay below rtol (1+|F_N|).
    """
    t_values = np.asarray(t_values, dtype=float)
    s = 0.5 + 1j * t_values
    lg = log_completion_dh(s)
    F = Section.from_spec(SectionSpec("dh", N))(s)
    rotated = np.exp(1j * lg.imag) * F
    ratio = np.abs(rotated.imag) / (1 + np.abs(F))
    bad = [float(t) for t, r in zip(t_values, ratio) if r > rtol]
    if bad:
        log.warning("xi~_%d not real on the line at %d ordinates", N, len(bad))
    return RealnessReport(not bad, float(ratio.max(initial=0.0)), len(t_values), bad)

def dh_track_pair(pair, N_range, **kwargs):
    """Track a consecutive pair of ξ~_N zeros (labels follow dh_zero)."""
    from .tracker import track_pair
    lo, hi = N_range
    report = realness_check(lo, np.linspace(10, 300, 200))
    if not report.ok:
        raise RuntimeError("rotated DH section is not real on the line; 2D mode needed")
    return track_pair(pair, "dh", N_max=hi, N_start=lo, **kwargs)

