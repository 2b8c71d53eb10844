"""Complex special functions used by every evaluation in the package.

Everything here works in double precision and is vectorised over numpy
arrays where that is cheap.  Large-t quantities are kept in log space so
that |Γ| or |χ| never overflow silently.
"""
from __future__ import annotations

import cmath
import math
from dataclasses import dataclass
from typing import Callable

import numpy as np
from scipy.special import bernoulli

LN2 = math.log(2.0)
LNPI = math.log(math.pi)
LN2PI = math.log(2.0 * math.pi)

# B_2, B_4, ..., B_20
_BERN = (1 / 6, -1 / 30, 1 / 42, -1 / 30, 5 / 66, -691 / 2730, 7 / 6,
         -3617 / 510, 43867 / 798, -174611 / 330)
_STIRLING_MIN = 15.0
_LOG_MAX = 709.0


class DomainError(ValueError):
    """Argument outside the documented domain of an operation."""


class PoleError(DomainError):
    """Argument sits on a pole (or a point where the function is undefined)."""


class ConvergenceError(RuntimeError):
    """Iteration did not reach its tolerance within max_iter."""


class SymmetryError(RuntimeError):
    """An evaluator broke a symmetry it is required to satisfy."""


class LogOverflowError(ArithmeticError):
    """A log-space quantity is too large to exponentiate in double precision."""


@dataclass(frozen=True)
class ComplexPoint:
    """A point s = sigma + i t."""

    sigma: float
    t: float

    def __post_init__(self):
        if not (math.isfinite(self.sigma) and math.isfinite(self.t)):
            raise DomainError(f"non-finite point {self.sigma!r} + i{self.t!r}")

    @property
    def s(self) -> complex:
        return complex(self.sigma, self.t)

    def reflect(self) -> "ComplexPoint":
        return ComplexPoint(1.0 - self.sigma, -self.t)

    def conj(self) -> "ComplexPoint":
        return ComplexPoint(self.sigma, -self.t)

    @classmethod
    def of(cls, s) -> "ComplexPoint":
        if isinstance(s, ComplexPoint):
            return s
        s = complex(s)
        return cls(s.real, s.imag)


@dataclass(frozen=True)
class Tolerance:
    abs_eps: float = 1e-14
    rel_eps: float = 0.0
    max_iter: int = 100

    def __post_init__(self):
        if self.abs_eps < 0 or self.rel_eps < 0 or self.abs_eps + self.rel_eps <= 0:
            raise ValueError("need abs_eps, rel_eps >= 0 with a positive sum")
        if self.max_iter <= 0:
            raise ValueError("max_iter must be positive")


def as_complex(s) -> np.ndarray | complex:
    """Accept complex scalars, ComplexPoint or arrays; return complex data."""
    if isinstance(s, ComplexPoint):
        return s.s
    if np.isscalar(s):
        return complex(s)
    return np.asarray(s, dtype=complex)


def _scalar_or_array(fn, scalar=None):
    def wrapper(s, *args, **kwargs):
        z = as_complex(s)
        if isinstance(z, complex):
            if scalar is not None:
                return scalar(z)
            return complex(fn(np.array([z]), *args, **kwargs)[0])
        return fn(np.atleast_1d(z), *args, **kwargs).reshape(np.shape(z))
    wrapper.__name__ = fn.__name__
    wrapper.__doc__ = fn.__doc__
    return wrapper


def _check_poles(z: np.ndarray) -> None:
    bad = (z.imag == 0) & (z.real <= 0) & (z.real == np.round(z.real))
    if np.any(bad):
        raise PoleError(f"Gamma has a pole at {z[bad][0].real:g}")


def _shift_count(z: np.ndarray) -> np.ndarray:
    # Shift until Re >= 0 and |z| >= _STIRLING_MIN so the series is accurate.
    k = np.ceil(np.maximum(0.0, -z.real)).astype(int)
    w = z + k
    short = np.abs(w) < _STIRLING_MIN
    extra = np.ceil(np.sqrt(np.maximum(_STIRLING_MIN**2 - w.imag**2, 0.0)) - w.real)
    k = k + np.where(short, np.maximum(extra, 0), 0).astype(int)
    return k


def _shift_count_scalar(z: complex) -> int:
    k = max(0, math.ceil(-z.real))
    w = z + k
    if abs(w) < _STIRLING_MIN:
        k += max(0, math.ceil(math.sqrt(max(_STIRLING_MIN**2 - w.imag**2, 0.0)) - w.real))
    return k


def _check_pole_scalar(z: complex) -> None:
    if z.imag == 0 and z.real <= 0 and z.real == round(z.real):
        raise PoleError(f"Gamma has a pole at {z.real:g}")


def _log_gamma_scalar(z: complex) -> complex:
    _check_pole_scalar(z)
    k = _shift_count_scalar(z)
    acc = 0j
    for j in range(k):
        acc += cmath.log(z + j)
    w = z + k
    inv = 1.0 / w
    inv2 = inv * inv
    series, p = 0j, inv
    for j, b in enumerate(_BERN, start=1):
        series += b / (2 * j * (2 * j - 1)) * p
        p *= inv2
    return (w - 0.5) * cmath.log(w) - w + 0.5 * LN2PI + series - acc


def _digamma_scalar(z: complex) -> complex:
    _check_pole_scalar(z)
    k = _shift_count_scalar(z)
    acc = 0j
    for j in range(k):
        acc += 1.0 / (z + j)
    w = z + k
    inv2 = 1.0 / (w * w)
    series, p = 0j, inv2
    for j, b in enumerate(_BERN, start=1):
        series += b / (2 * j) * p
        p *= inv2
    return cmath.log(w) - 0.5 / w - series - acc


def _log_gamma_array(z: np.ndarray) -> np.ndarray:
    _check_poles(z)
    k = _shift_count(z)
    acc = np.zeros_like(z)
    for j in range(int(k.max(initial=0))):
        m = j < k
        acc[m] += np.log(z[m] + j)
    w = z + k
    inv = 1.0 / w
    inv2 = inv * inv
    series = np.zeros_like(w)
    p = inv
    for j, b in enumerate(_BERN, start=1):
        series += b / (2 * j * (2 * j - 1)) * p
        p = p * inv2
    out = (w - 0.5) * np.log(w) - w + 0.5 * LN2PI + series
    return out - acc


def _digamma_array(z: np.ndarray) -> np.ndarray:
    _check_poles(z)
    k = _shift_count(z)
    acc = np.zeros_like(z)
    for j in range(int(k.max(initial=0))):
        m = j < k
        acc[m] += 1.0 / (z[m] + j)
    w = z + k
    inv2 = 1.0 / (w * w)
    series = np.zeros_like(w)
    p = inv2
    for j, b in enumerate(_BERN, start=1):
        series += b / (2 * j) * p
        p = p * inv2
    return np.log(w) - 0.5 / w - series - acc


def log_gamma(z):
    """log Γ(z) on the principal branch (cut along the negative real axis).

    Recurrence Γ(z) = Γ(z+k)/[z(z+1)...(z+k-1)] moves z to |z| >= 15, then
    a 10-term Stirling series finishes.  Summing principal logs of the shift
    factors keeps the result continuous away from the negative real axis,
    which is what the Riemann-Siegel theta needs.
    """
    return _scalar_or_array(_log_gamma_array, _log_gamma_scalar)(z)


def digamma(z):
    """ψ(z) = Γ'(z)/Γ(z) by upward recurrence and the asymptotic series."""
    return _scalar_or_array(_digamma_array, _digamma_scalar)(z)


def _log_sin(z: np.ndarray) -> np.ndarray:
    # log sin z written so that exp() never sees a huge argument.
    out = np.empty_like(z)
    up = z.imag >= 0
    zu, zd = z[up], z[~up]
    out[up] = -1j * zu + np.log(0.5j) + np.log1p(-np.exp(2j * zu))
    out[~up] = 1j * zd + np.log(-0.5j) + np.log1p(-np.exp(-2j * zd))
    return out


def _check_chi_domain(s: np.ndarray) -> None:
    real = (s.imag == 0) & (s.real == np.round(s.real))
    bad = real & ((s.real >= 1) | ((s.real <= 0) & (np.round(s.real) % 2 == 0)))
    if np.any(bad):
        raise PoleError(f"chi is undefined or zero at s = {s[bad][0].real:g}")


def _log_sin_scalar(z: complex) -> complex:
    if z.imag >= 0:
        return -1j * z + cmath.log(0.5j) + cmath.log(1 - cmath.exp(2j * z))
    return 1j * z + cmath.log(-0.5j) + cmath.log(1 - cmath.exp(-2j * z))


def _log_chi_array(s: np.ndarray) -> np.ndarray:
    _check_chi_domain(s)
    return s * LN2 + (s - 1) * LNPI + _log_sin(0.5 * np.pi * s) + _log_gamma_array(1 - s)


def _log_chi_scalar(s: complex) -> complex:
    _check_chi_domain(np.array([s]))
    return s * LN2 + (s - 1) * LNPI + _log_sin_scalar(0.5 * math.pi * s) + _log_gamma_scalar(1 - s)


def log_chi(s):
    """log χ(s) = s ln2 + (s-1) lnπ + log sin(πs/2) + log Γ(1-s)."""
    return _scalar_or_array(_log_chi_array, _log_chi_scalar)(s)


def _exp_checked(logv):
    if np.any(np.real(logv) > _LOG_MAX):
        raise LogOverflowError("log-magnitude exceeds the double range")
    return np.exp(logv)


def chi(s):
    """χ(s) with ζ(s) = χ(s) ζ(1-s), evaluated through log_chi."""
    return _exp_checked(log_chi(s))


def _chi_log_derivative_array(s: np.ndarray) -> np.ndarray:
    _check_chi_domain(s)
    return LN2PI + 0.5 * np.pi / np.tan(0.5 * np.pi * s) - _digamma_array(1 - s)


def _chi_log_derivative_scalar(s: complex) -> complex:
    _check_chi_domain(np.array([s]))
    return LN2PI + 0.5 * math.pi / cmath.tan(0.5 * math.pi * s) - _digamma_scalar(1 - s)


def chi_log_derivative(s):
    """χ'(s)/χ(s) = ln 2π + (π/2) cot(πs/2) - ψ(1-s)."""
    return _scalar_or_array(_chi_log_derivative_array, _chi_log_derivative_scalar)(s)


def chi_asymptotic(sigma, t):
    """The closed-form approximation (2π/t)^{σ+it-1/2} e^{i(t+π/4)}."""
    t_arr = np.asarray(t, dtype=float)
    if np.any(t_arr <= 2 * np.pi):
        raise DomainError("chi_asymptotic needs t > 2π")
    expo = (sigma + 1j * t_arr - 0.5) * np.log(2 * np.pi / t_arr) + 1j * (t_arr + 0.25 * np.pi)
    out = np.exp(expo)
    return complex(out) if np.ndim(out) == 0 else out


def _lambert_seed(branch: int, x: float) -> float:
    if x == -1.0 / math.e:
        return -1.0
    p2 = 2.0 * (math.e * x + 1.0)
    if branch == 0:
        if x < -0.25:
            p = math.sqrt(max(p2, 0.0))
            return -1.0 + p - p2 / 3.0 + 11.0 / 72.0 * p * p2
        if x < 3.0:
            return math.log1p(x)
        lx = math.log(x)
        return lx - math.log(lx)
    if x < -0.25:
        p = math.sqrt(max(p2, 0.0))
        return -1.0 - p - p2 / 3.0 - 11.0 / 72.0 * p * p2
    lx = math.log(-x)
    return lx - math.log(-lx)


def _lambert_scalar(branch: int, x: float, max_iter: int = 64) -> float:
    if branch == 0:
        if x < -1.0 / math.e:
            raise DomainError(f"W_0 needs x >= -1/e, got {x}")
        if x == 0.0:
            return 0.0
    elif branch == -1:
        if not (-1.0 / math.e <= x < 0.0):
            raise DomainError(f"W_-1 needs -1/e <= x < 0, got {x}")
    else:
        raise DomainError(f"unsupported branch {branch}")
    if x <= -1.0 / math.e:
        return -1.0
    w = _lambert_seed(branch, x)
    for _ in range(max_iter):
        ew = math.exp(w)
        f = w * ew - x
        wp1 = w + 1.0
        if wp1 == 0.0:
            break
        denom = ew * wp1 - (w + 2.0) * f / (2.0 * wp1)
        step = f / denom
        w_new = w - step
        # Halley can overshoot the branch point on the wrong side.
        if branch == 0 and w_new < -1.0:
            w_new = 0.5 * (w - 1.0)
        if branch == -1 and w_new > -1.0:
            w_new = 0.5 * (w - 1.0)
        if abs(w_new - w) <= 1e-15 * (1.0 + abs(w_new)):
            return w_new
        w = w_new
    return w


def lambert_w(branch: int, x):
    """Real Lambert W on branch 0 or -1 by Halley iteration.

    Seeds: the branch-point series -1 ± p - p²/3 ± 11p³/72 with
    p = sqrt(2(ex+1)) near -1/e, log1p(x) for moderate x on branch 0,
    ln x - ln ln x for large x, and ln(-x) - ln(-ln(-x)) near 0⁻ on branch -1.
    """
    if np.ndim(x) == 0:
        return _lambert_scalar(branch, float(x))
    xs = np.asarray(x, dtype=float)
    return np.array([_lambert_scalar(branch, float(v)) for v in xs.ravel()]).reshape(xs.shape)


def _check_positive_t(t):
    if np.any(np.asarray(t) <= 0):
        raise DomainError("t must be positive")


def rs_theta(t):
    """Riemann-Siegel theta, Im log Γ(1/4 + it/2) - (t/2) ln π, unwrapped."""
    if isinstance(t, (float, int)):
        if t <= 0:
            raise DomainError("t must be positive")
        return _log_gamma_scalar(complex(0.25, 0.5 * t)).imag - 0.5 * t * LNPI
    _check_positive_t(t)
    t_arr = np.asarray(t, dtype=float)
    out = np.imag(log_gamma(0.25 + 0.5j * t_arr)) - 0.5 * t_arr * LNPI
    return float(out) if np.ndim(out) == 0 else out


def rs_theta_prime(t):
    """θ'(t) = Re ψ(1/4 + it/2)/2 - (ln π)/2."""
    if isinstance(t, (float, int)):
        return 0.5 * _digamma_scalar(complex(0.25, 0.5 * t)).real - 0.5 * LNPI
    t_arr = np.asarray(t, dtype=float)
    out = 0.5 * np.real(digamma(0.25 + 0.5j * t_arr)) - 0.5 * LNPI
    return float(out) if np.ndim(out) == 0 else out


def _em_coefficients(count: int) -> np.ndarray:
    b = bernoulli(2 * count)
    return np.array([b[2 * j] / math.factorial(2 * j) for j in range(1, count + 1)])


_EM_COEF = _em_coefficients(80)


def zeta_reference(s, tol: Tolerance = Tolerance()) -> complex:
    """ζ(s) by Euler-Maclaurin summation.

    The direct sum runs to M = |s|/π + 50 and the Bernoulli corrections are
    added until one falls below abs_eps/10.  Accurate to a few ulps of the
    largest partial term for |t| up to a few thousand.
    """
    s = complex(as_complex(s))
    if s == 1:
        raise PoleError("zeta has a pole at s = 1")
    M = int(abs(s) / math.pi) + 50
    n = np.arange(1, M, dtype=float)
    head = np.sum(np.exp(-s * np.log(n)))
    lnM = math.log(M)
    Ms = np.exp(-s * lnM)
    total = head + M * Ms / (s - 1) + 0.5 * Ms
    # running factor s(s+1)...(s+2j-2) M^{-s-2j+1}
    fac = s * Ms / M
    limit = min(tol.max_iter, len(_EM_COEF))
    for j in range(1, limit + 1):
        term = _EM_COEF[j - 1] * fac
        total += term
        if abs(term) < tol.abs_eps / 10 + tol.rel_eps * abs(total):
            return complex(total)
        fac *= (s + 2 * j - 1) * (s + 2 * j) / (M * M)
    raise ConvergenceError(f"Euler-Maclaurin tail did not settle at s = {s}")


def hardy_z(t, evaluator: Callable | None = None, phase: Callable = rs_theta,
            rtol: float = 1e-8):
    """Re[e^{iθ(t)} F(1/2+it)] for an evaluator F with F(s) = χ(s)F(1-s).

    The product must be real; the imaginary part is checked against
    rtol·(1+|Re|) and a SymmetryError is raised if it is not.
    """
    t_arr = np.asarray(t, dtype=float)
    s = 0.5 + 1j * t_arr
    if evaluator is None:
        vals = np.array([zeta_reference(v) for v in np.atleast_1d(s)]).reshape(t_arr.shape)
    else:
        vals = np.asarray(evaluator(s))
    rotated = np.exp(1j * np.asarray(phase(t_arr))) * vals
    re, im = np.real(rotated), np.imag(rotated)
    if np.any(np.abs(im) > rtol * (1 + np.abs(re))):
        raise SymmetryError(f"rotated value not real: max |Im| = {np.max(np.abs(im)):.3g}")
    return float(re) if np.ndim(re) == 0 else re
