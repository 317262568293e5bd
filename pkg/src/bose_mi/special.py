"""Special functions: Riemann zeta, Gamma, and the Bose-Einstein integral function.

The Bose-Einstein integral function

    F(gamma, v) = sum_{n >= 1} exp(-n v) / n**gamma

is evaluated by two independent routes:

* ``series``: a direct partial sum plus the remaining tail written as a
  Laplace integral and evaluated by generalised Gauss-Laguerre quadrature.
  Works for any ``gamma`` (integer or not) as long as ``exp(-v) != 1``.
* ``expansion``: the convergent expansion around ``v = 0``

      F(gamma, v) = Gamma(1 - gamma) v**(gamma - 1)
                    + sum_n zeta(gamma - n) (-v)**n / n!

  valid for non-integer ``gamma`` and ``|v| < 2 pi``.

The two routes share no code beyond :func:`zeta` / :func:`gamma_fn`, so
agreement between them is a meaningful check.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np
from scipy.special import roots_genlaguerre

from .errors import ConvergenceError, DomainError

__all__ = [
    "SeriesControl",
    "zeta",
    "gamma_fn",
    "bose_einstein_F",
    "polylog_g",
    "expansion_coefficients",
]

TWO_PI = 2.0 * math.pi

# Bernoulli numbers B_2 .. B_16 (Euler-Maclaurin corrections for zeta).
_BERNOULLI = (
    1.0 / 6.0,
    -1.0 / 30.0,
    1.0 / 42.0,
    -1.0 / 30.0,
    5.0 / 66.0,
    -691.0 / 2730.0,
    7.0 / 6.0,
    -3617.0 / 510.0,
)
_EM_CUTOFF = 20

# Largest |v| handed to the expansion; the series converges like (|v| / 2 pi)^n.
_EXPANSION_RADIUS = 4.0
_N_EXPANSION_MAX = 160


@dataclass(frozen=True)
class SeriesControl:
    """Tolerance and work limit for series evaluations."""

    rel_tol: float = 1e-12
    max_terms: int = 10_000_000

    def __post_init__(self):
        if not self.rel_tol > 0:
            raise DomainError(f"rel_tol must be positive, got {self.rel_tol}")
        if self.max_terms < 10:
            raise DomainError(f"max_terms must be >= 10, got {self.max_terms}")


_DEFAULT_CONTROL = SeriesControl()


def _is_integer(x: float) -> bool:
    return float(x).is_integer()


def gamma_fn(x: float) -> float:
    """Gamma function for real ``x``; poles raise :class:`DomainError`."""
    x = float(x)
    if not math.isfinite(x):
        raise DomainError(f"gamma_fn requires a finite argument, got {x}")
    if x <= 0 and _is_integer(x):
        raise DomainError(f"gamma_fn has a pole at {x}")
    try:
        return math.gamma(x)
    except OverflowError as exc:
        raise DomainError(f"gamma_fn overflows at {x}") from exc


def _zeta_euler_maclaurin(s: float) -> float:
    n = _EM_CUTOFF
    head = math.fsum(k ** -s for k in range(1, n))
    tail = n ** (1.0 - s) / (s - 1.0) + 0.5 * n ** -s
    corr = []
    poch = s
    power = n ** (-s - 1.0)
    fact = 2.0
    for j, b2j in enumerate(_BERNOULLI, start=1):
        corr.append(b2j / fact * poch * power)
        poch *= (s + 2 * j - 1) * (s + 2 * j)
        power /= n * n
        fact *= (2 * j + 1) * (2 * j + 2)
    return math.fsum([head, tail, *corr])


def zeta(s: float) -> float:
    """Riemann zeta function for real ``s != 1``.

    Euler-Maclaurin summation (19 explicit terms, 8 Bernoulli corrections)
    for ``s >= -1/2``; the functional equation below that.
    """
    s = float(s)
    if not math.isfinite(s):
        raise DomainError(f"zeta requires a finite argument, got {s}")
    if s == 1.0:
        raise DomainError("zeta has a pole at s = 1")
    if s >= -0.5:
        return _zeta_euler_maclaurin(s)
    if _is_integer(s) and int(s) % 2 == 0:
        return 0.0
    # zeta(s) = 2^s pi^(s-1) sin(pi s / 2) Gamma(1-s) zeta(1-s)
    log_amp = s * math.log(2.0) + (s - 1.0) * math.log(math.pi) + math.lgamma(1.0 - s)
    try:
        amp = math.exp(log_amp)
    except OverflowError as exc:
        raise DomainError(f"zeta overflows at s = {s}") from exc
    return amp * math.sin(0.5 * math.pi * s) * _zeta_euler_maclaurin(1.0 - s)


@lru_cache(maxsize=128)
def expansion_coefficients(gamma: float, n_terms: int = _N_EXPANSION_MAX) -> tuple:
    """Coefficients ``zeta(gamma - n) / n!`` for ``n = 0 .. n_terms - 1``.

    Large-``n`` coefficients are assembled in log space so that the
    factorials never overflow.
    """
    gamma = float(gamma)
    out = []
    for n in range(n_terms):
        s = gamma - n
        if s == 1.0:
            raise DomainError("integer gamma has no regular expansion coefficient at n = gamma - 1")
        if s >= -0.5:
            out.append(zeta(s) / math.factorial(n))
            continue
        if _is_integer(s) and int(s) % 2 == 0:
            out.append(0.0)
            continue
        log_amp = (
            s * math.log(2.0)
            + (s - 1.0) * math.log(math.pi)
            + math.lgamma(1.0 - s)
            - math.lgamma(n + 1.0)
        )
        out.append(math.exp(log_amp) * math.sin(0.5 * math.pi * s) * _zeta_euler_maclaurin(1.0 - s))
    return tuple(out)


def _expansion_radius(gamma: float) -> float:
    """Largest ``|v|`` where the expansion is trusted for this ``gamma``.

    Near an integer ``gamma`` the singular term and one ``zeta`` coefficient
    both blow up like ``1 / delta`` and cancel, costing ``~|v| / delta`` in
    relative accuracy, so the window shrinks to ``100 delta``.
    """
    delta = abs(gamma - round(gamma))
    return min(_EXPANSION_RADIUS, 100.0 * delta)


def _expansion_terms_needed(radius: float, rel_tol: float) -> int:
    if radius == 0.0:
        return 1
    ratio = radius / TWO_PI
    n = int(math.ceil(math.log(rel_tol * 1e-3) / math.log(ratio))) + 8
    return max(10, min(n, _N_EXPANSION_MAX))


def _f_expansion(gamma: float, v, rel_tol: float = 1e-12, include_constant: bool = True):
    """Vectorised expansion of F(gamma, v) around v = 0 (non-integer gamma)."""
    if _is_integer(gamma):
        raise DomainError("the small-v expansion is only implemented for non-integer gamma")
    v = np.asarray(v, dtype=complex)
    radius = float(np.max(np.abs(v))) if v.size else 0.0
    if radius >= _EXPANSION_RADIUS + 1e-12:
        raise DomainError(f"|v| = {radius} is outside the expansion window {_EXPANSION_RADIUS}")
    n_terms = _expansion_terms_needed(radius, rel_tol)
    coeffs = expansion_coefficients(gamma)[:n_terms]
    start = 0 if include_constant else 1
    w = -v
    acc = np.zeros_like(v)
    for c in reversed(coeffs[start:]):
        acc = acc * w + c
    if start:
        acc = acc * w
    with np.errstate(invalid="ignore", divide="ignore"):
        singular = np.where(v == 0, 0.0, np.power(v, gamma - 1.0))
    if gamma < 1.0 and np.any(v == 0):
        raise DomainError("F(gamma, 0) diverges for gamma <= 1")
    return gamma_fn(1.0 - gamma) * singular + acc


@lru_cache(maxsize=256)
def _laguerre_rule(alpha: float, n: int):
    x, w = roots_genlaguerre(n, alpha)
    return x, w


def _laguerre_tail(gamma: float, v: complex, n0: int, nodes: int):
    """Tail ``sum_{n >= n0} exp(-n v) / n**gamma`` via its Laplace representation.

    ``n**-gamma = Gamma(gamma)^-1 int x^(gamma-1) exp(-n x) dx`` turns the
    tail into ``z^n0 / Gamma(gamma) int x^(gamma-1) exp(-n0 x) / (1 - z exp(-x)) dx``
    with ``z = exp(-v)``; after ``x = y / n0`` this is a generalised
    Gauss-Laguerre integral whose integrand is analytic within distance
    ``~ n0 |1 - z|`` of the real axis.
    """
    y, w = _laguerre_rule(gamma - 1.0, nodes)
    z = cmath.exp(-v)
    h = 1.0 / (1.0 - z * np.exp(-y / n0))
    scale = cmath.exp(-v * n0) * math.exp(-gamma * math.log(n0) - math.lgamma(gamma))
    return complex(scale * np.dot(w, h))


def _f_series(gamma: float, v: complex, ctl: SeriesControl) -> complex:
    z = cmath.exp(-v)
    gap = abs(1.0 - z)
    if gap == 0.0:
        raise DomainError("series route needs exp(-v) != 1")
    if 12.0 / gap > ctl.max_terms:
        raise ConvergenceError(
            f"series route needs ~{12.0 / gap:.3g} direct terms, above max_terms={ctl.max_terms}"
        )
    n0 = max(20, int(math.ceil(12.0 / gap)))
    head = 0j
    chunk = 1 << 20
    for lo in range(1, n0, chunk):
        n = np.arange(lo, min(lo + chunk, n0), dtype=float)
        head += np.sum(np.exp(-v * n) * n ** -gamma)
    tail = _laguerre_tail(gamma, v, n0, 64)
    err = abs(tail - _laguerre_tail(gamma, v, n0, 48))
    value = complex(head + tail)
    if err > ctl.rel_tol * abs(value):
        raise ConvergenceError(
            f"F({gamma}, {v}) tail quadrature did not settle (error estimate {err:.3e})",
            estimate=value,
        )
    return value


def bose_einstein_F(gamma: float, v, ctl: SeriesControl | None = None, method: str = "auto") -> complex:
    """Bose-Einstein integral function ``F(gamma, v) = sum_n exp(-n v) / n**gamma``.

    Parameters
    ----------
    gamma : float
        Power of ``n`` in the denominator.  Must exceed 1 when ``Re v = 0``
        and 0 otherwise.
    v : complex
        Argument with ``Re v >= 0``.  Only ``Im v mod 2 pi`` matters.
    ctl : SeriesControl, optional
        Tolerance and term budget.
    method : {"auto", "series", "expansion"}
        ``auto`` uses the expansion when ``Re v < 1/2`` and ``|v|`` is
        inside a window that shrinks as ``gamma`` nears an integer, and the
        series route otherwise.

    Returns
    -------
    complex
    """
    ctl = ctl or _DEFAULT_CONTROL
    gamma = float(gamma)
    v = complex(v)
    if not (math.isfinite(gamma) and cmath.isfinite(v)):
        raise DomainError("bose_einstein_F requires finite arguments")
    if v.real < 0:
        raise DomainError(f"bose_einstein_F requires Re v >= 0, got {v}")
    if v.real == 0 and gamma <= 1:
        raise DomainError(f"F(gamma, i k) requires gamma > 1, got {gamma}")
    if gamma <= 0:
        raise DomainError(f"bose_einstein_F requires gamma > 0, got {gamma}")
    if method not in ("auto", "series", "expansion"):
        raise DomainError(f"unknown method {method!r}")

    # exp(-n v) only sees Im v modulo 2 pi
    im = math.remainder(v.imag, TWO_PI)
    v = complex(v.real, im)
    if v == 0:
        return complex(zeta(gamma))

    if method == "auto":
        if v.real < 0.5 and abs(v) < _expansion_radius(gamma):
            method = "expansion"
        else:
            method = "series"
    if method == "expansion":
        return complex(_f_expansion(gamma, v, ctl.rel_tol))
    return _f_series(gamma, v, ctl)


def polylog_g(v: float, z: float, ctl: SeriesControl | None = None) -> float:
    """Bose-Einstein integral ``g_v(z) = sum_n z**n / n**v`` for ``0 < z <= 1``."""
    v = float(v)
    z = float(z)
    if not 0.0 < z <= 1.0:
        raise DomainError(f"polylog_g requires 0 < z <= 1, got {z}")
    if z == 1.0:
        if v <= 1.0:
            raise DomainError(f"g_v(1) diverges for v <= 1 (v = {v})")
        return zeta(v)
    return bose_einstein_F(v, -math.log(z), ctl).real
