"""Grand-canonical thermodynamics of free lattice bosons.

Chemical potentials are found by bisection on ``log(eps_min - mu)``; the
density is strictly increasing in ``mu`` below the band bottom, so the
bracket never has to be guessed twice.  Energies are in units of the
hopping ``t`` and ``k_B = 1``.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass
from enum import Enum

import numpy as np
from scipy.integrate import IntegrationWarning, quad

from .dispersion import (
    HoppingKind,
    HoppingModel,
    DispersionTable,
    dispersion_gap_thermo_limit,
    dispersion_table,
)
from .errors import ConvergenceError, DomainError

__all__ = [
    "GrandCanonicalState",
    "TcMethod",
    "TcResult",
    "bose_factor",
    "bose_entropy_terms",
    "occupation",
    "solve_mu",
    "delta_mu",
    "mu_above_tc_infinite_range",
    "condensate_at_tc",
    "condensate_at_tc_asymptotic",
    "tc_infinite_range",
    "density_thermo_limit",
    "tc_long_range",
    "thermal_entropy",
    "has_finite_tc",
]

_MAX_BISECTIONS = 200


def bose_factor(x):
    """``1 / (exp(x) - 1)`` for ``x > 0``, without overflow for large ``x``."""
    x = np.asarray(x, dtype=float)
    big = x > 30.0
    with np.errstate(over="ignore", divide="ignore"):
        small_branch = 1.0 / np.expm1(np.where(big, 1.0, x))
        large_branch = np.exp(-np.where(big, x, 31.0)) / -np.expm1(-np.where(big, x, 31.0))
    out = np.where(big, large_branch, small_branch)
    return float(out) if out.ndim == 0 else out


def bose_entropy_terms(g):
    """Per-mode entropies ``(1 + g) ln(1 + g) - g ln g`` with ``0 ln 0 = 0``.

    Written as ``ln(1 + g) + g ln(1 + 1/g)`` which is free of cancellation
    for large ``g``.
    """
    g = np.asarray(g, dtype=float)
    if np.any(g < 0) or np.any(~np.isfinite(g)):
        raise DomainError("mode occupations must be finite and non-negative")
    pos = g > 0
    safe = np.where(pos, g, 1.0)
    return np.where(pos, np.log1p(safe) + safe * np.log1p(1.0 / safe), 0.0)


def occupation(eps: float, beta: float, mu: float) -> float:
    """Bose-Einstein occupation of a level at energy ``eps``."""
    if not beta > 0:
        raise DomainError(f"beta must be positive, got {beta}")
    if not mu < eps:
        raise DomainError(f"occupation needs mu < eps (mu={mu}, eps={eps})")
    return bose_factor(beta * (eps - mu))


@dataclass(frozen=True)
class GrandCanonicalState:
    """Occupations of every mode of ``model`` at inverse temperature ``beta``.

    ``gap = eps_min - mu > 0`` is kept separately from ``mu`` because the
    condensate occupation depends on it and it is tiny below T_C.
    """

    model: HoppingModel
    beta: float
    mu: float
    gap: float
    occ: np.ndarray
    n_avg: float
    N0: float
    thermo_limit: bool = False

    @property
    def T(self) -> float:
        return 1.0 / self.beta

    @property
    def table(self) -> DispersionTable:
        return dispersion_table(self.model, self.thermo_limit)


def _state_from_gap(model, table, beta, gap, thermo_limit) -> GrandCanonicalState:
    de = table.eps - table.e_min
    occ = bose_factor(beta * (de + gap))
    occ.setflags(write=False)
    return GrandCanonicalState(
        model=model,
        beta=float(beta),
        mu=table.e_min - gap,
        gap=gap,
        occ=occ,
        n_avg=math.fsum(occ) / model.L,
        N0=float(occ[0]),
        thermo_limit=thermo_limit,
    )


def solve_mu(
    model: HoppingModel,
    beta: float,
    n_target: float = 1.0,
    tol: float = 1e-12,
    thermo_limit: bool = False,
) -> GrandCanonicalState:
    """Chemical potential giving mean density ``n_target`` at inverse temperature ``beta``.

    Parameters
    ----------
    model : HoppingModel
    beta : float
        Inverse temperature, > 0.
    n_target : float
        Target density ``<N> / L``, > 0.
    tol : float
        Relative tolerance on the density.
    thermo_limit : bool
        Use the ``L -> infinity`` power-law dispersion on the finite grid.

    Returns
    -------
    GrandCanonicalState

    Raises
    ------
    ConvergenceError
        If 200 bisection steps do not reach ``tol``.
    """
    if not (beta > 0 and math.isfinite(beta)):
        raise DomainError(f"beta must be positive and finite, got {beta}")
    if not (n_target > 0 and math.isfinite(n_target)):
        raise DomainError(f"target density must be positive, got {n_target}")
    if not 0 < tol < 1:
        raise DomainError(f"tolerance must lie in (0, 1), got {tol}")
    table = dispersion_table(model, thermo_limit)
    de = table.eps - table.e_min
    L = model.L

    def density(u):
        return math.fsum(bose_factor(beta * (de + math.exp(u)))) / L

    # u = log(gap); density falls as u grows
    u_lo = u_hi = math.log(1.0 / beta)
    for _ in range(_MAX_BISECTIONS):
        if density(u_hi) <= n_target:
            break
        u_lo = u_hi
        u_hi += 4.0
    else:
        raise ConvergenceError("could not bracket the chemical potential from above")
    for _ in range(_MAX_BISECTIONS):
        if density(u_lo) >= n_target:
            break
        u_hi = u_lo
        u_lo -= 4.0
    else:
        raise ConvergenceError("could not bracket the chemical potential from below")

    best_u, best_err = u_lo, math.inf
    for _ in range(_MAX_BISECTIONS):
        mid = 0.5 * (u_lo + u_hi)
        if not u_lo < mid < u_hi:
            break
        n = density(mid)
        err = abs(n - n_target) / n_target
        if err < best_err:
            best_u, best_err = mid, err
        if err <= tol:
            return _state_from_gap(model, table, beta, math.exp(mid), thermo_limit)
        if n > n_target:
            u_lo = mid
        else:
            u_hi = mid
    raise ConvergenceError(
        f"chemical potential bisection stalled at relative density error {best_err:.3e}",
        estimate=table.e_min - math.exp(best_u),
    )


def delta_mu(T: float, N0: float) -> float:
    """Finite-size shift of ``mu`` below the band bottom for condensate occupation ``N0``."""
    if not N0 > 0:
        raise DomainError(f"condensate occupation must be positive, got {N0}")
    return -T * math.log1p(1.0 / N0)


def mu_above_tc_infinite_range(T: float, n: float) -> float:
    """Large-``L`` chemical potential of the infinite-range model above T_C."""
    return -T * math.log1p(1.0 / n)


def condensate_at_tc(L: int, n: float) -> float:
    """Exact ``<N_0>`` of the infinite-range model at ``T = T_C``.

    Eliminating ``mu`` from the finite-``L`` density equation at
    ``T_C = t / ln(1 + 1/n)`` gives ``N0**2 + N0 - L (n**2 + n) = 0``.
    """
    return -0.5 + math.sqrt(0.25 + L * (n * n + n))


def condensate_at_tc_asymptotic(L: int, n: float) -> float:
    """Leading large-``L`` behaviour ``sqrt(L (n**2 + n))`` of :func:`condensate_at_tc`."""
    return math.sqrt(L) * math.sqrt(n * n + n)


class TcMethod(str, Enum):
    CLOSED_FORM = "closed-form"
    QUADRATURE = "quadrature"


@dataclass(frozen=True)
class TcResult:
    Tc: float
    beta_c: float
    method: TcMethod

    def __post_init__(self):
        if not self.Tc > 0:
            raise DomainError(f"critical temperature must be positive, got {self.Tc}")


def tc_infinite_range(t: float = 1.0, n: float = 1.0) -> TcResult:
    """BEC temperature ``T_C = t / ln(1 + 1/n)`` of the infinite-range model."""
    if not (t > 0 and n > 0):
        raise DomainError(f"need t > 0 and n > 0, got t={t}, n={n}")
    Tc = t / math.log1p(1.0 / n)
    return TcResult(Tc=Tc, beta_c=1.0 / Tc, method=TcMethod.CLOSED_FORM)


def density_thermo_limit(gamma: float, t: float, beta: float, gap: float = 0.0, tol: float = 1e-11) -> float:
    """Density ``(1/2pi) int dk n_B(beta (eps(k) - mu))`` of the infinite power-law chain.

    ``mu = eps(0) - gap``.  The substitution ``k = pi x**q`` with
    ``q = 1 / (2 - gamma)`` (for ``gamma < 2``) removes the integrable
    ``k**(1 - gamma)`` singularity at ``gap = 0``.
    """
    if not beta > 0:
        raise DomainError(f"beta must be positive, got {beta}")
    if gap < 0:
        raise DomainError(f"gap must be non-negative, got {gap}")
    if gap == 0 and not 1 < gamma < 2:
        raise DomainError(f"the density at mu = eps(0) is finite only for 1 < gamma < 2, got {gamma}")
    q = 1.0 / (2.0 - gamma) if gamma < 2 else 1.0

    # QUADPACK's Gauss-Kronrod nodes never touch x = 0
    def integrand(x):
        k = math.pi * x ** q
        de = dispersion_gap_thermo_limit(gamma, t, k)
        return q * x ** (q - 1.0) * bose_factor(beta * (de + gap))

    with warnings.catch_warnings():
        warnings.simplefilter("error", IntegrationWarning)
        try:
            val, err = quad(integrand, 0.0, 1.0, epsabs=0.0, epsrel=tol, limit=400)
        except IntegrationWarning as exc:
            raise ConvergenceError(f"density quadrature did not converge: {exc}") from None
    return val


def tc_long_range(gamma: float, t: float = 1.0, n_target: float = 1.0, tol: float = 1e-8) -> TcResult:
    """BEC temperature of the infinite power-law chain for ``1 < gamma < 2``.

    Sets ``mu = eps(0)`` and bisects ``log beta`` until the quadrature
    density matches ``n_target`` to relative ``tol``.
    """
    gamma = float(gamma)
    if not 1 < gamma < 2:
        raise DomainError(f"a finite-temperature BEC needs 1 < gamma < 2, got {gamma}")
    if not (t > 0 and n_target > 0):
        raise DomainError(f"need t > 0 and n > 0, got t={t}, n={n_target}")
    qtol = min(1e-11, tol * 1e-2)

    def density(lb):
        return density_thermo_limit(gamma, t, math.exp(lb), tol=qtol)

    # density falls as beta grows
    lo = hi = math.log(1.0 / t)
    for _ in range(_MAX_BISECTIONS):
        if density(hi) <= n_target:
            break
        lo, hi = hi, hi + 2.0
    else:
        raise ConvergenceError("could not bracket beta_C from above")
    for _ in range(_MAX_BISECTIONS):
        if density(lo) >= n_target:
            break
        hi, lo = lo, lo - 2.0
    else:
        raise ConvergenceError("could not bracket beta_C from below")

    for _ in range(_MAX_BISECTIONS):
        mid = 0.5 * (lo + hi)
        n = density(mid)
        if abs(n - n_target) <= tol * n_target:
            beta_c = math.exp(mid)
            return TcResult(Tc=1.0 / beta_c, beta_c=beta_c, method=TcMethod.QUADRATURE)
        if n > n_target:
            lo = mid
        else:
            hi = mid
    raise ConvergenceError("beta_C bisection did not converge", estimate=math.exp(0.5 * (lo + hi)))


def thermal_entropy(state: GrandCanonicalState) -> float:
    """Grand-canonical entropy ``sum_m [(1 + N_m) ln(1 + N_m) - N_m ln N_m]``."""
    return math.fsum(bose_entropy_terms(state.occ))


def has_finite_tc(model: HoppingModel) -> bool:
    """Whether the model's thermodynamic limit condenses at finite temperature."""
    if model.kind is HoppingKind.INFINITE_RANGE:
        return True
    if model.kind is HoppingKind.POWER_LAW:
        return model.gamma < 2
    return False
