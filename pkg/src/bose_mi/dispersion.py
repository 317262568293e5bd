"""Lattice hopping models and their single-particle dispersions.

Three translation-invariant hopping models on a ring of ``L`` sites are
supported, with momenta ``k_m = 2 pi m / L``:

* nearest neighbour: ``eps(k) = -2 t cos k``
* infinite range (``t_ij = t / L``): ``eps(0) = -t``, ``eps(k != 0) = 0``
* power law (``t_ij = t / |i - j|**gamma``):
  ``eps(k) = -2 t sum_{n=1}^{L-1} cos(n k) / n**gamma``

The power-law sum runs over ``n = 1 .. L-1`` exactly as written, so ring
separations ``n`` and ``L - n`` are both counted.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace
from enum import Enum
from functools import lru_cache

import numpy as np

from .errors import DomainError, ModeIndexError
from .special import (
    _expansion_radius,
    _f_expansion,
    _is_integer,
    bose_einstein_F,
    expansion_coefficients,
    gamma_fn,
    zeta,
)

__all__ = [
    "HoppingKind",
    "HoppingModel",
    "DispersionTable",
    "SmallKExpansion",
    "dispersion_at",
    "dispersion_table",
    "dispersion_thermo_limit",
    "dispersion_gap_thermo_limit",
    "small_k_expansion",
]


class HoppingKind(str, Enum):
    NEAREST_NEIGHBOR = "nn"
    INFINITE_RANGE = "infinite"
    POWER_LAW = "powerlaw"


@dataclass(frozen=True)
class HoppingModel:
    """A free-boson hopping model on a ring of ``L`` sites.

    ``gamma`` is only meaningful for :attr:`HoppingKind.POWER_LAW` and must
    exceed 1 there.
    """

    kind: HoppingKind
    L: int
    t: float = 1.0
    gamma: float | None = None

    def __post_init__(self):
        try:
            kind = HoppingKind(self.kind)
        except ValueError:
            raise DomainError(f"unknown hopping kind {self.kind!r}") from None
        object.__setattr__(self, "kind", kind)
        if int(self.L) != self.L or self.L < 2:
            raise DomainError(f"lattice size must be an integer >= 2, got {self.L}")
        object.__setattr__(self, "L", int(self.L))
        if not (math.isfinite(self.t) and self.t > 0):
            raise DomainError(f"hopping energy t must be positive, got {self.t}")
        if kind is HoppingKind.POWER_LAW:
            if self.gamma is None or not math.isfinite(self.gamma):
                raise DomainError("power-law hopping needs a finite gamma")
            if self.gamma <= 1:
                raise DomainError(
                    f"power-law hopping needs gamma > 1 (got {self.gamma}); "
                    "the dispersion has no thermodynamic limit otherwise"
                )
            object.__setattr__(self, "gamma", float(self.gamma))
        else:
            object.__setattr__(self, "gamma", None)

    @classmethod
    def nearest_neighbor(cls, L: int, t: float = 1.0) -> "HoppingModel":
        return cls(HoppingKind.NEAREST_NEIGHBOR, L, t)

    @classmethod
    def infinite_range(cls, L: int, t: float = 1.0) -> "HoppingModel":
        return cls(HoppingKind.INFINITE_RANGE, L, t)

    @classmethod
    def power_law(cls, gamma: float, L: int, t: float = 1.0) -> "HoppingModel":
        return cls(HoppingKind.POWER_LAW, L, t, gamma)

    def with_size(self, L: int) -> "HoppingModel":
        return replace(self, L=L)


@dataclass(frozen=True)
class DispersionTable:
    """Energies ``eps[m]`` at momenta ``k[m] = 2 pi m / L``; arrays are read-only."""

    k: np.ndarray
    eps: np.ndarray

    @property
    def L(self) -> int:
        return len(self.k)

    @property
    def e_min(self) -> float:
        return float(self.eps[0])


@dataclass(frozen=True)
class SmallKExpansion:
    """Small-``k`` structure of the thermodynamic-limit power-law dispersion.

    ``sigma = -2 t Gamma(1 - gamma)`` multiplies ``v**(gamma - 1)`` in the
    expansion of ``-2 t F(gamma, v)``.  On the imaginary axis ``v = -i k``
    only the real part survives, so the physical coefficient of
    ``k**(gamma - 1)`` is ``prefactor = sigma * cos(pi (gamma - 1) / 2)``,
    which is positive for every non-integer ``1 < gamma < 3``.
    """

    gamma: float
    t: float
    sigma: float
    exponent: float
    zeta_terms: tuple

    @property
    def prefactor(self) -> float:
        return self.sigma * math.cos(0.5 * math.pi * self.exponent)

    def energy_shift(self, k, order: int = 2):
        """``eps(k) - eps(0)`` from the leading power plus analytic terms up to ``k**order``."""
        k = np.abs(np.asarray(k, dtype=float))
        out = self.prefactor * k ** self.exponent
        coeffs = expansion_coefficients(self.gamma)
        for n in range(1, order + 1):
            out = out - 2.0 * self.t * coeffs[n] * np.real((1j * k) ** n)
        return out


def _check_mode(model: HoppingModel, m: int) -> int:
    if int(m) != m or not 0 <= m < model.L:
        raise ModeIndexError(f"mode index {m} outside 0..{model.L - 1}")
    return int(m)


def _reduced_cos(r: np.ndarray, L: int) -> np.ndarray:
    # cos(2 pi r / L) with r folded into [0, L/2] so eps(m) == eps(L - m) bitwise
    r = np.minimum(r % L, L - r % L)
    return np.cos(2.0 * np.pi * r / L)


def dispersion_at(model: HoppingModel, m: int) -> float:
    """Single-particle energy of mode ``m`` (``k_m = 2 pi m / L``)."""
    m = _check_mode(model, m)
    L, t = model.L, model.t
    if model.kind is HoppingKind.INFINITE_RANGE:
        return -t if m == 0 else 0.0
    if model.kind is HoppingKind.NEAREST_NEIGHBOR:
        return float(-2.0 * t * _reduced_cos(np.array([m]), L)[0])
    n = np.arange(1, L, dtype=np.int64)
    terms = _reduced_cos(n * m, L) / n.astype(float) ** model.gamma
    return -2.0 * t * math.fsum(terms)


def _mirror(half: np.ndarray, L: int) -> np.ndarray:
    """Extend values for m = 0..L//2 to m = 0..L-1 using eps(m) = eps(L-m)."""
    full = np.empty(L)
    full[: L // 2 + 1] = half[: L // 2 + 1]
    full[L // 2 + 1 :] = half[1 : L - L // 2][::-1]
    return full


@lru_cache(maxsize=64)
def dispersion_table(model: HoppingModel, thermo_limit: bool = False) -> DispersionTable:
    """Tabulate the dispersion on the full ``k`` grid.

    With ``thermo_limit=True`` power-law energies come from the
    ``L -> infinity`` dispersion evaluated on the same grid; the other
    kinds do not depend on the flag.
    """
    L, t = model.L, model.t
    m = np.arange(L)
    k = 2.0 * np.pi * m / L
    half_m = np.arange(L // 2 + 1)
    if model.kind is HoppingKind.INFINITE_RANGE:
        eps = np.zeros(L)
        eps[0] = -t
    elif model.kind is HoppingKind.NEAREST_NEIGHBOR:
        eps = _mirror(-2.0 * t * _reduced_cos(half_m, L), L)
    elif thermo_limit:
        eps = _mirror(dispersion_thermo_limit(model.gamma, t, 2.0 * np.pi * half_m / L), L)
    else:
        w = np.zeros(L)
        w[1:] = np.arange(1, L, dtype=float) ** -model.gamma
        eps = _mirror(-2.0 * t * np.fft.rfft(w).real, L)
    k.setflags(write=False)
    eps.setflags(write=False)
    return DispersionTable(k=k, eps=eps)


def _fold_k(k) -> np.ndarray:
    k = np.abs(np.asarray(k, dtype=float)) % (2.0 * np.pi)
    return np.minimum(k, 2.0 * np.pi - k)


def _check_gamma(gamma: float) -> float:
    gamma = float(gamma)
    if not gamma > 1:
        raise DomainError(f"thermodynamic-limit dispersion needs gamma > 1, got {gamma}")
    return gamma


def _re_F_on_circle(gamma: float, kf: np.ndarray, include_constant: bool) -> np.ndarray:
    # expansion where it is accurate, series route per point elsewhere
    out = np.empty(kf.shape)
    near = kf < _expansion_radius(gamma)
    if near.any():
        out[near] = _f_expansion(gamma, 1j * kf[near], include_constant=include_constant).real
    far = ~near
    if far.any():
        vals = np.array([bose_einstein_F(gamma, 1j * x).real for x in kf[far]])
        out[far] = vals if include_constant else vals - zeta(gamma)
    return out


def dispersion_thermo_limit(gamma: float, t: float, k):
    """``eps_gamma(k) = -2 t Re F(gamma, i k)`` for an infinite chain.

    Accepts a scalar or an array of momenta; returns the same shape.
    """
    gamma = _check_gamma(gamma)
    kf = np.atleast_1d(_fold_k(k))
    out = -2.0 * t * _re_F_on_circle(gamma, kf, include_constant=True)
    return float(out[0]) if np.ndim(k) == 0 else out.reshape(np.shape(k))


def dispersion_gap_thermo_limit(gamma: float, t: float, k):
    """``eps_gamma(k) - eps_gamma(0)`` without cancellation at small ``k``."""
    gamma = _check_gamma(gamma)
    kf = np.atleast_1d(_fold_k(k))
    out = -2.0 * t * _re_F_on_circle(gamma, kf, include_constant=False)
    return float(out[0]) if np.ndim(k) == 0 else out.reshape(np.shape(k))


def small_k_expansion(gamma: float, t: float = 1.0) -> SmallKExpansion:
    """Leading non-analytic term and first analytic coefficients at small ``k``.

    Only non-integer ``1 < gamma < 3`` is supported; the logarithmic branch
    for integer ``gamma`` is not implemented.
    """
    gamma = float(gamma)
    if not 1 < gamma < 3:
        raise DomainError(f"small-k expansion needs 1 < gamma < 3, got {gamma}")
    if _is_integer(gamma):
        raise DomainError(f"integer gamma = {gamma:g} uses the logarithmic branch, which is not implemented")
    coeffs = expansion_coefficients(gamma)
    return SmallKExpansion(
        gamma=gamma,
        t=float(t),
        sigma=-2.0 * t * gamma_fn(1.0 - gamma),
        exponent=gamma - 1.0,
        zeta_terms=tuple(coeffs[:3]),
    )
