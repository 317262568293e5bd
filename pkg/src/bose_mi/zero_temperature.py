"""Ground-state entanglement of an N-boson condensate on a ring.

Putting all ``N`` bosons into ``k = 0`` and splitting the ring into blocks
of ``L_A`` and ``L - L_A`` sites gives Schmidt weights that form a
binomial distribution with success probability ``L_A / L``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy import stats
from scipy.special import entr

from .errors import DomainError, PartitionError, TailMassError

__all__ = [
    "SchmidtSpectrum",
    "schmidt_spectrum",
    "entanglement_entropy_exact",
    "entropy_gaussian_asymptotic",
    "entropy_poisson_asymptotic",
    "poisson_spectrum",
    "poisson_entropy_exact",
    "total_variation",
]

_TAIL_MASS = 1e-12


@dataclass(frozen=True)
class SchmidtSpectrum:
    lambdas: np.ndarray
    N: int
    LA: int
    L: int


def schmidt_spectrum(N: int, LA: int, L: int) -> SchmidtSpectrum:
    """Schmidt weights ``C(N, l) (L_A/L)**l (L_B/L)**(N-l)`` for ``l = 0..N``."""
    if int(N) != N or N < 1:
        raise DomainError(f"particle number must be a positive integer, got {N}")
    if not 1 <= LA < L:
        raise PartitionError(f"need 1 <= LA < L, got LA={LA}, L={L}")
    # evaluate with the smaller block so that LA and L - LA mirror bitwise
    small = min(LA, L - LA)
    lam = stats.binom.pmf(np.arange(N + 1), int(N), small / L)
    if small != LA:
        lam = lam[::-1].copy()
    lam.setflags(write=False)
    return SchmidtSpectrum(lambdas=lam, N=int(N), LA=int(LA), L=int(L))


def entanglement_entropy_exact(spec: SchmidtSpectrum) -> float:
    """``-sum_l lambda_l ln lambda_l`` of a Schmidt spectrum."""
    return math.fsum(entr(spec.lambdas))


def entropy_gaussian_asymptotic(N: float) -> float:
    """Large-``N`` entropy ``(1 + ln(N pi / 2)) / 2`` at equal partition."""
    if not N >= 1:
        raise DomainError(f"N must be >= 1, got {N}")
    return 0.5 * (1.0 + math.log(0.5 * N * math.pi))


def entropy_poisson_asymptotic(NA: float) -> float:
    """Entropy of a Poisson distribution with mean ``NA`` through order ``1/NA``."""
    if not NA > 0:
        raise DomainError(f"mean particle number must be positive, got {NA}")
    return 0.5 * (1.0 + math.log(2.0 * math.pi * NA)) - 1.0 / (12.0 * NA)


def _default_l_max(NA: float) -> int:
    return int(math.ceil(max(10.0 * NA, NA + 12.0 * math.sqrt(NA) + 40.0)))


def poisson_spectrum(NA: float, l_max: int | None = None) -> np.ndarray:
    """Poisson weights for ``l = 0..l_max``, renormalised after truncation.

    Raises :class:`TailMassError` when the discarded tail exceeds ``1e-12``.
    """
    if not NA > 0:
        raise DomainError(f"mean particle number must be positive, got {NA}")
    if l_max is None:
        l_max = _default_l_max(NA)
    tail = stats.poisson.sf(l_max, NA)
    if tail > _TAIL_MASS:
        raise TailMassError(f"l_max={l_max} drops Poisson tail mass {tail:.3e} > {_TAIL_MASS:g}")
    w = stats.poisson.pmf(np.arange(l_max + 1), NA)
    return w / math.fsum(w)


def poisson_entropy_exact(NA: float, l_max: int | None = None) -> float:
    return math.fsum(entr(poisson_spectrum(NA, l_max)))


def total_variation(p, q) -> float:
    """Total-variation distance between two distributions on ``0, 1, 2, ...``."""
    p = np.asarray(p, dtype=float)
    q = np.asarray(q, dtype=float)
    n = max(len(p), len(q))
    p = np.pad(p, (0, n - len(p)))
    q = np.pad(q, (0, n - len(q)))
    return 0.5 * math.fsum(np.abs(p - q))
