"""Subsystem entropies and mutual information from truncated correlation matrices.

For a Gaussian (free-boson) state the reduced density matrix of a block is
fixed by the block's two-point function ``G_ij = <a_i^dag a_j>``; its von
Neumann entropy is ``sum_l s(g_l)`` over the eigenvalues ``g_l`` of the
truncated ``G`` with ``s(g) = (1 + g) ln(1 + g) - g ln g``.

Mutual information follows the half-normalised convention
``E_M = (E_A + E_B - S) / 2``, which reduces to the entanglement entropy
for a pure state.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
import scipy.linalg

from .dispersion import HoppingModel
from .errors import ClassificationError, ConvergenceError, DomainError, PartitionError, PositivityError
from .thermo import GrandCanonicalState, bose_entropy_terms, bose_factor, solve_mu, thermal_entropy

__all__ = [
    "CorrelationMatrix",
    "EntropyReport",
    "RegimePrediction",
    "correlation_row",
    "correlation_matrix",
    "spectrum",
    "entropy_from_spectrum",
    "mutual_information",
    "analytic_mi_infinite_range",
    "asymptotic_regime_mi",
]

NEGATIVE_SLACK = 1e-8


@dataclass(frozen=True)
class CorrelationMatrix:
    """Symmetric Toeplitz block ``G_ij = G(|i - j|)`` stored by its first row."""

    first_row: np.ndarray

    @property
    def size(self) -> int:
        return len(self.first_row)

    def dense(self) -> np.ndarray:
        return scipy.linalg.toeplitz(self.first_row)


@dataclass(frozen=True)
class EntropyReport:
    E_A: float
    E_B: float
    S: float
    E_M: float
    LA: int
    LB: int
    L: int
    beta: float
    mu: float
    N0: float = math.nan
    n_avg: float = math.nan


def correlation_row(state: GrandCanonicalState) -> np.ndarray:
    """``G(d) = (1/L) sum_m cos(k_m d) N_m`` for ``d = 0 .. L-1``."""
    row = np.fft.ifft(state.occ).real
    row.setflags(write=False)
    return row


def _check_partition(LA: int, L: int, allow_full: bool) -> int:
    upper = L if allow_full else L - 1
    if int(LA) != LA or not 1 <= LA <= upper:
        raise PartitionError(f"block size {LA} outside 1..{upper} for L={L}")
    return int(LA)


def correlation_matrix(state: GrandCanonicalState, LA: int) -> CorrelationMatrix:
    """Two-point function restricted to a contiguous block of ``LA`` sites."""
    LA = _check_partition(LA, state.model.L, allow_full=True)
    return CorrelationMatrix(first_row=correlation_row(state)[:LA])


def spectrum(G: CorrelationMatrix, check_residual: bool = False) -> np.ndarray:
    """Eigenvalues of ``G`` in descending order.

    Eigenvalues in ``[-1e-8, 0)`` are roundoff and are set to zero; anything
    lower raises :class:`PositivityError`.  With ``check_residual`` the
    eigenvectors are computed too and every pair must satisfy
    ``||G v - g v|| <= 1e-9 ||G||``.
    """
    mat = G.dense()
    if check_residual:
        vals, vecs = scipy.linalg.eigh(mat)
        resid = np.linalg.norm(mat @ vecs - vecs * vals, axis=0)
        scale = np.linalg.norm(mat, 2)
        if np.any(resid > 1e-9 * max(scale, 1e-300)):
            raise ConvergenceError(f"eigenpair residual {resid.max():.3e} exceeds 1e-9 * ||G||")
    else:
        vals = scipy.linalg.eigvalsh(mat)
    vals = vals[::-1].copy()
    if vals[-1] < -NEGATIVE_SLACK:
        raise PositivityError(f"correlation matrix has eigenvalue {vals[-1]:.3e} < -{NEGATIVE_SLACK:g}")
    np.maximum(vals, 0.0, out=vals)
    return vals


def entropy_from_spectrum(gs) -> float:
    """``sum_l [(1 + g_l) ln(1 + g_l) - g_l ln g_l]``."""
    return math.fsum(bose_entropy_terms(gs))


def mutual_information(
    model: HoppingModel,
    beta: float,
    n_target: float = 1.0,
    LA: int | None = None,
    *,
    tol: float = 1e-12,
    thermo_limit: bool = False,
    state: GrandCanonicalState | None = None,
) -> EntropyReport:
    """Subsystem entropies and mutual information of a contiguous bipartition.

    ``LA`` defaults to ``L // 2``.  ``E_B`` always comes from its own
    ``(L - LA)``-site block.  A precomputed ``state`` skips the
    chemical-potential solve.
    """
    L = model.L
    LA = L // 2 if LA is None else LA
    LA = _check_partition(LA, L, allow_full=False)
    LB = L - LA
    if state is None:
        state = solve_mu(model, beta, n_target, tol=tol, thermo_limit=thermo_limit)
    row = correlation_row(state)
    E_A = entropy_from_spectrum(spectrum(CorrelationMatrix(row[:LA])))
    E_B = entropy_from_spectrum(spectrum(CorrelationMatrix(row[:LB])))
    S = thermal_entropy(state)
    E_M = 0.5 * math.fsum([E_A, E_B, -S])
    return EntropyReport(
        E_A=E_A,
        E_B=E_B,
        S=S,
        E_M=E_M,
        LA=LA,
        LB=LB,
        L=L,
        beta=state.beta,
        mu=state.mu,
        N0=state.N0,
        n_avg=state.n_avg,
    )


def _s(x: float) -> float:
    return float(bose_entropy_terms(x))


def analytic_mi_infinite_range(L: int, LA: int, N0: float, Nk: float) -> float:
    """Closed-form mutual information of the infinite-range model.

    ``N0`` is the ``k = 0`` occupation and ``Nk`` the common occupation of
    every other mode.  The truncated ``G`` has one eigenvalue
    ``LA N0 / L + LB Nk / L`` and ``LA - 1`` copies of ``Nk``.
    """
    if N0 < 0 or Nk < 0:
        raise DomainError("occupations must be non-negative")
    LA = _check_partition(LA, L, allow_full=False)
    LB = L - LA
    gA = LA * N0 / L + LB * Nk / L
    gB = LB * N0 / L + LA * Nk / L
    return 0.5 * math.fsum([_s(gA), _s(gB), -_s(Nk), -_s(N0)])


@dataclass(frozen=True)
class RegimePrediction:
    case: int
    tag: str
    leading: float


_TC_BAND = 1e-6
_SMALL_BLOCK = 0.1


def asymptotic_regime_mi(
    L: int,
    LA: int,
    n: float,
    T: float,
    Tc: float,
    *,
    N0: float | None = None,
    flag: str | None = None,
) -> RegimePrediction:
    """Leading-order mutual information of the infinite-range model.

    Temperatures within a relative ``1e-6`` of ``Tc`` count as ``T = Tc``;
    blocks with ``LA <= L/10`` count as ``LA << L`` and ``2 LA = L`` as equal
    partition.  Anything else is rejected.  ``flag`` ("above", "at",
    "below") is an optional assertion about the temperature side; a
    contradiction raises :class:`ClassificationError`.

    ``N0`` defaults to the thermodynamic-limit condensate
    ``L (n - n_k(T))`` below ``Tc``.
    """
    if not (T > 0 and Tc > 0 and n > 0):
        raise DomainError("need T, Tc and n positive")
    rel = (T - Tc) / Tc
    side = "at" if abs(rel) <= _TC_BAND else ("above" if rel > 0 else "below")
    if flag is not None and flag != side:
        raise ClassificationError(f"T/Tc - 1 = {rel:.3e} classifies as {side!r}, flagged {flag!r}")
    if 2 * LA == L:
        part = "equal"
    elif 1 <= LA <= _SMALL_BLOCK * L:
        part = "small"
    else:
        raise ClassificationError(f"LA={LA}, L={L} is neither an equal partition nor LA << L")

    t = Tc * math.log1p(1.0 / n)
    if side == "above":
        if part == "small":
            return RegimePrediction(1, "T>Tc, LA<<L", 0.0)
        mu = -T * math.log1p(1.0 / n)
        n0 = bose_factor((-t - mu) / T)
        return RegimePrediction(2, "T>Tc, LA=L/2", analytic_mi_infinite_range(L, LA, n0, n))
    if side == "below":
        if N0 is None:
            N0 = L * (n - bose_factor(t / T))
        lead = 0.5 * math.log(LA * N0 / L)
        return RegimePrediction(3 if part == "small" else 4, f"T<Tc, {'LA<<L' if part == 'small' else 'LA=L/2'}", lead)
    if part == "small":
        return RegimePrediction(5, "T=Tc, LA<<L", 0.5 * math.log(n * LA / math.sqrt(L)))
    return RegimePrediction(6, "T=Tc, LA=L/2", 0.25 * math.log(n * LA))
