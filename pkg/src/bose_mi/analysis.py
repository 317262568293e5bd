"""Parameter sweeps over (beta, L) and logarithmic scaling fits."""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np
from scipy import stats

from .correlation import EntropyReport, mutual_information
from .dispersion import HoppingKind, HoppingModel
from .errors import BoseMIError, DomainError, InsufficientDataError

__all__ = [
    "SweepSpec",
    "SweepRecord",
    "ScalingFit",
    "SWEEP_COLUMNS",
    "run_sweep",
    "fit_log_scaling",
    "default_window",
]

SWEEP_COLUMNS = (
    "model", "gamma", "t", "n", "beta", "L", "LA", "LB",
    "mu", "N0", "n_avg", "E_A", "E_B", "S", "E_M", "error",
)
MIN_FIT_POINTS = 4


@dataclass(frozen=True)
class SweepSpec:
    """A grid of inverse temperatures and ring sizes for one hopping model.

    Either list may be empty, giving an empty sweep.
    ``partition`` is ``"equal"`` (``LA = L // 2``) or a fraction in (0, 1)
    giving ``LA = round(fraction * L)``, kept within ``1 .. L - 1``.
    """

    kind: HoppingKind
    betas: tuple
    sizes: tuple
    gamma: float | None = None
    t: float = 1.0
    n_target: float = 1.0
    partition: str | float = "equal"
    thermo_limit: bool = False

    def __post_init__(self):
        betas = tuple(float(b) for b in self.betas)
        sizes = tuple(int(L) for L in self.sizes)
        if any(b >= a for a, b in zip(sizes[1:], sizes)):
            raise DomainError(f"size ladder must be strictly increasing, got {sizes}")
        if any(not (b > 0 and math.isfinite(b)) for b in betas):
            raise DomainError(f"every beta must be positive and finite, got {betas}")
        if any(L < 2 for L in sizes):
            raise DomainError(f"every size must be >= 2, got {sizes}")
        if not self.n_target > 0:
            raise DomainError(f"target density must be positive, got {self.n_target}")
        if self.partition != "equal":
            try:
                frac = float(self.partition)
            except (TypeError, ValueError):
                raise DomainError(f"partition must be 'equal' or a fraction, got {self.partition!r}") from None
            if not 0 < frac < 1:
                raise DomainError(f"partition fraction must lie in (0, 1), got {frac}")
            object.__setattr__(self, "partition", frac)
        # validates kind, gamma and t
        model = HoppingModel(self.kind, sizes[0] if sizes else 2, self.t, self.gamma)
        object.__setattr__(self, "kind", model.kind)
        object.__setattr__(self, "gamma", model.gamma)
        object.__setattr__(self, "betas", tuple(sorted(set(betas))))
        object.__setattr__(self, "sizes", sizes)

    def model(self, L: int) -> HoppingModel:
        return HoppingModel(self.kind, L, self.t, self.gamma)

    def subsystem_size(self, L: int) -> int:
        if self.partition == "equal":
            return L // 2
        return min(L - 1, max(1, round(self.partition * L)))

    def points(self) -> list:
        return [(b, L) for b in self.betas for L in self.sizes]


@dataclass(frozen=True)
class SweepRecord:
    beta: float
    L: int
    LA: int
    report: EntropyReport | None = None
    error: str | None = None

    @property
    def key(self) -> tuple:
        return (self.beta, self.L)

    def as_row(self, spec: SweepSpec) -> dict:
        row = {
            "model": spec.kind.value,
            "gamma": spec.gamma if spec.gamma is not None else math.nan,
            "t": spec.t,
            "n": spec.n_target,
            "beta": self.beta,
            "L": self.L,
            "LA": self.LA,
            "LB": self.L - self.LA,
        }
        r = self.report
        for name in ("mu", "N0", "n_avg", "E_A", "E_B", "S", "E_M"):
            row[name] = getattr(r, name) if r is not None else math.nan
        row["error"] = self.error or ""
        return row


def _one_point(spec: SweepSpec, beta: float, L: int) -> SweepRecord:
    LA = spec.subsystem_size(L)
    try:
        rep = mutual_information(spec.model(L), beta, spec.n_target, LA, thermo_limit=spec.thermo_limit)
    except BoseMIError as exc:
        return SweepRecord(beta, L, LA, error=f"{type(exc).__name__}: {exc}")
    return SweepRecord(beta, L, LA, report=rep)


def run_sweep(spec: SweepSpec, workers: int = 1, done=()) -> list:
    """Evaluate every ``(beta, L)`` point of ``spec``.

    Points whose key appears in ``done`` (an iterable of ``(beta, L)``) are
    skipped.  A failing point is recorded with its error message instead of
    aborting the sweep.  Records come back sorted by ``(beta, L)`` whatever
    the worker count.
    """
    if workers < 1:
        raise DomainError(f"workers must be >= 1, got {workers}")
    skip = {(float(b), int(L)) for b, L in done}
    todo = [p for p in spec.points() if p not in skip]
    if workers == 1 or len(todo) <= 1:
        records = [_one_point(spec, b, L) for b, L in todo]
    else:
        # LAPACK and FFT release the GIL, so threads do overlap
        with ThreadPoolExecutor(max_workers=workers) as pool:
            records = list(pool.map(lambda p: _one_point(spec, *p), todo))
    return sorted(records, key=lambda r: r.key)


@dataclass(frozen=True)
class ScalingFit:
    """Least-squares line ``E_M = slope * ln(LA) + intercept``."""

    slope: float
    intercept: float
    r_squared: float
    stderr: float
    window: tuple
    n_points: int
    residuals: tuple = field(default=(), repr=False)


def default_window(sizes) -> tuple:
    """The largest ``max(4, ceil(n / 2))`` distinct block sizes."""
    uniq = sorted(set(sizes))
    if len(uniq) < MIN_FIT_POINTS:
        raise InsufficientDataError(f"need at least {MIN_FIT_POINTS} distinct sizes, got {len(uniq)}")
    keep = max(MIN_FIT_POINTS, math.ceil(len(uniq) / 2))
    chosen = uniq[-keep:]
    return (chosen[0], chosen[-1])


def fit_log_scaling(points, window: tuple | None = None) -> ScalingFit:
    """Fit ``E_M`` against ``ln(LA)``.

    Parameters
    ----------
    points : iterable of (LA, E_M)
    window : (LA_min, LA_max), optional
        Inclusive range of block sizes to fit; defaults to
        :func:`default_window`.

    Raises
    ------
    InsufficientDataError
        Fewer than four points inside the window.
    """
    pts = [(float(a), float(e)) for a, e in points]
    if any(not (a > 0 and math.isfinite(a) and math.isfinite(e)) for a, e in pts):
        raise DomainError("fit points need positive block sizes and finite values")
    if window is None:
        window = default_window([a for a, _ in pts])
    lo, hi = window
    sel = sorted(p for p in pts if lo <= p[0] <= hi)
    if len(sel) < MIN_FIT_POINTS:
        raise InsufficientDataError(
            f"only {len(sel)} points in window [{lo:g}, {hi:g}]; need at least {MIN_FIT_POINTS}"
        )
    x = np.log([a for a, _ in sel])
    y = np.array([e for _, e in sel])
    res = stats.linregress(x, y)
    resid = y - (res.slope * x + res.intercept)
    return ScalingFit(
        slope=float(res.slope),
        intercept=float(res.intercept),
        r_squared=float(res.rvalue) ** 2,
        stderr=float(res.stderr),
        window=(lo, hi),
        n_points=len(sel),
        residuals=tuple(resid.tolist()),
    )
