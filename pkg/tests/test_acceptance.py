"""Acceptance criteria, one test each, at the stated tolerances.

Every test records a one-line PASS/FAIL verdict; ``conftest.py`` prints the
verdicts at the end of the session.  Run alone with::

    pytest tests/test_acceptance.py -v
"""

import io
import csv
import math
import time
from contextlib import redirect_stdout

import numpy as np
import pytest

from bose_mi.analysis import SweepSpec, fit_log_scaling, run_sweep
from bose_mi.cli import main
from bose_mi.correlation import (
    analytic_mi_infinite_range,
    correlation_matrix,
    entropy_from_spectrum,
    mutual_information,
    spectrum,
)
from bose_mi.dispersion import HoppingModel
from bose_mi.thermo import (
    condensate_at_tc_asymptotic,
    solve_mu,
    tc_infinite_range,
    tc_long_range,
    thermal_entropy,
)
from bose_mi.zero_temperature import (
    entanglement_entropy_exact,
    entropy_gaussian_asymptotic,
    entropy_poisson_asymptotic,
    poisson_entropy_exact,
    schmidt_spectrum,
)

RESULTS = {}
TC_INF = tc_infinite_range().Tc


def verdict(n, ok, detail):
    RESULTS[n] = f"criterion {n}: {'PASS' if ok else 'FAIL'}  {detail}"
    assert ok, RESULTS[n]


def _slope(kind, betas, sizes, gamma=None, window=None):
    spec = SweepSpec(kind, betas, sizes, gamma=gamma)
    recs = run_sweep(spec)
    out = {}
    for b in spec.betas:
        pts = [(r.LA, r.report.E_M) for r in recs if r.beta == b]
        out[b] = (fit_log_scaling(pts, window), {r.LA: r.report.E_M for r in recs if r.beta == b})
    return out


def test_criterion_1_closed_form_tc():
    buf = io.StringIO()
    with redirect_stdout(buf):
        code = main(["tc", "--model", "infinite", "--n", "1", "--t", "1"])
    tc_cli = float(next(csv.DictReader(io.StringIO(buf.getvalue())))["Tc"])
    reps = 1000
    t0 = time.perf_counter()
    for _ in range(reps):
        r = tc_infinite_range(1.0, 1.0)
    per_call = (time.perf_counter() - t0) / reps
    err = max(abs(tc_cli - 1 / math.log(2)), abs(r.Tc - 1 / math.log(2)))
    ok = code == 0 and err <= 1e-12 and per_call < 1e-3
    verdict(1, ok, f"Tc={r.Tc:.15f} |err|={err:.1e} per-call {per_call * 1e6:.1f} us")


def test_criterion_2_long_range_beta_c():
    parts, ok = [], True
    for gamma, ref in ((1.7, 0.297), (1.5, 0.16843), (1.3, 0.0954)):
        t0 = time.perf_counter()
        b = tc_long_range(gamma, 1.0, 1.0).beta_c
        dt = time.perf_counter() - t0
        rel = abs(b - ref) / ref
        ok &= rel <= 0.01 and dt < 10
        parts.append(f"g={gamma}: {b:.5f} (rel {rel:.1e}, {dt:.2f}s)")
    verdict(2, ok, "; ".join(parts))


def test_criterion_3_analytic_vs_numeric():
    t0 = time.perf_counter()
    worst = 0.0
    for L in (64, 256, 1024, 4096):
        model = HoppingModel.infinite_range(L)
        for f in (0.5, 1.0, 2.0):
            st = solve_mu(model, 1 / (f * TC_INF))
            r = mutual_information(model, st.beta, state=st)
            a = analytic_mi_infinite_range(L, L // 2, st.N0, float(st.occ[1]))
            worst = max(worst, abs(r.E_M - a))
    dt = time.perf_counter() - t0
    verdict(3, worst <= 1e-8 and dt < 300, f"max |E_M - closed form| = {worst:.2e} in {dt:.1f}s")


def test_criterion_4_infinite_range_slopes():
    sizes = [2 * LA for LA in (256, 512, 1024, 2048)]
    fits = _slope("infinite", [1 / (f * TC_INF) for f in (0.7, 1.0, 1.4)], sizes, window=(256, 2048))
    (f07, _), (f10, _), (f14, em14) = (fits[b] for b in sorted(fits, reverse=True))
    inc = em14[2048] - em14[1024]
    ok = abs(f07.slope - 0.5) <= 0.02 and abs(f10.slope - 0.25) <= 0.02 and inc < 0.01
    verdict(4, ok, f"slope(0.7Tc)={f07.slope:.4f} slope(Tc)={f10.slope:.4f} dE(1.4Tc)={inc:.2e}")


def test_criterion_5_long_range_slopes():
    t0 = time.perf_counter()
    sizes = [2 * LA for LA in (256, 512, 1024, 2048, 4096)]
    window = (256, 4096)
    beta_c = tc_long_range(1.7).beta_c
    f17 = _slope("powerlaw", [0.5, beta_c], sizes, gamma=1.7, window=window)
    f13 = _slope("powerlaw", [0.5], sizes, gamma=1.3, window=window)
    s1, s2, s3 = f17[0.5][0].slope, f17[beta_c][0].slope, f13[0.5][0].slope
    checks = (
        abs(s1 - 0.2405) <= 0.15 * 0.2405,
        abs(s2 - 0.1226) <= 0.20 * 0.1226,
        abs(s3 - 0.378) <= 0.15 * 0.378,
    )
    dt = time.perf_counter() - t0
    verdict(
        5,
        all(checks) and dt < 1800,
        f"g=1.7 b=0.5: {s1:.4f}; g=1.7 b_C={beta_c:.4f}: {s2:.4f}; g=1.3 b=0.5: {s3:.4f} ({dt:.0f}s)",
    )


def test_criterion_6_zero_temperature():
    e1000 = entanglement_entropy_exact(schmidt_spectrum(1000, 1, 2))
    d1 = abs(e1000 - entropy_gaussian_asymptotic(1000))
    d2 = abs(poisson_entropy_exact(100.0) - entropy_poisson_asymptotic(100.0))
    Ns = [10**2, 10**3, 10**4, 10**5]
    slope = np.polyfit(np.log(Ns), [entanglement_entropy_exact(schmidt_spectrum(N, 1, 2)) for N in Ns], 1)[0]
    ok = d1 <= 1e-3 and d2 <= 1e-4 and abs(slope - 0.5) <= 0.005
    verdict(6, ok, f"|binomial-gauss|={d1:.1e} |poisson-sum-formula|={d2:.1e} slope={slope:.5f}")


def test_criterion_7_condensate_sqrt_law():
    ratios = {}
    for p in (10, 12, 14):
        L = 2**p
        ratios[p] = solve_mu(HoppingModel.infinite_range(L), 1 / TC_INF).N0 / condensate_at_tc_asymptotic(L, 1.0)
    ok = all(0.99 <= r <= 1.01 for r in ratios.values())
    verdict(7, ok, " ".join(f"L=2^{p}: {r:.5f}" for p, r in ratios.items()))


def test_criterion_8_property_suites():
    rng = np.random.default_rng(20240601)
    kinds = ("nn", "infinite", "powerlaw")
    violations = []
    for i in range(200):
        kind = kinds[i % 3]
        L = 2 * int(rng.integers(2, 65))
        beta = float(np.exp(rng.uniform(np.log(0.05), np.log(20.0))))
        n = float(np.exp(rng.uniform(np.log(0.05), np.log(5.0))))
        gamma = float(rng.uniform(1.1, 3.5))
        LA = int(rng.integers(1, L))
        model = HoppingModel(kind, L, 1.0, gamma)
        st = solve_mu(model, beta, n)
        tag = f"{kind} L={L} beta={beta:.3g} n={n:.3g}"
        g = spectrum(correlation_matrix(st, LA))
        if abs(math.fsum(g) - LA * st.n_avg) > 1e-9 * max(1.0, LA * st.n_avg):
            violations.append(f"trace {tag}")
        full = entropy_from_spectrum(spectrum(correlation_matrix(st, L)))
        if abs(full - thermal_entropy(st)) > 1e-8 * max(1.0, full):
            violations.append(f"full-entropy {tag}")
        r = mutual_information(model, beta, n, LA, state=st)
        if r.E_M < -1e-9:
            violations.append(f"E_M<0 {tag}")
        half = mutual_information(model, beta, n, L // 2, state=st)
        if abs(half.E_A - half.E_B) > 1e-9:
            violations.append(f"symmetry {tag}")
        N = int(rng.integers(1, 5000))
        lam = schmidt_spectrum(N, LA, L).lambdas
        if abs(math.fsum(lam) - 1) > 1e-12 or lam.min() < 0:
            violations.append(f"schmidt N={N} {tag}")
    verdict(8, not violations, f"{len(violations)} violations in 200 draws" + (f": {violations[:3]}" if violations else ""))
