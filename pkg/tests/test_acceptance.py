"""End-to-end acceptance criteria, one test per criterion.

Each test records a PASS/FAIL line (shown in the terminal summary) before asserting.
"""
import math
import os
import time

import numpy as np
from scipy.optimize import brentq

from conftest import record_criterion
from drivenqubits.algebra import (
    BasisTag,
    DensityMatrix4,
    bloch_decompose,
    bloch_reconstruct,
    maximally_mixed,
    random_density_matrix,
    random_unitary,
    trace_distance,
)
from drivenqubits.checks import coupling_extremes, oracle_equivalence
from drivenqubits.correlations import (
    classical_correlation,
    concurrence,
    full_report,
    geometric_discord,
    mutual_information,
    quantum_discord,
    von_neumann_entropy,
)
from drivenqubits.master import TRACE_ROW, ModelParams, build_liouvillian, coupling_f, spectral_gap, steady_state, time_evolve
from drivenqubits.oracles import (
    equal_g_matrix,
    g2zero_matrix,
    limit_xstate_g2zero,
    steady_equal_g,
    weak_concurrence_equal_g,
    weak_concurrence_g2zero,
    weak_field_equal_g,
    weak_field_g2zero,
    xstate_coupled_populations,
)
from drivenqubits.sweeps import COLUMNS, read_csv, run_figure

WORKERS = os.cpu_count() or 1
SINGLET = np.array([0, 1, -1, 0]) / np.sqrt(2)


def _product(m):
    return DensityMatrix4(m, BasisTag.TRIPLET_SINGLET).to(BasisTag.PRODUCT)


def test_criterion_01_oracle_equivalence():
    t0 = time.perf_counter()
    res = oracle_equivalence(7)
    elapsed = time.perf_counter() - t0
    ok = res.passed and elapsed < 30.0
    assert record_criterion(1, "oracle equivalence", ok, f"max dev {res.deviation:.2e} (tol 1e-10), {elapsed:.1f} s")


def test_criterion_02_coupling_extremes():
    res = coupling_extremes()
    at_zero = max(abs(coupling_f(x, r) - 2 / 3) for r in (0.0, 0.5, 1.0) for x in (0.0, 1e-8))
    ok = res.passed and at_zero <= 1e-12
    assert record_criterion(2, "coupling function extremes", ok, f"F(0)-2/3 <= {at_zero:.1e}; {res.detail}")


def test_criterion_03_xstate_limit():
    rho = limit_xstate_g2zero(2 / 3)
    p11, _, _, p00 = xstate_coupled_populations(2 / 3)
    rep = full_report(rho)
    checks = {
        "p11": abs(p11 - 1 / 20) <= 1e-12,
        "p00": abs(p00 - 7 / 20) <= 1e-12,
        "S_L": abs(rep.linear_entropy - 11 / 20) <= 1e-12,
        "geo_2": abs(rep.geo_discord_2 - 0.04) <= 1e-12,
        "discord_1": rep.discord_1 <= 1e-6,
        "ccl_1=qmi": abs(rep.ccl_1 - rep.qmi) <= 1e-6,
    }
    ok = all(checks.values())
    detail = f"geo_2={rep.geo_discord_2:.15f} discord_1={rep.discord_1:.1e} |ccl_1-qmi|={abs(rep.ccl_1 - rep.qmi):.1e}"
    assert record_criterion(3, "X-state limit values", ok, detail + ("" if ok else f" failing {checks}"))


def test_criterion_04_equal_drive_strong_field():
    rho = steady_equal_g(ModelParams(1e4, 1e4, 1.0, 1.0)).to(BasisTag.PRODUCT)
    td = trace_distance(rho, maximally_mixed())
    rep = full_report(rho)
    corr = max(rep.concurrence, rep.qmi, rep.discord_1, rep.discord_2, rep.geo_discord_1, rep.geo_discord_2)
    sl = abs(rep.linear_entropy - 0.75)
    ok = td <= 1e-6 and corr <= 1e-6 and sl <= 1e-6
    detail = f"trace distance {td:.2e} (tol 1e-6), max correlation {corr:.2e}, |S_L-3/4| {sl:.2e}"
    assert record_criterion(4, "equal-drive strong-field limit", ok, detail)


def test_criterion_05_sudden_death():
    g1 = np.geomspace(0.01, 10.0, 200)
    x = 2 * math.pi / 100
    parts, ok = [], True
    for mode, g2z in (("g2zero", True), ("equalg", False)):
        f = coupling_f(x, 1.0)
        c = np.array([concurrence(_product(g2zero_matrix(g, f) if g2z else equal_g_matrix(g, f))) for g in g1])
        k = int(np.argmax(c))
        dead = np.nonzero(c == 0.0)[0]
        dead = dead[dead > k]
        good = c[k] > 0 and dead.size > 0 and np.all(c[dead[0]:] == 0.0)
        ok &= bool(good)
        thr = g1[dead[0]] if dead.size else math.nan
        parts.append(f"{mode}: max C={c[k]:.3f} at G1={g1[k]:.3g}, C=0 from G1={thr:.3g}")
    assert record_criterion(5, "entanglement sudden death", ok, "; ".join(parts))


def test_criterion_06_weak_field():
    g, f = 0.05, 0.3
    bound = 3 * g**3
    devs = {
        "rho g2zero": float(np.abs(weak_field_g2zero(g, f)[0].matrix - g2zero_matrix(g, f)).max()),
        "rho equalg": float(np.abs(weak_field_equal_g(g, f)[0].matrix - equal_g_matrix(g, f)).max()),
        "C g2zero": abs(weak_concurrence_g2zero(g, f) - concurrence(_product(g2zero_matrix(g, f)))),
        "C equalg": abs(weak_concurrence_equal_g(g, f) - concurrence(_product(equal_g_matrix(g, f)))),
    }
    ok = all(v <= bound for v in devs.values())
    detail = ", ".join(f"{k} {v:.2e}" for k, v in devs.items()) + f" (tol {bound:.2e})"
    assert record_criterion(6, "weak-field consistency", ok, detail)


def test_criterion_07_dynamics_converge():
    rng = np.random.default_rng(7)
    points = [ModelParams(0.8, 0.0, 2.0, 0.0), ModelParams(1.5, 0.0, 0.7, 1.0),
              ModelParams(0.6, 0.6, 1.5, 1.0), ModelParams(1.2, 1.2, 4.0, 0.0)]
    worst = 0.0
    for p in points:
        target = steady_state(p).rho
        _, gap = spectral_gap(p)
        for _ in range(5):
            rho0 = DensityMatrix4(random_density_matrix(rng))
            final = time_evolve(p, rho0, 50.0 / gap, dt=0.005, stride=10**6)[-1][1]
            worst = max(worst, trace_distance(final, target))
    p = ModelParams(0.9, 0.9, 0.0, 1.0)
    _, gap = spectral_gap(p)
    rho0 = DensityMatrix4(random_density_matrix(rng))
    p00 = float(np.real(SINGLET @ rho0.matrix @ SINGLET))
    final = time_evolve(p, rho0, 50.0 / gap, dt=0.005, stride=10**6)[-1][1]
    p00_dev = abs(float(np.real(SINGLET @ final.matrix @ SINGLET)) - p00)
    td0 = trace_distance(final, steady_state(p, p00).rho)
    ok = worst <= 1e-6 and td0 <= 1e-6 and p00_dev <= 1e-8
    detail = f"worst trace distance {worst:.1e} over 20 runs; coincident case P00 drift {p00_dev:.1e}, distance {td0:.1e}"
    assert record_criterion(7, "convergence of dynamics", ok, detail)


def _zeros_of_f(ratio):
    xs = np.linspace(0.1, 12.0, 2000)
    fv = [coupling_f(float(x), ratio) for x in xs]
    return [brentq(coupling_f, xs[i], xs[i + 1], args=(ratio,), xtol=1e-15)
            for i in range(len(xs) - 1) if fv[i] * fv[i + 1] < 0]


def test_criterion_08_discord_zero_coincidence():
    worst, n = 0.0, 0
    i_d, i_g = COLUMNS.index("discord_2"), COLUMNS.index("geo_discord_2")
    for ratio in (1.0, 0.0):
        zeros = _zeros_of_f(ratio)
        n += len(zeros)
        _, data = read_csv(run_figure("discord_limits", x_values=tuple(zeros), ratios=(ratio,)))
        worst = max(worst, float(np.max(data[:, i_d])), float(np.max(data[:, i_g])))
    # away from the zeros the discords must be clearly nonzero, or the check is empty
    mid = full_report(limit_xstate_g2zero(coupling_f(2.0, 1.0)))
    ok = n > 0 and worst <= 1e-6 and mid.discord_2 > 1e-3
    assert record_criterion(8, "discord zeros follow F", ok, f"{n} zeros of F, max discord there {worst:.1e}")


def test_criterion_09_property_suites():
    n = 100
    rng = np.random.default_rng(2024)
    dev = dict(neg=0.0, hier=0.0, lu=0.0, pure=0.0, bloch=0.0, trace=0.0)
    keys = ("concurrence", "qmi", "discord_1", "discord_2", "geo_discord_1", "geo_discord_2", "linear_entropy")
    for _ in range(n):
        rho = DensityMatrix4(random_density_matrix(rng, rank=int(rng.integers(1, 5))))
        rep = full_report(rho)
        dev["neg"] = max(dev["neg"], -min(rep.discord_1, rep.discord_2, 0.0))
        dev["hier"] = max(dev["hier"], max(rep.ccl_1, rep.ccl_2) - rep.qmi, 0.0)
        u = np.kron(random_unitary(rng), random_unitary(rng))
        rot = full_report(DensityMatrix4(u @ rho.matrix @ u.conj().T))
        dev["lu"] = max(dev["lu"], max(abs(getattr(rep, k) - getattr(rot, k)) for k in keys))
        pure = DensityMatrix4(random_density_matrix(rng, rank=1))
        e = von_neumann_entropy(pure.matrix.reshape(2, 2, 2, 2).trace(axis1=1, axis2=3))
        dev["pure"] = max(dev["pure"], max(abs(quantum_discord(pure, s) - e) for s in (1, 2)))
        dev["bloch"] = max(dev["bloch"], float(np.abs(bloch_reconstruct(bloch_decompose(rho)).matrix - rho.matrix).max()))
        p = ModelParams(*(float(v) for v in rng.uniform([0, 0, 0, 0], [5, 5, 20, 1])))
        dev["trace"] = max(dev["trace"], float(np.abs(TRACE_ROW @ build_liouvillian(p).matrix).max()))
    tol = dict(neg=1e-9, hier=1e-9, lu=1e-8, pure=1e-7, bloch=1e-13, trace=1e-12)
    ok = all(dev[k] <= tol[k] for k in tol)
    detail = ", ".join(f"{k} {dev[k]:.1e}/{tol[k]:.0e}" for k in tol) + f" over {n} instances each"
    assert record_criterion(9, "property suites", ok, detail)


def test_criterion_10_figure_curves():
    cols, data = read_csv(run_figure("conc_vs_g1", workers=WORKERS))
    ic, ix, ir = cols.index("concurrence"), cols.index("x"), cols.index("dperp_ratio")
    peaks_ok, parts = True, []
    for ratio in (1.0, 0.0):
        sel = data[:, ir] == ratio
        xs = sorted(set(data[sel, ix]))
        peaks = [float(data[sel & (data[:, ix] == x), ic].max()) for x in xs]
        peaks_ok &= bool(all(a > b for a, b in zip(peaks, peaks[1:])))
        parts.append(f"peaks r={ratio:g}: " + "/".join(f"{v:.4f}" for v in peaks))
    xs = tuple(np.linspace(2.0, 12.0, 201))
    cols, data = read_csv(run_figure("conc_vs_g1", g1_values=(0.2,), x_values=xs, workers=WORKERS))
    amp = {}
    for ratio in (1.0, 0.0):
        c = data[data[:, cols.index("dperp_ratio")] == ratio, cols.index("concurrence")]
        amp[ratio] = float(c.max() - c.min())
    osc_ok = amp[1.0] > amp[0.0]
    parts.append(f"max-min C on x in [2,12] at G1=0.2: r=1 {amp[1.0]:.4f}, r=0 {amp[0.0]:.4f}")
    assert record_criterion(10, "figure curve properties", peaks_ok and osc_ok, "; ".join(parts))
