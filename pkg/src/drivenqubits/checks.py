"""Self-verification used by ``drivenqubits verify``.

Each check returns a CheckResult; the suite passes only if every check does.
"""
from __future__ import annotations

import time
from dataclasses import dataclass
from typing import Callable

import numpy as np
from scipy.optimize import minimize_scalar

from .algebra import (
    BasisTag,
    DensityMatrix4,
    bloch_decompose,
    bloch_reconstruct,
    random_density_matrix,
    random_unitary,
)
from .correlations import full_report, geometric_discord, linear_entropy, mutual_information
from .master import TRACE_ROW, ModelParams, build_liouvillian, coupling_f, steady_state
from .oracles import coincident_equal_g_matrix, equal_g_matrix, g2zero_matrix, limit_xstate_g2zero, xstate_coupled_populations


@dataclass(frozen=True)
class CheckResult:
    name: str
    passed: bool
    deviation: float
    tolerance: float
    detail: str = ""

    def line(self) -> str:
        status = "PASS" if self.passed else "FAIL"
        extra = f"  {self.detail}" if self.detail else ""
        return f"{status}  {self.name:<28s} max_dev={self.deviation:.3e} tol={self.tolerance:.1e}{extra}"


def _result(name, dev, tol, detail="") -> CheckResult:
    return CheckResult(name, bool(dev <= tol), float(dev), tol, detail)


def oracle_equivalence(grid_size: int = 7, f_func: Callable[[float, float], float] = coupling_f) -> CheckResult:
    """Closed forms against the nullspace solver over a (G1, x, ratio) grid.

    ``f_func`` feeds the closed forms only; substituting a wrong coupling function
    there must make this check fail.
    """
    g_vals = np.geomspace(0.05, 5.0, grid_size)
    x_vals = np.linspace(0.1, 10.0, grid_size)
    worst = 0.0
    for r in (0.0, 1.0):
        for g in g_vals:
            for x in x_vals:
                f = f_func(float(x), r)
                for g2, closed in ((0.0, g2zero_matrix), (g, equal_g_matrix)):
                    num = steady_state(ModelParams(float(g), float(g2), float(x), r)).rho
                    num = num.to(BasisTag.TRIPLET_SINGLET).matrix
                    worst = max(worst, float(np.abs(num - closed(float(g), f)).max()))
    return _result("oracle_equivalence", worst, 1e-10, f"{grid_size}x{grid_size}x2 grid, both modes")


def coupling_extremes() -> CheckResult:
    dev = max(abs(coupling_f(x, r) - 2.0 / 3.0) for r in (0.0, 0.5, 1.0) for x in (0.0, 1e-8))
    res = minimize_scalar(lambda x: coupling_f(x, 1.0), bounds=(3.0, 6.0), method="bounded",
                          options={"xatol": 1e-10})
    dev_min = abs(res.fun + 0.2237) / 5e-4
    dev_arg = abs(res.x - 4.233) / 5e-3
    # scaled so that a deviation of 1 sits exactly on the stated tolerance
    scaled = max(dev / 1e-12, dev_min, dev_arg)
    return _result("coupling_extremes", scaled, 1.0, f"min F={res.fun:.6f} at x={res.x:.5f}")


def xstate_limit() -> CheckResult:
    rho = limit_xstate_g2zero(2.0 / 3.0)
    p11, _, _, p00 = xstate_coupled_populations(2.0 / 3.0)
    rep = full_report(rho)
    devs = [
        abs(p11 - 1 / 20) / 1e-12,
        abs(p00 - 7 / 20) / 1e-12,
        abs(rep.linear_entropy - 11 / 20) / 1e-12,
        abs(rep.geo_discord_2 - 0.04) / 1e-12,
        rep.discord_1 / 1e-6,
        abs(rep.ccl_1 - rep.qmi) / 1e-6,
    ]
    return _result("xstate_limit", max(devs), 1.0, "scaled by per-quantity tolerance")


def degenerate_case() -> CheckResult:
    sol = steady_state(ModelParams(1.0, 1.0, 0.0, 1.0), p00=0.3)
    m = sol.rho.to(BasisTag.TRIPLET_SINGLET).matrix
    dev = max(float(np.abs(m - coincident_equal_g_matrix(1.0, 0.3)).max()), float(sol.zero_multiplicity != 2))
    return _result("degenerate_steady_state", dev, 1e-10)


def invariant_suites(n: int, seed: int = 20240601) -> list[CheckResult]:
    rng = np.random.default_rng(seed)
    rt = tp = lu = neg = hier = 0.0
    for _ in range(n):
        rho = DensityMatrix4(random_density_matrix(rng))
        rt = max(rt, float(np.abs(bloch_reconstruct(bloch_decompose(rho)).matrix - rho.matrix).max()))
        p = ModelParams(float(rng.uniform(0, 3)), float(rng.uniform(0, 3)), float(rng.uniform(0, 10)),
                        float(rng.uniform(0, 1)))
        tp = max(tp, float(np.abs(TRACE_ROW @ build_liouvillian(p).matrix).max()))
        u = np.kron(random_unitary(rng), random_unitary(rng))
        rho_u = DensityMatrix4(u @ rho.matrix @ u.conj().T)
        lu = max(lu, abs(mutual_information(rho) - mutual_information(rho_u)),
                 abs(linear_entropy(rho) - linear_entropy(rho_u)),
                 abs(geometric_discord(rho, 2) - geometric_discord(rho_u, 2)))
        rep = full_report(rho)
        neg = max(neg, -min(rep.discord_1, rep.discord_2, 0.0))
        hier = max(hier, max(rep.ccl_1, rep.ccl_2) - rep.qmi, 0.0)
    return [
        _result("bloch_round_trip", rt, 1e-13, f"{n} states"),
        _result("trace_preservation", tp, 1e-12, f"{n} generators"),
        _result("local_unitary_invariance", lu, 1e-8, f"{n} states"),
        _result("discord_nonnegative", neg, 1e-9, f"{n} states"),
        _result("qmi_bounds_classical", hier, 1e-9, f"{n} states"),
    ]


def run_all(grid_size: int = 7, f_func=coupling_f, n_random: int | None = None) -> list[CheckResult]:
    n_random = max(5, 15 * grid_size) if n_random is None else n_random
    results = [oracle_equivalence(grid_size, f_func), coupling_extremes(), xstate_limit(), degenerate_case()]
    results.extend(invariant_suites(n_random))
    return results


def corrupted_f(x: float, ratio: float) -> float:
    """Negative control: a coupling function off by one percent."""
    return 1.01 * coupling_f(x, ratio)


def timed_run(grid_size: int = 7, corrupt: bool = False) -> tuple[list[CheckResult], float]:
    t0 = time.perf_counter()
    res = run_all(grid_size, corrupted_f if corrupt else coupling_f)
    return res, time.perf_counter() - t0


__all__ = ["CheckResult", "run_all", "timed_run", "corrupted_f", "oracle_equivalence"]
