"""Correlation measures of two-qubit states.

Entropies are in bits. Quantities labelled by ``side`` refer to the atom that is
measured: side 2 measures atom 2 directly, side 1 swaps the atoms first and
reuses the same code path.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.optimize import minimize

from .algebra import (
    IDENTITY2,
    PAULIS,
    SIGMA_Y,
    BasisTag,
    BlochDecomposition,
    DensityMatrix4,
    bloch_decompose,
    hermitian_eigen,
    partial_trace,
    psd_sqrt,
    reorder_qubits,
)
from .errors import BasisError, HermiticityError, NonPhysicalError

ENTROPY_CUTOFF = 1e-14
DISCORD_CLAMP = 1e-9
GRID_A = 65
GRID_PHI = 129
N_REFINE = 3
_YY = np.kron(SIGMA_Y, SIGMA_Y)


@dataclass(frozen=True)
class ProjectorParams:
    """Measurement basis {|psi>, |phi>} on one qubit: a = |alpha|^2 and phase Phi."""

    alpha_sq: float
    phi: float

    @property
    def b(self) -> float:
        return math.sqrt(max(self.alpha_sq * (1.0 - self.alpha_sq), 0.0))

    @property
    def bloch(self) -> np.ndarray:
        b2 = 2.0 * self.b
        return np.array([b2 * math.cos(self.phi), b2 * math.sin(self.phi), 2.0 * self.alpha_sq - 1.0])

    def partner(self) -> "ProjectorParams":
        """Parameters of the orthogonal projector |phi><phi|."""
        return ProjectorParams(1.0 - self.alpha_sq, (self.phi + math.pi) % (2 * math.pi))

    def matrix(self) -> np.ndarray:
        a, b = self.alpha_sq, self.b
        e = np.exp(1j * self.phi)
        return np.array([[a, b * np.conj(e)], [b * e, 1.0 - a]])


def _product(rho: DensityMatrix4) -> DensityMatrix4:
    if rho.basis is not BasisTag.PRODUCT:
        raise BasisError("correlation measures take product-basis matrices")
    return rho


def von_neumann_entropy(rho) -> float:
    m = rho.matrix if isinstance(rho, DensityMatrix4) else np.asarray(rho, dtype=complex)
    if np.abs(m - m.conj().T).max() > 1e-10:
        raise HermiticityError("entropy of a non-Hermitian matrix")
    if abs(np.trace(m).real - 1.0) > 1e-8:
        raise NonPhysicalError("entropy needs a unit-trace matrix")
    w, _ = hermitian_eigen(m)
    if w[-1] < -1e-8:
        raise NonPhysicalError(f"eigenvalue {w[-1]:.2e} is negative")
    w = w[w > ENTROPY_CUTOFF]
    return float(-(w * np.log2(w)).sum())


def mutual_information(rho: DensityMatrix4) -> float:
    _product(rho)
    return (
        von_neumann_entropy(partial_trace(rho, 1))
        + von_neumann_entropy(partial_trace(rho, 2))
        - von_neumann_entropy(rho)
    )


def concurrence(rho: DensityMatrix4) -> float:
    """Wootters concurrence; sqrt(lambda_k) are the singular values of sqrt(rho) sqrt(rho~).

    Taking singular values directly avoids square-rooting eigenvalues that are zero up
    to rounding, which would turn 1e-16 noise into 1e-8 errors for low-rank states.
    """
    s = psd_sqrt(rho.matrix)
    roots = np.linalg.svd(s @ _YY @ s.conj() @ _YY, compute_uv=False)
    c = roots[0] - roots[1] - roots[2] - roots[3]
    return float(min(max(0.0, c), 1.0))


def conditional_state(b: BlochDecomposition, proj: ProjectorParams) -> tuple[float, np.ndarray | None]:
    """Outcome probability and post-measurement state of atom 1 when atom 2 is found in ``proj``.

    Returns ``(p, None)`` when the outcome has (numerically) zero probability.
    """
    g = proj.bloch
    mu = 1.0 + float(b.y @ g)
    p = 0.5 * mu
    if p < 1e-14:
        return p, None
    nu = b.x + b.T @ g
    state = (mu * IDENTITY2 + sum(nu[i] * PAULIS[i] for i in range(3))) / (2.0 * mu)
    return p, state


def _branch_entropy(mu, nu_norm):
    # -(mu/4)(1 +- r) log2((1 +- r)/2) with r = |nu|/mu, written to stay finite as mu -> 0
    mu = np.asarray(mu, dtype=float)
    nu_norm = np.minimum(np.asarray(nu_norm, dtype=float), np.abs(mu))
    total = np.zeros(np.broadcast(mu, nu_norm).shape)
    safe_mu = np.where(mu > 0, mu, 1.0)
    for sign in (1.0, -1.0):
        w = mu + sign * nu_norm
        ratio = np.where(w > 0, w / (2.0 * safe_mu), 1.0)
        total -= np.where(w > 0, 0.25 * w * np.log2(ratio), 0.0)
    return total


def _objective_from_bloch(b: BlochDecomposition, gam: np.ndarray) -> np.ndarray:
    """Vectorised conditional entropy; ``gam`` has shape (..., 3)."""
    yg = gam @ b.y
    tg = gam @ b.T.T
    mu_p, mu_m = 1.0 + yg, 1.0 - yg
    nu_p = np.linalg.norm(b.x + tg, axis=-1)
    nu_m = np.linalg.norm(b.x - tg, axis=-1)
    return _branch_entropy(mu_p, nu_p) + _branch_entropy(mu_m, nu_m)


def _scalar_branch(mu, nu):
    nu = min(nu, abs(mu))
    total = 0.0
    for w in (mu + nu, mu - nu):
        if w > 0.0:
            total -= 0.25 * w * math.log2(w / (2.0 * mu))
    return total


def _scalar_objective(b: BlochDecomposition):
    """Plain-float version of the objective for the simplex refinement (same formula)."""
    x = [float(v) for v in b.x]
    y = [float(v) for v in b.y]
    t = [[float(v) for v in row] for row in b.T]

    def f(g0, g1, g2):
        yg = y[0] * g0 + y[1] * g1 + y[2] * g2
        tg = [row[0] * g0 + row[1] * g1 + row[2] * g2 for row in t]
        nu_p = math.sqrt(sum((x[i] + tg[i]) ** 2 for i in range(3)))
        nu_m = math.sqrt(sum((x[i] - tg[i]) ** 2 for i in range(3)))
        return _scalar_branch(1.0 + yg, nu_p) + _scalar_branch(1.0 - yg, nu_m)

    return f


def _gamma(a, phi):
    a = np.asarray(a, dtype=float)
    phi = np.asarray(phi, dtype=float)
    b2 = 2.0 * np.sqrt(np.clip(a * (1.0 - a), 0.0, None))
    return np.stack([b2 * np.cos(phi), b2 * np.sin(phi), 2.0 * a - 1.0], axis=-1)


def conditional_entropy_objective(b: BlochDecomposition, proj: ProjectorParams) -> float:
    """Average entropy of atom 1 after measuring atom 2 in the basis ``proj``."""
    return float(_objective_from_bloch(b, _gamma(proj.alpha_sq, proj.phi)))


def conditional_entropy_by_states(b: BlochDecomposition, proj: ProjectorParams) -> float:
    """Same quantity assembled from the two post-measurement states."""
    total = 0.0
    for pr in (proj, proj.partner()):
        p, state = conditional_state(b, pr)
        if state is not None:
            total += p * von_neumann_entropy(state)
    return total


@dataclass(frozen=True)
class MinimizationResult:
    value: float
    argmin: ProjectorParams
    evals: int
    grid_best: float


def minimize_conditional_entropy(b: BlochDecomposition) -> MinimizationResult:
    """Coarse grid over the half sphere of measurement directions, then simplex polish.

    The objective is invariant under (a, Phi) -> (1 - a, Phi + pi), so Phi only
    needs to cover [0, pi] on the grid.
    """
    # a = (1 + cos theta)/2 with theta evenly spaced: uniform spacing in a itself
    # leaves gaps of ~0.25 rad in direction next to the poles.
    a_grid = 0.5 * (1.0 + np.cos(np.linspace(math.pi, 0.0, GRID_A)))
    phi_grid = np.linspace(0.0, math.pi, GRID_PHI)
    aa, pp = np.meshgrid(a_grid, phi_grid, indexing="ij")
    values = _objective_from_bloch(b, _gamma(aa, pp))
    evals = values.size
    flat = np.argsort(values, axis=None)
    grid_best = float(values.flat[flat[0]])

    # Refine on the sphere: theta is the polar angle of the measurement direction.
    scalar = _scalar_objective(b)

    def obj(v):
        th, ph = v
        st = math.sin(th)
        return scalar(st * math.cos(ph), st * math.sin(ph), math.cos(th))

    best_val, best_vec = grid_best, None
    for idx in flat[:N_REFINE]:
        i, j = np.unravel_index(idx, values.shape)
        th0 = math.acos(float(np.clip(2.0 * a_grid[i] - 1.0, -1.0, 1.0)))
        start = np.array([th0, phi_grid[j]])
        res = minimize(
            obj,
            start,
            method="Nelder-Mead",
            options={
                "xatol": 1e-9,
                "fatol": 1e-10,
                "maxiter": 4000,
                "initial_simplex": [start, start + [0.05, 0.0], start + [0.0, 0.05]],
            },
        )
        evals += int(res.nfev)
        if res.fun <= best_val:
            best_val, best_vec = float(res.fun), res.x

    if best_vec is None:
        i, j = np.unravel_index(flat[0], values.shape)
        argmin = ProjectorParams(float(a_grid[i]), float(phi_grid[j]))
    else:
        th, ph = best_vec
        a = 0.5 * (1.0 + math.cos(th))
        if math.sin(th) < 0:
            ph += math.pi
        argmin = ProjectorParams(float(np.clip(a, 0.0, 1.0)), float(ph % (2 * math.pi)))
    return MinimizationResult(best_val, argmin, evals, grid_best)


def _measured_frame(rho: DensityMatrix4, side: int) -> DensityMatrix4:
    _product(rho)
    if side == 2:
        return rho
    if side == 1:
        return reorder_qubits(rho)
    raise ValueError(f"side must be 1 or 2, got {side!r}")


def classical_correlation(rho: DensityMatrix4, side: int) -> tuple[float, ProjectorParams, int]:
    """Entropy reduction of the unmeasured atom, optimised over projective measurements on ``side``."""
    frame = _measured_frame(rho, side)
    b = bloch_decompose(frame)
    res = minimize_conditional_entropy(b)
    value = von_neumann_entropy(partial_trace(frame, 1)) - res.value
    return value, res.argmin, res.evals


def _discord_from(qmi: float, ccl: float) -> float:
    d = qmi - ccl
    return 0.0 if -DISCORD_CLAMP <= d < 0.0 else d


def quantum_discord(rho: DensityMatrix4, side: int) -> float:
    return _discord_from(mutual_information(rho), classical_correlation(rho, side)[0])


def geometric_discord(rho: DensityMatrix4, side: int) -> float:
    """Squared Hilbert-Schmidt distance to the closest state with zero discord for measurements on ``side``."""
    if side == 1:
        frame = _product(rho)
    elif side == 2:
        frame = reorder_qubits(_product(rho))
    else:
        raise ValueError(f"side must be 1 or 2, got {side!r}")
    b = bloch_decompose(frame)
    k = np.outer(b.x, b.x) + b.T @ b.T.T
    k_max = hermitian_eigen(k)[0][0]
    d = 0.25 * (b.x @ b.x + np.sum(b.T * b.T) - k_max)
    return 0.0 if d < 1e-12 else float(d)


def linear_entropy(rho: DensityMatrix4) -> float:
    m = rho.matrix
    return float(1.0 - np.trace(m @ m).real)


@dataclass(frozen=True)
class CorrelationReport:
    concurrence: float
    qmi: float
    entropy_a: float
    entropy_b: float
    entropy_ab: float
    ccl_1: float
    ccl_2: float
    discord_1: float
    discord_2: float
    geo_discord_1: float
    geo_discord_2: float
    linear_entropy: float
    argmin_1: ProjectorParams
    argmin_2: ProjectorParams
    optimizer_evals: int

    def scalars(self) -> dict[str, float]:
        keys = (
            "concurrence", "qmi", "entropy_a", "entropy_b", "entropy_ab", "ccl_1", "ccl_2",
            "discord_1", "discord_2", "geo_discord_1", "geo_discord_2", "linear_entropy",
        )
        return {k: getattr(self, k) for k in keys}


def full_report(rho: DensityMatrix4) -> CorrelationReport:
    rho = _product(rho)
    s_a = von_neumann_entropy(partial_trace(rho, 1))
    s_b = von_neumann_entropy(partial_trace(rho, 2))
    s_ab = von_neumann_entropy(rho)
    qmi = s_a + s_b - s_ab
    ccl_1, arg_1, ev_1 = classical_correlation(rho, 1)
    ccl_2, arg_2, ev_2 = classical_correlation(rho, 2)
    return CorrelationReport(
        concurrence=concurrence(rho),
        qmi=qmi,
        entropy_a=s_a,
        entropy_b=s_b,
        entropy_ab=s_ab,
        ccl_1=ccl_1,
        ccl_2=ccl_2,
        discord_1=_discord_from(qmi, ccl_1),
        discord_2=_discord_from(qmi, ccl_2),
        geo_discord_1=geometric_discord(rho, 1),
        geo_discord_2=geometric_discord(rho, 2),
        linear_entropy=linear_entropy(rho),
        argmin_1=arg_1,
        argmin_2=arg_2,
        optimizer_evals=ev_1 + ev_2,
    )
