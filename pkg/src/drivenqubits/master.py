"""Generator, dynamics and steady states of the driven, collectively damped atom pair.

Units: the single-atom decay rate is 1, so drives are G/gamma_1 and time is in
units of 1/gamma_1. Superoperators act on column-stacked density matrices.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .algebra import (
    COUPLING_MATRIX,
    IDENTITY2,
    SIGMA_MINUS,
    SIGMA_PLUS,
    BasisTag,
    DensityMatrix4,
    hermitian_eigen,
)
from .errors import (
    BasisError,
    MissingInitialPopulationError,
    SolverFailure,
    StepSizeError,
    UnsupportedDetuningError,
)

ZERO_SV_TOL = 1e-10
RESIDUAL_TOL = 1e-10
TAYLOR_CUTOFF = 1e-4

_I4 = np.eye(4, dtype=complex)
S1P = np.kron(SIGMA_PLUS, IDENTITY2)
S1M = np.kron(SIGMA_MINUS, IDENTITY2)
S2P = np.kron(IDENTITY2, SIGMA_PLUS)
S2M = np.kron(IDENTITY2, SIGMA_MINUS)
# Row functional with vec(rho) -> Tr(rho) under column stacking.
TRACE_ROW = _I4.reshape(-1, order="F").copy()


def vec(m) -> np.ndarray:
    return np.asarray(m).reshape(-1, order="F")


def unvec(v) -> np.ndarray:
    return np.asarray(v).reshape(4, 4, order="F")


def coupling_f(x: float, dperp_ratio: float) -> float:
    """Collective damping function of the scaled separation x = omega_A r / c."""
    if x < 0:
        raise ValueError(f"separation must be non-negative, got {x!r}")
    if not 0.0 <= dperp_ratio <= 1.0:
        raise ValueError(f"dperp_ratio must lie in [0, 1], got {dperp_ratio!r}")
    r = dperp_ratio
    if x < TAYLOR_CUTOFF:
        x2 = x * x
        return 2.0 / 3.0 - (r + 1.0) / 15.0 * x2 + (2.0 * r + 1.0) / 420.0 * x2 * x2
    s = math.sin(x) / x
    return r * s + (3.0 * r - 2.0) * (math.cos(x) - s) / (x * x)


@dataclass(frozen=True)
class ModelParams:
    g1bar: float
    g2bar: float = 0.0
    x: float = 1.0
    dperp_ratio: float = 1.0
    delta_lbar: float = 0.0

    def __post_init__(self):
        if self.x < 0:
            raise ValueError(f"x must be non-negative, got {self.x!r}")
        if not 0.0 <= self.dperp_ratio <= 1.0:
            raise ValueError(f"dperp_ratio must lie in [0, 1], got {self.dperp_ratio!r}")

    @property
    def f12(self) -> float:
        return coupling_f(self.x, self.dperp_ratio)

    @property
    def collective_rate(self) -> float:
        return 1.5 * self.f12


def drive_hamiltonian(p: ModelParams, t: float = 0.0) -> np.ndarray:
    ph = np.exp(-1j * p.delta_lbar * t)
    return -(p.g1bar * (S1P * ph + S1M * np.conj(ph)) + p.g2bar * (S2P * ph + S2M * np.conj(ph)))


def _dissipator_super(jump, partner, rate) -> np.ndarray:
    """rate * (J rho K^dag - 1/2 {K^dag J, rho}) as a 16x16 matrix."""
    k = partner.conj().T @ jump
    return rate * (np.kron(partner.conj(), jump) - 0.5 * np.kron(_I4, k) - 0.5 * np.kron(k.T, _I4))


def local_decay_superoperator() -> np.ndarray:
    return _dissipator_super(S1M, S1M, 1.0) + _dissipator_super(S2M, S2M, 1.0)


def collective_template() -> np.ndarray:
    """Cross-atom dissipator with unit rate; the model scales it by (3/2) F."""
    return _dissipator_super(S1M, S2M, 1.0) + _dissipator_super(S2M, S1M, 1.0)


def _dissipate(p: ModelParams, rho: np.ndarray) -> np.ndarray:
    out = np.zeros((4, 4), dtype=complex)
    for jump, partner, rate in (
        (S1M, S1M, 1.0),
        (S2M, S2M, 1.0),
        (S1M, S2M, p.collective_rate),
        (S2M, S1M, p.collective_rate),
    ):
        k = partner.conj().T @ jump
        out += rate * (jump @ rho @ partner.conj().T - 0.5 * (k @ rho + rho @ k))
    return out


@dataclass(frozen=True)
class Liouvillian:
    matrix: np.ndarray = field(repr=False)
    params: ModelParams

    def __post_init__(self):
        m = np.array(self.matrix, dtype=complex, copy=True)
        m.setflags(write=False)
        object.__setattr__(self, "matrix", m)

    def __matmul__(self, v):
        return self.matrix @ v

    def apply(self, rho) -> np.ndarray:
        m = rho.matrix if isinstance(rho, DensityMatrix4) else np.asarray(rho)
        return unvec(self.matrix @ vec(m))


def build_liouvillian(p: ModelParams) -> Liouvillian:
    if p.delta_lbar != 0.0:
        raise UnsupportedDetuningError(
            "a time-independent generator exists only at resonance; use apply_generator for delta != 0"
        )
    h = drive_hamiltonian(p)
    a = -1j * (np.kron(_I4, h) - np.kron(h.T, _I4))
    a = a + local_decay_superoperator() + p.collective_rate * collective_template()
    return Liouvillian(a, p)


def apply_generator(p: ModelParams, rho, t: float = 0.0) -> np.ndarray:
    """Right-hand side d rho / dt at time t, evaluated directly on the 4x4 matrix."""
    if isinstance(rho, DensityMatrix4):
        if rho.basis is not BasisTag.PRODUCT:
            raise BasisError("apply_generator works in the product basis")
        rho = rho.matrix
    rho = np.asarray(rho, dtype=complex)
    h = drive_hamiltonian(p, t)
    return -1j * (h @ rho - rho @ h) + _dissipate(p, rho)


def spectral_gap(p: ModelParams) -> tuple[int, float]:
    """(number of zero singular values, slowest nonzero decay rate) of the generator."""
    a = build_liouvillian(p).matrix
    sv = np.linalg.svd(a, compute_uv=False)
    mult = int(np.count_nonzero(sv < ZERO_SV_TOL))
    lam = np.linalg.eigvals(a)
    order = np.argsort(np.abs(lam))
    nonzero = lam[order[mult:]]
    if nonzero.size == 0:
        return mult, 0.0
    return mult, float(np.min(np.abs(nonzero.real)))


def liouvillian_spectrum(p: ModelParams) -> np.ndarray:
    return np.linalg.eigvals(build_liouvillian(p).matrix)


@dataclass(frozen=True)
class SteadyStateSolution:
    rho: DensityMatrix4
    zero_multiplicity: int
    residual: float
    spectral_gap: float


_SINGLET = COUPLING_MATRIX[:, 3]
SINGLET_PROJECTOR = np.outer(_SINGLET, _SINGLET).astype(complex)
# Row functional vec(rho) -> <0,0|rho|0,0>.
SINGLET_ROW = vec(SINGLET_PROJECTOR).conj()


def steady_state(p: ModelParams, p00: float | None = None) -> SteadyStateSolution:
    """Normalised null vector of the generator, in the product basis.

    When the zero eigenvalue is degenerate (coincident atoms, equal drives) the
    answer depends on the conserved singlet population ``p00`` of the initial state.
    """
    liou = build_liouvillian(p)
    a = liou.matrix
    mult, gap = spectral_gap(p)

    structural = p.x == 0.0 and p.g1bar == p.g2bar
    if mult >= 2 and structural:
        if p00 is None:
            raise MissingInitialPopulationError(
                "steady state is not unique here; supply the initial singlet population p00"
            )
        if not 0.0 <= p00 <= 1.0:
            raise ValueError(f"p00 must lie in [0, 1], got {p00!r}")
        # Null vector with no singlet weight, then mix in the dark singlet.
        lhs = np.vstack([a, TRACE_ROW, SINGLET_ROW])
        rhs = np.zeros(18, dtype=complex)
        rhs[16] = 1.0
        v, *_ = np.linalg.lstsq(lhs, rhs, rcond=None)
        rho1 = unvec(v)
        m = (1.0 - p00) * rho1 + p00 * SINGLET_PROJECTOR
    else:
        m = None
        if mult < 2:
            lhs = a.copy()
            lhs[0, :] = TRACE_ROW
            rhs = np.zeros(16, dtype=complex)
            rhs[0] = 1.0
            m = unvec(np.linalg.solve(lhs, rhs))
            if np.abs(a @ vec(m)).max() > RESIDUAL_TOL:
                m = None
        if m is None:
            # Nearly degenerate generator (e.g. x = 0 with G1 - G2 tiny): the dropped
            # row is no longer implied by the others, so solve the stacked system.
            lhs = np.vstack([a, TRACE_ROW])
            rhs = np.zeros(17, dtype=complex)
            rhs[16] = 1.0
            m = unvec(np.linalg.lstsq(lhs, rhs, rcond=None)[0])

    m = 0.5 * (m + m.conj().T)
    m = m / np.trace(m).real
    residual = float(np.abs(a @ vec(m)).max())
    if residual > RESIDUAL_TOL:
        raise SolverFailure(f"steady-state residual {residual:.2e} exceeds {RESIDUAL_TOL:.0e}")
    return SteadyStateSolution(DensityMatrix4(m), mult, residual, gap)


def _rk4_step_matrix(a: np.ndarray, h: float) -> np.ndarray:
    # Classical RK4 applied to a constant linear system collapses to this polynomial.
    ha = h * a
    ha2 = ha @ ha
    return np.eye(a.shape[0]) + ha + ha2 / 2.0 + ha2 @ ha / 6.0 + ha2 @ ha2 / 24.0


def _clean(m: np.ndarray) -> np.ndarray:
    m = 0.5 * (m + m.conj().T)
    return m / np.trace(m).real


def time_evolve(
    p: ModelParams,
    rho0: DensityMatrix4,
    t_final: float,
    dt: float = 1e-3,
    stride: int = 100,
    negativity_tol: float = 1e-6,
) -> list[tuple[float, DensityMatrix4]]:
    """Fixed-step RK4 trajectory sampled every ``stride`` steps (final time always kept).

    The step is shrunk slightly, if needed, so that an integer number of steps
    lands exactly on ``t_final``.
    """
    if dt <= 0:
        raise ValueError("dt must be positive")
    if t_final < 0:
        raise ValueError("t_final must be non-negative")
    if stride < 1:
        raise ValueError("stride must be at least 1")
    if rho0.basis is not BasisTag.PRODUCT:
        raise BasisError("time_evolve works in the product basis")

    n_steps = max(1, math.ceil(t_final / dt - 1e-12)) if t_final > 0 else 0
    h = t_final / n_steps if n_steps else dt
    m = _clean(np.array(rho0.matrix, dtype=complex))
    out = [(0.0, DensityMatrix4(m))]

    step_matrix = None
    if p.delta_lbar == 0.0:
        step_matrix = _rk4_step_matrix(build_liouvillian(p).matrix, h)

    for k in range(n_steps):
        t = k * h
        if step_matrix is not None:
            m = unvec(step_matrix @ vec(m))
        else:
            k1 = apply_generator(p, m, t)
            k2 = apply_generator(p, m + 0.5 * h * k1, t + 0.5 * h)
            k3 = apply_generator(p, m + 0.5 * h * k2, t + 0.5 * h)
            k4 = apply_generator(p, m + h * k3, t + h)
            m = m + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
        m = _clean(m)
        if (k + 1) % stride == 0 or k + 1 == n_steps:
            lam_min = hermitian_eigen(m)[0][-1]
            if lam_min < -negativity_tol:
                raise StepSizeError(
                    f"eigenvalue {lam_min:.2e} at t={t + h:.4g}; reduce dt (currently {h:.3g})"
                )
            out.append(((k + 1) * h, DensityMatrix4(m)))
    return out
