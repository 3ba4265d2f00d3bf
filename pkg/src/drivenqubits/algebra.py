"""Dense complex kernel for the two-atom problem.

Everything here works on small numpy arrays (2x2, 3x3, 4x4, 16x16). Product-basis
order is |++>, |+->, |-+>, |-->; the coupled order is |1,1>, |1,0>, |1,-1>, |0,0>.
Index 0 of a single-atom vector is the excited state |+>.
"""
from __future__ import annotations

import enum
from dataclasses import dataclass, field

import numpy as np

from .errors import (
    BasisError,
    DimensionError,
    HermiticityError,
    NonPhysicalError,
    NotPSDError,
)

HERMITIAN_TOL = 1e-12
TRACE_TOL = 1e-12
PSD_TOL = 1e-10
CLAMP_ERROR_TOL = 1e-8

SIGMA_X = np.array([[0, 1], [1, 0]], dtype=complex)
SIGMA_Y = np.array([[0, -1j], [1j, 0]], dtype=complex)
SIGMA_Z = np.array([[1, 0], [0, -1]], dtype=complex)
PAULIS = (SIGMA_X, SIGMA_Y, SIGMA_Z)
IDENTITY2 = np.eye(2, dtype=complex)
# |+><-| and |-><+| with |+> = (1, 0)
SIGMA_PLUS = np.array([[0, 1], [0, 0]], dtype=complex)
SIGMA_MINUS = np.array([[0, 0], [1, 0]], dtype=complex)

_R2 = 1.0 / np.sqrt(2.0)
# Column k holds the k-th coupled ket written in product coordinates.
COUPLING_MATRIX = np.array(
    [
        [1.0, 0.0, 0.0, 0.0],
        [0.0, _R2, 0.0, _R2],
        [0.0, _R2, 0.0, -_R2],
        [0.0, 0.0, 1.0, 0.0],
    ]
)
COUPLING_MATRIX.setflags(write=False)

_SWAP_ORDER = [0, 2, 1, 3]


class BasisTag(enum.Enum):
    PRODUCT = "product"
    TRIPLET_SINGLET = "triplet_singlet"


def _frozen(a: np.ndarray) -> np.ndarray:
    a = np.array(a, dtype=complex, copy=True)
    a.setflags(write=False)
    return a


@dataclass(frozen=True)
class DensityMatrix4:
    """A two-atom density matrix together with the basis its entries refer to.

    Construction does not enforce positivity: truncated weak-field expansions and
    integrator output are legitimately stored here too. Call ``validate`` where a
    genuine state is required.
    """

    matrix: np.ndarray
    basis: BasisTag = BasisTag.PRODUCT

    def __post_init__(self):
        m = np.asarray(self.matrix)
        if m.shape != (4, 4):
            raise DimensionError(f"expected a 4x4 matrix, got shape {m.shape}")
        object.__setattr__(self, "matrix", _frozen(m))

    def __getitem__(self, idx):
        return self.matrix[idx]

    def eigenvalues(self) -> np.ndarray:
        return hermitian_eigen(self.matrix)[0]

    def validate(self, psd_tol: float = PSD_TOL) -> "DensityMatrix4":
        m = self.matrix
        if np.abs(m - m.conj().T).max() > HERMITIAN_TOL:
            raise HermiticityError("density matrix is not Hermitian")
        if abs(np.trace(m) - 1.0) > TRACE_TOL:
            raise NonPhysicalError(f"trace is {np.trace(m).real!r}, not 1")
        lam_min = self.eigenvalues()[-1]
        if lam_min < -psd_tol:
            raise NotPSDError(f"smallest eigenvalue {lam_min:.3e} is negative")
        return self

    def is_physical(self, psd_tol: float = PSD_TOL) -> bool:
        try:
            self.validate(psd_tol)
        except (HermiticityError, NonPhysicalError, NotPSDError):
            return False
        return True

    def to(self, target: BasisTag) -> "DensityMatrix4":
        return change_basis(self, target)

    def population(self, k: int) -> float:
        return float(self.matrix[k, k].real)


@dataclass(frozen=True)
class BlochDecomposition:
    x: np.ndarray
    y: np.ndarray
    T: np.ndarray = field(repr=False)

    def __post_init__(self):
        for name, shape in (("x", (3,)), ("y", (3,)), ("T", (3, 3))):
            arr = np.array(getattr(self, name), dtype=float, copy=True)
            if arr.shape != shape:
                raise DimensionError(f"{name} must have shape {shape}, got {arr.shape}")
            arr.setflags(write=False)
            object.__setattr__(self, name, arr)


def _require_product(rho: DensityMatrix4, what: str) -> None:
    if rho.basis is not BasisTag.PRODUCT:
        raise BasisError(f"{what} needs a product-basis matrix; convert with change_basis first")


def tensor_product(a, b) -> np.ndarray:
    a = np.asarray(a, dtype=complex)
    b = np.asarray(b, dtype=complex)
    if a.shape != (2, 2) or b.shape != (2, 2):
        raise DimensionError(f"tensor_product takes two 2x2 operands, got {a.shape} and {b.shape}")
    return np.kron(a, b)


def partial_trace(rho: DensityMatrix4, keep: int) -> np.ndarray:
    """Reduced state of atom ``keep`` (1 or 2)."""
    _require_product(rho, "partial_trace")
    r = rho.matrix.reshape(2, 2, 2, 2)
    if keep == 1:
        return np.einsum("ijkj->ik", r)
    if keep == 2:
        return np.einsum("ijil->jl", r)
    raise ValueError(f"keep must be 1 or 2, got {keep!r}")


def change_basis(rho: DensityMatrix4, target: BasisTag) -> DensityMatrix4:
    if rho.basis is target:
        return rho
    o = COUPLING_MATRIX
    if target is BasisTag.TRIPLET_SINGLET:
        return DensityMatrix4(o.T @ rho.matrix @ o, target)
    return DensityMatrix4(o @ rho.matrix @ o.T, target)


def reorder_qubits(rho: DensityMatrix4) -> DensityMatrix4:
    """Swap the roles of atoms 1 and 2 (rows and columns 2 and 3 exchanged)."""
    _require_product(rho, "reorder_qubits")
    m = rho.matrix[np.ix_(_SWAP_ORDER, _SWAP_ORDER)]
    return DensityMatrix4(m, BasisTag.PRODUCT)


_LOCAL_1 = [np.kron(s, IDENTITY2) for s in PAULIS]
_LOCAL_2 = [np.kron(IDENTITY2, s) for s in PAULIS]
_CORR = [[np.kron(si, sj) for sj in PAULIS] for si in PAULIS]


def bloch_decompose(rho: DensityMatrix4) -> BlochDecomposition:
    _require_product(rho, "bloch_decompose")
    m = rho.matrix
    x = np.array([np.trace(m @ s) for s in _LOCAL_1])
    y = np.array([np.trace(m @ s) for s in _LOCAL_2])
    t = np.array([[np.trace(m @ s) for s in row] for row in _CORR])
    worst = max(np.abs(x.imag).max(), np.abs(y.imag).max(), np.abs(t.imag).max())
    if worst > 1e-10:
        raise HermiticityError(f"Pauli coefficient has imaginary part {worst:.2e}")
    return BlochDecomposition(x.real, y.real, t.real)


def bloch_reconstruct(b: BlochDecomposition) -> DensityMatrix4:
    m = np.eye(4, dtype=complex)
    for i in range(3):
        m += b.x[i] * _LOCAL_1[i] + b.y[i] * _LOCAL_2[i]
        for j in range(3):
            m += b.T[i, j] * _CORR[i][j]
    rho = DensityMatrix4(m / 4.0, BasisTag.PRODUCT)
    try:
        rho.validate()
    except (HermiticityError, NotPSDError, NonPhysicalError) as exc:
        raise NonPhysicalError(f"Bloch data does not describe a state: {exc}") from exc
    return rho


def hermitian_eigen(h, tol: float = 1e-14, max_sweeps: int = 60):
    """Cyclic complex Jacobi diagonalisation.

    Returns eigenvalues in descending order and the matching orthonormal
    eigenvectors as columns.
    """
    a = np.array(h, dtype=complex, copy=True)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise DimensionError(f"hermitian_eigen needs a square matrix, got shape {a.shape}")
    n = a.shape[0]
    if np.abs(a - a.conj().T).max(initial=0.0) > 1e-10:
        raise HermiticityError("hermitian_eigen received a non-Hermitian matrix")
    a = 0.5 * (a + a.conj().T)
    v = np.eye(n, dtype=complex)
    scale = np.linalg.norm(a)
    thresh = tol * scale

    for _ in range(max_sweeps):
        off = np.abs(a - np.diag(np.diag(a)))
        if off.max(initial=0.0) <= thresh:
            break
        for p in range(n - 1):
            for q in range(p + 1, n):
                apq = a[p, q]
                mag = abs(apq)
                if mag <= thresh:
                    continue
                phase = apq / mag
                theta = (a[q, q].real - a[p, p].real) / (2.0 * mag)
                t = 1.0 / (abs(theta) + np.sqrt(theta * theta + 1.0))
                if theta < 0.0:
                    t = -t
                c = 1.0 / np.sqrt(t * t + 1.0)
                s = t * c
                rot = np.array([[c, s * phase], [-s * np.conj(phase), c]])
                idx = [p, q]
                a[:, idx] = a[:, idx] @ rot
                a[idx, :] = rot.conj().T @ a[idx, :]
                a[p, q] = a[q, p] = 0.0
                v[:, idx] = v[:, idx] @ rot
    else:
        raise RuntimeError("Jacobi iteration did not converge")

    w = np.diag(a).real
    order = np.argsort(w)[::-1]
    return w[order], v[:, order]


def psd_sqrt(h) -> np.ndarray:
    w, v = hermitian_eigen(h)
    if w.size and w[-1] < -CLAMP_ERROR_TOL:
        raise NotPSDError(f"eigenvalue {w[-1]:.3e} is too negative for a square root")
    root = np.sqrt(np.clip(w, 0.0, None))
    return (v * root) @ v.conj().T


def trace_distance(a, b) -> float:
    ma = a.matrix if isinstance(a, DensityMatrix4) else np.asarray(a)
    mb = b.matrix if isinstance(b, DensityMatrix4) else np.asarray(b)
    if isinstance(a, DensityMatrix4) and isinstance(b, DensityMatrix4) and a.basis is not b.basis:
        mb = change_basis(b, a.basis).matrix
    w, _ = hermitian_eigen(ma - mb)
    return 0.5 * float(np.abs(w).sum())


def projector(ket) -> np.ndarray:
    k = np.asarray(ket, dtype=complex).reshape(-1)
    return np.outer(k, k.conj())


def coupled_ket(k: int) -> np.ndarray:
    """Product-basis coordinates of coupled ket k (0: |1,1>, 1: |1,0>, 2: |1,-1>, 3: |0,0>)."""
    return COUPLING_MATRIX[:, k].astype(complex)


def maximally_mixed() -> DensityMatrix4:
    return DensityMatrix4(np.eye(4) / 4.0)


def random_density_matrix(rng: np.random.Generator, dim: int = 4, rank: int | None = None) -> np.ndarray:
    """Ginibre-distributed random state (full rank unless ``rank`` is given)."""
    rank = dim if rank is None else rank
    g = rng.normal(size=(dim, rank)) + 1j * rng.normal(size=(dim, rank))
    m = g @ g.conj().T
    return m / np.trace(m).real


def random_unitary(rng: np.random.Generator, dim: int = 2) -> np.ndarray:
    z = (rng.normal(size=(dim, dim)) + 1j * rng.normal(size=(dim, dim))) / np.sqrt(2.0)
    q, r = np.linalg.qr(z)
    d = np.diag(r)
    return q * (d / np.abs(d))
