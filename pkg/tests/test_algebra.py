import numpy as np
import pytest
from hypothesis import given

from conftest import bell_state, product_state, seeds, singlet_state
from drivenqubits.algebra import (
    COUPLING_MATRIX,
    IDENTITY2,
    SIGMA_Y,
    SIGMA_Z,
    BasisTag,
    BlochDecomposition,
    DensityMatrix4,
    bloch_decompose,
    bloch_reconstruct,
    change_basis,
    coupled_ket,
    hermitian_eigen,
    maximally_mixed,
    partial_trace,
    projector,
    psd_sqrt,
    random_density_matrix,
    reorder_qubits,
    tensor_product,
)
from drivenqubits.errors import (
    BasisError,
    DimensionError,
    HermiticityError,
    NonPhysicalError,
    NotPSDError,
)
from drivenqubits.master import ModelParams
from drivenqubits.oracles import limit_far_apart_g2zero, limit_xstate_g2zero, steady_equal_g, weak_field_equal_g


def test_tensor_product_examples():
    assert np.allclose(tensor_product(IDENTITY2, IDENTITY2), np.eye(4))
    assert np.allclose(tensor_product(SIGMA_Z, SIGMA_Z), np.diag([1, -1, -1, 1]))
    yy = tensor_product(SIGMA_Y, SIGMA_Y)
    assert np.allclose(yy, np.fliplr(np.diag([-1, 1, 1, -1])))


def test_tensor_product_rejects_wrong_shapes():
    with pytest.raises(DimensionError):
        tensor_product(np.eye(3), IDENTITY2)


def test_density_matrix_shape_and_immutability():
    with pytest.raises(DimensionError):
        DensityMatrix4(np.eye(3))
    rho = maximally_mixed()
    with pytest.raises(ValueError):
        rho.matrix[0, 0] = 1.0


def test_validate_flags_bad_states():
    with pytest.raises(NotPSDError):
        DensityMatrix4(np.diag([1.5, -0.5, 0, 0])).validate()
    with pytest.raises(NonPhysicalError):
        DensityMatrix4(np.eye(4)).validate()
    m = np.eye(4) / 4
    m = m.astype(complex)
    m[0, 1] = 0.1
    with pytest.raises(HermiticityError):
        DensityMatrix4(m).validate()


def test_partial_trace_examples(rng):
    a, b = random_density_matrix(rng, 2), random_density_matrix(rng, 2)
    rho = DensityMatrix4(np.kron(a, b))
    assert np.abs(partial_trace(rho, 1) - a).max() < 1e-14
    assert np.abs(partial_trace(rho, 2) - b).max() < 1e-14
    assert np.allclose(partial_trace(bell_state(), 2), np.eye(2) / 2)
    assert np.allclose(partial_trace(limit_xstate_g2zero(2 / 3), 1), np.eye(2) / 2, atol=1e-15)


def test_partial_trace_requires_product_basis():
    with pytest.raises(BasisError):
        partial_trace(maximally_mixed().to(BasisTag.TRIPLET_SINGLET), 1)
    with pytest.raises(ValueError):
        partial_trace(maximally_mixed(), 3)


def test_change_basis_examples():
    e10 = np.zeros((4, 4))
    e10[1, 1] = 1.0
    prod = change_basis(DensityMatrix4(e10, BasisTag.TRIPLET_SINGLET), BasisTag.PRODUCT).matrix
    expect = np.zeros((4, 4))
    expect[1:3, 1:3] = 0.5
    assert np.allclose(prod, expect, atol=1e-15)
    mm = maximally_mixed()
    assert np.allclose(mm.to(BasisTag.TRIPLET_SINGLET).matrix, np.eye(4) / 4)
    rho0, _ = weak_field_equal_g(0.0, 0.3)
    assert np.allclose(rho0.to(BasisTag.PRODUCT).matrix, np.diag([0, 0, 0, 1.0]))


def test_coupling_matrix_columns_are_coupled_kets():
    assert np.allclose(COUPLING_MATRIX.T @ COUPLING_MATRIX, np.eye(4))
    assert np.allclose(projector(coupled_ket(3)), singlet_state().matrix)


def test_reorder_examples():
    sym = steady_equal_g(ModelParams(0.7, 0.7, 1.0, 1.0)).to(BasisTag.PRODUCT)
    assert np.abs(reorder_qubits(sym).matrix - sym.matrix).max() < 1e-15
    # only atom 1 is driven here, so the exchange moves weight between |+-> and |-+>
    x = limit_xstate_g2zero(2 / 3)
    assert np.isclose(reorder_qubits(x).matrix[1, 1], x.matrix[2, 2])
    pm = DensityMatrix4(np.diag([0, 1.0, 0, 0]))
    assert np.allclose(reorder_qubits(pm).matrix, np.diag([0, 0, 1.0, 0]))
    far = limit_far_apart_g2zero(1.0).matrix
    swapped = reorder_qubits(DensityMatrix4(far)).matrix
    assert abs(far[1, 3]) > 0 and abs(swapped[1, 3]) == 0
    assert swapped[2, 3] == far[1, 3]


def test_bloch_examples():
    b = bloch_decompose(maximally_mixed())
    assert np.allclose(b.x, 0) and np.allclose(b.y, 0) and np.allclose(b.T, 0)
    b = bloch_decompose(singlet_state())
    assert np.allclose(b.x, 0) and np.allclose(b.T, -np.eye(3))
    b = bloch_decompose(DensityMatrix4(np.diag([1.0, 0, 0, 0])))
    assert np.allclose(b.x, [0, 0, 1]) and np.allclose(b.y, [0, 0, 1])
    assert np.allclose(b.T, np.diag([0, 0, 1]))


def test_bloch_reconstruct_examples():
    z = np.zeros(3)
    assert np.allclose(bloch_reconstruct(BlochDecomposition(z, z, np.zeros((3, 3)))).matrix, np.eye(4) / 4)
    assert np.allclose(bloch_reconstruct(BlochDecomposition(z, z, -np.eye(3))).matrix, singlet_state().matrix)
    x = limit_xstate_g2zero(0.4)
    assert np.abs(bloch_reconstruct(bloch_decompose(x)).matrix - x.matrix).max() < 1e-13
    with pytest.raises(NonPhysicalError):
        bloch_reconstruct(BlochDecomposition(z, z, 2 * np.eye(3)))


def test_bloch_decompose_rejects_non_hermitian():
    m = np.eye(4, dtype=complex) / 4
    m[0, 1] = 0.2j
    with pytest.raises(HermiticityError):
        bloch_decompose(DensityMatrix4(m))


def test_hermitian_eigen_examples():
    w, _ = hermitian_eigen(SIGMA_Z)
    assert np.allclose(w, [1, -1])
    assert np.allclose(hermitian_eigen(np.eye(4) / 4)[0], 0.25)
    x = limit_xstate_g2zero(2 / 3).matrix
    assert np.allclose(hermitian_eigen(x)[0], np.sort(np.linalg.eigvalsh(x))[::-1], atol=1e-14)
    with pytest.raises(HermiticityError):
        hermitian_eigen(np.array([[0, 1], [0, 0]]))


@pytest.mark.parametrize("n", [2, 3, 4, 16])
def test_hermitian_eigen_residual_and_orthonormality(n, rng):
    g = rng.normal(size=(n, n)) + 1j * rng.normal(size=(n, n))
    h = g + g.conj().T
    w, v = hermitian_eigen(h)
    scale = np.linalg.norm(h)
    assert np.all(np.diff(w) <= 0)
    assert np.abs(h @ v - v * w).max() <= 1e-10 * scale
    assert np.abs(v.conj().T @ v - np.eye(n)).max() <= 1e-10


def test_psd_sqrt_examples():
    assert np.allclose(psd_sqrt(np.eye(4)), np.eye(4))
    assert np.allclose(psd_sqrt(np.diag([4.0, 1, 0, 0])), np.diag([2.0, 1, 0, 0]))
    p = projector(coupled_ket(1))
    assert np.allclose(psd_sqrt(p), p)
    with pytest.raises(NotPSDError):
        psd_sqrt(np.diag([1.0, -1e-6, 0, 0]))
    # numerical dust is clamped rather than rejected
    assert np.allclose(psd_sqrt(np.diag([1.0, -1e-11, 0, 0])), np.diag([1.0, 0, 0, 0]))


@given(seeds)
def test_change_basis_preserves_spectrum_and_is_involutive(seed):
    rho = DensityMatrix4(random_density_matrix(np.random.default_rng(seed)))
    c = rho.to(BasisTag.TRIPLET_SINGLET)
    assert np.abs(c.eigenvalues() - rho.eigenvalues()).max() < 1e-12
    assert np.abs(c.to(BasisTag.PRODUCT).matrix - rho.matrix).max() < 1e-14


@given(seeds)
def test_partial_trace_of_products(seed):
    rng = np.random.default_rng(seed)
    a, b = random_density_matrix(rng, 2), random_density_matrix(rng, 2)
    rho = DensityMatrix4(np.kron(a, b))
    assert np.abs(partial_trace(rho, 1) - a).max() < 1e-14
    assert np.abs(partial_trace(rho, 2) - b).max() < 1e-14


@given(seeds)
def test_bloch_round_trip(seed):
    rho = DensityMatrix4(random_density_matrix(np.random.default_rng(seed)))
    b = bloch_decompose(rho)
    assert np.linalg.norm(b.x) <= 1 + 1e-10 and np.linalg.norm(b.y) <= 1 + 1e-10
    assert np.abs(bloch_reconstruct(b).matrix - rho.matrix).max() < 1e-13


@given(seeds)
def test_reorder_swaps_bloch_roles(seed):
    rho = DensityMatrix4(random_density_matrix(np.random.default_rng(seed)))
    r = reorder_qubits(rho)
    assert np.array_equal(reorder_qubits(r).matrix, rho.matrix)
    b, br = bloch_decompose(rho), bloch_decompose(r)
    assert np.abs(br.x - b.y).max() < 1e-12
    assert np.abs(br.y - b.x).max() < 1e-12
    assert np.abs(br.T - b.T.T).max() < 1e-12


@given(seeds)
def test_psd_sqrt_squares_back(seed):
    rng = np.random.default_rng(seed)
    h = random_density_matrix(rng, 4, rank=int(rng.integers(1, 5))) * rng.uniform(0.1, 10)
    s = psd_sqrt(h)
    assert np.abs(s @ s - h).max() < 1e-9


def test_product_state_helper_is_physical(rng):
    assert product_state(rng).is_physical()
