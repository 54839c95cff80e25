import itertools

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from concbounds import qlinalg as ql
from concbounds.errors import DimensionError, NotPSDError
from concbounds.states import bell_singlet, random_density

from conftest import random_hermitian, random_matrix


def kron_loop(a, b):
    """Entry-by-entry Kronecker product."""
    p, q = a.shape
    r, s = b.shape
    out = np.zeros((p * r, q * s), dtype=complex)
    for i, j, k, l in itertools.product(range(p), range(q), range(r), range(s)):
        out[i * r + k, j * s + l] = a[i, j] * b[k, l]
    return out


def ptrace_loop(m, dims, keep):
    """Brute-force index sum over every traced-out multi-index."""
    n = len(dims)
    keep = sorted(keep)
    out_sys = [i for i in range(n) if i not in keep]

    def flat(idx):
        f = 0
        for d, i in zip(dims, idx):
            f = f * d + i
        return f

    kdims = [dims[i] for i in keep]
    side = int(np.prod(kdims))
    res = np.zeros((side, side), dtype=complex)
    for ki in itertools.product(*[range(d) for d in kdims]):
        for kj in itertools.product(*[range(d) for d in kdims]):
            total = 0
            for t in itertools.product(*[range(dims[i]) for i in out_sys]):
                row, col = [0] * n, [0] * n
                for pos, s in enumerate(keep):
                    row[s], col[s] = ki[pos], kj[pos]
                for pos, s in enumerate(out_sys):
                    row[s] = col[s] = t[pos]
                total += m[flat(row), flat(col)]
            res[flat_k(ki, kdims), flat_k(kj, kdims)] = total
    return res


def flat_k(idx, dims):
    f = 0
    for d, i in zip(dims, idx):
        f = f * d + i
    return f


def test_kron_identity_and_projectors():
    assert ql.allclose(ql.kron(np.eye(2), np.eye(2)), np.eye(4), atol=0)
    assert ql.allclose(ql.kron(np.diag([1, 0]), np.diag([0, 1])), np.diag([0, 1, 0, 0]), atol=0)


def test_kron_matches_loop_and_trace_product(rng):
    for _ in range(20):
        a, b = random_matrix(rng, 2), random_matrix(rng, 2)
        k = ql.kron(a, b)
        assert ql.allclose(k, kron_loop(a, b), atol=1e-14)
        assert abs(np.trace(k) - np.trace(a) * np.trace(b)) < 1e-12


def test_kron_associative(rng):
    a, b, c = (random_matrix(rng, 2) for _ in range(3))
    assert ql.max_abs_diff(ql.kron(ql.kron(a, b), c), ql.kron(a, ql.kron(b, c))) <= 1e-13


def test_kron_of_hermitian_is_hermitian(rng):
    k = ql.kron(random_hermitian(rng, 2), random_hermitian(rng, 4))
    assert ql.hermiticity_error(k) < 1e-13


def test_partial_trace_singlet_marginal():
    s = bell_singlet().matrix
    assert ql.allclose(ql.partial_trace(s, (2, 2), [0]), np.eye(2) / 2, atol=1e-15)
    assert ql.allclose(ql.partial_trace(s, (2, 2), [1]), np.eye(2) / 2, atol=1e-15)


def test_partial_trace_of_product(rng):
    a, b = random_matrix(rng, 2), random_matrix(rng, 2)
    got = ql.partial_trace(ql.kron(a, b), (2, 2), [0])
    assert ql.allclose(got, np.trace(b) * a, atol=1e-13)


@pytest.mark.parametrize("dims,keep", [((2, 2), [1]), ((2, 3), [0]), ((2, 2, 2), [0, 2]), ((2, 2, 2, 2), [1, 3])])
def test_partial_trace_matches_index_sum(rng, dims, keep):
    side = int(np.prod(dims))
    m = random_matrix(rng, side)
    assert ql.allclose(ql.partial_trace(m, dims, keep), ptrace_loop(m, dims, keep), atol=1e-12)


def test_partial_trace_keep_all_is_identity_map():
    rho = random_density(5).matrix
    assert ql.allclose(ql.partial_trace(rho, (2, 2), [0, 1]), rho, atol=0)


def test_partial_trace_shape_errors():
    with pytest.raises(DimensionError):
        ql.partial_trace(np.eye(4), (2, 3), [0])
    with pytest.raises(DimensionError):
        ql.partial_trace(np.eye(4), (2, 2), [])


def test_permute_basis_swap():
    hv = np.zeros(4)
    hv[1] = 1
    vh = np.zeros(4)
    vh[2] = 1
    got = ql.permute_systems(np.outer(hv, hv), (2, 2), (1, 0))
    assert ql.allclose(got, np.outer(vh, vh), atol=0)


def test_permute_identity(rng):
    m = random_matrix(rng, 8)
    assert ql.allclose(ql.permute_systems(m, (2, 2, 2), (0, 1, 2)), m, atol=0)


def test_permute_preserves_spectrum(rng):
    h = random_hermitian(rng, 16)
    p = ql.permute_systems(h, (2, 2, 2, 2), (0, 2, 1, 3))
    assert np.allclose(np.linalg.eigvalsh(h), np.linalg.eigvalsh(p), atol=1e-12)


def test_permute_rejects_bad_perm():
    with pytest.raises(ValueError):
        ql.permute_systems(np.eye(4), (2, 2), (0, 0))


def test_permute_matches_swap_gate_conjugation(rng):
    # Independent route: conjugate by the explicit permutation matrix.
    dims, perm = (2, 2, 2), (2, 0, 1)
    m = random_matrix(rng, 8)
    pmat = np.zeros((8, 8))
    for old in itertools.product(range(2), repeat=3):
        new = tuple(old[p] for p in perm)
        pmat[flat_k(new, dims), flat_k(old, dims)] = 1
    assert ql.allclose(ql.permute_systems(m, dims, perm), pmat @ m @ pmat.T, atol=1e-14)


@given(seed=st.integers(0, 2**32 - 1), perm=st.permutations([0, 1, 2, 3]))
def test_permute_invariants(seed, perm):
    rng = np.random.default_rng(seed)
    m = random_matrix(rng, 16)
    dims = (2, 2, 2, 2)
    p = ql.permute_systems(m, dims, perm)
    assert abs(np.trace(p) - np.trace(m)) <= 1e-12
    assert abs(np.linalg.norm(p) - np.linalg.norm(m)) <= 1e-12
    back = ql.permute_systems(p, ql.permuted_dims(dims, perm), ql.inverse_permutation(perm))
    assert ql.allclose(back, m, atol=0)
    keep = [0, 3]
    new_keep = [perm.index(k) for k in keep]
    lhs = ql.partial_trace(p, dims, new_keep)
    rhs = ql.partial_trace(m, dims, keep)
    # kept systems come out in ascending new order; realign before comparing
    if sorted(new_keep) != new_keep or perm.index(0) > perm.index(3):
        lhs = ql.permute_systems(lhs, (2, 2), (1, 0))
    assert ql.max_abs_diff(lhs, rhs) <= 1e-12


def test_herm_eig_examples():
    w, _ = ql.herm_eig(np.diag([1.0, 3.0]))
    assert list(w) == [3.0, 1.0]
    w, _ = ql.herm_eig(np.array([[0, 1], [1, 0]]))
    assert np.allclose(w, [1, -1], atol=1e-15)


def test_herm_eig_reconstructs(rng):
    h = random_hermitian(rng, 16)
    w, u = ql.herm_eig(h)
    assert np.all(np.diff(w) <= 0)
    assert ql.max_abs_diff(u @ np.diag(w) @ u.conj().T, h) < 1e-9
    assert ql.max_abs_diff(u.conj().T @ u, np.eye(16)) < 1e-12


def test_herm_eig_rejects_non_hermitian():
    with pytest.raises(ValueError):
        ql.herm_eig(np.array([[0, 1], [0, 0]]))


def test_herm_sqrt_examples():
    assert ql.allclose(ql.herm_sqrt(np.eye(3)), np.eye(3), atol=1e-15)
    assert ql.allclose(ql.herm_sqrt(np.diag([4.0, 9.0])), np.diag([2.0, 3.0]), atol=1e-14)
    with pytest.raises(NotPSDError):
        ql.herm_sqrt(np.diag([1.0, -1e-6]))


@given(seed=st.integers(0, 2**32 - 1), rank=st.integers(1, 4))
def test_herm_sqrt_squares_back(seed, rank):
    rho = random_density(seed, rank).matrix
    s = ql.herm_sqrt(rho)
    assert ql.max_abs_diff(s @ s, rho) < 1e-8


def test_project_to_density_idempotent():
    rho = random_density(11)
    assert ql.max_abs_diff(ql.project_to_density(rho.matrix).matrix, rho.matrix) < 1e-12


def test_project_to_density_clips_by_hand():
    got = ql.project_to_density(np.diag([1.1, -0.1]), (2,))
    assert ql.allclose(got.matrix, np.diag([1.0, 0.0]), atol=1e-15)


def test_project_to_density_rejects_bad_trace():
    with pytest.raises(ValueError):
        ql.project_to_density(np.eye(4), (2, 2))


def test_project_simplex_against_brute_force(rng):
    # Nearest simplex point by dense grid search on a 3-vector.
    v = np.array([0.8, 0.5, -0.4])
    grid = [(a, b, 1 - a - b) for a in np.linspace(0, 1, 401) for b in np.linspace(0, 1, 401) if a + b <= 1]
    best = min(grid, key=lambda p: np.sum((np.array(p) - v) ** 2))
    assert np.allclose(ql.project_simplex(v), best, atol=3e-3)


@given(seed=st.integers(0, 2**32 - 1), scale=st.floats(0.0, 0.3))
def test_project_to_density_invariants(seed, scale):
    rng = np.random.default_rng(seed)
    h = random_density(seed).matrix + scale * random_hermitian(rng, 4) / 4
    h = h - (np.trace(h).real - 1) * np.eye(4) * rng.uniform(0, 1) / 4
    out = ql.project_to_density(h).matrix
    assert abs(np.trace(out) - 1) <= 1e-12
    assert np.linalg.eigvalsh(out).min() >= -1e-12
    assert ql.hermiticity_error(out) <= 1e-12


def test_density_matrix_validation():
    with pytest.raises(ValueError):
        ql.DensityMatrix(np.diag([0.5, 0.6, 0, 0]), (2, 2))
    with pytest.raises(NotPSDError):
        ql.DensityMatrix(np.diag([1.2, -0.2, 0, 0]), (2, 2))
    with pytest.raises(DimensionError):
        ql.DensityMatrix(np.eye(4) / 4, (2, 3))
    rho = random_density(3)
    assert rho.isclose(random_density(3), atol=0)
    assert not rho.matrix.flags.writeable


def test_fidelity_and_trace_distance():
    s = bell_singlet()
    mixed = ql.DensityMatrix(np.eye(4) / 4)
    assert abs(ql.fidelity(s, s) - 1) < 1e-12
    assert abs(ql.fidelity(s, mixed) - 0.25) < 1e-12
    assert abs(ql.trace_distance(s, mixed) - 0.75) < 1e-12
