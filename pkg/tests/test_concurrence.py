import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from concbounds import concurrence as C
from concbounds.qlinalg import DensityMatrix, kron, max_abs_diff
from concbounds.states import bell_singlet, dephased_singlet, random_density, random_pure, werner

MIXED = DensityMatrix(np.eye(4) / 4)
SY = np.array([[0, -1j], [1j, 0]])


def wootters_textbook(rho):
    """Eigenvalues of the non-Hermitian product rho (sy sy) rho* (sy sy)."""
    yy = np.kron(SY, SY)
    ev = np.linalg.eigvals(rho @ yy @ rho.conj() @ yy)
    lam = np.sort(np.sqrt(np.abs(ev.real)))[::-1]
    return max(0.0, lam[0] - lam[1] - lam[2] - lam[3])


def pure_concurrence(psi):
    """|<psi| sy sy |psi*>| for a state vector."""
    return abs(psi @ np.kron(SY, SY) @ psi)


def test_wootters_examples():
    assert abs(C.wootters_concurrence(bell_singlet()) - 1) < 1e-12
    assert C.wootters_concurrence(MIXED) == 0.0
    assert abs(C.wootters_concurrence(werner(0.8)) - 0.7) < 1e-12
    for d in (0.25, 0.5, 0.75):
        assert abs(C.wootters_concurrence(dephased_singlet(d)) - d) < 1e-12


def test_wootters_rejects_wrong_shape():
    with pytest.raises(ValueError):
        C.wootters_concurrence(DensityMatrix(np.eye(8) / 8, (2, 2, 2)))


@given(seed=st.integers(0, 2**32 - 1), rank=st.integers(2, 4))
def test_wootters_matches_textbook_route(seed, rank):
    rho = random_density(seed, rank)
    assert abs(C.wootters_concurrence(rho) - wootters_textbook(rho.matrix)) < 1e-7


def test_wootters_on_pure_states_matches_amplitude_formula():
    for seed in range(200):
        rng = np.random.default_rng(seed)
        psi = rng.standard_normal(4) + 1j * rng.standard_normal(4)
        psi /= np.linalg.norm(psi)
        rho = DensityMatrix(np.outer(psi, psi.conj()))
        assert abs(C.wootters_concurrence(rho) - pure_concurrence(psi)) < 1e-12


def test_parity_projectors():
    pm, pp = (o.matrix for o in C.parity_projectors(2))
    assert abs(np.trace(pm) - 1) < 1e-15 and abs(np.trace(pp) - 3) < 1e-15
    psi = np.array([0, 1, -1, 0]) / math.sqrt(2)
    assert max_abs_diff(pm, np.outer(psi, psi)) < 1e-15
    assert max_abs_diff(pm + pp, np.eye(4)) == 0
    assert max_abs_diff(pm @ pp, np.zeros((4, 4))) == 0
    assert max_abs_diff(pm @ pm, pm) < 1e-15


def test_parity_projectors_qutrit():
    pm, pp = (o.matrix for o in C.parity_projectors(3))
    assert abs(np.trace(pm) - 3) < 1e-14 and abs(np.trace(pp) - 6) < 1e-14


def test_twofold_state_trace_and_purity():
    for seed in range(20):
        rho = random_density(seed)
        tw = C.twofold_state(rho)
        assert abs(np.trace(tw.matrix) - 1) < 1e-12
        assert abs(tw.purity() - rho.purity() ** 2) < 1e-12


def test_twofold_swap_trace_identity():
    pm = C.parity_projectors(2)[0].matrix
    for seed in range(20):
        rho = random_density(seed)
        tw = C.twofold_state(rho).matrix
        got = np.trace(tw @ kron(pm, np.eye(4))).real
        ra = rho.reduced([0])
        assert abs(got - (1 - np.trace(ra @ ra).real) / 2) < 1e-12


def test_twofold_layout_against_explicit_copy_swap():
    # In (A1, A2, B1, B2) order, exchanging the copies is S (x) S; swapping
    # only the A photons is S (x) I and changes an entangled rho (x) rho.
    rho = random_density(4)
    tw = C.twofold_state(rho).matrix
    s = C.swap_operator(2)
    both = kron(s, s)
    assert max_abs_diff(both @ tw @ both, tw) < 1e-14
    only_a = kron(s, np.eye(4))
    assert max_abs_diff(only_a @ tw @ only_a, tw) > 1e-3


def test_bound_observable_identities():
    pm, pp = (o.matrix for o in C.parity_projectors(2))
    k1 = C.bound_observable("K1").matrix
    assert max_abs_diff(k1, 4 * kron(np.eye(4), pm)) < 1e-15
    v1 = C.bound_observable("V1").matrix
    assert max_abs_diff(v1, 8 * kron(pm, pm) - 4 * kron(np.eye(4), pm)) < 1e-14
    assert abs(np.trace(C.bound_observable("TIGHT").matrix) - 4) < 1e-14
    for lab in ("V1", "V2", "K1", "K2", "TIGHT"):
        o = C.bound_observable(lab)
        assert o.matrix.shape == (16, 16) and o.dims == (2, 2, 2, 2)
    with pytest.raises(ValueError):
        C.bound_observable("nope")


def test_lower_bound_examples():
    assert abs(C.lower_bound(bell_singlet()).value - 1) < 1e-12
    lo = C.lower_bound(MIXED)
    assert abs(lo.raw_square + 0.5) < 1e-14 and lo.value == 0.0
    assert abs(C.lower_bound(dephased_singlet(0.539)).value - 0.539) < 1e-10
    assert lo.std_error == 0.0


def test_upper_bound_examples():
    up = C.upper_bound(bell_singlet())
    assert all(abs(v - 1) < 1e-12 for v in up.components.values())
    up = C.upper_bound(MIXED)
    assert abs(up.components["TIGHT"] - 0.25) < 1e-14
    assert abs(up.value - 0.5) < 1e-14
    assert abs(C.upper_bound(dephased_singlet(0.0)).value - math.sqrt(0.5)) < 1e-12


def test_purity_oracle_examples():
    got = C.purity_oracle(bell_singlet())
    assert np.allclose(got, (1, 0.5, 0.5, 1, 1, 1, 1, 1), atol=1e-14)
    got = C.purity_oracle(MIXED)
    assert np.allclose(got, (0.25, 0.5, 0.5, -0.5, -0.5, 1, 1, 0.25), atol=1e-14)


@given(seed=st.integers(0, 2**32 - 1), rank=st.integers(1, 4))
def test_dual_path(seed, rank):
    rho = random_density(seed, rank)
    op = C.twofold_expectations(rho)
    oracle = C.purity_oracle(rho).as_observables()
    for k in op:
        assert abs(op[k] - oracle[k]) <= 1e-10


@given(seed=st.integers(0, 2**32 - 1), rank=st.integers(1, 4))
def test_bound_ordering(seed, rank):
    rho = random_density(seed, rank)
    c = C.wootters_concurrence(rho)
    assert C.lower_bound(rho).value <= c + 1e-9
    assert c <= C.upper_bound(rho).value + 1e-9


def test_pure_state_collapse():
    for seed in range(200):
        rho = random_pure(seed)
        c = C.wootters_concurrence(rho)
        assert abs(C.lower_bound(rho).value - c) < 1e-8
        assert abs(math.sqrt(C.upper_bound(rho).components["TIGHT"]) - c) < 1e-8


def test_dephased_closed_forms():
    for d in np.linspace(0, 1, 101):
        rho = dephased_singlet(d)
        assert abs(C.lower_bound(rho).value - d) <= 1e-10
        tight = C.upper_bound(rho).components["TIGHT"]
        assert abs(math.sqrt(tight) - math.sqrt((1 + d * d) / 2)) <= 1e-10


def test_bound_estimate_value_invariant():
    for raw in (-0.3, 0.0, 0.49):
        b = C.BoundEstimate("lower", raw)
        assert abs(b.value - math.sqrt(max(0, raw))) <= 1e-12
    assert C.BoundEstimate("upper", 0.25).as_dict()["value"] == 0.5


def test_observable_validation():
    with pytest.raises(ValueError):
        C.Observable(np.array([[0, 1], [0, 0]]), (2,), "P_minus")
    with pytest.raises(ValueError):
        C.Observable(np.eye(2), (2,), "bogus")
