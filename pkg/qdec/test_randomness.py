import numpy as np
import pytest

from qdec.randomness import (SeededSampler, chernoff_bound, chernoff_experiment, clifford_group, clifford_moment_exact,
                             clifford_sample, haar_matrix, haar_second_moment, haar_unitary, random_density,
                             second_moment_coefficients, second_moment_mc, swap_matrix, weyl_operators)
from qdec.tensor_core import LabeledSpace


def test_identical_seeds_give_identical_streams():
    a, b = SeededSampler(7), SeededSampler(7)
    assert np.array_equal(a.ginibre(3, 3), b.ginibre(3, 3))
    assert np.array_equal(haar_matrix(4, a.spawn(2)), haar_matrix(4, b.spawn(2)))
    assert not np.allclose(haar_matrix(4, a.spawn(1)), haar_matrix(4, a.spawn(2)))


@pytest.mark.parametrize("seed", [-1, 2 ** 64])
def test_seed_range(seed):
    with pytest.raises(ValueError):
        SeededSampler(seed)


@pytest.mark.parametrize("d", [1, 2, 5])
def test_haar_unitary_is_unitary(d):
    u = haar_unitary(d, SeededSampler(3))
    assert u.is_isometry()
    assert np.allclose(u.matrix @ u.matrix.conj().T, np.eye(d))


def test_swap_exchanges_factors():
    sampler = SeededSampler(1)
    a, b = sampler.ginibre(3, 3), sampler.ginibre(3, 3)
    f = swap_matrix(3)
    assert np.allclose(f @ np.kron(a, b) @ f, np.kron(b, a))


@pytest.mark.parametrize("d", [2, 3])
def test_second_moment_of_identity_and_swap(d):
    assert np.allclose(second_moment_coefficients(np.eye(d * d), d), (1.0, 0.0))
    assert np.allclose(second_moment_coefficients(swap_matrix(d), d), (0.0, 1.0))


def test_second_moment_preserves_trace_and_swap_trace():
    m = random_density(LabeledSpace.of(A=3, B=3), sampler=5).matrix
    moment = haar_second_moment(m, 3)
    f = swap_matrix(3)
    assert np.trace(moment) == pytest.approx(np.trace(m))
    assert np.trace(moment @ f) == pytest.approx(np.trace(m @ f))


def test_clifford_group_sizes():
    assert len(clifford_group(1)) == 24
    with pytest.raises(ValueError):
        clifford_group(3)


@pytest.mark.slow
def test_two_qubit_clifford_group_is_a_two_design():
    assert len(clifford_group(2)) == 11520
    m = random_density(LabeledSpace.of(A=4, B=4), sampler=2).matrix
    assert np.abs(clifford_moment_exact(m, 2) - haar_second_moment(m, 4)).max() <= 1e-9


def test_single_qubit_clifford_group_is_a_two_design():
    m = random_density(LabeledSpace.of(A=2, B=2), sampler=9).matrix
    assert np.abs(clifford_moment_exact(m, 1) - haar_second_moment(m, 2)).max() <= 1e-9


def test_clifford_sample_is_a_group_element():
    u = clifford_sample(1, SeededSampler(4)).matrix
    assert any(abs(abs(np.vdot(g, u)) - 2) < 1e-9 for g in clifford_group(1))


def test_haar_monte_carlo_within_three_standard_errors():
    m = np.kron(np.diag([1, 0]), np.diag([0, 1])).astype(complex)
    mean, stderr = second_moment_mc(m, 2, 2000, SeededSampler(12))
    exact = haar_second_moment(m, 2)
    assert np.linalg.norm(mean - exact) <= 3 * np.linalg.norm(stderr)


def test_second_moment_mc_validation():
    with pytest.raises(ValueError):
        second_moment_mc(np.eye(4), 2, 1)
    with pytest.raises(ValueError):
        second_moment_mc(np.eye(4), 2, 10, kind="gaussian")


def test_weyl_operators_are_an_orthogonal_unitary_basis():
    ops = weyl_operators(3)
    assert len(ops) == 9
    gram = np.array([[np.trace(a.conj().T @ b) for b in ops] for a in ops])
    assert np.allclose(gram, 3 * np.eye(9))


def test_chernoff_experiment_extremes():
    rate, bound = chernoff_experiment(4, 16, 0.5, 20, SeededSampler(6))
    assert rate == 1.0
    rate, _ = chernoff_experiment(4, 16, 4.5, 20, SeededSampler(6))
    assert rate == 0.0
    assert bound == chernoff_bound(4, 16, 0.5)
    assert chernoff_bound(4, 64, 2) == pytest.approx(8 * np.exp(-64 / (8 * np.log(2))))
