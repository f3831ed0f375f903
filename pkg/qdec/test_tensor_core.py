import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from qdec.randomness import SeededSampler, random_density, random_pure
from qdec.tensor_core import (DensityOperator, LabeledSpace, LinearOp, PureState, apply_op, basis_state, fidelity,
                              fidelity_distance, helstrom, load_qobj, marginal, maximally_entangled,
                              maximally_mixed, op_of_vec, partial_trace, purify, reorder, save_qobj, schmidt, tensor,
                              trace_distance, uhlmann_isometry, vec_of_op)

X = np.array([[0, 1], [1, 0]])


def test_labeled_space_bookkeeping():
    space = LabeledSpace.of(A=2, B=3, C=4)
    assert space.dim == 24
    assert space.dim_of(["A", "C"]) == 8
    assert space.sub(["C", "A"]).labels == ("C", "A")
    assert space.without("B").dims == (2, 4)
    assert "B" in space and "D" not in space
    assert space.relabel({"A": "A'"}).labels == ("A'", "B", "C")


@pytest.mark.parametrize("systems", [(("A", 2), ("A", 3)), (("A", 0),)])
def test_labeled_space_rejects_bad_systems(systems):
    with pytest.raises(ValueError):
        LabeledSpace(systems)


def test_state_validation():
    space = LabeledSpace.of(A=2)
    with pytest.raises(ValueError):
        PureState(space, [1.0, 1.0])
    with pytest.raises(ValueError):
        DensityOperator(space, np.diag([1.5, -0.5]))
    with pytest.raises(ValueError):
        DensityOperator(space, np.diag([0.5, 0.25]))
    assert DensityOperator(space, np.diag([0.5, 0.25]), normalized=False).trace == pytest.approx(0.75)


def test_partial_isometry_flag_is_checked():
    space = LabeledSpace.of(A=2)
    with pytest.raises(ValueError):
        LinearOp(space, space, np.array([[1, 1], [0, 1]]), partial_isometry=True)


def test_marginal_of_maximally_entangled_is_maximally_mixed():
    phi = maximally_entangled("A", "B", 3)
    assert np.allclose(marginal(phi, "A").matrix, np.eye(3) / 3)
    assert np.allclose(partial_trace(phi, "A").matrix, np.eye(3) / 3)


def test_tensor_reorder_and_trace():
    rho = random_density(LabeledSpace.of(A=2), sampler=1)
    sigma = random_density(LabeledSpace.of(B=3), sampler=2)
    joint = tensor(rho, sigma)
    swapped = reorder(joint, ["B", "A"])
    assert np.allclose(swapped.matrix, np.kron(sigma.matrix, rho.matrix))
    assert np.allclose(partial_trace(swapped, "B").matrix, rho.matrix)
    assert np.allclose(marginal(joint, ["B"]).matrix, sigma.matrix)


def test_apply_op_puts_output_first():
    space = LabeledSpace.of(A=2, B=2)
    flip = LinearOp(LabeledSpace.of(B=2), LabeledSpace.of(C=2), X)
    out = apply_op(flip, basis_state(space, (0, 0)))
    assert out.labels == ("C", "A")
    assert np.allclose(out.amplitudes, basis_state(LabeledSpace.of(C=2, A=2), (1, 0)).amplitudes)


def test_op_vec_duality_inverts():
    psi = random_pure(LabeledSpace.of(A=2, B=3), sampler=4)
    op = op_of_vec(psi, "A", "B")
    assert op.matrix.shape == (3, 2)
    assert np.allclose(vec_of_op(op).amplitudes, psi.amplitudes)


def test_purify_reproduces_the_state():
    rho = random_density(LabeledSpace.of(A=3), rank=2, sampler=3)
    psi = purify(rho, "R")
    assert psi.space.dim_of("R") == 2
    assert np.allclose(marginal(psi, "A").matrix, rho.matrix)
    with pytest.raises(ValueError):
        purify(rho, "R", dim=1)


def test_schmidt_coefficients_of_product_and_entangled():
    coeffs, _, _ = schmidt(maximally_entangled("A", "B", 4))
    assert np.allclose(coeffs, np.full(4, 0.5))
    product = tensor(basis_state(LabeledSpace.of(A=2)), basis_state(LabeledSpace.of(B=2)))
    coeffs, _, _ = schmidt(product, "A")
    assert coeffs[0] == pytest.approx(1.0)
    assert coeffs[1] == pytest.approx(0.0, abs=1e-12)


def test_distances_on_orthogonal_and_equal_states():
    space = LabeledSpace.of(A=2)
    zero, one = basis_state(space, 0), basis_state(space, 1)
    assert trace_distance(zero, one) == pytest.approx(2.0)
    assert fidelity(zero, one) == pytest.approx(0.0, abs=1e-9)
    assert fidelity(zero, zero) == pytest.approx(1.0)
    assert fidelity(maximally_mixed(space), zero) == pytest.approx(np.sqrt(0.5))


def test_fidelity_of_subnormalized_states_includes_deficit():
    space = LabeledSpace.of(A=2)
    a = DensityOperator(space, np.diag([0.5, 0.0]), normalized=False)
    b = DensityOperator(space, np.diag([0.0, 0.5]), normalized=False)
    assert fidelity(a, b) == pytest.approx(0.5)


def test_helstrom_guessing_probability():
    space = LabeledSpace.of(A=2)
    rho = DensityOperator(space, np.diag([0.75, 0.25]))
    sigma = DensityOperator(space, np.diag([0.25, 0.75]))
    p_guess, (proj, rest) = helstrom(rho, sigma)
    assert p_guess == pytest.approx(0.75)
    assert np.allclose(proj, np.diag([1, 0]))
    assert np.allclose(proj + rest, np.eye(2))


def test_uhlmann_isometry_attains_fidelity():
    sampler = SeededSampler(11)
    rho = random_density(LabeledSpace.of(A=3), sampler=sampler)
    sigma = random_density(LabeledSpace.of(A=3), sampler=sampler)
    psi, chi = purify(rho, "R"), purify(sigma, "S", dim=4)
    v = uhlmann_isometry(psi, chi)
    moved = reorder(apply_op(v, psi), chi.labels)
    assert abs(np.vdot(chi.amplitudes, moved.amplitudes)) == pytest.approx(fidelity(rho, sigma), abs=1e-8)


def test_qobj_files_reload(tmp_path):
    rho = random_density(LabeledSpace.of(A=2, B=2), sampler=8)
    path = tmp_path / "rho.json"
    save_qobj(rho, str(path))
    loaded = load_qobj(str(path))
    assert loaded.space == rho.space
    assert np.allclose(loaded.matrix, rho.matrix)


@settings(max_examples=25, deadline=None)
@given(st.integers(min_value=0, max_value=2 ** 32 - 1))
def test_fuchs_van_de_graaf_holds(seed):
    sampler = SeededSampler(seed)
    space = LabeledSpace.of(A=2, B=2)
    rho, sigma = random_density(space, sampler=sampler), random_density(space, sampler=sampler)
    f, half_distance = fidelity(rho, sigma), trace_distance(rho, sigma) / 2
    assert 1 - f <= half_distance + 1e-8
    assert half_distance <= fidelity_distance(rho, sigma) + 1e-8
